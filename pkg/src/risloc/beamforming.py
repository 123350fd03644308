"""RIS reflection profiles: random, directional, and PEB-optimal grid search.

The optimizer restricts the profile to the span of the three-column steering
basis (the cascade vector conjugate and its two angle derivatives): the FIM
depends on the profile only through its projection onto that span, and any
optimum saturates the per-element magnitude constraint.  A finite coordinate
grid over the basis coefficients is therefore sufficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arrays import UpaGeometry, ris_cascade_vector, upa_coordinates
from .channel import SignalConfig
from .errors import DimensionMismatch, EmptyGrid, RankDeficient, SingularFim
from .fim import FimBundle, peb_from_workspaces, scenario_workspaces
from .geometry import AnglePair, Scenario


@dataclass(frozen=True, eq=False)
class RisProfile:
    """Complex reflection vector with per-element magnitude at most one."""

    omega: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=complex).reshape(-1)
        if w.size < 1:
            raise DimensionMismatch("empty RIS profile")
        if np.max(np.abs(w)) > 1.0 + 1e-12:
            raise ValueError(f"profile violates the magnitude constraint: "
                             f"max |w| = {np.max(np.abs(w)):.3e}")
        object.__setattr__(self, "omega", w)

    @property
    def n_elements(self) -> int:
        return self.omega.size


def random_profile(n_elements: int, seed: int) -> RisProfile:
    """Unit-modulus profile with i.i.d. uniform phases; deterministic per seed."""
    if n_elements < 1:
        raise DimensionMismatch("RIS needs at least one element")
    rng = np.random.default_rng([abs(int(seed)), 0x0415])
    return RisProfile(np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=n_elements)))


def directional_profile(geom: UpaGeometry, phi_ru: AnglePair, phi_sr: AnglePair,
                        fc: float) -> RisProfile:
    """Phase-conjugate profile: b^T w = N_r (coherent reflection toward the UE)."""
    b, _, _ = ris_cascade_vector(geom, phi_ru, phi_sr, fc)
    return RisProfile(b.conj())


@dataclass(frozen=True, eq=False)
class SteeringBasis:
    """Conjugate cascade vector, its angle derivatives, and their projector."""

    matrix: np.ndarray     # N_r x 3
    projector: np.ndarray  # N_r x N_r, Hermitian idempotent


def steering_basis(geom: UpaGeometry, phi_ru: AnglePair, phi_sr: AnglePair,
                   fc: float) -> SteeringBasis:
    b, db_az, db_el = ris_cascade_vector(geom, phi_ru, phi_sr, fc)
    mat = np.column_stack([b.conj(), db_az.conj(), db_el.conj()])
    gram = mat.conj().T @ mat
    if np.linalg.cond(gram) > 1e12:
        raise RankDeficient("steering basis Gram matrix is ill-conditioned")
    proj = mat @ np.linalg.solve(gram, mat.conj().T)
    return SteeringBasis(matrix=mat, projector=proj)


@dataclass(frozen=True)
class GridSpec:
    """Coefficient grid for the projection-subspace search.

    The first coefficient is real non-negative (the global phase of the
    profile is a nuisance); the other two range over magnitude x phase.
    """

    c1_values: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    #: The sub-0.25 magnitudes resolve the small basis-coefficient corrections
    #: needed when the design-time direction estimate is only a few beamwidths
    #: (or less) away from the truth.
    magnitudes: tuple = (0.0, 0.05, 0.1, 0.15, 0.25, 0.5, 0.75, 1.0)
    phases: tuple = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)

    def coefficients(self):
        """Deterministically ordered (c1, c2, c3) triples, zero triple skipped."""
        complex_vals = [0.0 + 0.0j]
        for mag in self.magnitudes:
            if mag == 0.0:
                continue
            for ph in self.phases:
                complex_vals.append(mag * complex(math.cos(ph), math.sin(ph)))
        out = []
        for c1 in self.c1_values:
            for c2 in complex_vals:
                for c3 in complex_vals:
                    if c1 == 0.0 and c2 == 0.0 and c3 == 0.0:
                        continue
                    out.append((c1, c2, c3))
        return out


def candidate_profiles(basis: SteeringBasis, grid: GridSpec) -> np.ndarray:
    """All grid candidates as rows, each renormalized to max |w| = 1."""
    cols = basis.matrix / np.linalg.norm(basis.matrix, axis=0, keepdims=True)
    coeffs = grid.coefficients()
    if not coeffs:
        raise EmptyGrid("coefficient grid is empty")
    c = np.asarray(coeffs, dtype=complex)
    raw = c @ cols.T
    norms = np.max(np.abs(raw), axis=1)
    keep = norms > 0.0
    if not np.any(keep):
        raise EmptyGrid("all grid candidates collapse to the zero profile")
    return raw[keep] / norms[keep, None]


def optimize_profile(scn: Scenario, cfg: SignalConfig, sat_index: int = 0,
                     ris_index: int = 0, grid: GridSpec | None = None,
                     profiles=None, gain_seed: int = 0, workspaces=None,
                     phi_ru: AnglePair | None = None):
    """Grid search over the steering-basis span for the PEB-minimizing profile.

    Optimizes the profile of ``ris_index`` with the remaining RIS profiles
    held fixed; the basis is built from the geometry of satellite
    ``sat_index`` while the objective is the full-scenario PEB.  ``phi_ru``
    overrides the true UE direction when only a rough estimate is available.
    Returns ``(RisProfile, peb)`` with ties broken toward the earliest grid
    candidate.
    """
    grid = grid or GridSpec()
    if workspaces is None:
        workspaces = scenario_workspaces(scn, cfg, gain_seed)
    ref = workspaces[sat_index].factors.params.ris[ris_index]
    geom = upa_coordinates(scn.ris_shape[0], scn.ris_shape[1], cfg.wavelength)
    basis = steering_basis(geom, phi_ru or ref.aod_ris, ref.aoa_ris, cfg.carrier_hz)
    if profiles is None:
        profiles = [directional_profile(geom, rp.aod_ris, rp.aoa_ris, cfg.carrier_hz).omega
                    for rp in workspaces[sat_index].factors.params.ris]
    current = [np.asarray(w.omega if isinstance(w, RisProfile) else w, dtype=complex)
               for w in profiles]

    best_peb = math.inf
    best = None
    for omega in candidate_profiles(basis, grid):
        current[ris_index] = omega
        try:
            peb = peb_from_workspaces(workspaces, current).peb
        except SingularFim:
            continue
        if peb < best_peb:
            best_peb = peb
            best = omega
    if best is None:
        raise SingularFim("every grid candidate left the scenario unidentifiable")
    return RisProfile(best), best_peb


@dataclass(frozen=True)
class DependenceReport:
    """PEB of a profile and of its projection onto the steering-basis span."""

    peb: float
    peb_projected: float

    @property
    def relative_difference(self) -> float:
        return abs(self.peb - self.peb_projected) / abs(self.peb)


def profile_dependence_check(omega, basis: SteeringBasis, scn: Scenario,
                             cfg: SignalConfig, ris_index: int = 0,
                             profiles=None, gain_seed: int = 0) -> DependenceReport:
    """Verify the bound ignores the out-of-span component of the profile."""
    w = np.asarray(omega.omega if isinstance(omega, RisProfile) else omega, dtype=complex)
    workspaces = scenario_workspaces(scn, cfg, gain_seed)
    if profiles is None:
        profiles = [w for _ in range(scn.n_ris)]
    current = [np.asarray(p.omega if isinstance(p, RisProfile) else p, dtype=complex)
               for p in profiles]
    current[ris_index] = w
    peb = peb_from_workspaces(workspaces, current).peb
    current[ris_index] = basis.projector @ w
    peb_proj = peb_from_workspaces(workspaces, current).peb
    return DependenceReport(peb=peb, peb_projected=peb_proj)
