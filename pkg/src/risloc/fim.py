"""Slepian-Bangs channel-domain FIM, location transformation, PEB, assembly.

Per-satellite channel parameter layout (length 6 + 5L):

    [tau_su, theta_az, theta_el, nu_su, Re(a_su), Im(a_su)]
    + per RIS l: [tau_sru, phi_az, phi_el, Re(a_sru), Im(a_sru)]

Location parameter layout (length 4 + 2K(1+L)):

    [p_u (3), clock offset, sat-0 gains (2 + 2L), sat-1 gains, ...]

Every partial derivative of the mean signal factorizes as

    d mu_m[n] / d gamma_i = c_i * m^a_i n^b_i
        * e^{j 2 pi (m T nu_p - n df tau_p)} * beta_m^{(g_i)} * rho_i,

with a, b in {0, 1}, beta an omega-independent per-transmission beam scalar
and rho_i one of {1, b^T w, (db/daz)^T w, (db/del)^T w}.  The double (m, n)
sum in the FIM then collapses onto precomputed moment tables that are reused
across RIS-profile candidates; only the rho scalars change with the profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, get_lapack_funcs

from .arrays import array_response, array_response_jacobian, ris_cascade_vector, upa_coordinates
from .channel import PathParams, SignalConfig, noiseless_signal, scenario_to_path_params
from .errors import DimensionMismatch, LayoutMismatch, SingularFim, TooLarge
from .geometry import AnglePair, Scenario

PARAMS_PER_LOS = 6
PARAMS_PER_RIS = 5
SINGULAR_COND_LIMIT = 1e14


def channel_dim(n_ris: int) -> int:
    return PARAMS_PER_LOS + PARAMS_PER_RIS * n_ris


def location_dim(n_sat: int, n_ris: int) -> int:
    return 4 + 2 * n_sat * (1 + n_ris)


@dataclass(frozen=True, eq=False)
class FimBundle:
    """Channel FIM, Jacobian, location FIM and the resulting PEB (meters)."""

    channel_fim: np.ndarray | None
    jacobian: np.ndarray | None
    location_fim: np.ndarray
    peb: float


def _wrap_angle(x: float) -> float:
    return (x + math.pi) % (2.0 * math.pi) - math.pi


class FimFactors:
    """Precomputed moment sums for one satellite's channel FIM.

    Everything that does not depend on the RIS profiles is tabulated at
    construction; :meth:`channel_fim` then costs O(N_r) dot products plus a
    dim x dim elementwise product per call.
    """

    def __init__(self, params: PathParams, cfg: SignalConfig,
                 sat_shape=(2, 2), ris_shape=(10, 10)):
        self.params = params
        self.cfg = cfg
        n_ris = params.n_ris
        self.dim = channel_dim(n_ris)
        lam = cfg.wavelength
        fc = cfg.carrier_hz
        sat_geom = upa_coordinates(sat_shape[0], sat_shape[1], lam)
        ris_geom = upa_coordinates(ris_shape[0], ris_shape[1], lam)

        # Per-transmission beam scalars beta_m, one row per scalar class:
        # 0..2 -> a(theta_su) and its two angle derivatives, 3+l -> a(theta_sr,l).
        f = cfg.precoders
        a_su = array_response(sat_geom, params.aod_sat, fc)
        da_az, da_el = array_response_jacobian(sat_geom, params.aod_sat, fc)
        beta = [a_su @ f, da_az @ f, da_el @ f]
        for rp in params.ris:
            beta.append(array_response(sat_geom, rp.aod_sat, fc) @ f)
        beta = np.asarray(beta)                      # (3 + L, M)
        cls_path = np.array([0, 0, 0] + list(range(1, n_ris + 1)))

        # RIS cascade vectors and their phi_ru derivatives, for rho scalars.
        self.ris_vectors = []
        for rp in params.ris:
            self.ris_vectors.append(ris_cascade_vector(ris_geom, rp.aod_ris, rp.aoa_ris, fc))

        taus = np.array([params.delay] + [rp.delay for rp in params.ris])
        nus = np.array([params.doppler] + [rp.doppler for rp in params.ris])

        m = np.arange(1, cfg.m_transmissions + 1, dtype=float)
        n = np.arange(1, cfg.n_subcarriers + 1, dtype=float)
        n_cls = beta.shape[0]
        n_path = 1 + n_ris
        msum = np.empty((n_cls, n_cls, 3), dtype=complex)
        for g1 in range(n_cls):
            for g2 in range(n_cls):
                dnu = nus[cls_path[g1]] - nus[cls_path[g2]]
                core = beta[g1] * beta[g2].conj() * np.exp(1j * 2.0 * math.pi * cfg.period_s * dnu * m)
                for a in range(3):
                    msum[g1, g2, a] = np.sum(m ** a * core)
        nsum = np.empty((n_path, n_path, 3), dtype=complex)
        for p1 in range(n_path):
            for p2 in range(n_path):
                dtau = taus[p1] - taus[p2]
                core = np.exp(-1j * 2.0 * math.pi * cfg.subcarrier_spacing_hz * dtau * n)
                for b in range(3):
                    nsum[p1, p2, b] = np.sum(n ** b * core)

        # Parameter metadata: path, beam class, m/n powers, constant, rho slot.
        sqp = math.sqrt(cfg.power_w)
        jm = 1j * 2.0 * math.pi * cfg.period_s
        jn = -1j * 2.0 * math.pi * cfg.subcarrier_spacing_hz
        path_idx, cls_idx, apow, bpow, const, rho_slot = [], [], [], [], [], []

        def add(p, g, a, b, c, slot):
            path_idx.append(p)
            cls_idx.append(g)
            apow.append(a)
            bpow.append(b)
            const.append(c)
            rho_slot.append(slot)

        add(0, 0, 0, 1, sqp * params.gain * jn, -1)      # tau_su
        add(0, 1, 0, 0, sqp * params.gain, -1)           # theta_az
        add(0, 2, 0, 0, sqp * params.gain, -1)           # theta_el
        add(0, 0, 1, 0, sqp * params.gain * jm, -1)      # nu_su
        add(0, 0, 0, 0, sqp, -1)                         # Re(a_su)
        add(0, 0, 0, 0, 1j * sqp, -1)                    # Im(a_su)
        for ell, rp in enumerate(params.ris):
            p, g = 1 + ell, 3 + ell
            add(p, g, 0, 1, sqp * rp.gain * jn, 3 * ell)      # tau_sru
            add(p, g, 0, 0, sqp * rp.gain, 3 * ell + 1)       # phi_az
            add(p, g, 0, 0, sqp * rp.gain, 3 * ell + 2)       # phi_el
            add(p, g, 0, 0, sqp, 3 * ell)                     # Re(a_sru)
            add(p, g, 0, 0, 1j * sqp, 3 * ell)                # Im(a_sru)

        path_idx = np.array(path_idx)
        cls_idx = np.array(cls_idx)
        apow = np.array(apow)
        bpow = np.array(bpow)
        const = np.array(const, dtype=complex)
        self.rho_slot = np.array(rho_slot)

        self.pair_table = (
            const[:, None] * const.conj()[None, :]
            * msum[cls_idx[:, None], cls_idx[None, :], apow[:, None] + apow[None, :]]
            * nsum[path_idx[:, None], path_idx[None, :], bpow[:, None] + bpow[None, :]]
        )

    def ris_scalars(self, profiles) -> np.ndarray:
        """Stacked rho triples (b^T w, db_az^T w, db_el^T w) for each RIS."""
        if len(profiles) != len(self.ris_vectors):
            raise DimensionMismatch(
                f"expected {len(self.ris_vectors)} RIS profiles, got {len(profiles)}")
        out = np.empty(3 * len(profiles), dtype=complex)
        for ell, ((b, db_az, db_el), omega) in enumerate(zip(self.ris_vectors, profiles)):
            w = np.asarray(omega, dtype=complex)
            if w.shape != b.shape:
                raise DimensionMismatch(f"RIS profile {ell} has shape {w.shape}, expected {b.shape}")
            out[3 * ell:3 * ell + 3] = (b @ w, db_az @ w, db_el @ w)
        return out

    def channel_fim(self, profiles) -> np.ndarray:
        """Channel-domain FIM for the given RIS profiles."""
        scal = self.ris_scalars(profiles)
        rho = np.ones(self.dim, dtype=complex)
        mask = self.rho_slot >= 0
        rho[mask] = scal[self.rho_slot[mask]]
        j = (2.0 / self.cfg.noise_var_w) * np.real(self.pair_table * np.outer(rho, rho.conj()))
        return 0.5 * (j + j.T)


def mu_partials(params: PathParams, profiles, cfg: SignalConfig,
                sat_shape=(2, 2), ris_shape=(10, 10)):
    """Factorized derivative representation of the mean signal.

    Returns the (moment tables, profiles) pair consumed by
    :func:`channel_fim`; building it is the only step with O(MN) cost.
    """
    return FimFactors(params, cfg, sat_shape, ris_shape), tuple(profiles)


def channel_fim(partials) -> np.ndarray:
    """Assemble the channel-domain FIM from :func:`mu_partials` output."""
    factors, profiles = partials
    return factors.channel_fim(profiles)


def _fd_steps(params: PathParams, cfg: SignalConfig):
    """Finite-difference steps tuned to put the phase increment near 1e-5."""
    h_tau = 1e-5 / (2.0 * math.pi * cfg.n_subcarriers * cfg.subcarrier_spacing_hz)
    h_nu = 1e-5 / (2.0 * math.pi * cfg.m_transmissions * cfg.period_s)
    h_ang = 1e-6
    steps = [h_tau, h_ang, h_ang, h_nu,
             max(abs(params.gain), 1e-30) * 1e-3,
             max(abs(params.gain), 1e-30) * 1e-3]
    for rp in params.ris:
        h_g = max(abs(rp.gain), 1e-30) * 1e-3
        steps += [h_tau, h_ang, h_ang, h_g, h_g]
    return steps


def _perturb(params: PathParams, index: int, delta: float) -> PathParams:
    """Shift channel parameter ``index`` of the layout by ``delta``."""
    if index < PARAMS_PER_LOS:
        if index == 0:
            return replace(params, delay=params.delay + delta)
        if index == 1:
            ap = params.aod_sat
            return replace(params, aod_sat=AnglePair(_wrap_angle(ap.az + delta), ap.el))
        if index == 2:
            ap = params.aod_sat
            return replace(params, aod_sat=AnglePair(ap.az, ap.el + delta))
        if index == 3:
            return replace(params, doppler=params.doppler + delta)
        if index == 4:
            return replace(params, gain=params.gain + delta)
        return replace(params, gain=params.gain + 1j * delta)
    ell, k = divmod(index - PARAMS_PER_LOS, PARAMS_PER_RIS)
    rp = params.ris[ell]
    if k == 0:
        rp = replace(rp, delay=rp.delay + delta)
    elif k == 1:
        rp = replace(rp, aod_ris=AnglePair(_wrap_angle(rp.aod_ris.az + delta), rp.aod_ris.el))
    elif k == 2:
        rp = replace(rp, aod_ris=AnglePair(rp.aod_ris.az, rp.aod_ris.el + delta))
    elif k == 3:
        rp = replace(rp, gain=rp.gain + delta)
    else:
        rp = replace(rp, gain=rp.gain + 1j * delta)
    ris = list(params.ris)
    ris[ell] = rp
    return replace(params, ris=tuple(ris))


def naive_fim_oracle(params: PathParams, profiles, cfg: SignalConfig,
                     sat_shape=(2, 2), ris_shape=(10, 10)) -> np.ndarray:
    """Brute-force FIM: finite-difference partials and a literal (m, n) loop.

    Independent of the factorized path; guarded to small pilot grids.
    """
    mn = cfg.m_transmissions * cfg.n_subcarriers
    if mn > 10_000:
        raise TooLarge(f"naive oracle limited to M*N <= 1e4, got {mn}")
    dim = channel_dim(params.n_ris)
    steps = _fd_steps(params, cfg)
    j = np.zeros((dim, dim))
    for m in range(1, cfg.m_transmissions + 1):
        for n in range(1, cfg.n_subcarriers + 1):
            d = np.empty(dim, dtype=complex)
            for i in range(dim):
                hi = steps[i]
                up = noiseless_signal(_perturb(params, i, hi), profiles, cfg, m, n,
                                      sat_shape, ris_shape)
                dn = noiseless_signal(_perturb(params, i, -hi), profiles, cfg, m, n,
                                      sat_shape, ris_shape)
                d[i] = (up - dn) / (2.0 * hi)
            j += np.real(np.outer(d, d.conj()))
    return (2.0 / cfg.noise_var_w) * j


def _geometric_params(scn: Scenario, cfg: SignalConfig, sat_index: int) -> np.ndarray:
    """Geometric channel entries [tau_su, th_az, th_el, nu_su, (tau, az, el) per RIS]."""
    p = scenario_to_path_params(scn, cfg, sat_index, gain_seed=0)
    out = [p.delay, p.aod_sat.az, p.aod_sat.el, p.doppler]
    for rp in p.ris:
        out += [rp.delay, rp.aod_ris.az, rp.aod_ris.el]
    return np.array(out)


# Columns of the geometric entries inside the channel layout, and flags for
# the entries that are angles (finite differences must wrap at +-pi).
def _geometric_columns(n_ris: int):
    cols = [0, 1, 2, 3]
    is_angle = [False, True, True, False]
    for ell in range(n_ris):
        base = PARAMS_PER_LOS + PARAMS_PER_RIS * ell
        cols += [base, base + 1, base + 2]
        is_angle += [False, True, True]
    return np.array(cols), np.array(is_angle)


def location_jacobian(scn: Scenario, cfg: SignalConfig, sat_index: int,
                      pos_step: float = 1e-3, clock_step: float = 1e-12) -> np.ndarray:
    """Transformation matrix d gamma_k^T / d eta for one satellite.

    Geometric entries come from central finite differences of the scenario
    map; gain nuisances are identity-embedded into the satellite's own
    location-parameter slots.
    """
    n_ris = scn.n_ris
    gdim = channel_dim(n_ris)
    edim = location_dim(scn.n_satellites, n_ris)
    cols, is_angle = _geometric_columns(n_ris)
    t = np.zeros((edim, gdim))

    def diff(scn_up, scn_dn, h):
        gu = _geometric_params(scn_up, cfg, sat_index)
        gd = _geometric_params(scn_dn, cfg, sat_index)
        d = gu - gd
        d[is_angle] = np.array([_wrap_angle(x) for x in d[is_angle]])
        return d / (2.0 * h)

    for r in range(3):
        e = np.zeros(3)
        e[r] = pos_step
        t[r, cols] = diff(replace(scn, ue_position=scn.ue_position + e),
                          replace(scn, ue_position=scn.ue_position - e), pos_step)
    t[3, cols] = diff(replace(scn, clock_offset=scn.clock_offset + clock_step),
                      replace(scn, clock_offset=scn.clock_offset - clock_step), clock_step)

    gain_row = 4 + 2 * (1 + n_ris) * sat_index
    t[gain_row, 4] = 1.0
    t[gain_row + 1, 5] = 1.0
    for ell in range(n_ris):
        base = PARAMS_PER_LOS + PARAMS_PER_RIS * ell
        t[gain_row + 2 + 2 * ell, base + 3] = 1.0
        t[gain_row + 3 + 2 * ell, base + 4] = 1.0
    return t


def location_fim_and_peb(channel_fim_matrix: np.ndarray, jacobian: np.ndarray) -> FimBundle:
    """Transform to the location domain and extract the PEB."""
    j_gamma = np.asarray(channel_fim_matrix)
    t = np.asarray(jacobian)
    if t.shape[1] != j_gamma.shape[0]:
        raise DimensionMismatch(f"jacobian {t.shape} does not conform to FIM {j_gamma.shape}")
    j_eta = t @ j_gamma @ t.T
    j_eta = 0.5 * (j_eta + j_eta.T)
    peb = _peb_from_location_fim(j_eta)
    return FimBundle(channel_fim=j_gamma, jacobian=t, location_fim=j_eta, peb=peb)


def _peb_from_location_fim(j_eta: np.ndarray) -> float:
    # Jacobi equilibration before the condition test: location parameters mix
    # meters, seconds and ~1e-9 gains, so the raw condition number reflects
    # units, not identifiability.
    d = np.diag(j_eta).copy()
    if np.any(d <= 0.0):
        raise SingularFim("location FIM has a non-positive diagonal entry")
    s = 1.0 / np.sqrt(d)
    j_s = j_eta * np.outer(s, s)
    try:
        factor = cho_factor(j_s, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularFim("location FIM is not positive definite") from exc
    pocon, = get_lapack_funcs(("pocon",), (j_s,))
    rcond, info = pocon(factor[0], np.linalg.norm(j_s, 1), uplo="L")
    if info != 0 or not rcond > 1.0 / SINGULAR_COND_LIMIT:
        raise SingularFim(
            f"location FIM is numerically singular "
            f"(equilibrated reciprocal condition estimate {rcond:.3e})")
    rhs = np.zeros((j_eta.shape[0], 3))
    rhs[:3, :3] = np.diag(s[:3])
    block = s[:3, None] * cho_solve(factor, rhs)[:3, :3]
    return float(math.sqrt(np.trace(block)))


def assemble_multi(blocks) -> FimBundle:
    """Fuse per-satellite (channel FIM, jacobian) pairs into one bundle.

    Equivalent to the block-diagonal total-FIM formulation: the location FIM
    is the sum of the per-satellite transformed contributions.
    """
    blocks = list(blocks)
    if not blocks:
        raise LayoutMismatch("no satellite blocks to assemble")
    edim = blocks[0][1].shape[0]
    j_eta = np.zeros((edim, edim))
    for j_gamma, t in blocks:
        if t.shape[0] != edim:
            raise LayoutMismatch(
                f"jacobian rows {t.shape[0]} disagree with location dimension {edim}")
        if t.shape[1] != j_gamma.shape[0]:
            raise DimensionMismatch(f"jacobian {t.shape} does not conform to FIM {j_gamma.shape}")
        j_eta += t @ j_gamma @ t.T
    j_eta = 0.5 * (j_eta + j_eta.T)
    peb = _peb_from_location_fim(j_eta)
    return FimBundle(channel_fim=None, jacobian=None, location_fim=j_eta, peb=peb)


@dataclass(frozen=True, eq=False)
class SatelliteWorkspace:
    """Reusable per-satellite FIM factors plus its location Jacobian.

    ``rows`` lists the location-parameter indices this satellite touches
    (position, clock, and its own gain nuisances); ``jacobian_compact`` is
    the Jacobian restricted to those rows, used to keep the per-candidate
    cost of repeated PEB evaluations independent of the satellite count.
    """

    factors: FimFactors
    jacobian: np.ndarray
    rows: np.ndarray
    jacobian_compact: np.ndarray


def _workspace(factors: FimFactors, jacobian: np.ndarray) -> SatelliteWorkspace:
    rows = np.flatnonzero(np.any(jacobian != 0.0, axis=1))
    return SatelliteWorkspace(factors=factors, jacobian=jacobian, rows=rows,
                              jacobian_compact=jacobian[rows])


def scenario_workspaces(scn: Scenario, cfg: SignalConfig, gain_seed: int = 0):
    """Precompute one workspace per satellite for repeated PEB evaluation."""
    out = []
    for k in range(scn.n_satellites):
        params = scenario_to_path_params(scn, cfg, k, gain_seed)
        factors = FimFactors(params, cfg, scn.sat_shape, scn.ris_shape)
        out.append(_workspace(factors, location_jacobian(scn, cfg, k)))
    return out


def peb_from_workspaces(workspaces, profiles) -> FimBundle:
    """Scenario PEB for the given RIS profiles using cached workspaces."""
    workspaces = list(workspaces)
    edim = workspaces[0].jacobian.shape[0]
    j_eta = np.zeros((edim, edim))
    for ws in workspaces:
        tc = ws.jacobian_compact
        block = tc @ ws.factors.channel_fim(profiles) @ tc.T
        j_eta[np.ix_(ws.rows, ws.rows)] += block
    j_eta = 0.5 * (j_eta + j_eta.T)
    return FimBundle(channel_fim=None, jacobian=None, location_fim=j_eta,
                     peb=_peb_from_location_fim(j_eta))


def evaluate_scenario(scn: Scenario, cfg: SignalConfig, profiles,
                      gain_seed: int = 0) -> FimBundle:
    """End-to-end PEB evaluation: geometry -> FIM -> transformation -> bound."""
    return peb_from_workspaces(scenario_workspaces(scn, cfg, gain_seed), profiles)
