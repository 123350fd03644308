"""Signal configuration, channel gains, and the noiseless received signal.

The downlink mean signal for transmission m (1-based) on subcarrier n is

    mu_m[n] = sqrt(P) * [ a_su * e^{j2pi(m T nu_su - n df tau_su)} a^T(theta_su)
              + sum_l a_sru,l * e^{j2pi(m T nu_sr,l - n df tau_sru,l)}
                      (b_l^T w_l) a^T(theta_sr,l) ] f_m s_m[n].

Gain magnitudes follow a free-space law per hop with a seeded uniform phase;
the gain phase is a nuisance parameter, so bounds depend on |gain| only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .arrays import upa_coordinates, ris_cascade_vector, array_response
from .errors import IndexOutOfRange, ZeroDistance
from .geometry import SPEED_OF_LIGHT, AnglePair, Scenario, direction_angles, doppler_shift, path_delay


@dataclass(frozen=True, eq=False)
class SignalConfig:
    """OFDM pilot-signal parameters and precoders.

    ``pilots`` may be None, meaning all-ones pilots; otherwise an N x M
    unit-modulus matrix.  ``precoders`` is N_s x M with |entry|^2 = 1/N_s.
    """

    m_transmissions: int
    n_subcarriers: int
    carrier_hz: float
    subcarrier_spacing_hz: float
    period_s: float
    power_w: float
    noise_var_w: float
    precoders: np.ndarray
    pilots: np.ndarray | None = None

    def __post_init__(self):
        if self.m_transmissions < 1 or self.n_subcarriers < 1:
            raise ValueError("M and N must be >= 1")
        for name in ("carrier_hz", "subcarrier_spacing_hz", "period_s", "power_w", "noise_var_w"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        f = np.asarray(self.precoders, dtype=complex)
        n_s = f.shape[0]
        if f.shape != (n_s, self.m_transmissions):
            raise ValueError(f"precoders must be N_s x M, got {f.shape}")
        if not np.allclose(np.abs(f) ** 2, 1.0 / n_s, atol=1e-12):
            raise ValueError("precoder entries must satisfy |f|^2 = 1/N_s")
        object.__setattr__(self, "precoders", f)
        if self.pilots is not None:
            s = np.asarray(self.pilots, dtype=complex)
            if s.shape != (self.n_subcarriers, self.m_transmissions):
                raise ValueError(f"pilots must be N x M, got {s.shape}")
            if not np.allclose(np.abs(s), 1.0, atol=1e-12):
                raise ValueError("pilot entries must be unit modulus")
            object.__setattr__(self, "pilots", s)

    @property
    def n_tx_elements(self) -> int:
        return self.precoders.shape[0]

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def pilot(self, m: int, n: int) -> complex:
        """Pilot symbol s_m[n], 1-based indices."""
        if self.pilots is None:
            return 1.0 + 0.0j
        return complex(self.pilots[n - 1, m - 1])


@dataclass(frozen=True, eq=False)
class RisPath:
    """Cascaded satellite-RIS-UE block of the channel parameter vector."""

    delay: float                # tau_sru, includes the clock offset
    aod_ris: AnglePair          # phi_ru (unknown)
    gain: complex               # alpha_sru
    aod_sat: AnglePair          # theta_sr (known)
    aoa_ris: AnglePair          # phi_sr (known)
    doppler: float              # nu_sr (known)


@dataclass(frozen=True, eq=False)
class PathParams:
    """Channel-domain parameters for one satellite: LoS block + RIS blocks."""

    delay: float                # tau_su, includes the clock offset
    aod_sat: AnglePair          # theta_su
    doppler: float              # nu_su
    gain: complex               # alpha_su
    ris: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ris", tuple(self.ris))
        if self.delay <= 0 or any(rp.delay <= 0 for rp in self.ris):
            raise ValueError("path delays must be positive")

    @property
    def n_ris(self) -> int:
        return len(self.ris)


def fspl_gain(distance: float, wavelength: float, phase: float = 0.0) -> complex:
    """Free-space amplitude gain (lambda / 4 pi d) * exp(j phase)."""
    if distance <= 0:
        raise ZeroDistance("free-space gain needs a positive distance")
    return wavelength / (4.0 * math.pi * distance) * complex(math.cos(phase), math.sin(phase))


def random_precoders(m_transmissions: int, n_elements: int, seed: int) -> np.ndarray:
    """Constant-modulus random analog precoders, one column per transmission."""
    if m_transmissions < 1 or n_elements < 1:
        raise ValueError("precoder dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(n_elements, m_transmissions))
    return np.exp(1j * phases) / math.sqrt(n_elements)


def random_pilots(n_subcarriers: int, m_transmissions: int, seed: int) -> np.ndarray:
    """Unit-modulus random pilots; used to exercise pilot-phase invariance."""
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(n_subcarriers, m_transmissions))
    return np.exp(1j * phases)


def scenario_to_path_params(scn: Scenario, cfg: SignalConfig, sat_index: int,
                            gain_seed: int = 0) -> PathParams:
    """Map geometry to the channel parameters of one satellite.

    Gain phases are drawn independently per path from a generator keyed by
    (gain_seed, sat_index) so that sweeps remain deterministic.
    """
    if not 0 <= sat_index < scn.n_satellites:
        raise IndexOutOfRange(f"satellite index {sat_index} out of range")
    sat = scn.satellites[sat_index]
    lam = cfg.wavelength
    rng = np.random.default_rng([abs(int(gain_seed)), sat_index, 0x5eed])

    d_su = float(np.linalg.norm(sat.pose.position - scn.ue_position))
    tau_su = path_delay(sat.pose.position, scn.ue_position, scn.clock_offset)
    theta_su = direction_angles(sat.pose, scn.ue_position)
    nu_su = doppler_shift(sat.velocity, sat.pose.position, scn.ue_position, lam)
    alpha_su = fspl_gain(d_su, lam, rng.uniform(0.0, 2.0 * math.pi))

    ris_paths = []
    for ris in scn.rises:
        d_sr = float(np.linalg.norm(sat.pose.position - ris.position))
        d_ru = float(np.linalg.norm(ris.position - scn.ue_position))
        tau_sru = path_delay(sat.pose.position, ris.position) + path_delay(
            ris.position, scn.ue_position, scn.clock_offset)
        phi_ru = direction_angles(ris, scn.ue_position)
        theta_sr = direction_angles(sat.pose, ris.position)
        phi_sr = direction_angles(ris, sat.pose.position)
        nu_sr = doppler_shift(sat.velocity, sat.pose.position, ris.position, lam)
        alpha_sru = fspl_gain(d_sr, lam, rng.uniform(0.0, 2.0 * math.pi)) * fspl_gain(
            d_ru, lam, rng.uniform(0.0, 2.0 * math.pi))
        ris_paths.append(RisPath(delay=tau_sru, aod_ris=phi_ru, gain=alpha_sru,
                                 aod_sat=theta_sr, aoa_ris=phi_sr, doppler=nu_sr))
    return PathParams(delay=tau_su, aod_sat=theta_su, doppler=nu_su,
                      gain=alpha_su, ris=tuple(ris_paths))


def noiseless_signal(params: PathParams, profiles, cfg: SignalConfig,
                     m: int, n: int, sat_shape=(2, 2), ris_shape=(10, 10)) -> complex:
    """Mean received sample mu_m[n] for one satellite (1-based m, n).

    ``profiles`` is a sequence of complex reflection vectors, one per RIS
    block in ``params``.
    """
    if not (1 <= m <= cfg.m_transmissions) or not (1 <= n <= cfg.n_subcarriers):
        raise IndexOutOfRange(f"(m, n) = ({m}, {n}) outside the pilot grid")
    lam = cfg.wavelength
    sat_geom = upa_coordinates(sat_shape[0], sat_shape[1], lam)
    ris_geom = upa_coordinates(ris_shape[0], ris_shape[1], lam)
    f_m = cfg.precoders[:, m - 1]
    s_mn = cfg.pilot(m, n)
    df = cfg.subcarrier_spacing_hz
    t = cfg.period_s

    phase_los = 2.0 * math.pi * (m * t * params.doppler - n * df * params.delay)
    beam_los = array_response(sat_geom, params.aod_sat, cfg.carrier_hz) @ f_m
    total = params.gain * np.exp(1j * phase_los) * beam_los
    for rp, omega in zip(params.ris, profiles):
        b, _, _ = ris_cascade_vector(ris_geom, rp.aod_ris, rp.aoa_ris, cfg.carrier_hz)
        phase = 2.0 * math.pi * (m * t * rp.doppler - n * df * rp.delay)
        beam = array_response(sat_geom, rp.aod_sat, cfg.carrier_hz) @ f_m
        total += rp.gain * np.exp(1j * phase) * (b @ np.asarray(omega)) * beam
    return complex(math.sqrt(cfg.power_w) * total * s_mn)
