"""Shared builders for small, fast test worlds."""

import numpy as np
import pytest

from risloc.channel import SignalConfig, random_precoders
from risloc.config import ExperimentConfig, build_scenario


def make_signal(m=4, n=8, n_tx=4, seed=0, *, carrier_hz=12.7e9,
                subcarrier_spacing_hz=240e6 / 3300, period_s=10e-3,
                power_w=1.0, noise_var_w=1e-12, pilots=None) -> SignalConfig:
    """Signal parameters with a small pilot grid for oracle-sized tests."""
    return SignalConfig(
        m_transmissions=m,
        n_subcarriers=n,
        carrier_hz=carrier_hz,
        subcarrier_spacing_hz=subcarrier_spacing_hz,
        period_s=period_s,
        power_w=power_w,
        noise_var_w=noise_var_w,
        precoders=random_precoders(m, n_tx, seed),
        pilots=pilots,
    )


def make_world(n_ris=1, ris_shape=(3, 3), n_satellites=1, bs_mode=False):
    """Default geometric world with overridable RIS/satellite counts."""
    cfg = ExperimentConfig()
    scenario = cfg.scenario.__class__(
        n_ris=n_ris, ris_shape=ris_shape, n_satellites=n_satellites,
        bs_mode=bs_mode)
    return build_scenario(cfg.__class__(scenario=scenario))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
