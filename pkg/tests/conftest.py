import numpy as np
import pytest

from thzris import (
    AbsorptionModel,
    Geometry,
    SystemParams,
    build_channel_set,
    molecular_noise,
)

THERMAL = 10.0 ** ((-174.0 - 30.0) / 10.0)  # -174 dBm/Hz in W/Hz


def random_geometry(rng: np.random.Generator, n_tx: int,
                    n_rx: int, n_ris: int) -> Geometry:
    return Geometry(
        d=tuple(float(x) for x in rng.uniform(0.5, 8.0, n_tx)),
        d_gamma=tuple(float(x) for x in rng.uniform(0.5, 8.0, n_tx)),
        d_alpha=float(rng.uniform(0.5, 3.0)),
        theta_r=tuple(float(x) for x in rng.uniform(-1.2, 1.2, n_tx)),
        theta_s=tuple(float(x) for x in rng.uniform(-1.2, 1.2, n_tx)),
        theta_alpha=float(rng.uniform(-1.2, 1.2)),
        theta_beta=float(rng.uniform(-1.2, 1.2)),
        n_rx_antennas=n_rx,
        n_ris_elements=n_ris,
    )


def make_system(rng: np.random.Generator, n_tx: int, zeta: int,
                direct: bool = True) -> SystemParams:
    return SystemParams(
        carrier_frequency=220e9,
        bandwidth=10e9,
        tx_powers=tuple(float(p) for p in rng.uniform(0.5, 3.0, n_tx)),
        thermal_noise_density=THERMAL,
        zeta=zeta,
        direct_link_present=direct,
    )


def make_instance(seed: int, n_rx: int = 4, n_ris: int = 6, n_int: int = 2,
                  zeta: int = 1, direct: bool = True, k: float = 5e-3):
    """Random but reproducible (channels, noise, params, geometry, model)."""
    rng = np.random.default_rng(seed)
    geometry = random_geometry(rng, n_int + 1, n_rx, n_ris)
    params = make_system(rng, n_int + 1, zeta, direct)
    model = AbsorptionModel.constant(k)
    channels = build_channel_set(geometry, params, model, rng)
    noise = molecular_noise(geometry, params, model)
    return channels, noise, params, geometry, model


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
