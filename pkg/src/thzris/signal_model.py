"""SINR, throughput, and the RIS-dependent molecular re-radiation noise.

Under the additive-noise model (zeta = 1) the re-radiated power shows up
as extra receiver noise with variance

    sigma_m1^2 + sigma_m2^2 * Theta0^H Theta0,

summed over all transmitters i = 0..N_I: sigma_m1 collects the direct
paths, sigma_m2 the RIS-reflected paths, whose contribution scales with
the squared norm of the full configuration vector Theta0 = [Theta 1].
Under the scattering model (zeta = 0) both terms vanish from the noise
and the energy reappears as the channels' NLOS components instead.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .absorption import AbsorptionModel, transmittance
from .channel import ChannelSet, complex_normal, free_space_amplitude
from .scenario import Geometry, SystemParams


@dataclass(frozen=True)
class NoiseModel:
    sigma_w_sq: float   # thermal noise power, W
    sigma_m1_sq: float  # direct-path molecular term, W, summed over transmitters
    sigma_m2_sq: float  # reflected-path molecular term per unit Theta0^H Theta0, W
    zeta: int

    def __post_init__(self) -> None:
        if min(self.sigma_w_sq, self.sigma_m1_sq, self.sigma_m2_sq) < 0:
            raise ValueError("noise variances must be >= 0")

    def effective_power(self, theta0_norm_sq: float) -> float:
        """Total noise power seen at one antenna for a given |Theta0|^2."""
        return self.sigma_w_sq + self.zeta * (
            self.sigma_m1_sq + self.sigma_m2_sq * theta0_norm_sq
        )


@dataclass(frozen=True)
class RisConfig:
    """Reflection coefficients Theta0 = [Theta 1]: length N+1, |entry| <= 1, last == 1."""

    theta0: np.ndarray

    def __post_init__(self) -> None:
        vec = np.asarray(self.theta0, dtype=complex)
        if vec.ndim != 1 or vec.size < 1:
            raise ValueError("theta0 must be a 1-D vector of length >= 1")
        if np.any(np.abs(vec) > 1.0 + 1e-9):
            raise ValueError("RIS reflection magnitudes must be <= 1")
        if vec[-1] != 1.0 + 0.0j:
            raise ValueError("last element of theta0 must be exactly 1")
        object.__setattr__(self, "theta0", vec)

    @property
    def n_elements(self) -> int:
        return self.theta0.size - 1

    @property
    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.theta0, self.theta0)))

    @classmethod
    def all_ones(cls, n_elements: int) -> "RisConfig":
        return cls(np.ones(n_elements + 1, dtype=complex))

    @classmethod
    def random_phases(cls, n_elements: int, rng: np.random.Generator) -> "RisConfig":
        """Uniform i.i.d. phases, unit modulus, appended element fixed at 1."""
        phases = rng.uniform(0.0, 2.0 * np.pi, size=n_elements)
        return cls(np.concatenate([np.exp(1j * phases), [1.0 + 0.0j]]))


@dataclass(frozen=True)
class Beamformer:
    """Receive combining vector, unit norm."""

    u: np.ndarray

    def __post_init__(self) -> None:
        vec = np.asarray(self.u, dtype=complex)
        if vec.ndim != 1 or vec.size < 1:
            raise ValueError("u must be a 1-D vector of length >= 1")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"beamformer must be unit norm, got {norm}")
        object.__setattr__(self, "u", vec)


def molecular_noise(geometry: Geometry, params: SystemParams,
                    model: AbsorptionModel) -> NoiseModel:
    """Thermal plus closed-form molecular re-radiation variances for the scenario.

    sigma_m1^2 = sum_i (c / 4 pi f d_i)^2 P_i [1 - tau(f, d_i)]
    sigma_m2^2 = sum_i (c^2 / (16 pi^2 f^2 d_alpha d_gamma_i))^2
                 * P_i [1 - tau(f, d_alpha) tau(f, d_gamma_i)]
    """
    f = params.carrier_frequency
    tau_alpha = transmittance(model, f, geometry.d_alpha)
    pl_alpha = free_space_amplitude(f, geometry.d_alpha)

    m1 = 0.0
    m2 = 0.0
    for i, p_i in enumerate(params.tx_powers):
        tau_d = transmittance(model, f, geometry.d[i])
        tau_g = transmittance(model, f, geometry.d_gamma[i])
        m1 += free_space_amplitude(f, geometry.d[i]) ** 2 * p_i * (1.0 - tau_d)
        m2 += (pl_alpha * free_space_amplitude(f, geometry.d_gamma[i])) ** 2 \
            * p_i * (1.0 - tau_alpha * tau_g)

    return NoiseModel(
        sigma_w_sq=params.thermal_noise_density * params.bandwidth,
        sigma_m1_sq=m1,
        sigma_m2_sq=m2,
        zeta=params.zeta,
    )


def sinr(u: Beamformer, theta0: RisConfig, channels: ChannelSet,
         noise: NoiseModel, params: SystemParams) -> float:
    """Post-combining SINR for the transmitter of interest.

    gamma = P0 |u^H H0 Theta0|^2 /
            ( sum_{i>=1} P_i |u^H H_i Theta0|^2
              + u^H u * (sigma_w^2 + zeta (sigma_m1^2 + sigma_m2^2 |Theta0|^2)) )
    """
    uv = u.u
    t0 = theta0.theta0
    received = np.array([uv.conj() @ (h @ t0) for h in channels.stacked])
    powers = np.asarray(params.tx_powers)
    signal = powers[0] * np.abs(received[0]) ** 2
    interference = float(np.sum(powers[1:] * np.abs(received[1:]) ** 2))
    noise_power = float(np.real(np.vdot(uv, uv))) * noise.effective_power(theta0.norm_sq)
    denom = interference + noise_power
    if denom <= 0.0:
        if signal <= 0.0:
            warnings.warn("degenerate SINR input: zero signal, interference and noise",
                          RuntimeWarning, stacklevel=2)
            return 0.0
        return float("inf")
    return float(signal / denom)


def throughput(gamma: float, bandwidth: float) -> float:
    """Achievable rate B log2(1 + gamma) in bit/s."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    return bandwidth * np.log2(1.0 + gamma)


def simulate_appendix_chain(theta0: RisConfig, geometry: Geometry, params: SystemParams,
                            model: AbsorptionModel, n_samples: int,
                            rng: np.random.Generator) -> float:
    """Monte-Carlo estimate of the reflected-path molecular noise variance.

    Simulates, per sample and per RIS element, the two-hop noise chain

        n_total_m = (n_1m * theta_m * sqrt(tau_alpha) + n_2m) * pl_gamma * pl_alpha

    with n_1m ~ CN(0, P (1 - tau_gamma)) picked up on the Tx->RIS hop and
    n_2m ~ CN(0, |theta_m|^2 P (1 - tau_alpha)) on the RIS->Rx hop, summed
    over the N physical elements and all transmitters.  The empirical
    variance of the sum is an independent check of the sigma_m2 closed
    form (whose element sum is Theta^H Theta, the physical part of
    Theta0^H Theta0).
    """
    if n_samples < 10_000:
        raise ValueError("n_samples must be >= 10000 for a stable variance estimate")
    f = params.carrier_frequency
    tau_alpha = transmittance(model, f, geometry.d_alpha)
    pl_alpha = free_space_amplitude(f, geometry.d_alpha)
    elements = theta0.theta0[:-1]  # the appended unit entry is not a physical element
    n = elements.size

    total = np.zeros(n_samples, dtype=complex)
    for i, p_i in enumerate(params.tx_powers):
        tau_gamma = transmittance(model, f, geometry.d_gamma[i])
        pl_gamma = free_space_amplitude(f, geometry.d_gamma[i])
        n1 = complex_normal(rng, (n_samples, n)) * np.sqrt(p_i * (1.0 - tau_gamma))
        n2 = complex_normal(rng, (n_samples, n)) * (
            np.abs(elements) * np.sqrt(p_i * (1.0 - tau_alpha))
        )
        per_element = n1 * elements * np.sqrt(tau_alpha) + n2
        total += pl_alpha * pl_gamma * per_element.sum(axis=1)

    return float(np.mean(np.abs(total) ** 2))
