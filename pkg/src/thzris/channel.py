"""Channel synthesis: ULA steering vectors, Rician links, stacked matrices.

Every link follows the unified zeta-parameterized Rician form

    h = ( sqrt(tau) * F_los + sqrt((1 - zeta) * (1 - tau)) * h_nlos ) * c / (4 pi f d)

where tau is the transmittance of the link and h_nlos has i.i.d. unit
circularly-symmetric complex Gaussian entries.  The coefficients are the
algebraic simplifications of sqrt(K/(K+1)) and sqrt((1-zeta)/(K+1)) with
K = tau/(1-tau); they are used in this form so tau = 1 (K = inf) stays
finite.  zeta = 1 drops the scattered component entirely (re-radiation
becomes additive noise instead, handled in the signal model).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .absorption import AbsorptionModel, transmittance
from .scenario import Geometry, GeometryError, SystemParams

C_LIGHT = 299_792_458.0  # m/s

DEFAULT_SPACING_RATIO = 0.5  # element spacing over wavelength


def free_space_amplitude(f: float, d: float) -> float:
    """Amplitude pathloss c / (4 pi f d)."""
    if d <= 0:
        raise GeometryError(f"link distance must be > 0, got {d}")
    return C_LIGHT / (4.0 * np.pi * f * d)


def steering(n_elements: int, theta: float,
             spacing_ratio: float = DEFAULT_SPACING_RATIO) -> np.ndarray:
    """ULA array factor: entry m = exp(j 2 pi (d/lambda) m sin(theta)), m = 0..n-1."""
    if n_elements < 0:
        raise ValueError("n_elements must be >= 0")
    m = np.arange(n_elements)
    return np.exp(2j * np.pi * spacing_ratio * m * np.sin(theta))


def complex_normal(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """i.i.d. CN(0, 1): two real normals scaled by 1/sqrt(2) per entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def synthesize_link(los_matrix: np.ndarray, d: float, f: float, zeta: int,
                    model: AbsorptionModel, rng: np.random.Generator) -> np.ndarray:
    """Realize one Rician link from its LOS array response.

    `los_matrix` is the unit-modulus steering product for the link; the
    NLOS part is drawn from `rng` even when its coefficient is zero so
    that runs differing only in zeta consume identical stream state.
    """
    tau = transmittance(model, f, d)
    scale = free_space_amplitude(f, d)
    los = np.asarray(los_matrix, dtype=complex)
    nlos_coeff = np.sqrt((1.0 - zeta) * (1.0 - tau))
    h_nlos = complex_normal(rng, los.shape)
    return (np.sqrt(tau) * los + nlos_coeff * h_nlos) * scale


@dataclass(frozen=True)
class ChannelSet:
    """Realized channels for all transmitters plus the stacked forms.

    h_rt[i]: (N_R,) direct Tx_i -> Rx channel (zero when the direct link is absent)
    h_st[i]: (N,)   Tx_i -> RIS channel
    h_sr:    (N_R, N) RIS -> Rx channel
    stacked[i]: (N_R, N+1) concatenation [h_sr * Diag(h_st_i) | h_rt_i]
    """

    h_rt: tuple[np.ndarray, ...]
    h_st: tuple[np.ndarray, ...]
    h_sr: np.ndarray
    stacked: tuple[np.ndarray, ...]

    @property
    def n_transmitters(self) -> int:
        return len(self.stacked)

    @property
    def n_rx_antennas(self) -> int:
        return self.h_sr.shape[0]

    @property
    def n_ris_elements(self) -> int:
        return self.h_sr.shape[1]

    def save_npz(self, path: str) -> None:
        """Debug dump of every realized matrix."""
        payload = {"h_sr": self.h_sr}
        for i in range(self.n_transmitters):
            payload[f"h_rt_{i}"] = self.h_rt[i]
            payload[f"h_st_{i}"] = self.h_st[i]
            payload[f"stacked_{i}"] = self.stacked[i]
        np.savez(path, **payload)


def stack_channels(h_sr: np.ndarray, h_st_i: np.ndarray, h_rt_i: np.ndarray) -> np.ndarray:
    """[h_sr Diag(h_st_i) | h_rt_i]: maps [Theta 1] to cascade + direct signal."""
    cascade = h_sr * h_st_i[np.newaxis, :]
    return np.concatenate([cascade, h_rt_i[:, np.newaxis]], axis=1)


def build_channel_set(geometry: Geometry, params: SystemParams, model: AbsorptionModel,
                      rng: np.random.Generator,
                      spacing_ratio: float = DEFAULT_SPACING_RATIO) -> ChannelSet:
    """Realize all links of the scenario and assemble the stacked matrices."""
    if geometry.n_transmitters != len(params.tx_powers):
        raise ValueError("geometry and tx_powers disagree on the number of transmitters")
    f = params.carrier_frequency
    zeta = params.zeta
    n_r = geometry.n_rx_antennas
    n = geometry.n_ris_elements

    # RIS -> Rx: rank-one LOS outer product a_NR^H(theta_alpha) a_N(theta_beta)
    a_rx_alpha = np.conj(steering(n_r, geometry.theta_alpha, spacing_ratio))
    a_ris_beta = steering(n, geometry.theta_beta, spacing_ratio)
    h_sr = synthesize_link(np.outer(a_rx_alpha, a_ris_beta), geometry.d_alpha,
                           f, zeta, model, rng)

    h_rt, h_st, stacked = [], [], []
    for i in range(geometry.n_transmitters):
        los_rt = np.conj(steering(n_r, geometry.theta_r[i], spacing_ratio))
        h_rt_i = synthesize_link(los_rt, geometry.d[i], f, zeta, model, rng)
        if not params.direct_link_present:
            h_rt_i = np.zeros_like(h_rt_i)
        los_st = np.conj(steering(n, geometry.theta_s[i], spacing_ratio))
        h_st_i = synthesize_link(los_st, geometry.d_gamma[i], f, zeta, model, rng)
        h_rt.append(h_rt_i)
        h_st.append(h_st_i)
        stacked.append(stack_channels(h_sr, h_st_i, h_rt_i))

    return ChannelSet(h_rt=tuple(h_rt), h_st=tuple(h_st), h_sr=h_sr, stacked=tuple(stacked))
