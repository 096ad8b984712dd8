"""Alternating optimization of the receive beamformer and the RIS configuration.

One outer iteration: (1) closed-form optimal combining vector for the
current RIS configuration (a generalized Rayleigh quotient maximizer,
computable as a regularized matched filter), (2) RIS update by bisection
over a family of feasibility SDPs followed by Gaussian randomization to
recover a unit-modulus configuration, keeping the new configuration only
if it strictly improves the SINR.  The SINR sequence is therefore
non-decreasing and the loop stops once the relative improvement falls
below a threshold (checked from the second iteration on) or an iteration
cap is hit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import ChannelSet
from .scenario import SystemParams
from .sdp import FeasibilityProblem, FeasibilityResult, solve_feasibility
from .signal_model import Beamformer, NoiseModel, RisConfig, sinr

BISECTION_ITERATION_CAP = 300
BISECTION_ABS_FLOOR = 1e-15  # treat the optimum as zero below this t


@dataclass(frozen=True)
class OptimizerConfig:
    epsilon: float = 1e-5           # relative SINR improvement threshold
    bisection_upper: float = 1e10   # initial upper bracket for the SINR bound t
    bisection_tol: float = 1e-5     # relative bracket width at termination
    n_randomizations: int = 5000    # candidates drawn per RIS step
    max_bcd_iterations: int = 50
    rng_seed: int = 0
    sdp_tolerance: float = 1e-7

    def __post_init__(self) -> None:
        if self.epsilon <= 0 or self.bisection_tol <= 0:
            raise ValueError("epsilon and bisection_tol must be > 0")
        if self.bisection_upper <= 0:
            raise ValueError("bisection_upper must be > 0")
        if self.n_randomizations < 1:
            raise ValueError("n_randomizations must be >= 1")
        if self.max_bcd_iterations < 1:
            raise ValueError("max_bcd_iterations must be >= 1")


@dataclass(frozen=True)
class RisStepResult:
    theta0: RisConfig
    t_star: float                  # certified upper bound on the SINR at this beamformer
    gamma: float                   # SINR achieved by the returned configuration
    bisection: tuple[tuple[float, bool], ...]  # (t, feasible) queries in order


@dataclass(frozen=True)
class BcdIteration:
    gamma: float
    theta0: RisConfig
    u: Beamformer
    t_star: float
    delta: float
    bisection: tuple[tuple[float, bool], ...]


@dataclass
class BcdTrace:
    iterations: list[BcdIteration] = field(default_factory=list)
    converged: bool = False

    @property
    def gammas(self) -> list[float]:
        return [it.gamma for it in self.iterations]


def optimal_beamformer(theta0: RisConfig, channels: ChannelSet,
                       noise: NoiseModel, params: SystemParams) -> Beamformer:
    """Closed-form SINR-optimal unit-norm combiner for a fixed RIS configuration.

    u* = A^-1 g0 / ||A^-1 g0||,  A = I + sum_{i>=1} (P_i / sigma^2) g_i g_i^H,
    g_i = H_i Theta0, sigma^2 the effective noise power at this Theta0.
    """
    sigma_sq = noise.effective_power(theta0.norm_sq)
    if sigma_sq <= 0:
        raise ValueError("effective noise power must be > 0")
    t0 = theta0.theta0
    g = [h @ t0 for h in channels.stacked]
    n_r = g[0].size
    a = np.eye(n_r, dtype=complex)
    for p_i, g_i in zip(params.tx_powers[1:], g[1:]):
        a += (p_i / sigma_sq) * np.outer(g_i, g_i.conj())
    if np.linalg.norm(g[0]) == 0.0:
        warnings.warn("zero channel toward the transmitter of interest; "
                      "returning the first standard basis vector", RuntimeWarning,
                      stacklevel=2)
        e1 = np.zeros(n_r, dtype=complex)
        e1[0] = 1.0
        return Beamformer(e1)
    x = np.linalg.solve(a, g[0])
    return Beamformer(x / np.linalg.norm(x))


def _psd_sqrt(psi: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(psi)
    return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


def _unit_modulus_candidates(factor: np.ndarray, count: int,
                             rng: np.random.Generator) -> np.ndarray:
    """(N+1, count) matrix of unit-modulus candidates with last row == 1."""
    n = factor.shape[0]
    g = (rng.standard_normal((n, count)) + 1j * rng.standard_normal((n, count))) / np.sqrt(2)
    v = factor @ g
    mags = np.abs(v)
    candidates = np.where(mags > 0, v / np.where(mags > 0, mags, 1.0), 1.0 + 0.0j)
    # rotate so the appended element is exactly 1
    candidates = candidates * np.conj(candidates[-1, :])[np.newaxis, :]
    candidates[-1, :] = 1.0
    return candidates


def gaussian_randomize(psi: np.ndarray, rng: np.random.Generator) -> RisConfig:
    """Draw one feasible configuration from the relaxed solution.

    v = Psi^(1/2) g with g standard complex normal; entries are projected
    to unit modulus (zeros map to 1) and the vector is rotated so the
    appended element equals 1 exactly.
    """
    candidate = _unit_modulus_candidates(_psd_sqrt(np.asarray(psi, dtype=complex)), 1, rng)
    return RisConfig(candidate[:, 0])


def optimize_ris(u: Beamformer, channels: ChannelSet, noise: NoiseModel,
                 params: SystemParams, config: OptimizerConfig,
                 rng: np.random.Generator) -> RisStepResult:
    """Best unit-modulus RIS configuration for a fixed combiner.

    Builds the rank-relaxed problem data (F_i = H_i^H u, L_i, M, alpha),
    bisects the SINR bound t over feasibility solves, then draws
    `n_randomizations` candidates from the certificate at the final
    feasible bound and returns the one with the highest SINR (each
    candidate evaluated with its own RIS-dependent noise term).  t_star
    is the certified infeasible end of the bracket, hence an upper bound
    on the SINR any configuration can reach at this combiner.
    """
    if noise.sigma_w_sq <= 0:
        raise ValueError("thermal noise power must be > 0 for the RIS step")
    uv = u.u
    f_vecs = [h.conj().T @ uv for h in channels.stacked]
    n = f_vecs[0].size
    sw = noise.sigma_w_sq
    zeta = noise.zeta
    powers = params.tx_powers

    l0 = (powers[0] / sw) * np.outer(f_vecs[0], f_vecs[0].conj())
    m = zeta * (noise.sigma_m2_sq / sw) * np.eye(n, dtype=complex)
    for p_i, f_i in zip(powers[1:], f_vecs[1:]):
        m = m + (p_i / sw) * np.outer(f_i, f_i.conj())
    alpha = 1.0 + zeta * noise.sigma_m1_sq / sw

    trace_l0 = float(np.real(np.trace(l0)))
    if trace_l0 <= 0.0:
        # no coupling to the transmitter of interest: every configuration scores 0
        theta0 = RisConfig.all_ones(n - 1)
        return RisStepResult(theta0, 0.0, sinr(u, theta0, channels, noise, params), ())

    hi = min(config.bisection_upper, n * trace_l0 / alpha * (1.0 + 1e-9))
    lo = 0.0
    queries: list[tuple[float, bool]] = []
    certificate: Optional[FeasibilityResult] = None
    warm: Optional[np.ndarray] = None

    for _ in range(BISECTION_ITERATION_CAP):
        mid = 0.5 * (lo + hi)
        if hi - lo <= config.bisection_tol * max(mid, BISECTION_ABS_FLOOR):
            break
        result = solve_feasibility(
            FeasibilityProblem(l0, m, alpha, mid),
            tolerance=config.sdp_tolerance,
            initial_lambda=warm,
        )
        warm = result.dual_lambda
        queries.append((mid, result.feasible))
        if result.feasible:
            lo = mid
            certificate = result
        else:
            hi = mid

    if certificate is None:
        # nothing above t = 0 was feasible: take the slack maximizer at t = 0
        certificate = solve_feasibility(
            FeasibilityProblem(l0, m, alpha, 0.0),
            tolerance=config.sdp_tolerance,
            refine_certificate=True,
        )

    factor = _psd_sqrt(certificate.psi)
    candidates = _unit_modulus_candidates(factor, config.n_randomizations, rng)

    # vectorized SINR over all candidates; unit-modulus vectors share |Theta0|^2 = N+1
    fh = np.array([f.conj() for f in f_vecs])
    received = fh @ candidates
    signal = powers[0] * np.abs(received[0]) ** 2
    interference = np.zeros(candidates.shape[1])
    for p_i, row in zip(powers[1:], received[1:]):
        interference += p_i * np.abs(row) ** 2
    noise_power = noise.effective_power(float(n))
    best = int(np.argmax(signal / (interference + noise_power)))

    theta0 = RisConfig(candidates[:, best])
    gamma = sinr(u, theta0, channels, noise, params)
    return RisStepResult(theta0, hi, gamma, tuple(queries))


def bcd_optimize(channels: ChannelSet, noise: NoiseModel, params: SystemParams,
                 config: OptimizerConfig, rng: np.random.Generator,
                 extra_initial_thetas: Sequence[RisConfig] = ()) -> tuple[RisConfig, Beamformer, BcdTrace]:
    """Alternate combiner and RIS updates until the SINR improvement stalls.

    Starts from the all-ones configuration; `extra_initial_thetas` are
    evaluated with their own optimal combiners and the best initial point
    wins, which guarantees the final SINR dominates any of them.
    """
    n = channels.n_ris_elements
    init_candidates = [RisConfig.all_ones(n), *extra_initial_thetas]
    best_init = None
    for cand in init_candidates:
        u_c = optimal_beamformer(cand, channels, noise, params)
        g_c = sinr(u_c, cand, channels, noise, params)
        if best_init is None or g_c > best_init[1]:
            best_init = (cand, g_c)
    theta_cur, _ = best_init

    trace = BcdTrace()
    gamma_cur = 0.0
    u_cur = None
    for iteration in range(1, config.max_bcd_iterations + 1):
        u_cur = optimal_beamformer(theta_cur, channels, noise, params)
        step = optimize_ris(u_cur, channels, noise, params, config, rng)
        gamma_keep = sinr(u_cur, theta_cur, channels, noise, params)
        if step.gamma > gamma_keep:
            theta_next, gamma_next = step.theta0, step.gamma
        else:
            theta_next, gamma_next = theta_cur, gamma_keep

        if gamma_cur > 0.0:
            delta = abs(gamma_next - gamma_cur) / gamma_cur
        else:
            delta = 0.0 if gamma_next == 0.0 else float("inf")
        trace.iterations.append(BcdIteration(
            gamma=gamma_next, theta0=theta_next, u=u_cur,
            t_star=step.t_star, delta=delta, bisection=step.bisection,
        ))
        theta_cur, gamma_cur = theta_next, gamma_next
        # always run at least two full iterations before testing convergence
        if iteration >= 2 and delta <= config.epsilon:
            trace.converged = True
            break

    return theta_cur, u_cur, trace
