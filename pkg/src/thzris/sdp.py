"""Feasibility SDP: PSD matrix with unit-bounded diagonal and one trace inequality.

    find    Psi  (Hermitian, n x n)
    s.t.    Psi >= 0,  diag(Psi) <= 1,
            Tr(Psi L0) >= t Tr(Psi M) + t alpha

Decided by maximizing the slack Tr(Psi C), C = L0 - t M, over the
box-capped PSD cone and comparing the optimum with t*alpha.  The
maximization is a logarithmic-barrier interior-point method: Newton steps
with backtracking line search on the diagonal multipliers lambda of

    min  sum(lambda)   s.t.   S = Diag(lambda) - C >= 0,  lambda >= 0,

which is the dual of the slack maximization.  The central path carries
the primal matrix Psi = mu * S^{-1}, so every iterate yields certified
two-sided bounds on the optimal slack: sum(lambda) from above (any dual
feasible point) and Tr(Psi C) from below (Psi is primal feasible after a
diagonal cap).  Verdicts are issued only from these certified bounds.

Inputs are pre-scaled by 1/max(||L0||_F, ||M||_F) (alpha scaled along),
which leaves the verdict unchanged and keeps the barrier well conditioned
across the ~20 orders of magnitude that THz noise ratios span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np

HERMITIAN_TOL = 1e-10
DEFAULT_TOLERANCE = 1e-7
BARRIER_REDUCTION = 10.0
MAX_OUTER_ITERATIONS = 50
MAX_NEWTON_PER_STAGE = 60


class SolverError(RuntimeError):
    """Interior-point iteration cap hit before the bounds closed."""

    def __init__(self, message: str, best: Optional["FeasibilityResult"] = None):
        super().__init__(message)
        self.best = best


def _check_hermitian(mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    scale = max(1.0, float(np.linalg.norm(mat)))
    if np.linalg.norm(mat - mat.conj().T) > HERMITIAN_TOL * scale:
        raise ValueError(f"{name} is not Hermitian within {HERMITIAN_TOL:g} (relative)")
    return 0.5 * (mat + mat.conj().T)


@dataclass(frozen=True)
class FeasibilityProblem:
    l0: np.ndarray      # Hermitian PSD, (N+1) x (N+1)
    m: np.ndarray       # Hermitian PSD, same shape
    alpha: float        # > 0
    t: float            # >= 0

    def __post_init__(self) -> None:
        l0 = _check_hermitian(self.l0, "L0")
        m = _check_hermitian(self.m, "M")
        if l0.shape != m.shape:
            raise ValueError("L0 and M must have identical shapes")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.t < 0:
            raise ValueError("t must be >= 0")
        object.__setattr__(self, "l0", l0)
        object.__setattr__(self, "m", m)

    @property
    def dimension(self) -> int:
        return self.l0.shape[0]


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    psi: Optional[np.ndarray]        # certificate when feasible
    slack_lb: float                  # certified lower bound on max slack (original units)
    slack_ub: float                  # certified upper bound (original units)
    threshold: float                 # t * alpha (original units)
    tolerance: float                 # slack tolerance used for the verdict (original units)
    residuals: dict = field(default_factory=dict)
    stages: int = 0
    newton_iterations: int = 0
    dual_lambda: Optional[np.ndarray] = None  # final dual iterate (scaled units), for warm starts

    @property
    def status(self) -> str:
        return "Feasible" if self.feasible else "Infeasible"


def _certificate_residuals(psi: np.ndarray, problem: FeasibilityProblem) -> dict:
    """Constraint-violation magnitudes of a certificate, in original units."""
    eigs = np.linalg.eigvalsh(psi)
    trace_lhs = float(np.real(np.vdot(problem.l0, psi)))
    trace_rhs = problem.t * float(np.real(np.vdot(problem.m, psi))) + problem.t * problem.alpha
    return {
        "min_eigenvalue": float(eigs[0]),
        "psi_norm": float(np.linalg.norm(psi)),
        "max_diag_excess": float(max(0.0, np.max(np.real(np.diag(psi))) - 1.0)),
        "trace_residual": trace_lhs - trace_rhs,
    }


def solve_feasibility(problem: FeasibilityProblem,
                      tolerance: float = DEFAULT_TOLERANCE,
                      refine_certificate: bool = False,
                      initial_lambda: Optional[np.ndarray] = None,
                      trace: Optional[IO[str]] = None) -> FeasibilityResult:
    """Decide the feasibility problem and return a certificate when feasible.

    `refine_certificate` forces the slack maximization to run until the
    certified bounds close even after the verdict is already decidable,
    producing a near-optimal Psi (wanted when the certificate seeds the
    randomization rather than just answering the bisection query).
    `initial_lambda` warm-starts the dual iterate; it is used only if it
    is strictly feasible for the current data.
    """
    n = problem.dimension
    scale = max(float(np.linalg.norm(problem.l0)), float(np.linalg.norm(problem.m)))
    if scale <= 0.0:
        # L0 = M = 0: max slack is exactly 0
        thr0 = problem.t * problem.alpha
        tol0 = tolerance * max(1.0, abs(thr0))
        feasible = 0.0 >= thr0 - tol0
        psi = np.zeros((n, n), dtype=complex) if feasible else None
        res = _certificate_residuals(psi, problem) if feasible else {}
        return FeasibilityResult(feasible, psi, 0.0, 0.0, thr0, tol0, res)

    c = (problem.l0 - problem.t * problem.m) / scale
    c = 0.5 * (c + c.conj().T)
    thr = problem.t * problem.alpha / scale
    # verdict tolerance on the slack, scaled units
    eps = tolerance * max(1.0, abs(thr), float(n))

    lam = None
    if initial_lambda is not None:
        cand = np.asarray(initial_lambda, dtype=float)
        if cand.shape == (n,) and np.all(cand > 0):
            try:
                np.linalg.cholesky(np.diag(cand) - c)
                lam = cand.copy()
            except np.linalg.LinAlgError:
                lam = None
    if lam is None:
        eig_max_c = float(np.linalg.eigvalsh(c)[-1])
        lam = np.full(n, max(1.0, 1.05 * eig_max_c + 0.1))

    mu = max(1.0, float(np.sum(lam)) / (2.0 * n))
    # the certified gap at a centered point is ~2*mu*n; leave centering margin
    mu_min = eps / (10.0 * n)

    best_lb = 0.0                      # Psi = 0 is always primal feasible
    best_psi = np.zeros((n, n), dtype=complex)
    best_ub = np.inf
    feasible_verdict: Optional[bool] = None
    stages = 0
    newton_total = 0

    def log(line: str) -> None:
        if trace is not None:
            trace.write(line + "\n")

    bounds_closed = False
    reduction = BARRIER_REDUCTION
    for stage in range(MAX_OUTER_ITERATIONS):
        stages = stage + 1
        centered = False
        for _ in range(MAX_NEWTON_PER_STAGE):
            s_mat = np.diag(lam) - c
            chol_s = np.linalg.cholesky(s_mat)
            s_inv = np.linalg.inv(s_mat)
            if mu < 1e-4:
                # one Newton-Schulz refinement: S is ~1/mu conditioned near the
                # end and the certificate needs the inverse to near-machine
                # relative accuracy
                s_inv = s_inv @ (2.0 * np.eye(n) - s_mat @ s_inv)
            s_inv = 0.5 * (s_inv + s_inv.conj().T)
            diag_sinv = np.real(np.diag(s_inv))

            # certified bounds from the current iterate
            best_ub = min(best_ub, float(np.sum(lam)))
            psi = mu * s_inv
            cap = max(1.0, float(np.max(np.real(np.diag(psi)))))
            lb = float(np.real(np.vdot(c, psi))) / cap
            if lb > best_lb:
                best_lb = lb
                best_psi = psi / cap

            if best_ub < thr - eps:
                feasible_verdict = False
            elif best_lb >= thr - eps and not refine_certificate:
                feasible_verdict = True
            bounds_closed = best_ub - best_lb <= eps
            if feasible_verdict is not None or bounds_closed:
                break

            grad = 1.0 - mu * diag_sinv - mu / lam
            hess = mu * np.abs(s_inv) ** 2 + np.diag(mu / lam**2)
            # Jacobi scaling: raw entries span ~(lam_max/lam_min)^2 and break
            # the solve long before the scaled system does
            scale_h = np.sqrt(np.diag(hess).real)
            hess_scaled = hess / np.outer(scale_h, scale_h)
            step_dir = np.linalg.solve(hess_scaled, -grad / scale_h) / scale_h
            decrement_sq = float(-grad @ step_dir)
            newton_total += 1
            # phi = mu * (barrier-normalized objective), so the dimensionless
            # Newton decrement^2 is (grad^T H^-1 grad) / mu.  At the final mu
            # the certificate is limited by the centering residual, so there
            # the loop runs until the certified-bound checks fire instead.
            centered = decrement_sq <= 0.01 * mu
            if centered and mu > mu_min:
                break

            # longest step keeping lambda > 0, then backtrack into S > 0 + descent
            negative = step_dir < 0
            step = 1.0
            if np.any(negative):
                step = min(1.0, 0.99 * float(np.min(-lam[negative] / step_dir[negative])))
            logdet = 2.0 * float(np.sum(np.log(np.real(np.diag(chol_s)))))
            phi = float(np.sum(lam)) - mu * (logdet + float(np.sum(np.log(lam))))
            while step > 1e-14:
                lam_new = lam + step * step_dir
                try:
                    chol_new = np.linalg.cholesky(np.diag(lam_new) - c)
                except np.linalg.LinAlgError:
                    step *= 0.5
                    continue
                logdet_new = 2.0 * float(np.sum(np.log(np.real(np.diag(chol_new)))))
                phi_new = float(np.sum(lam_new)) - mu * (
                    logdet_new + float(np.sum(np.log(lam_new)))
                )
                if phi_new <= phi - 0.01 * step * decrement_sq:
                    lam = lam_new
                    break
                step *= 0.5
            else:
                break  # line search stalled at this mu

        log(f"stage {stages}: mu={mu:.3e} lb={best_lb:.6e} ub={best_ub:.6e} "
            f"thr={thr:.6e} centered={centered} reduction={reduction:.2f}")
        if feasible_verdict is not None or bounds_closed:
            break
        if centered:
            if mu <= mu_min:
                break  # fully centered at the floor; the post-check decides
            mu = max(mu / reduction, mu_min)
            reduction = min(reduction * 1.6, BARRIER_REDUCTION)
        else:
            # the mu step overshot the damped-Newton range of this instance:
            # back the target off and take smaller reductions from here on
            mu = min(mu * np.sqrt(reduction), 1.0)
            reduction = max(np.sqrt(reduction), 1.5)

    if feasible_verdict is None:
        if bounds_closed or best_lb >= thr - eps:
            feasible_verdict = best_lb >= thr - eps
        else:
            raise SolverError(
                f"bound gap {best_ub - best_lb:.3e} > {eps:.3e} after "
                f"{stages} barrier stages",
                best=FeasibilityResult(False, None, best_lb * scale, best_ub * scale,
                                       thr * scale, eps * scale, {}, stages, newton_total),
            )

    psi_out = best_psi if feasible_verdict else None
    residuals = _certificate_residuals(psi_out, problem) if psi_out is not None else {}
    return FeasibilityResult(
        feasible=bool(feasible_verdict),
        psi=psi_out,
        slack_lb=best_lb * scale,
        slack_ub=best_ub * scale,
        threshold=thr * scale,
        tolerance=eps * scale,
        residuals=residuals,
        stages=stages,
        newton_iterations=newton_total,
        dual_lambda=lam,
    )
