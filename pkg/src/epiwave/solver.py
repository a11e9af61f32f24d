"""Damped nonlinear least squares (Levenberg-Marquardt).

Minimizes ``SSE(theta) = sum_i r_i(theta)^2`` by iterating

    (J^T J + lambda * diag(J^T J)) delta = -J^T r

with the damping factor ``lambda`` raised after rejected trial steps and
lowered after accepted ones. The diagonal (Marquardt) scaling keeps the
step sensible when parameter magnitudes differ by orders of magnitude, as
they do between wave amplitudes (~1e4) and log-widths (~0.3).

Positivity constraints are handled by exponential reparameterization
(:func:`to_model_params` and friends) so the solver itself stays
unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import ConfigurationError, SolverFailureError

# Damping escalation past this aborts the solve as effectively singular.
LAMBDA_MAX = 1e12
_LAMBDA_FLOOR = 1e-300


@dataclass(frozen=True)
class LeastSquaresProblem:
    """Residual function, optional analytic Jacobian, and problem sizes.

    ``residual(theta)`` returns the length-``n_residuals`` vector
    ``r_i = model(t_i) - y_i``; ``jacobian(theta)``, when given, returns the
    ``n_residuals x n_params`` matrix ``d r_i / d theta_j``. Without it the
    solver falls back to :func:`jacobian_fd`.
    """

    residual: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None
    n_params: int
    n_residuals: int

    def __post_init__(self):
        if self.n_params < 1 or self.n_residuals < self.n_params:
            raise ConfigurationError(
                f"need n_residuals >= n_params >= 1, got {self.n_residuals} and {self.n_params}"
            )


@dataclass(frozen=True)
class LmOptions:
    lambda0: float = 1e-3
    lambda_up: float = 10.0
    lambda_down: float = 10.0
    tol_rel_sse: float = 1e-10
    tol_grad: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        values = (self.lambda0, self.lambda_up, self.lambda_down,
                  self.tol_rel_sse, self.tol_grad, self.max_iter)
        if any(v <= 0 for v in values):
            raise ConfigurationError("all optimizer options must be positive")
        if self.lambda_up <= 1 or self.lambda_down <= 1:
            raise ConfigurationError("lambda_up and lambda_down must exceed 1")


class Convergence(Enum):
    SSE_TOL = "sse-tol"
    GRAD_TOL = "grad-tol"
    MAX_ITER = "max-iter"
    FAILED = "failed"  # only inside SolverFailureError reports, never returned


@dataclass(frozen=True, eq=False)
class FitReport:
    """Solve outcome: best parameters plus optimizer diagnostics.

    ``iterations`` counts accepted steps; ``sse_trace`` holds the SSE at the
    start plus after each accepted step, so it has ``iterations + 1`` entries
    and decreases strictly. ``n_rejections`` counts trial steps that raised
    the damping instead of moving.
    """

    theta: np.ndarray
    sse: float
    iterations: int
    converged: Convergence
    sse_trace: np.ndarray
    n_rejections: int = 0


def jacobian_fd(problem: LeastSquaresProblem, theta: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian; column ``j`` uses step ``h * max(1, |theta_j|)``."""
    if h <= 0:
        raise ConfigurationError("h must be > 0")
    theta = np.asarray(theta, dtype=float)
    J = np.empty((problem.n_residuals, theta.size))
    for j in range(theta.size):
        step = h * max(1.0, abs(theta[j]))
        hi, lo = theta.copy(), theta.copy()
        hi[j] += step
        lo[j] -= step
        r_hi, r_lo = problem.residual(hi), problem.residual(lo)
        if not (np.all(np.isfinite(r_hi)) and np.all(np.isfinite(r_lo))):
            raise SolverFailureError(f"non-finite residual while differencing column {j}")
        J[:, j] = (r_hi - r_lo) / (2.0 * step)
    return J


def to_model_params(theta_internal: np.ndarray, positive_mask: np.ndarray) -> np.ndarray:
    """Map unbounded internal parameters to model space: masked entries via exp."""
    theta = np.asarray(theta_internal, dtype=float).copy()
    mask = np.asarray(positive_mask, dtype=bool)
    with np.errstate(over="ignore"):  # inf is a legal "reject me" value
        theta[mask] = np.exp(theta[mask])
    return theta


def to_internal_params(theta_model: np.ndarray, positive_mask: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_model_params`; masked entries must be strictly positive."""
    theta = np.asarray(theta_model, dtype=float).copy()
    mask = np.asarray(positive_mask, dtype=bool)
    if np.any(theta[mask] <= 0):
        raise ConfigurationError("positive-constrained parameters must be > 0 to invert")
    theta[mask] = np.log(theta[mask])
    return theta


def chain_jacobian(jac_model: np.ndarray, theta_internal: np.ndarray, positive_mask: np.ndarray) -> np.ndarray:
    """Chain rule for the reparameterization: masked columns scale by exp(u) = model value."""
    scale = np.ones(np.asarray(theta_internal).size)
    mask = np.asarray(positive_mask, dtype=bool)
    scale[mask] = np.exp(np.asarray(theta_internal, dtype=float)[mask])
    return np.asarray(jac_model) * scale[np.newaxis, :]


def _solve_damped(JtJ: np.ndarray, diag: np.ndarray, g: np.ndarray, lam: float) -> np.ndarray | None:
    """Solve (JtJ + lam*diag) delta = -g by Cholesky; None if not SPD even with jitter."""
    A = JtJ + lam * diag
    n = A.shape[0]
    for attempt in range(2):
        try:
            L = np.linalg.cholesky(A)
        except np.linalg.LinAlgError:
            A = A + (1e-12 * np.trace(A) / n) * np.eye(n)
            continue
        y = np.linalg.solve(L, -g)
        return np.linalg.solve(L.T, y)
    return None


def levenberg_marquardt(
    problem: LeastSquaresProblem,
    theta0: np.ndarray,
    options: LmOptions | None = None,
) -> FitReport:
    """Run damped least squares from ``theta0``.

    A trial step is accepted only if it strictly decreases the SSE; rejected
    trials (including non-finite trial residuals) raise the damping and leave
    the parameters unchanged. Convergence is declared on the gradient
    infinity norm dropping below ``tol_grad``, or on the relative SSE
    improvement staying below ``tol_rel_sse`` for two consecutive accepted
    steps (a single stall can be a plateau, not an optimum).

    Raises
    ------
    SolverFailureError
        The damping escalated past ``LAMBDA_MAX``, or the Jacobian became
        non-finite. The exception's ``report`` carries the best-so-far state.
    """
    opts = options or LmOptions()
    theta = np.asarray(theta0, dtype=float).copy()
    if theta.shape != (problem.n_params,):
        raise ConfigurationError(f"theta0 must have shape ({problem.n_params},), got {theta.shape}")

    r = np.asarray(problem.residual(theta), dtype=float)
    if r.shape != (problem.n_residuals,):
        raise ConfigurationError(f"residual must have shape ({problem.n_residuals},), got {r.shape}")
    if not np.all(np.isfinite(r)):
        raise ConfigurationError("residual must be finite at theta0")

    jac = problem.jacobian or (lambda th: jacobian_fd(problem, th))
    sse = float(r @ r)
    trace = [sse]
    lam = opts.lambda0
    iterations = 0
    n_rejections = 0
    stalls = 0

    def make_report(conv: Convergence) -> FitReport:
        return FitReport(
            theta=theta.copy(), sse=sse, iterations=iterations, converged=conv,
            sse_trace=np.array(trace), n_rejections=n_rejections,
        )

    J = np.asarray(jac(theta), dtype=float)
    if not np.all(np.isfinite(J)):
        raise SolverFailureError("non-finite Jacobian at theta0", make_report(Convergence.FAILED))
    g = J.T @ r

    while iterations < opts.max_iter:
        if np.max(np.abs(g)) < opts.tol_grad:
            return make_report(Convergence.GRAD_TOL)

        JtJ = J.T @ J
        diag = np.diag(np.diag(JtJ))
        while True:
            delta = _solve_damped(JtJ, diag, g, lam)
            trial_sse = np.inf
            if delta is not None:
                trial = theta + delta
                r_trial = np.asarray(problem.residual(trial), dtype=float)
                if np.all(np.isfinite(r_trial)):
                    with np.errstate(over="ignore"):  # inf SSE is just a rejection
                        trial_sse = float(r_trial @ r_trial)
            if trial_sse < sse:
                break
            n_rejections += 1
            lam *= opts.lambda_up
            if lam > LAMBDA_MAX:
                if delta is None:
                    raise SolverFailureError(
                        f"normal equations still singular at damping {LAMBDA_MAX:g}",
                        make_report(Convergence.FAILED),
                    )
                # solvable but no descent direction left: the iterate is a
                # minimum to working precision
                return make_report(Convergence.SSE_TOL)

        improvement = (sse - trial_sse) / sse if sse > 0 else 0.0
        theta, r, sse = trial, r_trial, trial_sse
        iterations += 1
        trace.append(sse)
        lam = max(lam / opts.lambda_down, _LAMBDA_FLOOR)

        J = np.asarray(jac(theta), dtype=float)
        if not np.all(np.isfinite(J)):
            raise SolverFailureError("non-finite Jacobian mid-run", make_report(Convergence.FAILED))
        g = J.T @ r

        if improvement < opts.tol_rel_sse:
            stalls += 1
            if stalls >= 2:
                return make_report(Convergence.SSE_TOL)
        else:
            stalls = 0

    return make_report(Convergence.MAX_ITER)
