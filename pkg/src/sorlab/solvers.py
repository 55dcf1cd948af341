"""Relaxation sweeps and iteration drivers.

The sweep is implemented in projection (coordinate) form: for each index i
in the sweep order, the i-th coordinate is relaxed against the current
residual. For the natural order this is algebraically the classical
forward-substitution form of one SOR step; the matrix form exists only in
:func:`error_iteration_matrix` for analysis.

Error histories are measured against a caller-supplied planted solution in
the energy semi-norm of B, which is independent of which exact solution is
chosen (kernel components cancel).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .linalg import energy_seminorm_sq, has_unit_diagonal, permute_conjugate, strict_lower
from .orderings import OrderingStrategy, make_rng, sweep_order

KACZMARZ_ROW_NORM_TOL = 1e-10


@dataclass(frozen=True)
class SolverConfig:
    omega: float = 1.0
    max_sweeps: int = 100
    target_error_sq: float = 1e-24
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.omega < 2.0:
            raise ValueError("omega must lie strictly in (0, 2)")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.target_error_sq < 0:
            raise ValueError("target_error_sq must be >= 0")


@dataclass
class IterationHistory:
    """Per-sweep record of one solver run.

    ``errors_sq[k]`` is the squared energy semi-norm error after k sweeps
    (k = 0 is the start), ``residuals[k]`` the Euclidean residual norm.
    """

    errors_sq: np.ndarray
    residuals: np.ndarray
    final_iterate: np.ndarray
    orders: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def sweeps(self) -> int:
        return len(self.errors_sq) - 1


def _require_unit_diagonal(B):
    if not has_unit_diagonal(B):
        raise ValueError("matrix must have unit diagonal; call rescale_unit_diagonal first")


def _check_order(order, n):
    order = np.asarray(order, dtype=np.intp)
    if order.shape != (n,) or order.min(initial=0) < 0 or order.max(initial=0) >= n:
        raise ValueError("order must be a length-n sequence of indices in 0..n-1")
    return order


def sor_sweep(B, b, y, omega: float, order) -> np.ndarray:
    """One relaxation sweep of By = b over the given coordinate order.

    Sequentially, using latest values: y[i] += omega * (b[i] - <row_i(B), y>).
    Requires unit diagonal. Returns a new vector.
    """
    B = np.asarray(B)
    _require_unit_diagonal(B)
    n = B.shape[0]
    order = _check_order(order, n)
    b = np.asarray(b)
    y = np.array(y, dtype=np.result_type(B, b, y), copy=True)
    for i in order:
        y[i] += omega * (b[i] - B[i] @ y)
    return y


def kaczmarz_sweep(A, b, x, omega: float, order) -> np.ndarray:
    """One sweep of relaxed hyperplane projections for Ax = b.

    For each row index i in order: x += omega * (b[i] - <a_i, x>) * conj(a_i).
    Rows of A must have unit Euclidean norm.
    """
    A = np.asarray(A)
    norms = np.linalg.norm(A, axis=1)
    if np.max(np.abs(norms - 1.0)) > KACZMARZ_ROW_NORM_TOL:
        raise ValueError("rows of A must have unit norm")
    order = _check_order(order, A.shape[0])
    b = np.asarray(b)
    x = np.array(x, dtype=np.result_type(A, b, x), copy=True)
    for i in order:
        a = A[i]
        x += omega * (b[i] - a @ x) * a.conj()
    return x


def run_solver(B, b, y0, ybar, config: SolverConfig, strategy: OrderingStrategy,
               record_orders: bool = False) -> IterationHistory:
    """Iterate SOR sweeps on By = b, tracking the energy error to ybar.

    Stops after ``config.max_sweeps`` sweeps or once the squared energy
    error drops to ``config.target_error_sq``. Sweep orders come from the
    strategy, fed by a PCG64 stream seeded with ``config.seed``.
    """
    B = np.asarray(B)
    _require_unit_diagonal(B)
    n = B.shape[0]
    b = np.asarray(b)
    ybar = np.asarray(ybar)
    rng = make_rng(config.seed)
    omega = config.omega
    y = np.array(y0, dtype=np.result_type(B, b, y0, ybar), copy=True)
    if y.shape != (n,) or b.shape != (n,) or ybar.shape != (n,):
        raise ValueError("vector lengths must match the matrix size")

    errors = [energy_seminorm_sq(B, ybar - y)]
    residuals = [float(np.linalg.norm(b - B @ y))]
    orders: list[np.ndarray] | None = [] if record_orders else None
    for _ in range(config.max_sweeps):
        order = sweep_order(strategy, n, rng)
        for i in order:
            y[i] += omega * (b[i] - B[i] @ y)
        if record_orders:
            orders.append(order)
        errors.append(energy_seminorm_sq(B, ybar - y))
        residuals.append(float(np.linalg.norm(b - B @ y)))
        if errors[-1] <= config.target_error_sq:
            break
    return IterationHistory(np.array(errors), np.array(residuals), y, orders)


def run_kaczmarz(A, b, x0, xbar, config: SolverConfig, strategy: OrderingStrategy,
                 record_orders: bool = False) -> IterationHistory:
    """Iterate Kaczmarz sweeps on Ax = b, tracking ||xbar - x||^2.

    Mirrors :func:`run_solver`; with matched seeds and strategies the two
    histories coincide through x = A* y.
    """
    A = np.asarray(A)
    norms = np.linalg.norm(A, axis=1)
    if np.max(np.abs(norms - 1.0)) > KACZMARZ_ROW_NORM_TOL:
        raise ValueError("rows of A must have unit norm")
    nrows = A.shape[0]
    b = np.asarray(b)
    xbar = np.asarray(xbar)
    rng = make_rng(config.seed)
    omega = config.omega
    x = np.array(x0, dtype=np.result_type(A, b, x0, xbar), copy=True)

    errors = [float(np.linalg.norm(xbar - x) ** 2)]
    residuals = [float(np.linalg.norm(b - A @ x))]
    orders: list[np.ndarray] | None = [] if record_orders else None
    for _ in range(config.max_sweeps):
        order = sweep_order(strategy, nrows, rng)
        for i in order:
            a = A[i]
            x += omega * (b[i] - a @ x) * a.conj()
        if record_orders:
            orders.append(order)
        errors.append(float(np.linalg.norm(xbar - x) ** 2))
        residuals.append(float(np.linalg.norm(b - A @ x)))
        if errors[-1] <= config.target_error_sq:
            break
    return IterationHistory(np.array(errors), np.array(residuals), x, orders)


def error_iteration_matrix(B, omega: float, sigma) -> np.ndarray:
    """Error propagation matrix of one sweep in the order sigma.

    Returns Q = I - omega P* (I + omega L_s)^{-1} P B in the original
    indexing, where L_s is the strictly lower part of the reordered matrix
    and P the permutation matrix of sigma. One sweep with b = 0 multiplies
    the iterate by Q.
    """
    B = np.asarray(B)
    _require_unit_diagonal(B)
    if not 0.0 < omega < 2.0:
        raise ValueError("omega must lie strictly in (0, 2)")
    sigma = np.asarray(sigma, dtype=np.intp)
    n = B.shape[0]
    Bs = permute_conjugate(B, sigma)
    Ls = strict_lower(Bs)
    M = np.eye(n, dtype=Ls.dtype) + omega * Ls  # unit lower triangular
    X = solve_triangular(M, B[sigma, :], lower=True, unit_diagonal=True)
    inv = np.argsort(sigma)
    return np.eye(n, dtype=X.dtype) - omega * X[inv, :]


def empirical_rate(history, window: int = 10) -> float:
    """Geometric-mean per-sweep ratio of errors_sq over the last `window` sweeps.

    Accepts an IterationHistory or a bare error sequence. Returns 0.0 if the
    error reached exactly zero inside the window.
    """
    errs = np.asarray(getattr(history, "errors_sq", history), dtype=np.float64)
    if window < 1:
        raise ValueError("window must be >= 1")
    if len(errs) < window + 2:
        raise ValueError("history too short for the requested window")
    tail = errs[-(window + 1):]
    if np.any(tail <= 0):
        return 0.0
    return float((tail[-1] / tail[0]) ** (1.0 / window))
