"""LASSO solver, regularization paths and optimality certificates.

The objective is (1/n)||E - Phi U||^2 + 2 r ||U||_1 throughout, including
the KKT scaling: a minimizer satisfies (1/n) Phi_i^T (E - Phi U) = r sign(U_i)
on its support and |(1/n) Phi_i^T (E - Phi U)| <= r elsewhere.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from ..models.design import DesignMatrix
from ..models.lasso import KKTReport, LassoProblem, LassoSolution
from ..utils.exceptions import PreconditionError
from ..utils.logger import get_logger


logger = get_logger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100_000
DEFAULT_GRID_POINTS = 60
DEFAULT_GRID_RATIO = 1e-3
KKT_FACTOR = 10.0


def soft_threshold(x, r: float):
    """sign(x) max(|x| - r, 0)."""
    return np.sign(x) * np.maximum(np.abs(x) - r, 0.0)


def correlations(E: np.ndarray, phi: np.ndarray, s_hat: np.ndarray) -> np.ndarray:
    """(1/n) Phi^T (E - Phi s_hat)."""
    return phi.T @ (E - phi @ s_hat) / phi.shape[0]


def r_max(E: np.ndarray, phi: DesignMatrix) -> float:
    """Smallest r for which U = 0 solves the program: ||(1/n) Phi^T E||_inf."""
    E = np.asarray(E, dtype=float)
    return float(np.max(np.abs(phi.as_float().T @ E)) / phi.n)


def default_grid(top: float, points: int = DEFAULT_GRID_POINTS,
                 ratio: float = DEFAULT_GRID_RATIO) -> np.ndarray:
    """``points`` log-spaced values from ``top`` down to ``top * ratio``."""
    if not top > 0:
        raise PreconditionError(f"grid needs a positive upper end, got {top}", module="lasso")
    if points < 1 or not 0.0 < ratio < 1.0:
        raise PreconditionError("grid needs points >= 1 and 0 < ratio < 1", module="lasso")
    if points == 1:
        return np.array([float(top)])
    return np.geomspace(top, top * ratio, points)


def objective(E: np.ndarray, phi: np.ndarray, s_hat: np.ndarray, r: float) -> float:
    residual = E - phi @ s_hat
    return float(residual @ residual / phi.shape[0] + 2.0 * r * np.abs(s_hat).sum())


def _kkt_residual(grad: np.ndarray, s_hat: np.ndarray, r: float) -> float:
    on = s_hat != 0
    violation = np.maximum(np.abs(grad) - r, 0.0)
    violation[on] = np.abs(grad[on] - r * np.sign(s_hat[on]))
    return float(violation.max()) if violation.size else 0.0


def kkt_check(problem: LassoProblem, s_hat: np.ndarray, tol: float = DEFAULT_TOL) -> KKTReport:
    """Dantzig constraint and support stationarity of ``s_hat`` for ``problem``."""
    s_hat = np.asarray(s_hat, dtype=float)
    grad = correlations(problem.E, problem.phi.as_float(), s_hat)
    r = problem.r

    dantzig_violation = float(np.max(np.abs(grad)) - r) if grad.size else -r
    on = s_hat != 0
    if np.any(on):
        stationarity = float(np.max(np.abs(grad[on] - r * np.sign(s_hat[on]))))
    else:
        stationarity = 0.0

    return KKTReport(
        dantzig_ok=bool(dantzig_violation <= tol),
        support_stationarity_ok=bool(stationarity <= tol),
        max_violation=max(dantzig_violation, stationarity, 0.0),
    )


def _sweep(phi: np.ndarray, col_sq: np.ndarray, residual: np.ndarray, u: np.ndarray,
           r: float, coordinates: Sequence[int]) -> float:
    """One cyclic pass over ``coordinates``; updates ``u`` and ``residual`` in place."""
    n = phi.shape[0]
    max_change = 0.0
    for i in coordinates:
        column = phi[:, i]
        old = u[i]
        if col_sq[i] == 0.0:
            new = 0.0
        else:
            rho = column @ residual / n + col_sq[i] * old
            new = soft_threshold(rho, r) / col_sq[i]
        change = new - old
        if change != 0.0:
            residual -= column * change
            u[i] = new
            max_change = max(max_change, abs(change))
    return max_change


def solve(problem: LassoProblem, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
          warm_start: Optional[np.ndarray] = None) -> LassoSolution:
    """Cyclic coordinate descent with active-set cycling.

    Between full sweeps the solver cycles over the current nonzero
    coordinates only. Convergence is declared on a full sweep whose largest
    coordinate change is below ``tol * max(1, ||U||_inf)`` and whose KKT
    residual is at most ``10 * tol``. ``max_iter`` counts sweeps of either kind.
    """
    if not tol > 0:
        raise PreconditionError(f"tol must be > 0, got {tol}", module="lasso")
    if max_iter < 1:
        raise PreconditionError(f"max_iter must be >= 1, got {max_iter}", module="lasso")

    E = problem.E
    phi = problem.phi.as_float()
    n, p = phi.shape
    r = problem.r
    col_sq = (phi ** 2).sum(axis=0) / n
    every = range(p)

    u = np.zeros(p) if warm_start is None else np.array(warm_start, dtype=float)
    u[col_sq == 0.0] = 0.0
    residual = E - phi @ u
    trace = [objective(E, phi, u, r)]

    iterations = 0
    converged = False
    active_only = False
    kkt = np.inf

    while iterations < max_iter:
        iterations += 1
        coordinates = np.flatnonzero(u) if active_only else every
        max_change = _sweep(phi, col_sq, residual, u, r, coordinates)
        trace.append(float(residual @ residual / n + 2.0 * r * np.abs(u).sum()))
        threshold = tol * max(1.0, float(np.max(np.abs(u))) if p else 1.0)

        if active_only:
            if max_change <= threshold:
                active_only = False
            continue

        # residual drifts under repeated rank-one updates
        residual = E - phi @ u
        if max_change <= threshold:
            kkt = _kkt_residual(phi.T @ residual / n, u, r)
            if kkt <= KKT_FACTOR * tol:
                converged = True
                break
        else:
            active_only = bool(np.any(u))

    final_objective = objective(E, phi, u, r)
    if not converged:
        kkt = _kkt_residual(phi.T @ (E - phi @ u) / n, u, r)
        logger.warning(f"LASSO at r={r:.4g} stopped after {iterations} sweeps without converging "
                       f"(KKT residual {kkt:.3e})")
    else:
        logger.debug(f"LASSO at r={r:.4g} converged in {iterations} sweeps, "
                     f"{int(np.count_nonzero(u))} nonzero coefficients")

    return LassoSolution(
        s_hat=u,
        r=r,
        iterations=iterations,
        objective=final_objective,
        kkt_residual=float(kkt),
        converged=converged,
        objective_trace=tuple(trace),
    )


def path(E: np.ndarray, phi: DesignMatrix, r_grid: Sequence[float], tol: float = DEFAULT_TOL,
         max_iter: int = DEFAULT_MAX_ITER) -> List[LassoSolution]:
    """Warm-started solves along a strictly decreasing grid of penalties."""
    grid = np.asarray(r_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise PreconditionError("r_grid must be a non-empty 1-D sequence", module="lasso")
    if np.any(grid <= 0) or np.any(np.diff(grid) >= 0):
        raise PreconditionError("r_grid must be positive and strictly decreasing", module="lasso")

    top = r_max(E, phi)
    solutions = []
    warm = None
    for r in grid:
        problem = LassoProblem(E=E, phi=phi, r=float(r))
        if r >= top:
            # U = 0 is exactly optimal here
            solution = solve(problem, tol=tol, max_iter=max_iter, warm_start=np.zeros(phi.p))
        else:
            solution = solve(problem, tol=tol, max_iter=max_iter, warm_start=warm)
        solutions.append(solution)
        warm = solution.s_hat

    unconverged = sum(not s.converged for s in solutions)
    logger.info(f"Solved LASSO path over {grid.size} penalties (r_max={top:.4g}, "
                f"{unconverged} unconverged)")
    return solutions


def solve_many(problems: Sequence[LassoProblem], tol: float = DEFAULT_TOL,
               max_iter: int = DEFAULT_MAX_ITER, workers: int = 1) -> List[LassoSolution]:
    """Independent solves, optionally on a thread pool sharing the designs."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda problem: solve(problem, tol, max_iter), problems))
    return [solve(problem, tol, max_iter) for problem in problems]
