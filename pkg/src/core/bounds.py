"""Closed-form error thresholds, failure probabilities and sample sizes.

Every calculator is a pure function of :class:`BoundParams`. Logarithms are
natural throughout. Failure probabilities are reported verbatim, values of
one or more mark the instance as vacuous instead of being clamped.
"""

import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.stats import norm

from ..models.reports import BoundParams, BoundReport, ClassicalCost
from ..utils.exceptions import InfeasibleError, PreconditionError
from ..utils.logger import get_logger
from .design import coherence_threshold


logger = get_logger(__name__)

TWO_SQRT2 = 2.0 * math.sqrt(2.0)
DEFAULT_OPTIMIZER_GRID = 200
DEFAULT_A_MAX = 50.0
DEFAULT_FREE_MAX = 200.0


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise PreconditionError(message, module="bounds")


def _report(calculator: str, r: float, r_min: float, t: float, alpha: float,
            n_min: Optional[int] = None, extras: Optional[Dict[str, float]] = None) -> BoundReport:
    report = BoundReport(r=float(r), r_min=float(r_min), t=float(t), alpha=float(alpha),
                         n_min=n_min, extras=dict(extras or {}), calculator=calculator)
    if report.vacuous:
        logger.warning(f"{calculator}: alpha={alpha:.4g} >= 1, bound is vacuous")
    return report


def _penalty(params: BoundParams, r1: float, calculator: str) -> float:
    """Chosen penalty, defaulting to the smallest admissible one."""
    if params.r is None:
        return r1
    _check(params.r >= r1 * (1.0 - 1e-12),
           f"{calculator} needs r >= r1 = {r1:.6g}, got r = {params.r:.6g}")
    return float(params.r)


def _ceil(value: float) -> int:
    return int(math.ceil(value - 1e-9 * max(1.0, abs(value))))


# Incoherence-based bounds -------------------------------------------------

def bernoulli_min_n(p: int, s: int, mu: float, delta: float) -> Tuple[int, int]:
    """Smallest n for a non-vacuous Bernoulli bound: ln p/(delta mu)^2, and the
    looser 256 s^2 ln p / (mu (1 - mu))^2."""
    log_p = math.log(p)
    tight = log_p / (delta ** 2 * mu ** 2)
    loose = 256.0 * s ** 2 * log_p / (mu ** 2 * (1.0 - mu) ** 2)
    return _ceil(tight), _ceil(loose)


def bernoulli_bound(params: BoundParams) -> BoundReport:
    """l-infinity error bound for Bernoulli(mu) designs and the closed estimator."""
    params.require("bernoulli_bound", 'p', 's', 'n', 'mu', 'delta', 'A', 'sigma')
    p, s, n, mu, delta, A, sigma = (params.p, params.s, params.n, params.mu, params.delta,
                                    params.A, params.sigma)
    _check(p >= 2 and s >= 1 and n >= 1, "bernoulli_bound needs p >= 2, s >= 1 and n >= 1")
    _check(0.0 < mu < 1.0, f"mu must lie in (0, 1), got {mu}")
    delta_max = (1.0 - mu) / (16.0 * s)
    _check(0.0 < delta < delta_max, f"delta must lie in (0, {delta_max:.6g}), got {delta}")
    _check(A > TWO_SQRT2, f"A must exceed 2 sqrt(2), got {A}")
    _check(sigma > 0, "sigma must be > 0")

    log_p = math.log(p)
    r = A * sigma * math.sqrt(mu * (1.0 + delta)) * math.sqrt(log_p / n)
    t = (1.5 + 24.0 * (mu + delta) / ((1.0 - mu) / s - 16.0 * delta)) * r / mu

    hoeffding = -2.0 * n * delta ** 2 * mu ** 2
    alpha = (1.0 - (1.0 - p ** (1.0 - A ** 2 / 8.0))
             * (1.0 - 2.0 * math.exp(hoeffding + log_p))
             + math.exp(hoeffding + 2.0 * log_p))

    n_min, n_min_loose = bernoulli_min_n(p, s, mu, delta)
    return _report("bernoulli_bound", r, r, t, alpha, n_min, {
        'delta_max': delta_max,
        'n_min_loose': n_min_loose,
        'r_tilde': r / mu,
    })


def rademacher_delta(delta_prime, s):
    """delta = 1 / (7 delta' s); exact for Fraction inputs."""
    return 1 / (7 * delta_prime * s)


def rademacher_bound(params: BoundParams) -> BoundReport:
    """l-infinity error bound for Rademacher designs and the delta estimator."""
    params.require("rademacher_bound", 'p', 's', 'n', 'delta_prime', 'A', 'sigma')
    p, s, n, dp, A, sigma = (params.p, params.s, params.n, params.delta_prime,
                             params.A, params.sigma)
    _check(p >= 2 and s >= 1 and n >= 1, "rademacher_bound needs p >= 2, s >= 1 and n >= 1")
    _check(dp > 1.0, f"delta' must exceed 1, got {dp}")
    _check(A > TWO_SQRT2, f"A must exceed 2 sqrt(2), got {A}")
    _check(sigma > 0, "sigma must be > 0")

    log_p = math.log(p)
    delta = rademacher_delta(dp, s)
    r = A * sigma * math.sqrt(log_p / n)
    t = 1.5 * (1.0 + 16.0 / (5.0 * (dp - 1.0))) * r
    concentration = math.exp(-n * 49.0 * delta ** 2 * s ** 2 / 2.0 + 2.0 * log_p)
    alpha = 1.0 - (1.0 - p ** (1.0 - A ** 2 / 8.0)) * (1.0 - concentration)

    return _report("rademacher_bound", r, r, t, alpha, _ceil(4.0 * dp ** 2 * log_p), {
        'delta': delta,
        'concentration': concentration,
    })


# Universal-distortion bounds ----------------------------------------------

def udp_linf_bound(rho: float, kappa: float, theta1: float, theta2: float,
                   r: float, r0: float, n: int, s: int) -> BoundReport:
    """l-infinity bound implied by the universal distortion property.

    Holds deterministically on the event ||(1/n) Phi^T eps||_inf <= r0, so the
    report carries alpha = 0; the l1 bound is in ``extras``.
    """
    _check(0.0 < kappa < 0.5, f"kappa must lie in (0, 1/2), got {kappa}")
    _check(rho > 0 and theta2 > 0 and theta1 >= 0 and r0 >= 0,
           "need rho > 0, theta2 > 0, theta1 >= 0 and r0 >= 0")
    r_min = r0 / (1.0 - 2.0 * kappa)
    _check(r > r_min, f"r must exceed r0 / (1 - 2 kappa) = {r_min:.6g}, got {r}")

    slack = 1.0 - r0 / r - 2.0 * kappa
    l1_bound = 2.0 * r * n * rho ** 2 * s / slack
    t = (1.0 + r0 / r + 2.0 * n * theta1 * rho ** 2 * s / slack) * r / theta2
    return _report("udp_linf_bound", r, r_min, t, 0.0, None, {'l1_bound': l1_bound})


def udp_linf_from_params(params: BoundParams) -> BoundReport:
    params.require("udp_linf_bound", 'rho', 'kappa', 'theta1', 'theta2', 'r', 'r0', 'n', 's')
    return udp_linf_bound(params.rho, params.kappa, params.theta1, params.theta2,
                          params.r, params.r0, params.n, params.s)


def expander_udp_constants(d: int, e: float) -> Tuple[float, float]:
    """(rho, kappa) of the distortion inequality met by a (2s, e)-expander of degree d."""
    _check(d >= 1 and 0.0 <= e < 0.5, f"need d >= 1 and 0 <= e < 1/2, got d={d}, e={e}")
    return 1.0 / ((1.0 - 2.0 * e) * math.sqrt(d)), 2.0 * e / (1.0 - 2.0 * e)


def tiebreak_bound(params: BoundParams) -> BoundReport:
    """Exact-recovery bound for Rademacher designs beyond the s^2 log p regime.

    C1, C2 and C3 are the unnamed universal constants of the RIP argument and
    must be supplied.
    """
    params.require("tiebreak_bound", 'p', 's', 'n', 'sigma', 'c', 'C1', 'C2', 'C3')
    p, s, n, sigma, c = params.p, params.s, params.n, params.sigma, params.c
    C1, C2, C3 = params.C1, params.C2, params.C3
    _check(p >= 2 and n >= 1, "tiebreak_bound needs p >= 2 and n >= 1")
    _check(c > 1.0, f"c must exceed 1, got {c}")
    _check(C1 > 0 and C2 > 0 and C3 > 0, "C1, C2 and C3 must be > 0")
    _check(s >= 6.0 * (2.0 + c) / C1, f"need s >= 6 (2 + c) / C1 = {6.0 * (2.0 + c) / C1:.4g}")
    n0 = C1 * s * math.log(C2 * p)
    _check(n >= n0, f"need n >= n0 = {n0:.6g}, got n = {n}")
    _check(sigma > 0, "sigma must be > 0")

    log_p = math.log(p)
    r1 = 45.0 * sigma * math.sqrt(c * log_p / n)
    r = _penalty(params, r1, "tiebreak_bound")
    C1_prime = 35869.0 * math.sqrt(c * (2.0 + c)) / C1
    C2_prime = 46.31 * math.sqrt(c) / math.sqrt(C1)
    t = sigma * math.sqrt(n0 / n) * (r / r1) * (C1_prime + C2_prime / math.sqrt(s)) * math.sqrt(s)
    alpha = 3.0 * p ** (-c) + 2.0 * math.exp(-C3 * n)

    return _report("tiebreak_bound", r, r1, t, alpha, _ceil(n0), {
        'C1_prime': C1_prime,
        'C2_prime': C2_prime,
        'n0': n0,
        'coherence': coherence_threshold(c, C1, s),
        'r0': sigma * math.sqrt(2.0 * c * log_p / n),
        'udp_bound': (1.0316 + 799.0 * math.sqrt((2.0 + c) / C1) * math.sqrt(s)) * r,
    })


def expander_bound(params: BoundParams, snr_mode: bool = False) -> BoundReport:
    """Exact-recovery bound for expander adjacency designs.

    ``sigma`` is the signal-to-noise scaled level: Var(eps_j) <= sigma^2 d / n.
    In ``snr_mode`` the random-graph corollary is used with e fixed to 1/12.
    """
    if snr_mode:
        return _expander_snr_bound(params)

    params.require("expander_bound", 'p', 's', 'n', 'd', 'e', 'A', 'sigma')
    p, s, n, d, e, A, sigma = (params.p, params.s, params.n, params.d, params.e,
                               params.A, params.sigma)
    _check(p >= 2 and s >= 1 and n >= 1 and d >= 1, "expander_bound needs p >= 2, s, n, d >= 1")
    _check(1.0 / p < e < 1.0 / 6.0, f"e must lie in (1/p, 1/6), got {e}")
    _check(A > math.sqrt(2.0), f"A must exceed sqrt(2), got {A}")
    _check(sigma > 0, "sigma must be > 0")

    log_p = math.log(p)
    ratio = (1.0 - 2.0 * e) / (1.0 - 6.0 * e)
    r0 = A * sigma * d * math.sqrt(log_p) / n ** 1.5
    r1 = 2.0 * ratio * r0
    r = _penalty(params, r1, "expander_bound")
    bracket = 1.0 + 2.0 * ratio + 16.0 * e * s / (1.0 - 6.0 * e) ** 2
    t = A * sigma * math.sqrt(log_p / n) * bracket * (r / r1)
    alpha = p ** (1.0 - A ** 2 / 2.0)

    rho, kappa = expander_udp_constants(d, e)
    udp_bound = (n / d) * (1.0 + (1.0 - 6.0 * e) / (2.0 * (1.0 - 2.0 * e))
                           + 8.0 * e * s / ((1.0 - 2.0 * e) * (1.0 - 6.0 * e))) * r
    return _report("expander_bound", r, r1, t, alpha, None, {
        'ratio': ratio,
        'bracket': bracket,
        'r0': r0,
        'rho': rho,
        'kappa': kappa,
        'udp_bound': udp_bound,
    })


def _expander_snr_bound(params: BoundParams) -> BoundReport:
    params.require("expander_bound", 'p', 's', 'n', 'A', 'sigma', 'c', 'C1', 'C2')
    p, s, n, A, sigma, c = params.p, params.s, params.n, params.A, params.sigma, params.c
    C1, C2 = params.C1, params.C2
    e = 1.0 / 12.0
    _check(p >= 4 * s and s >= 1, f"need p >= 4 s, got p={p}, s={s}")
    _check(1.0 / p < e, f"e = 1/12 requires p > 12, got p={p}")
    _check(c > 1.0 and C1 > 0 and C2 > 0, "need c > 1 and C1, C2 > 0")
    _check(A > math.sqrt(min(C1, 2.0)), f"A must exceed sqrt(min(C1, 2)), got {A}")
    _check(sigma > 0, "sigma must be > 0")
    log_p = math.log(p)
    n0 = C2 * s * log_p
    _check(n >= n0, f"need n >= n0 = {n0:.6g}, got n = {n}")

    r1 = 3.34 * A * sigma * (log_p / n) ** 1.5
    r = _penalty(params, r1, "expander_bound")
    t = 51.7 * A * C2 ** -0.5 * sigma * (r / r1) * math.sqrt(n0 / n) * math.sqrt(s)
    alpha = p ** (1.0 - A ** 2 / 2.0) + 2.0 * s * p ** (-c)
    return _report("expander_bound", r, r1, t, alpha, _ceil(n0), {
        'e': e,
        'ratio': (1.0 - 2.0 * e) / (1.0 - 6.0 * e),
        'n0': n0,
    })


def bernoulli_design_bound(params: BoundParams, snr_mode: bool = False) -> BoundReport:
    """Exact-recovery bound for sparse Bernoulli designs with mu = 799 (1+c) ln p / n."""
    params.require("bernoulli_design_bound", 'p', 's', 'n', 'sigma', 'c')
    p, s, n, sigma, c = params.p, params.s, params.n, params.sigma, params.c
    _check(p > 7, f"bernoulli_design_bound needs p > 7, got {p}")
    _check(s >= 1 and c > 1.0, f"need s >= 1 and c > 1, got s={s}, c={c}")
    _check(sigma > 0, "sigma must be > 0")
    log_p = math.log(p)
    n0 = 12982.0 * (1.0 + c) * s * log_p
    _check(n >= n0, f"need n >= 12982 (1 + c) s ln p = {n0:.6g}, got n = {n}")

    mu = 799.0 * (1.0 + c) * log_p / n
    alpha = 3.0 * p ** (1.0 - c)

    if snr_mode:
        r1 = 0.1886 * sigma * (12982.0 * (1.0 + c) * log_p / n) ** 1.5
        r = _penalty(params, r1, "bernoulli_design_bound")
        t = 195.82 * sigma * (r / r1) * math.sqrt(n0 / n) * math.sqrt(s)
        return _report("bernoulli_design_bound", r, r1, t, alpha, _ceil(n0), {'mu': mu})

    r0 = 6.0 * sigma * math.sqrt(46.0 * c * (1.0 + c)) * log_p / n
    r1 = 9692.0 * sigma * (1.0 + c) * log_p / n
    r = _penalty(params, r1, "bernoulli_design_bound")
    t = 775.36 * (r / r1) * sigma * s
    udp_bound = (n / (759.0 * (1.0 + c) * log_p)
                 * (1.0 + r0 / r + 5.338 * s / (0.0942 - r0 / r)) * r)
    return _report("bernoulli_design_bound", r, r1, t, alpha, _ceil(n0), {
        'mu': mu,
        'r0': r0,
        'r1_over_r0': r1 / r0,
        'udp_bound': udp_bound,
    })


# Baseline cost ------------------------------------------------------------

def classical_cost(p: int, target_width: float, confidence: float) -> ClassicalCost:
    """Evaluations needed to estimate every S_i one by one with Sidak-corrected
    intervals of the given width."""
    _check(p >= 1, f"p must be >= 1, got {p}")
    _check(0.0 < confidence < 1.0, f"confidence must lie in (0, 1), got {confidence}")
    _check(target_width > 0, f"target width must be > 0, got {target_width}")

    level = -math.expm1(math.log(confidence) / p)
    z = float(norm.isf(level / 2.0))
    N_prime = max(1, math.ceil((2.0 * z / target_width) ** 2))
    return ClassicalCost(
        per_test_level=level,
        z=z,
        N_prime=N_prime,
        total_evals=2 * N_prime * (p + 1),
    )


# Parameter search ---------------------------------------------------------

CALCULATORS: Dict[str, Callable[..., BoundReport]] = {
    'bernoulli_bound': bernoulli_bound,
    'rademacher_bound': rademacher_bound,
    'tiebreak_bound': tiebreak_bound,
    'expander_bound': expander_bound,
    'bernoulli_design_bound': bernoulli_design_bound,
    'udp_linf_bound': udp_linf_from_params,
}

_INFEASIBLE = 1e300


def _free_grid(calculator_id: str, fixed: BoundParams, points: int,
               free_max: float) -> Tuple[str, np.ndarray]:
    if calculator_id == 'rademacher_bound':
        return 'delta_prime', 1.0 + np.geomspace(1e-3, free_max - 1.0, points)
    fixed.require("optimize_params", 'mu', 's')
    delta_max = (1.0 - fixed.mu) / (16.0 * fixed.s)
    return 'delta', delta_max * np.geomspace(1e-4, 0.999, points)


def _minimal_A(calc: Callable[[BoundParams], BoundReport], params: BoundParams,
               alpha_max: float, A_max: float) -> Tuple[Optional[float], float]:
    """Smallest A with alpha <= alpha_max (alpha decreases in A), and alpha at A_max."""
    A_low = TWO_SQRT2 * (1.0 + 1e-9)

    def excess(A: float) -> float:
        return calc(params.with_values(A=A)).alpha - alpha_max

    high = excess(A_max)
    if high > 0:
        return None, high + alpha_max
    if excess(A_low) <= 0:
        return A_low, high + alpha_max
    root = brentq(excess, A_low, A_max, xtol=1e-12, rtol=1e-12)
    A = min(A_max, root * (1.0 + 1e-10))
    if excess(A) > 0:
        A = A_max
    return A, high + alpha_max


def optimize_params(calculator_id: str, fixed: BoundParams, alpha_max: float,
                    grid_points: int = DEFAULT_OPTIMIZER_GRID, A_max: float = DEFAULT_A_MAX,
                    free_max: float = DEFAULT_FREE_MAX) -> BoundReport:
    """Minimize t over A and delta (or delta') subject to alpha <= alpha_max.

    For each value of the free concentration parameter, A is the smallest
    value meeting the probability constraint. The profile is scanned on a
    log grid and the best cell refined by bounded golden-section search.
    """
    if calculator_id not in ('bernoulli_bound', 'rademacher_bound'):
        raise PreconditionError(f"cannot optimize {calculator_id}", module="bounds")
    _check(0.0 < alpha_max < 1.0, f"alpha_max must lie in (0, 1), got {alpha_max}")
    _check(grid_points >= 3, "optimizer grid needs at least 3 points")
    calc = CALCULATORS[calculator_id]
    name, grid = _free_grid(calculator_id, fixed, grid_points, free_max)

    nearest = {'alpha': math.inf, name: None}

    def profile(x: float) -> Tuple[float, Optional[float]]:
        params = fixed.with_values(**{name: float(x)})
        A, alpha_at_max = _minimal_A(calc, params, alpha_max, A_max)
        if A is None:
            if alpha_at_max < nearest['alpha']:
                nearest.update(alpha=alpha_at_max, **{name: float(x)})
            return _INFEASIBLE, None
        return calc(params.with_values(A=A)).t, A

    values = [profile(x)[0] for x in grid]
    best = int(np.argmin(values))
    if values[best] >= _INFEASIBLE:
        raise InfeasibleError(
            f"no (A, {name}) reaches alpha <= {alpha_max}; closest alpha "
            f"{nearest['alpha']:.4g} at {name}={nearest[name]} with A={A_max}",
            module="bounds",
            details={'closest_alpha': nearest['alpha'], name: nearest[name], 'A': A_max},
        )

    x_best = float(grid[best])
    low = float(grid[max(best - 1, 0)])
    high = float(grid[min(best + 1, grid.size - 1)])
    if high > low:
        refined = minimize_scalar(lambda x: profile(x)[0], bounds=(low, high), method='bounded',
                                  options={'xatol': 1e-10 * max(1.0, high)})
        if refined.success and profile(refined.x)[0] < values[best]:
            x_best = float(refined.x)

    t_best, A_best = profile(x_best)
    report = calc(fixed.with_values(**{name: x_best, 'A': A_best}))
    extras = dict(report.extras, A=A_best, alpha_max=alpha_max, **{name: x_best})
    logger.info(f"{calculator_id}: t={t_best:.4g} at A={A_best:.4g}, {name}={x_best:.4g} "
                f"(alpha={report.alpha:.4g})")
    return BoundReport(r=report.r, r_min=report.r_min, t=report.t, alpha=report.alpha,
                       n_min=report.n_min, extras=extras, calculator=calculator_id)


def run_calculator(calculator_id: str, params: BoundParams, snr_mode: bool = False) -> BoundReport:
    """Dispatch by name, as selected in a run config."""
    if calculator_id not in CALCULATORS:
        raise PreconditionError(f"unknown bound calculator: {calculator_id}", module="bounds")
    calc = CALCULATORS[calculator_id]
    if calculator_id in ('expander_bound', 'bernoulli_design_bound'):
        return calc(params, snr_mode=snr_mode)
    return calc(params)
