"""First-passage-under-restart analytics.

Composes an underlying process with a restart specification and computes
the restarted hitting time's PGF, hitting probability, mean, and the
beneficial-restart criteria for the geometric and sharp families.

Numerical strategy: every quantity that formally reads "1 minus a sum" is
instead accumulated from nonnegative survival terms, so values such as the
renewal denominator stay accurate even when the straightforward form would
cancel catastrophically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .series import AT_INFINITY, TRUNCATION, TruncatedPMF, series_divide
from .models import (
    BiasedWalk,
    CycleTrap,
    ExplicitRestart,
    GeometricRestart,
    ProcessModel,
    RestartSpec,
    SharpRestart,
)

# A renewal denominator at or below this is treated as preemptive restart.
PREEMPTIVE_TOL = 1e-12

# Classification labels for sharp restart on the cycle trap.
BENEFICIAL = "beneficial"
EQUAL = "equal"
WORSE = "worse"
PREEMPTIVE = "preemptive"

# Default search grid when scanning for a beneficial geometric rate:
# beneficial windows can hug either endpoint, so the grid is log-spaced
# and reaches close to both 0 and 1.
RHO_GRID_POINTS = 400
RHO_GRID_LO = 1e-4
RHO_GRID_HI = 1.0 - 1e-4


@dataclass(frozen=True)
class FpurReport:
    """Summary of one (process, restart) composition."""

    hit_prob: float
    mean_T: float
    p_restart_wins: float
    expected_restarts: float
    preemptive: bool


def _underlying_pmf(model: ProcessModel, spec: RestartSpec, t_max: int | None) -> TruncatedPMF:
    if t_max is not None:
        return model.pmf(t_max)
    u = model.pmf()
    # Sharp restart reads cumulative mass up to N-1; make sure the horizon
    # reaches it so only a < RESIDUAL_TARGET tail is unaccounted.
    if isinstance(spec, SharpRestart) and u.t_max < spec.n_restart - 1:
        u = model.pmf(spec.n_restart - 1)
    return u


def _restart_survival_vector(spec: RestartSpec, size: int) -> np.ndarray:
    """P(R > n) for n = 0..size-1."""
    if isinstance(spec, GeometricRestart):
        return (1.0 - spec.rho) ** np.arange(size)
    if isinstance(spec, SharpRestart):
        out = np.zeros(size)
        out[: min(size, spec.n_restart)] = 1.0
        return out
    return np.array([spec.survival(n) for n in range(size)])


def _renewal_terms(
    model: ProcessModel, spec: RestartSpec, t_max: int | None
) -> tuple[TruncatedPMF, float, float]:
    """Return (u, nu, d) where nu = sum u(n) P(R > n) and d is the renewal
    denominator, both accumulated from nonnegative terms."""
    u = _underlying_pmf(model, spec, t_max)
    surv_r = _restart_survival_vector(spec, u.coefficients.size)
    nu = math.fsum(u.coefficients * surv_r)
    d = (1.0 - model.hit_prob()) * (1.0 - spec.hit_prob()) + nu
    return u, nu, d


def p_restart_wins(model: ProcessModel, spec: RestartSpec, t_max: int | None = None) -> float:
    """P(R <= U), the probability a restart epoch arrives no later than the
    underlying first passage; 1 minus this is the renewal denominator."""
    _, _, d = _renewal_terms(model, spec, t_max)
    return min(1.0, max(0.0, 1.0 - d))


def hitting_prob_T(model: ProcessModel, spec: RestartSpec, t_max: int | None = None) -> float:
    """P(T < infinity) for the restarted process; 0 for preemptive pairs."""
    _, nu, d = _renewal_terms(model, spec, t_max)
    if d <= PREEMPTIVE_TOL:
        return 0.0
    return min(1.0, nu / d)


def fpur_pgf(model: ProcessModel, spec: RestartSpec, z: float, t_max: int | None = None) -> float:
    """PGF of the restarted hitting time via truncated double sums.

    Numerator: sum_n z^n u(n) P(R > n).  Denominator: 1 - sum_i z^i r(i)
    P(U >= i).  At z=1 this reduces to (and is answered by) hitting_prob_T.
    """
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z={z!r} outside [0, 1]")
    if z == 1.0:
        return hitting_prob_T(model, spec, t_max)
    u = _underlying_pmf(model, spec, t_max)
    t = u.t_max
    zpow = z ** np.arange(t + 1)
    surv_r = _restart_survival_vector(spec, t + 1)
    numerator = math.fsum(u.coefficients * zpow * surv_r)

    # P(U >= i) = P(U > i-1), shifted one slot.
    surv_u_before = np.empty(t + 2)
    surv_u_before[0] = 1.0
    surv_u_before[1:] = u._suffix[1:] + u.residual

    if isinstance(spec, SharpRestart):
        n = spec.n_restart
        surv = u.residual if n - 1 > t else float(surv_u_before[n])
        den_sum = z**n * surv
    elif isinstance(spec, GeometricRestart):
        x = (1.0 - spec.rho) * z
        terms = [spec.rho * z * x ** (i - 1) * surv_u_before[i] for i in range(1, t + 2)]
        # Beyond the horizon P(U >= i) is the constant residual.
        tail = spec.rho * z * u.residual * x ** (t + 1) / (1.0 - x)
        den_sum = math.fsum(terms) + tail
    else:
        r = spec.pmf_array(max(t + 1, spec.dist.t_max if isinstance(spec, ExplicitRestart) else 0))
        terms = []
        for i in range(1, r.size):
            if r[i] != 0.0:
                surv = u.residual if i - 1 > t else float(surv_u_before[i])
                terms.append(z**i * r[i] * surv)
        den_sum = math.fsum(terms)

    denominator = 1.0 - den_sum
    return numerator / denominator


def fpur_pmf(model: ProcessModel, spec: RestartSpec, t_max: int) -> TruncatedPMF:
    """Mass function of the restarted hitting time on 0..t_max.

    Formal power-series division of the numerator coefficients
    u(n) P(R > n) by the denominator coefficients delta(n=0) - r(n) P(U >= n).
    """
    u = model.pmf(t_max)
    surv_r = _restart_survival_vector(spec, t_max + 1)
    num = u.coefficients * surv_r

    surv_u_before = np.empty(t_max + 1)
    surv_u_before[0] = 1.0
    if t_max >= 1:
        surv_u_before[1:] = u._suffix[1 : t_max + 1] + u.residual
    den = -spec.pmf_array(t_max) * surv_u_before
    den[0] = 1.0

    quot = series_divide(num, den, t_max)
    # Division round-off can leave harmless negative dust.
    if np.any(quot < -1e-9):
        raise ArithmeticError("restarted PMF division produced negative mass")
    np.clip(quot, 0.0, None, out=quot)
    residual = max(0.0, 1.0 - math.fsum(quot))
    hit = hitting_prob_T(model, spec)
    kind = AT_INFINITY if hit < 1.0 - PREEMPTIVE_TOL else TRUNCATION
    return TruncatedPMF(quot, residual=residual, residual_kind=kind)


def mean_T_generic(model: ProcessModel, spec: RestartSpec, t_max: int | None = None) -> float:
    """E[T] by the renewal identity E[min(U, R)] / P(R > U).

    E[min(U, R)] is the survival-product sum over n >= 0 with analytic
    tails for the geometric and sharp families.  Returns infinity for
    preemptive pairs and whenever the restarted process is defective.
    """
    u, nu, d = _renewal_terms(model, spec, t_max)
    if d <= PREEMPTIVE_TOL:
        return math.inf
    if nu / d < 1.0:
        return math.inf
    t = u.t_max
    surv_u = u._suffix[1:] + u.residual  # P(U > n), n = 0..t
    surv_r = _restart_survival_vector(spec, t + 1)
    head = math.fsum(surv_u * surv_r)
    if isinstance(spec, GeometricRestart):
        x = 1.0 - spec.rho
        tail = u.residual * x ** (t + 1) / spec.rho
    elif isinstance(spec, SharpRestart):
        tail = u.residual * max(0, spec.n_restart - 1 - t)
    else:
        r_top = spec.dist.t_max if isinstance(spec, ExplicitRestart) else t
        tail = math.fsum(u.residual * spec.survival(n) for n in range(t + 1, r_top + 1))
        # Beyond both horizons each term is at most residual_u * residual_r,
        # which is zero whenever either side is a proper distribution.
    return (head + tail) / d


def mean_T_geometric(model: ProcessModel, rho: float) -> float:
    """E[T] under geometric restart: (1 - u~(1-rho)) / (rho u~(1-rho))."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly inside (0, 1)")
    value = model.pgf(1.0 - rho)
    if value <= 0.0:
        return math.inf
    return (1.0 - value) / (rho * value)


def mean_T_sharp(model: ProcessModel, n_restart: int, t_max: int | None = None) -> float:
    """E[T] under sharp restart at N via partial sums:
    (sum_{n<N} n u(n) + N P(U > N-1)) / P(U <= N-1); infinity if preemptive."""
    if n_restart < 1:
        raise ValueError("n_restart must be >= 1")
    if n_restart <= model.min_support():
        return math.inf
    horizon = n_restart - 1 if t_max is None else max(t_max, n_restart - 1)
    u = model.pmf(horizon)
    coeffs = u.coefficients[: n_restart]
    mass_below = math.fsum(coeffs)
    if mass_below <= 0.0:
        return math.inf
    weighted = math.fsum(n * c for n, c in enumerate(coeffs))
    return (weighted + n_restart * u.survival(n_restart - 1)) / mass_below


def cycle_trap_sharp_mean(p: float, L: int, M: int, n_restart: int) -> float:
    """Closed-form E[T] for the cycle trap under sharp restart at N."""
    model = CycleTrap(p, L, M)  # parameter validation
    if n_restart <= L:
        return math.inf
    q = model.q
    k = (n_restart - 1 - L) // (M + 1)
    q_hi = q ** (k + 1)
    bracket = k * q_hi - (k + 1) * q**k + 1.0
    return L + (q_hi * n_restart + (q / p) * (M + 1) * bracket) / (1.0 - q_hi)


def derivative_criterion_D(model: ProcessModel, t_max: int | None = None) -> float:
    """(2 E[U]^2 - u~''(1)) / 2; negative values guarantee a beneficial
    low-rate geometric window.  Inapplicable to defective or infinite-moment
    processes."""
    if model.hit_prob() < 1.0:
        raise ValueError("criterion requires a process that hits with probability 1")
    mean = model.mean()
    sfm = model.second_factorial_moment()
    if not (math.isfinite(mean) and math.isfinite(sfm)):
        raise ValueError("criterion requires finite first and second moments")
    return (2.0 * mean * mean - sfm) / 2.0


def cycle_trap_geometric_threshold(L: int, M: int) -> float:
    """Bias threshold p* below which geometric restart helps the cycle trap.

    Nonpositive (no beneficial interval) whenever M <= 2L; the denominator
    factors as (M-L)(M-L+1), so M in {L-1, L} degenerates to -infinity.
    """
    if L < 1 or M < 1:
        raise ValueError("L and M must be >= 1")
    num = (M + 1) * (M - 2 * L)
    den = num + L * (L + 1)
    if den == 0:
        return -math.inf
    return num / den


def brw_geometric_threshold_p(m: int) -> float:
    """Bias threshold p* below which geometric restart helps the walk."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return (4.0 - m + math.sqrt(m * m + 8.0)) / 8.0


def brw_geometric_threshold_m(p: float) -> float:
    """Starting-point threshold m* below which geometric restart helps."""
    if not 0.5 < p < 1.0:
        raise ValueError("threshold is defined only for downward bias p > 1/2")
    return (8.0 * p * (1.0 - p) - 1.0) / (2.0 * p - 1.0)


def cycle_trap_sharp_classify(L: int, M: int, n_restart: int) -> str:
    """Classify sharp restart at N on the cycle trap against no restart.

    The sign of (N-1-M) - (M+1) floor((N-1-L)/(M+1)) decides, independent
    of the bias p.
    """
    if L < 1 or M < 1:
        raise ValueError("L and M must be >= 1")
    if n_restart < 1:
        raise ValueError("n_restart must be >= 1")
    if n_restart <= L:
        return PREEMPTIVE
    sign = (n_restart - 1 - M) - (M + 1) * ((n_restart - 1 - L) // (M + 1))
    if sign > 0:
        return WORSE
    if sign == 0:
        return EQUAL
    return BENEFICIAL


def brw_geometric_mean(p: float, m: int, rho: float) -> float:
    """Closed-form E[T] for the biased walk under geometric restart,
    evaluated in its explicit radical form."""
    BiasedWalk(p, m)  # parameter validation
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly inside (0, 1)")
    q = 1.0 - p
    x = 1.0 - rho
    arg = 1.0 - 4.0 * p * q * x * x
    if arg < 0.0:
        if arg < -1e-15:
            raise ArithmeticError(f"square-root argument {arg!r} below clamp range")
        arg = 0.0
    base = 1.0 - math.sqrt(arg)
    return ((2.0 * q * x) ** m - base**m) / (rho * base**m)


def default_rho_grid() -> np.ndarray:
    """Log-spaced restart-rate grid used when scanning for beneficial rates."""
    return np.geomspace(RHO_GRID_LO, RHO_GRID_HI, RHO_GRID_POINTS)


def best_geometric_rho(model: ProcessModel, grid=None) -> tuple[float, float]:
    """Grid-minimize the geometric-restart mean; returns (rho, mean)."""
    if grid is None:
        grid = default_rho_grid()
    best = (math.nan, math.inf)
    for rho in grid:
        value = mean_T_geometric(model, float(rho))
        if value < best[1]:
            best = (float(rho), value)
    return best


def analyze(model: ProcessModel, spec: RestartSpec, t_max: int | None = None) -> FpurReport:
    """Full report for one (process, restart) pair."""
    _, nu, d = _renewal_terms(model, spec, t_max)
    if d <= PREEMPTIVE_TOL:
        return FpurReport(
            hit_prob=0.0,
            mean_T=math.inf,
            p_restart_wins=1.0,
            expected_restarts=math.inf,
            preemptive=True,
        )
    if isinstance(spec, GeometricRestart):
        mean_t = mean_T_geometric(model, spec.rho)
    elif isinstance(spec, SharpRestart):
        mean_t = mean_T_sharp(model, spec.n_restart, t_max)
    else:
        mean_t = mean_T_generic(model, spec, t_max)
    return FpurReport(
        hit_prob=min(1.0, nu / d),
        mean_T=mean_t,
        p_restart_wins=min(1.0, max(0.0, 1.0 - d)),
        expected_restarts=min(1.0, max(0.0, 1.0 - d)) / d,
        preemptive=False,
    )
