"""Restart-time distributions and first-passage process models.

Two families of value objects:

* :class:`RestartSpec` subclasses describe when the restart clock fires
  (geometric, sharp, or an explicit PMF).
* :class:`ProcessModel` subclasses describe the underlying process whose
  first-passage time is being restarted.  Each exposes its closed-form PGF
  where one exists, a PMF expansion, and a stepwise trajectory simulator.

States and times are integers; all randomness enters through explicit
uniform draws passed to ``step`` so that simulation engines own the RNG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .series import AT_INFINITY, TRUNCATION, TruncatedPMF

# Default PMF expansion policy: extend until the unrepresented finite-time
# mass drops below RESIDUAL_TARGET, or the coefficient count hits MAX_TERMS,
# whichever comes first.  Defective walks (p <= q) never reach the target.
RESIDUAL_TARGET = 1e-10
MAX_TERMS = 10**6

# Floating-point guard for 1 - 4pq z^2 at the branch point (z -> 1, p = q).
_SQRT_CLAMP = 1e-15


def _clamped_sqrt(arg: float) -> float:
    if arg < 0.0:
        if arg < -_SQRT_CLAMP:
            raise ValueError(f"square-root argument {arg!r} below clamp range")
        arg = 0.0
    return math.sqrt(arg)


def _check_z(z: float) -> None:
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z={z!r} outside [0, 1]")


# ---------------------------------------------------------------------------
# Restart-time specifications
# ---------------------------------------------------------------------------


class RestartSpec:
    """When the restart clock fires.  Subclasses are immutable value objects."""

    def pmf(self, n: int) -> float:
        raise NotImplementedError

    def cdf(self, n: int) -> float:
        raise NotImplementedError

    def survival(self, n: int) -> float:
        """P(R > n); stable, never computed as 1 - cdf when a direct form exists."""
        raise NotImplementedError

    def pgf(self, z: float) -> float:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def hit_prob(self) -> float:
        """P(R < infinity)."""
        raise NotImplementedError

    def pmf_array(self, t_max: int) -> np.ndarray:
        """Masses r(0..t_max) as a dense vector."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class GeometricRestart(RestartSpec):
    """Restart after a geometric number of steps: r(n) = rho (1-rho)^(n-1), n >= 1."""

    rho: float

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly inside (0, 1)")

    def pmf(self, n: int) -> float:
        if n < 1:
            return 0.0
        return self.rho * (1.0 - self.rho) ** (n - 1)

    def cdf(self, n: int) -> float:
        if n < 0:
            return 0.0
        return 1.0 - (1.0 - self.rho) ** n

    def survival(self, n: int) -> float:
        if n < 0:
            return 1.0
        return (1.0 - self.rho) ** n

    def pgf(self, z: float) -> float:
        _check_z(z)
        return self.rho * z / (1.0 - (1.0 - self.rho) * z)

    def mean(self) -> float:
        return 1.0 / self.rho

    def hit_prob(self) -> float:
        return 1.0

    def pmf_array(self, t_max: int) -> np.ndarray:
        out = np.zeros(t_max + 1)
        if t_max >= 1:
            n = np.arange(1, t_max + 1)
            out[1:] = self.rho * (1.0 - self.rho) ** (n - 1)
        return out

    def describe(self) -> str:
        return f"geometric:rho={self.rho!r}"


@dataclass(frozen=True)
class SharpRestart(RestartSpec):
    """Restart at a fixed epoch: r(n) = 1 at n = n_restart."""

    n_restart: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_restart, int) or self.n_restart < 1:
            raise ValueError("n_restart must be an integer >= 1")

    def pmf(self, n: int) -> float:
        return 1.0 if n == self.n_restart else 0.0

    def cdf(self, n: int) -> float:
        return 1.0 if n >= self.n_restart else 0.0

    def survival(self, n: int) -> float:
        return 1.0 if n < self.n_restart else 0.0

    def pgf(self, z: float) -> float:
        _check_z(z)
        return z**self.n_restart

    def mean(self) -> float:
        return float(self.n_restart)

    def hit_prob(self) -> float:
        return 1.0

    def pmf_array(self, t_max: int) -> np.ndarray:
        out = np.zeros(t_max + 1)
        if self.n_restart <= t_max:
            out[self.n_restart] = 1.0
        return out

    def describe(self) -> str:
        return f"sharp:N={self.n_restart}"


@dataclass(frozen=True, eq=False)
class ExplicitRestart(RestartSpec):
    """Restart clock with an arbitrary user-supplied PMF on positive integers."""

    dist: TruncatedPMF
    _cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.dist.coefficients[0] != 0.0:
            raise ValueError("restart PMF must place zero mass at n=0")
        cdf = np.cumsum(self.dist.coefficients)
        cdf.setflags(write=False)
        object.__setattr__(self, "_cdf", cdf)

    def draw(self, u: float):
        """Inverse-CDF sample; infinity when the draw lands in the residual."""
        idx = int(np.searchsorted(self._cdf, u, side="right"))
        if idx > self.dist.t_max:
            return math.inf
        return idx

    def pmf(self, n: int) -> float:
        if 0 <= n <= self.dist.t_max:
            return float(self.dist.coefficients[n])
        return 0.0

    def cdf(self, n: int) -> float:
        return self.dist.cumulative(n)

    def survival(self, n: int) -> float:
        return self.dist.survival(n)

    def pgf(self, z: float) -> float:
        return self.dist.evaluate(z)

    def mean(self) -> float:
        return self.dist.mean()

    def hit_prob(self) -> float:
        if self.dist.residual_kind == AT_INFINITY:
            return 1.0 - self.dist.residual
        return 1.0

    def pmf_array(self, t_max: int) -> np.ndarray:
        out = np.zeros(t_max + 1)
        upto = min(t_max, self.dist.t_max)
        out[: upto + 1] = self.dist.coefficients[: upto + 1]
        return out

    def describe(self) -> str:
        return f"explicit-restart:t_max={self.dist.t_max}"


# ---------------------------------------------------------------------------
# Underlying first-passage processes
# ---------------------------------------------------------------------------


class ProcessModel:
    """A process with integer states whose first passage to a terminal set is
    the underlying time being restarted.  Subclasses are immutable."""

    def pgf(self, z: float) -> float:
        raise NotImplementedError

    def pmf(self, t_max: int | None = None) -> TruncatedPMF:
        raise NotImplementedError

    def hit_prob(self) -> float:
        """P(U < infinity)."""
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def second_factorial_moment(self) -> float:
        raise NotImplementedError

    def min_support(self) -> int:
        """Smallest n with positive first-passage mass."""
        raise NotImplementedError

    def initial_state(self):
        raise NotImplementedError

    def is_terminal(self, state) -> bool:
        raise NotImplementedError

    def step(self, state, u: float):
        """Advance one time step using the uniform draw ``u`` in [0, 1)."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class CycleTrap(ProcessModel):
    """Walk on vertices -L..M started at 0 and absorbed at -L.

    From 0 the process moves to -1 with probability p, otherwise to +1.
    Below 0 it decrements deterministically; at 1..M it increments
    deterministically, with M wrapping back to 0.
    """

    p: float
    L: int
    M: int

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")
        if not (isinstance(self.L, int) and isinstance(self.M, int)):
            raise ValueError("L and M must be integers")
        if self.L < 1 or self.M < 1:
            raise ValueError("L and M must be >= 1")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    def pgf(self, z: float) -> float:
        _check_z(z)
        return self.p * z**self.L / (1.0 - self.q * z ** (self.M + 1))

    def pmf(self, t_max: int | None = None) -> TruncatedPMF:
        period = self.M + 1
        if t_max is None:
            if self.q == 0.0:
                cycles = 0
            else:
                cycles = math.ceil(math.log(RESIDUAL_TARGET) / math.log(self.q))
            cycles = min(cycles, max(0, (MAX_TERMS - 1 - self.L) // period))
            t_max = self.L + cycles * period
        elif t_max < self.L:
            raise ValueError(f"t_max={t_max} is below the smallest support point {self.L}")
        else:
            cycles = (t_max - self.L) // period
        coeffs = np.zeros(t_max + 1)
        coeffs[self.L : self.L + cycles * period + 1 : period] = self.p * self.q ** np.arange(
            cycles + 1
        )
        residual = self.q ** (cycles + 1)
        return TruncatedPMF(coeffs, residual=residual, residual_kind=TRUNCATION)

    def hit_prob(self) -> float:
        return 1.0

    def mean(self) -> float:
        return self.L + (self.q / self.p) * (self.M + 1)

    def second_factorial_moment(self) -> float:
        qp = self.q / self.p
        period = self.M + 1
        return (
            self.L * (self.L - 1)
            + period * (2 * self.L - 1) * qp
            + period**2 * self.q * (1.0 + self.q) / self.p**2
        )

    def min_support(self) -> int:
        return self.L

    def initial_state(self) -> int:
        return 0

    def is_terminal(self, state: int) -> bool:
        return state == -self.L

    def step(self, state: int, u: float) -> int:
        if state == -self.L:
            raise ValueError("cannot step a terminal state")
        if state == 0:
            return -1 if u < self.p else 1
        if state < 0:
            return state - 1
        if state == self.M:
            return 0
        return state + 1

    def describe(self) -> str:
        return f"cycle-trap:p={self.p!r},L={self.L},M={self.M}"


@dataclass(frozen=True)
class BiasedWalk(ProcessModel):
    """Nearest-neighbour walk on the nonnegative integers started at m,
    absorbed at 0; each step moves down with probability p, up with q = 1-p."""

    p: float
    m: int

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie strictly inside (0, 1)")
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError("m must be an integer >= 1")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    def pgf(self, z: float) -> float:
        _check_z(z)
        if z == 0.0:
            return 0.0
        # (1 - sqrt(1-4pq z^2)) / (2qz) rationalized to avoid cancellation
        # at small z and at the branch point.
        root = _clamped_sqrt(1.0 - 4.0 * self.p * self.q * z * z)
        return (2.0 * self.p * z / (1.0 + root)) ** self.m

    def _mass_at(self, k: int) -> float:
        # u(m+2k) = m p^m (pq)^k C(m+2k, k) / (m+2k), binomial in log space.
        n = self.m + 2 * k
        log_mass = (
            math.log(self.m)
            + self.m * math.log(self.p)
            + (k * math.log(self.p * self.q) if k else 0.0)
            + math.lgamma(n + 1)
            - math.lgamma(k + 1)
            - math.lgamma(n - k + 1)
            - math.log(n)
        )
        return math.exp(log_mass)

    def pmf(self, t_max: int | None = None) -> TruncatedPMF:
        hit = self.hit_prob()
        if t_max is None:
            k_cap = (MAX_TERMS - 1 - self.m) // 2
            masses = []
            acc = 0.0
            for k in range(k_cap + 1):
                masses.append(self._mass_at(k))
                acc += masses[-1]
                if acc >= hit - RESIDUAL_TARGET:
                    break
            t_max = self.m + 2 * (len(masses) - 1)
        elif t_max < self.m:
            raise ValueError(f"t_max={t_max} is below the smallest support point {self.m}")
        else:
            masses = [self._mass_at(k) for k in range((t_max - self.m) // 2 + 1)]
        coeffs = np.zeros(t_max + 1)
        coeffs[self.m : self.m + 2 * len(masses) : 2] = masses
        residual = max(0.0, 1.0 - math.fsum(masses))
        kind = AT_INFINITY if self.p <= self.q else TRUNCATION
        return TruncatedPMF(coeffs, residual=residual, residual_kind=kind)

    def hit_prob(self) -> float:
        if self.p >= self.q:
            return 1.0
        return (self.p / self.q) ** self.m

    def mean(self) -> float:
        if self.p <= self.q:
            return math.inf
        return self.m / (self.p - self.q)

    def second_factorial_moment(self) -> float:
        if self.p <= self.q:
            return math.inf
        drift = self.p - self.q
        return self.m * (self.m - 1) / drift**2 + 2.0 * self.m * self.q * (
            2.0 * drift + 1.0
        ) / drift**3

    def min_support(self) -> int:
        return self.m

    def initial_state(self) -> int:
        return self.m

    def is_terminal(self, state: int) -> bool:
        return state == 0

    def step(self, state: int, u: float) -> int:
        if state == 0:
            raise ValueError("cannot step a terminal state")
        return state - 1 if u < self.p else state + 1

    def describe(self) -> str:
        return f"brw:p={self.p!r},m={self.m}"


class _CountdownMixin:
    """Trajectory semantics for models defined directly by a hitting-time
    distribution: the first step draws the total time, later steps count it
    down, so each step still advances the clock by exactly one."""

    def initial_state(self):
        return None

    def is_terminal(self, state) -> bool:
        return state == 0

    def step(self, state, u: float):
        if state is None:
            return self._draw_total(u) - 1
        if state == 0:
            raise ValueError("cannot step a terminal state")
        return state - 1


@dataclass(frozen=True)
class TwoPoint(_CountdownMixin, ProcessModel):
    """Hitting time equal to t1 with probability w1, else t2."""

    t1: int
    w1: float
    t2: int

    def __post_init__(self) -> None:
        if not (isinstance(self.t1, int) and isinstance(self.t2, int)):
            raise ValueError("t1 and t2 must be integers")
        if self.t1 < 1 or self.t2 < 1:
            raise ValueError("support points must be >= 1")
        if not 0.0 <= self.w1 <= 1.0:
            raise ValueError("w1 must lie in [0, 1]")

    def pgf(self, z: float) -> float:
        _check_z(z)
        return self.w1 * z**self.t1 + (1.0 - self.w1) * z**self.t2

    def pmf(self, t_max: int | None = None) -> TruncatedPMF:
        top = max(self.t1, self.t2)
        if t_max is None:
            t_max = top
        elif t_max < self.min_support():
            raise ValueError(f"t_max={t_max} is below the smallest support point")
        coeffs = np.zeros(max(t_max, top) + 1)
        coeffs[self.t1] += self.w1
        coeffs[self.t2] += 1.0 - self.w1
        residual = math.fsum(coeffs[t_max + 1 :])
        return TruncatedPMF(coeffs[: t_max + 1], residual=residual, residual_kind=TRUNCATION)

    def hit_prob(self) -> float:
        return 1.0

    def mean(self) -> float:
        return self.w1 * self.t1 + (1.0 - self.w1) * self.t2

    def second_factorial_moment(self) -> float:
        return self.w1 * self.t1 * (self.t1 - 1) + (1.0 - self.w1) * self.t2 * (self.t2 - 1)

    def min_support(self) -> int:
        points = [t for t, w in ((self.t1, self.w1), (self.t2, 1.0 - self.w1)) if w > 0.0]
        return min(points) if points else self.t1

    def _draw_total(self, u: float) -> int:
        return self.t1 if u < self.w1 else self.t2

    def describe(self) -> str:
        return f"two-point:t1={self.t1},w1={self.w1!r},t2={self.t2}"


@dataclass(frozen=True, eq=False)
class ExplicitProcess(_CountdownMixin, ProcessModel):
    """Underlying process defined directly by an arbitrary hitting-time PMF."""

    dist: TruncatedPMF
    _cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.dist.coefficients[0] != 0.0:
            raise ValueError("hitting-time PMF must place zero mass at n=0")
        cdf = np.cumsum(self.dist.coefficients)
        cdf.setflags(write=False)
        object.__setattr__(self, "_cdf", cdf)

    def pgf(self, z: float) -> float:
        return self.dist.evaluate(z)

    def pmf(self, t_max: int | None = None) -> TruncatedPMF:
        if t_max is None or t_max == self.dist.t_max:
            return self.dist
        if t_max < self.min_support():
            raise ValueError(f"t_max={t_max} is below the smallest support point")
        if t_max > self.dist.t_max:
            coeffs = np.zeros(t_max + 1)
            coeffs[: self.dist.t_max + 1] = self.dist.coefficients
            return TruncatedPMF(coeffs, residual=self.dist.residual,
                                residual_kind=self.dist.residual_kind)
        dropped = math.fsum(self.dist.coefficients[t_max + 1 :])
        # Folding finite-time mass into the residual forces the truncation tag
        # unless everything dropped was already at infinity.
        kind = self.dist.residual_kind if dropped == 0.0 else TRUNCATION
        return TruncatedPMF(self.dist.coefficients[: t_max + 1],
                            residual=self.dist.residual + dropped, residual_kind=kind)

    def hit_prob(self) -> float:
        if self.dist.residual_kind == AT_INFINITY:
            return 1.0 - self.dist.residual
        return 1.0

    def mean(self) -> float:
        return self.dist.mean()

    def second_factorial_moment(self) -> float:
        return self.dist.second_factorial_moment()

    def min_support(self) -> int:
        nonzero = np.nonzero(self.dist.coefficients)[0]
        if nonzero.size == 0:
            raise ValueError("hitting-time PMF has empty finite support")
        return int(nonzero[0])

    def _draw_total(self, u: float):
        idx = int(np.searchsorted(self._cdf, u, side="right"))
        if idx > self.dist.t_max:
            return math.inf
        return idx

    def describe(self) -> str:
        return f"explicit:t_max={self.dist.t_max}"
