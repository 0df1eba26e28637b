"""Lifetime distributions used by the aging/rejuvenation model.

Four families cover every timed event in the model: exponential, Erlang,
two-phase hypoexponential and a deterministic point mass (unit step CDF).
All rates are per hour and all durations are hours; the config layer is
responsible for unit normalisation.

Instances are immutable and safe to share between concurrent analyses.
Samplers draw from an externally owned ``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Distribution",
    "Exponential",
    "Erlang",
    "Hypoexponential",
    "Deterministic",
    "POINT_MASS",
    "from_json",
    "to_json",
]

# Duration units accepted in JSON fragments, as hours per unit.
_HOURS_PER_UNIT = {"s": 1.0 / 3600.0, "min": 1.0 / 60.0, "h": 1.0, "d": 24.0}


class _PointMassMarker:
    """Sentinel returned by ``density`` for deterministic laws.

    A point mass has no density; Stieltjes integrals against it must
    collapse to a single function evaluation at the offset.
    """

    def __repr__(self):  # pragma: no cover - cosmetic
        return "POINT_MASS"


POINT_MASS = _PointMassMarker()


class Distribution:
    """Common interface: cdf/survival/density/mean/lst/sample/truncation."""

    def cdf(self, t: float) -> float:
        raise NotImplementedError

    def survival(self, t: float) -> float:
        return 1.0 - self.cdf(t)

    def density(self, t: float):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def lst(self, s: float) -> float:
        """Laplace-Stieltjes transform E[exp(-s T)]."""
        raise NotImplementedError

    def lst_derivative(self, s: float) -> float:
        """d/ds E[exp(-s T)]; equals -mean at s = 0."""
        raise NotImplementedError

    def sample(self, rng, size=None):
        raise NotImplementedError

    def truncation_point(self, eps: float) -> float:
        """Smallest t with survival(t) <= eps."""
        if not 0.0 < eps < 1.0:
            raise ValueError(f"eps must be in (0,1), got {eps}")
        return self._truncation(eps)

    def _truncation(self, eps: float) -> float:
        # generic bisection against survival(); closed-form subclasses override
        hi = max(self.mean(), 1e-12)
        while self.survival(hi) > eps:
            hi *= 2.0
            if hi > 1e300:  # pragma: no cover - defensive
                raise ArithmeticError("truncation bracket overflow")
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.survival(mid) <= eps:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-12 * max(1.0, hi):
                break
        return hi


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float  # per hour

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError(f"exponential rate must be positive, got {self.rate}")

    def cdf(self, t):
        if t <= 0.0:
            return 0.0
        return -math.expm1(-self.rate * t)

    def survival(self, t):
        if t <= 0.0:
            return 1.0
        return math.exp(-self.rate * t)

    def density(self, t):
        if t < 0.0:
            return 0.0
        return self.rate * math.exp(-self.rate * t)

    def mean(self):
        return 1.0 / self.rate

    def lst(self, s):
        if s <= -self.rate:
            raise ValueError(f"LST diverges for s <= -rate ({s} <= {-self.rate})")
        return self.rate / (self.rate + s)

    def lst_derivative(self, s):
        return -self.rate / (self.rate + s) ** 2

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size=size)

    def _truncation(self, eps):
        return -math.log(eps) / self.rate


@dataclass(frozen=True)
class Erlang(Distribution):
    rate: float  # per hour, each phase
    shape: int

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError(f"erlang rate must be positive, got {self.rate}")
        if not (isinstance(self.shape, int) and self.shape >= 1):
            raise ValueError(f"erlang shape must be a positive integer, got {self.shape}")

    def cdf(self, t):
        if t <= 0.0:
            return 0.0
        return 1.0 - self.survival(t)

    def survival(self, t):
        if t <= 0.0:
            return 1.0
        # sum_{n<k} (rate t)^n/n! * exp(-rate t), accumulated stably
        x = self.rate * t
        term = 1.0
        acc = 1.0
        for n in range(1, self.shape):
            term *= x / n
            acc += term
        return acc * math.exp(-x)

    def density(self, t):
        if t < 0.0:
            return 0.0
        x = self.rate * t
        k = self.shape
        if t == 0.0:
            return self.rate if k == 1 else 0.0
        return self.rate * x ** (k - 1) / math.factorial(k - 1) * math.exp(-x)

    def mean(self):
        return self.shape / self.rate

    def lst(self, s):
        if s <= -self.rate:
            raise ValueError(f"LST diverges for s <= -rate ({s} <= {-self.rate})")
        return (self.rate / (self.rate + s)) ** self.shape

    def lst_derivative(self, s):
        return -self.shape * self.rate**self.shape / (self.rate + s) ** (self.shape + 1)

    def sample(self, rng, size=None):
        # sum of `shape` exponential phases
        if size is None:
            return rng.exponential(1.0 / self.rate, size=self.shape).sum()
        draws = rng.exponential(1.0 / self.rate, size=(size, self.shape))
        return draws.sum(axis=1)


@dataclass(frozen=True)
class Hypoexponential(Distribution):
    """Two sequential exponential phases with distinct rates.

    The equal-rate limit degenerates to an Erlang of shape 2; evaluation
    switches to the Erlang formulas when the rates are numerically equal
    to dodge the 0/0 in the two-phase closed forms.
    """

    rate1: float
    rate2: float

    def __post_init__(self):
        for r in (self.rate1, self.rate2):
            if not (r > 0.0 and math.isfinite(r)):
                raise ValueError(f"hypoexponential rates must be positive, got {r}")

    def _as_erlang(self):
        if abs(self.rate1 - self.rate2) <= 1e-9 * max(self.rate1, self.rate2):
            return Erlang(0.5 * (self.rate1 + self.rate2), 2)
        return None

    def cdf(self, t):
        if t <= 0.0:
            return 0.0
        return 1.0 - self.survival(t)

    def survival(self, t):
        if t <= 0.0:
            return 1.0
        erl = self._as_erlang()
        if erl is not None:
            return erl.survival(t)
        a, b = self.rate1, self.rate2
        return (b * math.exp(-a * t) - a * math.exp(-b * t)) / (b - a)

    def density(self, t):
        if t < 0.0:
            return 0.0
        erl = self._as_erlang()
        if erl is not None:
            return erl.density(t)
        a, b = self.rate1, self.rate2
        return a * b / (b - a) * (math.exp(-a * t) - math.exp(-b * t))

    def mean(self):
        return 1.0 / self.rate1 + 1.0 / self.rate2

    def lst(self, s):
        lo = min(self.rate1, self.rate2)
        if s <= -lo:
            raise ValueError(f"LST diverges for s <= -min rate ({s} <= {-lo})")
        return (self.rate1 / (self.rate1 + s)) * (self.rate2 / (self.rate2 + s))

    def lst_derivative(self, s):
        a, b = self.rate1, self.rate2
        fa, fb = a / (a + s), b / (b + s)
        return -fa / (a + s) * fb - fa * fb / (b + s)

    def sample(self, rng, size=None):
        if size is None:
            return rng.exponential(1.0 / self.rate1) + rng.exponential(1.0 / self.rate2)
        return rng.exponential(1.0 / self.rate1, size=size) + rng.exponential(
            1.0 / self.rate2, size=size
        )


@dataclass(frozen=True)
class Deterministic(Distribution):
    """Point mass at ``offset``: CDF is the unit step u(t - offset)."""

    offset: float  # hours

    def __post_init__(self):
        if not (self.offset >= 0.0 and math.isfinite(self.offset)):
            raise ValueError(f"deterministic offset must be >= 0, got {self.offset}")

    def cdf(self, t):
        return 1.0 if t >= self.offset else 0.0

    def density(self, t):
        return POINT_MASS

    def mean(self):
        return self.offset

    def lst(self, s):
        return math.exp(-self.offset * s)

    def lst_derivative(self, s):
        return -self.offset * math.exp(-self.offset * s)

    def sample(self, rng, size=None):
        if size is None:
            return self.offset
        import numpy as np

        return np.full(size, self.offset)

    def _truncation(self, eps):
        return self.offset


_KINDS = {"exp": Exponential, "erlang": Erlang, "hypoexp": Hypoexponential, "det": Deterministic}


def from_json(fragment: dict) -> Distribution:
    """Build a distribution from its JSON fragment.

    Fragment shape: ``{"kind": "exp"|"erlang"|"hypoexp"|"det", ...params,
    "unit": "s"|"min"|"h"|"d"}``.  Rates are per ``unit`` and offsets are
    in ``unit``; both are normalised to hours here.
    """
    if not isinstance(fragment, dict):
        raise ValueError(f"distribution fragment must be an object, got {fragment!r}")
    frag = dict(fragment)
    kind = frag.pop("kind", None)
    if kind not in _KINDS:
        raise ValueError(f"unknown distribution kind {kind!r} (expected one of {sorted(_KINDS)})")
    unit = frag.pop("unit", "h")
    if unit not in _HOURS_PER_UNIT:
        raise ValueError(f"unknown unit {unit!r} (expected one of {sorted(_HOURS_PER_UNIT)})")
    hpu = _HOURS_PER_UNIT[unit]

    def need(key, convert):
        if key not in frag:
            raise ValueError(f"distribution kind {kind!r} requires field {key!r}")
        return convert(frag.pop(key))

    if kind == "exp":
        dist = Exponential(rate=need("rate", float) / hpu)
    elif kind == "erlang":
        dist = Erlang(rate=need("rate", float) / hpu, shape=need("shape", int))
    elif kind == "hypoexp":
        dist = Hypoexponential(rate1=need("rate1", float) / hpu, rate2=need("rate2", float) / hpu)
    else:
        dist = Deterministic(offset=need("offset", float) * hpu)
    if frag:
        raise ValueError(f"unknown fields {sorted(frag)} in distribution fragment")
    return dist


def to_json(dist: Distribution) -> dict:
    """Inverse of :func:`from_json`, always emitting hours."""
    if isinstance(dist, Exponential):
        return {"kind": "exp", "rate": dist.rate, "unit": "h"}
    if isinstance(dist, Erlang):
        return {"kind": "erlang", "rate": dist.rate, "shape": dist.shape, "unit": "h"}
    if isinstance(dist, Hypoexponential):
        return {"kind": "hypoexp", "rate1": dist.rate1, "rate2": dist.rate2, "unit": "h"}
    if isinstance(dist, Deterministic):
        return {"kind": "det", "offset": dist.offset, "unit": "h"}
    raise TypeError(f"not a known distribution: {dist!r}")
