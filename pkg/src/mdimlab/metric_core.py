"""Points, metric expression trees, gauges and Bowen distances.

Cantor and sequence points are finite truncations.  Every metric evaluation
carries an error bound for the unresolved tail; ``check_threshold`` turns a
comparison that falls inside that bound into a ``PrecisionWarning``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .errors import (
    DomainError,
    PrecisionWarning,
    StructuralError,
    ValidationError,
)

DEFAULT_DEPTH = 64


# ---------------------------------------------------------------- points

@dataclass(frozen=True)
class IntervalPoint:
    x: float

    def __post_init__(self):
        x = float(self.x)
        if not (0.0 <= x <= 1.0):
            raise ValidationError(f"interval point {x!r} outside [0, 1]")
        object.__setattr__(self, "x", x)


@dataclass(frozen=True)
class CantorPoint:
    """Truncation of a {0,2}-sequence; coordinates are 1-indexed in formulas."""

    word: tuple

    def __post_init__(self):
        word = tuple(int(c) for c in self.word)
        if not word:
            raise ValidationError("CantorPoint needs depth >= 1")
        if any(c not in (0, 2) for c in word):
            raise ValidationError(f"symbols must be 0 or 2, got {word}")
        object.__setattr__(self, "word", word)

    @property
    def depth(self) -> int:
        return len(self.word)

    @classmethod
    def zeros(cls, depth: int = DEFAULT_DEPTH) -> "CantorPoint":
        return cls((0,) * depth)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "CantorPoint":
        return cls(tuple(2 * int(b) for b in bits))


@dataclass(frozen=True)
class SeqPoint:
    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValidationError("SeqPoint needs depth >= 1")
        kinds = {type(e) for e in entries}
        if len(kinds) != 1:
            raise ValidationError("SeqPoint entries must share one variant")
        depths = {getattr(e, "depth", None) for e in entries}
        if len(depths) != 1:
            raise ValidationError("SeqPoint entries must share one depth")
        object.__setattr__(self, "entries", entries)

    @property
    def depth(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class PairPoint:
    """Point of a product space, used with ProductMax."""

    left: Any
    right: Any


# ---------------------------------------------------------------- gauges

class GaugeSpec:
    """Base class for gauges g on [0, rho]."""

    rho: float

    def _raw(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self._raw(t)

    def to_dict(self) -> dict:
        raise NotImplementedError


def _check_rho(rho):
    rho = float(rho)
    if not rho > 0 or not math.isfinite(rho):
        raise ValidationError(f"gauge domain bound must be > 0, got {rho}")
    return rho


@dataclass(frozen=True)
class Power(GaugeSpec):
    a: float
    rho: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.a <= 1.0):
            raise ValidationError(f"Power exponent must be in (0, 1], got {self.a}")
        object.__setattr__(self, "rho", _check_rho(self.rho))

    def _raw(self, t):
        return np.power(t, self.a) if isinstance(t, np.ndarray) else float(t) ** self.a

    def to_dict(self):
        return {"form": "power", "a": self.a, "rho": self.rho}


@dataclass(frozen=True)
class LogOnePlus(GaugeSpec):
    rho: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rho", _check_rho(self.rho))

    def _raw(self, t):
        return np.log1p(t) if isinstance(t, np.ndarray) else math.log1p(t)

    def to_dict(self):
        return {"form": "log1p", "rho": self.rho}


@dataclass(frozen=True)
class LogOnePlusPower(GaugeSpec):
    a: float
    rho: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.a <= 1.0):
            raise ValidationError(f"exponent must be in (0, 1], got {self.a}")
        object.__setattr__(self, "rho", _check_rho(self.rho))

    def _raw(self, t):
        if isinstance(t, np.ndarray):
            return np.log1p(np.power(t, self.a))
        return math.log1p(float(t) ** self.a)

    def to_dict(self):
        return {"form": "log1p_power", "a": self.a, "rho": self.rho}


@dataclass(frozen=True, eq=False)
class Tabulated(GaugeSpec):
    """Gauge given by samples (x_i, g(x_i)), linearly interpolated.

    The first sample must be (0, 0).  With ``strict=True`` the samples are
    also required to be subadditive on the grid; ``strict=False`` keeps only
    the checks needed for evaluation so that non-members can be inspected.
    """

    xs: tuple
    ys: tuple
    rho: float | None = None
    strict: bool = True

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValidationError("tabulated gauge needs >= 2 matching samples")
        if xs[0] != 0.0 or ys[0] != 0.0:
            raise ValidationError("tabulated gauge must start at (0, 0)")
        if np.any(np.diff(xs) <= 0):
            raise ValidationError("tabulated abscissae must be strictly increasing")
        if np.any(np.diff(ys) <= 0):
            raise ValidationError("tabulated gauge must be strictly increasing")
        rho = xs[-1] if self.rho is None else _check_rho(self.rho)
        if rho > xs[-1]:
            raise ValidationError("rho exceeds the tabulated range")
        object.__setattr__(self, "xs", tuple(xs.tolist()))
        object.__setattr__(self, "ys", tuple(ys.tolist()))
        object.__setattr__(self, "rho", float(rho))
        object.__setattr__(self, "_x", xs)
        object.__setattr__(self, "_y", ys)
        if self.strict:
            bad = tabulated_subadditivity_violation(self)
            if bad is not None:
                raise ValidationError(
                    f"tabulated gauge not subadditive at x={bad[0]:.6g}, y={bad[1]:.6g}")

    @classmethod
    def from_function(cls, fn, xs, rho=None, strict=True) -> "Tabulated":
        xs = [0.0] + [float(x) for x in xs if x > 0]
        ys = [0.0] + [float(fn(x)) for x in xs[1:]]
        return cls(tuple(xs), tuple(ys), rho=rho, strict=strict)

    def _raw(self, t):
        out = np.interp(t, self._x, self._y)
        return out if isinstance(t, np.ndarray) else float(out)

    def __eq__(self, other):
        return (isinstance(other, Tabulated) and self.xs == other.xs
                and self.ys == other.ys and self.rho == other.rho)

    def __hash__(self):
        return hash((self.xs, self.ys, self.rho))

    def to_dict(self):
        return {"form": "tabulated", "samples": [list(p) for p in zip(self.xs, self.ys)],
                "rho": self.rho, "strict": self.strict}


def tabulated_subadditivity_violation(g: GaugeSpec, grid=None):
    """Return the first grid pair (x, y) with g(x+y) > g(x)+g(y), else None."""
    if grid is None:
        grid = np.asarray(g.xs if isinstance(g, Tabulated) else [], dtype=float)
    grid = np.asarray(grid, dtype=float)
    grid = grid[(grid > 0) & (grid <= g.rho)]
    if grid.size == 0:
        return None
    gv = np.asarray(g(grid), dtype=float)
    s = grid[:, None] + grid[None, :]
    ok = s <= g.rho
    gs = np.asarray(g(np.minimum(s, g.rho)), dtype=float)
    # relative slack absorbs interpolation rounding only
    slack = 1e-12 * (gv[:, None] + gv[None, :])
    viol = ok & (gs > gv[:, None] + gv[None, :] + slack)
    if not viol.any():
        return None
    i, j = np.argwhere(viol)[0]
    return float(grid[i]), float(grid[j])


def gauge_eval(g: GaugeSpec, t: float) -> float:
    """Evaluate g at t, rejecting t outside [0, rho]."""
    t = float(t)
    if not (0.0 <= t <= g.rho * (1 + 1e-12)):
        raise DomainError(f"gauge argument {t!r} outside [0, {g.rho}]")
    return float(g(min(t, g.rho)))


def gauge_from_dict(d: dict) -> GaugeSpec:
    form = d.get("form")
    rho = d.get("rho", 1.0)
    if form == "power":
        return Power(float(d["a"]), rho)
    if form == "log1p":
        return LogOnePlus(rho)
    if form == "log1p_power":
        return LogOnePlusPower(float(d["a"]), rho)
    if form == "tabulated":
        samples = d["samples"]
        return Tabulated(tuple(s[0] for s in samples), tuple(s[1] for s in samples),
                         rho=d.get("rho"), strict=True)
    raise ValidationError(f"unknown gauge form {form!r}")


# ---------------------------------------------------------------- homeomorphisms

@dataclass(frozen=True)
class PowerHomeo:
    """x -> x**p on [0, 1]."""

    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValidationError("PowerHomeo exponent must be > 0")

    def apply(self, pt):
        if not isinstance(pt, IntervalPoint):
            raise StructuralError("PowerHomeo acts on IntervalPoint")
        return IntervalPoint(pt.x ** self.p)

    def apply_array(self, xs):
        return np.power(xs, self.p)

    def to_dict(self):
        return {"map": "power", "p": self.p}


@dataclass(frozen=True)
class IdentityHomeo:
    def apply(self, pt):
        return pt

    def apply_array(self, xs):
        return xs

    def to_dict(self):
        return {"map": "identity"}


def homeo_from_dict(d: dict):
    if d.get("map") == "power":
        return PowerHomeo(float(d["p"]))
    if d.get("map") == "identity":
        return IdentityHomeo()
    raise ValidationError(f"unknown homeomorphism {d.get('map')!r}")


# ---------------------------------------------------------------- metrics

def _monotone_err(fn, v, e):
    if e == 0.0:
        return 0.0
    fv = fn(v)
    return max(fn(v + e) - fv, fv - fn(max(v - e, 0.0)))


@lru_cache(maxsize=256)
def cantor_weights(alpha: float, depth: int) -> np.ndarray:
    """w_m = 2 * alpha**-m for m = 1..depth (|x_m - y_m| is 0 or 2)."""
    return 2.0 * np.power(float(alpha), -np.arange(1, depth + 1, dtype=float))


def cantor_tail(alpha: float, depth: int) -> float:
    return 2.0 * float(alpha) ** (-depth) / (alpha - 1.0)


class MetricSpec:
    """Base class of metric expression nodes."""

    def _eval(self, x, y) -> tuple[float, float]:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class UnaryMonotone(MetricSpec):
    """Node whose value is an increasing function of its inner metric."""

    inner: MetricSpec

    def transform(self, v):
        raise NotImplementedError

    def _eval(self, x, y):
        v, e = self.inner._eval(x, y)
        return float(self.transform(v)), _monotone_err(self.transform, v, e)

    def diameter(self):
        return float(self.transform(self.inner.diameter()))


@dataclass(frozen=True)
class Euclid1D(MetricSpec):
    def _eval(self, x, y):
        if not (isinstance(x, IntervalPoint) and isinstance(y, IntervalPoint)):
            raise StructuralError("Euclid1D expects IntervalPoint arguments")
        return abs(x.x - y.x), 0.0

    def diameter(self):
        return 1.0

    def to_dict(self):
        return {"node": "euclid"}


@dataclass(frozen=True)
class CantorAlpha(MetricSpec):
    """d(x, y) = sum_m alpha**-m |x_m - y_m| over the common prefix."""

    alpha: float

    def __post_init__(self):
        if not float(self.alpha) > 1.0:
            raise ValidationError(f"alpha must be > 1, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    def _eval(self, x, y):
        if not (isinstance(x, CantorPoint) and isinstance(y, CantorPoint)):
            raise StructuralError("CantorAlpha expects CantorPoint arguments")
        depth = min(x.depth, y.depth)
        w = cantor_weights(self.alpha, depth)
        terms = [w[m] for m in range(depth) if x.word[m] != y.word[m]]
        return math.fsum(terms), cantor_tail(self.alpha, depth)

    def diameter(self):
        return 2.0 / (self.alpha - 1.0)

    def to_dict(self):
        return {"node": "cantor", "alpha": self.alpha}


@dataclass(frozen=True)
class SeqWeighted(MetricSpec):
    """sum_{i>=1} 2**-i d(x_i, y_i) over a truncated sequence."""

    inner: MetricSpec

    def _eval(self, x, y):
        if not (isinstance(x, SeqPoint) and isinstance(y, SeqPoint)):
            raise StructuralError("SeqWeighted expects SeqPoint arguments")
        depth = min(x.depth, y.depth)
        vals, errs = [], []
        for i in range(depth):
            v, e = self.inner._eval(x.entries[i], y.entries[i])
            vals.append(v * 2.0 ** -(i + 1))
            errs.append(e * 2.0 ** -(i + 1))
        tail = self.inner.diameter() * 2.0 ** -depth
        return math.fsum(vals), math.fsum(errs) + tail

    def diameter(self):
        return self.inner.diameter()

    def to_dict(self):
        return {"node": "seq", "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class Snowflake(UnaryMonotone):
    inner: MetricSpec
    a: float

    def __post_init__(self):
        if not (0.0 < self.a <= 1.0):
            raise ValidationError(f"snowflake exponent must be in (0, 1], got {self.a}")

    def transform(self, v):
        return np.power(v, self.a) if isinstance(v, np.ndarray) else float(v) ** self.a

    def to_dict(self):
        return {"node": "snowflake", "a": self.a, "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class TruncSnowflake(UnaryMonotone):
    """d where d >= eps, eps**(1-a) * d**a below eps."""

    inner: MetricSpec
    a: float
    eps: float

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ValidationError(f"truncated snowflake needs a in (0, 1), got {self.a}")
        if not (0.0 < self.eps < self.inner.diameter()):
            raise ValidationError(f"eps must be in (0, diameter), got {self.eps}")

    def transform(self, v):
        c = self.eps ** (1.0 - self.a)
        if isinstance(v, np.ndarray):
            return np.where(v >= self.eps, v, c * np.power(v, self.a))
        v = float(v)
        return v if v >= self.eps else c * v ** self.a

    def to_dict(self):
        return {"node": "trunc_snowflake", "a": self.a, "eps": self.eps,
                "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class Gauge(UnaryMonotone):
    inner: MetricSpec
    gauge: GaugeSpec

    def __post_init__(self):
        if self.inner.diameter() > self.gauge.rho * (1 + 1e-12):
            raise ValidationError(
                f"inner diameter {self.inner.diameter():.6g} exceeds gauge rho {self.gauge.rho}")

    def transform(self, v):
        if isinstance(v, np.ndarray):
            return self.gauge(np.minimum(v, self.gauge.rho))
        return gauge_eval(self.gauge, min(float(v), self.gauge.rho))

    def to_dict(self):
        return {"node": "gauge", "gauge": self.gauge.to_dict(), "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class Pullback(MetricSpec):
    """d_h(x, y) = d(h(x), h(y))."""

    inner: MetricSpec
    homeo: Any

    def _eval(self, x, y):
        return self.inner._eval(self.homeo.apply(x), self.homeo.apply(y))

    def diameter(self):
        return self.inner.diameter()

    def to_dict(self):
        return {"node": "pullback", "homeo": self.homeo.to_dict(), "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class ProductMax(MetricSpec):
    left: MetricSpec
    right: MetricSpec

    def _eval(self, x, y):
        if not (isinstance(x, PairPoint) and isinstance(y, PairPoint)):
            raise StructuralError("ProductMax expects PairPoint arguments")
        v1, e1 = self.left._eval(x.left, y.left)
        v2, e2 = self.right._eval(x.right, y.right)
        return max(v1, v2), max(e1, e2)

    def diameter(self):
        return max(self.left.diameter(), self.right.diameter())

    def to_dict(self):
        return {"node": "product_max", "left": self.left.to_dict(), "right": self.right.to_dict()}


def metric_from_dict(d: dict) -> MetricSpec:
    node = d.get("node")
    try:
        if node == "euclid":
            return Euclid1D()
        if node == "cantor":
            return CantorAlpha(float(d["alpha"]))
        if node == "seq":
            return SeqWeighted(metric_from_dict(d["inner"]))
        if node == "snowflake":
            return Snowflake(metric_from_dict(d["inner"]), float(d["a"]))
        if node == "trunc_snowflake":
            return TruncSnowflake(metric_from_dict(d["inner"]), float(d["a"]), float(d["eps"]))
        if node == "gauge":
            return Gauge(metric_from_dict(d["inner"]), gauge_from_dict(d["gauge"]))
        if node == "pullback":
            return Pullback(metric_from_dict(d["inner"]), homeo_from_dict(d["homeo"]))
        if node == "product_max":
            return ProductMax(metric_from_dict(d["left"]), metric_from_dict(d["right"]))
    except KeyError as exc:
        raise ValidationError(f"metric node {node!r} missing field {exc}") from None
    raise ValidationError(f"unknown metric node {node!r}")


# ---------------------------------------------------------------- evaluation

def eval_metric(m: MetricSpec, x, y) -> float:
    return m._eval(x, y)[0]


def eval_metric_with_error(m: MetricSpec, x, y) -> tuple[float, float]:
    """Return (value, truncation error bound)."""
    return m._eval(x, y)


def check_threshold(value: float, err: float, eps: float) -> bool:
    """Return value > eps, warning when the tail bound makes it undecidable."""
    if err > 0 and abs(value - eps) <= err:
        warnings.warn(
            f"distance {value:.6g} within truncation error {err:.3g} of threshold {eps:.6g}",
            PrecisionWarning, stacklevel=2)
    return value > eps


def orbit(sys, x, n: int) -> list:
    """x, f(x), ..., f^{n-1}(x)."""
    if n < 1:
        raise ValidationError("orbit length must be >= 1")
    out = [x]
    for _ in range(n - 1):
        out.append(sys.apply(out[-1]))
    return out


def bowen_distance_with_error(sys, m: MetricSpec, n: int, x, y) -> tuple[float, float]:
    best, err = 0.0, 0.0
    for u, v in zip(orbit(sys, x, n), orbit(sys, y, n)):
        val, e = m._eval(u, v)
        best = max(best, val)
        err = max(err, e)
    return best, err


def bowen_distance(sys, m: MetricSpec, n: int, x, y) -> float:
    """d_n(x, y) = max_{0<=j<n} d(f^j x, f^j y)."""
    return bowen_distance_with_error(sys, m, n, x, y)[0]


def sup_metric_distance(m1: MetricSpec, m2: MetricSpec, sample: Sequence) -> float:
    """Largest |m1 - m2| over sample pairs; a lower bound for the sup-distance."""
    sample = list(sample)
    if not sample:
        raise ValidationError("sup_metric_distance needs a nonempty sample")
    best = 0.0
    for i, x in enumerate(sample):
        for y in sample[i + 1:]:
            best = max(best, abs(eval_metric(m1, x, y) - eval_metric(m2, x, y)))
    return best
