"""Separated, spanning and cover counts on finite samples.

Distances can be given as a callable ``dist(x, y)``, a square array, or a
``Pairwise`` bundle that also carries per-pair truncation error bounds.
Separation is strict (> eps) and spanning is strict (< eps); all scans run in
input order so every count is reproducible.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import PrecisionWarning, SizeError, StructuralError, ValidationError
from .metric_core import (
    CantorAlpha,
    CantorPoint,
    Euclid1D,
    IntervalPoint,
    MetricSpec,
    PairPoint,
    ProductMax,
    Pullback,
    UnaryMonotone,
    bowen_distance_with_error,
    cantor_tail,
    cantor_weights,
    orbit,
)

ORACLE_CAP = 32


@dataclass
class Pairwise:
    """Distance matrix with an error bound per entry (scalar or array)."""

    D: np.ndarray
    E: np.ndarray | float = 0.0

    def __post_init__(self):
        self.D = np.asarray(self.D, dtype=float)
        if self.D.ndim != 2 or self.D.shape[0] != self.D.shape[1]:
            raise ValidationError("distance matrix must be square")

    @property
    def size(self):
        return self.D.shape[0]

    def subset(self, idx) -> "Pairwise":
        idx = np.asarray(idx, dtype=int)
        E = self.E if np.isscalar(self.E) else self.E[np.ix_(idx, idx)]
        return Pairwise(self.D[np.ix_(idx, idx)], E)


# ---------------------------------------------------------------- matrices

def _unwrap(metric):
    chain = []
    while isinstance(metric, UnaryMonotone):
        chain.append(metric)
        metric = metric.inner
    return chain, metric


def _apply_chain(chain, D, E):
    for node in reversed(chain):
        f = node.transform
        fD = f(D)
        if np.isscalar(E) and E == 0.0:
            D = fD
            continue
        up = f(D + E) - fD
        down = fD - f(np.maximum(D - E, 0.0))
        E = np.maximum(up, down)
        D = fD
    return D, E


def _interval_orbits(sys, points, n):
    xs = np.array([p.x for p in points], dtype=float)
    cols = [xs]
    step = getattr(sys, "apply_array", None)
    for _ in range(n - 1):
        if step is not None:
            xs = step(xs)
        else:
            xs = np.array([sys.apply(IntervalPoint(x)).x for x in xs])
        cols.append(xs)
    return np.stack(cols, axis=1)


def bowen_pairwise(sys, metric: MetricSpec, n: int, points: Sequence) -> Pairwise:
    """All pairwise d_n distances, using compiled kernels where the tree allows."""
    points = list(points)
    if n < 1:
        raise ValidationError("Bowen length must be >= 1")
    if not points:
        raise ValidationError("empty sample")
    chain, base = _unwrap(metric)
    first = points[0]
    if isinstance(base, CantorAlpha) and isinstance(first, CantorPoint):
        from .symbolic import encode_orbits

        bits, lengths = encode_orbits(sys, points, n)
        D = kernels.cantor_bowen_matrix(bits, lengths, cantor_weights(base.alpha, bits.shape[2]))
        E = np.zeros_like(D)
        for t in range(n):
            common = np.minimum.outer(lengths[:, t], lengths[:, t])
            np.maximum(E, cantor_tail(base.alpha, 1) * np.power(base.alpha, 1.0 - common), out=E)
        return Pairwise(*_apply_chain(chain, D, E))
    if isinstance(first, IntervalPoint) and (
            isinstance(base, Euclid1D)
            or (isinstance(base, Pullback) and isinstance(base.inner, Euclid1D)
                and hasattr(base.homeo, "apply_array"))):
        orbits = _interval_orbits(sys, points, n)
        if isinstance(base, Pullback):
            orbits = base.homeo.apply_array(orbits)
        D = kernels.interval_bowen_matrix(orbits)
        return Pairwise(*_apply_chain(chain, D, 0.0))
    if isinstance(base, ProductMax) and isinstance(first, PairPoint) and hasattr(sys, "left"):
        left = bowen_pairwise(sys.left, base.left, n, [p.left for p in points])
        right = bowen_pairwise(sys.right, base.right, n, [p.right for p in points])
        D = np.maximum(left.D, right.D)
        E = np.maximum(left.E, right.E)
        return Pairwise(*_apply_chain(chain, D, E))
    return _generic_pairwise(sys, metric, n, points)


def _generic_pairwise(sys, metric, n, points):
    size = len(points)
    D = np.zeros((size, size))
    E = np.zeros((size, size))
    for i in range(size):
        for j in range(i, size):
            v, e = bowen_distance_with_error(sys, metric, n, points[i], points[j])
            D[i, j] = D[j, i] = v
            E[i, j] = E[j, i] = e
    return Pairwise(D, E)


def _resolve(points, dist) -> Pairwise:
    if isinstance(dist, Pairwise):
        pw = dist
    elif isinstance(dist, np.ndarray):
        pw = Pairwise(dist)
    elif callable(dist):
        pts = list(points)
        size = len(pts)
        D = np.zeros((size, size))
        for i in range(size):
            for j in range(i + 1, size):
                D[i, j] = D[j, i] = float(dist(pts[i], pts[j]))
        pw = Pairwise(D)
    else:
        raise StructuralError("dist must be a callable, an array or a Pairwise")
    if points is not None and len(points) != pw.size:
        raise ValidationError("distance matrix does not match the sample size")
    if pw.size == 0:
        raise ValidationError("empty sample")
    return pw


def _warn_ties(pw: Pairwise, eps: float):
    E = pw.E
    if np.isscalar(E) and E == 0.0:
        return
    close = np.abs(pw.D - eps) <= E
    np.fill_diagonal(close, False)
    if close.any():
        warnings.warn(f"{int(close.sum()) // 2} pair(s) within truncation error of eps={eps:.6g}",
                      PrecisionWarning, stacklevel=3)


# ---------------------------------------------------------------- counts

def greedy_separated(points, dist, eps: float) -> tuple[int, list]:
    """First-fit maximal eps-separated subset; returns (count, witnesses)."""
    if not eps > 0:
        raise ValidationError("eps must be > 0")
    pw = _resolve(points, dist)
    _warn_ties(pw, eps)
    idx = kernels.first_fit(pw.D, eps)
    pts = list(points) if points is not None else list(range(pw.size))
    return len(idx), [pts[i] for i in idx]


def greedy_separated_indices(pw: Pairwise, eps: float) -> list[int]:
    _warn_ties(pw, eps)
    return kernels.first_fit(pw.D, eps)


def exact_max_separated(points, dist, eps: float) -> int:
    """Maximum eps-separated cardinality (max clique of the '> eps' graph)."""
    pw = _resolve(points, dist)
    if pw.size > ORACLE_CAP:
        raise SizeError(f"exact oracle is capped at {ORACLE_CAP} points, got {pw.size}; "
                        "use greedy_separated")
    _warn_ties(pw, eps)
    adj = pw.D > eps
    np.fill_diagonal(adj, False)
    return int(kernels.max_clique(adj))


def greedy_spanning(points, dist, eps: float) -> tuple[int, list]:
    """Greedy set cover of the sample by open eps-balls; returns (count, centers)."""
    if not eps > 0:
        raise ValidationError("eps must be > 0")
    pw = _resolve(points, dist)
    _warn_ties(pw, eps)
    cover = pw.D < eps
    np.fill_diagonal(cover, True)
    idx = kernels.greedy_set_cover(cover)
    pts = list(points) if points is not None else list(range(pw.size))
    return len(idx), [pts[i] for i in idx]


@dataclass(frozen=True)
class Ball:
    center: int
    radius: float
    members: tuple
    diameter: float


def _diam_upper(pw: Pairwise, members) -> float:
    idx = np.asarray(members, dtype=int)
    sub = pw.D[np.ix_(idx, idx)]
    if np.isscalar(pw.E):
        return float(sub.max() + pw.E)
    return float((sub + pw.E[np.ix_(idx, idx)]).max())


def greedy_ball_cover(points, dist, eps: float) -> list[Ball]:
    """Cover the sample by open balls of diameter <= eps.

    Each point proposes the ball of radius eps when its measured diameter
    (plus truncation error) stays <= eps, otherwise the ball of radius eps/2;
    the balls are then chosen by greedy set cover.
    """
    if not eps > 0:
        raise ValidationError("eps must be > 0")
    pw = _resolve(points, dist)
    size = pw.size
    cands = []
    for c in range(size):
        chosen = None
        for r in (eps, eps / 2):
            mem = np.flatnonzero(pw.D[c] < r)
            diam = _diam_upper(pw, mem)
            if diam <= eps * (1 + 1e-12):
                chosen = Ball(c, r, tuple(int(i) for i in mem), diam)
                break
        if chosen is None:
            # truncation error alone exceeds eps: keep the singleton
            chosen = Ball(c, 0.0, (c,), _diam_upper(pw, [c]))
        cands.append(chosen)
    cover = np.zeros((size, size), dtype=bool)
    for b in cands:
        cover[b.center, list(b.members)] = True
    return [cands[i] for i in kernels.greedy_set_cover(cover)]


def hausdorff_sum(diameters: Iterable[float], s: float, counts: Iterable[int] | None = None
                  ) -> float:
    """sum diam^s with 0^0 = 1; empty sets (diameter None) contribute 0."""
    if s < 0:
        raise ValidationError("s must be >= 0")
    diameters = list(diameters)
    counts = [1] * len(diameters) if counts is None else list(counts)
    terms = []
    for d, c in zip(diameters, counts):
        if d is None or c == 0:
            continue
        if d < 0:
            raise ValidationError("diameters must be >= 0")
        terms.append(c * (1.0 if s == 0 else d ** s))
    return math.fsum(terms)


# ---------------------------------------------------------------- tables

METHODS = ("exact", "greedy", "formula")
CSV_COLUMNS = ("epsilon", "n", "log_sep_lower", "log_span_upper", "log_cov_upper", "method")


@dataclass(frozen=True)
class CountRow:
    epsilon: float
    n: int
    sep_lower: float
    span_upper: float | None = None
    cov_upper: float | None = None
    method: str = "greedy"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown count method {self.method!r}")
        if self.sep_lower < 0:
            raise ValidationError("log sep lower bound must be >= 0")


def _fmt(v):
    return "" if v is None else f"{v:.9g}"


def _parse(v):
    return None if v == "" else float(v)


@dataclass
class CountTable:
    rows: list = field(default_factory=list)

    def add(self, row: CountRow):
        self.rows.append(row)
        self.rows.sort(key=lambda r: (-r.epsilon, r.n))

    def to_csv(self, header: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r.epsilon), r.n, _fmt(r.sep_lower), _fmt(r.span_upper),
                        _fmt(r.cov_upper), r.method])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CountTable":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        reader = csv.DictReader(lines)
        table = cls()
        for rec in reader:
            table.add(CountRow(float(rec["epsilon"]), int(rec["n"]), float(rec["log_sep_lower"]),
                               _parse(rec["log_span_upper"]), _parse(rec["log_cov_upper"]),
                               rec["method"]))
        return table


def count_table_for_sample(sys, metric, points, eps_list, n_values) -> CountTable:
    """Greedy separated and spanning counts for every (eps, n) cell."""
    table = CountTable()
    for n in n_values:
        pw = bowen_pairwise(sys, metric, n, points)
        for eps in eps_list:
            sep = len(greedy_separated_indices(pw, eps))
            span, _ = greedy_spanning(None, pw, eps)
            table.add(CountRow(eps, n, math.log(sep), math.log(span), None, "greedy"))
    return table
