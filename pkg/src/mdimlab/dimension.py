"""Dimension estimators: scale-indexed Hausdorff, box, metric mean, mean Hausdorff.

Metric mean dimension is estimated from the growth rate of separated counts
between two Bowen lengths, normalised by |log eps| and extrapolated to
eps -> 0 over the finest rungs of a ladder.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .counting import (
    CountRow,
    CountTable,
    Pairwise,
    _resolve,
    bowen_pairwise,
    greedy_ball_cover,
    greedy_separated_indices,
    hausdorff_sum,
)
from .errors import ValidationError
from .metric_core import CantorAlpha, MetricSpec, UnaryMonotone, cantor_tail
from .symbolic import (
    CantorSystem,
    constructive_cover,
    cover_count,
    eps_ladder as cantor_ladder,
    sep_lower_at,
    tail_index,
    visible_coordinates,
)
from .systems import PowerSystem

S_MAX = 4.0
DEFAULT_TOL = 1e-3
EXTRAPOLATION_WINDOW = 4
KINDS = ("mdim_M_lower", "mdim_M_upper", "mdim_H_bracket", "dim_H_at_scale", "box_dim")


@dataclass
class DimensionEstimate:
    kind: str
    per_eps: list
    extrapolated: float
    bracket: tuple | None = None
    diagnostics: dict = field(default_factory=dict)
    counts: CountTable | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown estimate kind {self.kind!r}")
        if not self.per_eps:
            raise ValidationError("an estimate needs at least one rung")
        if self.bracket is not None:
            lo, hi = self.bracket
            if not (lo - 1e-12 <= self.extrapolated <= hi + 1e-12):
                raise ValidationError("bracket must contain the extrapolated value")

    def normalised(self) -> list[tuple[float, float]]:
        """(1/|log eps|, rate/|log eps|) pairs."""
        return [(1.0 / abs(math.log(e)), r / abs(math.log(e))) for e, r in self.per_eps]

    def to_csv(self, header: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "epsilon", "rate", "extrapolated", "lo", "hi"])
        lo, hi = self.bracket if self.bracket is not None else (None, None)
        for e, r in self.per_eps:
            w.writerow([self.kind, f"{e:.9g}", f"{r:.9g}", f"{self.extrapolated:.9g}",
                        "" if lo is None else f"{lo:.9g}", "" if hi is None else f"{hi:.9g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DimensionEstimate":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        recs = list(csv.DictReader(lines))
        if not recs:
            raise ValidationError("empty estimate CSV")
        lo, hi = recs[0]["lo"], recs[0]["hi"]
        bracket = None if lo == "" else (float(lo), float(hi))
        return cls(recs[0]["kind"], [(float(r["epsilon"]), float(r["rate"])) for r in recs],
                   float(recs[0]["extrapolated"]), bracket)

    def plot_data(self) -> str:
        return "".join(f"{x:.9g} {y:.9g}\n" for x, y in self.normalised())


# ---------------------------------------------------------------- Hausdorff at scale

@dataclass(frozen=True)
class ScaleDimension:
    value: float
    lo: float
    hi: float


@dataclass(frozen=True)
class LogPiece:
    """count sets of diameter exp(log_diam); keeps deep covers finite."""

    log_diam: float
    log_count: float


def _as_log(piece) -> LogPiece:
    if isinstance(piece, LogPiece):
        return piece
    d, c = piece
    if c < 0 or d < 0:
        raise ValidationError("diameters and counts must be >= 0")
    return LogPiece(math.log(d) if d > 0 else -math.inf,
                    math.log(c) if c > 0 else -math.inf)


def _log_h_sum(cover, s: float) -> float:
    """log of sum count * diam^s, with 0^0 = 1."""
    terms = []
    for p in cover:
        if p.log_count == -math.inf:
            continue
        if s == 0:
            terms.append(p.log_count)
        elif p.log_diam > -math.inf:
            terms.append(p.log_count + s * p.log_diam)
    if not terms:
        return -math.inf
    top = max(terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def h_sum_min(covers, s: float) -> float:
    """Smallest Hausdorff sum over candidate covers; each cover is [(diam, count)]."""
    return math.exp(_log_h_min([[_as_log(p) for p in c] for c in covers], s))


def _log_h_min(covers, s):
    if not covers:
        raise ValidationError("no admissible cover")
    return min(_log_h_sum(c, s) for c in covers)


def snowflake_covers(covers, a: float) -> list:
    """Image covers under d -> d^a: same sets, diameters raised to a."""
    return [[LogPiece(a * p.log_diam, p.log_count) for p in map(_as_log, c)] for c in covers]


def dim_h_from_covers(covers, theta: float = 1.0, tol: float = DEFAULT_TOL) -> ScaleDimension:
    """sup{s in [0, 4] : min_cover sum diam^s >= theta} by bisection."""
    if not theta > 0:
        raise ValidationError("theta must be > 0")
    covers = [[_as_log(p) for p in c] for c in covers]
    log_theta = math.log(theta)
    if _log_h_min(covers, 0.0) < log_theta:
        return ScaleDimension(0.0, 0.0, 0.0)
    if any(all(p.log_diam == -math.inf for p in c) for c in covers):
        return ScaleDimension(0.0, 0.0, 0.0)  # a cover by points: every s > 0 sums to 0
    if _log_h_min(covers, S_MAX) >= log_theta:
        return ScaleDimension(S_MAX, S_MAX, S_MAX)
    lo, hi = 0.0, S_MAX
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _log_h_min(covers, mid) >= log_theta:
            lo = mid
        else:
            hi = mid
    return ScaleDimension(0.5 * (lo + hi), lo, hi)


def sample_covers(points, dist, eps: float, levels: int = 6) -> list:
    """Greedy ball covers at radii eps*2^-i whose members have diameter < eps."""
    pw = _resolve(points, dist)
    covers = []
    r = eps * (1.0 - 1e-9)
    for _ in range(levels):
        balls = greedy_ball_cover(None, pw, r)
        if all(b.diameter < eps for b in balls):
            covers.append([(b.diameter, 1) for b in balls])
        r *= 0.5
    return covers


def cantor_cylinder_covers(alpha: float, eps: float, extra: int = 1024) -> list:
    """Static cylinder covers of C with diameter < eps, `extra` levels past the threshold.

    Deep levels matter: capping the depth inflates the estimate for theta < 1.
    """
    m0 = tail_index(alpha, eps)
    log_t = math.log(2.0 / (alpha - 1.0))
    return [[LogPiece(log_t - m * math.log(alpha), m * math.log(2.0))]
            for m in range(m0, m0 + extra + 1)]


def dim_h_interval(points=None, dist=None, eps: float = 0.1, theta: float = 1.0, *,
                   covers=(), tol: float = DEFAULT_TOL, levels: int = 6) -> ScaleDimension:
    if not eps > 0:
        raise ValidationError("eps must be > 0")
    log_eps = math.log(eps)
    cands = [c for c in ([_as_log(p) for p in cv] for cv in covers)
             if all(p.log_diam < log_eps for p in c)]
    if points is not None:
        cands += sample_covers(points, dist, eps, levels)
    if not cands:
        raise ValidationError("cover construction failed: no admissible cover below eps")
    return dim_h_from_covers(cands, theta, tol)


def dim_h_at_scale(points=None, dist=None, eps: float = 0.1, theta: float = 1.0, *,
                   covers=(), tol: float = DEFAULT_TOL, levels: int = 6) -> float:
    """dim_H(M, d, eps, theta) from the best constructed covers."""
    return dim_h_interval(points, dist, eps, theta, covers=covers, tol=tol, levels=levels).value


# ---------------------------------------------------------------- sample covers

def cylinder_groups(points, m: int) -> list[list[int]]:
    """Indices of Cantor sample points grouped by their first m coordinates."""
    groups: dict = {}
    for i, p in enumerate(points):
        groups.setdefault(tuple(p.word[:m]), []).append(i)
    return list(groups.values())


def group_diameters(pw: Pairwise, groups) -> list[float]:
    out = []
    for g in groups:
        idx = np.asarray(g, dtype=int)
        sub = pw.D[np.ix_(idx, idx)]
        err = pw.E if np.isscalar(pw.E) else pw.E[np.ix_(idx, idx)].max()
        # a truncated point stands for a cylinder, so even singletons carry err
        out.append(float(sub.max() + err))
    return out


def ball_groups_from(pw: Pairwise, groups) -> list[list[int]]:
    """Closed balls B(x_E, diam E) around the first member of each set E."""
    diams = group_diameters(pw, groups)
    return [np.flatnonzero(pw.D[g[0]] <= d).tolist() for g, d in zip(groups, diams)]


@dataclass(frozen=True)
class SandwichSums:
    arbitrary: float
    balls: float
    bound: float

    @property
    def holds(self) -> bool:
        tol = 1e-12 * max(1.0, self.bound)
        return self.arbitrary <= self.balls + tol and self.balls <= self.bound + tol


def sandwich_sums(points, pw: Pairwise, eps: float, s: float, depths=range(1, 21)
                  ) -> SandwichSums:
    """H-sums over arbitrary covers at eps, ball covers at eps, and 2^s x arbitrary at eps/2.

    Arbitrary candidates are cylinder partitions and greedy ball covers of the
    sample with every diameter below the threshold; ball candidates are the
    greedy covers plus the balls built on arbitrary covers at eps/2.
    """
    points = list(points)

    def arbitrary(t):
        cands = [g for g in (cylinder_groups(points, m) for m in depths)
                 if max(group_diameters(pw, g)) < t]
        return cands + ball_covers(t)

    memo: dict = {}

    def ball_covers(t):
        if t in memo:
            return memo[t]
        out = memo[t] = []
        r = t * (1 - 1e-9)
        for _ in range(6):
            bl = greedy_ball_cover(None, pw, r)
            if all(b.diameter < t for b in bl):
                out.append([list(b.members) for b in bl])
            r *= 0.5
        return out

    def best(cands):
        if not cands:
            return math.inf
        return min(hausdorff_sum(group_diameters(pw, g), s) for g in cands)

    half = arbitrary(eps / 2)
    derived = [ball_groups_from(pw, g) for g in half]
    derived = [g for g in derived if max(group_diameters(pw, g)) < eps]
    balls = ball_covers(eps) + derived
    return SandwichSums(best(arbitrary(eps) + balls), best(balls), 2.0 ** s * best(half))


# ---------------------------------------------------------------- box dimension

def _check_ladder(ladder, min_len):
    ladder = [float(e) for e in ladder]
    if len(ladder) < min_len:
        raise ValidationError(f"ladder needs >= {min_len} rungs")
    if any(b >= a for a, b in zip(ladder, ladder[1:])) or ladder[-1] <= 0:
        raise ValidationError("ladder must be strictly decreasing and positive")
    return ladder


def line_cover_count(xs, eps: float) -> int:
    """Fewest sets of diameter <= eps covering the sorted reals xs (left-to-right sweep)."""
    count, i, size = 0, 0, len(xs)
    while i < size:
        i = int(np.searchsorted(xs, xs[i] + eps, side="right"))
        count += 1
    return count


def box_dim_estimate(points=None, dist=None, eps_ladder=(), *, counter: Callable | None = None,
                     window: int | None = None) -> DimensionEstimate:
    """Least-squares slope of log N(eps) against |log eps| over the finest rungs.

    N(eps) is the greedy ball-cover count of the sample, or ``counter(eps)``
    when an exact cover count is available.  Interval samples given without
    ``dist`` use a sorted sweep, which is optimal on the line and lets the
    grid be much finer than the smallest rung.
    """
    ladder = _check_ladder(eps_ladder, 3)
    if counter is None and dist is None and points is not None:
        xs = np.sort(np.array([p.x for p in points], dtype=float))
        counter = lambda e: line_cover_count(xs, e)  # noqa: E731
    pw = None if counter is not None else _resolve(points, dist)
    rows = []
    for e in ladder:
        n_eps = counter(e) if counter is not None else len(greedy_ball_cover(None, pw, e))
        rows.append((e, math.log(n_eps)))
    w = window or len(rows)
    xs = np.array([abs(math.log(e)) for e, _ in rows[-w:]])
    ys = np.array([v for _, v in rows[-w:]])
    slope = float(np.polyfit(xs, ys, 1)[0]) if np.ptp(ys) > 0 else 0.0
    return DimensionEstimate("box_dim", rows, max(slope, 0.0), None, {"window": w})


# ---------------------------------------------------------------- mean dimension

def extrapolate(eps_values, values, model: str = "sqrt", window: int = EXTRAPOLATION_WINDOW):
    """Intercept of values against x = 1/|log eps| (linear) or sqrt(x) (default).

    Returns (intercept, residual_rms, rungs_used).
    """
    eps_values = list(eps_values)[-window:]
    y = np.asarray(list(values)[-window:], dtype=float)
    x = np.array([1.0 / abs(math.log(e)) for e in eps_values])
    if model == "sqrt":
        x = np.sqrt(x)
    elif model != "linear":
        raise ValidationError(f"unknown extrapolation model {model!r}")
    if y.size == 1 or np.ptp(y) == 0.0:
        return float(y[-1]), 0.0, int(y.size)
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    return float(coef[1]), float(np.sqrt(np.mean(resid ** 2))), int(y.size)


def _chain_base(metric):
    chain = []
    while isinstance(metric, UnaryMonotone):
        chain.append(metric)
        metric = metric.inner
    return chain, metric


def _image(chain, e):
    for node in reversed(chain):
        e = float(node.transform(e))
    return e


def exact_rung_index(sys: CantorSystem, metric: MetricSpec, eps: float, k_max: int = 200):
    """k with chain(eps_k) == eps when the metric is monotone over d_alpha."""
    chain, base = _chain_base(metric)
    if not (isinstance(base, CantorAlpha) and base.alpha == sys.alpha):
        return None
    for k, ek in enumerate(cantor_ladder(sys, k_max), start=1):
        img = _image(chain, ek)
        if math.isclose(img, eps, rel_tol=1e-12):
            return k
        if img < eps * (1 - 1e-12):
            return None
    return None


def _exact_counts(sys, metric, ladder, n1, n2):
    """Formula counts at each rung; the chain of monotone nodes maps rungs 1:1."""
    out = []
    for e in ladder:
        k = exact_rung_index(sys, metric, e)
        if k is None:
            raise ValidationError(f"eps={e:.6g} is not an image of the system ladder; "
                                  "exact counts need ladder rungs")
        chain, base = _chain_base(metric)
        base_eps = cantor_ladder(sys, k, k)[0]
        lo = [sep_lower_at(sys, n, k) for n in (n1, n2)]
        hi = [cover_count(constructive_cover(sys, n, base_eps)) for n in (n1, n2)]
        out.append((e, base_eps, lo, hi))
    return out


def _is_tower_euclid(sys, metric) -> bool:
    from .interval import IntervalTower
    from .metric_core import Euclid1D

    return isinstance(sys, IntervalTower) and isinstance(metric, Euclid1D)


def mdim_m_estimate(sys, metric: MetricSpec, eps_ladder, n_window=(2, 6), *,
                    sample=None, model: str = "sqrt",
                    window: int = EXTRAPOLATION_WINDOW) -> DimensionEstimate:
    """Metric mean dimension from two-point growth rates along an eps ladder.

    Symbolic systems use exact formula counts: the separated family for the
    lower rate and the explicit cover for an upper rate,
    log cov(n2)/n2, which bounds lim (1/n) log cov by submultiplicativity.
    Interval towers under |.| without a sample use per-block grids of the
    conjugate tent powers.  Other systems need ``sample`` and use greedy
    separated counts.
    """
    n1, n2 = (int(v) for v in n_window)
    if not (1 <= n1 < n2):
        raise ValidationError("n_window needs 1 <= n1 < n2")
    ladder = _check_ladder(eps_ladder, 1)
    table = CountTable()
    rates, upper, base = [], [], []
    if isinstance(sys, CantorSystem) and sample is None:
        for e, be, lo, hi in _exact_counts(sys, metric, ladder, n1, n2):
            base.append(be)
            rates.append((math.log(lo[1]) - math.log(lo[0])) / (n2 - n1))
            upper.append(math.log(hi[1]) / n2)
            for n, a, b in ((n1, lo[0], hi[0]), (n2, lo[1], hi[1])):
                table.add(CountRow(e, n, math.log(a), None, math.log(b), "formula"))
        method = "formula"
    elif sample is None and _is_tower_euclid(sys, metric):
        from .interval import tower_sep_lower

        for e in ladder:
            c = {n: tower_sep_lower(sys, n, e) for n in (n1, n2)}
            rates.append((math.log(c[n2]) - math.log(c[n1])) / (n2 - n1))
            for n in (n1, n2):
                table.add(CountRow(e, n, math.log(c[n]), None, None, "greedy"))
        method = "block-grid"
    else:
        if sample is None:
            raise ValidationError("non-symbolic systems need a sample")
        mats = {n: bowen_pairwise(sys, metric, n, sample) for n in (n1, n2)}
        for e in ladder:
            c = {n: len(greedy_separated_indices(mats[n], e)) for n in (n1, n2)}
            rates.append((math.log(c[n2]) - math.log(c[n1])) / (n2 - n1))
            for n in (n1, n2):
                table.add(CountRow(e, n, math.log(c[n]), None, None, "greedy"))
        method = "greedy"
    zero_rate = all(r == 0.0 for r in rates)
    norm = [r / abs(math.log(e)) for e, r in zip(ladder, rates)]
    factor = 1.0
    if base and _chain_base(metric)[0]:
        # the rung ratios carry |log eps_base| / |log eps|, which converges much
        # faster than the rate itself; extrapolate in the base scale and apply
        # the known factor at the finest rung
        norm_base = [r / abs(math.log(b)) for b, r in zip(base, rates)]
        ext, resid, used = extrapolate(base, norm_base, model, window)
        factor = abs(math.log(base[-1])) / abs(math.log(ladder[-1]))
        ext *= factor
        resid *= factor
    else:
        ext, resid, used = extrapolate(ladder, norm, model, window)
    ext = max(ext, 0.0)
    bracket = None
    diag = {"window": used, "residual_rms": resid, "model": model, "method": method,
            "n_window": (n1, n2), "zero_rate": zero_rate,
            "finest_ratio": norm[-1], "chain_factor": factor}
    if upper:
        # log cov(n2)/n2 is certified at each rung; the finest one bounds from above
        norm_hi = [r / abs(math.log(e)) for e, r in zip(ladder, upper)]
        bracket = (ext, max(ext, norm_hi[-1]))
        diag["upper_per_eps"] = list(zip(ladder, upper))
    return DimensionEstimate("mdim_M_lower", list(zip(ladder, rates)), ext, bracket, diag, table)


# ---------------------------------------------------------------- mass distribution

def mass_dist_lower_bound(balls, s: float, total_mass: float = 1.0) -> tuple[bool, float]:
    """Check mu(B) <= diam(B)^s on every supplied (measure, diameter) ball.

    Returns (holds, worst ratio mu/diam^s).  total_mass is mu(M), which must
    be at least 1.
    """
    if total_mass < 1.0 - 1e-12:
        raise ValidationError(f"measure not normalised: mu(M) = {total_mass} < 1")
    worst = 0.0
    for mu, diam in balls:
        if mu < 0 or diam < 0:
            raise ValidationError("measures and diameters must be >= 0")
        if mu == 0:
            continue
        bound = 1.0 if s == 0 else (diam ** s if diam > 0 else 0.0)
        ratio = math.inf if bound == 0 else mu / bound
        worst = max(worst, ratio)
    return worst <= 1.0 + 1e-12, worst


def certified_exponent(balls) -> float:
    """Largest s with mu(B) <= diam(B)^s for all balls of diameter < 1."""
    best = math.inf
    for mu, diam in balls:
        if mu <= 0:
            continue
        if diam <= 0:
            return 0.0
        if diam < 1:
            best = min(best, math.log(mu) / math.log(diam))
    return best


def bernoulli_cylinder_balls(alpha: float, depths) -> list[tuple[float, float]]:
    """(mu, diam) of the length-m cylinders of C under Bernoulli(1/2)."""
    return [(2.0 ** -m, cantor_tail(alpha, m)) for m in depths]


def tower_bowen_balls(sys: CantorSystem, n: int, eps: float, block: int, extra: int = 256):
    """Bowen balls of d_n-diameter <= eps inside C_block with Bernoulli mass on T-coords.

    Returns (mu, diam) for window sizes from the scale threshold up to `extra`
    finer levels; balls meeting two blocks are wider than eps and omitted.
    """
    m0 = tail_index(sys.alpha, eps)
    m_lo = m0 if cantor_tail(sys.alpha, m0 - 1) > eps else m0 - 1
    out = []
    for m in range(max(m_lo, block + 1), max(m_lo, block + 1) + extra):
        v = visible_coordinates(sys.shift(block), m - block, n)
        out.append((2.0 ** -v, cantor_tail(sys.alpha, m)))
    return out


def _product_balls(a, b):
    return [(ma * mb, max(da, db)) for ma, da in a for mb, db in b]


def _product_covers(a, b):
    # same refinement level in each factor; product sets have the max diameter
    return [[(max(da, db), ca * cb) for da, ca in pa for db, cb in pb] for pa, pb in zip(a, b)]


def _tower_upper_covers(sys, n, eps, extra=24):
    covers = []
    m0 = tail_index(sys.alpha, eps)
    for m in range(m0, m0 + extra):
        pieces = constructive_cover(sys, n, cantor_tail(sys.alpha, m) * (1 + 1e-9))
        covers.append([(p.diameter, p.count) for p in pieces])
    return covers


def mdim_h_bracket(sys, metric: MetricSpec, eps_ladder, n_window=(2, 6), *,
                   measure_block: int | None = None, tol: float = DEFAULT_TOL
                   ) -> DimensionEstimate:
    """Bracket (1/n) dim_H(M, d_n, eps) at the finest rung for Cantor towers.

    Upper: bisection on explicit Bowen covers, refined over finer scales.
    Lower: the mass-distribution exponent of a Bernoulli measure on one block
    (a product of such measures for product systems), divided by n.
    """
    ladder = _check_ladder(eps_ladder, 1)
    n = int(n_window[1])
    from .metric_core import ProductMax
    from .systems import ProductSystem

    if metric is not None and not isinstance(metric, (CantorAlpha, ProductMax)):
        raise ValidationError("mdim_h_bracket works with d_alpha and its max-products")

    per, lows, highs = [], [], []
    for e in ladder:
        if isinstance(sys, ProductSystem):
            parts = [sys.left, sys.right]
        else:
            parts = [sys]
        if not all(isinstance(p, CantorSystem) for p in parts):
            raise ValidationError("mdim_h_bracket supports Cantor systems and their products")
        if e >= max(2.0 / (p.alpha - 1.0) for p in parts):
            per.append((e, 0.0))
            lows.append(0.0)
            highs.append(0.0)
            continue
        balls = None
        for p in parts:
            blk = measure_block or _natural_block(p, e)
            b = tower_bowen_balls(p, n, e, blk) if p.kind != "full_shift" else \
                _shift_bowen_balls(p, n, e)
            balls = b if balls is None else _product_balls(balls, b)
        lower = max(certified_exponent(balls), 0.0) / n
        up_covers = None
        for p in parts:
            c = _tower_upper_covers(p, n, e)
            up_covers = c if up_covers is None else _product_covers(up_covers, c)
        upper = dim_h_from_covers(up_covers, 1.0, tol).hi / n
        lows.append(lower)
        highs.append(max(upper, lower))
        per.append((e, lower * n))
    lo, hi = lows[-1], highs[-1]
    diag = {"n": n, "lower_per_eps": list(zip(ladder, lows)),
            "upper_per_eps": list(zip(ladder, highs))}
    return DimensionEstimate("mdim_H_bracket", per, lo, (lo, hi), diag)


def _natural_block(sys: CantorSystem, eps: float) -> int:
    """Block whose family scale matches eps (the rung index k)."""
    best_k, best_gap = 1, math.inf
    for k, ek in enumerate(cantor_ladder(sys, 60), start=1):
        if ek <= 0.0:
            break
        gap = abs(math.log(ek) - math.log(eps))
        if gap < best_gap:
            best_k, best_gap = k, gap
    return best_k


def _shift_bowen_balls(sys: CantorSystem, n: int, eps: float, extra: int = 256):
    m0 = tail_index(sys.alpha, eps)
    return [(2.0 ** -(m + n - 1), cantor_tail(sys.alpha, m)) for m in range(m0, m0 + extra)]


# ---------------------------------------------------------------- power map

def power_map_check(sys, metric: MetricSpec, p: int, m: int, eps: float, sample) -> bool:
    """Every (m, f^p, eps)-separated witness pair is (mp, f, eps)-separated."""
    if int(p) < 1:
        raise ValidationError("p must be >= 1")
    if p == 1:
        return True
    sample = list(sample)
    coarse = bowen_pairwise(PowerSystem(sys, p), metric, m, sample)
    fine = bowen_pairwise(sys, metric, m * p, sample)
    idx = greedy_separated_indices(coarse, eps)
    sub = np.ix_(idx, idx)
    off = ~np.eye(len(idx), dtype=bool)
    if not np.all(fine.D[sub][off] > eps):
        return False
    return bool(np.all(coarse.D <= fine.D))


# ---------------------------------------------------------------- truncated snowflake

def trunc_spanning_violations(sys, metric: MetricSpec, a: float, eps: float, eta: float,
                              n: int, sample) -> int:
    """Sample points left uncovered when a d-spanning set at eta is reused under d_{a,eps}.

    Centres span under d_n at eta; under the truncated snowflake they must
    span at eps^(1-a) eta^a.  Returns the number of uncovered sample points.
    """
    from .counting import greedy_spanning
    from .metric_core import TruncSnowflake

    if not (0 < eta < eps):
        raise ValidationError("need 0 < eta < eps")
    sample = list(sample)
    pw = bowen_pairwise(sys, metric, n, sample)
    _, centres = greedy_spanning(None, pw, eta)
    tm = bowen_pairwise(sys, TruncSnowflake(metric, a, eps), n, sample)
    radius = eps ** (1 - a) * eta ** a
    covered = (tm.D[centres] < radius).any(axis=0)
    return int((~covered).sum())


def trunc_sup_distance(metric: MetricSpec, a: float, eps: float, sample) -> float:
    from .metric_core import TruncSnowflake, sup_metric_distance

    return sup_metric_distance(metric, TruncSnowflake(metric, a, eps), list(sample))
