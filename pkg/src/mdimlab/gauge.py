"""Subadditive gauges: membership, order k(g), neighbourhoods and the scaling law."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MembershipError, ValidationError
from .metric_core import Gauge, GaugeSpec, MetricSpec, Power, gauge_eval, tabulated_subadditivity_violation

K_TOL = 0.02
MIN_RUNGS = 6


@dataclass(frozen=True)
class GaugeReport:
    is_increasing: bool
    is_subadditive: bool
    zero_only_at_zero: bool
    k_lower: float
    k_upper: float
    tail_window: tuple
    envelope_ok: bool = True

    @property
    def is_member(self) -> bool:
        return self.is_increasing and self.is_subadditive and self.zero_only_at_zero

    def to_csv(self, header: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["is_increasing", "is_subadditive", "zero_only_at_zero", "k_lower",
                    "k_upper", "eps_min", "eps_max", "envelope_ok"])
        w.writerow([int(self.is_increasing), int(self.is_subadditive),
                    int(self.zero_only_at_zero), f"{self.k_lower:.9g}", f"{self.k_upper:.9g}",
                    f"{self.tail_window[0]:.9g}", f"{self.tail_window[1]:.9g}",
                    int(self.envelope_ok)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GaugeReport":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        rec = next(csv.DictReader(lines))
        return cls(rec["is_increasing"] == "1", rec["is_subadditive"] == "1",
                   rec["zero_only_at_zero"] == "1", float(rec["k_lower"]),
                   float(rec["k_upper"]), (float(rec["eps_min"]), float(rec["eps_max"])),
                   rec["envelope_ok"] == "1")


def geometric_grid(rho: float, size: int, decades: float = 12.0) -> np.ndarray:
    """size points from rho * 10^-decades up to rho, geometric spacing."""
    return rho * np.logspace(-decades, 0.0, size)


def default_ladder(rho: float, eps_min: float = 1e-12) -> list[float]:
    """Dyadic rungs 2^-4i inside (0, rho) down to eps_min.

    Powers of two keep log2 exact, so Power(a) with 4a integral gives k = a
    without rounding.
    """
    out = []
    i = 1
    while 2.0 ** (-4 * i) >= eps_min:
        if 2.0 ** (-4 * i) < rho:
            out.append(2.0 ** (-4 * i))
        i += 1
    return out


def check_membership(g: GaugeSpec, grid_size: int = 64, ladder=None) -> GaugeReport:
    """Membership flags on a geometric grid, plus tail k estimates.

    Subadditivity is checked on all grid pairs with x + y <= rho; the zero set
    at the grid minimum; the linear envelope m x <= g(x), m = g(rho) / (2 rho),
    over the whole grid.
    """
    if grid_size < 16:
        raise ValidationError("membership grid needs >= 16 points")
    rho = float(g.rho)
    grid = geometric_grid(rho, grid_size)
    vals = np.array([gauge_eval(g, x) for x in grid])
    increasing = bool(np.all(np.diff(vals) > 0)) and gauge_eval(g, 0.0) == 0.0
    subadditive = tabulated_subadditivity_violation(g, grid) is None
    zero_ok = bool(vals[0] > 0)
    m = gauge_eval(g, rho) / (2 * rho)
    envelope = bool(np.all(m * grid <= vals * (1 + 1e-12)))
    lad = ladder if ladder is not None else default_ladder(rho)
    try:
        k_lo, k_hi, window = _k_tail(g, lad)
    except MembershipError:
        k_lo = k_hi = 0.0
        window = (lad[-1], lad[0])
        zero_ok = False
    return GaugeReport(increasing, subadditive, zero_ok, k_lo, k_hi, window, envelope)


def _k_tail(g, ladder):
    ladder = [float(e) for e in ladder]
    if len(ladder) < MIN_RUNGS:
        raise ValidationError(f"k estimation needs >= {MIN_RUNGS} rungs")
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValidationError("ladder must be strictly decreasing")
    if not (0 < ladder[-1] and ladder[0] < g.rho):
        raise ValidationError("ladder must lie inside (0, rho)")
    ratios = []
    for e in ladder:
        v = gauge_eval(g, e)
        if v <= 0:
            raise MembershipError(f"g({e:.3g}) = 0 at a positive argument")
        ratios.append(math.log2(v) / math.log2(e))
    tail = ratios[len(ratios) // 2:]
    tail_eps = ladder[len(ladder) // 2:]
    return min(tail), max(tail), (tail_eps[-1], tail_eps[0])


def estimate_k(g: GaugeSpec, eps_ladder) -> tuple[float, float]:
    """(k_lower, k_upper): min and max of log g(eps)/log eps over the tail half."""
    lo, hi, _ = _k_tail(g, eps_ladder)
    return lo, hi


def log_ratio_profile(g: GaugeSpec, eps_ladder) -> list[float]:
    return [math.log2(gauge_eval(g, e)) / math.log2(e) for e in eps_ladder]


def neighborhood_contains(g: GaugeSpec, h: GaugeSpec, eps: float, grid=None) -> bool:
    """Strict x^eps g(x) < h(x) < g(x) / x^eps on every grid point of (0, rho]."""
    rho = float(g.rho)
    if rho >= 1.0:
        raise ValidationError("neighbourhoods need rho < 1 so that x^eps < 1 on (0, rho]")
    if not eps > 0:
        raise ValidationError("eps must be > 0")
    if grid is None:
        grid = geometric_grid(rho, 64)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid > rho * (1 + 1e-12)):
        raise ValidationError("grid must lie in (0, rho]")
    for x in grid:
        gx, hx = gauge_eval(g, x), gauge_eval(h, x)
        if not (x ** eps * gx < hx < gx / x ** eps):
            return False
    return True


def with_rho(g: GaugeSpec, rho: float) -> GaugeSpec:
    """Same closed form restricted to [0, rho]."""
    from .metric_core import gauge_from_dict

    d = dict(g.to_dict())
    d["rho"] = rho
    return gauge_from_dict(d)


@dataclass(frozen=True)
class ScalingResult:
    ratio: float
    expected: float
    estimate_d: float
    estimate_gd: float
    counts_match: bool

    def holds(self, tol: float = K_TOL) -> bool:
        return self.counts_match and abs(self.ratio - self.expected) <= tol


def scaling_law_check(sys, base_metric: MetricSpec, g: GaugeSpec, eps_ladder,
                      n_window=(2, 6), *, k_ladder=None, sample=None) -> ScalingResult:
    """mdim under d against mdim under g o d on the image ladder {g(eps)}.

    The separated counts under g o d at g(eps) must equal those under d at eps;
    a mismatch is reported through ``counts_match``.
    """
    from .dimension import mdim_m_estimate

    lad_k = k_ladder if k_ladder is not None else default_ladder(g.rho, 1e-12)
    k_lo, k_hi, _ = _k_tail(g, lad_k)
    if k_lo <= 0 or k_hi - k_lo > K_TOL:
        raise MembershipError(f"gauge order not well defined: k in [{k_lo:.4f}, {k_hi:.4f}]")
    gm = Gauge(base_metric, g)
    ladder = [float(e) for e in eps_ladder]
    image = [gauge_eval(g, e) for e in ladder]
    est_d = mdim_m_estimate(sys, base_metric, ladder, n_window, sample=sample)
    est_g = mdim_m_estimate(sys, gm, image, n_window, sample=sample)
    match = _rows_match(est_d.counts, est_g.counts)
    ratio = est_d.extrapolated / est_g.extrapolated if est_g.extrapolated > 0 else math.nan
    return ScalingResult(ratio, 0.5 * (k_lo + k_hi), est_d.extrapolated,
                         est_g.extrapolated, match)


def _rows_match(a, b) -> bool:
    if a is None or b is None or len(a.rows) != len(b.rows):
        return False
    ra = sorted(a.rows, key=lambda r: (-r.epsilon, r.n))
    rb = sorted(b.rows, key=lambda r: (-r.epsilon, r.n))
    return all(x.n == y.n and x.sep_lower == y.sep_lower for x, y in zip(ra, rb))


def builtin_gauges(rho: float = 1.0) -> list[GaugeSpec]:
    from .metric_core import LogOnePlus, LogOnePlusPower

    return [Power(0.25, rho), Power(0.5, rho), Power(0.75, rho), Power(1.0, rho),
            LogOnePlus(rho), LogOnePlusPower(0.5, rho), LogOnePlusPower(0.25, rho)]


def is_identity(g: GaugeSpec) -> bool:
    return isinstance(g, Power) and g.a == 1.0
