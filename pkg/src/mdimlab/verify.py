"""Check batteries behind ``mdimlab verify``.

Each criterion function returns a list of Check records; suites group them.
Advisory checks report but never fail a suite.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

LOG2_LOG3 = math.log(2) / math.log(3)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: object
    target: object
    advisory: bool = False
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else ("WARN" if self.advisory else "FAIL")
        return f"{tag} {self.name}: measured={_fmt(self.measured)} target={_fmt(self.target)}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, tuple):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def _timed(fn: Callable[[], list], name: str, budget: float | None) -> list[Check]:
    t0 = time.perf_counter()
    checks = fn()
    dt = time.perf_counter() - t0
    out = [Check(c.name, c.passed, c.measured, c.target, c.advisory, dt) for c in checks]
    if budget is not None:
        out.append(Check(f"{name} runtime", dt < budget, round(dt, 2), f"< {budget} s"))
    return out


# ---------------------------------------------------------------- criteria

def criterion_1() -> list[Check]:
    """Tower families realise 2^(jnk) separated points; the oracle dominates."""
    from .symbolic import (TowerPsi, brute_force_max_separated, eps_ladder,
                           family_min_separation, sep_lower_at)

    checks = []
    worst = math.inf
    for j in (1, 2):
        sys = TowerPsi(j)
        for n in range(1, 5):
            for k in range(1, 5):
                eps = eps_ladder(sys, k, k)[0]
                worst = min(worst, family_min_separation(sys, n, k) / eps)
    checks.append(Check("families (n+1, eps_k)-separated, j<=2, n<=4, k<=4",
                        worst > 1.0, worst, "> 1 (min separation / eps)"))
    ok = True
    cells = []
    for j in (1, 2):
        sys = TowerPsi(j)
        for big_n, k in ((1, 1), (2, 1), (3, 1), (1, 2), (2, 2)):
            eps = eps_ladder(sys, k, k)[0]
            exact = brute_force_max_separated(sys, big_n, eps, depth=5)
            lower = sep_lower_at(sys, big_n, k)
            cells.append((j, big_n, k, exact, lower))
            ok &= exact >= lower
    checks.append(Check("oracle max separated >= family bound (32-point universes)", ok,
                        len(cells), "all cells"))
    return checks


def _mdim_check(name, sys, k_min, k_max, n_window, target, tol=0.05):
    from .dimension import mdim_m_estimate
    from .symbolic import eps_ladder

    est = mdim_m_estimate(sys, sys.metric(), eps_ladder(sys, k_max, k_min), n_window)
    return Check(name, abs(est.extrapolated - target) <= tol, est.extrapolated,
                 f"{target:.6f} +- {tol}")


def criterion_2() -> list[Check]:
    from .symbolic import TowerPsi

    return [_mdim_check("psi_1 mdim_M", TowerPsi(1), 2, 6, (2, 6), LOG2_LOG3 / 2),
            _mdim_check("psi_2 mdim_M", TowerPsi(2), 2, 6, (2, 6), 2 * LOG2_LOG3 / 3)]


def criterion_3() -> list[Check]:
    from .symbolic import TowerPhiSquare

    return [_mdim_check("phi mdim_M (k <= 4)", TowerPhiSquare(), 1, 4, (2, 6), LOG2_LOG3)]


def criterion_4() -> list[Check]:
    from .dimension import mdim_m_estimate
    from .symbolic import FullShift, eps_ladder

    sys = FullShift()
    est = mdim_m_estimate(sys, sys.metric(), eps_ladder(sys, 10), (2, 6))
    norm = [r for _, r in est.normalised()]
    dec = all(b < a for a, b in zip(norm, norm[1:]))
    return [Check("full shift rate/|log eps| at finest rung", norm[-1] < 0.1, norm[-1], "< 0.1"),
            Check("full shift ratio strictly decreasing", dec, dec, True)]


def _symbolic_systems():
    from .symbolic import FullShift, TowerPhiSquare, TowerPsi

    return [TowerPsi(1), TowerPsi(2), TowerPhiSquare(), FullShift()]


def criterion_5() -> list[Check]:
    """Exact separated counts are invariant under (d, eps) -> (d^a, eps^a)."""
    from .counting import bowen_pairwise, exact_max_separated
    from .metric_core import Snowflake
    from .symbolic import eps_ladder, oracle_universe

    mismatches = 0
    cells = 0
    for sys in _symbolic_systems():
        for big_n, k in ((1, 1), (2, 1), (2, 2), (3, 1)):
            eps = eps_ladder(sys, k, k)[0]
            pts = oracle_universe(sys, 5, big_n, eps)
            base = exact_max_separated(pts, bowen_pairwise(sys, sys.metric(), big_n, pts), eps)
            for a in (0.25, 0.5, 0.75):
                m = Snowflake(sys.metric(), a)
                snow = exact_max_separated(pts, bowen_pairwise(sys, m, big_n, pts), eps ** a)
                cells += 1
                mismatches += snow != base
    return [Check("snowflake count identity (exact oracle)", mismatches == 0, mismatches,
                  f"0 of {cells}")]


def criterion_6() -> list[Check]:
    from .dimension import cantor_cylinder_covers, dim_h_from_covers, snowflake_covers

    worst = 0.0
    for k in (4, 8, 12):
        covers = cantor_cylinder_covers(3.0, 3.0 ** -k)
        base = dim_h_from_covers(covers).value
        for a in (0.25, 0.5, 0.75):
            snow = dim_h_from_covers(snowflake_covers(covers, a)).value
            worst = max(worst, abs(snow - base / a))
    return [Check("dim_H(d^a, eps^a) = dim_H(d, eps)/a", worst <= 2e-3, worst, "<= 2e-3")]


def criterion_7() -> list[Check]:
    from .counting import bowen_pairwise
    from .dimension import sandwich_sums
    from .metric_core import CantorPoint
    from .symbolic import FullShift

    sys = FullShift()
    pts = [CantorPoint.from_bits(list(b)) for b in itertools.product((0, 1), repeat=8)]
    pw = bowen_pairwise(sys, sys.metric(), 1, pts)
    bad = 0
    total = 0
    for eps in (3.0 ** -2, 0.05, 3.0 ** -4):
        for s in (0.5, 0.63, 1.0):
            total += 1
            bad += not sandwich_sums(pts, pw, eps, s).holds
    return [Check("H(arbitrary, eps) <= H(balls, eps) <= 2^s H(arbitrary, eps/2)", bad == 0,
                  bad, f"0 of {total} violations")]


def criterion_8() -> list[Check]:
    from .counting import bowen_pairwise
    from .dimension import (bernoulli_cylinder_balls, box_dim_estimate, cantor_cylinder_covers,
                            certified_exponent, dim_h_interval, mass_dist_lower_bound)
    from .metric_core import CantorPoint
    from .symbolic import FullShift

    balls = bernoulli_cylinder_balls(3.0, range(1, 11))
    ok6, r6 = mass_dist_lower_bound(balls, 0.60)
    ok7, r7 = mass_dist_lower_bound(bernoulli_cylinder_balls(3.0, [10]), 0.70)
    lo = certified_exponent(balls)
    eps = 3.0 ** -8
    hd = dim_h_interval(eps=eps, covers=cantor_cylinder_covers(3.0, eps))
    pts = [CantorPoint.from_bits(list(b)) for b in itertools.product((0, 1), repeat=9)]
    pw = bowen_pairwise(FullShift(), FullShift().metric(), 1, pts)
    box = box_dim_estimate(None, pw, [3.0 ** -k for k in range(2, 9)])
    hi = hd.hi
    contains = lo <= LOG2_LOG3 <= hi
    return [Check("Bernoulli certifies s = 0.60 (m <= 10)", ok6, r6, "worst ratio <= 1"),
            Check("Bernoulli rejects s = 0.70 at m = 10", not ok7, r7, "ratio > 1"),
            Check("dimension bracket contains log2/log3, width <= 0.1",
                  contains and hi - lo <= 0.1, (lo, hi), f"{LOG2_LOG3:.6f}"),
            Check("box dimension of (C, d_3) from ball covers",
                  abs(box.extrapolated - LOG2_LOG3) <= 0.03, box.extrapolated,
                  f"{LOG2_LOG3:.6f} +- 0.03")]


def criterion_9() -> list[Check]:
    from .dimension import mdim_h_bracket
    from .symbolic import TowerPsi, eps_ladder
    from .systems import ProductSystem

    sys = TowerPsi(1)
    lad = eps_ladder(sys, 3)
    single = mdim_h_bracket(sys, sys.metric(), lad, (2, 6)).bracket[0]
    prod = mdim_h_bracket(ProductSystem(sys, sys), None, lad, (2, 6)).bracket[0]
    return [Check("product mdim_H lower >= 2 x single - 0.05", prod >= 2 * single - 0.05,
                  (prod, single), "prod >= 2 single - 0.05")]


def _random_cantor(rng, count, depth):
    from .metric_core import CantorPoint

    return [CantorPoint.from_bits(rng.integers(0, 2, depth).tolist()) for _ in range(count)]


def criterion_10(seed: int = 0) -> list[Check]:
    from .dimension import power_map_check
    from .symbolic import FullShift, TowerPsi, eps_ladder

    rng = np.random.default_rng(seed)
    pts = _random_cantor(rng, 200, 48)
    psi = TowerPsi(1)
    fs = FullShift()
    a = power_map_check(psi, psi.metric(), 2, 2, eps_ladder(psi, 2, 2)[0], pts)
    b = power_map_check(fs, fs.metric(), 3, 1, 3.0 ** -2, pts)
    return [Check("power map psi_1, p = 2", a, a, True),
            Check("power map full shift, p = 3", b, b, True)]


def criterion_11(seed: int = 0) -> list[Check]:
    from .dimension import trunc_spanning_violations, trunc_sup_distance
    from .symbolic import TowerPsi

    rng = np.random.default_rng(seed)
    pts = _random_cantor(rng, 200, 48)
    sys = TowerPsi(1)
    eps = 3.0 ** -3
    viol = sum(trunc_spanning_violations(sys, sys.metric(), 0.5, eps, eta, 3, pts)
               for eta in (3.0 ** -4, 3.0 ** -5))
    sup = trunc_sup_distance(sys.metric(), 0.5, eps, pts[:80])
    return [Check("truncated snowflake spanning inclusion", viol == 0, viol, 0),
            Check("sup |d - d_{a,eps}| < 2 eps", sup < 2 * eps, sup, f"< {2 * eps:.6g}")]


def criterion_12() -> list[Check]:
    from .gauge import (builtin_gauges, check_membership, default_ladder, estimate_k,
                        neighborhood_contains, scaling_law_check, with_rho)
    from .metric_core import LogOnePlusPower, Power
    from .symbolic import TowerPsi, eps_ladder

    checks = []
    lad = default_ladder(1.0, 1e-8)
    exact = all(estimate_k(Power(a), lad) == (a, a) for a in (0.25, 0.5, 1.0))
    checks.append(Check("k(Power(a)) = a exactly", exact, exact, True))
    k = estimate_k(LogOnePlusPower(0.5), lad)
    checks.append(Check("k(log(1+x^0.5)) ~ 0.5", max(abs(v - 0.5) for v in k) <= 0.02, k, "0.5 +- 0.02"))
    ks = [check_membership(g).k_upper for g in builtin_gauges()]
    checks.append(Check("k_upper <= 1.01 for member gauges", max(ks) <= 1.01, max(ks), "<= 1.01"))
    sys = TowerPsi(1)
    worst = 0.0
    for a in (0.25, 0.5, 1.0):
        res = scaling_law_check(sys, sys.metric(), Power(a), eps_ladder(sys, 6, 2))
        worst = max(worst, abs(res.ratio - res.expected) if res.counts_match else math.inf)
    checks.append(Check("scaling law ratio for Power gauges on psi_1", worst <= 0.02, worst, "<= 0.02"))
    rho = 0.9
    gauges = [with_rho(g, rho) for g in builtin_gauges()]
    ladder = default_ladder(rho, 1e-12)
    worst_gap, tested = -math.inf, 0
    for g, h in itertools.product(gauges, repeat=2):
        for e in (0.05, 0.1, 0.25, 0.5):
            if neighborhood_contains(g, h, e):
                tested += 1
                kg, kh = estimate_k(g, ladder), estimate_k(h, ladder)
                gap = abs(sum(kg) / 2 - sum(kh) / 2) - e
                worst_gap = max(worst_gap, gap)
    checks.append(Check("|k(g) - k(h)| <= eps + 0.02 inside neighbourhoods",
                        tested > 0 and worst_gap <= 0.02, worst_gap, f"<= 0.02 over {tested} pairs"))
    return checks


def criterion_13() -> list[Check]:
    from .dimension import mdim_m_estimate
    from .interval import PhiSR
    from .metric_core import Euclid1D

    est = mdim_m_estimate(PhiSR(1, 1), Euclid1D(), [3.0 ** -k for k in range(2, 5)], (2, 3))
    v = est.extrapolated
    return [Check("phi_{1,1} grid estimate", 0.35 <= v <= 0.65, v, "[0.35, 0.65]",
                  advisory=True)]


def chain_consistency() -> list[Check]:
    """mdim_H upper never exceeds mdim_M upper by more than 0.02."""
    from .dimension import mdim_h_bracket, mdim_m_estimate
    from .symbolic import TowerPhiSquare, TowerPsi, eps_ladder

    worst = -math.inf
    for sys, k_max in ((TowerPsi(1), 4), (TowerPsi(2), 4), (TowerPhiSquare(), 3)):
        lad = eps_ladder(sys, k_max)
        hb = mdim_h_bracket(sys, sys.metric(), lad, (2, 6)).bracket[1]
        mb = mdim_m_estimate(sys, sys.metric(), lad, (2, 6)).bracket[1]
        worst = max(worst, hb - mb)
    return [Check("mdim_H upper <= mdim_M upper + 0.02", worst <= 0.02, worst, "<= 0.02")]


def theta_insensitivity() -> list[Check]:
    from .dimension import cantor_cylinder_covers, dim_h_at_scale

    eps = 3.0 ** -60
    covers = cantor_cylinder_covers(3.0, eps)
    vals = [dim_h_at_scale(eps=eps, theta=t, covers=covers) for t in (0.5, 1.0, 2.0)]
    spread = max(vals) - min(vals)
    return [Check("dim_H at scale agrees across theta in {0.5, 1, 2}", spread <= 0.02, spread,
                  "<= 0.02")]


CRITERIA = {
    1: (criterion_1, 30.0), 2: (criterion_2, 60.0), 3: (criterion_3, 60.0),
    4: (criterion_4, 10.0), 5: (criterion_5, 30.0), 6: (criterion_6, None),
    7: (criterion_7, None), 8: (criterion_8, None), 9: (criterion_9, None),
    10: (criterion_10, None), 11: (criterion_11, None), 12: (criterion_12, None),
    13: (criterion_13, None),
}

SUITES = {
    "counts": [1, 2, 3, 4],
    "scaling": [5, 6, 11],
    "hausdorff": [7, 8, "chain", "theta"],
    "products": [9, 10],
    "gauges": [12],
    "intervals": [13],
}
SUITES["all"] = [c for name in ("counts", "scaling", "hausdorff", "products", "gauges",
                                "intervals") for c in SUITES[name]]
EXTRA = {"chain": chain_consistency, "theta": theta_insensitivity}


def run_criterion(key) -> list[Check]:
    if key in EXTRA:
        return _timed(EXTRA[key], str(key), None)
    fn, budget = CRITERIA[key]
    return _timed(fn, f"criterion {key}", budget)


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    out = []
    for key in SUITES[name]:
        out.extend(run_criterion(key))
    return out


def suite_passed(checks) -> bool:
    return all(c.passed or c.advisory for c in checks)
