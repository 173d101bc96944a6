import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdimlab.counting import bowen_pairwise, exact_max_separated
from mdimlab.dimension import mdim_m_estimate
from mdimlab.errors import MembershipError, ValidationError
from mdimlab.gauge import (GaugeReport, builtin_gauges, check_membership, default_ladder,
                           estimate_k, log_ratio_profile, neighborhood_contains,
                           scaling_law_check)
from mdimlab.metric_core import (Euclid1D, Gauge, IntervalPoint, LogOnePlus, LogOnePlusPower,
                                 Power, Tabulated, gauge_eval)
from mdimlab.symbolic import TowerPsi, eps_ladder


def test_membership_builtins():
    for g in (Power(0.5), LogOnePlus()):
        rep = check_membership(g)
        assert rep.is_increasing and rep.is_subadditive and rep.zero_only_at_zero
        assert rep.is_member and rep.envelope_ok


def test_square_is_not_subadditive():
    xs = np.linspace(0, 1, 65)
    g = Tabulated.from_function(lambda x: x * x, xs[1:], strict=False)
    assert not check_membership(g).is_subadditive
    with pytest.raises(ValidationError):
        Tabulated.from_function(lambda x: x * x, xs[1:])


def test_concave_tabulated_passes():
    xs = np.geomspace(1e-6, 1, 80)
    g = Tabulated.from_function(lambda x: math.log1p(x), xs)
    assert check_membership(g).is_subadditive


def test_k_of_power_is_exact():
    assert estimate_k(Power(0.5), default_ladder(1.0)) == (0.5, 0.5)
    assert estimate_k(Power(0.25), default_ladder(1.0)) == (0.25, 0.25)


def test_k_of_log_power():
    lad = [10.0 ** -i for i in range(1, 9)]
    lo, hi = estimate_k(LogOnePlusPower(0.5), lad)
    assert abs(lo - 0.5) < 0.02 and abs(hi - 0.5) < 0.02


def test_k_of_inverse_sqrt_log_vanishes():
    xs = np.geomspace(1e-13, 0.5, 400)
    g = Tabulated.from_function(lambda x: 1 / math.sqrt(math.log(1 / x)), xs, strict=False)
    lad = [10.0 ** -i for i in range(1, 13)]
    _, hi = estimate_k(g, lad)
    assert hi < 0.1
    prof = log_ratio_profile(g, lad)
    assert all(b < a for a, b in zip(prof, prof[1:]))


def test_k_validation():
    with pytest.raises(ValidationError):
        estimate_k(Power(0.5), [0.5, 0.25, 0.125])
    with pytest.raises(ValidationError):
        estimate_k(Power(0.5), [0.5, 0.6, 0.1, 0.01, 0.001, 1e-4])


def test_k_bounds_for_members():
    for g in builtin_gauges():
        rep = check_membership(g)
        assert rep.is_member
        assert 0 < rep.k_lower <= rep.k_upper <= 1.01


def test_neighbourhoods():
    g = Power(0.5, rho=0.9)
    assert neighborhood_contains(g, g, 0.1)
    for e in (0.05, 0.2, 0.45):
        assert neighborhood_contains(g, Power(0.5 + e / 2, rho=0.9), e)
    assert not neighborhood_contains(g, Power(0.9, rho=0.9), 0.1)
    with pytest.raises(ValidationError):
        neighborhood_contains(Power(0.5), Power(0.5), 0.1)


@pytest.mark.parametrize("a,b,e", [(0.5, 0.55, 0.1), (0.3, 0.25, 0.06), (0.7, 0.72, 0.05)])
def test_k_continuity_surrogate(a, b, e):
    g, h = Power(a, rho=0.9), Power(b, rho=0.9)
    assert neighborhood_contains(g, h, e)
    lad = default_ladder(0.9)
    kg = sum(estimate_k(g, lad)) / 2
    kh = sum(estimate_k(h, lad)) / 2
    assert abs(kg - kh) <= e + 0.02


def test_scaling_law_power():
    sys = TowerPsi(1)
    lad = eps_ladder(sys, 6, 2)
    res = scaling_law_check(sys, sys.metric(), Power(0.5), lad, (2, 6))
    assert res.counts_match
    assert abs(res.ratio - 0.5) <= 0.02
    assert res.estimate_gd == pytest.approx(2 * res.estimate_d, rel=1e-9)
    ident = scaling_law_check(sys, sys.metric(), Power(1.0), lad, (2, 6))
    assert ident.counts_match and ident.ratio == 1.0


def test_scaling_law_log_power():
    sys = TowerPsi(1)
    lad = eps_ladder(sys, 6, 2)
    res = scaling_law_check(sys, sys.metric(), LogOnePlusPower(0.5), lad, (2, 6))
    assert res.counts_match
    assert abs(res.ratio - 0.5) <= 0.05


def test_scaling_rejects_order_zero_gauge():
    xs = np.geomspace(1e-13, 0.5, 400)
    g = Tabulated.from_function(lambda x: 1 / math.sqrt(math.log(1 / x)), xs, strict=False)
    with pytest.raises(MembershipError):
        scaling_law_check(TowerPsi(1), TowerPsi(1).metric(), g, [0.01], (2, 6))


def test_estimate_sandwich_for_log_gauge():
    sys = TowerPsi(1)
    g = LogOnePlusPower(0.5)
    lad = eps_ladder(sys, 6, 2)
    k_lo, k_hi = estimate_k(g, [10.0 ** -i for i in range(1, 9)])
    d = mdim_m_estimate(sys, sys.metric(), lad, (2, 6)).extrapolated
    gd = mdim_m_estimate(sys, Gauge(sys.metric(), g), [gauge_eval(g, e) for e in lad],
                         (2, 6)).extrapolated
    assert k_lo * gd <= d + 1e-9
    assert d <= k_hi * gd + 0.05


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=12),
       st.floats(0.01, 0.6), st.sampled_from([0.25, 0.5, 1.0]))
def test_separated_sets_transport(xs, eps, a):
    pts = [IntervalPoint(x) for x in xs]
    for g in (Power(a), LogOnePlusPower(a)):
        d = bowen_pairwise(None, Euclid1D(), 1, pts)
        gd = bowen_pairwise(None, Gauge(Euclid1D(), g), 1, pts)
        if np.any(np.abs(d.D - eps) < 1e-9):
            continue
        assert exact_max_separated(None, d, eps) == exact_max_separated(None, gd, gauge_eval(g, eps))


def test_report_csv_round_trip():
    rep = check_membership(LogOnePlusPower(0.5))
    back = GaugeReport.from_csv(rep.to_csv(["h"]))
    assert back.is_member == rep.is_member
    assert back.k_lower == pytest.approx(rep.k_lower, rel=1e-8)
    assert back.tail_window == pytest.approx(rep.tail_window, rel=1e-8)
