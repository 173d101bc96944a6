import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdimlab.errors import StructuralError, ValidationError
from mdimlab.metric_core import (CantorAlpha, CantorPoint, Euclid1D, Gauge, IntervalPoint,
                                 LogOnePlus, LogOnePlusPower, PairPoint, Power, ProductMax,
                                 SeqPoint, SeqWeighted, Snowflake, TruncSnowflake,
                                 bowen_distance, eval_metric, eval_metric_with_error,
                                 gauge_eval, metric_from_dict, sup_metric_distance)
from mdimlab.symbolic import FullShift


def P(x):
    return IntervalPoint(x)


def test_cantor_single_coordinate():
    assert eval_metric(CantorAlpha(3), CantorPoint((2, 0)), CantorPoint((0, 0))) == pytest.approx(2 / 3)


def test_truncated_snowflake_above_and_below_eps():
    m = TruncSnowflake(Euclid1D(), 0.5, 0.1)
    assert eval_metric(m, P(0.0), P(0.25)) == pytest.approx(0.25, abs=1e-12)
    assert eval_metric(m, P(0.0), P(0.01)) == pytest.approx(0.0316228, abs=1e-7)


def test_snowflake_square_root():
    assert eval_metric(Snowflake(Euclid1D(), 0.5), P(0.0), P(0.04)) == pytest.approx(0.2)


def test_bowen_distance_shift():
    sys = FullShift(3)
    x, y = CantorPoint((0, 2, 0)), CantorPoint((0, 0, 0))
    m = CantorAlpha(3)
    assert bowen_distance(sys, m, 1, x, y) == pytest.approx(2 / 9)
    assert bowen_distance(sys, m, 2, x, y) == pytest.approx(2 / 3)
    assert bowen_distance(sys, m, 1, x, x) == 0.0


def test_gauge_values():
    assert gauge_eval(Power(0.5), 0.09) == pytest.approx(0.3)
    assert gauge_eval(LogOnePlus(), 0.0) == 0.0
    assert gauge_eval(LogOnePlusPower(0.5), 0.25) == pytest.approx(math.log(1.5), abs=1e-6)


def test_sup_distance_examples():
    pts = [P(x) for x in np.linspace(0, 1, 41)]
    assert sup_metric_distance(Euclid1D(), Euclid1D(), pts) == 0.0
    for a, eps in [(0.5, 0.1), (0.3, 0.05), (0.8, 0.2)]:
        assert sup_metric_distance(Euclid1D(), TruncSnowflake(Euclid1D(), a, eps), pts) < 2 * eps
    assert sup_metric_distance(Euclid1D(), Snowflake(Euclid1D(), 0.5), [P(0.0), P(1.0)]) == 0.0


def test_wrong_variant_is_structural():
    with pytest.raises(StructuralError):
        eval_metric(Euclid1D(), CantorPoint((0,)), CantorPoint((2,)))
    with pytest.raises(StructuralError):
        eval_metric(CantorAlpha(3), P(0.1), P(0.2))


def test_parameter_validation():
    with pytest.raises(ValidationError):
        CantorAlpha(1.0)
    with pytest.raises(ValidationError):
        Snowflake(Euclid1D(), 1.5)
    with pytest.raises(ValidationError):
        TruncSnowflake(Euclid1D(), 0.5, 2.0)
    with pytest.raises(ValidationError):
        Power(0.0)
    with pytest.raises(ValidationError):
        CantorPoint((1, 0))
    with pytest.raises(ValidationError):
        IntervalPoint(1.5)
    with pytest.raises(ValidationError):
        Gauge(CantorAlpha(2), Power(0.5, rho=1.0))  # diameter 2 > rho


def test_truncation_error_is_tail_bound():
    v, e = eval_metric_with_error(CantorAlpha(3), CantorPoint((0, 0)), CantorPoint((0, 2)))
    assert v == pytest.approx(2 / 9)
    assert e == pytest.approx(2 * 3 ** -2 / 2)


def test_seq_and_product_metrics():
    seq = SeqWeighted(Euclid1D())
    x = SeqPoint((P(0.0), P(0.0)))
    y = SeqPoint((P(1.0), P(0.5)))
    assert eval_metric(seq, x, y) == pytest.approx(0.5 + 0.125)
    prod = ProductMax(Euclid1D(), CantorAlpha(3))
    a = PairPoint(P(0.1), CantorPoint((0, 0)))
    b = PairPoint(P(0.2), CantorPoint((2, 0)))
    assert eval_metric(prod, a, b) == pytest.approx(2 / 3)


def test_metric_dict_round_trip():
    m = Gauge(Snowflake(CantorAlpha(3), 0.5), Power(0.5))
    assert metric_from_dict(m.to_dict()) == m
    with pytest.raises(ValidationError):
        metric_from_dict({"node": "nope"})


words = st.lists(st.sampled_from([0, 2]), min_size=6, max_size=6).map(lambda w: CantorPoint(tuple(w)))
reals = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(words, words, words)
def test_cantor_metric_axioms(x, y, z):
    m = CantorAlpha(3)
    dxy, dyx = eval_metric(m, x, y), eval_metric(m, y, x)
    assert dxy == dyx >= 0
    assert (dxy == 0) == (x == y)
    assert dxy <= eval_metric(m, x, z) + eval_metric(m, z, y) + 1e-15


@settings(max_examples=60, deadline=None)
@given(reals, reals, reals, st.floats(min_value=0.05, max_value=1.0))
def test_snowflake_is_a_metric(x, y, z, a):
    m = Snowflake(Euclid1D(), a)
    px, py, pz = P(x), P(y), P(z)
    assert eval_metric(m, px, py) <= eval_metric(m, px, pz) + eval_metric(m, pz, py) + 1e-12


@settings(max_examples=60, deadline=None)
@given(reals, reals, reals, reals, st.floats(min_value=0.05, max_value=1.0))
def test_snowflake_preserves_order(x, y, u, v, a):
    d = Euclid1D()
    s = Snowflake(d, a)
    lhs = eval_metric(d, P(x), P(y)) < eval_metric(d, P(u), P(v))
    rhs = eval_metric(s, P(x), P(y)) < eval_metric(s, P(u), P(v))
    assert lhs == rhs or abs(abs(x - y) - abs(u - v)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(words, words, st.integers(min_value=1, max_value=4), st.sampled_from([0.25, 0.5, 1.0]))
def test_gauge_commutes_with_bowen_max(x, y, n, a):
    sys = FullShift(3)
    g = Power(a, rho=1.0)
    inner = CantorAlpha(3)
    lhs = bowen_distance(sys, Gauge(inner, g), n, x, y)
    rhs = gauge_eval(g, bowen_distance(sys, inner, n, x, y))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)
