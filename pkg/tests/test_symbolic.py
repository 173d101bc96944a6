import pytest

from mdimlab.errors import DepthError, ValidationError
from mdimlab.metric_core import CantorPoint, cantor_tail
from mdimlab.symbolic import (FullShift, TowerPhiSquare, TowerPsi, apply_map,
                              brute_force_max_separated, constructive_cover, cover_count,
                              eps_ladder, exact_cov_upper, exact_sep_lower,
                              family_min_separation, full_shift_sep_exact, sep_lower_at,
                              separated_family, tail_index)


def test_tower_psi_skips_block_coordinates():
    a, b, c, d = 2, 0, 0, 2
    x = CantorPoint((0, 2, a, b, c, d, 0, 0))
    assert apply_map(TowerPsi(1), x).word == (0, 2, c, d, 0, 0)


@pytest.mark.parametrize("sys", [FullShift(3), TowerPsi(1), TowerPsi(2), TowerPhiSquare(3)])
def test_zero_sequence_is_fixed(sys):
    z = CantorPoint.zeros(8)
    y = apply_map(sys, z)
    assert set(y.word) == {0}
    if sys.kind != "full_shift":
        assert y == z


def test_full_shift_drops_first_symbol():
    assert apply_map(FullShift(3), CantorPoint((2, 0, 2))).word == (0, 2)


def test_short_truncation_raises_depth_error():
    with pytest.raises(DepthError):
        apply_map(TowerPsi(3), CantorPoint((2, 0)))


def test_ladders():
    assert eps_ladder(TowerPsi(1, 3), 2)[-1] == pytest.approx(3 ** -4)
    assert eps_ladder(TowerPhiSquare(3), 1)[0] == pytest.approx(1 / 9)
    assert eps_ladder(TowerPsi(2, 2), 1)[0] == pytest.approx(0.125)
    with pytest.raises(ValidationError):
        eps_ladder(TowerPsi(1), 0)


def test_exact_sep_lower_values():
    assert exact_sep_lower(TowerPsi(1), 2, 2) == 16
    assert exact_sep_lower(TowerPhiSquare(), 1, 2) == 16
    assert exact_sep_lower(TowerPsi(1), 1, 1) == 2
    with pytest.raises(ValidationError):
        exact_sep_lower(TowerPsi(1), 1, 0)


def test_exact_sep_lower_against_brute_force():
    # depth-3 truncations, Bowen length 2, eps_1 = 1/9
    sys = TowerPsi(1)
    assert brute_force_max_separated(sys, 2, 3 ** -2, depth=3) >= exact_sep_lower(sys, 1, 1)


def test_cover_formula_values():
    assert exact_cov_upper(TowerPsi(1), 2, 2) == 34
    assert exact_cov_upper(TowerPsi(1), 1, 1) == 4
    assert exact_cov_upper(TowerPhiSquare(), 1, 1) == 4


def test_cover_formula_is_not_an_upper_bound_at_finite_n():
    # 16 cylinders of length 4 are pairwise 3^-4 separated already at time 0
    sys = TowerPsi(1)
    sep = brute_force_max_separated(sys, 1, 3 ** -4, depth=4)
    assert sep == 16
    assert sep > exact_cov_upper(sys, 1, 2) == 10


@pytest.mark.parametrize("sys,n,k", [(TowerPsi(1), 1, 1), (TowerPsi(1), 2, 1),
                                     (TowerPsi(2), 1, 1), (TowerPhiSquare(), 1, 1)])
def test_constructive_cover_dominates_oracle(sys, n, k):
    eps = eps_ladder(sys, k)[-1]
    pieces = constructive_cover(sys, n, eps)
    assert all(p.diameter < eps for p in pieces)
    sep = brute_force_max_separated(sys, n, eps, depth=5)
    assert cover_count(pieces) >= sep


@pytest.mark.parametrize("sys,n,k", [(TowerPsi(1), 2, 2), (TowerPsi(2), 1, 2),
                                     (TowerPhiSquare(), 2, 1), (TowerPhiSquare(), 1, 2)])
def test_separated_family_is_separated(sys, n, k):
    eps = eps_ladder(sys, k)[-1]
    assert family_min_separation(sys, n, k) > eps
    assert sum(1 for _ in separated_family(sys, n, k)) == exact_sep_lower(sys, n, k)


def test_full_shift_exact_counts():
    assert full_shift_sep_exact(2, 1, 1) == 2
    assert full_shift_sep_exact(2, 3, 2) == 16
    with pytest.raises(ValidationError):
        full_shift_sep_exact(2, 1, 0)


def test_full_shift_counts_match_oracle():
    sys = FullShift(3)
    # k symbols resolved at eps = 3^-k, strict separation
    assert brute_force_max_separated(sys, 1, 0.4, depth=2) == 2
    assert brute_force_max_separated(sys, 3, 3 ** -2, depth=5) == 16
    assert sep_lower_at(sys, 3, 2) == 16


def test_tail_index_is_least():
    for eps in (0.5, 0.1, 3 ** -4, 1e-6):
        m = tail_index(3.0, eps)
        assert cantor_tail(3.0, m) < eps
        assert m == 0 or cantor_tail(3.0, m - 1) >= eps


def test_system_round_trip():
    from mdimlab.symbolic import CantorSystem
    for sys in (FullShift(2.5), TowerPsi(3), TowerPhiSquare(4)):
        assert CantorSystem.from_dict(sys.to_dict()) == sys
