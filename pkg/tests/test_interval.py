import math

import numpy as np
import pytest

from mdimlab.errors import DomainError, RepresentabilityError, ValidationError
from mdimlab.interval import (PhiSR, PsiS, VarPhiS, affine_to_unit, apply_tower,
                              block_map_conjugate, grid_sample, tent, tent_power,
                              tower_partition, tower_sep_lower)


def test_tent_values():
    assert tent(0.0) == 0.0
    assert tent(1 / 3) == pytest.approx(1.0)
    assert tent(0.5) == pytest.approx(0.5)
    assert tent(1.0) == 1.0
    with pytest.raises(DomainError):
        tent(1.2)


def test_affine_to_unit():
    assert affine_to_unit((0, 2 / 3), 1 / 3) == pytest.approx(0.5)
    assert affine_to_unit((0.5, 1), 0.5) == 0.0
    assert affine_to_unit((0.25, 0.75), 0.5) == 0.5
    with pytest.raises(ValidationError):
        affine_to_unit((0.3, 0.3), 0.3)


def test_apply_tower_examples():
    t = PhiSR(1, 1)
    assert apply_tower(t, 1 / 3) == pytest.approx(1 / 3)
    assert apply_tower(t, 0.0) == 0.0
    b1 = 6 / math.pi ** 2
    assert apply_tower(PsiS(1), b1) == pytest.approx(b1, abs=1e-15)
    with pytest.raises(DomainError):
        apply_tower(t, -0.1)


def test_partitions():
    a = tower_partition(PhiSR(1, 1), 2)
    assert a[0][1] == pytest.approx(2 / 3)
    assert a[1][1] == pytest.approx(8 / 9)
    assert tower_partition(PsiS(2), 1)[0][1] == pytest.approx(0.607927, abs=1e-6)
    assert tower_partition(VarPhiS(1), 1)[0] == (0.5, 1.0)
    with pytest.raises(RepresentabilityError):
        tower_partition(VarPhiS(1), 5)
    with pytest.raises(RepresentabilityError):
        VarPhiS(1, n_max=5)
    with pytest.raises(ValidationError):
        tower_partition(PhiSR(1, 1), 0)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_partition_residual_closed_form(r):
    t = PhiSR(1, r)
    A = (3 ** r - 1) / 3 ** r
    for n in (1, 5, 10):
        right = tower_partition(t, n)[-1][1]
        assert 1 - right == pytest.approx(A * 3 ** (-n * r) / (1 - 3 ** -r), abs=1e-12)


def test_endpoints_strictly_increasing():
    for t in (PhiSR(1, 1), PsiS(1), VarPhiS(1)):
        blocks = tower_partition(t, 4)
        assert all(l < r for l, r in blocks)
        ends = sorted(blocks)
        assert all(a[1] <= b[0] for a, b in zip(ends, ends[1:]))


@pytest.mark.parametrize("t", [PhiSR(1, 1), PhiSR(2, 0.5), PsiS(1)])
def test_block_boundaries_are_fixed(t):
    for left, right in tower_partition(t, 6):
        assert apply_tower(t, left) == left
        assert apply_tower(t, right) == right


@pytest.mark.parametrize("t,n", [(PhiSR(1, 1), 1), (PhiSR(1, 1), 3), (PsiS(2), 2)])
def test_conjugation_identity(t, n):
    u = np.linspace(0, 1, 101)
    ref = tent_power(t.s * n, u)
    got = np.array([block_map_conjugate(t, n, float(x)) for x in u])
    assert np.max(np.abs(got - ref)) <= max(1e-10, t.s * n * 1e-14)


def test_orbit_stays_in_block():
    t = PhiSR(1, 1)
    for x in np.linspace(0, 0.999, 200):
        n, (left, right) = t.locate(x) or (None, (x, x))
        y = float(x)
        for _ in range(5):
            y = apply_tower(t, y)
            assert left - 1e-15 <= y <= right + 1e-15


def test_varphi_gaps_are_fixed_and_deep_points_rejected():
    t = VarPhiS(1)
    # gap between J_2 = [1/16, 1/8] and J_1 = [1/2, 1]
    assert apply_tower(t, 0.3) == 0.3
    assert apply_tower(t, 0.0) == 0.0
    with pytest.raises(RepresentabilityError):
        apply_tower(t, 1e-300)


def test_grid_sample():
    assert [p.x for p in grid_sample((0, 1), 3)] == [0, 0.5, 1]
    assert [p.x for p in grid_sample((0, 2 / 3), 2)] == [0, 2 / 3]
    assert [p.x for p in grid_sample((0.5, 1), 5)] == [0.5, 0.625, 0.75, 0.875, 1]
    with pytest.raises(ValidationError):
        grid_sample((0, 1), 1)


def test_tower_sep_lower_grows_with_n():
    t = PhiSR(1, 1)
    counts = [tower_sep_lower(t, n, 0.05, n_blocks=3, per_block=2000) for n in (1, 2, 3)]
    assert counts == sorted(counts)
    assert counts[-1] > counts[0]


def test_tower_round_trip():
    from mdimlab.interval import IntervalTower
    for t in (PhiSR(2, 0.5), PsiS(1), VarPhiS(2, n_max=3)):
        assert IntervalTower.from_dict(t.to_dict()) == t
