import itertools

import numpy as np
import pytest

from mubw.finite_field import FieldError, field_for_order
from mubw.phase_space import (
    INFINITY,
    Line,
    PhasePoint,
    apply_linear,
    check_unit_determinant,
    circle,
    circle_grid,
    circle_of,
    enumerate_striations,
    line_points,
    linear_grid_indices,
    striation_labels,
)


def pt(f, q, p):
    return PhasePoint(f.element(q), f.element(p))


@pytest.mark.parametrize("d", [3, 7, 9, 27])
def test_striations_partition_the_plane(d):
    f = field_for_order(d)
    strs = enumerate_striations(f)
    assert len(strs) == d + 1
    assert strs[-1].slope is INFINITY
    for s in strs:
        seen = [pp.index for line in s.lines for pp in line_points(line)]
        assert len(seen) == d * d and len(set(seen)) == d * d


def test_lines_meet_once_unless_parallel(F7):
    lines = [line for s in enumerate_striations(F7) for line in s.lines]
    sets = {line: {pp.index for pp in line_points(line)} for line in lines}
    for a, b in itertools.combinations(lines, 2):
        n = len(sets[a] & sets[b])
        assert n == (0 if a.is_parallel(b) else 1)


def test_line_membership_examples(F7):
    line = Line(F7.element(2), F7.element(3))
    assert line.contains(pt(F7, 1, 5))
    assert not line.contains(pt(F7, 1, 4))
    vert = Line(INFINITY, F7.element(4))
    assert vert.contains(pt(F7, 4, 6))
    assert all(line.contains(pp) for pp in line_points(line))


@pytest.mark.parametrize("d", [7, 27])
def test_striation_labels_match_line_points(d):
    f = field_for_order(d)
    for s in enumerate_striations(f)[:: max(1, d // 5)] + [enumerate_striations(f)[-1]]:
        labels = striation_labels(f, s.slope)
        for line in s.lines[:3]:
            for pp in line_points(line):
                assert labels[pp.index] == line.b.index


@pytest.mark.parametrize("d", [3, 7, 11, 27])
def test_circle_zero_is_origin_only(d):
    f = field_for_order(d)
    assert [pp.index for pp in circle(f, 0).points] == [(0, 0)]
    sizes = np.bincount(circle_grid(f).ravel(), minlength=d)
    # nonzero circles have d + 1 points when -1 is a non-square
    assert sizes[0] == 1 and np.all(sizes[1:] == d + 1)


def test_circle_grid_matches_scalar(F7):
    g = circle_grid(F7)
    for q, p in itertools.product(range(7), repeat=2):
        assert g[q, p] == circle_of(pt(F7, q, p)).index == (q * q + p * p) % 7


def test_circle_d5_has_nontrivial_zero_circle():
    f = field_for_order(5)
    assert len(circle(f, 0).points) == 9  # 2^2 + 1^2 = 0 in Z_5


def test_unit_determinant_checks(F7):
    e = F7.element
    L = ((e(1), e(1)), (e(0), e(1)))
    assert apply_linear(L, pt(F7, 2, 3)).index == (5, 3)
    with pytest.raises(FieldError):
        check_unit_determinant(((e(2), e(0)), (e(0), e(2))))


def test_linear_maps_preserve_circles_for_rotations(F7):
    # rotations (a, -b; b, a) with a^2 + b^2 = 1 keep q^2 + p^2 fixed
    e = F7.element
    rots = [(a, b) for a, b in itertools.product(range(7), repeat=2) if (a * a + b * b) % 7 == 1]
    assert len(rots) == 8
    g = circle_grid(F7)
    for a, b in rots:
        q2, p2 = linear_grid_indices(F7, ((e(a), -e(b)), (e(b), e(a))))
        assert np.array_equal(g[q2, p2], g)


def test_linear_grid_is_a_permutation(F27):
    e = F27.element
    L = ((e(2), e(5)), (e(0), e(2).inverse()))
    q2, p2 = linear_grid_indices(F27, L)
    flat = (q2 * 27 + p2).ravel()
    assert len(set(flat.tolist())) == 27 * 27
    assert (q2[4, 9], p2[4, 9]) == apply_linear(L, pt(F27, 4, 9)).index
