import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathatlas import Interval, StepCurve, concat, sup_distance
from pathatlas.errors import DimensionError, DomainError
from pathatlas.stepcurves import add, subtract


def step(breaks, values):
    return StepCurve(breaks, values)


class TestEvaluation:
    def test_right_continuity_at_breakpoint(self):
        c = step([0, 0.5, 1], [[1.0], [2.0]])
        assert c.value_at(0.5)[0] == 2.0

    def test_left_continuity_at_right_endpoint(self):
        c = step([0, 0.5, 1], [[1.0], [2.0]])
        assert c.value_at(1.0)[0] == 2.0

    def test_piece_selection_structural(self):
        # for t < hi the piece containing t is the right piece
        c = step([0, 0.25, 0.5, 1], [[1.0], [2.0], [3.0]])
        for t, expect in [(0.0, 0), (0.25, 1), (0.5, 2), (0.75, 2), (1.0, 2)]:
            assert c.piece_index(t) == expect

    def test_left_limit(self):
        c = step([0, 0.5, 1], [[1.0], [2.0]])
        assert c.left_limit(0.5)[0] == 1.0
        assert c.left_limit(1.0)[0] == 2.0

    def test_out_of_domain(self):
        c = step([0, 1], [[1.0]])
        with pytest.raises(DomainError):
            c.value_at(1.5)
        with pytest.raises(DomainError):
            c.value_many([-0.1, 0.5])


class TestCanonicalForm:
    def test_equal_adjacent_values_merge(self):
        c = step([0, 0.3, 0.7, 1], [[1.0], [1.0], [2.0]])
        assert c.n_pieces == 2
        assert list(c.breaks) == [0, 0.7, 1]

    def test_structural_equality(self):
        a = step([0, 0.5, 1], [[1.0], [2.0]])
        b = step([0, 0.25, 0.5, 1], [[1.0], [1.0], [2.0]])
        assert a == b

    def test_validation(self):
        with pytest.raises(DomainError):
            step([0, 0, 1], [[1.0], [2.0]])
        with pytest.raises(DimensionError):
            step([0, 1], [[1.0], [2.0]])


class TestNormAndConcat:
    def test_norm_is_max_abs_value(self):
        assert step([0, 0.5, 1], [[-3.0], [2.0]]).sup_norm() == 3.0

    def test_concat_values_and_junction(self):
        c1 = step([0, 0.25, 0.5], [[1.0], [3.0]])
        c2 = step([0.5, 1], [[2.0]])
        c = concat(c1, c2)
        assert c.sup_norm() == 3.0 == max(c1.sup_norm(), c2.sup_norm())
        assert c.value_at(0.5)[0] == 2.0  # second curve wins at the junction

    def test_concat_restrict_round_trip(self):
        c1 = step([0, 0.25, 0.5], [[1.0], [3.0]])
        c2 = step([0.5, 1], [[2.0]])
        c = concat(c1, c2)
        assert c.restrict(Interval(0, 0.5)) == c1
        assert c.restrict(Interval(0.5, 1)) == c2
        # left limit is restored at the cut
        assert c.restrict(Interval(0, 0.5)).value_at(0.5)[0] == 3.0

    def test_concat_requires_adjacency(self):
        with pytest.raises(DomainError):
            concat(step([0, 0.4], [[1.0]]), step([0.5, 1], [[2.0]]))


class TestRestrict:
    def test_full_domain_identity(self):
        c = step([0, 0.5, 1], [[1.0], [2.0]])
        assert c.restrict(Interval(0, 1)) == c

    def test_restriction_takes_left_limit(self):
        c = step([0, 0.5, 1], [[1.0], [2.0]])
        r = c.restrict(Interval(0, 0.5))
        assert r.value_at(0.5)[0] == 1.0

    def test_restriction_norm_contracts(self):
        c = step([0, 0.5, 1], [[-3.0], [2.0]])
        r = c.restrict(Interval(0, 0.5))
        assert r.sup_norm() == 3.0 <= c.sup_norm()

    def test_not_contained(self):
        c = step([0, 1], [[1.0]])
        with pytest.raises(DomainError):
            c.restrict(Interval(0.5, 1.5))


class TestArithmetic:
    def test_add_refines_breaks(self):
        a = step([0, 0.5, 1], [[1.0], [2.0]])
        b = step([0, 0.25, 1], [[10.0], [20.0]])
        s = add(a, b)
        assert s.value_at(0.0)[0] == 11.0
        assert s.value_at(0.3)[0] == 21.0
        assert s.value_at(0.7)[0] == 22.0

    def test_sup_distance(self):
        a = step([0, 0.5, 1], [[1.0], [2.0]])
        b = step([0, 1], [[1.0]])
        assert sup_distance(a, b) == 1.0
        assert sup_distance(a, a) == 0.0

    def test_subtract_self_is_zero(self):
        a = step([0, 0.3, 1], [[1.0], [2.0]])
        assert subtract(a, a).sup_norm() == 0.0


small_floats = st.floats(min_value=-50, max_value=50, allow_nan=False)


@st.composite
def step_curves(draw, lo=0.0, hi=1.0, d=2):
    n = draw(st.integers(min_value=1, max_value=5))
    inner = sorted(
        draw(
            st.lists(
                st.floats(min_value=lo + 1e-3, max_value=hi - 1e-3),
                min_size=n - 1,
                max_size=n - 1,
                unique=True,
            )
        )
    )
    breaks = [lo, *inner, hi]
    values = [[draw(small_floats) for _ in range(d)] for _ in range(n)]
    return StepCurve(breaks, values)


@given(step_curves(hi=0.5), step_curves(lo=0.5))
def test_concat_isometry_property(c1, c2):
    assert concat(c1, c2).sup_norm() == max(c1.sup_norm(), c2.sup_norm())


@given(step_curves(), st.floats(min_value=0.05, max_value=0.45),
       st.floats(min_value=0.55, max_value=0.95))
def test_restriction_contraction_property(c, a, b):
    assert c.restrict(Interval(a, b)).sup_norm() <= c.sup_norm()


@given(step_curves())
def test_values_subset_under_restriction(c):
    r = c.restrict(Interval(0.25, 0.75))
    full = {tuple(v) for v in c.values}
    assert {tuple(v) for v in r.values} <= full
