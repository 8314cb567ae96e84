import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathatlas import (
    Interval,
    LinearCurve,
    RegCurve,
    SmoothScalarRepar,
    StepCurve,
    derivative_split,
    linear_push,
    primitive,
    reparametrize_affine,
)
from pathatlas.errors import DimensionError, MonotonicityError, OrderError


def const_step(lo, hi, v):
    return StepCurve.constant(Interval(lo, hi), v)


class TestEvaluation:
    def test_order1_evaluation(self):
        c = primitive(const_step(0, 1, [2.0]), [1.0])
        assert c.eval(0.5)[0] == 2.0  # 1 + 2*0.5
        assert c.eval(1.0)[0] == 3.0
        assert c.eval(0.5, 1)[0] == 2.0

    def test_derivative_order_error(self):
        c = primitive(const_step(0, 1, [2.0]), [1.0])
        with pytest.raises(OrderError):
            c.eval(0.5, 2)

    def test_top_derivative_is_cadlag(self):
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0])
        assert c.eval(0.5, 1)[0] == -1.0
        assert c.eval(1.0, 1)[0] == -1.0


class TestNorm:
    def test_constant_derivative(self):
        # c(t) = t: max(sup |t|, sup |1|) = 1
        c = primitive(const_step(0, 1, [1.0]), [0.0])
        assert c.norm() == 1.0

    def test_tent_norm_against_grid_oracle(self):
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0])
        # oracle: dense grid evaluation of both derivatives
        ts = np.linspace(0, 1, 10001)
        grid = max(np.max(np.abs(c.eval_many(ts))), np.max(np.abs(c.eval_many(ts, 1))))
        assert c.norm() == 1.0
        assert grid <= c.norm() <= grid + 1e-3

    def test_quadratic_interior_max(self):
        # c'' = -2 on [0,1], c'(0)=2, c(0)=0: c(t)=2t-t^2, peak 1 at t=1
        c = RegCurve((np.array([0.0]), np.array([2.0])), const_step(0, 1, [-2.0]))
        assert c.eval(1.0)[0] == 1.0
        # interior max of c' is at t=0: 2; norm = max(sup c, sup c', sup c'')
        assert c.norm() == 2.0
        # peak of the quadratic at the right endpoint, interior critical point of
        # a shifted version is found exactly
        c2 = RegCurve((np.array([0.0]), np.array([1.0])), const_step(0, 1, [-2.0]))
        # c2(t) = t - t^2, max 0.25 at t=0.5
        assert c2.norm(0) == 0.25


class TestPrimitiveSplit:
    def test_primitive_of_constant(self):
        c = primitive(const_step(0, 1, [2.0]), [1.0])
        assert c.eval(1.0)[0] == 3.0

    def test_tent_by_hand(self):
        # oracle: piecewise integration by hand gives peak 0.5 at t=0.5
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0])
        assert c.eval(0.5)[0] == 0.5
        assert c.eval(1.0)[0] == 0.0

    def test_zero_step_gives_constant(self):
        v = np.array([3.0, -1.0])
        c = primitive(const_step(0, 1, [0.0, 0.0]), v)
        assert np.array_equal(c.eval(0.77), v)

    def test_split_of_line(self):
        c = primitive(const_step(0, 1, [2.0]), [1.0])
        x0, u = derivative_split(c)
        assert x0[0] == 1.0
        assert u == const_step(0, 1, [2.0])

    def test_split_primitive_identity(self, rng):
        for _ in range(50):
            breaks = np.unique(np.concatenate([[0], np.sort(rng.uniform(0, 1, 3)), [1]]))
            u = StepCurve(breaks, rng.uniform(-5, 5, (len(breaks) - 1, 2)))
            x = rng.uniform(-5, 5, 2)
            c = primitive(u, x)
            x2, u2 = derivative_split(c)
            assert np.array_equal(x, x2) and u2 == u
            assert primitive(u2, x2) == c

    def test_split_requires_order(self):
        with pytest.raises(OrderError):
            derivative_split(const_step(0, 1, [1.0]))

    def test_paper_style_bounds(self):
        # |x| + |u| <= 2 |||c|||^1 and |||primitive|||^1 <= (1+len)(|x|+|u|)
        u = const_step(0, 1, [2.0])
        c = primitive(u, [1.0])
        assert c.norm() == 3.0
        assert 1.0 + 2.0 <= 2.0 * c.norm()
        assert c.norm() <= (1.0 + 1.0) * (1.0 + 2.0)


class TestRestrict:
    def test_restriction_evaluates_identically(self):
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0])
        r = c.restrict(Interval(0.2, 0.8))
        for t in [0.2, 0.35, 0.5, 0.64, 0.8]:
            assert np.array_equal(r.eval(t), c.eval(t))

    def test_full_restriction_identity(self):
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0])
        r = c.restrict(Interval(0, 1))
        assert r == c

    @given(st.floats(min_value=0.01, max_value=0.49),
           st.floats(min_value=0.51, max_value=0.99))
    def test_contraction_order2(self, a, b):
        top = StepCurve([0, 0.3, 1], [[2.0], [-1.5]])
        c = RegCurve((np.array([0.4]), np.array([-1.0])), top)
        assert c.restrict(Interval(a, b)).norm() <= c.norm()


class TestLinearPush:
    def test_scaling(self):
        c = StepCurve([0, 0.5, 1], [[1.0], [3.0]])
        assert linear_push(2.0 * np.eye(1), c) == StepCurve([0, 0.5, 1], [[2.0], [6.0]])

    def test_zero_map(self):
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [3.0]]), [1.0])
        z = linear_push(np.zeros((1, 1)), c)
        assert z.norm() == 0.0

    def test_commutes_with_primitive_structurally(self, rng):
        for _ in range(50):
            A = rng.uniform(-2, 2, (3, 2))
            breaks = np.unique(np.concatenate([[0], np.sort(rng.uniform(0, 1, 2)), [1]]))
            u = StepCurve(breaks, rng.uniform(-3, 3, (len(breaks) - 1, 2)))
            x = rng.uniform(-1, 1, 2)
            lhs = primitive(u, x).push(A)
            rhs = primitive(u.push(A), A @ x)
            assert lhs == rhs
            assert np.array_equal(lhs.eval(1.0), rhs.eval(1.0))

    def test_shape_mismatch(self):
        c = StepCurve([0, 1], [[1.0, 2.0]])
        with pytest.raises(DimensionError):
            linear_push(np.eye(3), c)


class TestReparametrize:
    def test_domain_change(self):
        c = StepCurve([2, 3, 4], [[1.0], [2.0]])
        r = reparametrize_affine(c, Interval(0, 1))
        assert r.domain == Interval(0, 1)
        assert r.value_at(0.25)[0] == 1.0
        assert r.value_at(0.75)[0] == 2.0

    def test_identity_target(self):
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0])
        assert reparametrize_affine(c, Interval(0, 1)) == c

    def test_chain_rule_scaling(self):
        # oracle: chain rule by hand; halving the domain doubles the slope
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0])
        r = reparametrize_affine(c, Interval(0, 0.5))
        assert np.array_equal(r.top.values, 2.0 * c.top.values)
        assert r.eval(0.25)[0] == c.eval(0.5)[0]


class TestCkMode:
    def test_ck_primitive_is_c1(self):
        top = LinearCurve([0, 0.5, 1], [[0.0], [1.0], [0.0]])
        c = primitive(top, [0.0])
        assert c.mode == "ck"
        # derivative is continuous at the node
        eps = 1e-9
        assert abs(c.eval(0.5 - eps, 1)[0] - c.eval(0.5 + eps, 1)[0]) < 1e-8

    def test_ck_norm_exact(self):
        top = LinearCurve([0, 1], [[0.0], [2.0]])
        c = primitive(top, [0.0])  # c(t) = t^2, c' = 2t
        assert c.norm() == 2.0
        assert c.eval(1.0)[0] == 1.0

    def test_ck_restrict_contracts(self):
        top = LinearCurve([0, 0.4, 1], [[1.0], [-2.0], [0.5]])
        c = primitive(top, [0.3])
        assert c.restrict(Interval(0.1, 0.8)).norm() <= c.norm()

    def test_linear_value_never_overshoots(self):
        top = LinearCurve([0, 1], [[1.0], [3.0]])
        ts = np.linspace(0, 1, 1001)
        vals = top.value_many(ts)
        assert np.all(vals >= 1.0) and np.all(vals <= 3.0)


class TestScalarRepar:
    def test_certificate_records_slope(self):
        phi = SmoothScalarRepar(primitive(const_step(0, 0.5, [2.0]), [0.0]))
        assert phi.slope_min == 2.0 and phi.sign == 1

    def test_sign_flip_rejected(self):
        with pytest.raises(MonotonicityError):
            SmoothScalarRepar(primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0]))

    def test_order2_certificate(self):
        # phi(s) = s^2 on [0.1, 1]: phi' = 2s >= 0.2
        phi = SmoothScalarRepar(
            RegCurve((np.array([0.01]), np.array([0.2])),
                     StepCurve.constant(Interval(0.1, 1.0), [2.0]))
        )
        assert phi.sign == 1
        assert abs(phi.slope_min - 0.2) < 1e-15
