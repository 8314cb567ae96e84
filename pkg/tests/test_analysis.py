import numpy as np
import pytest
from fractions import Fraction

from pathatlas import (
    Interval,
    RegCurve,
    SmoothMap,
    SmoothScalarRepar,
    StepCurve,
    change_of_variables,
    compose_smooth,
    image_net,
    primitive,
    step_approximate,
)
from pathatlas.errors import BudgetError, DomainError


def square_map():
    return SmoothMap(
        1, 1,
        lambda p: p ** 2,
        jacobian=lambda p: (2 * p)[:, :, None],
        hessian=lambda p: np.full((len(p), 1, 1, 1), 2.0),
        name="square",
    )


class TestComposeSmooth:
    def test_step_exact(self):
        c = StepCurve([0, 0.5, 1], [[1.0], [3.0]])
        assert compose_smooth(square_map(), c) == StepCurve([0, 0.5, 1], [[1.0], [9.0]])

    def test_identity_map(self):
        c = StepCurve([0, 0.5, 1], [[1.0], [3.0]])
        assert compose_smooth(SmoothMap.identity(1), c) == c

    def test_order1_against_closed_form(self):
        # f(x) = x^2, c(t) = t: result must match t^2 with derivative 2t
        tol = 1e-5
        c = primitive(StepCurve.constant(Interval(0, 1), [1.0]), [0.0])
        out = compose_smooth(square_map(), c, tol=tol)
        ts = np.linspace(0, 1, 1234)
        assert np.max(np.abs(out.eval_many(ts)[:, 0] - ts ** 2)) <= tol
        assert np.max(np.abs(out.top.value_many(ts)[:, 0] - 2 * ts)) <= tol

    def test_certified_against_fine_grid_oracle(self, rng):
        # random piecewise-linear curve through the plane inversion map
        inv = SmoothMap(
            2, 2,
            lambda p: p / np.sum(p * p, axis=1, keepdims=True),
            name="inversion-fd",
            domain=lambda p: np.sum(p * p, axis=1) > 1e-4,
        )
        tol = 1e-4
        for _ in range(5):
            breaks = np.unique(np.concatenate([[0], np.sort(rng.uniform(0, 1, 2)), [1]]))
            u = StepCurve(breaks, rng.uniform(-0.4, 0.4, (len(breaks) - 1, 2)))
            c = primitive(u, [1.2, 0.5])
            out = compose_smooth(inv, c, tol=tol)
            ts = np.linspace(0, 1, 3000)
            x = c.eval_many(ts)
            exact = x / np.sum(x * x, axis=1, keepdims=True)
            # integrated values inherit the certified derivative tolerance
            assert np.max(np.abs(out.eval_many(ts) - exact)) <= 2 * tol

    def test_budget_error(self):
        c = primitive(StepCurve.constant(Interval(0, 1), [1.0]), [0.0])
        with pytest.raises(BudgetError):
            compose_smooth(square_map(), c, tol=1e-12, piece_budget=100)

    def test_escaping_domain_rejected(self):
        half = SmoothMap(1, 1, lambda p: p, domain=lambda p: p[:, 0] > 0.0,
                         margin=lambda p: p[:, 0])
        c = StepCurve([0, 0.5, 1], [[1.0], [-1.0]])
        with pytest.raises(DomainError):
            compose_smooth(half, c)

    def test_order2_composition(self):
        # c(t) = t on [0,1] as an order-2 curve; f = square: (f o c)'' = 2
        c = RegCurve((np.array([0.0]), np.array([1.0])),
                     StepCurve.constant(Interval(0, 1), [0.0]))
        out = compose_smooth(square_map(), c, tol=1e-8)
        assert out.order == 2
        ts = np.linspace(0, 1, 500)
        assert np.max(np.abs(out.eval_many(ts)[:, 0] - ts ** 2)) < 1e-8
        assert np.max(np.abs(out.eval_many(ts, 2)[:, 0] - 2.0)) < 1e-8


def rational_direct_integral(c, top, x0):
    """Independent oracle: direct rational integral over the image interval."""
    fb = [Fraction(float(b)) for b in top.breaks]
    slopes = [Fraction(float(v[0])) for v in top.values]
    nodes = [Fraction(float(x0))]
    for (a, b), m in zip(zip(fb, fb[1:]), slopes):
        nodes.append(nodes[-1] + m * (b - a))
    lo, hi = min(nodes[0], nodes[-1]), max(nodes[0], nodes[-1])
    sgn = 1 if nodes[-1] >= nodes[0] else -1
    cb = [Fraction(float(b)) for b in c.breaks]
    total = [Fraction(0)] * c.dim
    for i in range(len(c.values)):
        a, b = max(cb[i], lo), min(cb[i + 1], hi)
        if b > a:
            for j in range(c.dim):
                total[j] += (b - a) * Fraction(float(c.values[i][j]))
    return np.array([sgn * float(x) for x in total])


class TestChangeOfVariables:
    def test_affine_substitution(self):
        phi = SmoothScalarRepar(primitive(StepCurve.constant(Interval(0, 0.5), [2.0]), [0.0]))
        c = StepCurve.constant(Interval(0, 1), [3.25])
        assert change_of_variables(c, phi)[0] == 3.25

    def test_identity_substitution(self):
        phi = SmoothScalarRepar(primitive(StepCurve.constant(Interval(0, 1), [1.0]), [0.0]))
        c = StepCurve([0, 0.5, 1], [[1.0], [-1.0]])
        assert change_of_variables(c, phi)[0] == c.integral()[0]

    def test_exact_equals_rational_oracle(self, rng):
        for trial in range(60):
            breaks = np.unique(np.concatenate([[0], np.sort(rng.uniform(0, 1, 4)), [1]]))
            c = StepCurve(breaks, rng.uniform(-3, 3, (len(breaks) - 1, 2)))
            pb = np.unique(np.concatenate([[0.1], np.sort(rng.uniform(0.1, 0.7, 2)), [0.7]]))
            sgn = 1.0 if trial % 2 == 0 else -1.0
            top = StepCurve(pb, sgn * rng.uniform(0.2, 0.9, (len(pb) - 1, 1)))
            x0 = rng.uniform(0.35, 0.6)
            curve = primitive(top, [x0])
            ends = [curve.eval(0.1)[0], curve.eval(0.7)[0]]
            if min(ends) < 0.0 or max(ends) > 1.0:
                continue
            phi = SmoothScalarRepar(curve)
            assert np.array_equal(change_of_variables(c, phi),
                                  rational_direct_integral(c, top, x0))

    def test_nonlinear_phi_certified(self):
        # phi(s) = s^2 on [0.1, 1] with a monotonicity certificate
        phi = SmoothScalarRepar(
            RegCurve((np.array([0.01]), np.array([0.2])),
                     StepCurve.constant(Interval(0.1, 1.0), [2.0]))
        )
        c = StepCurve([0, 0.5, 1], [[1.0], [-1.0]])
        lhs = change_of_variables(c, phi, tol=1e-12)
        direct = c.restrict(Interval(0.01, 1.0)).integral()
        assert abs(lhs[0] - direct[0]) < 1e-10

    def test_range_escape(self):
        phi = SmoothScalarRepar(primitive(StepCurve.constant(Interval(0, 1), [3.0]), [0.0]))
        c = StepCurve.constant(Interval(0, 1), [1.0])
        with pytest.raises(DomainError):
            change_of_variables(c, phi)


class TestImageNet:
    def test_step_net_is_value_set(self):
        c = StepCurve([0, 0.5, 1], [[1.0], [3.0]])
        assert sorted(image_net(c, 0.5).ravel().tolist()) == [1.0, 3.0]

    def test_linear_curve_grid_count(self):
        c = primitive(StepCurve.constant(Interval(0, 1), [1.0]), [0.0])
        net = image_net(c, 0.1)
        assert len(net) <= 11

    def test_constant_singleton(self):
        c = StepCurve.constant(Interval(0, 1), [7.0])
        assert image_net(c, 1e-3).shape == (1, 1)

    def test_covering_property(self, rng):
        for _ in range(10):
            breaks = np.unique(np.concatenate([[0], np.sort(rng.uniform(0, 1, 3)), [1]]))
            u = StepCurve(breaks, rng.uniform(-2, 2, (len(breaks) - 1, 2)))
            c = primitive(u, rng.uniform(-1, 1, 2))
            eps = 0.05
            net = image_net(c, eps)
            ts = np.linspace(0, 1, 2000)
            vals = c.eval_many(ts)
            dist = np.min(
                np.max(np.abs(vals[:, None, :] - net[None, :, :]), axis=2), axis=1
            )
            assert np.max(dist) <= eps


class TestStepApproximate:
    def test_linear_with_lipschitz(self):
        approx = step_approximate(lambda ts: ts[:, None], 0.25,
                                  domain=Interval(0, 1), lipschitz=1.0)
        assert approx.n_pieces == 4
        ts = np.linspace(0, 1, 1500)
        assert np.max(np.abs(approx.value_many(ts)[:, 0] - ts)) <= 0.25

    def test_step_input_passthrough(self):
        c = StepCurve([0, 0.5, 1], [[1.0], [2.0]])
        assert step_approximate(c, 0.1) is c

    def test_constant_callback_one_piece(self):
        approx = step_approximate(lambda ts: np.full((len(ts), 1), 5.0), 0.1,
                                  domain=Interval(0, 1), lipschitz=0.0)
        assert approx.n_pieces == 1

    def test_modulus_driven(self):
        approx = step_approximate(lambda ts: np.sqrt(ts)[:, None], 0.1,
                                  domain=Interval(0, 1), modulus=lambda h: np.sqrt(h))
        ts = np.linspace(0, 1, 1500)
        assert np.max(np.abs(approx.value_many(ts)[:, 0] - np.sqrt(ts))) <= 0.1

    def test_budget_exhaustion_without_certificate(self):
        rng = np.random.default_rng(0)
        with pytest.raises(BudgetError):
            step_approximate(lambda ts: rng.uniform(-1, 1, (len(ts), 1)), 1e-6,
                             domain=Interval(0, 1), max_pieces=64)

    def test_regcurve_input(self):
        c = primitive(StepCurve([0, 0.5, 1], [[1.0], [-1.0]]), [0.0])
        approx = step_approximate(c, 0.05)
        ts = np.linspace(0, 1, 1500)
        assert np.max(np.abs(approx.value_many(ts) - c.eval_many(ts))) <= 0.05
