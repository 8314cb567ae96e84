import numpy as np
import pytest

from pathatlas.errors import ChartError
from pathatlas.manifolds import (
    CatalogError,
    Point,
    builtin,
    margin_soundness,
    sample_overlap,
    validate_bundle,
    validate_manifold,
)

ALL_MANIFOLDS = ["euclidean", "circle-two-arcs", "sphere-stereo", "torus"]


class TestCatalog:
    def test_euclidean_single_chart(self):
        m = builtin("euclidean", {"m": 2})
        assert m.dim == 2 and m.chart_ids == ["0"]
        p = Point("0", [1.0, 2.0])
        assert m.convert_point(p, "0") == p

    def test_sphere_transition_is_inversion(self, rng):
        sp = builtin("sphere-stereo")
        pts = sp.charts["n"].sample(rng, 50)
        pts = pts[sp.transition("n", "s").contains(pts)]
        out = sp.transition("n", "s")(pts)
        expected = pts / np.sum(pts * pts, axis=1, keepdims=True)
        assert np.max(np.abs(out - expected)) == 0.0

    def test_unit_circle_fixed_by_inversion(self):
        sp = builtin("sphere-stereo")
        q = sp.convert_point(Point("n", [1.0, 0.0]), "s")
        assert q.chart == "s" and np.allclose(q.coords, [1.0, 0.0])

    def test_inversion_self_inverse_at_samples(self, rng):
        sp = builtin("sphere-stereo")
        pts = sample_overlap(sp, "n", "s", rng, 200)
        back = sp.transition("s", "n")(sp.transition("n", "s")(pts))
        assert np.max(np.abs(back - pts)) < 1e-10

    def test_moebius_cocycle_signs(self):
        mo = builtin("moebius-line-bundle")
        g = mo.cocycle("a", "b")
        assert g(np.array([1.5]))[0, 0] == -1.0
        assert g(np.array([-1.5]))[0, 0] == 1.0
        gb = mo.cocycle("b", "a")
        assert gb(np.array([-1.5]))[0, 0] == -1.0
        assert gb(np.array([1.5]))[0, 0] == 1.0

    def test_unknown_name(self):
        with pytest.raises(CatalogError):
            builtin("klein-bottle")

    def test_point_not_in_overlap(self):
        sp = builtin("sphere-stereo")
        with pytest.raises(ChartError):
            sp.convert_point(Point("n", [0.0, 0.0]), "s")


class TestAtlasInvariants:
    @pytest.mark.parametrize("name", ALL_MANIFOLDS)
    def test_sampled_invariants(self, name, rng):
        params = {"m": 2, "radius": 3.0} if name == "euclidean" else {}
        m = builtin(name, params)
        for cname, err in validate_manifold(m, rng, n=300):
            if "jacobian-fd" in cname:
                assert err < 1e-5, (cname, err)
            elif "margin" in cname:
                assert err == 0.0, (cname, err)
            else:
                assert err < 1e-8, (cname, err)

    @pytest.mark.parametrize(
        "bname,params",
        [
            ("trivial-bundle", {"base": "sphere-stereo", "d": 2}),
            ("tangent-bundle", {"base": "sphere-stereo"}),
            ("tangent-bundle", {"base": "torus"}),
            ("moebius-line-bundle", {}),
        ],
    )
    def test_bundle_invariants(self, bname, params, rng):
        b = builtin(bname, params)
        for cname, err in validate_bundle(b, rng, n=300):
            if cname.startswith("invertible"):
                assert np.isfinite(err)
            else:
                assert err < 1e-8, (cname, err)

    def test_margin_soundness_ball_sampling(self, rng):
        for name in ALL_MANIFOLDS:
            params = {"m": 2, "radius": 3.0} if name == "euclidean" else {}
            for cname, frac_outside in margin_soundness(builtin(name, params), rng, n=40):
                assert frac_outside == 0.0, (name, cname)


class TestTangentCocycle:
    def test_identity_chart(self):
        sp = builtin("sphere-stereo")
        J = sp.tangent_cocycle("n", "n", np.array([1.0, 2.0]))
        assert np.array_equal(J, np.eye(2))

    def test_affine_transition_constant_jacobian(self, rng):
        # torus transitions are coordinate shifts: jacobian is the identity
        to = builtin("torus")
        pts = sample_overlap(to, "00", "10", rng, 20)
        for x in pts:
            assert np.array_equal(to.tangent_cocycle("00", "10", x), np.eye(2))

    def test_against_finite_difference_oracle(self, rng):
        sp = builtin("sphere-stereo")
        pts = sample_overlap(sp, "n", "s", rng, 40)
        t = sp.transition("n", "s")
        h = 1e-6
        for x in pts:
            J = sp.tangent_cocycle("n", "s", x)
            fd = np.zeros((2, 2))
            for j in range(2):
                e = np.zeros(2)
                e[j] = h
                fd[:, j] = (t(x + e) - t(x - e)) / (2 * h)
            denom = max(1.0, np.max(np.abs(J)))
            assert np.max(np.abs(J - fd)) / denom < 1e-6
