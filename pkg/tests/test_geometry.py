import math

import numpy as np
import pytest

from junctionflow.errors import DegenerateParametrization, EmptyInput, IndexOutOfRange
from junctionflow.geometry import (
    Curve,
    Network,
    curvature_vector,
    hausdorff_distance,
    holder_seminorm,
    length,
    tangent_at_junction,
)


def segment(a, b, n):
    x = np.linspace(0.0, 1.0, n)[:, None]
    return Curve((1 - x) * np.asarray(a, float) + x * np.asarray(b, float))


class TestCurveInvariants:
    def test_needs_three_samples(self):
        with pytest.raises(ValueError):
            Curve(np.array([[0.0, 0.0], [1.0, 0.0]]))

    def test_repeated_points_rejected(self):
        pts = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0],
                        [2.0, 0.0]])
        with pytest.raises(DegenerateParametrization):
            Curve(pts)

    def test_points_read_only(self):
        c = segment((0, 0), (1, 0), 5)
        with pytest.raises(ValueError):
            c.points[0, 0] = 3.0


class TestNetworkInvariants:
    def test_junction_must_cohere(self):
        good = segment((0, 0), (1, 0), 5)
        bad = segment((1e-6, 0), (0, 1), 5)
        other = segment((0, 0), (-1, 0), 5)
        with pytest.raises(ValueError):
            Network((good, bad, other), np.array([[1, 0], [0, 1], [-1, 0]], float))

    def test_anchors_must_be_distinct(self):
        c1 = segment((0, 0), (1, 0), 5)
        c2 = segment((0, 0), (1, 0), 5)
        c3 = segment((0, 0), (0, 1), 5)
        with pytest.raises(ValueError):
            Network((c1, c2, c3), np.array([[1, 0], [1, 0], [0, 1]], float))


class TestTangentAtJunction:
    def test_horizontal_segment(self):
        assert np.allclose(tangent_at_junction(segment((0, 0), (1, 0), 5)),
                           [1.0, 0.0], atol=1e-14)

    def test_slope_segment(self):
        assert np.allclose(tangent_at_junction(segment((0, 0), (3, 4), 9)),
                           [0.6, 0.8], atol=1e-14)

    def test_quarter_circle_matches_analytic_derivative(self):
        # p(x) = (cos(pi x/2), sin(pi x/2)); p_x(0) = (0, pi/2), unit (0, 1)
        x = np.linspace(0.0, 1.0, 201)
        c = Curve(np.column_stack([np.cos(0.5 * np.pi * x),
                                   np.sin(0.5 * np.pi * x)]))
        assert np.allclose(tangent_at_junction(c), [0.0, 1.0], atol=1e-3)


class TestCurvatureVector:
    def test_straight_segment_is_flat(self):
        c = segment((0, 0), (2, 1), 9)
        for i in range(1, 8):
            assert np.allclose(curvature_vector(c, i), 0.0, atol=1e-10)

    def test_circle_radius_two(self):
        x = np.linspace(0.0, 1.0, 401)
        pts = 2.0 * np.column_stack([np.cos(2 * np.pi * x), np.sin(2 * np.pi * x)])
        c = Curve(pts)
        k = curvature_vector(c, 200)
        assert abs(np.linalg.norm(k) - 0.5) < 1e-3
        inward = -pts[200] / np.linalg.norm(pts[200])
        assert float(k @ inward) > 0.4

    def test_parabola_vertex(self):
        # (x, x^2) with x spanning [-1/2, 1/2]; the vertex is the interior
        # sample nearest the plane point x = 0
        s = np.linspace(0.0, 1.0, 801)
        xs = s - 0.5
        c = Curve(np.column_stack([xs, xs * xs]))
        i = int(np.argmin(np.abs(xs)))
        assert np.allclose(curvature_vector(c, i), [0.0, 2.0], atol=1e-3)

    def test_index_bounds(self):
        c = segment((0, 0), (1, 0), 5)
        with pytest.raises(IndexOutOfRange):
            curvature_vector(c, 0)
        with pytest.raises(IndexOutOfRange):
            curvature_vector(c, 4)

    def test_orthogonal_to_tangent(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            x = np.linspace(0.0, 1.0, 101)
            a, b = rng.uniform(0.5, 2.0, size=2)
            pts = np.column_stack([x + 0.1 * np.sin(a * np.pi * x),
                                   0.3 * np.cos(b * np.pi * x)])
            c = Curve(pts)
            h = c.h
            for i in (25, 50, 75):
                k = curvature_vector(c, i)
                px = (pts[i + 1] - pts[i - 1]) / (2 * h)
                denom = np.linalg.norm(k) * np.linalg.norm(px)
                if denom > 0:
                    assert abs(float(k @ px)) / denom < 1e-8


class TestLength:
    def test_unit_segment(self):
        assert abs(length(segment((0, 0), (1, 0), 33)) - 1.0) < 1e-12

    def test_unit_circle_circumference(self):
        x = np.linspace(0.0, 1.0, 401)
        c = Curve(np.column_stack([np.cos(2 * np.pi * x), np.sin(2 * np.pi * x)]))
        assert abs(length(c) - 2 * np.pi) < 1e-3

    def test_at_least_endpoint_distance(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = np.linspace(0.0, 1.0, 65)
            pts = np.column_stack([x, 0.4 * np.sin(rng.uniform(1, 3) * np.pi * x)])
            c = Curve(pts)
            chord = np.linalg.norm(pts[-1] - pts[0])
            assert length(c) >= chord - 1e-9


class TestHausdorff:
    def test_identical(self):
        c = segment((0, 0), (1, 0), 17)
        assert hausdorff_distance(c, c) == 0.0

    def test_parallel_offset(self):
        a = segment((0, 0), (1, 0), 17)
        b = segment((0, 0.25), (1, 0.25), 17)
        assert abs(hausdorff_distance(a, b) - 0.25) < 1e-14

    def test_reversal_is_zero(self):
        a = segment((0, 0), (1, 1), 17)
        b = segment((1, 1), (0, 0), 17)
        assert hausdorff_distance(a, b) == 0.0


class TestHolderSeminorm:
    def test_linear_function_sqrt_exponent(self):
        T = 2.0
        t = np.linspace(0.0, T, 101)
        est = holder_seminorm(t, t, 0.5)
        assert abs(est.seminorm - math.sqrt(T)) < 1e-12

    def test_constant_is_zero(self):
        t = np.linspace(0.0, 1.0, 50)
        est = holder_seminorm(t, np.ones_like(t), 0.7)
        assert est.seminorm == 0.0

    def test_quadratic_beta_one_brute_force(self):
        t = np.linspace(0.0, 1.0, 201)
        v = t * t
        est = holder_seminorm(t, v, 1.0)
        brute = max(
            abs(v[i] - v[j]) / abs(t[i] - t[j])
            for i in range(len(t))
            for j in range(i + 1, len(t))
        )
        assert est.seminorm == pytest.approx(brute, rel=1e-14)
        assert abs(est.seminorm - 2.0) < 2.0 / 200 + 1e-12

    def test_needs_two_samples(self):
        with pytest.raises(EmptyInput):
            holder_seminorm([0.0], [1.0], 0.5)

    def test_lipschitz_constant_convergence_order(self):
        # beta=1 seminorm of sin on [0, 2] approaches Lip = 1 at order >= 1
        errs = []
        for m in (51, 101, 201):
            t = np.linspace(0.0, 2.0, m)
            errs.append(abs(holder_seminorm(t, np.sin(t), 1.0).seminorm - 1.0))
        order = math.log2(errs[0] / errs[1])
        order2 = math.log2(errs[1] / errs[2])
        assert order >= 0.9 and order2 >= 0.9


class TestZeroAtOriginBound:
    """sup|f| <= T^beta <f>_beta for sampled f with f(0) = 0."""

    def test_hundred_random_polynomials(self):
        rng = np.random.default_rng(42)
        T = 1.7
        t = np.linspace(0.0, T, 64)
        for _ in range(100):
            coef = rng.normal(size=4)
            beta = rng.uniform(0.1, 1.0)
            f = t * np.polyval(coef, t)  # forces f(0) = 0
            est = holder_seminorm(t, f, beta)
            assert np.abs(f).max() <= T**beta * est.seminorm * (1 + 1e-12)


class TestLipschitzComposition:
    """<F o g>_beta <= Lip(F) diam(U)^(alpha-beta) <g>_alpha for beta <= alpha."""

    def test_random_samples(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m = rng.integers(10, 60)
            t = np.sort(rng.uniform(0.0, 3.0, size=m))
            t = np.unique(t)
            if t.size < 3:
                continue
            g = rng.normal(size=t.size).cumsum() * 0.1
            alpha = rng.uniform(0.3, 1.0)
            beta = rng.uniform(0.1, alpha)
            comp = np.sin(g)  # Lip(sin) = 1
            lhs = holder_seminorm(t, comp, beta).seminorm
            rhs = (
                (t[-1] - t[0]) ** (alpha - beta)
                * holder_seminorm(t, g, alpha).seminorm
            )
            assert lhs <= rhs * (1 + 1e-12)
