import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from framelab.geometry import (
    HALFPLANE,
    PLANE,
    PhasePoint,
    affine_compose,
    affine_inverse,
    affine_inverse_apply,
    ball_area,
    distance,
    hyperbolic_ball_area,
    hyperbolic_distance,
    identity,
    measure_weight,
    pseudo_hyperbolic,
    twisted_translate,
)


def H(x, y):
    return PhasePoint(x, y, HALFPLANE)


def same(p, q, tol=1e-12):
    return abs(p.x - q.x) <= tol and abs(p.y - q.y) <= tol


_x = st.floats(-5, 5)
_y = st.floats(0.1, 10)
_hp = st.builds(H, _x, _y)


def test_compose_examples():
    z = H(0.3, 1.7)
    assert same(affine_compose(identity(HALFPLANE), z), z)
    assert same(affine_compose(H(1, 2), H(3, 4)), H(7, 8))
    assert same(affine_compose(z, affine_inverse(z)), H(0, 1))


def test_inverse_apply_examples():
    z = H(-1.2, 0.4)
    assert same(affine_inverse_apply(z, z), H(0, 1))
    assert same(affine_inverse_apply(H(0, 2), H(2, 4)), H(1, 2))
    assert same(affine_inverse_apply(H(0, 1), z), z)


def test_halfplane_requires_positive_y():
    with pytest.raises(ValueError):
        H(0.0, 0.0)
    with pytest.raises(ValueError):
        PhasePoint(0.0, 1.0, "torus")


@settings(max_examples=60, deadline=None)
@given(_hp, _hp, _hp)
def test_group_axioms(a, b, c):
    left = affine_compose(affine_compose(a, b), c)
    right = affine_compose(a, affine_compose(b, c))
    assert math.isclose(left.x, right.x, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(left.y, right.y, rel_tol=1e-12)
    e = affine_compose(a, affine_inverse(a))
    assert abs(e.x) <= 1e-12 and abs(e.y - 1) <= 1e-12
    assert same(affine_compose(identity(HALFPLANE), a), a)


def test_distance_examples():
    z = H(0.5, 2.0)
    assert hyperbolic_distance(z, z) == 0.0
    # full metric |dz|/y: d(i, yi) = |log y|; the pseudo-hyperbolic value is 1/3
    assert pseudo_hyperbolic(1j, 2j) == pytest.approx(1 / 3)
    assert hyperbolic_distance(H(0, 1), H(0, 2)) == pytest.approx(math.log(2), abs=1e-12)
    d = pseudo_hyperbolic(1j, 2j)
    assert hyperbolic_distance(H(0, 1), H(0, 2)) == pytest.approx(math.log((1 + d) / (1 - d)), abs=1e-12)


@pytest.mark.parametrize("y", [0.1, 0.5, 3.0, 40.0])
def test_distance_vertical_oracle(y):
    assert hyperbolic_distance(H(0, 1), H(0, y)) == pytest.approx(abs(math.log(y)), abs=1e-12)


def test_mixed_geometry_rejected():
    with pytest.raises(ValueError):
        distance(PhasePoint(0, 1), H(0, 1))
    with pytest.raises(ValueError):
        hyperbolic_distance(PhasePoint(0, 1), PhasePoint(0, 2))


@settings(max_examples=80, deadline=None)
@given(_hp, _hp, _hp)
def test_metric_properties(a, b, c):
    ab, bc, ac = hyperbolic_distance(a, b), hyperbolic_distance(b, c), hyperbolic_distance(a, c)
    assert ab >= 0
    assert ab == pytest.approx(hyperbolic_distance(b, a), abs=1e-12)
    assert ac <= ab + bc + 1e-9


@settings(max_examples=80, deadline=None)
@given(_hp, _hp, _hp)
def test_left_invariance(w, a, b):
    d0 = hyperbolic_distance(a, b)
    d1 = hyperbolic_distance(affine_compose(w, a), affine_compose(w, b))
    assert d1 == pytest.approx(d0, abs=1e-9, rel=1e-9)


def _ball_measure(r):
    # B(i, r) is the Euclidean disk centred at i cosh r with radius sinh r
    c, s = math.cosh(r), math.sinh(r)

    def inner(y):
        half = math.sqrt(max(s * s - (y - c) ** 2, 0.0))
        return 2 * half / (y * y)

    val, _ = integrate.quad(inner, c - s, c + s, limit=200)
    return val


def test_ball_area_examples():
    assert hyperbolic_ball_area(1.0) == pytest.approx(3.4123, abs=1e-4)
    # 4 pi sinh(1)^2 = 17.35539; the oracle is direct integration of dmu over the ball
    assert hyperbolic_ball_area(2.0) == pytest.approx(17.35539, abs=1e-4)
    assert hyperbolic_ball_area(2.0) == pytest.approx(_ball_measure(2.0), rel=1e-8)
    assert _ball_measure(1.0) == pytest.approx(3.4123, rel=1e-2)


def test_ball_area_small_radius():
    for r in (1e-2, 1e-3, 1e-4):
        assert hyperbolic_ball_area(r) / (math.pi * r * r) == pytest.approx(1.0, abs=r)
    assert ball_area(2.0, PLANE) == pytest.approx(4 * math.pi)
    with pytest.raises(ValueError):
        hyperbolic_ball_area(0.0)


def test_ball_area_matches_metric_by_grid_count():
    # count dmu-mass of grid cells whose centres are within r of i
    r = 1.0
    h = 0.005
    xs = np.arange(-2, 2, h) + h / 2
    ys = np.arange(0.3, 3, h) + h / 2
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    d = np.arccosh(1 + (X**2 + (Y - 1) ** 2) / (2 * Y))
    mass = np.sum((d < r) * h * h / Y**2)
    assert mass == pytest.approx(hyperbolic_ball_area(r), rel=1e-2)


def test_measure_weight():
    assert measure_weight(PhasePoint(3.0, -7.0)) == 1.0
    assert measure_weight(H(0, 2)) == 0.25


def _F(x, y):
    return np.exp(-np.pi * (x**2 + y**2) / 2) * np.exp(1j * np.pi * x * y) * (1 + x)


def test_twisted_translate_identity_and_modulus():
    x = np.linspace(-2, 2, 21)
    X, Y = np.meshgrid(x, x, indexing="ij")
    T0 = twisted_translate(_F, PhasePoint(0, 0))
    np.testing.assert_allclose(T0(X, Y), _F(X, Y))
    z0 = PhasePoint(0.7, -0.4)
    T = twisted_translate(_F, z0)
    np.testing.assert_allclose(np.abs(T(X, Y)), np.abs(_F(X - 0.7, Y + 0.4)), atol=1e-14)
    with pytest.raises(ValueError):
        twisted_translate(_F, H(0, 1))


def test_twisted_translate_preserves_l2():
    h = 0.02
    x = np.arange(-7, 7, h) + h / 2
    X, Y = np.meshgrid(x, x, indexing="ij")
    n0 = np.sum(np.abs(_F(X, Y)) ** 2) * h * h
    n1 = np.sum(np.abs(twisted_translate(_F, PhasePoint(1.1, 0.6))(X, Y)) ** 2) * h * h
    assert n1 == pytest.approx(n0, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(_x, _x, _x, _x)
def test_twisted_translate_composition(a, b, c, d):
    x = np.linspace(-3, 3, 7)
    X, Y = np.meshgrid(x, x, indexing="ij")
    twice = twisted_translate(twisted_translate(_F, PhasePoint(a, b)), PhasePoint(c, d))
    once = twisted_translate(_F, PhasePoint(a + c, b + d))
    np.testing.assert_allclose(np.abs(twice(X, Y)), np.abs(once(X, Y)), atol=1e-12)
