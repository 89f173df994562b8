import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate

from framelab.signals import (
    DEFAULT_Q,
    QuadratureSpec,
    admissibility,
    analytic_part,
    box,
    fourier,
    fourier_values,
    from_descriptor,
    gaussian,
    hermite,
    inner_product,
    l2_norm,
    mexican_hat,
    nodes,
    normalize_wavelet,
    poisson,
    read_csv,
    sampled,
    write_csv,
)

# -- evaluation --------------------------------------------------------------


def test_gaussian_at_zero():
    assert gaussian()(0.0) == pytest.approx(2**0.25)


def test_box_outside_support_is_zero():
    assert box(1.0)(2.0) == 0.0


def test_poisson_complex_at_zero_is_minus_one():
    # unnormalised: (0 + i)^(-(3+1)/2) = i^-2 = -1
    v = poisson(3.0, "complex")(0.0)
    assert v == pytest.approx(-1.0)


def test_poisson_real_and_imag_parts():
    t = np.linspace(-3, 3, 13)
    z = (t + 1j) ** -2.0
    np.testing.assert_allclose(poisson(3.0, "real")(t), z.real, atol=1e-15)
    np.testing.assert_allclose(poisson(3.0, "imag")(t), z.imag, atol=1e-15)


def test_sampled_interpolates_and_vanishes_outside():
    t = np.linspace(-1, 1, 5)
    s = sampled(t, t**2)
    assert s(0.25) == pytest.approx(0.5 * (0.0 + 0.25))
    assert s(1.5) == 0
    assert s(-1.01) == 0


def test_sampled_rejects_nonuniform_grid():
    with pytest.raises(ValueError):
        sampled([0.0, 0.1, 0.3], [1, 2, 3])


# -- inner products and norms ---------------------------------------------------


def test_gaussian_unit_inner_product():
    assert abs(inner_product(gaussian(), gaussian()) - 1) <= 1e-6


def test_gaussian_translate_inner_product_oracle():
    oracle, _ = integrate.quad(lambda t: math.sqrt(2) * math.exp(-math.pi * t * t - math.pi * (t - 1) ** 2), -10, 10)
    val = inner_product(gaussian(), gaussian().translate(1.0))
    assert val.real == pytest.approx(oracle, abs=1e-9)
    assert val.real == pytest.approx(math.exp(-math.pi / 2), abs=1e-9)


def test_box_unit_norm():
    assert inner_product(box(1.0), box(1.0)).real == pytest.approx(1.0, abs=1e-12)


def test_l2_norm_examples():
    assert l2_norm(gaussian()) == pytest.approx(1.0, abs=1e-6)
    assert l2_norm(gaussian().scaled(2.0)) == pytest.approx(2.0, abs=1e-6)


def test_mexican_hat_norm_refine_oracle():
    fine = DEFAULT_Q.with_(dt=0.001)
    assert l2_norm(mexican_hat()) == pytest.approx(l2_norm(mexican_hat(), fine), abs=1e-5)
    oracle, _ = integrate.quad(lambda t: abs(mexican_hat()(t)) ** 2, -10, 10, limit=200)
    assert l2_norm(mexican_hat()) == pytest.approx(math.sqrt(oracle), abs=1e-5)


def test_disjoint_domains_rejected():
    with pytest.raises(ValueError):
        inner_product(box(1.0), box(1.0).translate(5.0))


_signals = st.sampled_from(["gaussian", "hermite:1", "hermite:4", "box:1", "mexican-hat", "box:0.5"])
_shift = st.floats(-2, 2)


@settings(max_examples=40, deadline=None)
@given(_signals, _signals, _shift, _shift, _shift, _shift)
def test_conjugate_symmetry_and_cauchy_schwarz(a, b, x1, y1, x2, y2):
    f = from_descriptor(a).tf_shift(x1, y1)
    g = from_descriptor(b).tf_shift(x2, y2)
    lo, hi = max(f.support[0], g.support[0]), min(f.support[1], g.support[1])
    assume(hi > lo)
    fg = inner_product(f, g)
    gf = inner_product(g, f)
    assert fg == pytest.approx(np.conj(gf), abs=1e-12)
    assert abs(fg) <= l2_norm(f) * l2_norm(g) + 1e-9


@pytest.mark.parametrize("desc", ["gaussian", "hermite:3", "mexican-hat"])
def test_refinement_convergence(desc):
    f = from_descriptor(desc)
    g = from_descriptor("gaussian").translate(0.3).modulate(0.4)
    coarse = inner_product(f, g, DEFAULT_Q)
    fine = inner_product(f, g, DEFAULT_Q.with_(dt=DEFAULT_Q.dt / 2, R=2 * DEFAULT_Q.R))
    assert abs(coarse - fine) < 1e-10


# -- Fourier ----------------------------------------------------------------------


def test_fourier_of_gaussian_is_gaussian():
    xi = np.linspace(-3, 3, 61)
    F = fourier_values(gaussian(), xi)
    np.testing.assert_allclose(F, 2**0.25 * np.exp(-math.pi * xi**2), atol=1e-10)
    assert np.argmax(np.abs(F)) == 30


def test_fourier_examples_at_zero():
    assert fourier_values(box(1.0), [0.0])[0] == pytest.approx(1.0, abs=1e-12)
    assert abs(fourier_values(mexican_hat(), [0.0])[0]) <= 1e-6


@pytest.mark.parametrize("f", [gaussian(), hermite(2), mexican_hat().modulate(0.5)])
def test_plancherel(f):
    xi = np.arange(-8, 8, 0.01)
    F = fourier(f, xi)
    assert l2_norm(F) == pytest.approx(l2_norm(f), rel=1e-2)


# -- admissibility and normalisation ---------------------------------------------


def test_gaussian_not_admissible():
    a = admissibility(gaussian())
    assert not a.admissible
    assert math.isinf(a.value)


def test_mexican_hat_admissibility_stable_under_refinement():
    a = admissibility(mexican_hat()).value
    b = admissibility(mexican_hat(), DEFAULT_Q.with_(dt=0.01), n_xi=960).value
    assert 0 < a < math.inf
    assert a == pytest.approx(b, rel=1e-2)
    # closed form: |psi_hat|^2 / xi integrates to C^2 pi^-1 ... ; check with quad
    c = math.sqrt(4 * math.sqrt(2) / 3)

    def hat(xi):
        # Fourier transform of C (1 - 2 pi t^2) e^{-pi t^2} is C 2 pi xi^2 e^{-pi xi^2}
        return c * 2 * math.pi * xi * xi * math.exp(-math.pi * xi * xi)

    oracle, _ = integrate.quad(lambda x: hat(x) ** 2 / x, 0, 20)
    assert a == pytest.approx(oracle, rel=1e-3)


def test_poisson_admissibility_finite():
    a = admissibility(poisson(3.0, "real"))
    assert a.admissible and 0 < a.value < math.inf


def test_normalize_scale_invariant():
    t = np.linspace(-4, 4, 101)
    a = normalize_wavelet(mexican_hat())
    b = normalize_wavelet(mexican_hat().scaled(3.7))
    np.testing.assert_allclose(a(t), b(t), atol=1e-9)


def test_normalize_gives_unit_admissibility_and_norm():
    psi, rep = normalize_wavelet(mexican_hat(), report=True)
    assert admissibility(psi).value == pytest.approx(1.0, abs=1e-3)
    assert l2_norm(psi) == pytest.approx(1.0, abs=1e-6)
    assert rep["admissibility"] == pytest.approx(1.0, abs=1e-3)


def test_normalize_rejects_gaussian():
    with pytest.raises(ValueError):
        normalize_wavelet(gaussian())


# -- plumbing ----------------------------------------------------------------------


def test_descriptor_parsing_and_modifiers():
    f = from_descriptor("gaussian|tf=0.3,0.7")
    g = gaussian().tf_shift(0.3, 0.7)
    t = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(f(t), g(t))
    assert f.describe() == g.describe()
    assert from_descriptor("hermite:3").describe() == "hermite(3)"
    h = from_descriptor("gaussian|dilate=4|modulate=0.25")
    np.testing.assert_allclose(h(t), gaussian().dilate(4).modulate(0.25)(t))


@pytest.mark.parametrize("bad", ["nope", "hermite", "gaussian|spin=1", "gaussian|tf=1", "box:-1"])
def test_descriptor_errors(bad):
    with pytest.raises(ValueError):
        from_descriptor(bad)


def test_csv_roundtrip(tmp_path):
    t = np.linspace(-2, 2, 41)
    v = hermite(2)(t) * (1 + 0.5j)
    write_csv(tmp_path / "s.csv", t, v)
    s = read_csv(tmp_path / "s.csv")
    np.testing.assert_allclose(s(t), v, atol=1e-15)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(h=0)
    with pytest.raises(ValueError):
        QuadratureSpec(R=0.5)
    with pytest.raises(ValueError):
        QuadratureSpec(y_min=2.0)
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")


def test_nodes_cover_interval():
    t, w = nodes(-1.0, 1.0, 0.1)
    assert t[0] > -1.0 and t[-1] < 1.0
    assert w.sum() == pytest.approx(2.0)
    t, w = nodes(-1.0, 1.0, 0.1, "trapezoid")
    assert t[0] == pytest.approx(-1.0) and w.sum() == pytest.approx(2.0)


def test_analytic_part_removes_negative_frequencies():
    f = gaussian().modulate(1.0)
    a = analytic_part(f)
    xi = np.linspace(-3, -0.5, 11)
    assert np.max(np.abs(fourier_values(a, xi))) < 1e-3
    # the positive side is kept, up to linear-interpolation loss in the samples
    assert abs(fourier_values(a, [1.0])[0]) == pytest.approx(abs(fourier_values(f, [1.0])[0]), rel=5e-3)
