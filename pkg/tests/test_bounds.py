import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framelab.bounds import (
    FrameDivergence,
    FrameReport,
    analysis_matrix,
    covering_d1,
    covering_frame_bounds,
    covering_quantities,
    default_test_space,
    discrete_sum_bound,
    empirical_frame_bounds,
    frame_reconstruct,
    gram_matrix,
    hermite_space,
    kernel_sums_at,
    separated_margin,
    stability_lower_bound,
    stability_quantities,
    stated_plane_constant,
    upper_frame_bound,
)
from framelab.geometry import HALFPLANE, PLANE, PhasePoint
from framelab.kernels import kernel_sum
from framelab.pointsets import PointSet, build_covering, jitter, lattice, separation_constant
from framelab.signals import DEFAULT_Q, gaussian
from framelab.transforms import PhaseGrid, atom_at

SMALL_Q = DEFAULT_Q.with_(R=2.0, h=0.1, dt=0.05)


# -- discrete sums -----------------------------------------------------------------


def test_discrete_sum_examples():
    assert discrete_sum_bound(2.0, 1.0, HALFPLANE) == pytest.approx(1 / (4 * math.pi * math.sinh(0.5) ** 2))
    assert discrete_sum_bound(2.0, 1.0, HALFPLANE) == pytest.approx(0.2931, abs=1e-4)
    assert discrete_sum_bound(2.0, 1.0, PLANE) == pytest.approx(1 / math.pi)
    assert discrete_sum_bound(2.0, 3.0, PLANE) == pytest.approx(3 / math.pi)
    assert stated_plane_constant(2.0) == pytest.approx(1 / (16 * math.pi))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 1.99), st.floats(0.001, 0.01), st.sampled_from([PLANE, HALFPLANE]))
def test_discrete_sum_decreasing(eps, step, geometry):
    assert discrete_sum_bound(min(eps + step, 2.0), 1.0, geometry) < discrete_sum_bound(eps, 1.0, geometry)


@pytest.mark.parametrize("eps", [0.0, -1.0, 2.5])
def test_discrete_sum_range(eps):
    with pytest.raises(ValueError):
        discrete_sum_bound(eps, 1.0)


def test_kernel_sums_at_matches_scalar(gauss):
    pts = lattice(PLANE, 0.7, 0.9, R=2.0)
    bx, by = np.array([0.0, 0.31, -1.2]), np.array([0.0, -0.4, 0.9])
    got = kernel_sums_at(gauss, pts, bx, by)
    want = [kernel_sum(gauss, pts, PhasePoint(x, y)) for x, y in zip(bx, by)]
    np.testing.assert_allclose(got, want, rtol=1e-12)


# -- upper bound ---------------------------------------------------------------------


def test_upper_bound_single_point(gauss, kf_gauss):
    pts = PointSet([0.0], [0.0])
    ub = upper_frame_bound(gauss, pts, kf=kf_gauss)
    one = empirical_frame_bounds(gauss, pts)
    assert one.b_emp == pytest.approx(1.0, abs=1e-6)
    assert ub.b_suff >= one.b_emp
    assert ub.sup_sum == pytest.approx(1.0, abs=1e-6)


def test_upper_bound_dominates_empirical_on_integer_lattice(gauss, kf_gauss):
    pts = lattice(PLANE, 1.0, 1.0)
    ub = upper_frame_bound(gauss, pts, kf=kf_gauss)
    emp = empirical_frame_bounds(gauss, pts)
    assert math.isfinite(ub.b_suff)
    assert emp.b_emp <= ub.b_suff


def test_upper_bound_linear_in_k_l1(gauss, kf_gauss):
    pts = lattice(PLANE, 1.0, 1.0, R=2.0)
    base = upper_frame_bound(gauss, pts, kf=kf_gauss)
    doubled = dataclasses.replace(kf_gauss, k=kf_gauss.k.scaled(2.0))
    assert doubled.k_l1 == pytest.approx(2 * kf_gauss.k_l1, rel=1e-9)
    assert upper_frame_bound(gauss, pts, kf=doubled).b_suff == pytest.approx(2 * base.b_suff, rel=1e-9)


def test_upper_bound_empty(gauss, kf_gauss):
    assert upper_frame_bound(gauss, PointSet.empty(), kf=kf_gauss).b_suff == 0.0


# -- stability -----------------------------------------------------------------------


def test_stability_identical_sets(gauss):
    pts = lattice(PLANE, 0.5, 0.5, R=1.0)
    s = stability_quantities(gauss, pts, pts, SMALL_Q)
    assert s.d1 == 0.0 and s.d2 == 0.0 and s.product == 0.0


def test_stability_size_mismatch(gauss):
    pts = lattice(PLANE, 0.5, 0.5, R=1.0)
    with pytest.raises(ValueError):
        stability_quantities(gauss, pts, pts.subset(np.arange(3)), SMALL_Q)


def test_stability_d2_cap(gauss, kf_gauss):
    # jitter 0.1 keeps the 1/2-lattice alpha/3-separated, so each row sum obeys the discrete bound
    pts = lattice(PLANE, 0.5, 0.5, R=1.5)
    alpha = separation_constant(pts)
    gam = jitter(pts, 0.1, seed=3)
    assert separation_constant(gam) >= alpha / 3
    s = stability_quantities(gauss, pts, gam, SMALL_Q)
    cap = 2 * discrete_sum_bound(alpha / 3, kf_gauss.mk_l1)
    assert 0 < s.d2 and s.d2**2 <= cap
    assert s.d2 <= cap


def test_stability_single_pair_oracle(gauss):
    # one pair: d2^2 = sup_z |k_z0(z) - k_w0(z)| is at most 2 and d1 matches the twisted-translate integral
    lam, gam = PointSet([0.0], [0.0]), PointSet([0.3], [0.0])
    s = stability_quantities(gauss, lam, gam, SMALL_Q)
    grid = PhaseGrid.default(PLANE, SMALL_Q)
    from framelab.transforms import transform

    k0 = transform(gauss, gauss, grid, SMALL_Q).values
    k1 = transform(atom_at(gauss, 0.3, 0.0, PLANE), gauss, grid, SMALL_Q).values
    assert s.d1 == pytest.approx(math.sqrt(float(np.sum(grid.weights() * np.abs(k1 - k0)))), rel=1e-12)
    assert s.d2 <= math.sqrt(2.0)


def test_stability_lower_bound_algebra():
    assert stability_lower_bound(4.0, 0.0, 5.0) == 4.0
    assert stability_lower_bound(4.0, 1.0, 1.0) == 1.0
    assert stability_lower_bound(4.0, 1.0, 3.0) == 0.0


# -- separated margin ---------------------------------------------------------------------


def test_margin_examples():
    assert separated_margin(3.0, 5.0, 2, 0.0, 0.7) == pytest.approx(1.5)
    assert separated_margin(1.0, 1.0, 1, 0.5, 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        separated_margin(1.0, 1.0, 0, 0.1, 0.1)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 10), st.floats(0.01, 10), st.integers(1, 6), st.floats(0, 3), st.floats(0, 3))
def test_margin_never_exceeds_a_over_n(A, B, N, d1, d2):
    assert separated_margin(A, B, N, d1, d2) <= A / N + 1e-12


# -- coverings ------------------------------------------------------------------------


def test_covering_bounds_examples():
    cb = covering_frame_bounds(0.0, 0.3, 0.5, 0.5)
    assert cb.valid and cb.a_cov == pytest.approx(2.0) and cb.b_cov == pytest.approx(2.0)
    cb = covering_frame_bounds(1.0, 0.5, 1.0, 1.0)
    assert (cb.a_cov, cb.b_cov) == pytest.approx((0.25, 2.25))
    void = covering_frame_bounds(1.0, 1.0, 1.0, 1.0)
    assert not void.valid and void.a_cov == 0.0 and math.isinf(void.b_cov)
    with pytest.raises(ValueError):
        covering_frame_bounds(0.1, 0.1, 2.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.99), st.floats(0.01, 1), st.floats(1, 3))
def test_covering_bounds_ordered(p, cmin, ratio):
    cb = covering_frame_bounds(p, 1.0, cmin, cmin * ratio)
    assert 0 < cb.a_cov <= cb.b_cov


def test_covering_d1_monotone_and_zero(gauss):
    grid = PhaseGrid.plane(3.0, 0.05)
    vals = [covering_d1(gauss, d, grid, SMALL_Q)[0] for d in (0.4, 0.2, 0.1)]
    assert vals[0] > vals[1] > vals[2] > 0
    tiny, _ = covering_d1(gauss, 1e-6, grid, SMALL_Q)
    assert tiny < 1e-2


def test_covering_d2_cap(gauss):
    q = DEFAULT_Q.with_(R=2.0, dt=0.05)
    grid = PhaseGrid.plane(2.0, 0.05)
    pts = lattice(PLANE, 0.25, 0.25, R=2.5)
    cov = build_covering(pts, 0.18, grid)
    cq = covering_quantities(gauss, cov, q, w_stride=0.5)
    assert cq.cap_holds and cq.d2t**2 <= cq.cap * (1 + 1e-3)
    assert cq.d1t > 0 and cq.product == pytest.approx(cq.d1t * cq.d2t)


# -- empirical bounds ---------------------------------------------------------------------


def test_empirical_empty_and_single(gauss):
    e = empirical_frame_bounds(gauss, PointSet.empty())
    assert (e.a_emp, e.b_emp) == (0.0, 0.0)
    one = empirical_frame_bounds(gauss, PointSet([0.0], [0.0]))
    assert one.b_emp == pytest.approx(1.0, abs=1e-6)
    assert one.a_emp == pytest.approx(0.0, abs=1e-9)


def test_empirical_half_lattice(emp_half):
    assert 0 < emp_half.a_emp <= emp_half.b_emp
    assert emp_half.a_emp > 0.1 * emp_half.b_emp
    assert emp_half.space.startswith("hermite")


def test_empirical_matches_dense_eigensolve(gauss, half_lattice, emp_half):
    # Hermite functions are orthonormal, so the Gram matrix is the identity and a plain eigensolve suffices
    space = default_test_space(PLANE)
    G = gram_matrix(space)
    np.testing.assert_allclose(G, np.eye(len(space)), atol=1e-8)
    V = analysis_matrix(gauss, half_lattice, space)
    ev = np.linalg.eigvalsh(V.conj().T @ V)
    assert emp_half.a_emp == pytest.approx(ev[0], rel=1e-6)
    assert emp_half.b_emp == pytest.approx(ev[-1], rel=1e-6)


def test_empirical_rejects_ill_conditioned_basis(gauss):
    from framelab.bounds import TestSpace

    g = gaussian()
    bad = TestSpace("duplicated", (g, g.scaled(1.0 + 1e-12)))
    with pytest.raises(ValueError):
        empirical_frame_bounds(gauss, PointSet([0.0], [0.0]), bad)


def test_halfplane_test_space_is_modulated():
    assert "modulated" in default_test_space(HALFPLANE).name
    assert len(hermite_space(5)) == 5


# -- frame algorithm ------------------------------------------------------------------------


def test_frame_algorithm_matches_pseudo_inverse(gauss, half_lattice, emp_half):
    space = default_test_space(PLANE)
    V = analysis_matrix(gauss, half_lattice, space)
    c = np.random.default_rng(1).normal(size=len(space)) + 0j
    samples = V @ c
    run = frame_reconstruct(samples, gauss, half_lattice, emp_half.a_emp, emp_half.b_emp, iterations=5,
                            space=space, truth=c)
    direct = np.linalg.pinv(V) @ samples
    # compare on the sampling nodes of the returned signal, where no interpolation enters
    s = run.signal
    tt = s.t0 + s.step * np.arange(int(round((s.support[1] - s.t0) / s.step)))
    E = np.array([b(tt) for b in space.basis])
    ref = direct @ E
    assert np.linalg.norm(run.signal(tt) - ref) <= 1e-3 * np.linalg.norm(ref)
    rate = (emp_half.b_emp - emp_half.a_emp) / (emp_half.b_emp + emp_half.a_emp)
    assert all(r <= rate + 0.05 for r in run.ratios)


def test_frame_algorithm_full_mode_converges(gauss):
    # 3x3 atoms; the iterate lives in their span, so the error is controlled by the Gram spectrum
    pts = lattice(PLANE, 1.0, 1.0, R=1.0)
    truth = atom_at(gauss, 0.0, 0.0, PLANE)
    from framelab.transforms import transform_points

    samples = transform_points(truth, gauss, pts.xs, pts.ys, PLANE)
    atoms = [atom_at(gauss, x, y, PLANE) for x, y in zip(pts.xs, pts.ys)]
    from framelab.signals import inner_product

    gram = np.array([[inner_product(b, a) for b in atoms] for a in atoms])
    ev = np.linalg.eigvalsh(gram)
    run = frame_reconstruct(samples, gauss, pts, ev[0], ev[-1], iterations=60, truth=truth)
    assert run.errors[-1] <= 1e-3 * run.errors[0]
    assert run.mode == "full"


def test_frame_algorithm_zero_samples(gauss, half_lattice, emp_half):
    space = default_test_space(PLANE)
    run = frame_reconstruct(np.zeros(len(half_lattice)), gauss, half_lattice, emp_half.a_emp, emp_half.b_emp,
                            iterations=3, space=space)
    t = np.linspace(-3, 3, 61)
    assert np.all(run.signal(t) == 0)
    pts = lattice(PLANE, 1.0, 1.0, R=1.0)
    run = frame_reconstruct(np.zeros(len(pts)), gauss, pts, 0.5, 1.5, iterations=3)
    assert np.all(run.signal(t) == 0)


def test_frame_algorithm_detects_divergence(gauss, half_lattice, emp_half):
    space = default_test_space(PLANE)
    V = analysis_matrix(gauss, half_lattice, space)
    c = np.ones(len(space), complex)
    with pytest.raises(FrameDivergence):
        frame_reconstruct(V @ c, gauss, half_lattice, 0.05, 0.1, iterations=10, space=space, truth=c)


def test_frame_algorithm_input_checks(gauss):
    pts = PointSet([0.0], [0.0])
    with pytest.raises(ValueError):
        frame_reconstruct(np.zeros(1), gauss, pts, 2.0, 1.0)
    with pytest.raises(ValueError):
        frame_reconstruct(np.zeros(2), gauss, pts, 1.0, 1.0)


def test_frame_algorithm_high_precision_mode(gauss, half_lattice, emp_half):
    space = default_test_space(PLANE)
    V = analysis_matrix(gauss, half_lattice, space)
    c = np.random.default_rng(2).normal(size=len(space)) + 0j
    run = frame_reconstruct(V @ c, gauss, half_lattice, emp_half.a_emp, emp_half.b_emp, iterations=10,
                            space=space, truth=c, dps=40)
    assert run.mode == "test-space/mp40"
    assert run.errors[-1] < 1e-20 * run.errors[0]


# -- reports -----------------------------------------------------------------------------


def test_frame_report_csv_and_dict():
    r = FrameReport("gaussian", PLANE, 4, a_emp=1.0, b_emp=2.0)
    d = r.as_dict()
    assert d["a_emp"] == 1.0 and d["verdicts"] == {}
    row = r.csv_row()
    assert list(row) == list(FrameReport.CSV_FIELDS)
