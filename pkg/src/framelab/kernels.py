"""Reproducing kernels, local maximal functions and kernel sums.

``k(z) = <atom, atom_z>`` with ``atom_z`` the Gabor atom (plane) or the wavelet
atom (half-plane).  For a point ``z0`` the translated kernel is
``k_{z0}(z) = <atom_{z0}, atom_z>``, which is the transform of ``atom_{z0}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _hot
from .geometry import PLANE, PhasePoint, check_geometry, geometry_code, hyperbolic_distance_xy
from .signals import DEFAULT_Q, QuadratureSpec, Signal, inner_product
from .transforms import PhaseField, PhaseGrid, atom_at, transform, transform_points

MAX_GRID_STEP = 0.25
TAIL_FLAG_FRACTION = 0.05


def kernel(atom: Signal, z: PhasePoint, q: QuadratureSpec = DEFAULT_Q) -> complex:
    return inner_product(atom, atom_at(atom, z.x, z.y, z.geometry), q)


def kernel_points(atom: Signal, xs, ys, geometry: str, q: QuadratureSpec = DEFAULT_Q) -> np.ndarray:
    """k at scattered points, vectorised."""
    return transform_points(atom, atom, xs, ys, geometry, q)


def translated_kernel(atom: Signal, z0: PhasePoint, grid: PhaseGrid, q: QuadratureSpec = DEFAULT_Q) -> PhaseField:
    """k_{z0}(z) = <atom_{z0}, atom_z> on ``grid``."""
    return transform(atom_at(atom, z0.x, z0.y, z0.geometry), atom, grid, q)


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailFit:
    model: str
    amplitude: float
    rate: float
    inner_radius: float
    tail: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _radius(grid: PhaseGrid):
    X, Y = grid.mesh()
    if grid.geometry == PLANE:
        rho = np.hypot(X, Y)
        rmax = min(abs(grid.xs[0]), grid.xs[-1], abs(grid.ys[0]), grid.ys[-1])
    else:
        rho = hyperbolic_distance_xy(X, Y, 0.0, 1.0)
        rmax = min(math.asinh(min(abs(grid.xs[0]), grid.xs[-1])), math.log(grid.ys[-1]), -math.log(grid.ys[0]))
    return rho, rmax


def fit_tail(values: np.ndarray, grid: PhaseGrid) -> TailFit:
    """Fit an envelope to |values| on the outer 20% annulus and integrate it past the grid.

    Plane fits ``A exp(-b r)`` and ``A r**-p``; the half-plane fits
    ``A exp(-b rho)`` in hyperbolic radius.  The tail is the envelope mass
    outside the inscribed ball minus what the grid already holds there.
    """
    geometry = grid.geometry
    rho, rmax = _radius(grid)
    rmax = float(rmax)
    a = np.abs(values)
    w = grid.weights()
    sel = (rho >= 0.8 * rmax) & (rho <= rmax) & (a > 0)
    if sel.sum() < 4:
        return TailFit("none", 0.0, float("inf"), rmax, 0.0)
    r = rho[sel]
    la = np.log(a[sel])
    # upper envelope: least squares then lift to dominate every sample
    fits = []
    b1, c1 = np.polyfit(r, la, 1)
    c1 = float(np.max(la - b1 * r))
    fits.append(("exp", math.exp(c1), -b1, np.sum((la - (b1 * r + c1)) ** 2)))
    if geometry == PLANE:
        p1, d1 = np.polyfit(np.log(r), la, 1)
        d1 = float(np.max(la - p1 * np.log(r)))
        fits.append(("power", math.exp(d1), -p1, np.sum((la - (p1 * np.log(r) + d1)) ** 2)))
    model, A, rate, _ = min(fits, key=lambda f: f[3])

    outside = rho > rmax
    if model == "exp":
        env_out = A * np.exp(-rate * rho[outside])
    else:
        env_out = A * rho[outside] ** (-rate)
    on_grid = float(np.sum(env_out * w[outside]))
    if geometry == PLANE and model == "exp":
        if rate <= 0:
            return TailFit(model, A, rate, rmax, float("inf"))
        total = 2 * math.pi * A * math.exp(-rate * rmax) * (rmax / rate + 1 / rate**2)
    elif geometry == PLANE:
        if rate <= 2:
            return TailFit(model, A, rate, rmax, float("inf"))
        total = 2 * math.pi * A * rmax ** (2 - rate) / (rate - 2)
    else:
        if rate <= 1:
            return TailFit(model, A, rate, rmax, float("inf"))
        # integral of A e^{-b r} 2 pi sinh r  from rmax to infinity
        total = math.pi * A * (math.exp((1 - rate) * rmax) / (rate - 1) - math.exp(-(1 + rate) * rmax) / (rate + 1))
    return TailFit(model, A, float(rate), rmax, float(max(0.0, total - on_grid)))


# ---------------------------------------------------------------------------
# kernel fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KernelField:
    k: PhaseField
    mk: PhaseField | None
    k_tail: TailFit
    mk_tail: TailFit | None
    atom: str
    radius: float = 1.0
    meta: dict = field(default_factory=dict)

    @property
    def geometry(self) -> str:
        return self.k.geometry

    @property
    def k_l1(self) -> float:
        return self.k.l1() + self.k_tail.tail

    @property
    def mk_l1(self) -> float:
        if self.mk is None:
            raise ValueError("maximal function not computed")
        return self.mk.l1() + self.mk_tail.tail

    def with_maximal(self, radius: float = 1.0) -> "KernelField":
        mk = maximal_function(self.k, radius)
        return KernelField(self.k, mk, self.k_tail, fit_tail(mk.values, mk.grid), self.atom, radius, self.meta)

    def as_dict(self) -> dict:
        out = {
            "atom": self.atom,
            "geometry": self.geometry,
            "k_l1": self.k_l1,
            "k_l1_grid": self.k.l1(),
            "k_tail": self.k_tail.as_dict(),
            "grid": self.k.grid.header(),
        }
        if self.mk is not None:
            out.update(mk_l1=self.mk_l1, mk_l1_grid=self.mk.l1(), mk_tail=self.mk_tail.as_dict(), radius=self.radius)
        return out


def kernel_field(atom: Signal, geometry: str = PLANE, q: QuadratureSpec = DEFAULT_Q,
                 grid: PhaseGrid | None = None, with_maximal: bool = True) -> KernelField:
    geometry = check_geometry(geometry)
    grid = grid or PhaseGrid.default(geometry, q)
    if grid.geometry != geometry:
        raise ValueError("grid geometry does not match")
    k = transform(atom, atom, grid, q)
    kf = KernelField(k, None, fit_tail(k.values, grid), None, atom.describe(), meta={"quadrature": q.as_dict()})
    return kf.with_maximal() if with_maximal else kf


def _grid_step_check(grid: PhaseGrid) -> None:
    hy = np.max(np.diff(grid.ys)) if grid.geometry == PLANE else np.max(np.diff(np.log(grid.ys)))
    if grid.hx >= MAX_GRID_STEP or hy >= MAX_GRID_STEP:
        raise ValueError(f"grid too coarse for a unit-ball scan (steps {grid.hx:g}, {hy:g}; need < {MAX_GRID_STEP})")


def maximal_function(F: PhaseField, radius: float = 1.0) -> PhaseField:
    """MF(z) = sup of |F| over grid nodes in the closed metric ball B(z, radius)."""
    grid = F.grid
    _grid_step_check(grid)
    out = _hot.ball_max(np.abs(F.values), grid.hx, grid.ys, radius, geometry_code(grid.geometry))
    return PhaseField(grid, out)


def l1_norm(F: PhaseField | KernelField) -> float:
    """L1 norm in the geometry's measure; kernel fields include their tail estimate."""
    if isinstance(F, KernelField):
        return F.k_l1
    return F.l1()


def membership_report(atom: Signal, geometry: str = PLANE, q: QuadratureSpec = DEFAULT_Q,
                      grid: PhaseGrid | None = None) -> dict:
    """Numerical verdicts on integrability of k and Mk, with the tails that back them."""
    kf = kernel_field(atom, geometry, q, grid)
    rep = kf.as_dict()

    def finite(tail: TailFit, total: float) -> bool:
        return math.isfinite(tail.tail) and tail.tail <= TAIL_FLAG_FRACTION * max(total, 1e-300)

    k_ok = finite(kf.k_tail, kf.k.l1())
    mk_ok = finite(kf.mk_tail, kf.mk.l1())
    rep["k_integrable"] = bool(k_ok)
    rep["mk_integrable"] = bool(mk_ok)
    rep["mk_dominates_k"] = bool(np.all(kf.mk.values >= np.abs(kf.k.values) - 1e-12))
    if kf.geometry == PLANE:
        # for windows, integrability of Mk is expected whenever k is integrable
        rep["expectation_holds"] = bool((not k_ok) or mk_ok)
    return rep


# ---------------------------------------------------------------------------
# kernel sums
# ---------------------------------------------------------------------------


def relative_points(base: PhasePoint, xs, ys):
    """Coordinates of z^{-1} lambda for every lambda (plane: lambda - z)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if base.geometry == PLANE:
        return xs - base.x, ys - base.y
    return (xs - base.x) / base.y, ys / base.y


def kernel_sum(atom: Signal, points, base: PhasePoint, q: QuadratureSpec = DEFAULT_Q) -> float:
    """Sum over the point set of |k(z^{-1} lambda)| (plane: |k(lambda - z)|)."""
    if len(points.xs) == 0:
        return 0.0
    if points.geometry != base.geometry:
        raise ValueError("mixed-geometry kernel sum")
    rx, ry = relative_points(base, points.xs, points.ys)
    vals = np.abs(kernel_points(atom, rx, ry, base.geometry, q))
    return float(np.sum(np.sort(vals)))


def reproduce(F: PhaseField, atom: Signal, z0: PhasePoint, q: QuadratureSpec = DEFAULT_Q) -> complex:
    """Right-hand side of the reproducing identity  integral F(z) conj(k_{z0}(z)) d(measure)."""
    K = translated_kernel(atom, z0, F.grid, q)
    return complex(np.sum(F.grid.weights() * F.values * np.conj(K.values)))
