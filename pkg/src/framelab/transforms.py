"""Continuous Gabor, wavelet and Bargmann transforms on phase-space grids.

Conventions: Gabor atoms are ``g_z(t) = exp(-2 pi i y t) g(t - x)``, wavelet
atoms are ``psi_z(t) = y**-0.5 psi((t - x) / y)``, and both transforms are
``F(z) = <f, atom_z>``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import HALFPLANE, PLANE, check_geometry
from .signals import DEFAULT_Q, QuadratureSpec, Signal, admissibility, l2_norm, nodes, sampled

_CHUNK = 4_000_000


def _trapezoid_weights(v: np.ndarray) -> np.ndarray:
    if len(v) == 1:
        return np.ones(1)
    w = np.empty_like(v)
    w[1:-1] = 0.5 * (v[2:] - v[:-2])
    w[0] = 0.5 * (v[1] - v[0])
    w[-1] = 0.5 * (v[-1] - v[-2])
    return w


def _axis(R: float, h: float) -> np.ndarray:
    n = int(round(R / h))
    return h * np.arange(-n, n + 1)


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """Product grid ``xs x ys`` with the quadrature weights of its geometry."""

    geometry: str
    xs: np.ndarray
    ys: np.ndarray
    yscale: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "geometry", check_geometry(self.geometry))
        object.__setattr__(self, "xs", np.asarray(self.xs, dtype=float))
        object.__setattr__(self, "ys", np.asarray(self.ys, dtype=float))
        if self.geometry == HALFPLANE and np.any(self.ys <= 0):
            raise ValueError("half-plane grids need y > 0")
        if len(self.xs) > 1 and np.any(np.diff(self.xs) <= 0):
            raise ValueError("grid x nodes must increase")

    @classmethod
    def plane(cls, R: float = 4.0, h: float = 0.05) -> "PhaseGrid":
        ax = _axis(R, h)
        return cls(PLANE, ax, ax.copy())

    @classmethod
    def halfplane(cls, R: float = 4.0, h: float = 0.05, y_min: float = 2.0**-4,
                  y_max: float = 2.0**4, n_scales: int = 97) -> "PhaseGrid":
        return cls(HALFPLANE, _axis(R, h), np.geomspace(y_min, y_max, n_scales), "log")

    @classmethod
    def halfplane_linear(cls, x_half: float, y_lo: float, y_hi: float, h: float) -> "PhaseGrid":
        n = int(round((y_hi - y_lo) / h))
        return cls(HALFPLANE, _axis(x_half, h), y_lo + h * np.arange(n + 1))

    @classmethod
    def default(cls, geometry: str, q: QuadratureSpec = DEFAULT_Q) -> "PhaseGrid":
        if check_geometry(geometry) == PLANE:
            return cls.plane(q.R, q.h)
        return cls.halfplane(q.R, q.h, q.y_min, q.y_max, q.n_scales)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xs), len(self.ys)

    @property
    def hx(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @property
    def size(self) -> int:
        return len(self.xs) * len(self.ys)

    def weights(self) -> np.ndarray:
        wx = _trapezoid_weights(self.xs)
        if self.geometry == PLANE:
            wy = _trapezoid_weights(self.ys)
        elif self.yscale == "log":
            wy = _trapezoid_weights(np.log(self.ys)) / self.ys
        else:
            wy = _trapezoid_weights(self.ys) / self.ys**2
        return np.outer(wx, wy)

    def mesh(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def points(self):
        X, Y = self.mesh()
        return X.ravel(), Y.ravel()

    def header(self) -> dict:
        return {
            "geometry": self.geometry,
            "yscale": self.yscale,
            "x_origin": float(self.xs[0]),
            "x_step": self.hx if len(self.xs) > 1 else 0.0,
            "nx": len(self.xs),
            "y_origin": float(self.ys[0]),
            "y_step": float(self.ys[1] / self.ys[0]) if self.yscale == "log" else float(self.ys[1] - self.ys[0]),
            "ny": len(self.ys),
        }

    def index_of(self, x: float, y: float, tol: float = 1e-9):
        """Grid index of (x, y) when it is a node, else None."""
        i = int(np.argmin(np.abs(self.xs - x)))
        j = int(np.argmin(np.abs(self.ys - y)))
        if abs(self.xs[i] - x) < tol and abs(self.ys[j] - y) < tol:
            return i, j
        return None


@dataclass(frozen=True, eq=False)
class PhaseField:
    grid: PhaseGrid
    values: np.ndarray

    @property
    def geometry(self) -> str:
        return self.grid.geometry

    def norm2(self) -> float:
        return float(np.sum(self.grid.weights() * np.abs(self.values) ** 2))

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def l1(self) -> float:
        return float(np.sum(self.grid.weights() * np.abs(self.values)))

    def __add__(self, other: "PhaseField") -> "PhaseField":
        return PhaseField(self.grid, self.values + other.values)

    def scaled(self, c) -> "PhaseField":
        return PhaseField(self.grid, c * self.values)

    def to_csv(self, path) -> None:
        """Write ``x,y,re,im`` rows plus a JSON sidecar ``<path>.json``."""
        X, Y = self.grid.mesh()
        v = self.values
        data = np.column_stack([X.ravel(), Y.ravel(), v.real.ravel(), v.imag.ravel()])
        np.savetxt(path, data, delimiter=",", header="x,y,re,im", comments="", fmt="%.17g")
        with open(f"{path}.json", "w") as fh:
            json.dump(self.grid.header(), fh, indent=2, sort_keys=True)


def read_field_csv(path) -> PhaseField:
    with open(f"{path}.json") as fh:
        head = json.load(fh)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    nx, ny = head["nx"], head["ny"]
    xs = data[:, 0].reshape(nx, ny)[:, 0]
    ys = data[:, 1].reshape(nx, ny)[0, :]
    grid = PhaseGrid(head["geometry"], xs, ys, head["yscale"])
    return PhaseField(grid, (data[:, 2] + 1j * data[:, 3]).reshape(nx, ny))


def atom_at(atom: Signal, x: float, y: float, geometry: str) -> Signal:
    """The atom indexed by the phase-space point (x, y)."""
    if check_geometry(geometry) == PLANE:
        return atom.tf_shift(x, y)
    return atom.affine_shift(x, y)


# ---------------------------------------------------------------------------
# Gabor
# ---------------------------------------------------------------------------


def _gabor_dt(f: Signal, g: Signal, ys, q) -> float:
    ymax = float(np.max(np.abs(ys))) if np.size(ys) else 0.0
    return min(f.resolution(q), g.resolution(q), 0.125 / max(ymax, 1e-9))


def gabor_matrix(f: Signal, g: Signal, xs, ys, q: QuadratureSpec = DEFAULT_Q) -> np.ndarray:
    """Gf on the product grid ``xs x ys`` as an (nx, ny) array."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    flo, fhi = f.support
    glo, ghi = g.support
    lo = max(flo, glo + xs.min())
    hi = min(fhi, ghi + xs.max())
    if hi <= lo:
        return np.zeros((len(xs), len(ys)), dtype=complex)
    t, w = nodes(lo, hi, _gabor_dt(f, g, ys, q), q.scheme)
    fw = f(t) * w
    out = np.empty((len(xs), len(ys)), dtype=complex)
    E = np.exp(2j * math.pi * np.outer(t, ys))
    step = max(1, _CHUNK // len(t))
    for s in range(0, len(xs), step):
        P = np.conj(g(t[None, :] - xs[s:s + step, None])) * fw
        out[s:s + step] = P @ E
    return out


def gabor_points(f: Signal, g: Signal, xs, ys, q: QuadratureSpec = DEFAULT_Q) -> np.ndarray:
    """Gf at the scattered points (xs[k], ys[k])."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    out = np.zeros(len(xs), dtype=complex)
    if len(xs) == 0:
        return out
    flo, fhi = f.support
    glo, ghi = g.support
    lo = max(flo, glo + xs.min())
    hi = min(fhi, ghi + xs.max())
    if hi <= lo:
        return out
    t, w = nodes(lo, hi, _gabor_dt(f, g, ys, q), q.scheme)
    fw = f(t) * w
    step = max(1, _CHUNK // len(t))
    for s in range(0, len(xs), step):
        x = xs[s:s + step, None]
        y = ys[s:s + step, None]
        M = np.conj(g(t[None, :] - x)) * np.exp(2j * math.pi * y * t[None, :])
        out[s:s + step] = M @ fw
    return out


def _check_window(g: Signal, q: QuadratureSpec) -> None:
    n = l2_norm(g, q)
    if abs(n - 1.0) > 1e-3:
        warnings.warn(f"window {g.describe()} has norm {n:.6g}, expected 1", stacklevel=3)


def gabor_transform(f: Signal, g: Signal, grid: PhaseGrid | None = None,
                    q: QuadratureSpec = DEFAULT_Q, check: bool = True) -> PhaseField:
    grid = grid or PhaseGrid.plane(q.R, q.h)
    if grid.geometry != PLANE:
        raise ValueError("the Gabor transform lives on a plane grid")
    if check:
        _check_window(g, q)
    return PhaseField(grid, gabor_matrix(f, g, grid.xs, grid.ys, q))


# ---------------------------------------------------------------------------
# wavelets
# ---------------------------------------------------------------------------


def _wavelet_row(f: Signal, psi: Signal, xs: np.ndarray, y: float, q: QuadratureSpec) -> np.ndarray:
    flo, fhi = f.support
    plo, phi = psi.support
    lo = max(flo, xs.min() + y * plo)
    hi = min(fhi, xs.max() + y * phi)
    if hi <= lo:
        return np.zeros(len(xs), dtype=complex)
    dt = min(f.resolution(q), q.dt_scale * y * psi.dilation, q.dt)
    if psi.kind == "sampled":
        dt = min(dt, y * psi.dilation * psi.step)
    if psi.freq:
        dt = min(dt, 0.125 * y / abs(psi.freq))
    t, w = nodes(lo, hi, dt, q.scheme)
    fw = f(t) * w
    out = np.empty(len(xs), dtype=complex)
    step = max(1, _CHUNK // len(t))
    scale = 1.0 / math.sqrt(y)
    for s in range(0, len(xs), step):
        P = np.conj(psi((t[None, :] - xs[s:s + step, None]) / y))
        out[s:s + step] = (P @ fw) * scale
    return out


def wavelet_matrix(f: Signal, psi: Signal, xs, ys, q: QuadratureSpec = DEFAULT_Q) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    out = np.empty((len(xs), len(ys)), dtype=complex)
    for j, y in enumerate(ys):
        out[:, j] = _wavelet_row(f, psi, xs, float(y), q)
    return out


def wavelet_points(f: Signal, psi: Signal, xs, ys, q: QuadratureSpec = DEFAULT_Q) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if np.any(ys <= 0):
        raise ValueError("wavelet transform needs y > 0")
    out = np.empty(len(xs), dtype=complex)
    keys, inv = np.unique(np.round(ys, 12), return_inverse=True)
    for k, y in enumerate(keys):
        sel = np.nonzero(inv == k)[0]
        out[sel] = _wavelet_row(f, psi, xs[sel], float(y), q)
    return out


def wavelet_transform(f: Signal, psi: Signal, grid: PhaseGrid | None = None,
                      q: QuadratureSpec = DEFAULT_Q, check: bool = True) -> PhaseField:
    grid = grid or PhaseGrid.halfplane(q.R, q.h, q.y_min, q.y_max, q.n_scales)
    if grid.geometry != HALFPLANE:
        raise ValueError("the wavelet transform lives on a half-plane grid")
    if check and not admissibility(psi, q).admissible:
        raise ValueError(f"wavelet {psi.describe()} is not admissible")
    return PhaseField(grid, wavelet_matrix(f, psi, grid.xs, grid.ys, q))


def transform(f: Signal, atom: Signal, grid: PhaseGrid, q: QuadratureSpec = DEFAULT_Q) -> PhaseField:
    if grid.geometry == PLANE:
        return gabor_transform(f, atom, grid, q, check=False)
    return wavelet_transform(f, atom, grid, q, check=False)


def transform_points(f: Signal, atom: Signal, xs, ys, geometry: str, q: QuadratureSpec = DEFAULT_Q):
    if check_geometry(geometry) == PLANE:
        return gabor_points(f, atom, xs, ys, q)
    return wavelet_points(f, atom, xs, ys, q)


# ---------------------------------------------------------------------------
# reconstructions
# ---------------------------------------------------------------------------


def _output_nodes(grid: PhaseGrid, atom: Signal, q: QuadratureSpec, pad: float | None):
    alo, ahi = atom.support
    if pad is None:
        pad = min(max(-alo, ahi), 6.0)
    dt = min(q.dt, atom.resolution(q))
    n_lo = math.floor((grid.xs[0] - pad) / dt)
    n_hi = math.ceil((grid.xs[-1] + pad) / dt)
    return dt * np.arange(n_lo, n_hi + 1)


def gabor_reconstruct(F: PhaseField, g: Signal, q: QuadratureSpec = DEFAULT_Q,
                      t: np.ndarray | None = None) -> Signal:
    """Sampled  sum_z w(z) F(z) g_z(t)  over the grid."""
    grid = F.grid
    if grid.geometry != PLANE:
        raise ValueError("gabor_reconstruct needs a plane field")
    t = _output_nodes(grid, g, q, None) if t is None else np.asarray(t, dtype=float)
    FW = F.values * grid.weights()
    out = np.zeros(len(t), dtype=complex)
    step = max(1, _CHUNK // max(len(grid.ys), len(t)))
    for s in range(0, len(t), step):
        tt = t[s:s + step]
        A = FW @ np.exp(-2j * math.pi * np.outer(grid.ys, tt))
        out[s:s + step] = np.sum(g(tt[None, :] - grid.xs[:, None]) * A, axis=0)
    return sampled(t, out)


def wavelet_reconstruct(F: PhaseField, psi: Signal, q: QuadratureSpec = DEFAULT_Q,
                        t: np.ndarray | None = None) -> Signal:
    """Sampled  sum_z w(z) F(z) psi_z(t)  over the grid (weights carry dx dy / y^2)."""
    grid = F.grid
    if grid.geometry != HALFPLANE:
        raise ValueError("wavelet_reconstruct needs a half-plane field")
    t = _output_nodes(grid, psi, q, None) if t is None else np.asarray(t, dtype=float)
    FW = F.values * grid.weights()
    out = np.zeros(len(t), dtype=complex)
    for j, y in enumerate(grid.ys):
        col = FW[:, j]
        live = np.nonzero(col)[0]
        if len(live) == 0:
            continue
        xs = grid.xs[live]
        step = max(1, _CHUNK // len(t))
        for s in range(0, len(xs), step):
            A = psi((t[None, :] - xs[s:s + step, None]) / y)
            out += (col[live[s:s + step]] @ A) / math.sqrt(y)
    return sampled(t, out)


# ---------------------------------------------------------------------------
# Bargmann
# ---------------------------------------------------------------------------

MAX_BARGMANN_RADIUS = 10.0


def bargmann_matrix(f: Signal, xs, ys, q: QuadratureSpec = DEFAULT_Q) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if max(np.abs(xs).max(), np.abs(ys).max()) > MAX_BARGMANN_RADIUS:
        raise ValueError(f"Bargmann grid exceeds |z| <= {MAX_BARGMANN_RADIUS}; exponentials overflow")
    lo, hi = f.support
    dt = min(f.resolution(q), 0.125 / max(np.abs(ys).max(), 1e-9))
    t, w = nodes(lo, hi, dt, q.scheme)
    fw = f(t) * w
    E = np.exp(2j * math.pi * np.outer(t, ys))
    # exp(2 pi t x - pi t^2) = exp(-pi (t - x)^2 + pi x^2)
    P = np.exp(-math.pi * (t[None, :] - xs[:, None]) ** 2) * fw
    Z = xs[:, None] + 1j * ys[None, :]
    damp = np.exp(math.pi * xs[:, None] ** 2 - 0.5 * math.pi * Z**2)
    return 2.0**0.25 * (P @ E) * damp


def bargmann_transform(f: Signal, grid: PhaseGrid | None = None, q: QuadratureSpec = DEFAULT_Q) -> PhaseField:
    grid = grid or PhaseGrid.plane(q.R, q.h)
    if grid.geometry != PLANE:
        raise ValueError("the Bargmann transform lives on the plane")
    return PhaseField(grid, bargmann_matrix(f, grid.xs, grid.ys, q))


def fock_norm2(B: PhaseField) -> float:
    X, Y = B.grid.mesh()
    return float(np.sum(B.grid.weights() * np.abs(B.values) ** 2 * np.exp(-math.pi * (X**2 + Y**2))))
