"""Point sets in phase space: separation, decompositions, density, nets and coverings."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _hot
from .geometry import HALFPLANE, PLANE, PhasePoint, check_geometry, distance_xy, geometry_code
from .transforms import PhaseGrid


@dataclass(frozen=True, eq=False)
class PointSet:
    xs: np.ndarray
    ys: np.ndarray
    geometry: str = PLANE
    label: str = ""

    def __post_init__(self):
        xs = np.atleast_1d(np.asarray(self.xs, dtype=float)).copy()
        ys = np.atleast_1d(np.asarray(self.ys, dtype=float)).copy()
        if xs.shape != ys.shape or xs.ndim != 1:
            raise ValueError("x and y coordinates must be 1-D arrays of equal length")
        object.__setattr__(self, "geometry", check_geometry(self.geometry))
        if self.geometry == HALFPLANE and np.any(ys <= 0):
            raise ValueError("half-plane points need y > 0")
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, points, geometry: str | None = None) -> "PointSet":
        points = list(points)
        geo = geometry or (points[0].geometry if points else PLANE)
        if any(p.geometry != check_geometry(geo) for p in points):
            raise ValueError("points carry mixed geometry tags")
        return cls([p.x for p in points], [p.y for p in points], geo)

    @classmethod
    def empty(cls, geometry: str = PLANE) -> "PointSet":
        return cls(np.empty(0), np.empty(0), geometry)

    def __len__(self) -> int:
        return len(self.xs)

    def __getitem__(self, i) -> PhasePoint:
        return PhasePoint(float(self.xs[i]), float(self.ys[i]), self.geometry)

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def subset(self, idx) -> "PointSet":
        idx = np.asarray(idx, dtype=np.int64)
        return PointSet(self.xs[idx], self.ys[idx], self.geometry)

    def union(self, other: "PointSet") -> "PointSet":
        if other.geometry != self.geometry:
            raise ValueError("mixed-geometry union")
        return PointSet(np.concatenate([self.xs, other.xs]), np.concatenate([self.ys, other.ys]), self.geometry)

    @property
    def code(self) -> int:
        return geometry_code(self.geometry)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y"])
            for x, y in zip(self.xs, self.ys):
                w.writerow([repr(float(x)), repr(float(y))])


def read_pointset_csv(path, geometry: str = PLANE) -> PointSet:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and set(rows[0]) != {"x", "y"}:
        raise ValueError("point-set CSV needs header x,y")
    return PointSet([float(r["x"]) for r in rows], [float(r["y"]) for r in rows], geometry)


# ---------------------------------------------------------------------------
# separation and decompositions
# ---------------------------------------------------------------------------


def separation_constant(points: PointSet) -> float:
    if len(points) < 2:
        raise ValueError("separation needs at least two points")
    best, _, _ = _hot.separation(points.xs, points.ys, points.code)
    return best


def decompose_uniformly_discrete(points: PointSet, eps: float) -> list[PointSet]:
    """Greedy colouring into subsets whose separation is at least ``eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if len(points) == 0:
        return []
    color = _hot.greedy_coloring(points.xs, points.ys, eps, points.code)
    return [points.subset(np.nonzero(color == c)[0]) for c in range(int(color.max()) + 1)]


@dataclass(frozen=True)
class DensityResult:
    dense: bool
    worst_gap: float
    worst_point: tuple[float, float] | None

    def __bool__(self) -> bool:
        return self.dense


def density_check(points: PointSet, delta: float, grid: PhaseGrid) -> DensityResult:
    """Does every grid node have a point of the set within ``delta``?"""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if grid.geometry != points.geometry:
        raise ValueError("grid and point set disagree on geometry")
    px, py = grid.points()
    if len(points) == 0:
        return DensityResult(False, float("inf"), (float(px[0]), float(py[0])))
    d, _ = _hot.min_dist(px, py, points.xs, points.ys, points.code)
    k = int(np.argmax(d))
    gap = float(d[k])
    return DensityResult(gap < delta, gap, (float(px[k]), float(py[k])))


@dataclass(frozen=True, eq=False)
class Extraction:
    subset: PointSet
    indices: np.ndarray
    multiplicity: int
    assignment: np.ndarray
    n_decomposition: int


def extract_separated_subset(points: PointSet, delta: float) -> Extraction:
    """Greedy delta-net: chosen points are delta-separated and every point lies within delta of one.

    ``multiplicity`` is the largest number of input points assigned to one net
    point.  ``n_decomposition`` is the greedy colouring count at separation
    ``2 * delta``; points sharing a ball of radius ``delta`` are closer than
    ``2 * delta`` and so get distinct colours, which bounds the multiplicity.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if len(points) == 0:
        return Extraction(points, np.empty(0, np.int64), 0, np.empty(0, np.int64), 0)
    chosen, owner = _hot.greedy_net(points.xs, points.ys, delta, points.code)
    counts = np.bincount(owner, minlength=len(chosen))
    n_dec = len(decompose_uniformly_discrete(points, 2 * delta))
    return Extraction(points.subset(chosen), np.asarray(chosen), int(counts.max()), np.asarray(owner), n_dec)


# ---------------------------------------------------------------------------
# coverings
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Covering:
    centers: PointSet
    grid: PhaseGrid
    cell: np.ndarray          # (nx, ny) cell index per grid node
    areas: np.ndarray
    delta: float
    inner: float
    method: str = "first-index"
    meta: dict = field(default_factory=dict)

    @property
    def c_min(self) -> float:
        return float(self.areas.min())

    @property
    def c_max(self) -> float:
        return float(self.areas.max())

    def validate(self) -> None:
        """Recheck the containments B(z_j, inner) ∩ grid ⊆ V_j ⊆ B(z_j, delta)."""
        px, py = self.grid.points()
        cell = self.cell.ravel()
        if np.any(cell < 0):
            raise ValueError("covering leaves grid nodes unassigned")
        c = self.centers
        d_own = distance_xy(px, py, c.xs[cell], c.ys[cell], c.geometry)
        if np.any(d_own >= self.delta):
            raise ValueError("a cell leaves its enclosing ball")
        d, arg = _hot.min_dist(px, py, c.xs, c.ys, c.code)
        inside = d < self.inner
        if np.any(cell[inside] != arg[inside]):
            raise ValueError("inner-ball containment violated")
        if np.any(self.areas <= 0):
            raise ValueError("empty cell")


def build_covering(points: PointSet, delta: float, grid: PhaseGrid, method: str = "first-index") -> Covering:
    """Partition the grid into cells V_j ⊆ B(z_j, delta) around each center.

    ``first-index`` gives each node to the first center within ``delta``, except
    that nodes inside a center's inner ball (radius half the separation) stay
    with that center.  ``nearest`` assigns nodes to the closest center.
    """
    if grid.geometry != points.geometry:
        raise ValueError("grid and point set disagree on geometry")
    dens = density_check(points, delta, grid)
    if not dens:
        raise ValueError(f"point set is not {delta:g}-dense on the grid (worst gap {dens.worst_gap:.4g})")
    alpha = separation_constant(points) if len(points) > 1 else float("inf")
    inner = alpha / 2 if math.isfinite(alpha) else delta
    inner = min(inner, delta)
    px, py = grid.points()
    if method == "first-index":
        cell = _hot.assign_cells(px, py, points.xs, points.ys, delta, inner, points.code)
    elif method == "nearest":
        _, cell = _hot.min_dist(px, py, points.xs, points.ys, points.code)
    else:
        raise ValueError(f"unknown covering method {method!r}")
    w = grid.weights().ravel()
    areas = np.bincount(cell, weights=w, minlength=len(points))
    # centers whose cell misses the grid entirely are truncated away
    keep = np.nonzero(areas > 0)[0]
    remap = np.full(len(points), -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    cov = Covering(points.subset(keep), grid, remap[cell].reshape(grid.shape), areas[keep], float(delta),
                   float(inner), method, {"separation": alpha, "worst_gap": dens.worst_gap,
                                          "dropped_centers": int(len(points) - len(keep))})
    cov.validate()
    return cov


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def lattice(geometry: str = PLANE, a: float = 1.0, b: float = 1.0, R: float = 4.0,
            y_min: float = 2.0**-4, y_max: float = 2.0**4) -> PointSet:
    """Plane: aZ x bZ inside [-R, R]^2.  Half-plane: {(n b a^j, a^j)} inside the strip."""
    geometry = check_geometry(geometry)
    if geometry == PLANE:
        if a <= 0 or b <= 0:
            raise ValueError("lattice steps must be positive")
        xs = a * np.arange(-math.floor(R / a + 1e-9), math.floor(R / a + 1e-9) + 1)
        ys = b * np.arange(-math.floor(R / b + 1e-9), math.floor(R / b + 1e-9) + 1)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return PointSet(X.ravel(), Y.ravel(), PLANE, f"lattice({a:g},{b:g})")
    if a <= 1:
        raise ValueError("half-plane scale base must exceed 1")
    if b <= 0:
        raise ValueError("half-plane translation step must be positive")
    js = np.arange(math.ceil(math.log(y_min) / math.log(a) - 1e-9), math.floor(math.log(y_max) / math.log(a) + 1e-9) + 1)
    px, py = [], []
    for j in js:
        y = a ** float(j)
        step = b * y
        n = math.floor(R / step + 1e-9)
        xs = step * np.arange(-n, n + 1)
        px.append(xs)
        py.append(np.full(len(xs), y))
    return PointSet(np.concatenate(px), np.concatenate(py), HALFPLANE, f"lattice({a:g},{b:g})")


def jitter(points: PointSet, delta: float, seed: int = 0) -> PointSet:
    """Move each point a distance below ``delta`` in a random direction (deterministic per seed)."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0 or len(points) == 0:
        return PointSet(points.xs, points.ys, points.geometry)
    rng = np.random.default_rng(seed)
    n = len(points)
    theta = rng.uniform(0, 2 * math.pi, n)
    r = delta * rng.uniform(0, 1, n) * (1 - 1e-9)
    if points.geometry == PLANE:
        return PointSet(points.xs + r * np.cos(theta), points.ys + r * np.sin(theta), PLANE)
    # the hyperbolic circle of radius r about i is the Euclidean circle with
    # center (0, cosh r) and radius sinh r; then apply z -> y z + x
    gx = np.sinh(r) * np.sin(theta)
    gy = np.cosh(r) + np.sinh(r) * np.cos(theta)
    return PointSet(points.xs + points.ys * gx, points.ys * gy, HALFPLANE)


def random_separated(geometry: str, eps: float, n: int, seed: int, R: float = 4.0,
                     y_min: float = 0.25, y_max: float = 4.0, max_tries: int = 20000) -> PointSet:
    """Dart throwing: up to ``n`` points with pairwise distance >= eps."""
    geometry = check_geometry(geometry)
    rng = np.random.default_rng(seed)
    # candidates in one draw; greedy acceptance is dart throwing in draw order
    cx = rng.uniform(-R, R, max_tries)
    if geometry == PLANE:
        cy = rng.uniform(-R, R, max_tries)
    else:
        cy = np.exp(rng.uniform(math.log(y_min), math.log(y_max), max_tries))
    chosen, _ = _hot.greedy_net(cx, cy, eps, geometry_code(geometry))
    chosen = np.asarray(chosen)[:n]
    return PointSet(cx[chosen], cy[chosen], geometry)
