"""Inner loops that dominate runtime, each with a numba and a numpy variant.

Geometry codes: 0 = plane (Euclidean), 1 = half-plane (hyperbolic, curvature -1).
The public wrappers at the bottom dispatch on :data:`framelab._accel.USE_NUMBA`.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import maximum_filter1d

from . import _accel
from ._accel import njit

PLANE = 0
HALFPLANE = 1


_BALL_TOL = 1e-9

# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@njit
def _dist_nb(x1, y1, x2, y2, geom):
    dx = x1 - x2
    dy = y1 - y2
    if geom == 0:
        return math.sqrt(dx * dx + dy * dy)
    arg = 1.0 + (dx * dx + dy * dy) / (2.0 * y1 * y2)
    if arg < 1.0:
        arg = 1.0
    return math.acosh(arg)


@njit
def _row_halfwidth_nb(y1, y2, r, geom):
    dy = y1 - y2
    if geom == 0:
        return r * r - dy * dy
    return 2.0 * y1 * y2 * (math.cosh(r) - 1.0) - dy * dy


@njit
def _sliding_max_nb(row, w, out):
    # monotone deque of indices; window [i - w, i + w]
    n = row.shape[0]
    dq = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    nxt = 0
    for i in range(n):
        hi = min(n - 1, i + w)
        while nxt <= hi:
            v = row[nxt]
            while tail > head and row[dq[tail - 1]] <= v:
                tail -= 1
            dq[tail] = nxt
            tail += 1
            nxt += 1
        while dq[head] < i - w:
            head += 1
        m = row[dq[head]]
        if m > out[i]:
            out[i] = m


@njit
def _ball_max_nb(absf, hx, ys, r, geom):
    nx, ny = absf.shape
    out = np.zeros_like(absf)
    tmp = np.empty(nx)
    for i in range(ny):
        for j in range(ny):
            d2 = _row_halfwidth_nb(ys[i], ys[j], r, geom)
            # closed ball: keep rows sitting on the boundary up to rounding
            if d2 < -_BALL_TOL * r * r:
                continue
            w = int(math.floor(math.sqrt(max(d2, 0.0)) / hx + 1e-9))
            for k in range(nx):
                tmp[k] = out[k, i]
            _sliding_max_nb(absf[:, j].copy(), w, tmp)
            for k in range(nx):
                out[k, i] = tmp[k]
    return out


@njit
def _min_dist_nb(px, py, sx, sy, geom):
    n = px.shape[0]
    out = np.empty(n)
    arg = np.empty(n, dtype=np.int64)
    for i in range(n):
        best = np.inf
        bj = -1
        for j in range(sx.shape[0]):
            d = _dist_nb(px[i], py[i], sx[j], sy[j], geom)
            if d < best:
                best = d
                bj = j
        out[i] = best
        arg[i] = bj
    return out, arg


@njit
def _separation_nb(xs, ys, geom):
    n = xs.shape[0]
    best = np.inf
    bi = -1
    bj = -1
    for i in range(n):
        for j in range(i + 1, n):
            d = _dist_nb(xs[i], ys[i], xs[j], ys[j], geom)
            if d < best:
                best = d
                bi = i
                bj = j
    return best, bi, bj


@njit
def _greedy_net_nb(xs, ys, delta, geom):
    n = xs.shape[0]
    chosen = np.empty(n, dtype=np.int64)
    nc = 0
    for i in range(n):
        ok = True
        for c in range(nc):
            j = chosen[c]
            if _dist_nb(xs[i], ys[i], xs[j], ys[j], geom) < delta:
                ok = False
                break
        if ok:
            chosen[nc] = i
            nc += 1
    chosen = chosen[:nc]
    owner = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        for c in range(nc):
            j = chosen[c]
            if _dist_nb(xs[i], ys[i], xs[j], ys[j], geom) < delta:
                owner[i] = c
                break
    return chosen, owner


@njit
def _greedy_coloring_nb(xs, ys, eps, geom):
    n = xs.shape[0]
    color = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        c = 0
        while True:
            clash = False
            for j in range(i):
                if color[j] == c and _dist_nb(xs[i], ys[i], xs[j], ys[j], geom) < eps:
                    clash = True
                    break
            if not clash:
                break
            c += 1
        color[i] = c
    return color


@njit
def _assign_cells_nb(px, py, cx, cy, delta, inner, geom):
    n = px.shape[0]
    m = cx.shape[0]
    cell = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        first = -1
        for j in range(m):
            d = _dist_nb(px[i], py[i], cx[j], cy[j], geom)
            if d < inner:
                first = j
                break
            if first < 0 and d < delta:
                first = j
        cell[i] = first
    return cell


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------


def _dist_np(x1, y1, x2, y2, geom):
    dx = x1 - x2
    dy = y1 - y2
    if geom == PLANE:
        return np.hypot(dx, dy)
    return np.arccosh(np.maximum(1.0 + (dx * dx + dy * dy) / (2.0 * y1 * y2), 1.0))


def _ball_max_np(absf, hx, ys, r, geom):
    nx, ny = absf.shape
    out = np.zeros_like(absf)
    yi = ys[:, None]
    yj = ys[None, :]
    if geom == PLANE:
        d2 = r * r - (yi - yj) ** 2
    else:
        d2 = 2.0 * yi * yj * (math.cosh(r) - 1.0) - (yi - yj) ** 2
    for i in range(ny):
        for j in np.nonzero(d2[i] >= -_BALL_TOL * r * r)[0]:
            w = int(math.floor(math.sqrt(max(d2[i, j], 0.0)) / hx + 1e-9))
            filt = maximum_filter1d(absf[:, j], size=2 * w + 1, mode="constant", cval=0.0)
            np.maximum(out[:, i], filt, out=out[:, i])
    return out


def _min_dist_np(px, py, sx, sy, geom, chunk=4096):
    n = px.shape[0]
    out = np.empty(n)
    arg = np.empty(n, dtype=np.int64)
    for s in range(0, n, chunk):
        d = _dist_np(px[s:s + chunk, None], py[s:s + chunk, None], sx[None, :], sy[None, :], geom)
        arg[s:s + chunk] = np.argmin(d, axis=1)
        out[s:s + chunk] = d[np.arange(d.shape[0]), arg[s:s + chunk]]
    return out, arg


def _separation_np(xs, ys, geom):
    n = xs.shape[0]
    best, bi, bj = np.inf, -1, -1
    for i in range(n - 1):
        d = _dist_np(xs[i], ys[i], xs[i + 1:], ys[i + 1:], geom)
        k = int(np.argmin(d))
        if d[k] < best:
            best, bi, bj = float(d[k]), i, i + 1 + k
    return best, bi, bj


def _greedy_net_np(xs, ys, delta, geom):
    chosen: list[int] = []
    for i in range(xs.shape[0]):
        if chosen:
            c = np.asarray(chosen)
            if np.any(_dist_np(xs[i], ys[i], xs[c], ys[c], geom) < delta):
                continue
        chosen.append(i)
    c = np.asarray(chosen, dtype=np.int64)
    d = _dist_np(xs[:, None], ys[:, None], xs[c][None, :], ys[c][None, :], geom)
    inside = d < delta
    owner = np.where(inside.any(axis=1), np.argmax(inside, axis=1), -1).astype(np.int64)
    return c, owner


def _greedy_coloring_np(xs, ys, eps, geom):
    n = xs.shape[0]
    color = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        if i == 0:
            color[0] = 0
            continue
        d = _dist_np(xs[i], ys[i], xs[:i], ys[:i], geom)
        used = set(color[:i][d < eps].tolist())
        c = 0
        while c in used:
            c += 1
        color[i] = c
    return color


def _assign_cells_np(px, py, cx, cy, delta, inner, geom, chunk=2048):
    n = px.shape[0]
    cell = np.full(n, -1, dtype=np.int64)
    for s in range(0, n, chunk):
        d = _dist_np(px[s:s + chunk, None], py[s:s + chunk, None], cx[None, :], cy[None, :], geom)
        in_inner = d < inner
        in_outer = d < delta
        first_inner = np.where(in_inner.any(axis=1), np.argmax(in_inner, axis=1), -1)
        first_outer = np.where(in_outer.any(axis=1), np.argmax(in_outer, axis=1), -1)
        cell[s:s + chunk] = np.where(first_inner >= 0, first_inner, first_outer)
    return cell


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def ball_max(absf, hx, ys, r, geom, use_numba=None):
    """Sup of ``absf`` over closed metric balls of radius ``r`` around every node.

    ``absf`` is indexed ``[ix, iy]`` on a grid with uniform x-step ``hx``.
    """
    nb = _accel.USE_NUMBA if use_numba is None else use_numba
    absf = _f64(absf)
    ys = _f64(ys)
    if nb:
        return _ball_max_nb(absf, float(hx), ys, float(r), int(geom))
    return _ball_max_np(absf, float(hx), ys, float(r), int(geom))


def min_dist(px, py, sx, sy, geom, use_numba=None):
    nb = _accel.USE_NUMBA if use_numba is None else use_numba
    args = (_f64(px), _f64(py), _f64(sx), _f64(sy), int(geom))
    if len(args[2]) == 0:
        return np.full(len(args[0]), np.inf), np.full(len(args[0]), -1, dtype=np.int64)
    return _min_dist_nb(*args) if nb else _min_dist_np(*args)


def separation(xs, ys, geom, use_numba=None):
    nb = _accel.USE_NUMBA if use_numba is None else use_numba
    args = (_f64(xs), _f64(ys), int(geom))
    best, i, j = _separation_nb(*args) if nb else _separation_np(*args)
    return float(best), int(i), int(j)


def greedy_net(xs, ys, delta, geom, use_numba=None):
    nb = _accel.USE_NUMBA if use_numba is None else use_numba
    args = (_f64(xs), _f64(ys), float(delta), int(geom))
    return _greedy_net_nb(*args) if nb else _greedy_net_np(*args)


def greedy_coloring(xs, ys, eps, geom, use_numba=None):
    nb = _accel.USE_NUMBA if use_numba is None else use_numba
    args = (_f64(xs), _f64(ys), float(eps), int(geom))
    return _greedy_coloring_nb(*args) if nb else _greedy_coloring_np(*args)


def assign_cells(px, py, cx, cy, delta, inner, geom, use_numba=None):
    nb = _accel.USE_NUMBA if use_numba is None else use_numba
    args = (_f64(px), _f64(py), _f64(cx), _f64(cy), float(delta), float(inner), int(geom))
    return _assign_cells_nb(*args) if nb else _assign_cells_np(*args)
