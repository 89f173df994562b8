"""Compare the numba kernels in framelab._hot with their numpy fallbacks.

    python3 benchmarks/bench_hot.py [--repeat 5] [--json out.json]

Each kernel runs once per backend for warm-up (this triggers numba
compilation), then ``--repeat`` timed runs; the best time is reported.
Outputs of the two backends are compared as well.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from framelab import _accel, _hot
from framelab.geometry import geometry_code
from framelab.pointsets import lattice, random_separated
from framelab.transforms import PhaseGrid


def _cases():
    rng = np.random.default_rng(0)
    grid = PhaseGrid.plane(4.0, 0.05)
    absf = np.abs(rng.normal(size=grid.shape))
    hgrid = PhaseGrid.halfplane(4.0, 0.05)
    habsf = np.abs(rng.normal(size=hgrid.shape))
    px, py = grid.points()
    lat = lattice(a=0.25, b=0.25)
    pts = random_separated("plane", 0.3, 400, seed=1)
    plane = geometry_code("plane")
    half = geometry_code("halfplane")
    return {
        "ball_max/plane": lambda nb: _hot.ball_max(absf, grid.hx, grid.ys, 1.0, plane, nb),
        "ball_max/halfplane": lambda nb: _hot.ball_max(habsf, hgrid.hx, hgrid.ys, 1.0, half, nb),
        "min_dist": lambda nb: _hot.min_dist(px, py, lat.xs, lat.ys, plane, nb),
        "separation": lambda nb: _hot.separation(pts.xs, pts.ys, plane, nb),
        "greedy_net": lambda nb: _hot.greedy_net(lat.xs, lat.ys, 0.3, plane, nb),
        "greedy_coloring": lambda nb: _hot.greedy_coloring(pts.xs, pts.ys, 0.6, plane, nb),
        "assign_cells": lambda nb: _hot.assign_cells(px, py, lat.xs, lat.ys, 0.18, 0.125, plane, nb),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return bool(np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float)))


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    rows = []
    print(f"{'kernel':22s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speed-up':>9s}  agree")
    for name, fn in _cases().items():
        fn(True)
        fn(False)
        t_nb, o_nb = _best(lambda: fn(True), args.repeat)
        t_np, o_np = _best(lambda: fn(False), args.repeat)
        ok = _same(o_nb, o_np)
        rows.append({"kernel": name, "numba_s": t_nb, "numpy_s": t_np, "speedup": t_np / t_nb, "agree": ok})
        print(f"{name:22s} {1e3 * t_nb:11.2f} {1e3 * t_np:11.2f} {t_np / t_nb:9.1f}  {ok}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
