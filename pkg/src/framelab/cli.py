"""Batch front-end: ``framelab <command> --config <file> [options]``.

Exit status: 0 on success, 1 when ``--assert`` is given and a certificate
fails, 2 for a malformed config, 3 for a numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, _accel, _hot
from .analytic_tests import (
    FockWeight,
    bargmann_report,
    calibrate_fock_sign,
    dbar_grid,
    dbar_residual,
    gaussian_ode_check,
    laplacian_grid,
    laplacian_residual,
    ode_check_poisson,
)
from .bounds import (
    FrameDivergence,
    FrameReport,
    analysis_matrix,
    covering_frame_bounds,
    covering_quantities,
    discrete_sum_bound,
    empirical_frame_bounds,
    extraction_pairs,
    frame_reconstruct,
    hermite_space,
    separated_margin,
    stability_lower_bound,
    stability_quantities,
    stated_plane_constant,
    upper_frame_bound,
)
from .geometry import HALFPLANE, PLANE, check_geometry, distance_xy
from .kernels import kernel_field, membership_report
from .pointsets import (
    PointSet,
    build_covering,
    density_check,
    extract_separated_subset,
    jitter,
    lattice,
    random_separated,
    read_pointset_csv,
    separation_constant,
)
from .signals import (
    QuadratureSpec,
    Signal,
    box,
    from_descriptor,
    gaussian,
    harmonic_wavelet,
    l2_norm,
    mexican_hat,
    normalize_wavelet,
    read_csv,
)
from .transforms import PhaseGrid, transform

COMMANDS = ("transform", "kernel", "bounds", "stability", "density", "extract", "residuals", "reconstruct")


class ConfigError(ValueError):
    """Raised for anything wrong with the configuration; maps to exit status 2."""


class NumericalFailure(RuntimeError):
    """Raised when a computation produces no usable number; maps to exit status 3."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_COMMON = {
    "geometry": PLANE,
    "atom": None,
    "normalize_atom": None,
    "points": None,
    "quadrature": {},
    "seed": 0,
    "tolerance": 0.05,
    "test_space": {"n": 20, "modulation": None},
}

_PER_COMMAND = {
    "transform": {"signal": None, "energy_tolerance": None},
    "kernel": {"radius": 1.0},
    "bounds": {"delta": None, "covering_method": "first-index"},
    "stability": {"deltas": [0.1, 0.05, 0.025]},
    "density": {"deltas": [0.18, 0.25], "covering_method": "first-index", "w_stride": 0.25},
    "extract": {"delta": 0.25, "duplicate": [0.02, 0.01]},
    "residuals": {"h": 0.05},
    "reconstruct": {"iterations": 10, "precision": 50, "ratio_tolerance": 0.2},
}

_POINT_KINDS = ("lattice", "file", "random", "empty")


def _default_points(command: str, geometry: str) -> dict:
    if geometry == HALFPLANE:
        return {"lattice": {"a": 2.0, "b": 0.5}}
    step = 0.25 if command == "density" else 0.5
    return {"lattice": {"a": step, "b": step}}


def _check_number(name, v, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{name} must be a finite number")
    if positive and v <= 0:
        raise ConfigError(f"{name} must be positive")
    return float(v)


def resolve_config(command: str, raw: dict, overrides: dict) -> dict:
    """Merge defaults, the file and the command-line flags (flags win)."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    allowed = set(_COMMON) | set(_PER_COMMAND[command]) | {"command"}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
    if raw.get("command", command) != command:
        raise ConfigError(f"config is for command {raw['command']!r}, not {command!r}")
    cfg = copy.deepcopy(_COMMON)
    cfg.update(copy.deepcopy(_PER_COMMAND[command]))
    for k, v in raw.items():
        if k == "command":
            continue
        if isinstance(cfg.get(k), dict) and isinstance(v, dict):
            cfg[k] = {**cfg[k], **v}
        else:
            cfg[k] = v
    for k, v in overrides.items():
        if v is not None:
            cfg[k] = v
    cfg["command"] = command

    try:
        cfg["geometry"] = check_geometry(cfg["geometry"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    geometry = cfg["geometry"]
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        raise ConfigError("seed must be an integer")
    if cfg["atom"] is None:
        cfg["atom"] = "gaussian" if geometry == PLANE else "mexican-hat"
    if cfg["normalize_atom"] is None:
        cfg["normalize_atom"] = geometry == HALFPLANE
    if not isinstance(cfg["normalize_atom"], bool):
        raise ConfigError("normalize_atom must be true or false")
    if cfg["points"] is None:
        cfg["points"] = _default_points(command, geometry)
    if command == "transform":
        if cfg["signal"] is None:
            cfg["signal"] = "hermite:3" if geometry == PLANE else "gaussian|modulate=2"
        if cfg["energy_tolerance"] is None:
            cfg["energy_tolerance"] = 0.005 if geometry == PLANE else 0.01
        _check_number("energy_tolerance", cfg["energy_tolerance"], positive=True)
    ts = cfg["test_space"]
    if not isinstance(ts, dict) or set(ts) - {"n", "modulation"}:
        raise ConfigError("test_space takes keys n and modulation")
    if ts.get("modulation") is None:
        ts["modulation"] = 0.0 if geometry == PLANE else 2.0
    if not isinstance(ts.get("n"), int) or ts["n"] < 1:
        raise ConfigError("test_space.n must be a positive integer")
    _check_number("test_space.modulation", ts["modulation"])
    try:
        q = QuadratureSpec(**cfg["quadrature"]) if isinstance(cfg["quadrature"], dict) else None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad quadrature block: {exc}") from None
    if q is None:
        raise ConfigError("quadrature must be an object")
    cfg["quadrature"] = q.as_dict()
    _check_number("tolerance", cfg["tolerance"])
    for key in ("deltas",):
        if key in cfg:
            d = cfg[key]
            if not isinstance(d, list) or not d:
                raise ConfigError(f"{key} must be a non-empty list")
            cfg[key] = [_check_number(key, v, positive=True) for v in d]
    if cfg.get("delta") is not None:
        cfg["delta"] = _check_number("delta", cfg["delta"], positive=True)
    if command == "extract":
        dup = cfg["duplicate"]
        if dup is not None and (not isinstance(dup, list) or len(dup) != 2):
            raise ConfigError("duplicate must be null or [dx, dy]")
    if command == "reconstruct":
        if not isinstance(cfg["iterations"], int) or cfg["iterations"] < 1:
            raise ConfigError("iterations must be a positive integer")
        if cfg["precision"] is not None and (not isinstance(cfg["precision"], int) or cfg["precision"] < 16):
            raise ConfigError("precision must be null or an integer >= 16")
    return cfg


def _load_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None


class Context:
    """Objects built from a resolved config."""

    def __init__(self, cfg: dict, base_dir: Path):
        self.cfg = cfg
        self.base_dir = base_dir
        self.q = QuadratureSpec(**cfg["quadrature"])
        self.geometry = cfg["geometry"]
        try:
            self.atom = self._signal(cfg["atom"], "atom")
            if cfg["normalize_atom"]:
                self.atom = normalize_wavelet(self.atom, self.q)
            self.points = self._points(cfg["points"])
            ts = cfg["test_space"]
            self.space = hermite_space(ts["n"], ts["modulation"])
        except (ValueError, OSError, KeyError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    def _path(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def _signal(self, spec, name) -> Signal:
        if isinstance(spec, str):
            return from_descriptor(spec)
        if isinstance(spec, dict) and set(spec) == {"file"}:
            return read_csv(self._path(spec["file"]))
        raise ConfigError(f"{name} must be a descriptor string or {{\"file\": path}}")

    def _points(self, spec) -> PointSet:
        if not isinstance(spec, dict):
            raise ConfigError("points must be an object")
        kinds = [k for k in spec if k in _POINT_KINDS]
        if len(kinds) != 1 or set(spec) - set(_POINT_KINDS):
            raise ConfigError(f"points needs exactly one of {', '.join(_POINT_KINDS)}")
        kind = kinds[0]
        body = spec[kind]
        g = self.geometry
        if kind == "empty":
            return PointSet.empty(g)
        if kind == "file":
            return read_pointset_csv(self._path(body), g)
        if not isinstance(body, dict):
            raise ConfigError(f"points.{kind} must be an object")
        if kind == "lattice":
            allowed = {"a", "b", "R", "y_min", "y_max"}
            if set(body) - allowed:
                raise ConfigError(f"points.lattice takes {sorted(allowed)}")
            kw = {"R": self.q.R, "y_min": self.q.y_min, "y_max": self.q.y_max, **body}
            return lattice(g, **{k: float(v) for k, v in kw.items()})
        allowed = {"eps", "n", "R"}
        if set(body) - allowed or not {"eps", "n"} <= set(body):
            raise ConfigError("points.random needs eps and n (and optionally R)")
        return random_separated(g, float(body["eps"]), int(body["n"]), self.cfg["seed"],
                                float(body.get("R", self.q.R)))


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_report(command: str, cfg: dict, results: dict, certificates: dict, header: dict) -> str:
    doc = {
        "header": header,
        "command": command,
        "config": cfg,
        "results": results,
        "certificates": certificates,
    }
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def render_csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_cell(r.get(k)) for k in fields})
    return buf.getvalue()


def _csv_cell(v):
    v = _jsonable(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else v


class Output:
    def __init__(self, out_dir: Path):
        self.dir = out_dir
        self.files: list[str] = []

    def text(self, name: str, text: str) -> None:
        atomic_write(self.dir / name, text)
        self.files.append(name)

    def field(self, name: str, F) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "re", "im"])
        X, Y = F.grid.mesh()
        for x, y, v in zip(X.ravel(), Y.ravel(), F.values.ravel()):
            w.writerow([repr(float(x)), repr(float(y)), repr(float(v.real)), repr(float(v.imag))])
        self.text(name, buf.getvalue())
        self.text(name + ".json", json.dumps(_jsonable(F.grid.header()), sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _finite(*vals):
    for v in vals:
        if v is None or not math.isfinite(v):
            raise NumericalFailure(f"non-finite value {v!r}")


def cmd_transform(ctx: Context, out: Output):
    cfg = ctx.cfg
    try:
        f = ctx._signal(cfg["signal"], "signal")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    grid = PhaseGrid.default(ctx.geometry, ctx.q)
    F = transform(f, ctx.atom, grid, ctx.q)
    nf = l2_norm(f, ctx.q) ** 2
    nF = F.norm2()
    _finite(nf, nF)
    rel = abs(nF - nf) / nf
    out.field("field.csv", F)
    results = {"signal": f.describe(), "atom": ctx.atom.describe(), "signal_norm2": nf, "transform_norm2": nF,
               "relative_energy_error": rel, "grid": grid.header()}
    return results, {"energy": rel <= cfg["energy_tolerance"]}


def cmd_kernel(ctx: Context, out: Output):
    rep = membership_report(ctx.atom, ctx.geometry, ctx.q)
    kf = kernel_field(ctx.atom, ctx.geometry, ctx.q)
    kf = kf if ctx.cfg["radius"] == 1.0 else kf.with_maximal(ctx.cfg["radius"])
    _finite(kf.k.l1(), kf.mk.l1())
    out.field("kernel.csv", kf.k)
    out.field("maximal.csv", kf.mk)
    certs = {"mk_dominates_k": rep["mk_dominates_k"]}
    if "expectation_holds" in rep:
        certs["expectation_holds"] = rep["expectation_holds"]
    return {"membership": rep, "k_l1": kf.k_l1, "mk_l1": kf.mk_l1, "radius": kf.radius}, certs


def _frame_report(ctx: Context, points: PointSet, delta=None, method="first-index") -> tuple[FrameReport, dict]:
    atom, q, g = ctx.atom, ctx.q, ctx.geometry
    rep = FrameReport(atom.describe(), g, len(points), test_space=ctx.space.name)
    certs = {}
    kf = kernel_field(atom, g, q)
    rep.k_l1, rep.mk_l1 = kf.k_l1, kf.mk_l1
    if len(points) >= 2:
        eps = separation_constant(points)
        rep.epsilon = eps
        if eps <= 2:
            rep.discrete_sum_bound = discrete_sum_bound(eps, kf.mk_l1, g)
            if g == PLANE:
                rep.stated_constant_bound = stated_plane_constant(eps) * kf.mk_l1
    ub = upper_frame_bound(atom, points, q, kf)
    rep.b_suff = ub.b_suff
    emp = empirical_frame_bounds(atom, points, ctx.space, q)
    rep.a_emp, rep.b_emp = emp.a_emp, emp.b_emp
    _finite(rep.b_suff, rep.a_emp, rep.b_emp)
    tol = ctx.cfg["tolerance"]
    certs["bessel"] = rep.b_emp <= rep.b_suff + tol
    certs["lower_positive"] = rep.a_emp > 0
    if delta is not None:
        grid = PhaseGrid.default(g, q)
        rep.delta = delta
        dens = density_check(points, delta, grid)
        rep.verdicts["dense"] = bool(dens)
        rep.verdicts["worst_gap"] = dens.worst_gap
        if dens:
            cov = build_covering(points, delta, grid, method)
            cq = covering_quantities(atom, cov, q, kf, w_stride=float(ctx.cfg.get("w_stride", 0.25)))
            cb = covering_frame_bounds(cq.d1t, cq.d2t, cov.c_min, cov.c_max)
            rep.d1_tilde, rep.d2_tilde = cq.d1t, cq.d2t
            rep.a_cov, rep.b_cov = cb.a_cov, cb.b_cov
            rep.verdicts.update(product=cb.product, cap=cq.cap, cap_holds=cq.cap_holds, c_min=cov.c_min,
                                c_max=cov.c_max, worst_w=list(cq.worst_w), worst_offset=list(cq.worst_offset))
            certs["covering_contractive"] = cb.valid
            certs["covering_chain"] = bool(cb.valid and cb.a_cov - tol <= rep.a_emp and rep.b_emp <= cb.b_cov + tol)
        else:
            certs["covering_contractive"] = False
            certs["covering_chain"] = False
    rep.parameters = {"quadrature": q.as_dict(), "upper_bound_argmax": list(ub.argmax)}
    return rep, certs


def cmd_bounds(ctx: Context, out: Output):
    rep, certs = _frame_report(ctx, ctx.points, ctx.cfg["delta"], ctx.cfg["covering_method"])
    out.text("summary.csv", render_csv([rep.csv_row()], list(FrameReport.CSV_FIELDS)))
    return {"frame_report": rep.as_dict()}, certs


def cmd_stability(ctx: Context, out: Output):
    atom, q, lam = ctx.atom, ctx.q, ctx.points
    if len(lam) == 0:
        return {"sweep": [], "reason": "empty point set"}, {"stability_chain": False}
    base = empirical_frame_bounds(atom, lam, ctx.space, q)
    _finite(base.a_emp, base.b_emp)
    tol = ctx.cfg["tolerance"]
    rows, d1s, chain = [], [], []
    for i, delta in enumerate(ctx.cfg["deltas"]):
        gam = jitter(lam, delta, seed=ctx.cfg["seed"] + i)
        st = stability_quantities(atom, lam, gam, q)
        emp = empirical_frame_bounds(atom, gam, ctx.space, q)
        lower = stability_lower_bound(base.a_emp, st.d1, st.d2)
        _finite(st.d1, st.d2, emp.a_emp, lower)
        ok = emp.a_emp >= lower - tol
        chain.append(ok)
        d1s.append(st.d1)
        rows.append({"delta": delta, "d1": st.d1, "d2": st.d2, "d1_schur": st.d1_schur, "product": st.product,
                     "a_emp_jittered": emp.a_emp, "b_emp_jittered": emp.b_emp, "lower_bound": lower,
                     "chain_holds": ok, "worst_j": st.worst_j, "worst_z": list(st.worst_z)})
    order = np.argsort(-np.asarray(ctx.cfg["deltas"]))
    mono = all(d1s[order[k]] > d1s[order[k + 1]] for k in range(len(order) - 1))
    out.text("summary.csv", render_csv(rows, list(rows[0])))
    results = {"a_emp": base.a_emp, "b_emp": base.b_emp, "c": 1.0, "sweep": rows}
    return results, {"d1_monotone": mono, "stability_chain": all(chain)}


def cmd_density(ctx: Context, out: Output):
    rows, certs_all = [], []
    for delta in ctx.cfg["deltas"]:
        if len(ctx.points) == 0:
            rows.append({"delta": delta, "dense": False, "void": True})
            certs_all.append(False)
            continue
        rep, certs = _frame_report(ctx, ctx.points, delta, ctx.cfg["covering_method"])
        row = rep.csv_row()
        row.update(dense=rep.verdicts["dense"], product=rep.verdicts.get("product"),
                   covering_chain=certs["covering_chain"], void=not certs["covering_contractive"])
        rows.append(row)
        certs_all.append(certs["covering_chain"])
    fields = ["delta", "dense", "void", "product", "covering_chain"] + [
        f for f in FrameReport.CSV_FIELDS if f != "delta"]
    out.text("summary.csv", render_csv(rows, fields))
    return {"sweep": rows}, {"covering_chain": bool(certs_all) and all(certs_all)}


def cmd_extract(ctx: Context, out: Output):
    atom, q, cfg = ctx.atom, ctx.q, ctx.cfg
    pts = ctx.points
    if cfg["duplicate"] is not None:
        dx, dy = (float(v) for v in cfg["duplicate"])
        extra = PointSet(pts.xs + dx, pts.ys + dy, pts.geometry) if pts.geometry == PLANE else \
            PointSet(pts.xs + pts.ys * dx, pts.ys * math.exp(dy), pts.geometry)
        pts = pts.union(extra)
    if len(pts) == 0:
        return {"reason": "empty point set"}, {"separated": False}
    delta = cfg["delta"]
    ex = extract_separated_subset(pts, delta)
    sub = ex.subset
    sep = separation_constant(sub) if len(sub) > 1 else float("inf")
    # brute-force recheck of the separation
    if len(sub) > 1:
        D = distance_xy(sub.xs[:, None], sub.ys[:, None], sub.xs[None, :], sub.ys[None, :], sub.geometry)
        np.fill_diagonal(D, np.inf)
        brute = float(D.min())
    else:
        brute = float("inf")
    full = empirical_frame_bounds(atom, pts, ctx.space, q)
    part = empirical_frame_bounds(atom, sub, ctx.space, q)
    chosen, owner = _hot.greedy_net(pts.xs, pts.ys, delta, pts.code)
    d1 = d2 = 0.0
    for members, owners in extraction_pairs(pts, chosen, owner):
        st = stability_quantities(atom, members, owners, q)
        d1, d2 = max(d1, st.d1), max(d2, st.d2)
    results = {"n_points": len(pts), "n_subset": len(sub), "multiplicity": ex.multiplicity,
               "n_decomposition": ex.n_decomposition, "separation": sep, "separation_bruteforce": brute,
               "a_emp": full.a_emp, "b_emp": full.b_emp, "a_emp_subset": part.a_emp, "b_emp_subset": part.b_emp,
               "d1": d1, "d2": d2}
    certs = {"separated": bool(brute >= delta * (1 - 1e-12))}
    if full.a_emp > 0:
        margin = separated_margin(full.a_emp, full.b_emp, ex.multiplicity, d1, d2)
        results["margin"] = margin
        certs["margin_chain"] = bool(margin <= 0 or margin <= part.a_emp + cfg["tolerance"])
    else:
        results["margin"] = None
        certs["margin_chain"] = False
    out.text("subset.csv", render_csv([{"x": x, "y": y} for x, y in zip(sub.xs, sub.ys)], ["x", "y"]))
    return results, certs


def cmd_residuals(ctx: Context, out: Output):
    q, h = ctx.q, float(ctx.cfg["h"])
    try:
        grid = dbar_grid(2.0, h)
        hgrid = laplacian_grid(h=h)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    g = gaussian()
    calib = calibrate_fock_sign(q, grid)
    gauss = dbar_residual(g, q=q, grid=grid)
    boxr = dbar_residual(box(1.0), q=q, grid=grid)
    shifted = dbar_residual(g.tf_shift(0.3, 0.7), weight=FockWeight(shift=(0.3, 0.7)), q=q, grid=grid)
    pois = laplacian_residual(harmonic_wavelet(-2.0, "real"), -2.0, q=q, grid=hgrid)
    mh = laplacian_residual(normalize_wavelet(mexican_hat(), q), -2.0, q=q, grid=hgrid)
    odes = {"poisson_-2": ode_check_poisson(-2.0), "poisson_-3": ode_check_poisson(-3.0),
            "gaussian_c0": gaussian_ode_check(0.0), "gaussian_c1": gaussian_ode_check(1.0)}
    barg = bargmann_report(q=q)
    _finite(gauss.residual, boxr.residual, pois.residual, mh.residual)
    out.field("dbar_gaussian.csv", gauss.field_)
    out.field("laplacian_poisson.csv", pois.field_)
    reports = [gauss, boxr, shifted, pois, mh]
    rows = [{"kind": r.kind, "weight": r.weight, "signals": r.signals, "residual": r.residual} for r in reports]
    out.text("summary.csv", render_csv(rows, ["kind", "weight", "signals", "residual"]))
    certs = {
        "dbar_gaussian": gauss.residual <= 1e-2,
        "dbar_separates_box": gauss.residual <= 0.1 * boxr.residual,
        "dbar_shift_invariant": shifted.residual <= 2 * gauss.residual and gauss.residual <= 2 * shifted.residual,
        "laplacian_poisson": pois.residual <= 1e-2,
        "laplacian_separates_mexican_hat": pois.residual <= 0.1 * mh.residual,
        "poisson_ode": max(odes["poisson_-2"], odes["poisson_-3"]) <= 1e-10,
        "bargmann_unit": barg["gaussian_unit_deviation"] <= 1e-5,
        "fock_isometry": barg["isometry_deviation"] <= 1e-2,
        "bargmann_pointwise": barg["pointwise_deviation"] <= 1e-4,
    }
    results = {"fock_sign_calibration": calib, "reports": [r.as_dict() for r in reports], "ode": odes,
               "bargmann": barg}
    return results, certs


def cmd_reconstruct(ctx: Context, out: Output):
    atom, q, pts, cfg = ctx.atom, ctx.q, ctx.points, ctx.cfg
    if len(pts) == 0:
        return {"reason": "empty point set"}, {"rate_match": False}
    emp = empirical_frame_bounds(atom, pts, ctx.space, q)
    if emp.a_emp <= 0:
        raise NumericalFailure("empirical lower frame bound is zero; the frame algorithm has no step size")
    rng = np.random.default_rng(cfg["seed"])
    n = len(ctx.space)
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    V = analysis_matrix(atom, pts, ctx.space, q)
    samples = V @ c
    run = frame_reconstruct(samples, atom, pts, emp.a_emp, emp.b_emp, cfg["iterations"], q, ctx.space, c,
                            dps=cfg["precision"])
    rate = run.predicted_rate
    tol = cfg["ratio_tolerance"]
    later = run.ratios[1:]
    rows = [{"iteration": i, "error": e, "ratio": (run.ratios[i - 1] if i else None)} for i, e in enumerate(run.errors)]
    out.text("summary.csv", render_csv(rows, ["iteration", "error", "ratio"]))
    results = {"a_emp": emp.a_emp, "b_emp": emp.b_emp, "predicted_rate": rate, "mean_ratio": run.mean_ratio,
               "errors": run.errors, "ratios": run.ratios, "mode": run.mode}
    certs = {
        "mean_ratio": abs(run.mean_ratio - rate) <= tol * rate,
        "ratios_bounded": all(r <= (1 + tol) * rate for r in run.ratios),
        "ratios_after_first": all(abs(r - rate) <= tol * rate for r in later),
    }
    return results, certs


HANDLERS = {
    "transform": cmd_transform,
    "kernel": cmd_kernel,
    "bounds": cmd_bounds,
    "stability": cmd_stability,
    "density": cmd_density,
    "extract": cmd_extract,
    "residuals": cmd_residuals,
    "reconstruct": cmd_reconstruct,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="framelab", description="Frame-bound numerics for Gabor and wavelet systems.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--assert", dest="assert_", action="store_true",
                   help="exit 1 if any certificate fails")
    p.add_argument("--out", default=None, help="output directory (default: ./framelab-out/<command>)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--geometry", choices=(PLANE, HALFPLANE), default=None)
    return p


def run(command: str, config_path, out_dir=None, seed=None, geometry=None, assert_=False,
        stream=sys.stderr) -> int:
    config_path = Path(config_path)
    try:
        raw = _load_json(config_path)
        cfg = resolve_config(command, raw, {"seed": seed, "geometry": geometry})
        ctx = Context(cfg, config_path.parent)
    except ConfigError as exc:
        print(f"framelab: config error: {exc}", file=stream)
        return 2
    out = Output(Path(out_dir) if out_dir else Path("framelab-out") / command)
    try:
        results, certs = HANDLERS[command](ctx, out)
    except ConfigError as exc:
        print(f"framelab: config error: {exc}", file=stream)
        return 2
    except (NumericalFailure, FrameDivergence, FloatingPointError, np.linalg.LinAlgError, ValueError,
            ZeroDivisionError, OverflowError) as exc:
        print(f"framelab: numerical failure: {exc}", file=stream)
        return 3
    header = {
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "version": __version__,
        "backend": _accel.backend(),
        "out": str(out.dir),
    }
    certs = {k: bool(v) for k, v in certs.items()}
    out.text("report.json", render_report(command, cfg, results, certs, header))
    failed = sorted(k for k, v in certs.items() if not v)
    for k in sorted(certs):
        print(f"{k}: {'PASS' if certs[k] else 'FAIL'}", file=stream)
    if assert_ and failed:
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.command, args.config, args.out, args.seed, args.geometry, args.assert_)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
