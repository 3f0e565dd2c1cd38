"""Scene configs: loading, building frames and surfaces, and the report.

A scene is one JSON file describing one surface or a glue of two, the
parameter interval, declared singular parameters, optional printed frames
and stated values to compare against, and the outputs to write.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classify as cf
from . import curvelang
from . import developables as dv
from . import frames
from . import glue as gl
from .errors import (
    ConfigError,
    DegenerateNormal,
    FrameInvalid,
    GeometryError,
    NotApplicable,
    ParseError,
)

FRAME_SOURCES = ("auto", "explicit", "extracted")
OUTPUT_KINDS = ("report", "invariants_csv", "mesh")
STATED_TOL = 1e-8

# tolerances each residual is tested against
RESIDUAL_TOLS = {
    "orthonormality": 1e-10,
    "tangent": 1e-9,
    "frenet": 1e-9,
    "kttheta": 1e-9,
    "ruling_derivative": 1e-9,
    "frontal": 1e-9,
    "envelope": 1e-9,
    "gaussian_curvature": 1e-8,
    "striction_parallel": 1e-8,
    "lambda_at_striction": 1e-9,
    "rotation_kappa": 1e-9,
    "rodrigues": 1e-9,
    "expanded_beta": 1e-8,
    "expanded_rho": 1e-8,
    "b_ruling": 1e-9,
}


@dataclass
class SurfaceSpec:
    name: str
    expr: curvelang.ParametricMap
    orientation: int = 1
    frame: dict | None = None


@dataclass
class OutputSpec:
    kind: str
    target: str
    surface: str | None = None
    a_range: tuple | None = None
    resolution: tuple = (41, 11)


@dataclass
class SceneConfig:
    name: str
    surfaces: list
    interval: tuple
    samples: int = dv.DEFAULT_SAMPLES
    singular_params: list = field(default_factory=list)
    frame_source: str = "auto"
    stated: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    title: str = ""
    tol: float = dv.ZERO_TOL


# -- config parsing -----------------------------------------------------------

def _require(obj, key, where):
    if key not in obj:
        raise ConfigError(f"{where}: missing required key '{key}'")
    return obj[key]


def _parse_map(src, where, arity=None):
    try:
        return curvelang.parse(src, arity)
    except ParseError as exc:
        exc.location = where
        raise
    except GeometryError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_expr(src, where):
    try:
        return curvelang.parse_expr(str(src))
    except ParseError as exc:
        exc.location = where
        raise


def parse_config(data, source="<config>"):
    """Validate a decoded JSON object and return a :class:`SceneConfig`."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    surfaces = []
    raw_surfaces = _require(data, "surfaces", source)
    if not isinstance(raw_surfaces, list) or len(raw_surfaces) not in (1, 2):
        raise ConfigError(f"{source}: 'surfaces' must list one or two surfaces")
    top_frames = data.get("frames")
    if top_frames is not None and (not isinstance(top_frames, list) or len(top_frames) != len(raw_surfaces)):
        raise ConfigError(f"{source}: 'frames' must list one entry (or null) per surface")
    for i, s in enumerate(raw_surfaces):
        where = f"{source}: surfaces[{i}]"
        src = _require(s, "expr", where)
        if isinstance(src, list):
            if len(src) != 3:
                raise ConfigError(f"{where}.expr: expected 3 components, got {len(src)}")
            src = "[" + ", ".join(str(c) for c in src) + "]"
        expr = _parse_map(src, f"{where}.expr", "surface")
        orientation = s.get("orientation", 1)
        if orientation not in (1, -1):
            raise ConfigError(f"{where}.orientation: must be 1 or -1")
        frame = s.get("frame", top_frames[i] if top_frames else None)
        if frame is not None:
            frame = {
                "e": _parse_map(_require(frame, "e", f"{where}.frame"), f"{where}.frame.e", "curve"),
                "nu": _parse_map(_require(frame, "nu", f"{where}.frame"), f"{where}.frame.nu", "curve"),
                "l": _parse_expr(_require(frame, "l", f"{where}.frame"), f"{where}.frame.l"),
            }
        surfaces.append(SurfaceSpec(s.get("name", f"f{i + 1}"), expr, int(orientation), frame))
    interval = _require(data, "interval", source)
    if not (isinstance(interval, list) and len(interval) == 2) or not interval[0] < interval[1]:
        raise ConfigError(f"{source}: interval must be [t_min, t_max] with t_min < t_max")
    samples = int(data.get("samples", dv.DEFAULT_SAMPLES))
    if samples < 3:
        raise ConfigError(f"{source}: samples must be at least 3")
    singular = []
    for i, p in enumerate(data.get("singular_params", [])):
        where = f"{source}: singular_params[{i}]"
        t0 = float(_require(p, "t0", where))
        m = int(_require(p, "multiplicity", where))
        if m < 0:
            raise ConfigError(f"{where}.multiplicity: must be non-negative")
        if not interval[0] <= t0 <= interval[1]:
            raise ConfigError(f"{where}.t0: {t0} lies outside the interval")
        singular.append(frames.SingularParam(t0, m))
    source_kind = data.get("frame_source", "auto")
    if source_kind not in FRAME_SOURCES:
        raise ConfigError(f"{source}: frame_source must be one of {FRAME_SOURCES}")
    stated = {k: _parse_expr(v, f"{source}: stated.{k}") for k, v in data.get("stated", {}).items()}
    outputs = []
    for i, o in enumerate(data.get("outputs", [])):
        where = f"{source}: outputs[{i}]"
        kind = _require(o, "kind", where)
        if kind not in OUTPUT_KINDS:
            raise ConfigError(f"{where}.kind: must be one of {OUTPUT_KINDS}")
        res = tuple(int(r) for r in o.get("resolution", (41, 11)))
        if kind == "mesh" and (len(res) != 2 or min(res) < 2):
            raise ConfigError(f"{where}.resolution: must be [n_t, n_a] with both >= 2")
        a_range = o.get("a_range")
        outputs.append(OutputSpec(kind, str(_require(o, "target", where)), o.get("surface"),
                                  tuple(a_range) if a_range else None, res))
    return SceneConfig(
        name=str(data.get("name", Path(str(source)).stem)),
        surfaces=surfaces,
        interval=(float(interval[0]), float(interval[1])),
        samples=samples,
        singular_params=singular,
        frame_source=source_kind,
        stated=stated,
        outputs=outputs,
        title=str(data.get("title", "")),
        tol=float(data.get("tol", dv.ZERO_TOL)),
    )


def load_config(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    return parse_config(data, str(path))


# -- building -------------------------------------------------------------------

@dataclass
class Scene:
    config: SceneConfig
    frames: list
    frame_source: str
    glue: gl.GlueScene | None
    surfaces: dict
    notes: list


def _extract(cfg, spec):
    return frames.frame_from_surface(spec.expr, spec.orientation, cfg.singular_params, cfg.interval)


def _explicit(cfg, spec):
    gamma = curvelang.restrict(spec.expr, 0.0)
    f = spec.frame
    return frames.frame_explicit(gamma, f["e"], f["nu"], f["l"], cfg.interval, cfg.singular_params)


def _choose_frames(cfg, notes):
    specs = cfg.surfaces
    want_explicit = cfg.frame_source == "explicit" or (
        cfg.frame_source == "auto" and all(s.frame is not None for s in specs)
    )
    if cfg.frame_source == "explicit" and any(s.frame is None for s in specs):
        raise ConfigError(f"{cfg.name}: frame_source 'explicit' needs a frame for every surface")
    if want_explicit:
        try:
            return [_explicit(cfg, s) for s in specs], "explicit"
        except FrameInvalid as exc:
            if cfg.frame_source == "explicit":
                raise
            failed = next(s.name for s in specs if not _frame_ok(cfg, s))
            notes.append(
                f"printed frame of {failed} rejected ({exc}); frames extracted from the surfaces"
            )
    return [_extract(cfg, s) for s in specs], "extracted"


def _frame_ok(cfg, spec):
    try:
        _explicit(cfg, spec)
        return True
    except FrameInvalid:
        return False


def _compare_printed_normals(cfg, fcs, notes):
    ts = np.linspace(cfg.interval[0], cfg.interval[1], cfg.samples)
    for spec, fc in zip(cfg.surfaces, fcs):
        try:
            agree = frames.normals_agree(fc, _extract(cfg, spec), ts)
        except DegenerateNormal as exc:
            notes.append(f"{spec.name}: surface normal check skipped ({exc})")
            continue
        if agree != "same":
            notes.append(f"{spec.name}: printed nu and the surface normal are {agree}")


def build_scene(cfg):
    notes = []
    fcs, source = _choose_frames(cfg, notes)
    if source == "explicit":
        _compare_printed_normals(cfg, fcs, notes)
    if len(fcs) == 2:
        g = gl.make_glue(fcs[0], fcs[1], cfg.samples, cfg.tol)
        surfaces = dict(g.surfaces)
    else:
        g = None
        surfaces = {}
        for name, kind in (("S_nu", dv.NU_TYPE), ("S_b", dv.B_TYPE)):
            try:
                surfaces[name] = dv.build(fcs[0], kind, cfg.samples, cfg.tol)
            except GeometryError as exc:
                surfaces[name] = gl.AbsentSurface(name, str(exc), getattr(exc, "t", None))
    return Scene(cfg, fcs, source, g, surfaces, notes)


# -- per-sample quantities ---------------------------------------------------------

def frame_columns(fc, ts):
    """Invariant columns of one frame; ``s`` is NaN where it is undefined."""
    inv = frames.invariants(fc, ts, 2)
    cols = {"l": inv.l.value, "kappa1": inv.kappa1.value, "kappa2": inv.kappa2.value,
            "kappa3": inv.kappa3.value}
    for kind, tag, pair in ((dv.NU_TYPE, "nu", inv.kappa1), (dv.B_TYPE, "b", inv.kappa2)):
        beta, rho = dv.beta_rho(inv, kind)
        b, r = beta.value, rho.value
        p, k3 = pair.value, inv.kappa3.value
        n = np.hypot(p, k3)
        scale = 1.0 + np.max(np.abs([cols["kappa1"], cols["kappa2"], cols["kappa3"], cols["l"]]))
        ok = (np.abs(b) > dv.ZERO_TOL * scale) & (n > dv.ZERO_TOL * scale)
        sign = 1.0 if kind == dv.NU_TYPE else -1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(ok, sign * cols["l"] * p * n / b, np.nan)
        cols[f"beta_{tag}"], cols[f"rho_{tag}"], cols[f"s_{tag}"] = b, r, s
    return cols


def computed_quantity(scene, name, ts):
    """Value of a named quantity (as used in ``stated``) at ``ts``."""
    if scene.glue is not None and name in ("theta", "cos_theta", "sin_theta", "theta_prime"):
        th = scene.glue.theta(ts, 1)
        return {"theta": th.value, "cos_theta": np.cos(th.value), "sin_theta": np.sin(th.value),
                "theta_prime": th.derivative().value}[name]
    if name == "l":
        return frames.invariants(scene.frames[0], ts, 0).l.value
    base, idx = name, 0
    if scene.glue is not None:
        if name.startswith("kappa") and len(name) == 7:
            idx, base = int(name[5]) - 1, f"kappa{name[6]}"
        elif name[-1] in "12" and name[:-1] in ("beta_nu", "rho_nu", "beta_b", "rho_b", "s_nu", "s_b"):
            idx, base = int(name[-1]) - 1, name[:-1]
    cols = frame_columns(scene.frames[idx], ts)
    if base not in cols:
        raise ConfigError(f"unknown stated quantity '{name}'")
    return cols[base]


def compare_stated(scene, ts):
    out = {}
    for name, expr in sorted(scene.config.stated.items()):
        computed = computed_quantity(scene, name, ts)
        stated = curvelang.eval_expr(expr, ts)
        diff = np.abs(computed - stated)
        i = int(np.nanargmax(diff))
        agrees = bool(np.nanmax(diff) <= STATED_TOL)
        out[name] = {"max_abs_diff": float(diff[i]), "at_t": float(ts[i]), "agrees": agrees,
                     "tol": STATED_TOL}
        if not agrees:
            scene.notes.append(
                f"stated {name} disagrees with the computed value "
                f"(max |diff| {diff[i]:.6g} at t={ts[i]:.6g})"
            )
    return out


# -- residuals ----------------------------------------------------------------------

def _regular(fc, ts, tol=1e-3):
    return frames.regular_samples(fc, ts, tol)


def _max(x):
    x = np.asarray(x, dtype=float)
    return float(np.max(x)) if x.size else 0.0


def scene_residuals(scene, ts=None):
    """Maxima of every identity residual, keyed by name."""
    cfg = scene.config
    ts = np.linspace(cfg.interval[0], cfg.interval[1], cfg.samples) if ts is None else ts
    res = {k: 0.0 for k in ("orthonormality", "tangent", "frenet", "kttheta")}
    for fc in scene.frames:
        res["orthonormality"] = max(res["orthonormality"], _max(frames.orthonormality_residual(fc, ts)))
        res["tangent"] = max(res["tangent"], _max(frames.tangent_residual(fc, ts)))
        res["frenet"] = max(res["frenet"], _max(frames.frenet_residual(fc, ts)))
        reg = _regular(fc, ts)
        if reg.size:
            res["kttheta"] = max(res["kttheta"], _max(frames.kttheta_residual(fc, reg)))
    for key in ("ruling_derivative", "frontal", "envelope", "gaussian_curvature",
                "striction_parallel", "lambda_at_striction"):
        res[key] = 0.0
    for name, S in scene.surfaces.items():
        if isinstance(S, gl.AbsentSurface):
            continue
        res.update({k: max(res[k], v) for k, v in surface_residuals(S, ts).items()})
    if scene.glue is not None:
        g = scene.glue
        rot = gl.rotation_identities(g, ts)
        res["rotation_kappa"] = max(_max(rot["kappa21"]), _max(rot["kappa22"]), _max(rot["kappa23"]))
        res["rodrigues"] = max(_max(rot["rodrigues_nu"]), _max(rot["rodrigues_b"]))
        eb, er = gl.expanded_residual(g, ts)
        res["expanded_beta"], res["expanded_rho"] = _max(eb), _max(er)
        try:
            res["b_ruling"] = _max(gl.b_ruling_residual(g, ts))
        except NotApplicable:
            pass
    return {k: {"max": float(v), "tol": RESIDUAL_TOLS[k], "ok": bool(v <= RESIDUAL_TOLS[k])}
            for k, v in sorted(res.items())}


RULING_GRID = (-1.0, -0.5, 0.5, 1.0)


def surface_residuals(S, ts):
    """Residual maxima of one developable over ``ts`` and a few ruling offsets."""
    out = {"ruling_derivative": _max(dv.ruling_derivative_residual(S, ts))}
    rj = S.jets_at(ts, 2)
    frontal = env = 0.0
    n, dn = rj.normal.value, rj.normal.derivative().value
    for a in RULING_GRID:
        frontal = max(frontal, _max(dv.frontal_residual(S, ts, a)))
        X = rj.gamma.value + a * rj.delta.value
        diff = X - rj.gamma.value
        env = max(env, _max(np.abs(np.sum(n * diff, axis=0))), _max(np.abs(np.sum(dn * diff, axis=0))))
    out["frontal"], out["envelope"] = frontal, env
    gauss = 0.0
    sub = ts[:: max(1, ts.size // 20)]
    for a in RULING_GRID:
        K = dv.gaussian_curvature_values(S, sub, a, 1e-2)
        if np.any(~np.isnan(K)):
            gauss = max(gauss, float(np.nanmax(np.abs(K))))
    out["gaussian_curvature"] = gauss
    beta = rj.beta.value
    scale = 1.0 + max(_max(np.abs(k.value)) for k in (*rj.kappa, rj.l))
    non_cyl = ts[np.abs(beta) > 1e-6 * scale]
    if non_cyl.size:
        out["striction_parallel"] = _max(dv.striction_parallel_residual(S, non_cyl))
        r2 = S.jets_at(non_cyl, 0)
        out["lambda_at_striction"] = _max(np.abs(r2.lam_a0.value + r2.striction.value * r2.lam_slope.value))
    return out


# -- report -------------------------------------------------------------------------

def _clean(x):
    """JSON-safe copy with NaN mapped to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return None if math.isnan(float(x)) else float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def _point_entry(surface, lab):
    return {"surface": surface, "t": lab.t, "a": lab.a, "label": lab.label, "rule": lab.rule,
            "diagnostics": lab.diagnostics}


def make_report(scene):
    """Deterministic report dictionary for ``scene``."""
    cfg = scene.config
    ts = np.linspace(cfg.interval[0], cfg.interval[1], cfg.samples)
    report = {
        "scene": cfg.name,
        "title": cfg.title,
        "interval": list(cfg.interval),
        "samples": cfg.samples,
        "frame_source": scene.frame_source,
        "singular_params": [{"t0": p.t0, "multiplicity": p.multiplicity} for p in cfg.singular_params],
    }
    surfaces, points, cusp_counts = {}, [], {}
    declared = [p.t0 for p in cfg.singular_params]
    for name, S in scene.surfaces.items():
        if isinstance(S, gl.AbsentSurface):
            surfaces[name] = {"class": "absent", "reason": S.reason}
            continue
        sc = cf.classify_surface(S, tol=cfg.tol)
        entry = {"class": sc.shape, "beta_max": sc.beta_max, "rho_max": sc.rho_max, "tol": sc.tol}
        if sc.shape == cf.CONE:
            entry["apex"] = dv.striction(S, float(ts[0]))[1]
        surfaces[name] = entry
        if sc.shape == cf.CONE:
            continue
        for t0 in declared:
            points.append(_point_entry(name, cf.classify_singularity_l0(S, t0, cfg.tol)))
        if sc.shape == cf.GENERIC:
            count = 0
            reg = ts[[all(abs(t - d) > 1e-9 for d in declared) for t in ts]]
            rj = S.jets_at(reg, 0)
            nonzero = np.abs(rj.beta.value) > cfg.tol
            count = int(np.sum(nonzero & (np.abs(rj.rho.value) > cfg.tol)))
            cusp_counts[name] = count
            for r in cf.find_rho_roots(S, cfg.samples):
                if any(abs(r - d) < 1e-6 for d in declared):
                    continue
                try:
                    points.append(_point_entry(name, cf.classify_singularity(S, r, cfg.tol)))
                except GeometryError as exc:
                    scene.notes.append(f"{name}: rho root at t={r:.6g} not classified ({exc})")
    report["surfaces"] = surfaces
    report["points"] = points
    report["cuspidal_edge_samples"] = cusp_counts
    if scene.glue is not None:
        label = gl.classify_glue(scene.glue)
        report["glue_labels"] = label.names()
        try:
            report["special_angle"] = gl.special_angle_equivalences(scene.glue)
        except NotApplicable as exc:
            report["special_angle"] = {"applicable": False, "reason": str(exc)}
    report["residuals"] = scene_residuals(scene, ts)
    report["stated"] = compare_stated(scene, ts)
    report["notes"] = list(scene.notes)
    report["unresolved"] = sum(1 for p in points if p["label"] == cf.UNRESOLVED)
    return _clean(report)


# -- CSV and mesh ---------------------------------------------------------------------

SINGLE_COLUMNS = ("l", "kappa1", "kappa2", "kappa3", "beta_nu", "rho_nu", "beta_b", "rho_b",
                  "s_nu", "s_b")


def _fmt(x):
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else format(float(x), ".17g")


def invariant_rows(scene, ts=None):
    """Header and rows of the invariants table."""
    cfg = scene.config
    ts = np.linspace(cfg.interval[0], cfg.interval[1], cfg.samples) if ts is None else ts
    header = ["t", "l"]
    columns = [ts, None]
    per = [frame_columns(fc, ts) for fc in scene.frames]
    columns[1] = per[0]["l"]
    for i, cols in enumerate(per):
        suffix = str(i + 1) if len(per) == 2 else ""
        for key in SINGLE_COLUMNS[1:]:
            if key.startswith("kappa") and suffix:
                header.append(f"kappa{suffix}{key[-1]}")
            else:
                header.append(key + suffix)
            columns.append(cols[key])
    if scene.glue is not None:
        header.append("theta")
        columns.append(scene.glue.theta(ts, 0).value)
    rows = [[_fmt(c[i]) for c in columns] for i in range(ts.size)]
    return header, rows


def grid_points(S, t_range, a_range, resolution):
    """Vertices and normals on a (t, a) grid, shapes ``(n_t, n_a, 3)``."""
    nt, na = resolution
    ts = np.linspace(t_range[0], t_range[1], nt)
    avals = np.linspace(a_range[0], a_range[1], na)
    rj = S.jets_at(ts, 0)
    pts = rj.gamma.value.T[:, None, :] + avals[None, :, None] * rj.delta.value.T[:, None, :]
    normals = np.repeat(rj.normal.value.T[:, None, :], na, axis=1)
    return pts, normals


def obj_text(points, normals):
    """Wavefront OBJ text for a grid of vertices (row-major over the grid)."""
    nt, na, _ = points.shape
    lines = [f"v {x:.12g} {y:.12g} {z:.12g}" for x, y, z in points.reshape(-1, 3)]
    lines += [f"vn {x:.12g} {y:.12g} {z:.12g}" for x, y, z in normals.reshape(-1, 3)]
    for i in range(nt - 1):
        for j in range(na - 1):
            a = i * na + j + 1
            b, c, d = a + na, a + na + 1, a + 1
            lines.append(f"f {a}//{a} {b}//{b} {c}//{c}")
            lines.append(f"f {a}//{a} {c}//{c} {d}//{d}")
    return "\n".join(lines) + "\n"


__all__ = [
    "SceneConfig", "SurfaceSpec", "OutputSpec", "Scene", "parse_config", "load_config",
    "build_scene", "frame_columns", "computed_quantity", "compare_stated", "scene_residuals",
    "surface_residuals", "make_report", "invariant_rows", "grid_points", "obj_text",
    "RESIDUAL_TOLS",
]
