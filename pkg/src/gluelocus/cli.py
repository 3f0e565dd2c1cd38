"""Command line: run scene configs and write reports, CSV tables and meshes.

    gluelocus run CONFIG [--samples N] [--tol X] [--out-dir D]
    gluelocus gallery [--out-dir D]
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from importlib import resources
from pathlib import Path

from . import scene as sc
from .errors import ConfigError, GeometryError
from .glue import AbsentSurface

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNRESOLVED = 2
GALLERY = tuple(f"example{i}.json" for i in range(1, 7))


def gallery_path(name):
    """Path of a bundled gallery config, e.g. ``gallery_path("example2.json")``."""
    return Path(str(resources.files("gluelocus") / "gallery" / name))


def write_report(report, path):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text)


def invariants_csv(scene, path, ts=None):
    """Write the per-sample invariants table of ``scene`` to ``path``."""
    header, rows = sc.invariant_rows(scene, ts)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def export_mesh(S, t_range, a_range, resolution, path):
    """Write ``S`` over a (t, a) grid as a Wavefront OBJ file."""
    nt, na = resolution
    if nt < 2 or na < 2:
        raise ValueError("mesh resolution must be at least 2x2")
    pts, normals = sc.grid_points(S, t_range, a_range, (nt, na))
    Path(path).write_text(sc.obj_text(pts, normals))


def _default_surface(scene):
    for name, S in scene.surfaces.items():
        if not isinstance(S, AbsentSurface) and name.startswith("S_nu"):
            return name
    return next(n for n, S in scene.surfaces.items() if not isinstance(S, AbsentSurface))


def write_outputs(scene, report, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = scene.config
    written = []
    for out in cfg.outputs:
        target = out_dir / out.target
        if out.kind == "report":
            write_report(report, target)
        elif out.kind == "invariants_csv":
            invariants_csv(scene, target)
        else:
            name = out.surface or _default_surface(scene)
            if name not in scene.surfaces:
                raise ConfigError(f"{cfg.name}: mesh surface '{name}' is not one of {sorted(scene.surfaces)}")
            S = scene.surfaces[name]
            if isinstance(S, AbsentSurface):
                raise ConfigError(f"{cfg.name}: mesh surface {name} is absent ({S.reason})")
            export_mesh(S, cfg.interval, out.a_range or (-1.0, 1.0), out.resolution, target)
        written.append(target)
    return written


def run_config(cfg, out_dir="."):
    """Build, report and write outputs; returns ``(exit_code, report)``."""
    scene = sc.build_scene(cfg)
    report = sc.make_report(scene)
    write_outputs(scene, report, out_dir)
    code = EXIT_UNRESOLVED if report["unresolved"] else EXIT_OK
    return code, report


def run(config_path, samples=None, tol=None, out_dir=".", stderr=None):
    """Run one scene config; returns the exit code."""
    stderr = stderr or sys.stderr
    try:
        cfg = sc.load_config(config_path)
        if samples is not None:
            if samples < 3:
                raise ConfigError("--samples must be at least 3")
            cfg = dataclasses.replace(cfg, samples=samples)
        if tol is not None:
            cfg = dataclasses.replace(cfg, tol=tol)
        code, _ = run_config(cfg, out_dir)
        return code
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
    except GeometryError as exc:
        where = getattr(exc, "location", None)
        prefix = f"{config_path}: {where}: " if where else ""
        print(f"error: {prefix}{type(exc).__name__}: {exc}", file=stderr)
    return EXIT_ERROR


def build_parser():
    parser = argparse.ArgumentParser(prog="gluelocus", description="Glued surfaces along a curve.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one scene config")
    p_run.add_argument("config", help="path to a JSON scene config")
    p_run.add_argument("--samples", type=int, default=None, help="samples along the interval")
    p_run.add_argument("--tol", type=float, default=None, help="zero tolerance for beta and rho")
    p_run.add_argument("--out-dir", default=".", help="directory for outputs")
    p_gal = sub.add_parser("gallery", help="run the six bundled example scenes")
    p_gal.add_argument("--out-dir", default=".", help="directory for outputs")
    p_gal.add_argument("--list", action="store_true", help="print the config paths and exit")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run(args.config, args.samples, args.tol, args.out_dir)
    if args.list:
        for name in GALLERY:
            print(gallery_path(name))
        return EXIT_OK
    codes = [run(gallery_path(name), out_dir=args.out_dir) for name in GALLERY]
    return EXIT_ERROR if EXIT_ERROR in codes else max(codes)


__all__ = ["run", "run_config", "main", "invariants_csv", "export_mesh", "write_report",
           "gallery_path", "GALLERY"]
