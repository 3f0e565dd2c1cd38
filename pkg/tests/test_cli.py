import csv
import io
import json
import math

import numpy as np
import pytest

from gluelocus import cli
from gluelocus import scene as sc
from gluelocus.errors import ConfigError, ParseError

from conftest import gallery_report, gallery_scene

R2 = math.sqrt(2)


def write_config(tmp_path, **overrides):
    data = {
        "name": "sheet",
        "surfaces": [{"name": "f", "expr": ["u", "v", "u^2"]}],
        "interval": [0.0, 1.0],
        "samples": 11,
        "outputs": [{"kind": "report", "target": "sheet.json"}],
    }
    data.update(overrides)
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(data))
    return path


def test_gallery_configs_ship_with_the_package():
    for name in cli.GALLERY:
        assert cli.gallery_path(name).is_file()


def test_run_example2(tmp_path):
    assert cli.run(cli.gallery_path("example2.json"), out_dir=tmp_path) == 0
    report = json.loads((tmp_path / "example2_report.json").read_text())
    assert {"S_nu1-cylindrical", "S_nu2-conical"} <= set(report["glue_labels"])
    assert report["frame_source"] == "extracted"
    assert any("f1" in n and "rejected" in n for n in report["notes"])
    for name in ("example2_invariants.csv", "example2_S_nu2.obj"):
        assert (tmp_path / name).stat().st_size > 0


def test_example6_report_has_swallowtail_at_origin():
    report = gallery_report("example6")
    points = [p for p in report["points"] if p["surface"] == "S_nu2" and p["t"] == 0.0]
    assert points[0]["label"] == "swallowtail"
    assert "S_nu2-swallowtailed" in report["glue_labels"]


def test_report_residuals_carry_tolerances():
    report = gallery_report("example6")
    for name, entry in report["residuals"].items():
        assert entry["tol"] == sc.RESIDUAL_TOLS[name]
        assert entry["ok"], name


def test_malformed_expression_exits_with_offset(tmp_path):
    path = write_config(tmp_path, surfaces=[{"expr": "[u, , u]"}])
    err = io.StringIO()
    assert cli.run(path, out_dir=tmp_path, stderr=err) == 1
    assert "ParseError" in err.getvalue() and "offset 4" in err.getvalue()
    assert "surfaces[0].expr" in err.getvalue()


def test_parse_error_keeps_offset(tmp_path):
    path = write_config(tmp_path, surfaces=[{"expr": "[u, , u]"}])
    with pytest.raises(ParseError) as info:
        sc.load_config(path)
    assert info.value.offset == 4


@pytest.mark.parametrize("override,needle", [
    ({"interval": [1.0, 1.0]}, "interval"),
    ({"samples": 2}, "samples"),
    ({"surfaces": []}, "surfaces"),
    ({"surfaces": [{"expr": "[u, v, 0]", "orientation": 2}]}, "orientation"),
    ({"frame_source": "guess"}, "frame_source"),
    ({"outputs": [{"kind": "ply", "target": "x"}]}, "kind"),
    ({"singular_params": [{"t0": 5.0, "multiplicity": 1}]}, "outside"),
])
def test_config_errors_name_their_location(tmp_path, override, needle):
    path = write_config(tmp_path, **override)
    with pytest.raises(ConfigError) as info:
        sc.load_config(path)
    assert needle in str(info.value)
    err = io.StringIO()
    assert cli.run(path, out_dir=tmp_path, stderr=err) == 1
    assert needle in err.getvalue()


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{")
    err = io.StringIO()
    assert cli.run(path, stderr=err) == 1
    assert "line 1" in err.getvalue()


def test_single_surface_scene(tmp_path):
    path = write_config(tmp_path)
    assert cli.run(path, out_dir=tmp_path) == 0
    report = json.loads((tmp_path / "sheet.json").read_text())
    assert set(report["surfaces"]) == {"S_nu", "S_b"}
    assert "glue_labels" not in report


def test_unresolved_label_exits_2(tmp_path):
    path = write_config(
        tmp_path,
        surfaces=[{"expr": "[v, u^4 + 2*u*v + v^2, u^5 + u^2*v - v^2]"}],
        interval=[-1.0, 1.0], samples=21,
        singular_params=[{"t0": 0.0, "multiplicity": 3}],
    )
    assert cli.run(path, out_dir=tmp_path) == 2


def test_samples_and_tol_flags(tmp_path):
    path = write_config(tmp_path)
    assert cli.main(["run", str(path), "--samples", "7", "--tol", "1e-6", "--out-dir", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "sheet.json").read_text())["samples"] == 7
    assert cli.run(path, samples=2, out_dir=tmp_path, stderr=io.StringIO()) == 1


def test_gallery_list(capsys):
    assert cli.main(["gallery", "--list"]) == 0
    assert capsys.readouterr().out.count("example") == 6


def read_csv(scene, tmp_path):
    path = tmp_path / "inv.csv"
    cli.invariants_csv(scene, path)
    with open(path) as fh:
        return list(csv.reader(fh))


def test_invariants_csv_example1(tmp_path):
    rows = read_csv(gallery_scene("example1"), tmp_path)
    header = rows[0]
    assert header[:2] == ["t", "l"] and header[-1] == "theta"
    cols = {h: np.array([float(r[i]) for r in rows[1:]]) for i, h in enumerate(header) if h.startswith("kappa2")}
    assert cols["kappa21"] == pytest.approx(np.full(201, -1 / R2), abs=1e-12)
    assert cols["kappa22"] == pytest.approx(np.zeros(201), abs=1e-12)
    assert cols["kappa23"] == pytest.approx(np.full(201, 1 / R2), abs=1e-12)


def test_invariants_csv_example3_beta_and_empty_cells(tmp_path):
    rows = read_csv(gallery_scene("example3"), tmp_path)
    header = rows[0]
    i = header.index("beta_nu1")
    assert max(abs(float(r[i])) for r in rows[1:]) <= 1e-9
    # S_nu1 is a cylinder: no striction parameter
    j = header.index("s_nu1")
    assert all(r[j] == "" for r in rows[1:])


def test_invariants_csv_single_surface_header(tmp_path):
    cfg = sc.load_config(write_config(tmp_path))
    rows = read_csv(sc.build_scene(cfg), tmp_path)
    assert rows[0] == ["t", "l", "kappa1", "kappa2", "kappa3", "beta_nu", "rho_nu", "beta_b", "rho_b",
                       "s_nu", "s_b"]
    assert rows[1][0] == "0" and len(rows) == 12


def test_flat_sheet_mesh():
    pts = np.array([[[0, 0, 0], [0, 1, 0]], [[1, 0, 0], [1, 1, 0]]], dtype=float)
    normals = np.tile([0.0, 0.0, 1.0], (2, 2, 1))
    text = sc.obj_text(pts, normals)
    faces = [l for l in text.splitlines() if l.startswith("f ")]
    assert len(faces) == 2
    assert all(l == "vn 0 0 1" for l in text.splitlines() if l.startswith("vn "))
    # faces follow the grid orientation, whose normal is +z
    idx = [[int(tok.split("//")[0]) - 1 for tok in f.split()[1:]] for f in faces]
    flat = pts.reshape(-1, 3)
    for a, b, c in idx:
        assert np.cross(flat[b] - flat[a], flat[c] - flat[a])[2] != 0


def test_mesh_resolution_must_be_2x2(tmp_path):
    with pytest.raises(ValueError):
        cli.export_mesh(gallery_scene("example4").surfaces["S_nu2"], (0.2, 2.9), (-1, 1), (1, 5), tmp_path / "m.obj")


def obj_vertices(path):
    return np.array([[float(x) for x in l.split()[1:]] for l in open(path) if l.startswith("v ")])


def test_cone_mesh_repeats_apex(tmp_path):
    S = gallery_scene("example4").surfaces["S_nu2"]
    cli.export_mesh(S, (0.2, 2.9), (-1.0, 1.0), (9, 5), tmp_path / "cone.obj")
    v = obj_vertices(tmp_path / "cone.obj").reshape(9, 5, 3)
    assert v[:, 0, :] == pytest.approx(np.zeros((9, 3)), abs=1e-9)


def test_cuspidal_edge_mesh_contains_cusp_curve(tmp_path):
    S = gallery_scene("example5").surfaces["S_nu2"]
    cli.export_mesh(S, (-1.0, 1.0), (-0.5, 0.5), (21, 5), tmp_path / "cusp.obj")
    v = obj_vertices(tmp_path / "cusp.obj").reshape(21, 5, 3)
    u = np.linspace(-1, 1, 21)
    assert v[:, 2, :] == pytest.approx(np.stack([u**2, u**3, 0 * u], axis=1), abs=1e-12)
    assert v[10, 2] == pytest.approx([0, 0, 0], abs=1e-15)


def test_mesh_of_absent_surface_is_an_error(tmp_path):
    path = write_config(tmp_path, outputs=[{"kind": "mesh", "target": "m.obj", "surface": "S_b"}])
    err = io.StringIO()
    assert cli.run(path, out_dir=tmp_path, stderr=err) == 1
    assert "absent" in err.getvalue()
