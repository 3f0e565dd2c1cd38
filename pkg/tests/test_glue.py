import math

import numpy as np
import pytest

from gluelocus import glue as gl
from gluelocus.errors import GluingMismatch, NotApplicable

from conftest import gallery_scene, surface_frame

SPHERE = "[sin(v + pi/2)*cos(u), sin(v + pi/2)*sin(u), cos(v + pi/2)]"


def glue(name):
    return gallery_scene(name).glue


@pytest.fixture(scope="module")
def self_glue():
    fc = surface_frame(SPHERE, interval=(0.2, 2.9))
    return gl.make_glue(fc, fc, 51)


def test_example3_signed_angle():
    g = glue("example3")
    th = g.theta(g.sample_params(), 1)
    assert th.value == pytest.approx(np.full(201, -math.pi / 2), abs=1e-12)
    assert th.derivative().value == pytest.approx(np.zeros(201), abs=1e-12)


def test_example6_cos_theta_matches_print():
    g = glue("example6")
    u = np.linspace(-1, 1, 21)
    assert np.cos(g.theta(u, 0).value) == pytest.approx(u**2 / np.sqrt(1 + u**2 + u**4), abs=1e-12)


def test_example4_angle_is_three_quarter_turn():
    g = glue("example4")
    assert g.theta(1.0, 0).value == pytest.approx(3 * math.pi / 4)


def test_theta_is_continuous_over_long_interval():
    g = glue("example1")
    th = g.theta(g.sample_params(), 0).value
    assert np.abs(np.diff(th)).max() < 0.2


def test_self_glue_angle_is_zero(self_glue):
    assert self_glue.theta(np.linspace(0.2, 2.9, 5), 1).coeffs == pytest.approx(np.zeros((2, 5)), abs=1e-12)


def test_mismatched_curves_rejected():
    a = surface_frame("[cos(u), sin(u), v]", interval=(0, 1))
    b = surface_frame("[cos(u), sin(u), 0.1 + v]", interval=(0, 1))
    with pytest.raises(GluingMismatch):
        gl.make_glue(a, b)


@pytest.mark.parametrize("name,t", [("example1", 1.0), ("example5", 0.5), ("example6", 0.0)])
def test_rotation_identities(name, t):
    res = gl.rotation_identities(glue(name), np.array([t]))
    assert max(float(v.max()) for v in res.values()) <= 1e-9


def test_self_glue_identities_reduce_to_equality(self_glue):
    res = gl.rotation_identities(self_glue, np.linspace(0.2, 2.9, 5))
    assert max(float(v.max()) for v in res.values()) <= 1e-12


@pytest.mark.parametrize("name", ["example1", "example2", "example3", "example4", "example5", "example6"])
def test_expanded_beta_rho_match_direct(name):
    g = glue(name)
    eb, er = gl.expanded_residual(g, g.sample_params())
    assert eb.max() <= 1e-8 and er.max() <= 1e-8


@pytest.mark.parametrize("name", ["example1", "example4", "example6"])
def test_b_ruling_is_quarter_turned_nu_ruling(name):
    g = glue(name)
    assert gl.b_ruling_residual(g, g.sample_params()).max() <= 1e-9


def test_b_ruling_needs_s_b1():
    with pytest.raises(NotApplicable):
        gl.b_ruling_residual(glue("example2"), np.array([0.5]))


def test_example2_labels():
    names = gl.classify_glue(glue("example2")).names()
    assert "S_nu1-cylindrical" in names and "S_nu2-conical" in names


def test_example4_cone_apex_reported():
    label = gl.classify_glue(glue("example4"))
    assert label.surfaces["S_nu2"]["apex"] == pytest.approx([0, 0, 0], abs=1e-9)


def test_example5_cuspidal_edgy():
    label = gl.classify_glue(glue("example5"))
    assert "S_nu2-cuspidal edgy" in label.names()
    assert (0.0, "S_nu2", "cuspidal_edge") in label.points


def test_example6_swallowtailed():
    label = gl.classify_glue(glue("example6"))
    assert "S_nu2-swallowtailed" in label.names()
    assert (0.0, "S_nu2", "swallowtail") in label.points
    assert label.surfaces["S_nu1"]["class"] == "absent"


def test_special_angle_quarter_turn():
    out = gl.special_angle_equivalences(glue("example3"))
    assert out["compared"] == ["S_nu2", "S_b1"]
    assert out["agree"]


def test_special_angle_self_glue(self_glue):
    out = gl.special_angle_equivalences(self_glue)
    assert out["k"] == 0 and out["compared"] == ["S_nu2", "S_nu1"] and out["agree"]


def test_special_angle_needs_constant_theta():
    with pytest.raises(NotApplicable):
        gl.special_angle_equivalences(glue("example5"))
