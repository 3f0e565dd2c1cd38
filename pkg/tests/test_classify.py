import math

import numpy as np
import pytest

from gluelocus import classify as cf
from gluelocus import developables as dv
from gluelocus.errors import AssumptionViolated, PreconditionFailed

from conftest import gallery_scene, surface_frame

R2 = math.sqrt(2)
QUARTIC_CUSP = "[v, u^4 + 2*u*v + v^2, u^5 + u^2*v - v^2]"


def surf(name, key):
    return gallery_scene(name).surfaces[key]


@pytest.mark.parametrize("name,key,shape", [
    ("example1", "S_nu2", cf.CYLINDER),
    ("example2", "S_nu1", cf.CYLINDER),
    ("example2", "S_nu2", cf.CONE),
    ("example3", "S_nu1", cf.CYLINDER),
    ("example4", "S_nu2", cf.CONE),
    ("example6", "S_nu2", cf.GENERIC),
])
def test_surface_classes(name, key, shape):
    assert cf.classify_surface(surf(name, key)).shape == shape


def test_example5_s_nu2_is_a_cylinder_over_the_cusp():
    # the image (u^2, u^3 + v, v) has parallel rulings (0, 1, 1)
    sc = cf.classify_surface(surf("example5", "S_nu2"))
    assert sc.shape == cf.CYLINDER
    assert sc.witness["beta_max"] <= 1e-12


def test_cone_witness():
    sc = cf.classify_surface(surf("example4", "S_nu2"))
    assert sc.beta_max == pytest.approx(1 / (2 * R2))
    assert sc.rho_max <= 1e-9


def test_front_check_on_cone():
    fc = cf.front_check(surf("example4", "S_nu2"), 1.0)
    assert fc.front and fc.hypothesis_met


def test_front_check_on_cylinder_flags_hypothesis():
    fc = cf.front_check(surf("example3", "S_nu1"), 1.0)
    assert bool(fc) is True
    assert fc.hypothesis_met is False


def test_front_check_on_flat_frame():
    S = dv.DevelopableSurface(surface_frame("[u, v, 0]", interval=(0, 1)), dv.NU_TYPE)
    assert not cf.front_check(S, 0.5)


def test_example5_singularity_is_cuspidal_edge():
    lab = cf.classify_singularity(surf("example5", "S_nu2"), 0.0)
    assert lab.label == cf.CUSPIDAL_EDGE
    assert (lab.t, lab.a) == (0.0, 0.0)


def test_example6_singularity_is_swallowtail():
    assert cf.classify_singularity(surf("example6", "S_nu2"), 0.0).label == cf.SWALLOWTAIL


def test_cone_points_are_degenerate():
    lab = cf.classify_singularity(surf("example4", "S_nu2"), 1.3)
    assert lab.label == cf.DEGENERATE
    assert lab.a == pytest.approx(-1.0)


def test_generic_point_is_cuspidal_edge_with_nonzero_eta_lambda():
    lab = cf.classify_singularity(surf("example6", "S_nu2"), 0.5)
    assert lab.label == cf.CUSPIDAL_EDGE
    assert abs(lab.diagnostics["eta_lambda"]) > 1e-6


def test_classify_singularity_requires_nonzero_beta():
    with pytest.raises(AssumptionViolated) as info:
        cf.classify_singularity(surf("example1", "S_nu2"), 1.0)
    assert info.value.which == "beta"


def test_l0_terms_example5():
    S = surf("example5", "S_nu2")
    dl, ddl, p, q, _ = cf.l0_terms(S, 0.0)
    assert dl == pytest.approx(2.0, abs=1e-9)
    assert p == pytest.approx(-3 / (2 * R2), abs=1e-9)
    assert dl * p == pytest.approx(-2.1213203, abs=1e-6)
    assert cf.classify_singularity_l0(S, 0.0).label == cf.CUSPIDAL_EDGE


def test_l0_terms_example6():
    S = surf("example6", "S_nu2")
    dl, ddl, p, q, _ = cf.l0_terms(S, 0.0)
    assert dl == pytest.approx(0.0, abs=1e-9)
    assert ddl == pytest.approx(24.0, abs=1e-9)
    assert p * ddl == pytest.approx(-24.0, abs=1e-6)
    assert cf.classify_singularity_l0(S, 0.0).label == cf.SWALLOWTAIL


def test_l0_unresolved_when_l_vanishes_to_third_order():
    S = dv.build(surface_frame(QUARTIC_CUSP, singular=[(0.0, 3)]), dv.NU_TYPE, 51)
    lab = cf.classify_singularity_l0(S, 0.0)
    assert lab.label == cf.UNRESOLVED
    assert lab.diagnostics["beta_nonzero"]


def test_l0_cylinder_over_higher_cusp_is_degenerate():
    lab = cf.classify_singularity_l0(surf("example6", "S_b1"), 0.0)
    assert lab.label == cf.DEGENERATE
    assert lab.diagnostics["beta_nonzero"] is False


def test_l0_precondition():
    with pytest.raises(PreconditionFailed):
        cf.classify_singularity_l0(surf("example6", "S_nu2"), 0.5)


def test_rho_roots_of_example6():
    S = surf("example6", "S_nu2")
    roots = cf.find_rho_roots(S)
    assert all(abs(float(S.rho(r))) <= 1e-9 for r in roots)
    assert any(abs(r) < 1e-9 for r in roots)
