import math

import numpy as np
import pytest

from gluelocus import developables as dv
from gluelocus import frames
from gluelocus.errors import AssumptionViolated, CylindricalAt, SingularPoint

from conftest import gallery_scene, surface_frame

R2 = math.sqrt(2)


def surf(name, key):
    return gallery_scene(name).surfaces[key]


def test_example4_beta_constant():
    S = surf("example4", "S_nu2")
    assert S.beta(np.linspace(0.2, 2.9, 7)) == pytest.approx(np.full(7, 1 / (2 * R2)), abs=1e-12)


def test_example1_beta_vanishes():
    S = surf("example1", "S_nu2")
    assert np.abs(S.beta(S.sample_params())).max() <= 1e-9


def test_flat_frame_violates_assumption():
    fc = surface_frame("[u, v, 0]", interval=(0, 1))
    with pytest.raises(AssumptionViolated) as info:
        dv.build(fc, dv.NU_TYPE)
    assert info.value.which == "(kappa1, kappa3)"


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        dv.DevelopableSurface(surface_frame("[u, v, 0]", interval=(0, 1)), "tangent")


def test_ruling_zero_is_base_curve():
    S = surf("example5", "S_nu2")
    sample = dv.evaluate(S, 0.4, 0.0)
    assert sample.point == pytest.approx(S.fc.point(0.4))


def test_example4_cone_apex_and_striction():
    S = surf("example4", "S_nu2")
    ts = np.linspace(0.2, 2.9, 9)
    # unit ruling; the printed ruling has length sqrt2/2 times this one
    s, sigma = dv.striction(S, ts)
    assert s == pytest.approx(np.full(9, -1.0), abs=1e-12)
    assert sigma == pytest.approx(np.zeros((3, 9)), abs=1e-12)
    assert S.point(ts, -1.0) == pytest.approx(np.zeros((3, 9)), abs=1e-12)


def test_example5_image_is_printed_surface():
    # S_nu2 covers (u^2, u^3 + v, v); its unit ruling is (0, 1, 1)/sqrt2
    S = surf("example5", "S_nu2")
    ts = np.array([-0.6, 0.0, 0.5])
    pts = S.point(ts, 0.7)
    v = pts[2]
    assert v == pytest.approx(np.full(3, 0.7 / R2))
    assert pts[0] == pytest.approx(ts**2)
    assert pts[1] == pytest.approx(ts**3 + v)


def test_striction_at_singular_curve_point_is_zero():
    S = surf("example6", "S_nu2")
    s, sigma = dv.striction(S, 0.0)
    assert float(s) == pytest.approx(0.0, abs=1e-14)
    assert sigma == pytest.approx([0, 0, 0], abs=1e-14)


def test_striction_on_cylinder_raises():
    with pytest.raises(CylindricalAt):
        dv.striction(surf("example1", "S_nu2"), 1.0)


def test_envelope_on_surface(rng):
    S = surf("example6", "S_nu2")
    for t, a in zip(rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 5)):
        X = dv.evaluate(S, t, a).point
        h, dh = dv.envelope_residual(S, t, X)
        assert abs(h) <= 1e-9 and abs(dh) <= 1e-9


def test_envelope_unit_offset():
    S = surf("example4", "S_nu2")
    X = S.fc.point(1.0) + S.normal(1.0)
    assert dv.envelope_residual(S, 1.0, X)[0] == pytest.approx(1.0)
    assert dv.envelope_residual(S, 1.0, S.fc.point(1.0)) == pytest.approx((0, 0), abs=1e-15)


def test_gaussian_curvature_of_cylinder_and_cone():
    assert abs(dv.gaussian_curvature(surf("example3", "S_nu1"), 1.0, 0.5)) <= 1e-8
    assert abs(dv.gaussian_curvature(surf("example4", "S_nu2"), 1.0, 0.3)) <= 1e-8


def test_gaussian_curvature_at_singular_point_raises():
    S = surf("example6", "S_nu2")
    s = float(dv.striction(S, 0.5)[0])
    with pytest.raises(SingularPoint):
        dv.gaussian_curvature(S, 0.5, s)


def test_lambda_vanishes_exactly_on_striction_curve():
    S = surf("example6", "S_nu2")
    ts = np.linspace(-0.9, 0.9, 7)
    s = dv.striction(S, ts)[0]
    assert np.abs(S.lam(ts, s)).max() <= 1e-9
    left, right = S.lam(ts, s - 0.1), S.lam(ts, s + 0.1)
    assert np.all(left * right < 0)


def test_beta_rho_shorten_two_orders():
    S = surf("example6", "S_nu2")
    inv = frames.invariants(S.fc, 0.3, 4)
    beta, rho = dv.beta_rho(inv, dv.NU_TYPE)
    assert beta.order == 3 and rho.order == 2


@pytest.mark.parametrize("name", ["example1", "example2", "example3", "example4", "example5", "example6"])
def test_beta_rho_match_frozen_oracle(name, sympy_fixture):
    s = gallery_scene(name, "extracted")
    ref = sympy_fixture[name]
    ts = np.array(ref["t"])
    for i, fc in enumerate(s.frames):
        inv = frames.invariants(fc, ts, 5)
        for kind, tag in ((dv.NU_TYPE, "nu"), (dv.B_TYPE, "b")):
            beta, rho = dv.beta_rho(inv, kind)
            for q, jet in (("beta", beta), ("rho", rho)):
                want = np.array(ref[f"{q}_{tag}_{i + 1}"])
                got = jet.truncate(3).derivatives()
                assert got == pytest.approx(want, rel=1e-8, abs=1e-8), f"{q}_{tag}_{i + 1}"


@pytest.mark.parametrize("name,key", [("example2", "S_nu2"), ("example4", "S_nu2"), ("example5", "S_b2"),
                                      ("example6", "S_nu2"), ("example6", "S_b1")])
def test_ruling_and_frontal_identities(name, key):
    S = surf(name, key)
    ts = S.sample_params()
    assert dv.ruling_derivative_residual(S, ts).max() <= 1e-9
    for a in (-1.0, 0.5):
        assert dv.frontal_residual(S, ts, a).max() <= 1e-9


def test_striction_curve_is_parallel_to_ruling():
    S = surf("example6", "S_nu2")
    ts = np.linspace(-0.9, 0.9, 11)
    assert dv.striction_parallel_residual(S, ts).max() <= 1e-8
