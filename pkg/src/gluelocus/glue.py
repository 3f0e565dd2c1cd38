"""Two surfaces glued along a shared curve, and the labels of the glue.

Both frames share ``gamma`` and ``e``; the second normal is the first one
rotated about ``e`` by the signed angle ``theta``::

    nu2 = cos(theta) nu1 + sin(theta) b1
    b2  = cos(theta) b1  - sin(theta) nu1

which gives ``k21 = k11 c + k12 s``, ``k22 = -k11 s + k12 c`` and
``k23 = k13 + theta'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import classify as cf
from . import developables as dv
from . import frames, jets
from .errors import AssumptionViolated, GluingMismatch, NotApplicable

SURFACE_NAMES = ("S_nu1", "S_b1", "S_nu2", "S_b2")
GAMMA_TOL = 1e-10
TANGENT_TOL = 1e-9
THETA_GRID = 2001


@dataclass
class AbsentSurface:
    """Placeholder for a developable whose hypothesis fails."""

    name: str
    reason: str
    t: float | None = None


@dataclass
class GlueLabel:
    surfaces: dict = field(default_factory=dict)
    points: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    def names(self):
        """Human-readable glue labels, e.g. ``S_nu2-conical``."""
        out = []
        for name, info in self.surfaces.items():
            if info.get("cylindrical"):
                out.append(f"{name}-cylindrical")
            if info.get("conical"):
                out.append(f"{name}-conical")
        for t0, name, label in self.points:
            kind = {"cuspidal_edge": "cuspidal edgy", "swallowtail": "swallowtailed"}.get(label)
            if kind:
                out.append(f"{name}-{kind}")
        return sorted(set(out))


class GlueScene:
    """Two framed curves along one gluing locus."""

    def __init__(self, fc1, fc2, samples=dv.DEFAULT_SAMPLES, tol=dv.ZERO_TOL):
        self.fc1 = fc1
        self.fc2 = fc2
        self.samples = int(samples)
        self.tol = float(tol)
        self.interval = fc1.interval
        grid = np.linspace(self.interval[0], self.interval[1], THETA_GRID)
        s, c = self._sin_cos(grid)
        self._grid = grid
        self._lifted = np.unwrap(np.arctan2(s.value, c.value))
        self.surfaces = {}
        for name, fc, kind in (
            ("S_nu1", fc1, dv.NU_TYPE), ("S_b1", fc1, dv.B_TYPE),
            ("S_nu2", fc2, dv.NU_TYPE), ("S_b2", fc2, dv.B_TYPE),
        ):
            try:
                self.surfaces[name] = dv.build(fc, kind, self.samples, self.tol)
            except AssumptionViolated as exc:
                self.surfaces[name] = AbsentSurface(name, str(exc), exc.t)

    def sample_params(self, n=None):
        return np.linspace(self.interval[0], self.interval[1], n or self.samples)

    def _sin_cos(self, t, order=0):
        f1 = self.fc1.frame(t, order)
        f2 = self.fc2.frame(t, order)
        return jets.dot(f2.nu, f1.b), jets.dot(f2.nu, f1.nu)

    def theta(self, t, order=2):
        """Jet of the continuous signed angle from ``nu1`` to ``nu2`` about ``e``."""
        s, c = self._sin_cos(t, order)
        th = jets.atan2_pair(s, c)
        ref = np.interp(t, self._grid, self._lifted)
        k = np.round((ref - th.value) / (2.0 * math.pi))
        coeffs = th.coeffs.copy()
        coeffs[0] = coeffs[0] + 2.0 * math.pi * k
        return jets.Jet(coeffs, th.base_point)

    def singular_params(self):
        seen = {}
        for p in (*self.fc1.singular_params, *self.fc2.singular_params):
            seen.setdefault(p.t0, p)
        return [seen[k] for k in sorted(seen)]

    def present(self):
        return {k: v for k, v in self.surfaces.items() if not isinstance(v, AbsentSurface)}


def make_glue(fc1, fc2, samples=dv.DEFAULT_SAMPLES, tol=dv.ZERO_TOL,
              gamma_tol=GAMMA_TOL, tangent_tol=TANGENT_TOL):
    """Check that ``fc1`` and ``fc2`` share ``gamma`` and ``e``, then build the scene."""
    ts = fc1.samples(samples)
    g1, g2 = fc1.point(ts), fc2.point(ts)
    dev = np.abs(g1 - g2).max(axis=0)
    i = int(np.argmax(dev))
    if dev[i] > gamma_tol * max(1.0, float(np.abs(g1).max())):
        raise GluingMismatch(float(dev[i]), float(ts[i]))
    e1, e2 = fc1.frame(ts, 0).e.value, fc2.frame(ts, 0).e.value
    dev = np.abs(e1 - e2).max(axis=0)
    i = int(np.argmax(dev))
    if dev[i] > tangent_tol:
        raise GluingMismatch(float(dev[i]), float(ts[i]))
    return GlueScene(fc1, fc2, samples, tol)


def rotation_identities(g, t):
    """Residuals of the kappa rotation identities and of the Rodrigues formulas."""
    th = g.theta(t, 1)
    c, s = np.cos(th.value), np.sin(th.value)
    dth = th.derivative().value
    inv1 = frames.invariants(g.fc1, t, 0)
    inv2 = frames.invariants(g.fc2, t, 0)
    k11, k12, k13 = inv1.kappa1.value, inv1.kappa2.value, inv1.kappa3.value
    f1, f2 = g.fc1.frame(t, 0), g.fc2.frame(t, 0)
    nu1, b1 = f1.nu.value, f1.b.value
    return {
        "kappa21": np.abs(inv2.kappa1.value - (k11 * c + k12 * s)),
        "kappa22": np.abs(inv2.kappa2.value - (-k11 * s + k12 * c)),
        "kappa23": np.abs(inv2.kappa3.value - (k13 + dth)),
        "rodrigues_nu": np.abs(f2.nu.value - (c * nu1 + s * b1)).max(axis=0),
        "rodrigues_b": np.abs(f2.b.value - (c * b1 - s * nu1)).max(axis=0),
    }


def expanded_beta_rho_nu2(g, t):
    """``beta`` and ``rho`` of S_nu2 written through frame 1 and ``theta``.

    Uses only (k11, k12, k13), their derivatives, ``theta`` and ``l``.
    """
    inv = frames.invariants(g.fc1, t, 2)
    th = g.theta(t, 3)
    c, s = jets.cos(th), jets.sin(th)
    dth = th.derivative()
    k11, k12, k13 = inv.kappa1, inv.kappa2, inv.kappa3
    d11, d12, d13 = k11.derivative(), k12.derivative(), k13.derivative()
    k21 = k11 * c + k12 * s
    k22 = k12 * c - k11 * s
    k23 = k13 + dth
    beta = (k22 * k21 * k21
            + k23 * (k22 * (k13 + 2.0 * dth) + c * d11 + s * d12)
            - k21 * (d13 + dth.derivative()))
    l = inv.l
    rho = (l * (beta * k22 * k23 + 2.0 * beta * (dth * k22 + c * d11 + s * d12)
                - beta.derivative() * k21)
           + l.derivative() * beta * k21)
    return beta.value, rho.value


def expanded_residual(g, t):
    """|expanded - direct| for beta and rho of S_nu2."""
    eb, er = expanded_beta_rho_nu2(g, t)
    db, dr = dv.beta_rho(frames.invariants(g.fc2, t, 2), dv.NU_TYPE)
    return np.abs(eb - db.value), np.abs(er - dr.value)


def b_ruling_residual(g, t):
    """|delta_b1 - (nu-type ruling of frame 1 turned by pi/2 about e)|."""
    S = g.surfaces["S_b1"]
    if isinstance(S, AbsentSurface):
        raise NotApplicable(f"S_b1 is absent: {S.reason}")
    turned = dv.DevelopableSurface(frames.RotatedFrame(g.fc1, math.pi / 2), dv.NU_TYPE)
    return np.abs(S.delta(t) - turned.delta(t)).max(axis=0)


def _class_name(S):
    if isinstance(S, AbsentSurface):
        return "absent"
    return cf.classify_surface(S).shape


def classify_glue(g, extra_points=True):
    """Surface-level and point-level labels of the glue.

    Point labels are taken at every declared singular parameter (where the
    l = 0 conditions apply) and, for non-cone surfaces, at roots of ``rho``.
    """
    label = GlueLabel()
    for name, S in g.surfaces.items():
        if isinstance(S, AbsentSurface):
            label.surfaces[name] = {"class": "absent", "cylindrical": False, "conical": False,
                                    "reason": S.reason}
            continue
        sc = cf.classify_surface(S)
        label.surfaces[name] = {
            "class": sc.shape,
            "cylindrical": sc.shape == cf.CYLINDER,
            "conical": sc.shape == cf.CONE,
            "beta_max": sc.beta_max,
            "rho_max": sc.rho_max,
        }
        if sc.shape == cf.CONE:
            s, apex = dv.striction(S, float(g.interval[0]))
            label.surfaces[name]["apex"] = apex.tolist()
            continue
        for p in g.singular_params():
            lab = cf.classify_singularity_l0(S, p.t0, g.tol)
            label.points.append((p.t0, name, lab.label))
        if extra_points and sc.shape == cf.GENERIC:
            declared = {p.t0 for p in g.singular_params()}
            for r in cf.find_rho_roots(S):
                if any(abs(r - d) < 1e-6 for d in declared):
                    continue
                try:
                    lab = cf.classify_singularity(S, r, g.tol)
                except AssumptionViolated:
                    continue
                if lab.label == cf.SWALLOWTAIL:
                    label.points.append((r, name, lab.label))
    ts = g.sample_params()
    eb, er = expanded_residual(g, ts)
    label.checks["expanded_beta"] = float(eb.max())
    label.checks["expanded_rho"] = float(er.max())
    return label


def special_angle_equivalences(g, tol=1e-9):
    """Check the constant special-angle equivalences of S_nu2.

    For ``theta = k pi/2`` with ``k`` odd the classes of S_nu2 and S_b1 must
    agree; for ``theta = k pi`` those of S_nu2 and S_nu1.
    """
    ts = g.sample_params()
    th = g.theta(ts, 0).value
    spread = float(np.max(th) - np.min(th))
    if spread > tol:
        raise NotApplicable(f"theta is not constant (spread {spread:.3e})")
    theta0 = float(np.mean(th))
    k = round(theta0 / (math.pi / 2))
    if abs(theta0 - k * math.pi / 2) > tol:
        raise NotApplicable(f"theta = {theta0:.12g} is not a multiple of pi/2")
    other = "S_b1" if k % 2 else "S_nu1"
    left = _class_name(g.surfaces["S_nu2"])
    right = _class_name(g.surfaces[other])
    return {
        "theta": theta0,
        "k": int(k),
        "compared": ["S_nu2", other],
        "classes": [left, right],
        "agree": left == right,
    }


__all__ = [
    "SURFACE_NAMES", "AbsentSurface", "GlueLabel", "GlueScene", "make_glue",
    "rotation_identities", "expanded_beta_rho_nu2", "expanded_residual", "b_ruling_residual",
    "classify_glue", "special_angle_equivalences",
]
