"""Moving frames {e, nu, b} along a curve and their connection invariants.

A :class:`FramedCurve` produces, for any batch of parameters, jets of the
curve ``gamma``, the unit tangent ``e``, the unit vector ``nu`` normal to
``e``, ``b = e x nu`` and the signed length function ``l`` with
``gamma' = l e``.  The invariants are

    kappa1 = e'.nu,   kappa2 = e'.b,   kappa3 = nu'.b

so that ``e' = k1 nu + k2 b``, ``nu' = -k1 e + k3 b``, ``b' = -k2 e - k3 nu``.

Where ``gamma'`` (or a surface normal) vanishes to order ``m`` at a declared
parameter ``t0``, the unit field is taken from ``F(t) / (t - t0)**m``.  Near
``t0`` that quotient is evaluated with the integral form of the Taylor
remainder rather than by dividing jets, which would lose roughly one digit
per order close to the zero.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from functools import cached_property
import numpy as np

from . import curvelang, jets
from .errors import (
    DegenerateNormal,
    FrameInvalid,
    NotDeflatable,
    SingularCurvePoint,
)
from .jets import Jet, VecJet

DEFLATION_RADIUS = 0.5
VALIDATION_TOL = 1e-8
VALIDATION_SAMPLES = 64
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True)
class SingularParam:
    t0: float
    multiplicity: int


@dataclass
class FrameJets:
    gamma: VecJet
    dgamma: VecJet
    e: VecJet
    nu: VecJet
    b: VecJet
    l: Jet


@dataclass
class FrameInvariants:
    kappa1: Jet
    kappa2: Jet
    kappa3: Jet
    l: Jet

    def values(self):
        return np.stack([self.kappa1.value, self.kappa2.value, self.kappa3.value])


def _squeeze(j, scalar):
    if not scalar:
        return j
    if isinstance(j, VecJet):
        return VecJet(j.coeffs[..., 0], float(j.base_point[0]))
    return Jet(j.coeffs[..., 0], float(j.base_point[0]))


def _odd_sign(x, m):
    return np.sign(x) if m % 2 else np.ones_like(x)


def _taylor_quotient(field, t, t0, m, order):
    """Jet of ``field(t) / (t - t0)**m`` for ``t`` near (but not at) ``t0``.

    Uses ``F(t)/(t-t0)^m = 1/(m-1)! * int_0^1 (1-s)^(m-1) F^(m)(t0 + s(t-t0)) ds``
    differentiated under the integral sign, with Gauss-Legendre quadrature.
    """
    n = _GL_NODES.size
    pts = t0 + _GL_NODES[:, None] * (t - t0)[None, :]
    raw = field(pts.reshape(-1), order + m).coeffs
    raw = raw.reshape(raw.shape[0], 3, n, t.size)
    out = np.zeros((order + 1, 3, t.size))
    base_w = _GL_WEIGHTS * (1.0 - _GL_NODES) ** (m - 1) / math.factorial(m - 1)
    for k in range(order + 1):
        scale = math.factorial(m + k) / math.factorial(k)
        weights = base_w * _GL_NODES**k * scale
        out[k] = np.einsum("i,cin->cn", weights, raw[m + k])
    return VecJet(out, t)


def _zero_order(field, t0, max_order=curvelang.K_MAX - 2):
    v = field(np.array([t0]), max_order)
    return jets.lowest_nonzero_order(v)


FRAME_CACHE_SIZE = 64


def _memo_frame(fn):
    """Cache frame jets per ``(order, t)``; scenes query the same grid many times."""

    @functools.wraps(fn)
    def wrapper(self, t, order=jets.DEFAULT_ORDER):
        arr = np.asarray(t, dtype=float)
        key = (int(order), arr.shape, arr.tobytes())
        cache = self.__dict__.setdefault("_frame_cache", {})
        fj = cache.get(key)
        if fj is None:
            fj = fn(self, t, order)
            for k in ("gamma", "dgamma", "e", "nu", "b", "l"):
                getattr(fj, k).coeffs.flags.writeable = False
            if len(cache) >= FRAME_CACHE_SIZE:
                cache.pop(next(iter(cache)))
            cache[key] = fj
        return fj

    return wrapper


class FramedCurve:
    """Base class; subclasses provide :meth:`frame`."""

    interval: tuple
    singular_params: tuple
    gamma: curvelang.ParametricMap

    def frame(self, t, order=jets.DEFAULT_ORDER) -> FrameJets:
        raise NotImplementedError

    def samples(self, n=201):
        return np.linspace(self.interval[0], self.interval[1], n)

    def point(self, t):
        return curvelang.evaluate(self.gamma, t)

    def _gamma_jets(self, t, order):
        g = curvelang.eval_jet(self.gamma, t, 0.0, order + 1)
        return g, g.derivative()


class SurfaceFrame(FramedCurve):
    """Frame along ``v = 0`` of a surface, with ``nu`` its unit normal."""

    def __init__(self, surface, orientation=1, singular_params=(), interval=(0.0, 1.0),
                 deflation_radius=DEFLATION_RADIUS):
        if surface.arity != "surface":
            raise ValueError("frame_from_surface needs a surface map (u and v)")
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.surface = surface
        self.orientation = orientation
        self.interval = (float(interval[0]), float(interval[1]))
        self.singular_params = tuple(
            p if isinstance(p, SingularParam) else SingularParam(float(p[0]), int(p[1]))
            for p in singular_params
        )
        self.gamma = curvelang.restrict(surface, 0.0)
        self._fv = curvelang.restrict(curvelang.partial(surface, "v"), 0.0)
        ts = sorted(p.t0 for p in self.singular_params)
        gaps = [b - a for a, b in zip(ts, ts[1:])]
        self.radius = min([deflation_radius] + [0.45 * g for g in gaps])

    def _tangent_field(self, x, order):
        return curvelang.eval_jet(self.gamma, x, 0.0, order + 1).derivative()

    def _normal_field(self, x, order):
        dg = self._tangent_field(x, order)
        fv = curvelang.eval_jet(self._fv, x, 0.0, order)
        return jets.cross(dg, fv)

    @cached_property
    def normal_multiplicities(self):
        """Vanishing order of ``f_u x f_v`` at each declared parameter."""
        out = []
        for p in self.singular_params:
            k = _zero_order(self._normal_field, p.t0)
            if k is None:
                raise DegenerateNormal(f"surface normal vanishes identically at t={p.t0}")
            out.append(k)
        return tuple(out)

    def _unit(self, field, zeros, t, order, what):
        """Continuous unit field ``field/|field|`` with declared zeros removed."""
        t = np.asarray(t, dtype=float)
        out = np.empty((order + 1, 3, t.size))
        owner = np.full(t.size, -1)
        for i, (t0, _) in enumerate(zeros):
            near = np.abs(t - t0) <= self.radius
            owner[near & (owner < 0)] = i
        for i in range(-1, len(zeros)):
            idx = np.nonzero(owner == i)[0]
            if idx.size == 0:
                continue
            tt = t[idx]
            sign = np.ones(tt.size)
            for j, (tj, mj) in enumerate(zeros):
                if j != i:
                    sign *= _odd_sign(tt - tj, mj)
            if i < 0:
                raw = field(tt, order)
                mag = np.linalg.norm(raw.value, axis=0)
                scale = max(1.0, float(np.abs(raw.coeffs).max()))
                if np.any(mag <= jets.ZERO_TOL * scale):
                    bad = float(tt[np.argmin(mag)])
                    if what == "normal":
                        raise DegenerateNormal(f"f_u x f_v vanishes at undeclared t={bad}")
                    raise SingularCurvePoint(f"gamma' vanishes at undeclared t={bad}")
                unit = jets.normalize(raw).coeffs
            else:
                t0, m = zeros[i]
                unit = np.empty((order + 1, 3, tt.size))
                exact = tt == t0
                if np.any(exact):
                    d = jets.deflate(field(np.array([t0]), order + m), m)
                    if np.linalg.norm(d.value) <= jets.ZERO_TOL * max(1.0, float(np.abs(d.coeffs).max())):
                        raise NotDeflatable(
                            f"{what} still vanishes after deflating by {m} at t={t0}; "
                            "declared multiplicity is too small"
                        )
                    unit[:, :, exact] = jets.normalize(d).coeffs
                rest = ~exact
                if np.any(rest):
                    q = _taylor_quotient(field, tt[rest], t0, m, order) if m else field(tt[rest], order)
                    unit[:, :, rest] = jets.normalize(q).coeffs
            out[:, :, idx] = unit * sign
        return VecJet(out, t)

    @_memo_frame
    def frame(self, t, order=jets.DEFAULT_ORDER):
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        gamma, dgamma = self._gamma_jets(t, order)
        tangent_zeros = [(p.t0, p.multiplicity) for p in self.singular_params]
        normal_zeros = [(p.t0, m) for p, m in zip(self.singular_params, self.normal_multiplicities)]
        e = self._unit(self._tangent_field, tangent_zeros, t, order, "tangent")
        nu = self._unit(self._normal_field, normal_zeros, t, order, "normal") * float(self.orientation)
        b = jets.cross(e, nu)
        l = jets.dot(dgamma, e)
        fj = FrameJets(gamma, dgamma, e, nu, b, l)
        if scalar:
            fj = FrameJets(*(_squeeze(getattr(fj, k), True) for k in ("gamma", "dgamma", "e", "nu", "b", "l")))
        return fj


class ExplicitFrame(FramedCurve):
    """Frame given by expressions for ``gamma``, ``e``, ``nu`` and ``l``."""

    def __init__(self, gamma, e, nu, l, interval=(0.0, 1.0), singular_params=()):
        for name, m in (("gamma", gamma), ("e", e), ("nu", nu)):
            if m.arity != "curve":
                raise ValueError(f"{name} must be a curve map (u only)")
        if curvelang.uses_variable(l, "v"):
            raise ValueError("l must depend on u only")
        self.gamma, self.e, self.nu, self.l = gamma, e, nu, l
        self.interval = (float(interval[0]), float(interval[1]))
        self.singular_params = tuple(
            p if isinstance(p, SingularParam) else SingularParam(float(p[0]), int(p[1]))
            for p in singular_params
        )

    @_memo_frame
    def frame(self, t, order=jets.DEFAULT_ORDER):
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        gamma, dgamma = self._gamma_jets(t, order)
        e = curvelang.eval_jet(self.e, t, 0.0, order)
        nu = curvelang.eval_jet(self.nu, t, 0.0, order)
        l = curvelang.eval_expr_jet(self.l, t, 0.0, order)
        fj = FrameJets(gamma, dgamma, e, nu, jets.cross(e, nu), l)
        if scalar:
            fj = FrameJets(*(_squeeze(getattr(fj, k), True) for k in ("gamma", "dgamma", "e", "nu", "b", "l")))
        return fj


class RotatedFrame(FramedCurve):
    """``base`` with ``nu`` rotated about ``e`` by a constant angle."""

    def __init__(self, base, angle):
        self.base = base
        self.angle = float(angle)
        self.gamma = base.gamma
        self.interval = base.interval
        self.singular_params = base.singular_params

    def frame(self, t, order=jets.DEFAULT_ORDER):
        fj = self.base.frame(t, order)
        c, s = math.cos(self.angle), math.sin(self.angle)
        nu = fj.nu * c + fj.b * s
        b = fj.b * c - fj.nu * s
        return FrameJets(fj.gamma, fj.dgamma, fj.e, nu, b, fj.l)


def frame_from_surface(f, orientation=1, singular_params=(), interval=(0.0, 1.0), **kw):
    """Frame along the ``v = 0`` locus of the surface map ``f``.

    ``nu = orientation * (f_u x f_v)/|f_u x f_v|``; ``e`` is the unit direction
    of ``gamma'``.  At each declared ``(t0, m)`` the tangent is deflated by
    ``m`` and the normal by its own detected vanishing order.
    """
    return SurfaceFrame(f, orientation, singular_params, interval, **kw)


def check_frame(fc, ts, tol=VALIDATION_TOL):
    """Raise :class:`FrameInvalid` at the first sample violating a frame invariant."""
    fj = fc.frame(np.asarray(ts, dtype=float), 0)
    e, nu = fj.e.value, fj.nu.value
    checks = (
        ("|e| = 1", np.abs(np.linalg.norm(e, axis=0) - 1.0)),
        ("|nu| = 1", np.abs(np.linalg.norm(nu, axis=0) - 1.0)),
        ("e.nu = 0", np.abs(np.sum(e * nu, axis=0))),
        ("gamma' = l e", np.abs(fj.dgamma.value - fj.l.value * e).max(axis=0)),
    )
    worst = None
    for name, err in checks:
        bad = np.nonzero(err > tol)[0]
        if bad.size and (worst is None or bad[0] < worst[0]):
            worst = (bad[0], name, err[bad[0]])
    if worst is not None:
        i, name, err = worst
        t = float(np.asarray(ts)[i])
        raise FrameInvalid(f"frame violates {name} at t={t:.6g} (error {err:.3e})", t=t, invariant=name)


def frame_explicit(gamma, e, nu, l, interval=(0.0, 1.0), singular_params=(),
                   samples=VALIDATION_SAMPLES, tol=VALIDATION_TOL):
    """Wrap expression-given frame fields after validating them at ``samples`` points."""
    if isinstance(l, str):
        l = curvelang.parse_expr(l)
    maps = [curvelang.parse(m, "curve") if not isinstance(m, curvelang.ParametricMap) else m
            for m in (gamma, e, nu)]
    fc = ExplicitFrame(*maps, l, interval, singular_params)
    check_frame(fc, np.linspace(fc.interval[0], fc.interval[1], samples), tol)
    return fc


def invariants_from_frame(fj):
    """Invariants one order below the order of the frame jets ``fj``."""
    de = fj.e.derivative()
    dnu = fj.nu.derivative()
    return FrameInvariants(
        jets.dot(de, fj.nu),
        jets.dot(de, fj.b),
        jets.dot(dnu, fj.b),
        fj.l.truncate(de.order),
    )


def invariants(fc, t, order=jets.DEFAULT_ORDER):
    """Jets of (kappa1, kappa2, kappa3) and l at ``t``."""
    return invariants_from_frame(fc.frame(t, order + 1))


def geodesic_invariants(fc, t, tol=1e-12):
    """Normal curvature, geodesic curvature and geodesic torsion of the curve.

    Computed from ``gamma'``, ``gamma''``, ``nu`` and ``nu'`` directly.
    """
    fj = fc.frame(t, 1)
    g1 = fj.dgamma.value
    g2 = fj.dgamma.derivative().value
    nu = fj.nu.value
    dnu = fj.nu.derivative().value
    speed = np.linalg.norm(g1, axis=0)
    if np.any(speed <= tol):
        raise SingularCurvePoint(f"l(t) = 0 at t={t!r}; curvatures are undefined")
    kn = np.sum(g2 * nu, axis=0) / speed**2
    kg = np.sum(g1 * np.cross(g2, nu, axis=0), axis=0) / speed**3
    tg = np.sum(g1 * np.cross(nu, dnu, axis=0), axis=0) / speed**2
    return kn, kg, tg


# -- residuals used by reports and tests ------------------------------------

def orthonormality_residual(fc, ts):
    fj = fc.frame(ts, 0)
    e, nu, b = fj.e.value, fj.nu.value, fj.b.value
    gram = [
        np.abs(np.sum(e * e, axis=0) - 1), np.abs(np.sum(nu * nu, axis=0) - 1),
        np.abs(np.sum(b * b, axis=0) - 1), np.abs(np.sum(e * nu, axis=0)),
        np.abs(np.sum(e * b, axis=0)), np.abs(np.sum(nu * b, axis=0)),
    ]
    return np.max(gram, axis=0)


def tangent_residual(fc, ts):
    fj = fc.frame(ts, 0)
    return np.abs(fj.dgamma.value - fj.l.value * fj.e.value).max(axis=0)


def frenet_residual(fc, ts):
    """Largest deviation of (e, nu, b)' from the connection-matrix prediction."""
    fj = fc.frame(ts, 1)
    inv = invariants(fc, ts, 0)
    k1, k2, k3 = inv.kappa1.value, inv.kappa2.value, inv.kappa3.value
    e, nu, b = fj.e.value, fj.nu.value, fj.b.value
    de, dnu, db = (v.derivative().value for v in (fj.e, fj.nu, fj.b))
    res = [
        de - (k1 * nu + k2 * b),
        dnu - (-k1 * e + k3 * b),
        db - (-k2 * e - k3 * nu),
    ]
    return np.max([np.abs(r).max(axis=0) for r in res], axis=0)


def kttheta_residual(fc, ts):
    """Residual of kappa1 = l k_n, kappa2 = -|l| k_g, kappa3 = l tau_g."""
    inv = invariants(fc, ts, 0)
    l = inv.l.value
    kn, kg, tg = geodesic_invariants(fc, ts)
    return np.max([
        np.abs(inv.kappa1.value - l * kn),
        np.abs(inv.kappa2.value + np.abs(l) * kg),
        np.abs(inv.kappa3.value - l * tg),
    ], axis=0)


def regular_samples(fc, ts, tol=1e-6):
    """The subset of ``ts`` where ``|l|`` exceeds ``tol``."""
    ts = np.asarray(ts, dtype=float)
    l = fc.frame(ts, 0).l.value
    return ts[np.abs(l) > tol]


def normals_agree(fc_a, fc_b, ts, tol=1e-8):
    """Compare two frames' ``nu``: 'same', 'opposite' or 'different'."""
    na = fc_a.frame(ts, 0).nu.value
    nb = fc_b.frame(ts, 0).nu.value
    if np.abs(na - nb).max() <= tol:
        return "same"
    if np.abs(na + nb).max() <= tol:
        return "opposite"
    return "different"


__all__ = [
    "SingularParam", "FrameJets", "FrameInvariants", "FramedCurve", "SurfaceFrame",
    "ExplicitFrame", "RotatedFrame", "frame_from_surface", "frame_explicit", "check_frame",
    "invariants", "invariants_from_frame", "geodesic_invariants", "orthonormality_residual", "tangent_residual",
    "frenet_residual", "kttheta_residual", "regular_samples", "normals_agree",
]
