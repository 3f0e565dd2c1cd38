"""Developable surfaces S_nu and S_b ruled along a framed curve.

For a frame {e, nu, b} with invariants (k1, k2, k3) and ``gamma' = l e``:

* ``S_nu(t, a) = gamma + a * (k3 e + k1 b) / sqrt(k3^2 + k1^2)``, normal ``nu``
* ``S_b(t, a)  = gamma + a * (k3 e - k2 nu) / sqrt(k3^2 + k2^2)``, normal ``b``

Both are envelopes of the planes orthogonal to their normal, hence flat.
``beta`` measures how fast the ruling turns (``delta' = beta * w``) and
``rho`` vanishes identically exactly when the striction curve is a point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import frames, jets
from .errors import AssumptionViolated, CylindricalAt, SingularPoint
from .jets import Jet, VecJet

NU_TYPE = "nu_type"
B_TYPE = "b_type"
KINDS = (NU_TYPE, B_TYPE)
DEFAULT_SAMPLES = 201
ZERO_TOL = 1e-9


@dataclass
class SurfaceSample:
    t: float
    a: float
    point: np.ndarray
    normal: np.ndarray
    lam: float


@dataclass
class RulingJets:
    """Everything needed about a developable at ``t``, as jets of one order."""

    l: Jet
    kappa: tuple
    norm: Jet          # sqrt of the kappa pair's squared length
    beta: Jet
    rho: Jet
    gamma: VecJet
    delta: VecJet
    w: VecJet
    normal: VecJet
    lam_a0: Jet        # lambda = lam_a0 + a * lam_slope
    lam_slope: Jet
    eta_shift: Jet     # null field eta = d/dt + eta_shift * d/da

    @property
    def striction(self):
        return -self.lam_a0 / self.lam_slope


def pair_name(kind):
    return "(kappa1, kappa3)" if kind == NU_TYPE else "(kappa2, kappa3)"


def beta_rho(inv, kind):
    """``beta`` and ``rho`` from invariant jets; output is two orders shorter.

    Does not need the kappa pair to be nonzero.
    """
    k1, k2, k3, l = inv.kappa1, inv.kappa2, inv.kappa3, inv.l
    dk1, dk2, dk3 = k1.derivative(), k2.derivative(), k3.derivative()
    if kind == NU_TYPE:
        beta = k1 * k1 * k2 + k2 * k3 * k3 + dk1 * k3 - k1 * dk3
        db = beta.derivative()
        rho = l * (beta * (k2 * k3 + 2.0 * dk1) - db * k1) + l.derivative() * k1 * beta
    elif kind == B_TYPE:
        beta = k1 * k2 * k2 + k1 * k3 * k3 + k2 * dk3 - dk2 * k3
        db = beta.derivative()
        rho = l * (beta * (k1 * k3 - 2.0 * dk2) + db * k2) - l.derivative() * k2 * beta
    else:
        raise ValueError(f"unknown developable kind {kind!r}")
    return beta, rho


def _scale(*arrays):
    return 1.0 + max(float(np.max(np.abs(a))) for a in arrays)


class DevelopableSurface:
    """S_nu or S_b along ``fc``.  Use :func:`build` to get hypothesis checks."""

    def __init__(self, fc, kind, samples=DEFAULT_SAMPLES, tol=ZERO_TOL):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        self.fc = fc
        self.kind = kind
        self.samples = int(samples)
        self.tol = float(tol)

    def __repr__(self):
        return f"DevelopableSurface(kind={self.kind!r}, interval={self.fc.interval})"

    @property
    def interval(self):
        return self.fc.interval

    def sample_params(self, n=None):
        return self.fc.samples(n or self.samples)

    def pair(self, t):
        inv = frames.invariants(self.fc, t, 0)
        other = inv.kappa1 if self.kind == NU_TYPE else inv.kappa2
        return other.value, inv.kappa3.value

    def jets_at(self, t, order=1):
        """Ruling data at ``t`` as jets of ``order``."""
        fj = self.fc.frame(t, order + 3)
        inv = frames.invariants_from_frame(fj)
        beta, rho = beta_rho(inv, self.kind)
        k1, k2, k3 = (k.truncate(order) for k in (inv.kappa1, inv.kappa2, inv.kappa3))
        l = inv.l.truncate(order)
        e, nu, b = (v.truncate(order) for v in (fj.e, fj.nu, fj.b))
        if self.kind == NU_TYPE:
            p, sgn, normal, side = k1, 1.0, nu, b
            w_num = e * (-k1) + b * k3
        else:
            p, sgn, normal, side = k2, -1.0, b, nu
            w_num = e * k2 + nu * k3
        norm = jets.sqrt(k3 * k3 + p * p)
        delta = (e * k3 + side * (sgn * p)) / norm
        beta, rho = beta.truncate(order), rho.truncate(order)
        return RulingJets(
            l=l,
            kappa=(k1, k2, k3),
            norm=norm,
            beta=beta,
            rho=rho,
            gamma=fj.gamma.truncate(order),
            delta=delta,
            w=w_num / (norm * norm * norm),
            normal=normal,
            lam_a0=-(l * p) / norm,
            lam_slope=beta * sgn / (norm * norm),
            eta_shift=-(l * k3) / norm,
        )

    # -- pointwise quantities ------------------------------------------------

    def beta(self, t):
        inv = frames.invariants(self.fc, t, 2)
        return beta_rho(inv, self.kind)[0].value

    def rho(self, t):
        inv = frames.invariants(self.fc, t, 2)
        return beta_rho(inv, self.kind)[1].value

    def delta(self, t):
        return self.jets_at(t, 0).delta.value

    def point(self, t, a):
        """``gamma(t) + a delta(t)``, broadcasting ``t`` against ``a``."""
        t, a = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(a, dtype=float))
        rj = self.jets_at(t.reshape(-1), 0)
        return (rj.gamma.value + a.reshape(-1) * rj.delta.value).reshape((3,) + t.shape)

    def lam(self, t, a):
        rj = self.jets_at(t, 0)
        return rj.lam_a0.value + np.asarray(a, dtype=float) * rj.lam_slope.value

    def normal(self, t):
        return self.jets_at(t, 0).normal.value


def build(fc, kind, samples=DEFAULT_SAMPLES, tol=ZERO_TOL):
    """Build S_nu or S_b, checking that the kappa pair never vanishes.

    Raises :class:`AssumptionViolated` at the first sample where it does.
    """
    surface = DevelopableSurface(fc, kind, samples, tol)
    ts = surface.sample_params()
    p, k3 = surface.pair(ts)
    mag = np.hypot(p, k3)
    bad = np.nonzero(mag <= tol * _scale(p, k3))[0]
    if bad.size:
        t = float(ts[bad[0]])
        which = pair_name(kind)
        raise AssumptionViolated(f"{which} vanishes at t={t:.6g}", t=t, which=which)
    return surface


def evaluate(S, t, a):
    """Point, unit normal and singularity identifier of ``S`` at ``(t, a)``."""
    rj = S.jets_at(float(t), 0)
    point = rj.gamma.value + a * rj.delta.value
    lam = float(rj.lam_a0.value + a * rj.lam_slope.value)
    return SurfaceSample(float(t), float(a), point, rj.normal.value.copy(), lam)


def striction(S, t):
    """Striction parameter ``s(t)`` and the striction point ``S(t, s(t))``."""
    rj = S.jets_at(t, 0)
    beta = rj.beta.value
    if np.any(np.abs(beta) <= S.tol * _scale(*(k.value for k in rj.kappa), rj.l.value)):
        raise CylindricalAt(t)
    s = rj.striction.value
    return s, rj.gamma.value + s * rj.delta.value


def striction_jets(S, t, order=1):
    """Jets of ``s`` and of the striction curve ``sigma``."""
    rj = S.jets_at(t, order)
    s = rj.striction
    return s, rj.gamma + rj.delta * s


def envelope_residual(S, t, X):
    """Height function ``h = v.(X - gamma)`` and ``h' = v'.(X - gamma)``."""
    rj = S.jets_at(t, 1)
    diff = np.asarray(X, dtype=float) - rj.gamma.value
    v = rj.normal
    return float(np.dot(v.value, diff)), float(np.dot(v.derivative().value, diff))


def eta_lambda(S, t):
    """``eta lambda`` and ``eta eta lambda`` on the striction curve.

    With ``lambda = A + a B`` and ``eta = d/dt + c d/da`` these are
    ``A' + s B' + c B`` and ``A'' + s B'' + c' B + 2 c B'``.
    """
    rj = S.jets_at(t, 2)
    A, B, c = rj.lam_a0, rj.lam_slope, rj.eta_shift
    s = rj.striction.value
    dA, dB, dc = A.derivative(), B.derivative(), c.derivative()
    ddA, ddB = dA.derivative(), dB.derivative()
    first = dA.value + s * dB.value + c.value * B.value
    second = ddA.value + s * ddB.value + dc.value * B.value + 2.0 * c.value * dB.value
    return first, second


def gaussian_curvature(S, t, a, tol=1e-8):
    """Gaussian curvature of ``S`` at a regular point, via fundamental forms."""
    K = gaussian_curvature_values(S, np.array([float(t)]), a, tol)
    if np.isnan(K[0]):
        lam = float(S.lam(float(t), a))
        raise SingularPoint(f"(t, a) = ({t}, {a}) is singular: lambda = {lam:.3e}")
    return float(K[0])


def gaussian_curvature_values(S, ts, a, tol=1e-8):
    """Gaussian curvature along ``a = const`` at ``ts``; NaN where ``|lambda| <= tol``."""
    rj = S.jets_at(np.asarray(ts, dtype=float), 2)
    lam = rj.lam_a0.value + a * rj.lam_slope.value
    ddelta = rj.delta.derivative()
    St = rj.gamma.derivative() + ddelta * a
    St_v, Sa_v = St.value, rj.delta.value
    Stt, Sta = St.derivative().value, ddelta.value
    n = np.cross(St_v, Sa_v, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        n = n / np.linalg.norm(n, axis=0)
        E, F, G = (np.sum(x * y, axis=0) for x, y in ((St_v, St_v), (St_v, Sa_v), (Sa_v, Sa_v)))
        L, M = np.sum(Stt * n, axis=0), np.sum(Sta * n, axis=0)
        K = (L * 0.0 - M * M) / (E * G - F * F)
    return np.where(np.abs(lam) > tol, K, np.nan)


def ruling_derivative_residual(S, ts):
    """max |delta' - beta w| at each sample."""
    rj = S.jets_at(ts, 1)
    return np.abs(rj.delta.derivative().value - rj.beta.value * rj.w.value).max(axis=0)


def frontal_residual(S, ts, a):
    """max over (normal . S_t, normal . S_a, |d normal/da|) at each sample."""
    rj = S.jets_at(ts, 1)
    n = rj.normal.value
    St = rj.gamma.derivative().value + a * rj.delta.derivative().value
    return np.maximum(np.abs(np.sum(n * St, axis=0)), np.abs(np.sum(n * rj.delta.value, axis=0)))


def striction_parallel_residual(S, ts):
    """|sigma' x delta| at each sample; zero by construction of ``s``."""
    s, sigma = striction_jets(S, ts, 1)
    rj = S.jets_at(ts, 0)
    return np.linalg.norm(np.cross(sigma.derivative().value, rj.delta.value, axis=0), axis=0)


__all__ = [
    "NU_TYPE", "B_TYPE", "KINDS", "SurfaceSample", "RulingJets", "DevelopableSurface",
    "beta_rho", "build", "evaluate", "striction", "striction_jets", "envelope_residual",
    "eta_lambda", "gaussian_curvature", "gaussian_curvature_values", "ruling_derivative_residual", "frontal_residual",
    "striction_parallel_residual", "pair_name",
]
