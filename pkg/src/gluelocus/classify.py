"""Cylinder/cone decisions and cuspidal-edge/swallowtail labels.

Surface level: a developable is a cylinder iff ``beta == 0`` identically and
a cone iff ``beta != 0`` and ``rho == 0`` identically.  "Identically" is
decided on a uniform sample with a magnitude-scaled tolerance.

Point level, at the striction point ``(t, s(t))``: cuspidal edge iff
``rho != 0``; swallowtail iff ``rho == 0`` and ``rho' != 0``.  Where
``l(t) = 0`` the conditions are restated in terms of ``l', l''`` and the
kappas (see :func:`classify_singularity_l0`).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import developables as dv
from .errors import AssumptionViolated, PreconditionFailed

CYLINDER = "cylinder"
CONE = "cone"
GENERIC = "generic"

CUSPIDAL_EDGE = "cuspidal_edge"
SWALLOWTAIL = "swallowtail"
DEGENERATE = "degenerate"
UNRESOLVED = "unresolved"

ZERO_TOL = 1e-9
RULING_OFFSETS = (-1.0, -0.5, 0.0, 0.5, 1.0)


@dataclass
class SurfaceClass:
    shape: str
    beta_max: float
    rho_max: float
    tol: float

    @property
    def witness(self):
        return {"beta_max": self.beta_max, "rho_max": self.rho_max}


@dataclass
class SingularPointLabel:
    t: float
    a: float
    label: str
    diagnostics: dict = field(default_factory=dict)
    rule: str = "striction"


@dataclass
class FrontCheck:
    front: bool
    hypothesis_met: bool
    min_singular_value: float

    def __bool__(self):
        return self.front


def _is_zero(value, scale, tol):
    return abs(value) <= tol * (1.0 + scale)


def classify_surface(S, samples=None, tol=ZERO_TOL):
    """Cylinder, cone or generic, with the sampled maxima as witness."""
    ts = S.sample_params(samples)
    rj = S.jets_at(ts, 0)
    beta, rho = rj.beta.value, rj.rho.value
    scale = max(float(np.max(np.abs(k.value))) for k in (*rj.kappa, rj.l))
    beta_max = float(np.max(np.abs(beta)))
    rho_max = float(np.max(np.abs(rho)))
    if beta_max <= tol * (1.0 + scale):
        shape = CYLINDER
    elif rho_max <= tol * (1.0 + scale):
        shape = CONE
    else:
        shape = GENERIC
    return SurfaceClass(shape, beta_max, rho_max, tol)


def front_check(S, t, tol=1e-8):
    """Rank test of the stacked differential ``[(S_t, n_t), (S_a, n_a)]``.

    Evaluated at five points along the ruling through ``(t, s(t))`` (or
    ``a = 0`` when ``s`` is undefined).  ``hypothesis_met`` reports whether
    the pair is nonzero and ``beta != 0``, i.e. whether a front is guaranteed.
    """
    p, k3 = S.pair(float(t))
    if np.hypot(p, k3) <= tol:
        return FrontCheck(False, False, 0.0)
    rj = S.jets_at(float(t), 1)
    beta = float(rj.beta.value)
    hypothesis = abs(beta) > tol
    centre = float(rj.striction.value) if hypothesis else 0.0
    dgamma = rj.gamma.derivative().value
    ddelta = rj.delta.derivative().value
    dn = rj.normal.derivative().value
    smallest = np.inf
    for off in RULING_OFFSETS:
        a = centre + off
        col_t = np.concatenate([dgamma + a * ddelta, dn])
        col_a = np.concatenate([rj.delta.value, np.zeros(3)])
        sv = np.linalg.svd(np.column_stack([col_t, col_a]), compute_uv=False)
        smallest = min(smallest, float(sv[-1] / max(sv[0], 1e-300)))
    return FrontCheck(smallest > tol, hypothesis, smallest)


def _pair_and_beta(S, rj):
    k1, k2, k3 = (k.value for k in rj.kappa)
    p = k1 if S.kind == dv.NU_TYPE else k2
    return float(p), float(k3)


def classify_singularity(S, t, tol=ZERO_TOL):
    """Label the singular point ``(t, s(t))`` of ``S``.

    Requires the kappa pair and ``beta`` to be nonzero at ``t``.  Where
    ``l(t) = 0`` the l = 0 conditions are used instead (``s(t) = 0`` there).
    """
    t = float(t)
    rj = S.jets_at(t, 2)
    p, k3 = _pair_and_beta(S, rj)
    scale = max(abs(float(k.value)) for k in (*rj.kappa, rj.l))
    if np.hypot(p, k3) <= tol * (1.0 + scale):
        which = dv.pair_name(S.kind)
        raise AssumptionViolated(f"{which} vanishes at t={t:.6g}", t=t, which=which)
    l_scale = max(1.0, float(np.max(np.abs(rj.l.coeffs))))
    if abs(float(rj.l.value)) <= tol * l_scale:
        return classify_singularity_l0(S, t, tol)
    beta = float(rj.beta.value)
    if abs(beta) <= tol * (1.0 + scale):
        raise AssumptionViolated(f"beta vanishes at t={t:.6g}", t=t, which="beta")
    rho, drho = float(rj.rho.value), float(rj.rho.derivative().value)
    el, eel = dv.eta_lambda(S, t)
    s = float(rj.striction.value)
    local = scale + abs(beta)
    rank = _rank_at(rj, s)
    if rank == 0:
        label = UNRESOLVED
    elif not _is_zero(rho, local**3, tol):
        label = CUSPIDAL_EDGE
    elif not _is_zero(drho, local**3, tol):
        label = SWALLOWTAIL
    else:
        label = DEGENERATE
    diag = {"rho": rho, "rho_prime": drho, "eta_lambda": float(el), "eta_eta_lambda": float(eel),
            "beta": beta, "rank": rank}
    return SingularPointLabel(t, s, label, diag, "striction")


def _rank_at(rj, a, tol=1e-10):
    St = rj.gamma.derivative().value + a * rj.delta.derivative().value
    sv = np.linalg.svd(np.column_stack([St, rj.delta.value]), compute_uv=False)
    return int(np.sum(sv > tol * max(1.0, sv[0])))


def l0_terms(S, t):
    """``(l', l'', p, q)`` entering the l = 0 conditions.

    ``p`` is kappa1 (nu-type) or kappa2 (b-type); ``q`` is
    ``k2 k3 + 3 k1'`` (nu-type) or ``k1 k3 - 3 k2'`` (b-type).
    """
    rj = S.jets_at(float(t), 2)
    k1, k2, k3 = rj.kappa
    ld = rj.l.derivatives()
    if S.kind == dv.NU_TYPE:
        p = float(k1.value)
        q = float(k2.value * k3.value + 3.0 * k1.derivative().value)
    else:
        p = float(k2.value)
        q = float(k1.value * k3.value - 3.0 * k2.derivative().value)
    return float(ld[1]), float(ld[2]), p, q, rj


def classify_singularity_l0(S, t0, tol=ZERO_TOL):
    """Label ``(t0, 0)`` where the base curve is singular (``l(t0) = 0``).

    nu-type: cuspidal edge iff ``l' k1 != 0``; swallowtail iff
    ``l' = 0, k1 l'' != 0`` or ``k1 = 0, l'(k2 k3 + 3 k1') != 0``.
    b-type uses ``k2`` and ``k1 k3 - 3 k2'``.  With ``l' = l'' = 0`` and
    ``p != 0`` the conditions say nothing and the label is ``unresolved``.
    If ``beta(t0) = 0`` only the cuspidal-edge condition is used; the germ
    is then a cylinder over a singular curve and cannot be a swallowtail.
    """
    t0 = float(t0)
    dl, ddl, p, q, rj = l0_terms(S, t0)
    l0 = float(rj.l.value)
    l_scale = max(1.0, float(np.max(np.abs(rj.l.coeffs))))
    if abs(l0) > tol * l_scale:
        raise PreconditionFailed(f"l(t0) = {l0:.3e} is not zero at t0={t0:.6g}")
    scale = max(abs(float(k.value)) for k in rj.kappa) + abs(dl) + abs(ddl)
    zero = lambda x: _is_zero(x, scale * scale, tol)  # noqa: E731
    beta = float(rj.beta.value)
    beta_nonzero = not _is_zero(beta, scale, tol)
    if not zero(dl * p):
        label = CUSPIDAL_EDGE
    elif not beta_nonzero:
        # locally a cylinder over the singular curve: never a swallowtail
        label = DEGENERATE
    elif (zero(dl) and not zero(p * ddl)) or (zero(p) and not zero(dl * q)):
        label = SWALLOWTAIL
    elif zero(dl) and zero(ddl) and not zero(p):
        label = UNRESOLVED
    else:
        label = DEGENERATE
    diag = {
        "l_prime": dl, "l_double_prime": ddl, "kappa_term": p, "q_term": q,
        "rho": float(rj.rho.value), "rho_prime": float(rj.rho.derivative().value),
        "beta": beta, "beta_nonzero": beta_nonzero,
    }
    return SingularPointLabel(t0, 0.0, label, diag, "l0")


def find_rho_roots(S, samples=None, tol=ZERO_TOL):
    """Parameters where ``rho`` changes sign, refined with Brent's method."""
    from scipy.optimize import brentq

    ts = S.sample_params(samples)
    rho = S.rho(ts)
    roots = []
    for i in range(ts.size - 1):
        a, b = rho[i], rho[i + 1]
        if a == 0.0:
            roots.append(float(ts[i]))
        elif a * b < 0:
            roots.append(float(brentq(lambda x: float(S.rho(x)), ts[i], ts[i + 1], xtol=1e-14)))
    if rho[-1] == 0.0:
        roots.append(float(ts[-1]))
    return roots


__all__ = [
    "CYLINDER", "CONE", "GENERIC", "CUSPIDAL_EDGE", "SWALLOWTAIL", "DEGENERATE", "UNRESOLVED",
    "SurfaceClass", "SingularPointLabel", "FrontCheck", "classify_surface", "front_check",
    "classify_singularity", "classify_singularity_l0", "l0_terms", "find_rho_roots",
]
