"""Finite-difference oracle: recompute jet quantities a second way.

Nothing here uses jet coefficients beyond order zero; derivatives come from
central stencils on plain point values, optionally Richardson-extrapolated.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import developables as dv
from . import frames
from .errors import CylindricalAt

# offsets and weights of central stencils; derivative = sum(w f(t + k h)) / (d h^n)
_STENCILS = {
    "central_2": {
        1: ((-1, 1), (-1, 1), 2.0),
        2: ((-1, 0, 1), (1, -2, 1), 1.0),
        3: ((-2, -1, 1, 2), (-1, 2, -2, 1), 2.0),
    },
    "central_4": {
        1: ((-2, -1, 1, 2), (1, -8, 8, -1), 12.0),
        2: ((-2, -1, 0, 1, 2), (-1, 16, -30, 16, -1), 12.0),
        3: ((-3, -2, -1, 1, 2, 3), (1, -8, 13, -13, 8, -1), 8.0),
    },
}
_ACCURACY = {"central_2": 2, "central_4": 4}
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class FdConfig:
    """Finite-difference settings.

    ``step`` is the first-derivative step; order ``n`` uses
    ``step * 10**(n-1)``.  With ``richardson`` the stencil is extrapolated
    between ``h`` and ``h/2`` along a halving sequence of ``levels`` steps
    centred on that step, keeping the estimate with the smallest change to
    its neighbour plus rounding noise.
    """

    step: float = 1e-5
    scheme: str = "central_4"
    richardson: bool = True
    levels: int = 10

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.scheme not in _STENCILS:
            raise ValueError(f"scheme must be one of {sorted(_STENCILS)}")

    def step_for(self, order):
        return self.step * 10.0 ** (order - 1)


def _stencil(f, t, order, h, scheme):
    """Stencil estimate and a bound on its rounding error."""
    offsets, weights, denom = _STENCILS[scheme][order]
    w = np.asarray(weights, dtype=float)
    t = np.asarray(t, dtype=float)
    pts = t[..., None] + np.asarray(offsets, dtype=float) * h
    vals = np.asarray(f(pts.reshape(-1)), dtype=float)
    vals = vals.reshape(vals.shape[:-1] + pts.shape)
    scale = denom * h**order
    est = np.tensordot(vals, w, axes=([-1], [0])) / scale
    # values near zero are usually cancellations of O(1) terms
    noise = _EPS * np.maximum(np.abs(vals).max(axis=-1), 1.0) * np.abs(w).sum() / scale
    return est, noise


def fd_derivative(f, t, order, cfg=FdConfig()):
    """Finite-difference estimate of the ``order``-th derivative of ``f`` at ``t``.

    ``f`` maps a 1-D array of parameters to an array whose last axis matches.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    h = cfg.step_for(order)
    if not cfg.richardson:
        return _stencil(f, t, order, h, cfg.scheme)[0]
    p = 2 ** _ACCURACY[cfg.scheme]
    # a halving sequence around the nominal step
    hs = h * 2.0 ** (cfg.levels // 2 - np.arange(cfg.levels + 1))
    raw = [_stencil(f, t, order, hh, cfg.scheme) for hh in hs]
    ext = np.stack([(p * b[0] - a[0]) / (p - 1) for a, b in zip(raw, raw[1:])])
    noise = np.stack([b[1] for b in raw[1:]])
    # estimated error: change to the next level plus rounding noise
    err = np.abs(np.diff(ext, axis=0)) + noise[1:] * (p + 1) / (p - 1)
    best = np.argmin(err, axis=0)
    return np.take_along_axis(ext[1:], best[None, ...], axis=0)[0]


def lambda_direct(S, t, a, cfg=FdConfig()):
    """``det(S_t, S_a, normal)`` with ``S_t`` from differences of point values."""
    t = float(t)

    def pts(ts):
        return S.point(ts, a)

    St = fd_derivative(pts, t, 1, cfg)
    Sa = S.delta(t)
    n = S.normal(t)
    return float(np.linalg.det(np.column_stack([St, Sa, n])))


def striction_search(S, t, cfg=FdConfig(), tol=1e-10):
    """``s = -c'.delta' / delta'.delta'`` with both derivatives by differences."""
    t = float(t)
    dc = fd_derivative(lambda ts: S.fc.point(ts), t, 1, cfg)
    dd = fd_derivative(lambda ts: S.delta(ts), t, 1, cfg)
    denom = float(dd @ dd)
    if denom <= tol**2:
        raise CylindricalAt(t)
    return -float(dc @ dd) / denom


def gaussian_curvature_fd(S, t, a, cfg=FdConfig()):
    """Gaussian curvature from differenced fundamental forms."""
    def at(ts):
        return S.point(ts, a)

    St = fd_derivative(at, t, 1, cfg)
    Stt = fd_derivative(at, t, 2, cfg)
    Sa = S.delta(float(t))
    Sta = fd_derivative(lambda ts: S.delta(ts), t, 1, cfg)
    n = np.cross(St, Sa)
    n = n / np.linalg.norm(n)
    E, F, G = St @ St, St @ Sa, Sa @ Sa
    L, M = Stt @ n, Sta @ n
    return float((L * 0.0 - M * M) / (E * G - F * F))


# -- jet-vs-FD comparison table ----------------------------------------------

QUANTITIES = ("kappa1", "kappa2", "kappa3", "l", "beta_nu", "rho_nu", "beta_b", "rho_b")


def quantity_jets(fc, t, order):
    """Dict of jets of every tabulated quantity at ``t``."""
    inv = frames.invariants(fc, t, order + 2)
    bn, rn = dv.beta_rho(inv, dv.NU_TYPE)
    bb, rb = dv.beta_rho(inv, dv.B_TYPE)
    out = {
        "kappa1": inv.kappa1, "kappa2": inv.kappa2, "kappa3": inv.kappa3, "l": inv.l,
        "beta_nu": bn, "rho_nu": rn, "beta_b": bb, "rho_b": rb,
    }
    return {k: v.truncate(order) for k, v in out.items()}


def compare(fc, name, ts, orders=(1, 2, 3), cfg=FdConfig()):
    """Rows ``(fixture, quantity, t, jet_value, oracle_value, rel_err)``.

    ``quantity`` is spelled ``<name>^(k)`` for the k-th derivative.
    """
    ts = np.asarray(ts, dtype=float)
    jet = quantity_jets(fc, ts, max(orders))

    def values(x):
        q = quantity_jets(fc, x, 0)
        return np.stack([q[name].value for name in QUANTITIES])

    fds = {k: fd_derivative(values, ts, k, cfg) for k in orders}
    rows = []
    for i, q in enumerate(QUANTITIES):
        derivs = jet[q].derivatives()
        for k in orders:
            for t, jv, ov in zip(ts, derivs[k], fds[k][i]):
                err = abs(jv - ov) / max(abs(ov), 1e-300)
                rows.append((name, f"{q}^({k})", float(t), float(jv), float(ov), float(err)))
    return rows


def agrees(jet_value, oracle_value, rel=1e-5, abs_floor=1e-7):
    return abs(jet_value - oracle_value) <= max(rel * abs(oracle_value), abs_floor)


def write_table(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("fixture", "quantity", "t", "jet_value", "oracle_value", "rel_err"))
        for r in rows:
            w.writerow((r[0], r[1], *(format(x, ".17g") for x in r[2:])))


__all__ = [
    "FdConfig", "fd_derivative", "lambda_direct", "striction_search", "gaussian_curvature_fd",
    "QUANTITIES", "quantity_jets", "compare", "agrees", "write_table",
]
