"""Truncated Taylor jets.

A :class:`Jet` holds the Taylor coefficients ``c_0 .. c_K`` of a scalar
function at a base point ``t0`` so that ``f(t0 + h) ~ sum(c_k h**k)`` and the
k-th derivative is ``k! * c_k``.  :class:`VecJet` is the 3-vector analogue.

Coefficient arrays carry the order axis first and may carry trailing batch
axes; a batch of jets at many base points is evaluated with a single set of
numpy operations.  Binary operations between jets of different order
truncate to the smaller order.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DivisionByZeroJet, DomainError, NotDeflatable

DEFAULT_ORDER = 6
ZERO_TOL = 1e-12


# -- raw coefficient kernels (order axis 0, arbitrary trailing axes) --------

def _mul(a, b):
    n = min(a.shape[0], b.shape[0])
    a, b = a[:n], b[:n]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for j in range(n):
        out[j:] += a[j] * b[: n - j]
    return out


def _div(a, b):
    n = min(a.shape[0], b.shape[0])
    a, b = a[:n], b[:n]
    if np.any(b[0] == 0):
        raise DivisionByZeroJet("divisor jet has a zero constant term; deflate first")
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for k in range(n):
        acc = a[k] - sum(b[j] * out[k - j] for j in range(1, k + 1))
        out[k] = acc / b[0]
    return out


def _sqrt(a):
    if np.any(a[0] <= 0):
        raise DomainError("sqrt of a jet with non-positive constant term")
    out = np.zeros_like(a, dtype=float)
    out[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        acc = a[k] - sum(out[j] * out[k - j] for j in range(1, k))
        out[k] = acc / (2.0 * out[0])
    return out


def _sincos(a):
    s = np.zeros_like(a, dtype=float)
    c = np.zeros_like(a, dtype=float)
    s[0], c[0] = np.sin(a[0]), np.cos(a[0])
    for k in range(1, a.shape[0]):
        s[k] = sum(j * a[j] * c[k - j] for j in range(1, k + 1)) / k
        c[k] = -sum(j * a[j] * s[k - j] for j in range(1, k + 1)) / k
    return s, c


def _derivative(a):
    k = np.arange(1, a.shape[0]).reshape((-1,) + (1,) * (a.ndim - 1))
    return a[1:] * k


def _integrate(a, constant):
    k = np.arange(1, a.shape[0] + 1).reshape((-1,) + (1,) * (a.ndim - 1))
    out = np.empty((a.shape[0] + 1,) + a.shape[1:])
    out[0] = constant
    out[1:] = a / k
    return out


def _trim(a, b):
    n = min(a.shape[0], b.shape[0])
    return a[:n], b[:n]


def _add(a, b):
    a, b = _trim(a, b)
    return a + b


def _sub(a, b):
    a, b = _trim(a, b)
    return a - b


def _same_base(p, q):
    if p is q:
        return True
    return np.array_equal(np.asarray(p), np.asarray(q))


# -- scalar jets -------------------------------------------------------------

class Jet:
    __slots__ = ("coeffs", "base_point")

    def __init__(self, coeffs, base_point=0.0):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0:
            coeffs = coeffs.reshape(1)
        self.coeffs = coeffs
        self.base_point = base_point

    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER, base_point=0.0):
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros((order + 1,) + np.broadcast_shapes(value.shape, np.shape(base_point)))
        coeffs[0] = value
        return cls(coeffs, base_point)

    @classmethod
    def variable(cls, t0, order=DEFAULT_ORDER):
        """Jet of the identity map ``t -> t`` at ``t0``."""
        t0 = np.asarray(t0, dtype=float)
        coeffs = np.zeros((order + 1,) + t0.shape)
        coeffs[0] = t0
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs, t0 if t0.ndim else float(t0))

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivatives(self):
        """Array of ``f^(k)(t0)`` for ``k = 0..order``."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.coeffs * fact.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))

    def derivative(self):
        """Jet of ``f'`` (one order lower)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(_derivative(self.coeffs), self.base_point)

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise jet order from {self.order} to {order}")
        return Jet(self.coeffs[: order + 1], self.base_point)

    def _coerce(self, other):
        if isinstance(other, Jet):
            if not _same_base(self.base_point, other.base_point):
                raise ValueError("jets have different base points")
            return other.coeffs
        if isinstance(other, VecJet):
            return NotImplemented
        value = np.asarray(other, dtype=float)
        out = np.zeros((self.coeffs.shape[0],) + np.broadcast_shapes(value.shape, self.coeffs.shape[1:]))
        out[0] = value
        return out

    def _binary(self, other, fn):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return Jet(fn(self.coeffs, c), self.base_point)

    def __add__(self, other):
        return self._binary(other, _add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, _sub)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: _sub(b, a))

    def __mul__(self, other):
        if isinstance(other, VecJet):
            return other * self
        if isinstance(other, Jet):
            return self._binary(other, _mul)
        if np.ndim(other) == 0:
            return Jet(self.coeffs * float(other), self.base_point)
        return self._binary(other, _mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet) or np.ndim(other) > 0:
            return self._binary(other, _div)
        if other == 0:
            raise DivisionByZeroJet("division by a zero constant")
        return Jet(self.coeffs / float(other), self.base_point)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: _div(b, a))

    def __neg__(self):
        return Jet(-self.coeffs, self.base_point)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("jets only support non-negative integer powers")
        n = int(n)
        if n == 0:
            return Jet.constant(np.ones(self.coeffs.shape[1:]), self.order, self.base_point)
        result, base = None, self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __repr__(self):
        return f"Jet(base_point={self.base_point!r}, coeffs={self.coeffs!r})"


def jet_arith(a, b, op):
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} to two jets."""
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    if op not in ops:
        raise ValueError(f"unknown jet operation {op!r}")
    return ops[op]()


def sin(a):
    return Jet(_sincos(a.coeffs)[0], a.base_point)


def cos(a):
    return Jet(_sincos(a.coeffs)[1], a.base_point)


def sqrt(a):
    return Jet(_sqrt(a.coeffs), a.base_point)


def atan2_pair(s, c):
    """Angle jet ``theta`` with ``(sin theta, cos theta)`` proportional to ``(s, c)``.

    The constant term is the principal value ``atan2(s0, c0)``; higher terms
    integrate ``theta' = (s'c - c's) / (s^2 + c^2)``, so no branch cut is ever
    crossed inside the jet.
    """
    r2 = s * s + c * c
    if np.any(r2.coeffs[0] == 0):
        raise DomainError("atan2_pair of a vanishing pair")
    if s.order == 0:
        return Jet(np.arctan2(s.coeffs[:1], c.coeffs[:1]), s.base_point)
    rate = (s.derivative() * c - c.derivative() * s) / r2
    return Jet(_integrate(rate.coeffs, np.arctan2(s.coeffs[0], c.coeffs[0])), s.base_point)


_FUNCTIONS = {"sin": sin, "cos": cos, "sqrt": sqrt}


def jet_fn(a, fn, other=None):
    """Compose a jet with ``fn`` in {'sin', 'cos', 'sqrt', 'atan2_pair'}.

    ``atan2_pair`` takes the sine-like jet as ``a`` and the cosine-like jet as
    ``other``.
    """
    if fn == "atan2_pair":
        return atan2_pair(a, other)
    try:
        return _FUNCTIONS[fn](a)
    except KeyError:
        raise ValueError(f"unknown jet function {fn!r}") from None


# -- vector jets -------------------------------------------------------------

class VecJet:
    """3-vector of jets; ``coeffs`` has shape ``(order + 1, 3, *batch)``."""

    __slots__ = ("coeffs", "base_point")

    def __init__(self, coeffs, base_point=0.0):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim < 2 or coeffs.shape[1] != 3:
            raise ValueError("VecJet coefficients must have shape (order+1, 3, ...)")
        self.coeffs = coeffs
        self.base_point = base_point

    @classmethod
    def from_components(cls, x, y, z):
        n = min(x.order, y.order, z.order) + 1
        for other in (y, z):
            if not _same_base(x.base_point, other.base_point):
                raise ValueError("components have different base points")
        shape = np.broadcast_shapes(x.coeffs.shape[1:], y.coeffs.shape[1:], z.coeffs.shape[1:])
        coeffs = np.empty((n, 3) + shape)
        for i, comp in enumerate((x, y, z)):
            coeffs[:, i] = comp.coeffs[:n]
        return cls(coeffs, x.base_point)

    @classmethod
    def constant(cls, vector, order=DEFAULT_ORDER, base_point=0.0):
        vector = np.asarray(vector, dtype=float)
        batch = np.broadcast_shapes(vector.shape[1:], np.shape(base_point))
        coeffs = np.zeros((order + 1, 3) + batch)
        coeffs[0] = vector.reshape((3,) + vector.shape[1:])
        return cls(coeffs, base_point)

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def x(self):
        return Jet(self.coeffs[:, 0], self.base_point)

    @property
    def y(self):
        return Jet(self.coeffs[:, 1], self.base_point)

    @property
    def z(self):
        return Jet(self.coeffs[:, 2], self.base_point)

    @property
    def value(self):
        """Point value with the component axis first: shape ``(3, *batch)``."""
        return self.coeffs[0]

    def component(self, i):
        return Jet(self.coeffs[:, i], self.base_point)

    def derivative(self):
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return VecJet(_derivative(self.coeffs), self.base_point)

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise jet order from {self.order} to {order}")
        return VecJet(self.coeffs[: order + 1], self.base_point)

    def _check(self, other):
        if not _same_base(self.base_point, other.base_point):
            raise ValueError("jets have different base points")

    def __add__(self, other):
        self._check(other)
        a, b = _trim(self.coeffs, other.coeffs)
        return VecJet(a + b, self.base_point)

    def __sub__(self, other):
        self._check(other)
        a, b = _trim(self.coeffs, other.coeffs)
        return VecJet(a - b, self.base_point)

    def __neg__(self):
        return VecJet(-self.coeffs, self.base_point)

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return VecJet(_mul(self.coeffs, other.coeffs[:, None]), self.base_point)
        if np.ndim(other) == 0:
            return VecJet(self.coeffs * float(other), self.base_point)
        other = np.asarray(other, dtype=float)
        return VecJet(self.coeffs * other, self.base_point)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return VecJet(_div(self.coeffs, other.coeffs[:, None]), self.base_point)
        return VecJet(self.coeffs / np.asarray(other, dtype=float), self.base_point)

    def dot(self, other):
        return dot(self, other)

    def cross(self, other):
        return cross(self, other)

    def __repr__(self):
        return f"VecJet(base_point={self.base_point!r}, coeffs={self.coeffs!r})"


def dot(a, b):
    a._check(b)
    return Jet(_mul(a.coeffs, b.coeffs).sum(axis=1), a.base_point)


def cross(a, b):
    a._check(b)
    ax, ay, az = (a.coeffs[:, i] for i in range(3))
    bx, by, bz = (b.coeffs[:, i] for i in range(3))
    comps = (
        _mul(ay, bz) - _mul(az, by),
        _mul(az, bx) - _mul(ax, bz),
        _mul(ax, by) - _mul(ay, bx),
    )
    return VecJet(np.stack(comps, axis=1), a.base_point)


def norm(a):
    return sqrt(dot(a, a))


def normalize(a):
    sq = dot(a, a)
    if np.any(sq.coeffs[0] <= 0):
        raise DomainError("cannot normalize a vector jet whose value is zero; deflate first")
    return a / sqrt(sq)


def vec_ops(a, b):
    """Dot product, cross product and normalisation of ``a``, as a dict."""
    return {"dot": dot(a, b), "cross": cross(a, b), "normalize": normalize(a)}


def det3(a, b, c):
    return dot(a, cross(b, c))


def lowest_nonzero_order(v, tol=ZERO_TOL):
    """Index of the first coefficient vector of ``v`` exceeding ``tol``."""
    mags = np.abs(v.coeffs).reshape(v.coeffs.shape[0], -1).max(axis=1)
    scale = max(1.0, float(mags.max()))
    for k, m in enumerate(mags):
        if m > tol * scale:
            return k
    return None


def deflate(v, multiplicity, tol=ZERO_TOL):
    """Divide a vector jet by ``(t - t0)**multiplicity``.

    The first ``multiplicity`` coefficient vectors must vanish within ``tol``
    (relative to the largest coefficient); the result is ``multiplicity``
    orders shorter.
    """
    m = int(multiplicity)
    if m < 0:
        raise ValueError("multiplicity must be non-negative")
    if m == 0:
        return v
    if m > v.order:
        raise NotDeflatable(f"cannot deflate an order-{v.order} jet by {m}")
    lead = np.abs(v.coeffs[:m])
    scale = max(1.0, float(np.abs(v.coeffs).max()))
    if np.any(lead > tol * scale):
        k = int(np.argmax(lead.reshape(m, -1).max(axis=1) > tol * scale))
        raise NotDeflatable(
            f"coefficient of order {k} is nonzero ({lead[k].max():.3e}); "
            f"declared multiplicity {m} is too large"
        )
    return VecJet(v.coeffs[m:], v.base_point)
