"""Second-order forward-mode jets over 2n real coordinates.

Coordinates are interleaved, ``(x_1, y_1, ..., x_n, y_n)`` with
``z_a = x_a + i*y_a``; index ``2a`` is the real part of ``z_a`` and
``2a + 1`` its imaginary part. Every module uses this ordering.

A :class:`Jet2` carries value, gradient and Hessian. Jets seeded with
``order=3`` additionally carry the third-derivative tensor, which is what
derivatives of curvature coefficients (themselves second derivatives of a
weight) need. Mixed-order arithmetic drops to the lower order.

The product and chain rules run in ``_kernels`` (compiled) when it is
importable, otherwise in ``_kernels_py``. Set ``LCKBLOWUP_PURE_PYTHON=1``
or call :func:`set_backend` to force the fallback.
"""
import math
import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("LCKBLOWUP_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _kernels as _k
except ImportError:
    _k = _kernels_py

__all__ = [
    "BACKEND", "ComplexJet2", "Jet2", "JetDomainError", "available_backends",
    "ddbar", "ddbar_derivative", "jet_arith", "jet_fn", "seed",
    "seed_complex", "set_backend", "wirtinger",
]

BACKEND = _k.BACKEND


def available_backends():
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names


def set_backend(name):
    """Switch kernels at runtime (``"python"`` or ``"cython"``)."""
    global _k, BACKEND
    if name == "python":
        _k = _kernels_py
    elif name == "cython":
        from . import _kernels
        _k = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = _k.BACKEND


class JetDomainError(ValueError):
    """A jet operation left its domain (log of non-positive, division by 0).

    ``point`` is filled in by whichever caller knows the sample point.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point

    def __str__(self):
        msg = super().__str__()
        if self.point is not None:
            msg += f" at sample point {self.point!r}"
        return msg


class Jet2:
    __slots__ = ("value", "grad", "hess", "third")

    def __init__(self, value, grad, hess, third=None):
        self.value = float(value)
        self.grad = grad
        self.hess = hess
        self.third = third

    @classmethod
    def constant(cls, c, m, order=2):
        third = np.zeros((m, m, m)) if order >= 3 else None
        return cls(c, np.zeros(m), np.zeros((m, m)), third)

    @property
    def dim(self):
        return self.grad.shape[0]

    @property
    def order(self):
        return 2 if self.third is None else 3

    def is_zero(self):
        return self.value == 0.0 and not self.grad.any() and not self.hess.any()

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, order={self.order})"

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet2):
            third = None
            if self.third is not None and other.third is not None:
                third = self.third + other.third
            return Jet2(self.value + other.value, self.grad + other.grad,
                        self.hess + other.hess, third)
        if isinstance(other, ComplexJet2):
            return NotImplemented
        return Jet2(self.value + other, self.grad, self.hess, self.third)

    __radd__ = __add__

    def __neg__(self):
        third = None if self.third is None else -self.third
        return Jet2(-self.value, -self.grad, -self.hess, third)

    def __sub__(self, other):
        if isinstance(other, Jet2):
            third = None
            if self.third is not None and other.third is not None:
                third = self.third - other.third
            return Jet2(self.value - other.value, self.grad - other.grad,
                        self.hess - other.hess, third)
        if isinstance(other, ComplexJet2):
            return NotImplemented
        return Jet2(self.value - other, self.grad, self.hess, self.third)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            g, h, t = _k.mul(self.value, self.grad, self.hess, self.third,
                             other.value, other.grad, other.hess, other.third)
            return Jet2(self.value * other.value, g, h, t)
        if isinstance(other, ComplexJet2):
            return NotImplemented
        if isinstance(other, complex):
            return ComplexJet2(self * other.real, self * other.imag)
        c = float(other)
        third = None if self.third is None else c * self.third
        return Jet2(self.value * c, c * self.grad, c * self.hess, third)

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if v == 0.0:
            raise JetDomainError("division by a zero-valued jet")
        r = 1.0 / v
        return self._chain(r, -r * r, 2.0 * r ** 3, -6.0 * r ** 4)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if other == 0:
            raise JetDomainError("division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def _chain(self, f0, f1, f2, f3):
        g, h, t = _k.chain(f1, f2, f3, self.grad, self.hess, self.third)
        return Jet2(f0, g, h, t)

    # elementary functions -------------------------------------------------
    def exp(self):
        e = math.exp(self.value)
        return self._chain(e, e, e, e)

    def log(self):
        v = self.value
        if not v > 0.0:
            raise JetDomainError(f"log of non-positive value {v!r}")
        r = 1.0 / v
        return self._chain(math.log(v), r, -r * r, 2.0 * r ** 3)

    def sqrt(self):
        v = self.value
        if not v > 0.0:
            raise JetDomainError(f"sqrt of non-positive value {v!r}")
        s = math.sqrt(v)
        return self._chain(s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v))

    def square(self):
        return self * self


def seed(point, order=2):
    """Jets of the coordinate functions at a real point."""
    point = np.asarray(point, dtype=float)
    m = point.shape[0]
    eye = np.eye(m)
    zeros2 = np.zeros((m, m))
    out = []
    for k in range(m):
        third = np.zeros((m, m, m)) if order >= 3 else None
        out.append(Jet2(point[k], eye[k].copy(), zeros2.copy(), third))
    return out


def seed_complex(coords, order=2):
    """Complex coordinate jets ``z_a = x_a + i y_a`` at a complex point."""
    coords = np.asarray(coords, dtype=complex)
    real = np.empty(2 * coords.shape[0])
    real[0::2] = coords.real
    real[1::2] = coords.imag
    r = seed(real, order)
    return [ComplexJet2(r[2 * a], r[2 * a + 1]) for a in range(coords.shape[0])]


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def jet_arith(a, b, op):
    try:
        return _ARITH[op](a, b)
    except KeyError:
        raise ValueError(f"unknown jet operation {op!r}") from None


def jet_fn(a, f):
    if f not in ("exp", "log", "sqrt", "reciprocal", "square"):
        raise ValueError(f"unsupported jet function {f!r}")
    return getattr(a, f)()


def wirtinger(j, a):
    """``(d/dz_a, d/dzbar_a)`` of the real jet ``j`` (``a`` is 0-based)."""
    gx, gy = j.grad[2 * a], j.grad[2 * a + 1]
    return 0.5 * complex(gx, -gy), 0.5 * complex(gx, gy)


def _ddbar_block(h):
    # h: (..., 2n, 2n) real symmetric -> (..., n, n) with [a, b] = d_a dbar_b
    n = h.shape[-1] // 2
    h4 = h.reshape(h.shape[:-2] + (n, 2, n, 2))
    xx = h4[..., :, 0, :, 0]
    yy = h4[..., :, 1, :, 1]
    xy = h4[..., :, 0, :, 1]
    yx = h4[..., :, 1, :, 0]
    return 0.25 * ((xx + yy) + 1j * (xy - yx))


def ddbar(phi):
    """Hermitian matrix ``M[a, b] = d^2 phi / dz_a dzbar_b`` of a real jet."""
    return _ddbar_block(phi.hess)


def ddbar_derivative(phi):
    """Real derivatives of :func:`ddbar`: array ``D[k, a, b] = d_k M[a, b]``.

    Needs a third-order jet.
    """
    if phi.third is None:
        raise ValueError("ddbar_derivative needs a jet seeded with order=3")
    return _ddbar_block(phi.third)


class ComplexJet2:
    """``re + i*im`` with both parts real jets."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    @classmethod
    def constant(cls, c, m, order=2):
        c = complex(c)
        return cls(Jet2.constant(c.real, m, order), Jet2.constant(c.imag, m, order))

    @property
    def value(self):
        return complex(self.re.value, self.im.value)

    def __repr__(self):
        return f"ComplexJet2(value={self.value!r})"

    def conj(self):
        return ComplexJet2(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        if isinstance(other, ComplexJet2):
            return ComplexJet2(self.re + other.re, self.im + other.im)
        if isinstance(other, Jet2):
            return ComplexJet2(self.re + other, self.im)
        c = complex(other)
        return ComplexJet2(self.re + c.real, self.im + c.imag)

    __radd__ = __add__

    def __neg__(self):
        return ComplexJet2(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ComplexJet2):
            return ComplexJet2(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)
        if isinstance(other, Jet2):
            return ComplexJet2(self.re * other, self.im * other)
        c = complex(other)
        if c.imag == 0.0:
            return ComplexJet2(self.re * c.real, self.im * c.real)
        return ComplexJet2(self.re * c.real - self.im * c.imag,
                           self.re * c.imag + self.im * c.real)

    __rmul__ = __mul__

    def reciprocal(self):
        d = self.abs2()
        if d.value == 0.0:
            raise JetDomainError("division by a zero-valued complex jet")
        inv = d.reciprocal()
        return ComplexJet2(self.re * inv, -self.im * inv)

    def __truediv__(self, other):
        if isinstance(other, ComplexJet2):
            return self * other.reciprocal()
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        c = complex(other)
        if c == 0:
            raise JetDomainError("division by zero")
        return self * (1.0 / c)

    def __rtruediv__(self, other):
        return self.reciprocal() * other
