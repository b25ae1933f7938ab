"""Pointwise differential forms in the real interleaved coordinate basis.

A p-form is stored as its fully antisymmetric coefficient tensor ``W`` so
that ``form(v_1, ..., v_p) = W[i_1, ..., i_p] v_1[i_1] ... v_p[i_p]``.
With that normalisation ``(dx ^ dy)[x, y] = 1`` and the exterior
derivative and wedge product are plain antisymmetrisations.

A (1,1)-form ``i * sum H[a, b] dz_a ^ dzbar_b`` is stored as the Hermitian
matrix ``H``. Its value on a real tangent vector ``v`` with complex
components ``zeta_a = v[2a] + i v[2a+1]`` is::

    omega(v, J v) = 2 * sum_ab H[a, b] zeta_a conj(zeta_b)

so ``omega`` is positive iff ``H`` is positive definite.
:func:`hermitian_pairing` computes the sum.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import factorial

import numpy as np

HERMITIAN_TOL = 1e-12


class FormError(ValueError):
    pass


@dataclass(frozen=True)
class RealPForm:
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.ndim != self.degree:
            raise FormError(f"degree {self.degree} form needs a rank-{self.degree} tensor")

    @property
    def dim(self):
        return self.coeffs.shape[0] if self.degree else 0

    def __call__(self, *vectors):
        if len(vectors) != self.degree:
            raise FormError(f"expected {self.degree} vectors, got {len(vectors)}")
        out = self.coeffs
        for v in vectors:
            out = np.tensordot(np.asarray(v, dtype=float), out, axes=(0, 0))
        return float(out)

    def __add__(self, other):
        _same_degree(self, other)
        return RealPForm(self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_degree(self, other)
        return RealPForm(self.degree, self.coeffs - other.coeffs)

    def __mul__(self, c):
        return RealPForm(self.degree, float(c) * self.coeffs)

    __rmul__ = __mul__

    def sup_norm(self):
        """Largest absolute coefficient (0.0 for the empty tensor)."""
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def is_antisymmetric(self):
        for i in range(self.degree - 1):
            if not np.array_equal(self.coeffs, -np.swapaxes(self.coeffs, i, i + 1)):
                return False
        return True


def _same_degree(a, b):
    if a.degree != b.degree:
        raise FormError(f"degree mismatch: {a.degree} vs {b.degree}")


@dataclass(frozen=True)
class FormJet:
    """A p-form field sampled at a point together with its first derivatives.

    ``deriv[k]`` is the derivative of ``coeffs`` along real coordinate ``k``.
    """

    degree: int
    coeffs: np.ndarray
    deriv: np.ndarray

    @property
    def form(self):
        return RealPForm(self.degree, self.coeffs)

    def __add__(self, other):
        return FormJet(self.degree, self.coeffs + other.coeffs, self.deriv + other.deriv)

    def __sub__(self, other):
        return FormJet(self.degree, self.coeffs - other.coeffs, self.deriv - other.deriv)

    def __mul__(self, c):
        c = float(c)
        return FormJet(self.degree, c * self.coeffs, c * self.deriv)

    __rmul__ = __mul__

    @classmethod
    def from_jets(cls, degree, jets):
        """Assemble from an array-like of :class:`~lckblowup.jets.Jet2` coefficients."""
        arr = np.asarray(jets, dtype=object)
        shape = arr.shape
        flat = arr.ravel()
        m = flat[0].dim
        coeffs = np.array([j.value for j in flat]).reshape(shape)
        deriv = np.stack([j.grad for j in flat], axis=-1).reshape((m,) + shape)
        return cls(degree, coeffs, deriv)


@dataclass(frozen=True)
class HermJet:
    """A Hermitian coefficient matrix with its real first derivatives."""

    value: np.ndarray
    deriv: np.ndarray

    def __add__(self, other):
        return HermJet(self.value + other.value, self.deriv + other.deriv)

    def __sub__(self, other):
        return HermJet(self.value - other.value, self.deriv - other.deriv)

    def __mul__(self, c):
        return HermJet(c * self.value, c * self.deriv)

    __rmul__ = __mul__

    def __neg__(self):
        return HermJet(-self.value, -self.deriv)

    def to_form_jet(self):
        return FormJet(2, _herm_tensor(self.value), _herm_tensor(self.deriv))

    @classmethod
    def from_jets(cls, entries):
        """From an n x n nested list of :class:`~lckblowup.jets.ComplexJet2`."""
        n = len(entries)
        m = entries[0][0].re.dim
        value = np.empty((n, n), dtype=complex)
        deriv = np.empty((m, n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                e = entries[a][b]
                value[a, b] = e.value
                deriv[:, a, b] = e.re.grad + 1j * e.im.grad
        return cls(value, deriv)


def check_hermitian(H, tol=HERMITIAN_TOL):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise FormError(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    err = float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0
    if err > tol * scale:
        raise FormError(f"matrix is not Hermitian (deviation {err:.3e})")
    return H


def _herm_tensor(H):
    # works on (..., n, n) stacks
    n = H.shape[-1]
    A = H.real
    B = H.imag
    W = np.zeros(H.shape[:-2] + (2 * n, 2 * n))
    W[..., 0::2, 1::2] = 2.0 * A
    W[..., 1::2, 0::2] = -2.0 * A
    W[..., 0::2, 0::2] = -2.0 * B
    W[..., 1::2, 1::2] = -2.0 * B
    return W


def herm_to_real2form(H):
    """Real 2-form of ``i * sum H[a, b] dz_a ^ dzbar_b``."""
    H = check_hermitian(H)
    return RealPForm(2, _herm_tensor(np.asarray(H, dtype=complex)))


def real2form_to_herm(form, tol=HERMITIAN_TOL):
    """Inverse of :func:`herm_to_real2form`; rejects forms that are not of type (1,1)."""
    W = form.coeffs
    if form.degree != 2:
        raise FormError("need a 2-form")
    xx, yy = W[0::2, 0::2], W[1::2, 1::2]
    xy = W[0::2, 1::2]
    scale = max(1.0, float(np.max(np.abs(W))))
    if np.max(np.abs(xx - yy)) > tol * scale or np.max(np.abs(xy - xy.T)) > tol * scale:
        raise FormError("2-form is not of type (1,1)")
    return 0.5 * xy - 0.5j * xx


def hermitian_pairing(H, zeta):
    """``sum_ab H[a, b] zeta_a conj(zeta_b)``; half of ``omega(v, Jv)``."""
    zeta = np.asarray(zeta, dtype=complex)
    return float(np.real(zeta @ H @ zeta.conj()))


def to_complex_vector(v):
    v = np.asarray(v, dtype=float)
    return v[0::2] + 1j * v[1::2]


def to_real_vector(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    v = np.empty(2 * zeta.shape[0])
    v[0::2] = zeta.real
    v[1::2] = zeta.imag
    return v


def complex_structure(n):
    """Matrix of multiplication by ``i`` on real interleaved vectors."""
    J = np.zeros((2 * n, 2 * n))
    for a in range(n):
        J[2 * a + 1, 2 * a] = 1.0
        J[2 * a, 2 * a + 1] = -1.0
    return J


def exterior_d(field, at=None):
    """Exterior derivative of a sampled form field.

    ``field`` is a :class:`FormJet`, or any object with a ``jet(point)``
    method returning one (then ``at`` is required). A bare
    :class:`~lckblowup.jets.Jet2` is treated as a 0-form.
    """
    if not isinstance(field, FormJet):
        if hasattr(field, "grad") and hasattr(field, "hess"):
            return RealPForm(1, np.array(field.grad, dtype=float))
        if at is None:
            raise FormError("exterior_d of a field needs a point")
        field = field.jet(at)
        if isinstance(field, HermJet):
            field = field.to_form_jet()
    D = field.deriv
    out = np.zeros(D.shape, dtype=float)
    for k in range(field.degree + 1):
        term = np.moveaxis(D, 0, k)
        if k % 2:
            out -= term
        else:
            out += term
    return RealPForm(field.degree + 1, out)


def d_of_jets(degree, jets):
    """``d`` of a p-form given by Jet2 coefficients, as a :class:`FormJet`.

    The coefficient jets' Hessians supply the derivative of the result, so
    applying :func:`exterior_d` again computes ``d(d alpha)``.
    """
    arr = np.asarray(jets, dtype=object)
    shape = arr.shape
    flat = arr.ravel()
    m = flat[0].dim
    G = np.stack([j.grad for j in flat], axis=-1).reshape((m,) + shape)
    Hs = np.stack([j.hess for j in flat], axis=-1).reshape((m, m) + shape)
    coeffs = np.zeros(G.shape)
    deriv = np.zeros(Hs.shape)
    for k in range(degree + 1):
        sign = -1.0 if k % 2 else 1.0
        coeffs += sign * np.moveaxis(G, 0, k)
        deriv += sign * np.moveaxis(Hs, 1, k + 1)
    return FormJet(degree + 1, coeffs, deriv)


@lru_cache(maxsize=None)
def _signed_permutations(k):
    out = []
    for perm in permutations(range(k)):
        inversions = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        out.append((perm, -1.0 if inversions % 2 else 1.0))
    return tuple(out)


def wedge(a, b):
    p, q = a.degree, b.degree
    if p == 0:
        return RealPForm(q, float(a.coeffs) * b.coeffs)
    if q == 0:
        return RealPForm(p, float(b.coeffs) * a.coeffs)
    m = a.coeffs.shape[0]
    if b.coeffs.shape[0] != m:
        raise FormError("forms live on different dimensions")
    if p + q > m:
        raise FormError(f"degree {p}+{q} exceeds the dimension {m}")
    outer = np.multiply.outer(a.coeffs, b.coeffs)
    out = np.zeros(outer.shape)
    for perm, sign in _signed_permutations(p + q):
        out += sign * np.transpose(outer, perm)
    return RealPForm(p + q, out / (factorial(p) * factorial(q)))


def min_eigenvalue(H):
    H = check_hermitian(H)
    return float(np.linalg.eigvalsh(H)[0])


def lck_residual(omega, theta):
    """``d(omega) - theta ^ omega`` for a 2-form jet and a 1-form.

    ``omega`` may be a :class:`HermJet` or a degree-2 :class:`FormJet`;
    ``theta`` a :class:`RealPForm`, a :class:`FormJet` or a covector.
    """
    if isinstance(omega, HermJet):
        omega = omega.to_form_jet()
    if isinstance(theta, FormJet):
        theta = theta.form
    elif not isinstance(theta, RealPForm):
        theta = RealPForm(1, np.asarray(theta, dtype=float))
    return exterior_d(omega) - wedge(theta, omega.form)


class HermitianField:
    """A (1,1)-form field: chart point -> Hermitian coefficient matrix.

    ``jet_fn(point)`` returns a :class:`HermJet`; the optional ``value_fn``
    skips derivative work when only the matrix is needed.
    """

    def __init__(self, jet_fn, value_fn=None):
        self._jet_fn = jet_fn
        self._value_fn = value_fn

    def __call__(self, point):
        if self._value_fn is not None:
            return self._value_fn(point)
        return self._jet_fn(point).value

    def jet(self, point):
        return self._jet_fn(point)


class OneFormField:
    """A 1-form field: chart point -> real covector (length 2n)."""

    def __init__(self, jet_fn):
        self._jet_fn = jet_fn

    def __call__(self, point):
        return self._jet_fn(point).coeffs

    def jet(self, point):
        return self._jet_fn(point)
