import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lckblowup.forms import (FormError, HermJet, RealPForm, check_hermitian, complex_structure, d_of_jets,
                             exterior_d, herm_to_real2form, hermitian_pairing, lck_residual, min_eigenvalue,
                             real2form_to_herm, to_complex_vector, to_real_vector, wedge)
from lckblowup.jets import ComplexJet2, Jet2, seed, seed_complex
from lckblowup.selftest import evaluate_expression, random_expression


def _random_herm(rng, n, pd=False):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = A @ A.conj().T if pd else A + A.conj().T
    return H + (0.1 * np.eye(n) if pd else 0)


def _jets(rng, m, count, depth=4):
    x = seed(rng.uniform(-1, 1, m))
    out = []
    for _ in range(count):
        j = evaluate_expression(random_expression(rng, m, depth), x)
        out.append(j if isinstance(j, Jet2) else Jet2.constant(float(j), m))
    return out


def test_basic_two_form_normalisation():
    W = np.zeros((2, 2))
    W[0, 1], W[1, 0] = 1.0, -1.0
    dxdy = RealPForm(2, W)
    assert dxdy([1, 0], [0, 1]) == 1.0
    dx = RealPForm(1, np.array([1.0, 0.0]))
    dy = RealPForm(1, np.array([0.0, 1.0]))
    assert np.array_equal(wedge(dx, dy).coeffs, W)


def test_herm_roundtrip_and_pairing():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3):
        H = _random_herm(rng, n)
        w = herm_to_real2form(H)
        assert w.is_antisymmetric()
        assert np.allclose(real2form_to_herm(w), H, atol=1e-14)
        J = complex_structure(n)
        v = rng.normal(size=2 * n)
        assert w(v, J @ v) == pytest.approx(2 * hermitian_pairing(H, to_complex_vector(v)), rel=1e-12)


def test_complex_structure_squares_to_minus_one():
    J = complex_structure(3)
    assert np.array_equal(J @ J, -np.eye(6))
    zeta = np.array([1 + 2j, -0.5j, 3.0])
    assert np.allclose(to_complex_vector(J @ to_real_vector(zeta)), 1j * zeta)


def test_positivity_bridge():
    rng = np.random.default_rng(1)
    H = _random_herm(rng, 3, pd=True)
    w = herm_to_real2form(H)
    J = complex_structure(3)
    assert all(w(v, J @ v) > 0 for v in rng.normal(size=(200, 6)))
    # an indefinite matrix has a negative direction: its eigenvector
    G = np.diag([1.0, -0.5, 2.0]).astype(complex)
    zeta = np.array([0, 1, 0], dtype=complex)
    v = to_real_vector(zeta)
    assert herm_to_real2form(G)(v, J @ v) < 0


def test_rejections():
    with pytest.raises(FormError):
        check_hermitian(np.array([[1.0, 1.0], [0.0, 1.0]]))
    W = np.zeros((4, 4))
    W[0, 2], W[2, 0] = 1.0, -1.0  # dx1 ^ dx2 is (2,0)+(0,2)
    with pytest.raises(FormError):
        real2form_to_herm(RealPForm(2, W))
    a = RealPForm(2, W)
    with pytest.raises(FormError):
        wedge(a, wedge(a, a))
    with pytest.raises(FormError):
        a([1, 0, 0, 0])
    with pytest.raises(FormError):
        a + RealPForm(1, np.zeros(4))


def test_eigenvalue_shift():
    rng = np.random.default_rng(2)
    H = _random_herm(rng, 4)
    assert min_eigenvalue(H + 3.0 * np.eye(4)) == pytest.approx(min_eigenvalue(H) + 3.0, abs=1e-12)


def test_d_squared_zero():
    rng = np.random.default_rng(3)
    for _ in range(20):
        alpha = _jets(rng, 4, 4)
        assert exterior_d(d_of_jets(1, alpha)).sup_norm() < 1e-12
        assert exterior_d(d_of_jets(0, alpha[0])).sup_norm() == 0.0


def test_exterior_d_of_function_is_gradient():
    x, y = seed([0.2, 0.9])
    f = (x * y).exp()
    assert np.array_equal(exterior_d(f).coeffs, f.grad)


def test_leibniz_function_times_form():
    rng = np.random.default_rng(4)
    for _ in range(10):
        f, *alpha = _jets(rng, 4, 5)
        lhs = d_of_jets(1, [f * a for a in alpha]).form
        A = RealPForm(1, np.array([a.value for a in alpha]))
        rhs = wedge(RealPForm(1, f.grad), A) + f.value * d_of_jets(1, alpha).form
        assert (lhs - rhs).sup_norm() < 1e-12


def test_leibniz_wedge_of_one_forms():
    rng = np.random.default_rng(5)
    m = 4
    for _ in range(10):
        a = _jets(rng, m, m)
        b = _jets(rng, m, m)
        c = [[a[i] * b[j] - a[j] * b[i] for j in range(m)] for i in range(m)]
        lhs = d_of_jets(2, c).form
        A = RealPForm(1, np.array([x.value for x in a]))
        B = RealPForm(1, np.array([x.value for x in b]))
        rhs = wedge(d_of_jets(1, a).form, B) - wedge(A, d_of_jets(1, b).form)
        assert (lhs - rhs).sup_norm() < 1e-12


def _herm_jet_field(rng, z):
    """A Hermitian matrix field built from random smooth expressions of ``z``."""
    n = len(z)
    m = 2 * n
    real = []
    for c in z:
        real += [c.re, c.im]

    def expr():
        j = evaluate_expression(random_expression(rng, m, 3), real)
        return j if isinstance(j, Jet2) else Jet2.constant(float(j), m)

    E = [[None] * n for _ in range(n)]
    for a in range(n):
        E[a][a] = ComplexJet2(expr(), Jet2.constant(0.0, m))
        for b in range(a + 1, n):
            E[a][b] = ComplexJet2(expr(), expr())
            E[b][a] = E[a][b].conj()
    return HermJet.from_jets(E)


def test_conformal_covariance():
    rng = np.random.default_rng(6)
    for _ in range(20):
        z = seed_complex(rng.normal(size=2) + 1j * rng.normal(size=2))
        omega = _herm_jet_field(rng, z)
        theta = rng.normal(size=4)
        real = [z[0].re, z[0].im, z[1].re, z[1].im]
        f = evaluate_expression(random_expression(rng, 4, 4), real)
        if not isinstance(f, Jet2):
            continue
        lam = math.exp(f.value)
        scaled = HermJet(lam * omega.value, lam * (f.grad[:, None, None] * omega.value + omega.deriv))
        lhs = lck_residual(scaled, theta + f.grad)
        rhs = lam * lck_residual(omega, theta)
        assert (lhs - rhs).sup_norm() < 1e-9 * max(1.0, rhs.sup_norm())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_wedge_graded_commutativity(s):
    rng = np.random.default_rng(s)
    m = 5
    a = RealPForm(1, rng.normal(size=m))
    W = rng.normal(size=(m, m))
    b = RealPForm(2, W - W.T)
    c = RealPForm(1, rng.normal(size=m))
    assert np.allclose(wedge(a, b).coeffs, wedge(b, a).coeffs)
    assert np.allclose(wedge(a, c).coeffs, -wedge(c, a).coeffs)
    assert np.allclose(wedge(wedge(a, c), b).coeffs, wedge(a, wedge(c, b)).coeffs)
