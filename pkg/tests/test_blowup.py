import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lckblowup.blowup import (ChartDomainError, ChartId, ChartPoint, Region, best_chart, blowdown,
                              blowdown_coords, chart_transition, exceptional_tangent, fubini_study,
                              fubini_study_jet, jacobian_by_jets, jacobian_holo, lift, projection_jacobian,
                              pullback_fubini_study, pullback_herm, pullback_oneform, transition_coords)
from lckblowup.jets import seed_complex

rng_points = np.random.default_rng(11)


def _point(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def test_chart_ids():
    assert str(ChartId.blow(2)) == "blow2"
    assert ChartId.parse("blow2") == ChartId.blow(2)
    assert ChartId.parse("base") == ChartId.base()
    with pytest.raises(ValueError):
        ChartId("blow", None)
    with pytest.raises(ValueError):
        ChartId.parse("chart7")


def test_chart_point_serialisation():
    p = ChartPoint(ChartId.blow(1), (0.0, 0.5 - 2j, 3j))
    assert ChartPoint.from_dict(p.to_dict()) == p
    assert p.on_exceptional
    assert not ChartPoint(ChartId.base(), (1.0, 2.0)).on_exceptional


def test_lift_blowdown_roundtrip():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4):
        for _ in range(50):
            x = _point(rng, n)
            for j in range(n):
                assert np.max(np.abs(blowdown(lift(x, j)) - x)) < 1e-14 * np.max(np.abs(x)) + 1e-15


def test_transition_roundtrip_and_cocycle():
    rng = np.random.default_rng(1)
    n = 3
    for _ in range(100):
        x = _point(rng, n)
        p = lift(x, 0)
        q = chart_transition(p, ChartId.blow(2))
        back = chart_transition(q, ChartId.blow(0))
        assert np.allclose(back.array, p.array, rtol=1e-14, atol=1e-14)
        via = chart_transition(chart_transition(p, ChartId.blow(1)), ChartId.blow(2))
        assert np.allclose(via.array, q.array, rtol=1e-13, atol=1e-13)
        assert np.allclose(blowdown(q), x)


def test_transition_on_exceptional_divisor():
    p = ChartPoint(ChartId.blow(0), (0.0, 2.0 + 1j))
    q = chart_transition(p, ChartId.blow(1))
    assert q.on_exceptional
    assert q.coords[1] == pytest.approx(1 / (2.0 + 1j))
    with pytest.raises(ChartDomainError):
        chart_transition(p, ChartId.base())
    with pytest.raises(ChartDomainError):
        chart_transition(ChartPoint(ChartId.blow(0), (0.0, 0.0)), ChartId.blow(1))
    with pytest.raises(ChartDomainError):
        lift(np.array([0.0, 1.0]), 0)


def test_best_chart_bounds_ratios():
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = best_chart(_point(rng, 4))
        assert np.all(np.abs(p.array[1:]) <= 1.0 + 1e-15)


def test_jacobians_match_jets():
    rng = np.random.default_rng(3)
    n = 3
    for _ in range(30):
        x = _point(rng, n)
        p = lift(x, 1)
        J = jacobian_by_jets(lambda w: blowdown_coords(p.chart, w), p)
        assert np.allclose(jacobian_holo(p), J, atol=1e-13)
        for target in (ChartId.blow(0), ChartId.blow(2), ChartId.base()):
            Jt = jacobian_by_jets(lambda w, t=target: transition_coords(p.chart, t, w), p)
            assert np.allclose(jacobian_holo(p, target), Jt, atol=1e-12)
        b = ChartPoint(ChartId.base(), tuple(x))
        Jb = jacobian_by_jets(lambda w: transition_coords(b.chart, ChartId.blow(2), w), b)
        assert np.allclose(jacobian_holo(b, ChartId.blow(2)), Jb, atol=1e-12)


def test_pullback_of_differential_commutes():
    # c^*(dg) = d(g o c) for g = Re(z0 * z1^2) + |z2|^2
    rng = np.random.default_rng(4)
    n = 3

    def g(z):
        return (z[0] * z[1] * z[1]).re + z[2].abs2()

    for _ in range(30):
        p = lift(_point(rng, n), 2)
        x = blowdown(p)
        dg = g(seed_complex(x)).grad
        w = seed_complex(p.array)
        d_gc = g(blowdown_coords(p.chart, w)).grad
        assert np.allclose(pullback_oneform(dg, jacobian_holo(p)), d_gc, atol=1e-12)


def test_kernel_of_blowdown_on_exceptional():
    rng = np.random.default_rng(5)
    for n in (2, 3, 4):
        for j in range(n):
            p = ChartPoint(ChartId.blow(j), (0.0, *(rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1))))
            J = jacobian_holo(p)
            sv = np.linalg.svd(J, compute_uv=False)
            assert np.sum(sv > 1e-10) == 1
            T = exceptional_tangent(p)
            assert np.max(np.linalg.norm(T @ J.T, axis=1)) < 1e-12
    with pytest.raises(ChartDomainError):
        exceptional_tangent(ChartPoint(ChartId.blow(0), (0.1, 0.2)))


def test_fubini_study_positive_and_jet_consistent():
    rng = np.random.default_rng(6)
    for _ in range(500):
        u = rng.uniform(-4, 4, size=2) + 1j * rng.uniform(-4, 4, size=2)
        H = fubini_study(u)
        assert np.linalg.eigvalsh(H)[0] > 0
    u = np.array([0.3 + 0.1j, -1.2j])
    hj = fubini_study_jet(u)
    assert np.max(np.abs(hj.value - fubini_study(u))) < 1e-14
    assert np.allclose(fubini_study(np.zeros(2)), np.eye(2))


def test_projection_pullback_is_chart_independent():
    rng = np.random.default_rng(7)
    for _ in range(30):
        x = _point(rng, 3)
        p = lift(x, 0)
        q = chart_transition(p, ChartId.blow(2))
        Hp = pullback_fubini_study(p)
        Hq = pullback_fubini_study(q)
        Jqp = jacobian_holo(p, ChartId.blow(2))  # d(q coords)/d(p coords)
        assert np.allclose(pullback_herm(Hq, Jqp), Hp, atol=1e-12)
        u, J = projection_jacobian(ChartPoint(ChartId.base(), tuple(x)))
        assert J.shape == (2, 3)


def test_region_membership():
    reg = Region((3.0, 0.0), 0.5)
    assert reg.contains(ChartPoint(ChartId.blow(0), (0.0, 100.0)))
    assert not reg.contains(ChartPoint(ChartId.base(), (0.6, 0.0)))
    assert reg.shrink(0.25).radius == 0.25
    with pytest.raises(ValueError):
        reg.shrink(0.5)
    assert np.allclose(reg.ambient(ChartPoint(ChartId.base(), (0.1, 0.2j))), [3.1, 0.2j])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.complex_numbers(min_magnitude=0.05, max_magnitude=10, allow_nan=False,
                                   allow_infinity=False), min_size=2, max_size=5),
       st.integers(0, 4), st.integers(0, 4))
def test_atlas_roundtrip_property(coords, j, k):
    x = np.array(coords)
    n = len(x)
    j, k = j % n, k % n
    p = lift(x, j)
    q = chart_transition(p, ChartId.blow(k))
    assert np.allclose(blowdown(q), x, rtol=1e-12, atol=1e-12)
    assert np.allclose(chart_transition(q, ChartId.blow(j)).array, p.array, rtol=1e-11, atol=1e-11)


def test_pullback_pairing_identity():
    from lckblowup.forms import hermitian_pairing
    rng = np.random.default_rng(8)
    for _ in range(50):
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        H = A + A.conj().T
        Jc = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        lhs = hermitian_pairing(pullback_herm(H, Jc), v)
        assert abs(lhs - hermitian_pairing(H, Jc @ v)) < 1e-12 * max(1.0, abs(lhs))


def test_pullback_of_one_form_commutes_with_d():
    from lckblowup import finite_diff
    from lckblowup.blowup import real_jacobian
    from lckblowup.forms import d_of_jets
    from lckblowup.jets import Jet2, seed
    from lckblowup.selftest import evaluate_expression, random_expression

    rng = np.random.default_rng(9)
    exprs = [random_expression(rng, 4, 4) for _ in range(4)]

    def alpha(xr, order=2):
        xs = seed(xr, order)
        out = [evaluate_expression(e, xs) for e in exprs]
        return [o if isinstance(o, Jet2) else Jet2.constant(float(o), 4) for o in out]

    for _ in range(10):
        p = lift(0.5 * (rng.normal(size=2) + 1j * rng.normal(size=2)), int(rng.integers(2)))

        def pulled(wr, chart=p.chart):
            q = ChartPoint(chart, tuple(wr[0::2] + 1j * wr[1::2]))
            x = blowdown(q)
            xr = np.empty(4)
            xr[0::2], xr[1::2] = x.real, x.imag
            a = np.array([j.value for j in alpha(xr)])
            return real_jacobian(jacobian_holo(q)).T @ a

        w = p.real()
        D = np.stack([finite_diff.gradient(lambda v, i=i: pulled(v)[i], w) for i in range(4)])
        d_pulled = D.T - D  # (d beta)[k, i] = d_k beta_i - d_i beta_k
        x = blowdown(p)
        xr = np.empty(4)
        xr[0::2], xr[1::2] = x.real, x.imag
        dalpha = d_of_jets(1, alpha(xr)).coeffs
        R = real_jacobian(jacobian_holo(p))
        pulled_d = R.T @ dalpha @ R
        assert np.max(np.abs(d_pulled - pulled_d)) < 1e-9 * max(1.0, np.max(np.abs(pulled_d)))


def test_worked_chart_examples():
    b0 = ChartId.blow(0)
    assert np.array_equal(blowdown(ChartPoint(b0, (0.0, 5.0))), [0.0, 0.0])
    assert np.allclose(blowdown(ChartPoint(b0, (0.1, 2.0))), [0.1, 0.2])
    t, u = 0.3 - 0.2j, 1.5 + 0.5j
    p = ChartPoint(b0, (t, u))
    q = chart_transition(p, ChartId.blow(1))
    assert np.allclose(q.array, [t * u, 1 / u])
    assert chart_transition(p, b0) is p
    assert np.allclose(jacobian_holo(p), [[1, 0], [u, t]])
    assert np.linalg.matrix_rank(jacobian_holo(ChartPoint(b0, (0.0, u)))) == 1
    assert np.allclose(pullback_herm(np.diag([2.0, 3.0]).astype(complex), np.eye(2)), np.diag([2.0, 3.0]))
