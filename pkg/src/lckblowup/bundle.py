"""Hermitian metric on O(E) glued from the tautological and trivial metrics.

In ``Blow(j)`` the frame is ``sigma_j = s_E / t`` where ``s_E`` is the
tautological section ``(x, [y]) -> x``. With ``h'(s_E, s_E) = |x|^2`` and
``h''(s_E, s_E) = 1`` the glued metric ``h = rho1 h' + rho2 h''`` gives::

    h(sigma_j, sigma_j) = rho1 * (1 + sum |u_i|^2) + rho2 / |t|^2

and the weight ``phi_j = -log h(sigma_j, sigma_j)``. On the base chart the
frame is ``s_E`` itself. Frames are related by ``sigma_j = u_k sigma_k``
(``u_k`` read in chart ``j``), so ``phi_j - phi_k = -log |u_k|^2``.

The curvature is ``Omega_E = -i ddbar log h = i ddbar phi``: its coefficient
matrix is ``ddbar(phi)``, which equals ``-omega_FS`` pulled back by the
projection wherever ``rho1 == 1``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .blowup import _u_full, blowdown_coords
from .forms import HermitianField, HermJet
from .jets import ComplexJet2, Jet2, JetDomainError, ddbar, ddbar_derivative, seed_complex

INNER, TRANSITION, OUTER = "inner", "transition", "outer"


class BumpError(ValueError):
    pass


def _psi(s):
    # exp(-1/s) for s > 0
    return (-(1.0 / s)).exp() if isinstance(s, Jet2) else math.exp(-1.0 / s)


def smooth_step(s):
    """C-infinity step: 0 for ``s <= 0``, 1 for ``s >= 1``.

    Accepts a float or a :class:`Jet2`; outside ``(0, 1)`` a jet argument
    yields a constant jet of matching order.
    """
    v = s.value if isinstance(s, Jet2) else s
    if v <= 0.0 or v >= 1.0:
        c = 0.0 if v <= 0.0 else 1.0
        return Jet2.constant(c, s.dim, s.order) if isinstance(s, Jet2) else c
    a = _psi(s)
    b = _psi(1.0 - s)
    return a / (a + b)


@dataclass(frozen=True)
class PolydiscCutoff:
    """``prod_i step((outer - |x_i|) / (outer - inner))``.

    Identically 1 where every ``|x_i| <= inner`` and identically 0 once some
    ``|x_i| >= outer``.
    """

    inner: float
    outer: float

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise BumpError(f"need 0 < inner < outer, got {self.inner}, {self.outer}")

    def regime(self, x):
        r = np.abs(np.asarray(x, dtype=complex))
        if np.all(r <= self.inner):
            return INNER
        if np.any(r >= self.outer):
            return OUTER
        return TRANSITION

    def value(self, x):
        out = 1.0
        width = self.outer - self.inner
        for xi in np.asarray(x, dtype=complex):
            out *= smooth_step((self.outer - abs(xi)) / width)
        return out

    def jet(self, x):
        """Cutoff as a jet; ``x`` is a list of :class:`ComplexJet2` base coordinates."""
        m, order = x[0].re.dim, x[0].re.order
        width = self.outer - self.inner
        out = None
        for xi in x:
            r = abs(xi.value)
            if r <= self.inner:
                continue
            if r >= self.outer:
                return Jet2.constant(0.0, m, order)
            factor = smooth_step((self.outer - xi.abs2().sqrt()) * (1.0 / width))
            out = factor if out is None else out * factor
        return Jet2.constant(1.0, m, order) if out is None else out


@dataclass(frozen=True)
class BumpPair:
    """``rho1 = 1`` on ``U_eps``, ``0`` outside ``U_2eps``; ``rho2 = 1 - rho1``."""

    eps: float

    @property
    def cutoff(self):
        return PolydiscCutoff(self.eps, 2.0 * self.eps)

    def rho1(self, x):
        if isinstance(x[0], ComplexJet2):
            return self.cutoff.jet(x)
        return self.cutoff.value(x)

    def rho2(self, x):
        return 1.0 - self.rho1(x)

    def regime(self, x):
        return self.cutoff.regime(x)


def make_bump(eps, polyradius):
    if not (eps > 0 and 2.0 * eps < polyradius):
        raise BumpError(f"need 0 < 2*eps < polyradius, got eps={eps}, polyradius={polyradius}")
    return BumpPair(float(eps))


def weight_from_jets(bump, chart, w):
    """Weight ``phi_chart`` from chart-coordinate jets ``w``."""
    x = blowdown_coords(chart, w)
    regime = bump.regime([xi.value for xi in x])
    m, order = w[0].re.dim, w[0].re.order
    if chart.is_blow:
        t = w[0]
        if regime == INNER:
            # rho2 vanishes identically: phi = -log(1 + |u|^2)
            u = _u_full(chart, w)
            s = sum((ui.abs2() for i, ui in enumerate(u) if i != chart.index),
                    Jet2.constant(1.0, m, order))
            return -s.log()
        if t.value == 0:
            raise AssertionError("rho2 != 0 on the exceptional divisor; eps too large")
        if regime == OUTER:
            return t.abs2().log()
        u = _u_full(chart, w)
        s = sum((ui.abs2() for i, ui in enumerate(u) if i != chart.index),
                Jet2.constant(1.0, m, order))
        rho1 = bump.rho1(x)
        h = rho1 * s + (1.0 - rho1) / t.abs2()
        return -h.log()
    if all(xi.value == 0 for xi in x):
        raise JetDomainError("the base chart does not contain the exceptional divisor")
    if regime == OUTER:
        return Jet2.constant(0.0, m, order)
    r2 = sum((xi.abs2() for xi in x[1:]), x[0].abs2())
    if regime == INNER:
        return -r2.log()
    rho1 = bump.rho1(x)
    return -(rho1 * r2 + (1.0 - rho1)).log()


def glued_weight(bump, p, order=3):
    """``phi = -log h(sigma, sigma)`` at the chart point ``p`` as a jet."""
    try:
        return weight_from_jets(bump, p.chart, seed_complex(p.array, order))
    except JetDomainError as err:
        err.point = p
        raise


def frame_transition(p, k):
    """``g`` with ``sigma_chart(p) = g * sigma_k``: ``u_k`` in blow charts, ``x_k`` in the base chart."""
    if p.chart.is_blow:
        return _u_full(p.chart, list(p.coords))[k]
    return p.coords[k]


class CurvatureField(HermitianField):
    """Curvature ``Omega_E`` of the glued metric, chart point -> ``ddbar(phi)``."""

    def __init__(self, bump):
        self.bump = bump
        super().__init__(self._jet, self._value)

    def _value(self, p):
        return ddbar(glued_weight(self.bump, p, order=2))

    def _jet(self, p):
        phi = glued_weight(self.bump, p, order=3)
        return HermJet(ddbar(phi), ddbar_derivative(phi))


def curvature(bump):
    return CurvatureField(bump)
