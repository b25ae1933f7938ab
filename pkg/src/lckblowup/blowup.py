"""Blow-up of a coordinate polydisc at its centre.

Charts
------
``Base``
    the translated coordinates ``x = z - P`` of the polydisc; on the blow-up
    it covers everything off the exceptional divisor.
``Blow(j)``
    the affine chart ``y_j != 0`` of the incidence variety. Coordinates are
    ``(t, u_i for i != j)`` in increasing ``i``, with ``x_j = t`` and
    ``x_i = t * u_i``. The exceptional divisor is ``t = 0``.

Chart indices are 0-based. Hermitian matrices follow the convention of
:mod:`lckblowup.forms`, so a (1,1)-form pulls back as ``J^T H conj(J)``
with ``J`` the holomorphic Jacobian ``d(output)/d(input)``.
"""
from dataclasses import dataclass, field

import numpy as np

from .forms import HermJet
from .jets import ComplexJet2, ddbar, ddbar_derivative, seed_complex


class ChartDomainError(ValueError):
    pass


@dataclass(frozen=True)
class ChartId:
    kind: str
    index: int | None = None

    def __post_init__(self):
        if self.kind == "base":
            if self.index is not None:
                raise ValueError("the base chart has no index")
        elif self.kind == "blow":
            if self.index is None or self.index < 0:
                raise ValueError("blow charts need a non-negative index")
        else:
            raise ValueError(f"unknown chart kind {self.kind!r}")

    @classmethod
    def base(cls):
        return cls("base")

    @classmethod
    def blow(cls, j):
        return cls("blow", int(j))

    @property
    def is_blow(self):
        return self.kind == "blow"

    def __str__(self):
        return "base" if self.kind == "base" else f"blow{self.index}"

    @classmethod
    def parse(cls, s):
        if s == "base":
            return cls.base()
        if s.startswith("blow"):
            return cls.blow(int(s[4:]))
        raise ValueError(f"cannot parse chart id {s!r}")


@dataclass(frozen=True)
class ChartPoint:
    chart: ChartId
    coords: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(complex(c) for c in self.coords))
        if self.chart.is_blow and self.chart.index >= len(self.coords):
            raise ValueError(f"chart {self.chart} needs at least {self.chart.index + 1} coordinates")

    @property
    def n(self):
        return len(self.coords)

    @property
    def array(self):
        return np.array(self.coords, dtype=complex)

    @property
    def t(self):
        if not self.chart.is_blow:
            raise ChartDomainError("the base chart has no t coordinate")
        return self.coords[0]

    @property
    def on_exceptional(self):
        return self.chart.is_blow and self.coords[0] == 0

    def real(self):
        a = self.array
        out = np.empty(2 * a.shape[0])
        out[0::2] = a.real
        out[1::2] = a.imag
        return out

    def to_dict(self):
        return {"chart": str(self.chart),
                "coords": [[c.real, c.imag] for c in self.coords]}

    @classmethod
    def from_dict(cls, d):
        return cls(ChartId.parse(d["chart"]), tuple(complex(re, im) for re, im in d["coords"]))


def _u_full(chart, w):
    """Homogeneous ratios ``(u_1, ..., 1, ..., u_n)`` of a Blow(j) point."""
    j = chart.index
    u = list(w[1:])
    return u[:j] + [1.0] + u[j:]


def blowdown_coords(chart, w):
    """Base coordinates from chart coordinates (numbers or complex jets)."""
    if not chart.is_blow:
        return list(w)
    t = w[0]
    return [t if i == chart.index else t * ui
            for i, ui in enumerate(_u_full(chart, w))]


def blowdown(p):
    """The blow-down map ``c`` on a chart point, as base coordinates."""
    return np.array(blowdown_coords(p.chart, list(p.coords)), dtype=complex)


def lift(x, j):
    """Base point ``x`` (with ``x_j != 0``) in the chart ``Blow(j)``."""
    x = np.asarray(x, dtype=complex)
    if x[j] == 0:
        raise ChartDomainError(f"x_{j} vanishes; point is not in Blow({j}) off E")
    t = x[j]
    u = [x[i] / t for i in range(x.shape[0]) if i != j]
    return ChartPoint(ChartId.blow(j), (t, *u))


def best_chart(x):
    """Lift into the blow chart of the largest coordinate (so all ``|u_i| <= 1``)."""
    x = np.asarray(x, dtype=complex)
    return lift(x, int(np.argmax(np.abs(x))))


def chart_transition(p, target):
    """Re-express ``p`` in the chart ``target``."""
    if p.chart == target:
        return p
    if not target.is_blow:
        if p.on_exceptional:
            raise ChartDomainError("points of E are not in the base chart")
        return ChartPoint(target, tuple(blowdown(p)))
    k = target.index
    if not p.chart.is_blow:
        if p.coords[k] == 0:
            raise ChartDomainError(f"x_{k} vanishes; cannot move to Blow({k})")
        return lift(p.array, k)
    u = _u_full(p.chart, list(p.coords))
    if u[k] == 0:
        raise ChartDomainError(f"ratio u_{k} vanishes; cannot move to Blow({k})")
    t_new = p.coords[0] * u[k]
    u_new = [u[i] / u[k] for i in range(p.n) if i != k]
    return ChartPoint(target, (t_new, *u_new))


def _chart_slot(chart, i):
    # position in Blow(chart) coordinates holding u_i (i != chart.index)
    return 1 + (i if i < chart.index else i - 1)


def jacobian_holo(p, target=None):
    """Holomorphic Jacobian ``d(output)/d(input)`` at ``p``.

    ``target=None`` is the blow-down map; a :class:`ChartId` is the chart
    transition into it. Rows index outputs, columns chart coordinates.
    """
    n = p.n
    w = p.array
    if target is None:
        if not p.chart.is_blow:
            return np.eye(n, dtype=complex)
        j = p.chart.index
        J = np.zeros((n, n), dtype=complex)
        J[:, 0] = _u_full(p.chart, list(w))
        for i in range(n):
            if i != j:
                J[i, _chart_slot(p.chart, i)] = w[0]
        return J
    if target == p.chart:
        return np.eye(n, dtype=complex)
    if not target.is_blow:
        return jacobian_holo(p)
    if not p.chart.is_blow:
        # inverse of the blow-down Jacobian at the lifted point
        q = chart_transition(p, target)
        return np.linalg.inv(jacobian_holo(q))
    k = target.index
    u = _u_full(p.chart, list(w))
    if u[k] == 0:
        raise ChartDomainError(f"ratio u_{k} vanishes; cannot move to Blow({k})")
    t = w[0]
    sk = _chart_slot(p.chart, k)  # input slot of u_k
    J = np.zeros((n, n), dtype=complex)
    J[0, 0] = u[k]
    J[0, sk] = t
    for i in range(n):
        if i == k:
            continue
        row = _chart_slot(target, i)
        if i != p.chart.index:
            J[row, _chart_slot(p.chart, i)] = 1.0 / u[k]
        J[row, sk] += -u[i] / u[k] ** 2
    return J


def jacobian_by_jets(fn, p):
    """Holomorphic Jacobian of ``fn`` (complex jets -> complex jets) by forward jets."""
    w = seed_complex(p.array)
    out = fn(w)
    n_out, n_in = len(out), p.n
    J = np.zeros((n_out, n_in), dtype=complex)
    for a, o in enumerate(out):
        if not isinstance(o, ComplexJet2):
            continue
        gr, gi = o.re.grad, o.im.grad
        for k in range(n_in):
            # d/dz_k = (d/dx_k - i d/dy_k) / 2 applied to re + i im
            J[a, k] = 0.5 * ((gr[2 * k] + gi[2 * k + 1]) + 1j * (gi[2 * k] - gr[2 * k + 1]))
    return J


def transition_coords(p_chart, target, w):
    """Chart transition on coordinate jets (used as the jet oracle)."""
    if not target.is_blow:
        return blowdown_coords(p_chart, w)
    k = target.index
    if not p_chart.is_blow:
        return [w[k]] + [w[i] / w[k] for i in range(len(w)) if i != k]
    u = _u_full(p_chart, w)
    return [w[0] * u[k]] + [u[i] / u[k] for i in range(len(w)) if i != k]


def pullback_herm(H, Jc):
    return Jc.T @ H @ Jc.conj()


def real_jacobian(Jc):
    """Real ``2n x 2n`` Jacobian (interleaved) of a holomorphic map."""
    n_out, n_in = Jc.shape
    R = np.zeros((2 * n_out, 2 * n_in))
    R[0::2, 0::2] = Jc.real
    R[0::2, 1::2] = -Jc.imag
    R[1::2, 0::2] = Jc.imag
    R[1::2, 1::2] = Jc.real
    return R


def pullback_oneform(xi, Jc):
    return real_jacobian(Jc).T @ np.asarray(xi, dtype=float)


def fubini_study(u):
    """Coefficient matrix of ``i ddbar log(1 + |u|^2)`` in an affine chart."""
    u = np.asarray(u, dtype=complex)
    s = 1.0 + float(np.vdot(u, u).real)
    return (s * np.eye(u.shape[0]) - np.outer(u.conj(), u)) / s ** 2


def fubini_study_jet(u):
    """Fubini-Study matrix with its derivatives, through third-order jets."""
    uj = seed_complex(u, order=3)
    pot = 1.0 + sum((c.abs2() for c in uj[1:]), uj[0].abs2())
    phi = pot.log()
    return HermJet(ddbar(phi), ddbar_derivative(phi))


def projection_jacobian(p):
    """Affine chart coordinates of ``pi'(p)`` and the holomorphic Jacobian of ``pi'``.

    Blow charts project to the affine chart of the same index; base points
    use the chart of their largest coordinate.
    """
    n = p.n
    if p.chart.is_blow:
        J = np.zeros((n - 1, n), dtype=complex)
        J[:, 1:] = np.eye(n - 1)
        return p.array[1:], J
    x = p.array
    j = int(np.argmax(np.abs(x)))
    if x[j] == 0:
        raise ChartDomainError("the origin has no direction")
    others = [i for i in range(n) if i != j]
    u = x[others] / x[j]
    J = np.zeros((n - 1, n), dtype=complex)
    for r, i in enumerate(others):
        J[r, i] = 1.0 / x[j]
        J[r, j] = -x[i] / x[j] ** 2
    return u, J


def pullback_fubini_study(p):
    """``pi'^* omega_FS`` at ``p`` from the closed form and the projection Jacobian."""
    u, J = projection_jacobian(p)
    return pullback_herm(fubini_study(u), J)


def exceptional_tangent(p):
    """Basis (rows, complex chart vectors) of the tangent space of E at ``p``."""
    if not p.on_exceptional:
        raise ChartDomainError(f"{p} is not on the exceptional divisor")
    n = p.n
    basis = np.zeros((n - 1, n), dtype=complex)
    basis[:, 1:] = np.eye(n - 1)
    return basis


@dataclass(frozen=True)
class Region:
    """Open polydisc of polyradius ``radius`` about ``center`` (ambient coordinates).

    Membership of blow-chart points is decided through the blow-down, so the
    exceptional divisor lies in every such region.
    """

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(complex(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError("polydisc radius must be positive")

    @property
    def n(self):
        return len(self.center)

    def shrink(self, radius):
        if not 0 < radius < self.radius:
            raise ValueError(f"radius {radius} does not give a strict sub-polydisc")
        return Region(self.center, radius)

    def sup_radius(self, p):
        """``max_i |x_i|`` of the base image of a chart point."""
        return float(np.max(np.abs(blowdown(p))))

    def contains(self, p):
        return self.sup_radius(p) < self.radius

    def ambient(self, p):
        """Ambient coordinates ``z = P + c(p)``."""
        return np.array(self.center, dtype=complex) + blowdown(p)
