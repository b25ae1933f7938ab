"""The blow-up construction for l.c.K. metrics, evaluated pointwise.

Pipeline: base l.c.K. data ``(omega, theta)`` on an annulus -> conformal
gauge ``omega' = e^f c^*omega`` whose Lee form ``theta' = c^*theta + df``
vanishes near E -> candidate ``N omega' - Omega_E`` -> search for ``N`` ->
verification report.

The gauge is ``f = chi * (G(P) - G o c)`` with ``G`` a Lee potential
(``dG = theta``) and ``chi`` a polydisc cutoff equal to 1 on ``U_{3 eps}``
and 0 outside ``U_{4 eps}``, so ``theta'`` vanishes on ``U_{3 eps}`` while
``Omega_E`` lives in ``U_{2 eps}``.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .blowup import ChartId, ChartPoint, Region, best_chart, blowdown_coords, exceptional_tangent
from .bundle import INNER, CurvatureField, PolydiscCutoff
from .forms import FormJet, HermitianField, HermJet, OneFormField, exterior_d, hermitian_pairing, lck_residual
from .jets import Jet2, JetDomainError, seed_complex

STRATA = ("exceptional", "near_exceptional", "bump_transition", "gauge_annulus", "far")


class DomainExitError(ValueError):
    def __init__(self, message, exit_parameter):
        super().__init__(message)
        self.exit_parameter = exit_parameter


class GaugeError(ValueError):
    pass


# --------------------------------------------------------------------------
# base data


@dataclass(frozen=True)
class LCKData:
    """l.c.K. data on the annulus ``r < |z| < R`` of C^n.

    ``omega_fn(z)`` maps complex coordinate jets to a :class:`HermJet`,
    ``theta_fn(z)`` to the 2n real jet components of the Lee form and the
    optional ``potential_fn(z)`` to a jet ``G`` with ``dG = theta``.
    """

    n: int
    r: float
    R: float
    omega_fn: object
    theta_fn: object
    potential_fn: object = None
    name: str = ""

    def contains(self, z):
        rad = float(np.linalg.norm(np.asarray(z, dtype=complex)))
        return self.r < rad < self.R

    def omega(self, z):
        return self.omega_fn(seed_complex(z)).value

    def theta(self, z):
        return np.array([c.value for c in self.theta_fn(seed_complex(z))])

    def potential(self, z):
        if self.potential_fn is None:
            raise ValueError("no analytic Lee potential")
        return self.potential_fn(seed_complex(z)).value

    def lee_residual(self, z):
        """``d omega - theta ^ omega`` at an ambient point."""
        zj = seed_complex(z)
        theta = np.array([c.value for c in self.theta_fn(zj)])
        return lck_residual(self.omega_fn(zj), theta)

    def lee_closedness(self, z):
        return exterior_d(FormJet.from_jets(1, self.theta_fn(seed_complex(z))))


def _abs2_sum(z):
    return sum((c.abs2() for c in z[1:]), z[0].abs2())


def hopf_annulus(n, r, R):
    """``omega = omega_euclid / |z|^2`` with ``theta = -d log |z|^2``, ``G = -log |z|^2``."""
    if not (0 < r < R):
        raise ValueError(f"need 0 < r < R, got r={r}, R={R}")

    def omega_fn(z):
        s = _abs2_sum(z).reciprocal()
        eye = np.eye(len(z))
        return HermJet(s.value * eye + 0j, s.grad[:, None, None] * eye + 0j)

    def theta_fn(z):
        inv = _abs2_sum(z).reciprocal()
        out = []
        for c in z:
            out.append(-2.0 * (c.re * inv))
            out.append(-2.0 * (c.im * inv))
        return out

    def potential_fn(z):
        return -_abs2_sum(z).log()

    return LCKData(n, float(r), float(R), omega_fn, theta_fn, potential_fn, name="hopf")


def _segment_exit(data, base, target):
    """Smallest parameter in [0, 1] where the segment leaves the annulus, or None."""
    d = target - base
    a = float(np.vdot(d, d).real)
    b = 2.0 * float(np.vdot(base, d).real)
    hits = []
    for rad in (data.r, data.R):
        c = float(np.vdot(base, base).real) - rad * rad
        if a == 0:
            if c == 0:
                hits.append(0.0)
            continue
        disc = b * b - 4 * a * c
        if disc < 0:
            continue
        sq = math.sqrt(disc)
        hits.extend(s for s in ((-b - sq) / (2 * a), (-b + sq) / (2 * a)) if 0.0 <= s <= 1.0)
    return min(hits) if hits else None


def lee_potential_quadrature(data, base, target, epsabs=1e-12):
    """Integral of ``theta`` along the straight segment from ``base`` to ``target``."""
    base = np.asarray(base, dtype=complex)
    target = np.asarray(target, dtype=complex)
    s_exit = _segment_exit(data, base, target)
    if s_exit is not None or not data.contains(base):
        s_exit = 0.0 if s_exit is None else s_exit
        raise DomainExitError(f"segment leaves the annulus at parameter s={s_exit:.6g}", s_exit)
    d = target - base
    if not np.any(d):
        return 0.0
    dr = np.empty(2 * d.shape[0])
    dr[0::2], dr[1::2] = d.real, d.imag

    def integrand(s):
        return float(data.theta(base + s * d) @ dr)

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=1e-13, limit=200)
    return val


def max_polyradius(data, center):
    """Polyradius of the largest polydisc about ``center`` whose closure's
    enclosing ball stays in the annulus."""
    rad = float(np.linalg.norm(np.asarray(center, dtype=complex)))
    return min(rad - data.r, data.R - rad) / math.sqrt(len(center))


# --------------------------------------------------------------------------
# gauge


@dataclass(frozen=True)
class GaugeSample:
    omega_prime: HermJet
    theta_prime: FormJet
    f: Jet2
    chi_plateau: bool


def _coordinate_jacobians(x):
    """Holomorphic Jacobian of base coordinate jets, its derivatives, and the real versions."""
    n = len(x)
    m = x[0].re.dim
    J = np.empty((n, n), dtype=complex)
    dJ = np.empty((m, n, n), dtype=complex)
    for a, xa in enumerate(x):
        J[a] = xa.re.grad[0::2] + 1j * xa.im.grad[0::2]
        dJ[:, a, :] = xa.re.hess[:, 0::2] + 1j * xa.im.hess[:, 0::2]
    R = np.empty((2 * n, m))
    dR = np.empty((2 * n, m, m))
    for a, xa in enumerate(x):
        R[2 * a], R[2 * a + 1] = xa.re.grad, xa.im.grad
        dR[2 * a], dR[2 * a + 1] = xa.re.hess, xa.im.hess
    return J, dJ, R, dR


def _pullback_herm_jet(H, J, dJ):
    """``J^T H conj(J)`` with derivatives, ``H`` a :class:`HermJet`."""
    Jc = J.conj()
    value = J.T @ H.value @ Jc
    deriv = (np.einsum("lak,ab,bm->lkm", dJ, H.value, Jc)
             + np.einsum("ak,lab,bm->lkm", J, H.deriv, Jc)
             + np.einsum("ak,ab,lbm->lkm", J, H.value, dJ.conj()))
    return HermJet(value, deriv)


def _pullback_covector_jet(theta, R, dR):
    """``R^T theta`` with derivatives, ``theta`` a list of real jets."""
    tv = np.array([c.value for c in theta])
    tg = np.array([c.grad for c in theta])  # (2n, m)
    coeffs = R.T @ tv
    deriv = tg.T @ R + np.einsum("i,ilk->lk", tv, dR)
    return coeffs, deriv


@dataclass(frozen=True)
class GaugeData:
    data: LCKData
    region: Region
    eps: float
    chi: PolydiscCutoff
    potential_at_center: float
    potential: str

    @property
    def center(self):
        return np.array(self.region.center, dtype=complex)

    def _potential_jet(self, z, theta_pull):
        if self.potential == "analytic":
            return self.data.potential_fn(z)
        zval = np.array([c.value for c in z])
        value = lee_potential_quadrature(self.data, self.center, zval)
        coeffs, deriv = theta_pull
        return Jet2(value, coeffs.copy(), 0.5 * (deriv + deriv.T))

    def evaluate(self, p):
        """``omega'``, ``theta'`` and ``f`` at a chart point, with first derivatives."""
        try:
            w = seed_complex(p.array)
            x = blowdown_coords(p.chart, w)
            z = [xa + c for xa, c in zip(x, self.region.center)]
            J, dJ, R, dR = _coordinate_jacobians(x)
            pull_theta = _pullback_covector_jet(self.data.theta_fn(z), R, dR)
            G = self._potential_jet(z, pull_theta)
            chi = self.chi.jet(x)
            f = chi * (self.potential_at_center - G)
            cw = _pullback_herm_jet(self.data.omega_fn(z), J, dJ)
            ef = math.exp(f.value)
            omega_p = HermJet(ef * cw.value,
                              ef * (f.grad[:, None, None] * cw.value + cw.deriv))
            coeffs, deriv = pull_theta
            theta_p = FormJet(1, coeffs + f.grad, deriv + f.hess)
        except JetDomainError as err:
            err.point = p
            raise
        plateau = self.chi.regime([xa.value for xa in x]) == INNER
        return GaugeSample(omega_p, theta_p, f, plateau)

    @property
    def omega_prime(self):
        return HermitianField(lambda p: self.evaluate(p).omega_prime)

    @property
    def theta_prime(self):
        return OneFormField(lambda p: self.evaluate(p).theta_prime)


def build_gauge(data, P, eps, polyradius=None, chi_radii=(3.0, 4.0), potential="auto"):
    """Conformal gauge about the blow-up centre ``P`` (ambient coordinates).

    ``chi_radii`` are the plateau and support radii of the cutoff in units
    of ``eps``. ``potential`` is ``"analytic"``, ``"quadrature"`` or
    ``"auto"`` (analytic when ``data`` has one).
    """
    P = np.asarray(P, dtype=complex)
    if P.shape != (data.n,):
        raise GaugeError(f"centre must have {data.n} coordinates")
    if not data.contains(P):
        raise GaugeError("blow-up centre lies outside the annulus")
    limit = max_polyradius(data, P)
    polyradius = limit if polyradius is None else float(polyradius)
    if polyradius > limit:
        raise GaugeError(f"polydisc of radius {polyradius} leaves the annulus (max {limit:.6g})")
    inner, outer = (float(c) * eps for c in chi_radii)
    if not (eps > 0 and outer < polyradius):
        raise GaugeError(f"region nesting violated: U_{outer:.6g} not inside U (radius {polyradius:.6g})")
    if potential == "auto":
        potential = "analytic" if data.potential_fn is not None else "quadrature"
    if potential == "analytic":
        if data.potential_fn is None:
            raise GaugeError("data has no analytic Lee potential")
        g_center = data.potential(P)
    elif potential == "quadrature":
        g_center = 0.0
    else:
        raise GaugeError(f"unknown potential mode {potential!r}")
    return GaugeData(data, Region(tuple(P), polyradius), float(eps),
                     PolydiscCutoff(inner, outer), g_center, potential)


# --------------------------------------------------------------------------
# candidate form and N search


@dataclass(frozen=True)
class CandidateForm:
    N: int
    gauge: GaugeData
    curv: CurvatureField

    def __call__(self, p):
        return self.N * self.gauge.evaluate(p).omega_prime.value - self.curv(p)

    def jet(self, p):
        return self.N * self.gauge.evaluate(p).omega_prime - self.curv.jet(p)

    @property
    def field(self):
        return HermitianField(self.jet, self)


def candidate(gauge, curv, N):
    if int(N) != N or N < 0:
        raise ValueError(f"N must be a non-negative integer, got {N}")
    return CandidateForm(int(N), gauge, curv)


@dataclass(frozen=True)
class Sample:
    point: ChartPoint
    stratum: str

    def to_dict(self):
        return {"stratum": self.stratum, **self.point.to_dict()}


def _disc(rng, radius, size):
    r = radius * np.sqrt(rng.uniform(size=size))
    return r * np.exp(2j * np.pi * rng.uniform(size=size))


def _ball(rng, radius, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return v * radius * rng.uniform() ** (1.0 / (2 * dim))


def _shell_point(rng, n, lo, hi):
    m = rng.uniform(lo, hi)
    x = _disc(rng, m, n)
    j = rng.integers(n)
    x[j] = m * np.exp(2j * np.pi * rng.uniform())
    return x


def stratified_samples(region, eps, per_stratum=200, seed=0, u_radius=4.0):
    """Deterministic samples covering E, its neighbourhood and every transition zone."""
    rng = np.random.default_rng(seed)
    n = region.n
    out = []
    for i in range(per_stratum):
        j = i % n
        out.append(Sample(ChartPoint(ChartId.blow(j), (0.0, *_ball(rng, u_radius, n - 1))), "exceptional"))
    lo, hi = math.log(1e-6), math.log(eps / 4.0)
    for i in range(per_stratum):
        j = i % n
        t = math.exp(rng.uniform(lo, hi)) * np.exp(2j * np.pi * rng.uniform())
        out.append(Sample(ChartPoint(ChartId.blow(j), (t, *_ball(rng, u_radius, n - 1))),
                          "near_exceptional"))
    for name, lo_r, hi_r in (("bump_transition", eps, 2 * eps), ("gauge_annulus", 2 * eps, 4 * eps)):
        for _ in range(per_stratum):
            out.append(Sample(best_chart(_shell_point(rng, n, lo_r, hi_r)), name))
    for _ in range(per_stratum):
        x = _shell_point(rng, n, 4 * eps, 0.98 * region.radius)
        out.append(Sample(ChartPoint(ChartId.base(), tuple(x)), "far"))
    return out


@dataclass(frozen=True)
class SampleEval:
    sample: Sample
    gauge: GaugeSample
    curvature: HermJet
    sup_radius: float


def evaluate_samples(gauge, curv, samples):
    out = []
    for s in samples:
        out.append(SampleEval(s, gauge.evaluate(s.point), curv.jet(s.point),
                              gauge.region.sup_radius(s.point)))
    return out


@dataclass(frozen=True)
class NSearchResult:
    N: int | None
    witness: Sample | None
    min_ratio: float
    pointwise_max: int | None
    monotone_checked: bool

    @property
    def found(self):
        return self.N is not None


def _margins(evals, N, delta):
    A = np.stack([e.gauge.omega_prime.value for e in evals])
    B = np.stack([e.curvature.value for e in evals])
    H = N * A - B
    lam = np.linalg.eigvalsh(0.5 * (H + np.conj(np.swapaxes(H, 1, 2))))[:, 0]
    tr = N * np.real(np.trace(A, axis1=1, axis2=2))
    return lam, tr, lam - delta * tr


def find_N(gauge, curv, samples, delta=1e-8, max_exponent=30, evaluations=None):
    """Smallest power of two ``N <= 2**max_exponent`` making the candidate positive.

    Positive means ``lambda_min(N omega' - Omega_E) > delta * tr(N omega')`` at
    every sample.
    """
    evals = evaluate_samples(gauge, curv, samples) if evaluations is None else evaluations
    first_ok = np.full(len(evals), -1)
    found = None
    for k in range(max_exponent + 1):
        lam, tr, margin = _margins(evals, 2 ** k, delta)
        ok = margin > 0
        first_ok[(first_ok < 0) & ok] = k
        if found is None and ok.all():
            found = k
            break
    N = None if found is None else 2 ** found
    probe = N if N is not None else 2 ** max_exponent
    lam, tr, margin = _margins(evals, probe, delta)
    ratio = lam / np.where(tr > 0, tr, 1.0)
    worst = int(np.argmin(ratio))
    pointwise = int(2 ** first_ok.max()) if (first_ok >= 0).all() else None
    monotone = False
    if N is not None:
        monotone = bool((_margins(evals, 2 * N, delta)[0] > 0).all())
    return NSearchResult(N, evals[worst].sample, float(ratio[worst]), pointwise, monotone)


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Tolerances:
    analytic: float = 1e-10
    glued: float = 1e-8
    delta: float = 1e-8
    support: float = 1e-12
    vanish: float = 1e-12
    curvature_support: float = 1e-12
    semidefinite: float = 1e-10


@dataclass
class Check:
    name: str
    tolerance: float
    worst_value: float
    worst_sample: dict | None
    passed: bool
    relation: str = "<"

    @property
    def status(self):
        return "pass" if self.passed else "fail"

    def to_dict(self):
        return {"name": self.name, "relation": self.relation, "tolerance": self.tolerance,
                "worstValue": self.worst_value, "worstSamplePoint": self.worst_sample,
                "status": self.status}

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], d["tolerance"], d["worstValue"], d["worstSamplePoint"],
                   d["status"] == "pass", d["relation"])


def _upper_check(name, tol, values, samples, strict=True):
    """Check that every value stays below ``tol``; empty selections pass."""
    if not values:
        return Check(name, tol, 0.0, None, True, "<" if strict else "<=")
    i = int(np.argmax(values))
    v = float(values[i])
    ok = v < tol if strict else v <= tol
    return Check(name, tol, v, samples[i].to_dict(), ok, "<" if strict else "<=")


def _lower_check(name, tol, values, samples):
    if not values:
        return Check(name, tol, 0.0, None, True, ">")
    i = int(np.argmin(values))
    v = float(values[i])
    return Check(name, tol, v, samples[i].to_dict(), v > tol, ">")


def degenerate_direction_margin(ev):
    """At an E-sample: min of ``-Omega_E`` on T(E) and ``omega'`` on its orthogonal complement."""
    p = ev.sample.point
    T = exceptional_tangent(p)
    neg_curv = -(T @ ev.curvature.value @ T.conj().T)
    tangent = float(np.linalg.eigvalsh(0.5 * (neg_curv + neg_curv.conj().T))[0])
    normal = np.zeros(p.n, dtype=complex)
    normal[0] = 1.0
    transverse = hermitian_pairing(ev.gauge.omega_prime.value, normal)
    return min(tangent, transverse)


def verify(cand, gauge, curv, samples, tol=Tolerances(), evaluations=None):
    """Run every pointwise check on ``N omega' - Omega_E``; failures are report entries."""
    evals = evaluate_samples(gauge, curv, samples) if evaluations is None else evaluations
    N = cand.N
    smp = [e.sample for e in evals]
    lam, tr, margin = _margins(evals, N, tol.delta)
    # reported as lambda_min / tr(N omega'); where the trace vanishes (N = 0) the
    # bare eigenvalue stands in, since the margin then is lambda_min itself
    ratio = np.where(tr > 0, lam / np.where(tr > 0, tr, 1.0), lam)
    failing = margin <= 0
    worst = int(np.argmin(np.where(failing, ratio, np.inf))) if failing.any() else int(np.argmin(ratio))
    checks = [Check("positivity", tol.delta, float(ratio[worst]), smp[worst].to_dict(),
                    bool((margin > 0).all()), ">")]

    lck, gauge_id, closed, overlap, curv_closed = [], [], [], [], []
    for e in evals:
        om = e.gauge.omega_prime
        th = e.gauge.theta_prime
        h = N * om - e.curvature
        lck.append(lck_residual(h, th).sup_norm())
        gauge_id.append(lck_residual(om, th).sup_norm())
        closed.append(exterior_d(th).sup_norm())
        overlap.append(float(np.max(np.abs(th.coeffs))) * float(np.max(np.abs(e.curvature.value))))
        curv_closed.append(exterior_d(e.curvature.to_form_jet()).sup_norm())
    checks.append(_upper_check("lck_residual", tol.glued, lck, smp))
    checks.append(_upper_check("lee_closed", tol.analytic, closed, smp))
    checks.append(_upper_check("support_disjoint", tol.support, overlap, smp, strict=False))
    checks.append(_upper_check("gauge_identity", tol.glued, gauge_id, smp))
    checks.append(_upper_check("curvature_closed", tol.glued, curv_closed, smp))

    near = [(float(np.max(np.abs(e.gauge.theta_prime.coeffs))), e.sample) for e in evals
            if e.sup_radius < 3.0 * gauge.eps]
    checks.append(_upper_check("gauge_vanishing", tol.vanish, [v for v, _ in near], [s for _, s in near]))
    outside = [(float(np.max(np.abs(e.curvature.value))), e.sample) for e in evals
               if e.sup_radius >= 2.0 * gauge.eps]
    checks.append(_upper_check("curvature_support", tol.curvature_support,
                               [v for v, _ in outside], [s for _, s in outside]))
    on_e = [e for e in evals if e.sample.point.on_exceptional]
    semi = [float(np.linalg.eigvalsh(e.curvature.value)[-1]) for e in on_e]
    checks.append(_upper_check("curvature_semidefinite_on_E", tol.semidefinite, semi,
                               [e.sample for e in on_e], strict=False))
    degen = [degenerate_direction_margin(e) for e in on_e]
    checks.append(_lower_check("degenerate_directions", 0.0, degen, [e.sample for e in on_e]))

    counts = {name: 0 for name in STRATA}
    for s in smp:
        counts[s.stratum] = counts.get(s.stratum, 0) + 1
    return VerificationReport(
        n=gauge.data.n, eps=gauge.eps, N=N, strata=counts,
        min_eigenvalue=float(lam.min()), max_lck_residual=float(max(lck)),
        max_lee_closed=float(max(closed)), max_support_overlap=float(max(overlap)),
        checks=checks)


SCHEMA_VERSION = "lckblowup.report/1"


@dataclass
class VerificationReport:
    n: int
    eps: float
    N: int | None
    strata: dict
    min_eigenvalue: float
    max_lck_residual: float
    max_lee_closed: float
    max_support_overlap: float
    checks: list
    config: dict = field(default_factory=dict)
    n_search: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "schemaVersion": SCHEMA_VERSION,
            "config": self.config,
            "n": self.n, "eps": self.eps, "N": self.N,
            "strata": self.strata,
            "summary": {
                "minEigenvalue": self.min_eigenvalue,
                "maxLckResidual": self.max_lck_residual,
                "maxLeeClosed": self.max_lee_closed,
                "maxSupportOverlap": self.max_support_overlap,
                "passed": self.passed,
            },
            "nSearch": self.n_search,
            "checks": [c.to_dict() for c in self.checks],
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schemaVersion") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schemaVersion')!r}")
        s = d["summary"]
        return cls(d["n"], d["eps"], d["N"], d["strata"], s["minEigenvalue"],
                   s["maxLckResidual"], s["maxLeeClosed"], s["maxSupportOverlap"],
                   [Check.from_dict(c) for c in d["checks"]], d["config"],
                   d["nSearch"], d["meta"])
