"""Self-test suites: jets against finite differences, d^2 = 0, atlas
round-trips and Fubini-Study positivity.

Each suite returns a :class:`SuiteResult`; the CLI ``selftest`` command
runs all of them.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import finite_diff
from .blowup import ChartId, ChartPoint, blowdown, chart_transition, fubini_study, fubini_study_jet, lift
from .bundle import glued_weight, make_bump
from .forms import d_of_jets, exterior_d
from .jets import Jet2, seed

_UNARY = ("exp", "log", "sqrt")
_BINARY = ("add", "sub", "mul", "div")


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    worst: float
    tolerance: float

    @property
    def passed(self):
        return self.worst < self.tolerance

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, worst {self.worst:.3e} (tol {self.tolerance:.0e})"


# --------------------------------------------------------------------------
# random expression corpus


def random_expression(rng, n_vars, depth):
    """Random expression tree of at most ``depth`` levels, smooth on all of R^m."""
    if depth <= 1 or rng.uniform() < 0.15:
        if rng.uniform() < 0.8:
            return ("x", int(rng.integers(n_vars)))
        return ("c", float(np.round(rng.uniform(-2, 2), 3)))
    if rng.uniform() < 0.35:
        return (str(rng.choice(_UNARY)), random_expression(rng, n_vars, depth - 1))
    return (str(rng.choice(_BINARY)), random_expression(rng, n_vars, depth - 1),
            random_expression(rng, n_vars, depth - 1))


def _exp(v):
    return v.exp() if isinstance(v, Jet2) else math.exp(v)


def _log(v):
    return v.log() if isinstance(v, Jet2) else math.log(v)


def _sqrt(v):
    return v.sqrt() if isinstance(v, Jet2) else math.sqrt(v)


def evaluate_expression(expr, xs):
    """Evaluate on floats or on jets; every node is smooth and total."""
    op = expr[0]
    if op == "x":
        return xs[expr[1]]
    if op == "c":
        return expr[1]
    a = evaluate_expression(expr[1], xs)
    if op == "exp":
        return _exp(a / (1.0 + a * a))
    if op == "log":
        return _log(1.0 + a * a)
    if op == "sqrt":
        return _sqrt(1.0 + a * a)
    b = evaluate_expression(expr[2], xs)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / (1.0 + b * b)
    raise ValueError(f"unknown node {op!r}")


def expression_depth(expr):
    if expr[0] in ("x", "c"):
        return 1
    return 1 + max(expression_depth(e) for e in expr[1:])


@dataclass(frozen=True)
class CorpusCase:
    name: str
    f: object       # float function of a real vector
    jet: object     # real vector -> Jet2
    point: np.ndarray


def expression_cases(count, n_vars=4, max_depth=6, seed_=0):
    rng = np.random.default_rng(seed_)
    out = []
    for i in range(count):
        expr = random_expression(rng, n_vars, max_depth)
        x = rng.uniform(-1.0, 1.0, size=n_vars)

        def f(v, expr=expr):
            return evaluate_expression(expr, list(v))

        def jet(v, expr=expr):
            out_ = evaluate_expression(expr, seed(v))
            if not isinstance(out_, Jet2):
                out_ = Jet2.constant(float(out_), len(v))
            return out_

        out.append(CorpusCase(f"expr{i:02d}", f, jet, x))
    return out


def transition_points(eps, count, n=2, seed_=0):
    """Chart points whose base image has ``max_i |x_i|`` well inside ``(eps, 2 eps)``."""
    rng = np.random.default_rng(seed_)
    out = []
    for i in range(count):
        m = rng.uniform(1.2 * eps, 1.8 * eps)
        x = 0.6 * m * np.exp(2j * np.pi * rng.uniform(size=n))
        j = i % n
        x[j] = m * np.exp(2j * np.pi * rng.uniform())
        out.append(lift(x, j) if i % 3 else ChartPoint(ChartId.base(), tuple(x)))
    return out


def glued_weight_cases(eps=0.25, polyradius=2.0, count=5, seed_=1):
    bump = make_bump(eps, polyradius)
    out = []
    for i, p in enumerate(transition_points(eps, count, seed_=seed_)):
        def to_point(v, chart=p.chart):
            return ChartPoint(chart, tuple(v[0::2] + 1j * v[1::2]))

        def f(v, to_point=to_point):
            return glued_weight(bump, to_point(v), order=2).value

        def jet(v, to_point=to_point):
            return glued_weight(bump, to_point(v), order=2)

        out.append(CorpusCase(f"glued_weight{i}_{p.chart}", f, jet, p.real()))
    return out


def differentiation_corpus(n_expressions=45, n_weights=5, seed_=0):
    return expression_cases(n_expressions, seed_=seed_) + glued_weight_cases(count=n_weights, seed_=seed_ + 1)


def jet_vs_fd_error(case, h=1e-4):
    """Relative gradient and Hessian errors (unit floor on the scale)."""
    j = case.jet(case.point)
    g = finite_diff.gradient(case.f, case.point, h)
    H = finite_diff.hessian(case.f, case.point, h)
    return (finite_diff.relative_error(j.grad, g, floor=1.0),
            finite_diff.relative_error(j.hess, H, floor=1.0))


# --------------------------------------------------------------------------
# suites


def suite_jets_vs_fd(tol=1e-6):
    corpus = differentiation_corpus()
    worst = max(max(jet_vs_fd_error(c)) for c in corpus)
    return SuiteResult("jets_vs_finite_differences", len(corpus), worst, tol)


def suite_d_squared(tol=1e-12, count=40):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(count):
        m = 4
        x = rng.uniform(-1, 1, size=m)
        xs = seed(x)
        exprs = [random_expression(rng, m, 5) for _ in range(m)]
        alpha = [evaluate_expression(e, xs) for e in exprs]
        alpha = [a if isinstance(a, Jet2) else Jet2.constant(float(a), m) for a in alpha]
        worst = max(worst, exterior_d(d_of_jets(1, alpha)).sup_norm())
        worst = max(worst, exterior_d(d_of_jets(0, alpha[0])).sup_norm())
    return SuiteResult("d_squared", 2 * count, worst, tol)


def suite_atlas_roundtrip(tol=1e-12, count=200, n=3):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(count):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        j, k = rng.integers(n, size=2)
        p = lift(x, j)
        worst = max(worst, float(np.max(np.abs(blowdown(p) - x))) / float(np.max(np.abs(x))))
        q = chart_transition(chart_transition(p, ChartId.blow(k)), ChartId.blow(j))
        worst = max(worst, float(np.max(np.abs(q.array - p.array))) / float(np.max(np.abs(p.array))))
    return SuiteResult("atlas_roundtrip", count, worst, tol)


def suite_fs_positivity(count=500, dim=2):
    """Worst value of ``-lambda_min`` and of the closed-form vs jet mismatch."""
    rng = np.random.default_rng(4)
    worst = -np.inf
    for _ in range(count):
        u = rng.uniform(-4, 4, size=dim) + 1j * rng.uniform(-4, 4, size=dim)
        H = fubini_study(u)
        lam = float(np.linalg.eigvalsh(H)[0])
        mismatch = float(np.max(np.abs(fubini_study_jet(u).value - H)))
        worst = max(worst, -lam, mismatch - 1e-12)
    return SuiteResult("fubini_study_positivity", count, worst, 0.0)


SUITES = (suite_jets_vs_fd, suite_d_squared, suite_atlas_roundtrip, suite_fs_positivity)


def run_all():
    return [s() for s in SUITES]
