"""Command-line driver: ``lckblowup verify | sweep | selftest``.

Exit codes: 0 all checks pass, 1 some check failed, 2 invalid
configuration, 3 internal error.
"""
import argparse
import json
import math
import sys
import time
import traceback
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone

import numpy as np

from . import __version__, jets, selftest
from .bundle import curvature, make_bump
from .lck import (Check, Tolerances, build_gauge, candidate, evaluate_samples, find_N,
                  hopf_annulus, max_polyradius, stratified_samples, verify)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3

DEFAULT_CENTER_RADIUS = 4.0
POLYRADIUS_FACTOR = 0.95
EPS_FRACTION = 1.0 / 8.0
MAX_N = 6


class ConfigError(ValueError):
    pass


def default_center(n, radius=DEFAULT_CENTER_RADIUS):
    """Generic point of Euclidean norm ``radius`` (no zero coordinates)."""
    return tuple(complex(c) for c in radius * np.exp(0.7j * np.arange(n)) / math.sqrt(n))


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    r: float = 1.0
    R: float = 16.0
    center: tuple | None = None
    eps: float | None = None
    polyradius: float | None = None
    samples_per_stratum: int = 200
    seed: int = 0
    tol_analytic: float = 1e-10
    tol_glued: float = 1e-8
    delta: float = 1e-8
    N_override: int | None = None
    chi_inner: float = 3.0
    chi_outer: float = 4.0

    def resolved(self):
        """Concrete ``(center, polyradius, eps)``; raises :class:`ConfigError`."""
        if not isinstance(self.n, int) or not 2 <= self.n <= MAX_N:
            raise ConfigError(f"n must be an integer in [2, {MAX_N}], got {self.n!r}")
        if not 0 < self.r < self.R:
            raise ConfigError(f"need 0 < r < R, got r={self.r}, R={self.R}")
        center = default_center(self.n) if self.center is None else tuple(complex(c) for c in self.center)
        if len(center) != self.n:
            raise ConfigError(f"centre has {len(center)} coordinates, expected {self.n}")
        norm = float(np.linalg.norm(center))
        if not self.r < norm < self.R:
            raise ConfigError(f"centre |P|={norm:.6g} is outside the annulus ({self.r}, {self.R})")
        limit = min(norm - self.r, self.R - norm) / math.sqrt(self.n)
        rho = POLYRADIUS_FACTOR * limit if self.polyradius is None else float(self.polyradius)
        if not 0 < rho <= limit:
            raise ConfigError(f"polyradius {rho:.6g} must lie in (0, {limit:.6g}]")
        eps = EPS_FRACTION * rho if self.eps is None else float(self.eps)
        if not eps > 0:
            raise ConfigError(f"eps must be positive, got {eps}")
        if not 2.0 * eps < rho:
            raise ConfigError(f"bump support U_2eps (2eps={2 * eps:.6g}) does not fit in the polydisc "
                              f"of radius {rho:.6g}")
        if not 0 < self.chi_inner < self.chi_outer:
            raise ConfigError("need 0 < chi_inner < chi_outer")
        if not self.chi_outer * eps < rho:
            raise ConfigError(f"gauge cutoff support {self.chi_outer:g}*eps={self.chi_outer * eps:.6g} "
                              f"does not fit in the polydisc of radius {rho:.6g}")
        if not (isinstance(self.samples_per_stratum, int) and self.samples_per_stratum >= 1):
            raise ConfigError("samples per stratum must be a positive integer")
        if not (self.tol_analytic > 0 and self.tol_glued > 0 and self.delta >= 0):
            raise ConfigError("tolerances must be positive and delta non-negative")
        if self.N_override is not None and (int(self.N_override) != self.N_override or self.N_override < 0):
            raise ConfigError(f"N must be a non-negative integer, got {self.N_override}")
        return center, rho, eps

    def to_dict(self):
        d = asdict(self)
        if self.center is not None:
            d["center"] = [[c.real, c.imag] for c in (complex(z) for z in self.center)]
        return d


def run_pipeline(config):
    """Build everything, search or take ``N``, verify. Returns ``(report, n_search)``."""
    center, rho, eps = config.resolved()
    data = hopf_annulus(config.n, config.r, config.R)
    gauge = build_gauge(data, center, eps, polyradius=rho,
                        chi_radii=(config.chi_inner, config.chi_outer))
    curv = curvature(make_bump(eps, rho))
    samples = stratified_samples(gauge.region, eps, config.samples_per_stratum, config.seed)
    evals = evaluate_samples(gauge, curv, samples)
    tol = Tolerances(analytic=config.tol_analytic, glued=config.tol_glued, delta=config.delta)

    search = None
    if config.N_override is None:
        search = find_N(gauge, curv, samples, config.delta, evaluations=evals)
        N = search.N if search.found else 2 ** 30
    else:
        N = int(config.N_override)
    report = verify(candidate(gauge, curv, N), gauge, curv, samples, tol, evaluations=evals)

    report.config = config.to_dict()
    report.config["resolved"] = {
        "center": [[c.real, c.imag] for c in center], "polyradius": rho, "eps": eps,
        "maxPolyradius": max_polyradius(data, center),
    }
    if search is None:
        report.n_search = {"mode": "override", "N": N}
    else:
        report.n_search = {
            "mode": "search", "found": search.found, "N": search.N,
            "minRatio": search.min_ratio, "pointwiseMax": search.pointwise_max,
            "monotoneAt2N": search.monotone_checked,
            "witness": search.witness.to_dict() if search.witness else None,
        }
        if not search.found:
            report.N = None
            report.checks.insert(0, Check("n_search", 2.0 ** 30, search.min_ratio,
                                          search.witness.to_dict(), False, "exists N <="))
    return report


def report_json(report):
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def summary_lines(report):
    lines = [f"n={report.n} eps={report.eps:.6g} N={report.N} "
             f"min_eig={report.min_eigenvalue:.6g} max_lck_residual={report.max_lck_residual:.3e}"]
    for c in report.checks:
        lines.append(f"  {c.status.upper():4s} {c.name:30s} worst={c.worst_value: .3e} "
                     f"{c.relation} {c.tolerance:.1e}")
    lines.append("PASS" if report.passed else "FAIL")
    return lines


def cmd_verify(config, out=None, stream=None):
    """Run one verification. Returns ``(exit_code, report_or_None)``."""
    stream = sys.stdout if stream is None else stream
    try:
        config.resolved()
    except ConfigError as err:
        print(f"invalid configuration: {err}", file=sys.stderr)
        return EXIT_CONFIG, None
    try:
        t0 = time.perf_counter()
        report = run_pipeline(config)
        report.meta = {
            "generatedAt": datetime.now(timezone.utc).isoformat(),
            "elapsedSeconds": time.perf_counter() - t0,
            "backend": jets.BACKEND,
            "version": __version__,
        }
    except Exception:  # noqa: BLE001 - any escape here is an internal error
        traceback.print_exc(file=sys.stderr)
        return EXIT_INTERNAL, None
    if out is not None:
        with open(out, "w") as fh:
            fh.write(report_json(report))
    for line in summary_lines(report):
        print(line, file=stream)
    return (EXIT_PASS if report.passed else EXIT_FAIL), report


def cmd_sweep(config, eps_list=None, n_list=None, out=None, stream=None):
    """One ``cmd_verify`` per value; failures become rows, never abort the sweep."""
    stream = sys.stdout if stream is None else stream
    if eps_list is not None and n_list is not None:
        raise ValueError("sweep over eps or n, not both")
    param, values = ("eps", eps_list) if eps_list is not None else ("n", n_list or [])
    rows = []
    for v in values:
        cfg = replace(config, eps=float(v)) if param == "eps" else replace(config, n=int(v))
        code, report = cmd_verify(cfg, stream=_Null())
        row = {"parameter": param, "value": v, "exitCode": code,
               "N": None, "minEigenvalue": None, "maxResidual": None, "failedChecks": []}
        if report is not None:
            row.update(N=report.N, minEigenvalue=report.min_eigenvalue,
                       maxResidual=report.max_lck_residual,
                       failedChecks=[c.name for c in report.checks if not c.passed])
        rows.append(row)
    print(f"{param:>10s} {'exit':>4s} {'N':>8s} {'minEig':>12s} {'maxResidual':>12s}", file=stream)
    for row in rows:
        print(f"{row['value']!s:>10s} {row['exitCode']:4d} {row['N']!s:>8s} "
              f"{_fmt(row['minEigenvalue']):>12s} {_fmt(row['maxResidual']):>12s}", file=stream)
    if out is not None:
        with open(out, "w") as fh:
            json.dump({"parameter": param, "config": config.to_dict(), "rows": rows},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
    code = max((row["exitCode"] for row in rows), default=EXIT_PASS)
    return code, rows


def cmd_selftest(stream=None):
    stream = sys.stdout if stream is None else stream
    results = selftest.run_all()
    for r in results:
        print(r.line(), file=stream)
    return EXIT_PASS if all(r.passed for r in results) else EXIT_FAIL


class _Null:
    def write(self, _):
        return 0

    def flush(self):
        pass


def _fmt(x):
    return "-" if x is None else f"{x:.4g}"


def _float_list(s):
    return [float(v) for v in s.split(",") if v.strip()]


def _int_list(s):
    return [int(v) for v in s.split(",") if v.strip()]


def _center(s):
    return tuple(complex(v.replace(" ", "")) for v in s.split(","))


def _add_run_args(p):
    p.add_argument("--n", type=int, default=2, help="complex dimension (2..6)")
    p.add_argument("--r", type=float, default=1.0, help="inner annulus radius")
    p.add_argument("--R", type=float, default=16.0, help="outer annulus radius")
    p.add_argument("--center", type=_center, default=None,
                   help="blow-up centre as comma-separated complex numbers, e.g. 3+1j,2-0.5j")
    p.add_argument("--eps", type=float, default=None, help="bump radius (default polyradius/8)")
    p.add_argument("--polyradius", type=float, default=None)
    p.add_argument("--samples", type=int, default=200, help="samples per stratum")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-analytic", type=float, default=1e-10)
    p.add_argument("--tol-glued", type=float, default=1e-8)
    p.add_argument("--delta", type=float, default=1e-8, help="positivity margin relative to tr(N omega')")
    p.add_argument("--N", type=int, default=None, help="skip the search and use this N")
    p.add_argument("--chi-inner", type=float, default=3.0, help="gauge plateau radius in units of eps")
    p.add_argument("--chi-outer", type=float, default=4.0, help="gauge support radius in units of eps")
    p.add_argument("--out", default=None, help="write the JSON report here")


def config_from_args(args):
    return RunConfig(n=args.n, r=args.r, R=args.R, center=args.center, eps=args.eps,
                     polyradius=args.polyradius, samples_per_stratum=args.samples, seed=args.seed,
                     tol_analytic=args.tol_analytic, tol_glued=args.tol_glued, delta=args.delta,
                     N_override=args.N, chi_inner=args.chi_inner, chi_outer=args.chi_outer)


def build_parser():
    parser = argparse.ArgumentParser(prog="lckblowup", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_args(sub.add_parser("verify", help="run the construction and verify it"))
    sp = sub.add_parser("sweep", help="verify over a list of eps or n values")
    _add_run_args(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--sweep-eps", type=_float_list, help="comma-separated eps values")
    g.add_argument("--sweep-n", type=_int_list, help="comma-separated dimensions")
    sub.add_parser("selftest", help="differentiation, d^2, atlas and Fubini-Study suites")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    if args.command == "selftest":
        return cmd_selftest()
    config = config_from_args(args)
    if args.command == "verify":
        return cmd_verify(config, out=args.out)[0]
    return cmd_sweep(config, eps_list=args.sweep_eps, n_list=args.sweep_n, out=args.out)[0]


if __name__ == "__main__":
    sys.exit(main())
