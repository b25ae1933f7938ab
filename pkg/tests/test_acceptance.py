"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Every test prints a single ``ACCEPTANCE <id> PASS|FAIL`` line before
asserting, so ``pytest -v`` output doubles as the acceptance record.
"""
import io
import time

import numpy as np
import pytest

from lckblowup.blowup import Region, exceptional_tangent, jacobian_holo, pullback_fubini_study
from lckblowup.cli import RunConfig, cmd_verify, run_pipeline
from lckblowup.forms import exterior_d, lck_residual
from lckblowup.lck import hopf_annulus, stratified_samples
from lckblowup.selftest import differentiation_corpus, jet_vs_fd_error


@pytest.fixture
def report_line(capsys):
    def emit(cid, ok, text):
        with capsys.disabled():
            print(f"\nACCEPTANCE {cid} {'PASS' if ok else 'FAIL'} {text}")
        return ok
    return emit


def test_c1_base_lck_identity(report_line):
    t0 = time.perf_counter()
    worst_res = worst_closed = 0.0
    count = 0
    for n in (2, 3):
        cfg = RunConfig(n=n)
        center, rho, eps = cfg.resolved()
        data = hopf_annulus(n, cfg.r, cfg.R)
        region = Region(center, rho)
        for s in stratified_samples(region, eps, 200, 0):
            z = region.ambient(s.point)
            worst_res = max(worst_res, data.lee_residual(z).sup_norm())
            worst_closed = max(worst_closed, data.lee_closedness(z).sup_norm())
            count += 1
    elapsed = time.perf_counter() - t0
    ok = worst_res < 1e-10 and worst_closed < 1e-12 and elapsed < 10.0 and count >= 2000
    report_line("C1", ok, f"base identity: max|dw - th^w|={worst_res:.2e} (<1e-10), "
                          f"max|d th|={worst_closed:.2e} (<1e-12), {count} samples, {elapsed:.2f}s (<10s)")
    assert ok


def test_c2_curvature_structure(report_line, pipeline_for):
    outside = inside = closed = 0.0
    tangent_max = -np.inf
    full_max = -np.inf
    n_e = 0
    for n in (2, 3):
        p = pipeline_for(n)
        for e in p.evals:
            W = e.curvature.value
            pt = e.sample.point
            if e.sup_radius >= 2 * p.eps:
                outside = max(outside, float(np.max(np.abs(W))))
            if e.sup_radius < p.eps:
                inside = max(inside, float(np.max(np.abs(W + pullback_fubini_study(pt)))))
            closed = max(closed, exterior_d(e.curvature.to_form_jet()).sup_norm())
            if pt.on_exceptional:
                n_e += 1
                T = exceptional_tangent(pt)
                tangent_max = max(tangent_max, float(np.linalg.eigvalsh(T @ W @ T.conj().T)[-1]))
                full_max = max(full_max, float(np.linalg.eigvalsh(W)[-1]))
    ok = (outside < 1e-12 and inside < 1e-9 and tangent_max < -1e-3 and full_max <= 1e-10
          and closed < 1e-8 and n_e >= 200)
    report_line("C2", ok, f"curvature: off-support {outside:.2e} (<1e-12), vs -FS {inside:.2e} (<1e-9), "
                          f"T(E) max eig {tangent_max:.3e} (<-1e-3), full max eig {full_max:.2e} (<=1e-10), "
                          f"closedness {closed:.2e} (<1e-8), {n_e} E-samples")
    assert ok


def test_c3_kernel_structure(report_line, pipeline_for):
    bad_rank = 0
    worst_image = 0.0
    n_e = 0
    for n in (2, 3):
        for s in pipeline_for(n).samples:
            pt = s.point
            if not pt.on_exceptional:
                continue
            n_e += 1
            J = jacobian_holo(pt)
            sv = np.linalg.svd(J, compute_uv=False)
            bad_rank += int(np.sum(sv > 1e-10) != 1)
            T = exceptional_tangent(pt)
            worst_image = max(worst_image, float(np.max(np.linalg.norm(T @ J.T, axis=1))))
    ok = bad_rank == 0 and worst_image < 1e-12 and n_e > 0
    report_line("C3", ok, f"kernel: {n_e} E-samples, {bad_rank} with rank != 1, "
                          f"max |c_* v| on T(E) {worst_image:.2e} (<1e-12)")
    assert ok


def test_c4_gauge(report_line, pipeline_for):
    vanish = resid = closed = 0.0
    n_plateau = 0
    for n in (2, 3):
        p = pipeline_for(n)
        for e in p.evals:
            th = e.gauge.theta_prime
            if e.sup_radius < 3 * p.eps:
                n_plateau += 1
                vanish = max(vanish, float(np.max(np.abs(th.coeffs))))
            resid = max(resid, lck_residual(e.gauge.omega_prime, th).sup_norm())
            closed = max(closed, exterior_d(th).sup_norm())
    ok = vanish < 1e-12 and resid < 1e-8 and closed < 1e-10 and n_plateau > 0
    report_line("C4", ok, f"gauge: max|th'| on U_3eps {vanish:.2e} (<1e-12, {n_plateau} samples), "
                          f"max|dw' - th'^w'| {resid:.2e} (<1e-8), max|d th'| {closed:.2e} (<1e-10)")
    assert ok


def test_c5_main_theorem(report_line):
    parts = []
    ok = True
    for n in (2, 3):
        t0 = time.perf_counter()
        rep = run_pipeline(RunConfig(n=n))
        elapsed = time.perf_counter() - t0
        pos = rep.check("positivity")
        total = sum(rep.strata.values())
        this = (rep.N is not None and rep.passed and pos.worst_value > 1e-8
                and rep.max_lck_residual < 1e-8 and total >= 1000 and elapsed < 120.0)
        ok &= this
        parts.append(f"n={n}: N={rep.N}, min lambda/tr={pos.worst_value:.3e} (>1e-8), "
                     f"lck residual {rep.max_lck_residual:.2e} (<1e-8), {total} samples, {elapsed:.1f}s (<120s)")
    report_line("C5", ok, "main theorem: " + "; ".join(parts))
    assert ok


def test_c6_differentiation_integrity(report_line):
    corpus = differentiation_corpus()
    errs = [jet_vs_fd_error(c) for c in corpus]
    worst_g = max(e[0] for e in errs)
    worst_h = max(e[1] for e in errs)
    n_weight = sum(c.name.startswith("glued_weight") for c in corpus)
    ok = len(corpus) == 50 and n_weight > 0 and worst_g < 1e-6 and worst_h < 1e-6
    report_line("C6", ok, f"jets vs Richardson FD: {len(corpus)} expressions ({n_weight} glued weights), "
                          f"grad {worst_g:.2e}, hess {worst_h:.2e} (<1e-6 relative)")
    assert ok


def test_c7_fault_injection(report_line):
    code0, rep0 = cmd_verify(RunConfig(n=2, N_override=0), stream=io.StringIO())
    pos = rep0.check("positivity")
    code1, rep1 = cmd_verify(RunConfig(n=2, chi_inner=1.0, chi_outer=1.5), stream=io.StringIO())
    sup = rep1.check("support_disjoint")
    ok = (code0 == 1 and pos.status == "fail" and pos.worst_sample is not None
          and code1 == 1 and sup.status == "fail" and sup.worst_sample is not None)
    report_line("C7", ok, f"faults: N=0 -> exit {code0}, positivity {pos.status} at "
                          f"{pos.worst_sample['chart'] if pos.worst_sample else None}; chi radii (1,1.5)eps -> "
                          f"exit {code1}, support_disjoint {sup.status} (worst {sup.worst_value:.2e})")
    assert ok
