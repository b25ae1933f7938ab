import functools

import pytest

from lckblowup.bundle import curvature, make_bump
from lckblowup.cli import RunConfig
from lckblowup.lck import build_gauge, evaluate_samples, hopf_annulus, stratified_samples


class Pipeline:
    def __init__(self, n, per_stratum=200, **kw):
        cfg = RunConfig(n=n, **kw)
        self.config = cfg
        self.center, self.rho, self.eps = cfg.resolved()
        self.data = hopf_annulus(n, cfg.r, cfg.R)
        self.gauge = build_gauge(self.data, self.center, self.eps, polyradius=self.rho)
        self.bump = make_bump(self.eps, self.rho)
        self.curv = curvature(self.bump)
        self.samples = stratified_samples(self.gauge.region, self.eps, per_stratum, 0)
        self.evals = evaluate_samples(self.gauge, self.curv, self.samples)


@functools.lru_cache(maxsize=None)
def pipeline(n, per_stratum=200):
    return Pipeline(n, per_stratum)


@pytest.fixture(scope="session")
def pipe2():
    return pipeline(2)


@pytest.fixture(scope="session")
def pipe3():
    return pipeline(3)


@pytest.fixture(scope="session")
def pipeline_for():
    return pipeline
