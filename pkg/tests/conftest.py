import numpy as np
import pytest

from covert_rsvrg import stiefel as st
from covert_rsvrg.channels import SystemConfig, sample_dataset
from covert_rsvrg.rng import complex_normal


def crandn(rng, shape):
    return complex_normal(rng, shape)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_problem():
    cfg = SystemConfig(n=4, p=2, T=8, mu=1.3).materialize()
    return cfg, sample_dataset(cfg, 3), st.random_point(4, 2, 3)


def tangent_at(x, rng):
    return st.tangent_project(x, crandn(rng, x.shape))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
