import numpy as np
import pytest

from polaron_es.fock import cached_basis
from polaron_es.model import ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def small_params():
    return ModelParams(g_P=0.8, g_BM=0.3, omega_ph=1.0, N=4, N_ph=3)


@pytest.fixture
def small_basis(small_params):
    return cached_basis(small_params.N, small_params.N_ph)


_ACCEPTANCE = {}


def report(number, passed, detail):
    _ACCEPTANCE[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
