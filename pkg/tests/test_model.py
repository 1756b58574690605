import math

import numpy as np
import pytest

from polaron_es.model import (
    ModelParams,
    bz_average,
    cross_term_average,
    g_BM_from_lambda,
    g_P_from_lambda,
    lambda_BM,
    lambda_from_quadrature,
    lambda_P,
    lambda_total,
    vertex_BM,
    vertex_P,
    vertex_total,
)


@pytest.mark.parametrize(
    "g_P, g_BM, omega, lp, lbm",
    [
        (math.sqrt(0.5), 1.0, 1.0, 1.0, 1.0),
        (0.25, 0.25, 1.0, 0.125, 0.0625),
        (0.4, 0.0, 1.0, 0.32, 0.0),
        (0.75, 0.75, 1.0, 1.125, 0.5625),
        (0.5, 0.5, 2.0, 1.0, 0.5),
    ],
)
def test_effective_couplings(g_P, g_BM, omega, lp, lbm):
    p = ModelParams(g_P=g_P, g_BM=g_BM, omega_ph=omega)
    assert lambda_P(p) == pytest.approx(lp, rel=1e-14)
    assert lambda_BM(p) == pytest.approx(lbm, rel=1e-14)
    assert lambda_total(p) == pytest.approx(lp + lbm, rel=1e-14)


def test_inverse_maps():
    p = ModelParams(omega_ph=0.625)
    assert g_P_from_lambda(2.0, p) == pytest.approx(math.sqrt(1.6), rel=1e-14)
    for lam in (0.0, 0.3, 3.2):
        assert lambda_P(p.with_(g_P=g_P_from_lambda(lam, p))) == pytest.approx(lam, abs=1e-14)
        assert lambda_BM(p.with_(g_BM=g_BM_from_lambda(lam, p))) == pytest.approx(lam, abs=1e-14)
    with pytest.raises(ValueError):
        g_P_from_lambda(-0.1, p)


@pytest.mark.parametrize("lam, omega, g", [(0.0, 1.0, 0.0), (1.0, 0.5, 1.0), (3.2, 1.0, math.sqrt(1.6))])
def test_g_P_from_lambda_examples(lam, omega, g):
    p = ModelParams(omega_ph=omega)
    assert g_P_from_lambda(lam, p) == pytest.approx(g, rel=1e-15)
    assert lambda_P(p.with_(g_P=g_P_from_lambda(lam, p))) == pytest.approx(lam, rel=1e-15)


def test_param_validation():
    with pytest.raises(ValueError):
        ModelParams(t_e=0.0)
    with pytest.raises(ValueError):
        ModelParams(omega_ph=-1.0)
    with pytest.raises(ValueError):
        ModelParams(g_P=-0.1)
    with pytest.raises(ValueError):
        ModelParams(N=1)


def test_vertex_values():
    p = ModelParams(g_P=1.0, g_BM=1.0, omega_ph=1.0)
    assert vertex_P(0.0, math.pi / 2, p) == pytest.approx(-2j)
    assert vertex_BM(math.pi / 2, p) == pytest.approx(2j)
    assert vertex_total(0.0, math.pi / 2, p) == pytest.approx(0.0)
    assert vertex_BM(0.0, p) == 0
    only_p = ModelParams(g_P=1.0, g_BM=0.0, omega_ph=1.0)
    assert vertex_total(math.pi / 2, math.pi / 2, only_p) == pytest.approx(2j, abs=1e-15)
    assert vertex_total(0.7, 0.0, p) == 0


def test_vertex_cancels_at_k0_for_equal_couplings():
    p = ModelParams(g_P=0.6, g_BM=0.6, omega_ph=1.7)
    q = np.linspace(-math.pi, math.pi, 1000)
    assert np.max(np.abs(vertex_total(0.0, q, p))) < 1e-14


def test_bz_average_of_constant_and_cosine():
    assert bz_average(lambda k, q: np.ones_like(k + q)) == pytest.approx(1.0)
    assert abs(bz_average(lambda k, q: np.cos(k) * np.cos(q))) < 1e-14


def test_quadrature_matches_closed_form(rng):
    for _ in range(5):
        p = ModelParams(g_P=rng.uniform(0, 2), g_BM=rng.uniform(0, 2), omega_ph=rng.uniform(0.2, 3))
        assert lambda_from_quadrature(p) == pytest.approx(lambda_total(p), rel=1e-6)
        assert abs(cross_term_average(p)) < 1e-10
