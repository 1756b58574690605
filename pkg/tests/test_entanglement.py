import math

import numpy as np
import pytest

from polaron_es.eigensolver import GroundStateRecord, dense_oracle, ground_state_over_K
from polaron_es.entanglement import (
    InvalidDensityMatrix,
    ReducedDensityMatrix,
    analyze,
    bare_overlap,
    entropy,
    product_amplitudes,
    reduced_density,
    spectrum,
    svd_cross_check,
    von_neumann,
)
from polaron_es.fock import cached_basis
from polaron_es.hamiltonian import Momentum
from polaron_es.model import ModelParams


def _record(K, coeffs):
    return GroundStateRecord(K, 0.0, np.asarray(coeffs, dtype=complex))


def test_bare_state_is_separable():
    basis = cached_basis(8, 2)
    c = np.zeros(basis.dim)
    c[0] = 1
    res = analyze(_record(Momentum(0, 8), c), basis)
    assert np.allclose(res.rho.entries, 1 / 8)
    assert res.spectrum.xis[0] == pytest.approx(0.0, abs=1e-12)
    assert np.isinf(res.spectrum.xis[1:]).all()
    assert res.entropy == pytest.approx(0.0, abs=1e-12)


def test_maximally_mixed_electron():
    # one phonon localized on each site in turn; translates are orthogonal
    basis = cached_basis(8, 1)
    c = np.zeros(basis.dim)
    c[basis.rank([1, 0, 0, 0, 0, 0, 0, 0])] = 1
    res = analyze(_record(Momentum(0, 8), c), basis)
    assert np.allclose(res.rho.entries, np.eye(8) / 8)
    assert np.allclose(res.spectrum.xis, math.log(8))
    assert res.entropy == pytest.approx(math.log(8), abs=1e-12)


def test_two_equal_weights():
    # translation-period-2 phonon pattern on a 4-site ring gives weights {1/2, 1/2}
    basis = cached_basis(4, 2)
    c = np.zeros(basis.dim)
    c[basis.rank([1, 0, 1, 0])] = 1
    res = analyze(_record(Momentum(0, 4), c), basis)
    assert np.allclose(res.spectrum.weights, [0.5, 0.5, 0, 0])
    assert res.entropy == pytest.approx(math.log(2), abs=1e-12)


@pytest.mark.parametrize("gp, gb, nph", [(0.5, 0.25, 2), (1.0, 0.4, 3), (1.5, 0.25, 3)])
def test_matches_partial_trace(gp, gb, nph):
    p = ModelParams(g_P=gp, g_BM=gb, omega_ph=1.0, N=4, N_ph=nph)
    basis = cached_basis(4, nph)
    gs = ground_state_over_K(p, basis)
    amps = dense_oracle(p, K=gs.K_gs).ground_matrix()
    rho_direct = amps @ amps.conj().T
    rho = reduced_density(gs, basis)
    assert np.max(np.abs(rho.entries - rho_direct)) < 1e-10
    p_direct = np.clip(np.linalg.eigvalsh(rho_direct), 0, None)
    assert analyze(gs, basis).entropy == pytest.approx(von_neumann(p_direct), abs=1e-8)


def test_product_amplitudes_normalized(small_params, small_basis):
    gs = ground_state_over_K(small_params, small_basis)
    amps = product_amplitudes(gs, small_basis)
    assert np.linalg.norm(amps) == pytest.approx(1.0, abs=1e-12)


def test_svd_route_agrees(rng):
    basis = cached_basis(5, 4)
    for _ in range(4):
        p = ModelParams(g_P=rng.uniform(0, 1.5), g_BM=rng.uniform(0, 0.6), omega_ph=rng.uniform(0.5, 2),
                        N=5, N_ph=4)
        gs = ground_state_over_K(p, basis)
        a = spectrum(reduced_density(gs, basis)).xis
        b = svd_cross_check(gs, basis).xis
        fin = np.isfinite(a)
        assert np.array_equal(fin, np.isfinite(b))
        assert np.max(np.abs(a[fin] - b[fin])) < 1e-10


def test_density_matrix_properties(small_params, small_basis):
    gs = ground_state_over_K(small_params, small_basis)
    rho = reduced_density(gs, small_basis)
    e = rho.entries
    assert np.allclose(e, e.conj().T, atol=1e-15)
    assert np.allclose(np.diag(e).real, 1 / 4, atol=1e-12)
    assert np.trace(e).real == pytest.approx(1.0, abs=1e-12)
    ev = np.sort(rho.circulant_eigenvalues())
    assert np.allclose(ev, np.linalg.eigvalsh(e), atol=1e-10)


def test_spectrum_sorted_and_entropy_bounds(small_params, small_basis):
    res = analyze(ground_state_over_K(small_params, small_basis), small_basis)
    xis = res.spectrum.xis
    assert np.all(np.diff(xis[np.isfinite(xis)]) >= 0)
    assert 0 <= res.entropy <= math.log(4) + 1e-12
    assert res.entropy == pytest.approx(von_neumann(res.spectrum.weights), abs=1e-12)


def test_gauge_invariance(small_params, small_basis):
    gs = ground_state_over_K(small_params, small_basis)
    rotated = GroundStateRecord(gs.K_gs, gs.energy, gs.coeffs * np.exp(0.7j))
    assert np.allclose(reduced_density(gs, small_basis).entries,
                       reduced_density(rotated, small_basis).entries, atol=1e-15)


def test_negative_eigenvalue_rejected():
    bad = ReducedDensityMatrix(np.diag([1.1, -0.1]).astype(complex), Momentum(0, 2))
    with pytest.raises(InvalidDensityMatrix):
        spectrum(bad)


def test_tiny_weights_become_infinite_levels():
    rho = ReducedDensityMatrix(np.diag([1 - 1e-16, 1e-16]).astype(complex), Momentum(0, 2))
    spec = spectrum(rho)
    assert np.isinf(spec.xis[1]) and spec.weights[1] == 0
    assert entropy(spec) == pytest.approx(0.0, abs=1e-14)


def test_length_mismatch_rejected(small_basis):
    with pytest.raises(ValueError):
        reduced_density(_record(Momentum(0, 4), np.ones(3)), small_basis)


def test_bare_overlap():
    basis = cached_basis(4, 1)
    c = np.zeros(basis.dim, dtype=complex)
    c[0], c[1] = 0.6, 0.8
    assert bare_overlap(_record(Momentum(0, 4), c)) == pytest.approx(0.36)
    assert bare_overlap(_record(Momentum(1, 4), c)) == 0.0
