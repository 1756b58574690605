import numpy as np
import pytest
import scipy.sparse as sp

from polaron_es import eigensolver
from polaron_es.eigensolver import (
    ConvergenceError,
    SolverSettings,
    dense_oracle,
    ground_state_over_K,
    lowest_eigenpair,
)
from polaron_es.fock import cached_basis
from polaron_es.hamiltonian import Momentum, SectorHamiltonian, allowed_momenta, assemble
from polaron_es.model import ModelParams


def _residual(h, e, v):
    return np.linalg.norm(h.matrix @ v - e * v)


def test_one_by_one():
    p = ModelParams(N=4, N_ph=0)
    h = assemble(Momentum(0, 4), cached_basis(4, 0), p)
    e, v = lowest_eigenpair(h)
    assert e == pytest.approx(-2.0, abs=1e-14)
    assert abs(abs(v[0]) - 1) < 1e-14


def test_one_by_one_arbitrary_value():
    h = SectorHamiltonian(Momentum(0, 4), sp.csr_matrix(np.array([[0.37 + 0j]])), ModelParams(N=4))
    e, v = lowest_eigenpair(h)
    assert e == pytest.approx(0.37) and np.allclose(np.abs(v), [1.0])


def test_lanczos_matches_dense(monkeypatch):
    p = ModelParams(g_P=0.5, g_BM=0.25, omega_ph=1.0, N=4, N_ph=3)
    h = assemble(Momentum(0, 4), cached_basis(4, 3), p)
    monkeypatch.setattr(eigensolver, "DENSE_CUTOFF", 0)
    e, v = lowest_eigenpair(h)
    exact = np.linalg.eigvalsh(h.matrix.toarray())[0]
    assert abs(e - exact) < 1e-10
    assert _residual(h, e, v) <= 1e-10 * max(1, abs(e))


def test_lanczos_without_reorthogonalization(monkeypatch):
    p = ModelParams(g_P=0.7, g_BM=0.25, omega_ph=1.0, N=5, N_ph=4)
    h = assemble(Momentum(1, 5), cached_basis(5, 4), p)
    e_full, _ = lowest_eigenpair(h, SolverSettings(reorth=True))
    e_plain, v = lowest_eigenpair(h, SolverSettings(reorth=False))
    assert abs(e_full - e_plain) < 1e-9
    assert _residual(h, e_plain, v) <= 1e-10 * max(1, abs(e_plain))


def test_residual_contract_and_reproducibility():
    p = ModelParams(g_P=1.0, g_BM=0.25, omega_ph=1.0, N=6, N_ph=5)
    h = assemble(Momentum(1, 6), cached_basis(6, 5), p)
    e1, v1 = lowest_eigenpair(h, SolverSettings(seed=3))
    e2, v2 = lowest_eigenpair(h, SolverSettings(seed=3))
    assert e1 == e2 and np.array_equal(v1, v2)
    assert _residual(h, e1, v1) <= 1e-10 * max(1, abs(e1))
    assert abs(np.linalg.norm(v1) - 1) < 1e-12
    e3, _ = lowest_eigenpair(h, SolverSettings(seed=99))
    assert abs(e1 - e3) < 1e-10


def test_convergence_error_carries_best_residual():
    p = ModelParams(g_P=1.0, g_BM=0.25, omega_ph=1.0, N=6, N_ph=5)
    h = assemble(Momentum(0, 6), cached_basis(6, 5), p)
    with pytest.raises(ConvergenceError) as info:
        lowest_eigenpair(h, SolverSettings(max_iter=4, krylov_dim=4))
    assert info.value.best_residual > 0
    assert info.value.energy is not None


def test_settings_validation():
    with pytest.raises(ValueError):
        SolverSettings(tol=0)
    with pytest.raises(ValueError):
        SolverSettings(max_iter=0)


def test_diagonal_matrix(monkeypatch):
    monkeypatch.setattr(eigensolver, "DENSE_CUTOFF", 0)
    d = np.linspace(-1, 5, 300)
    h = SectorHamiltonian(Momentum(0, 4), sp.diags(d).astype(complex).tocsr(), ModelParams(N=4))
    e, v = lowest_eigenpair(h)
    assert e == pytest.approx(-1.0, abs=1e-12)
    assert abs(abs(v[0]) - 1) < 1e-10


def test_energy_monotone_in_cap():
    prev = np.inf
    for nph in range(0, 5):
        p = ModelParams(g_P=0.8, g_BM=0.25, omega_ph=1.0, N=4, N_ph=nph)
        e = ground_state_over_K(p).energy
        assert e <= prev + 1e-12
        prev = e


def test_opposite_sectors_degenerate():
    p = ModelParams(g_P=0.9, g_BM=0.4, omega_ph=1.0, N=6, N_ph=4)
    gs = ground_state_over_K(p)
    for K in allowed_momenta(6):
        assert abs(gs.sector_energies[K.j] - gs.sector_energies[(-K).j]) < 1e-9


def test_ground_state_matches_oracle():
    for gp, gb, nph in [(0.5, 0.25, 2), (1.2, 0.25, 3)]:
        p = ModelParams(g_P=gp, g_BM=gb, omega_ph=1.0, N=4, N_ph=nph)
        gs = ground_state_over_K(p)
        assert abs(gs.energy - dense_oracle(p).energies[0]) < 1e-8


def test_degenerate_ground_state_reports_nonnegative_K():
    p = ModelParams(g_P=1.5, g_BM=0.25, omega_ph=1.0, N=4, N_ph=3)
    gs = ground_state_over_K(p)
    assert gs.K_gs.j != 0
    assert gs.degenerate and gs.K_gs.j > 0 and gs.degenerate_partner.j == -gs.K_gs.j


def test_oracle_size_guard():
    with pytest.raises(ValueError):
        dense_oracle(ModelParams(N=8, N_ph=6))


def test_oracle_translation_eigenvector():
    p = ModelParams(g_P=0.5, g_BM=0.25, omega_ph=1.0, N=4, N_ph=2)
    o = dense_oracle(p, K=Momentum(0, 4))
    psi = o.ground_vector
    T = eigensolver.translation_operator(o.basis)
    assert np.allclose(T @ psi, psi, atol=1e-10)
