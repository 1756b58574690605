"""Self-checks run by ``polaron-es verify``: oracle comparisons and invariants."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .eigensolver import SolverSettings, dense_oracle, ground_state_over_K
from .entanglement import analyze, reduced_density, spectrum, svd_cross_check
from .fock import basis_dimension, cached_basis
from .hamiltonian import Momentum, allowed_momenta, apply, assemble
from .model import ModelParams, cross_term_average, lambda_from_quadrature, lambda_total


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _basis_checks():
    worst = 0
    for N, nph in itertools.product(range(2, 7), range(0, 5)):
        b = cached_basis(N, nph)
        ok_dim = b.dim == basis_dimension(N, nph)
        ok_rank = np.array_equal(b.rank(b.configs), np.arange(b.dim))
        worst += (not ok_dim) + (not ok_rank)
    yield Check("basis size and rank round trip (N<=6, N_ph<=4)", worst == 0, f"{worst} failures")


def _hermiticity_checks():
    worst = 0.0
    for nph in range(4):
        p = ModelParams(g_P=0.7, g_BM=0.3, omega_ph=1.0, N=4, N_ph=nph)
        for K in allowed_momenta(4):
            m = assemble(K, cached_basis(4, nph), p).matrix
            worst = max(worst, abs(m - m.conj().T).max() if m.nnz else 0.0)
    yield Check("sector Hamiltonians exactly Hermitian (N=4)", worst == 0.0, f"max asym {worst:.1e}")


def _oracle_checks():
    settings = SolverSettings()
    for gp, gb, nph in [(0.5, 0.25, 2), (1.0, 0.4, 3), (1.5, 0.25, 3)]:
        p = ModelParams(g_P=gp, g_BM=gb, omega_ph=1.0, N=4, N_ph=nph)
        basis = cached_basis(4, nph)
        sector_evals = np.sort(np.concatenate([
            np.linalg.eigvalsh(assemble(K, basis, p).matrix.toarray()) for K in allowed_momenta(4)
        ]))
        gs = ground_state_over_K(p, basis, settings)
        oracle = dense_oracle(p, K=gs.K_gs)
        d_spec = np.max(np.abs(sector_evals - oracle.energies))
        amps = oracle.ground_matrix()
        rho_oracle = amps @ amps.conj().T
        d_rho = np.max(np.abs(reduced_density(gs, basis).entries - rho_oracle))
        tag = f"g_P={gp}, g_BM={gb}, N_ph={nph}"
        yield Check(f"sector spectra == dense spectrum ({tag})", d_spec < 1e-10, f"{d_spec:.1e}")
        yield Check(f"reduced density == partial trace ({tag})", d_rho < 1e-10, f"{d_rho:.1e}")
        eig = spectrum(reduced_density(gs, basis)).xis
        svd = svd_cross_check(gs, basis).xis
        fin = np.isfinite(eig)
        same_inf = np.array_equal(fin, np.isfinite(svd))
        d_xi = np.max(np.abs(eig[fin] - svd[fin])) if fin.any() else 0.0
        yield Check(f"SVD and eigenvalue routes agree ({tag})", same_inf and d_xi < 1e-10, f"{d_xi:.1e}")


def _bare_checks(N, nph, couplings, omegas):
    worst = 0.0
    basis = cached_basis(N, nph)
    for g, w in itertools.product(couplings, omegas):
        p = ModelParams(g_P=g, g_BM=g, omega_ph=w, N=N, N_ph=nph)
        h = assemble(Momentum(0, N), basis, p)
        v = np.zeros(basis.dim, dtype=complex)
        v[0] = 1.0
        worst = max(worst, float(np.linalg.norm(apply(h, v) + 2.0 * p.t_e * v)))
    yield Check(f"bare K=0 state is an eigenvector (N={N}, N_ph={nph})", worst <= 1e-12, f"residual {worst:.1e}")


def _coupling_checks():
    rng = np.random.default_rng(7)
    worst_rel = worst_cross = 0.0
    for _ in range(5):
        p = ModelParams(g_P=rng.uniform(0, 2), g_BM=rng.uniform(0, 2), omega_ph=rng.uniform(0.2, 3))
        worst_rel = max(worst_rel, abs(lambda_from_quadrature(p) / lambda_total(p) - 1))
        worst_cross = max(worst_cross, abs(cross_term_average(p)))
    yield Check("lambda_total matches BZ quadrature", worst_rel < 1e-6, f"rel {worst_rel:.1e}")
    yield Check("P/BM cross term averages to zero", worst_cross < 1e-10, f"{worst_cross:.1e}")


def _separable_check():
    p = ModelParams(g_P=0.25, g_BM=0.25, omega_ph=1.0)
    basis = cached_basis(p.N, p.N_ph)
    gs = ground_state_over_K(p, basis)
    res = analyze(gs, basis)
    ok = gs.K_gs.j == 0 and abs(gs.energy + 2) <= 1e-10 and res.entropy <= 1e-10
    yield Check("separable ground state at g_P=g_BM=0.25", ok, f"E={gs.energy:.12f}, S_E={res.entropy:.1e}")


def run_checks(small: bool = False) -> list[Check]:
    groups = [_basis_checks(), _hermiticity_checks(), _oracle_checks(), _coupling_checks(),
              _bare_checks(4, 3, (0.25, 1.0, 1.5), (0.5, 1.0, 2.0))]
    if not small:
        dim_ok = cached_basis(8, 9).dim == 24310
        groups.append(iter([Check("N=8, N_ph=9 basis has 24310 states", dim_ok, str(cached_basis(8, 9).dim))]))
        groups.append(_bare_checks(8, 9, (0.25, 0.4, 1.0, 1.5), (0.5, 1.0, 2.0)))
        groups.append(_separable_check())
    return [c for g in groups for c in g]
