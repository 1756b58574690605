"""Lowest eigenpairs per momentum sector and the global ground state.

The sector solver is a Lanczos iteration with full (twice-applied
Gram-Schmidt) reorthogonalization and explicit restarts from the current
Ritz vector.  Small sectors are diagonalized densely.  ``dense_oracle``
builds the full real-space Hamiltonian without any symmetry reduction and is
used only to validate the sector pipeline.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .fock import FockBasis, basis_dimension, enumerate_basis
from .hamiltonian import Momentum, SectorHamiltonian, allowed_momenta, apply, assemble
from .model import ModelParams

log = logging.getLogger(__name__)

DENSE_CUTOFF = 64
ORACLE_MAX_DIM = 5000


class ConvergenceError(RuntimeError):
    """Lanczos did not reach the residual tolerance within ``max_iter`` matvecs."""

    def __init__(self, message: str, best_residual: float, energy: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual
        self.energy = energy


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-10
    max_iter: int = 5000
    reorth: bool = True
    seed: int = 12345
    krylov_dim: int = 200

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.krylov_dim < 2:
            raise ValueError(f"krylov_dim must be >= 2, got {self.krylov_dim}")


@dataclass(frozen=True, eq=False)
class GroundStateRecord:
    K_gs: Momentum
    energy: float
    coeffs: np.ndarray = field(repr=False)
    degenerate_partner: Momentum | None = None
    sector_energies: dict = field(default_factory=dict, repr=False)

    @property
    def degenerate(self) -> bool:
        return self.degenerate_partner is not None


def _start_vector(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _residual(h: SectorHamiltonian, energy: float, vec: np.ndarray) -> float:
    return float(np.linalg.norm(apply(h, vec) - energy * vec))


def _dense_lowest(h: SectorHamiltonian) -> tuple[float, np.ndarray]:
    evals, evecs = np.linalg.eigh(h.matrix.toarray())
    return float(evals[0]), evecs[:, 0]


def _lanczos_cycle(matvec, v0, m, reorth, target, check_every=8):
    """One Lanczos run of at most ``m`` steps from unit vector ``v0``.

    Stops early once the Ritz estimate ``beta_k |y_k|`` of the lowest pair
    drops below ``target``.  Returns ``(ritz value, ritz vector, steps,
    invariant)``, where ``invariant`` flags an exhausted Krylov space.
    """
    dim = v0.shape[0]
    V = np.empty((m, dim), dtype=complex)  # Lanczos vectors as rows
    alpha = np.zeros(m)
    beta = np.zeros(m)
    V[0] = v0
    invariant = False
    k = 0
    for k in range(m):
        w = matvec(V[k])
        alpha[k] = np.vdot(V[k], w).real
        w -= alpha[k] * V[k]
        if k > 0:
            w -= beta[k - 1] * V[k - 1]
        if reorth:
            for _ in range(2):
                w -= (V[: k + 1].conj() @ w) @ V[: k + 1]
        beta[k] = np.linalg.norm(w)
        invariant = beta[k] < 1e-14 * max(1.0, abs(alpha[k]))
        if invariant or k + 1 == m:
            break
        if k % check_every == check_every - 1:
            theta, y = sla.eigh_tridiagonal(
                alpha[: k + 1], beta[:k], select="i", select_range=(0, 0)
            )
            if beta[k] * abs(y[-1, 0]) < target:
                break
        V[k + 1] = w / beta[k]
    n = k + 1
    if n == 1:
        theta, y = alpha[:1], np.ones((1, 1))
    else:
        theta, y = sla.eigh_tridiagonal(alpha[:n], beta[: n - 1], select="i", select_range=(0, 0))
    vec = y[:, 0] @ V[:n]
    return float(theta[0]), vec / np.linalg.norm(vec), n, invariant


def lowest_eigenpair(h: SectorHamiltonian, settings: SolverSettings | None = None):
    """Minimal eigenvalue and unit eigenvector of a sector Hamiltonian.

    Guarantees ``||H v - E v|| <= tol * max(1, |E|)``, checked with a fresh
    matrix-vector product before returning.
    """
    s = settings or SolverSettings()
    if h.dim < 1:
        raise ValueError("empty sector")
    if h.dim <= DENSE_CUTOFF:
        return _dense_lowest(h)

    matvec = h.matrix.__matmul__
    v = _start_vector(h.dim, s.seed)
    best = (np.inf, None, None)
    used = 0
    cycle = 0
    stalled = np.inf
    m = min(s.krylov_dim, h.dim)
    while used < s.max_iter:
        steps = max(min(m, s.max_iter - used), 2)
        # aim a bit below tol: the recurrence estimate is optimistic once
        # orthogonality is only approximate
        scale = max(1.0, abs(best[1])) if best[1] is not None else 1.0
        energy, vec, n, invariant = _lanczos_cycle(matvec, v, steps, s.reorth, 0.1 * s.tol * scale)
        used += n
        res = _residual(h, energy, vec)
        used += 1
        if res < best[0]:
            best = (res, energy, vec)
        if res <= s.tol * max(1.0, abs(energy)):
            return energy, vec
        if invariant or res >= stalled:
            # stagnation: kick the restart vector with a fresh seeded direction
            cycle += 1
            v = vec + 1e-3 * _start_vector(h.dim, s.seed + cycle)
            v /= np.linalg.norm(v)
        else:
            v = vec
        stalled = res
    raise ConvergenceError(
        f"Lanczos stopped after {used} matvecs with residual {best[0]:.3e} "
        f"(K index {h.K.j}, tol {s.tol:g})",
        best_residual=best[0],
        energy=best[1],
    )


def solve_sectors(params: ModelParams, basis: FockBasis, settings: SolverSettings | None = None):
    """``{j: (energy, vector)}`` for every allowed momentum index ``j``."""
    s = settings or SolverSettings()
    out = {}
    for K in allowed_momenta(params.N):
        h = assemble(K, basis, params)
        out[K.j] = lowest_eigenpair(h, s)
        log.debug("K index %d: E = %.14f", K.j, out[K.j][0])
    return out


def ground_state_over_K(
    params: ModelParams, basis: FockBasis | None = None, settings: SolverSettings | None = None
) -> GroundStateRecord:
    """Global ground state over all momentum sectors.

    When the minimum sits in a pair of sectors ``+-K`` that agree within
    ``10 * tol``, the non-negative member is reported and the other is stored
    as ``degenerate_partner``.
    """
    s = settings or SolverSettings()
    basis = basis or enumerate_basis(params.N, params.N_ph)
    sectors = solve_sectors(params, basis, s)
    energies = {j: e for j, (e, _) in sectors.items()}
    j_min = min(energies, key=lambda j: (energies[j], abs(j), -j))
    e_min = energies[j_min]
    K = Momentum(j_min, params.N)
    partner = -K
    degenerate = None
    if partner.j != K.j and abs(energies[partner.j] - e_min) <= 10 * s.tol * max(1.0, abs(e_min)):
        if K.j < 0:
            K, partner = partner, K
        degenerate = partner
    energy, coeffs = sectors[K.j]
    return GroundStateRecord(K, energy, coeffs, degenerate, energies)


# dense real-space oracle ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OracleResult:
    energies: np.ndarray
    ground_vector: np.ndarray
    degeneracy: int
    basis: FockBasis = field(repr=False)

    def ground_matrix(self) -> np.ndarray:
        """Ground vector reshaped to ``(site, phonon config)``."""
        return self.ground_vector.reshape(self.basis.n_sites, self.basis.dim)


def _displacement(basis: FockBasis, site: int):
    """Action of ``a_site + a_site^dag`` on every config: list of (col, row, amp)."""
    configs = basis.configs.astype(np.int64)
    totals = configs.sum(axis=1)
    out = []
    idx = np.arange(basis.dim)
    up = totals < basis.n_ph
    moved = configs[up].copy()
    moved[:, site] += 1
    out.append((idx[up], basis.rank(moved), np.sqrt(configs[up, site] + 1.0)))
    down = configs[:, site] > 0
    moved = configs[down].copy()
    moved[:, site] -= 1
    out.append((idx[down], basis.rank(moved), np.sqrt(configs[down, site].astype(float))))
    return out


def real_space_hamiltonian(params: ModelParams, basis: FockBasis | None = None) -> sp.csr_matrix:
    """Full Hamiltonian on ``|n>_e (x) |m>_ph`` with index ``n * D_ph + rank(m)``."""
    basis = basis or enumerate_basis(params.N, params.N_ph)
    N, D = params.N, basis.dim
    rows, cols, vals = [], [], []

    def add(n_to, n_from, col, row, amp):
        rows.append(n_to * D + row)
        cols.append(n_from * D + col)
        vals.append(np.broadcast_to(amp, np.shape(col)).astype(float))

    ident = np.arange(D)
    totals = basis.totals().astype(float)
    disp = {site: _displacement(basis, site) for site in range(N)}
    gp = params.g_P * params.omega_ph
    gb = params.g_BM * params.omega_ph
    for n in range(N):
        nxt, prv = (n + 1) % N, (n - 1) % N
        add(n, n, ident, ident, params.omega_ph * totals)
        # bond (n, n+1): -t (c+_{n+1} c_n + h.c.) and the Peierls dressing
        for a, b in ((n, nxt), (nxt, n)):
            add(b, a, ident, ident, -params.t_e)
            for col, row, amp in disp[nxt]:
                add(b, a, col, row, gp * amp)
            for col, row, amp in disp[n]:
                add(b, a, col, row, -gp * amp)
        # breathing mode on the density at n
        for col, row, amp in disp[prv]:
            add(n, n, col, row, gb * amp)
        for col, row, amp in disp[nxt]:
            add(n, n, col, row, -gb * amp)
    dim = N * D
    h = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    h.sum_duplicates()
    return h


def translation_operator(basis: FockBasis) -> sp.csr_matrix:
    """``T |n, m> = |n+1, T_1 m>`` on the product basis."""
    N, D = basis.n_sites, basis.dim
    table = basis.translation_table[1 % N]
    n = np.repeat(np.arange(N), D)
    i = np.tile(np.arange(D), N)
    rows = ((n + 1) % N) * D + table[i]
    cols = n * D + i
    return sp.csr_matrix((np.ones(N * D), (rows, cols)), shape=(N * D, N * D))


def dense_oracle(params: ModelParams, K: Momentum | None = None, degeneracy_tol: float = 1e-8):
    """Full spectrum and ground vector by dense diagonalization.

    If the ground level is degenerate and ``K`` is given, the returned vector
    is the member of the ground eigenspace with ``T psi = e^{-iK} psi``.
    """
    D = basis_dimension(params.N, params.N_ph)
    if params.N * D > ORACLE_MAX_DIM:
        raise ValueError(f"oracle dimension {params.N * D} exceeds {ORACLE_MAX_DIM}")
    basis = enumerate_basis(params.N, params.N_ph)
    h = real_space_hamiltonian(params, basis).toarray()
    evals, evecs = np.linalg.eigh(h)
    e0 = evals[0]
    g = int(np.sum(evals - e0 <= degeneracy_tol * max(1.0, abs(e0))))
    ground = evecs[:, 0].astype(complex)
    if K is not None and g > 1:
        sub = evecs[:, :g].astype(complex)
        t_sub = sub.conj().T @ (translation_operator(basis) @ sub)
        w, u = np.linalg.eig(t_sub)
        pick = int(np.argmin(np.abs(w - K.phase(1))))
        ground = sub @ u[:, pick]
        ground /= np.linalg.norm(ground)
    return OracleResult(evals, ground, g, basis)
