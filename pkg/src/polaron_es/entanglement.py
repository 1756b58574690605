"""Excitation-phonon entanglement of a momentum-sector ground state.

For ``psi = sum_m C_m |K, m>`` the reduced excitation density matrix is a
phased circulant,

    rho[n, n'] = N^{-1} e^{iK(n-n')} sum_m C_m conj(C_{T_{n-n'} m}),

so its entries need one pass over the basis per relative shift.  The
spectrum is reported as ``xi = -ln p`` sorted ascending, with vanishing
weights represented by ``+inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import GroundStateRecord
from .fock import FockBasis
from .hamiltonian import Momentum

ZERO_WEIGHT = 1e-14
NEGATIVE_TOL = 1e-12


class InvalidDensityMatrix(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ReducedDensityMatrix:
    entries: np.ndarray
    K_gs: Momentum

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    def circulant_eigenvalues(self) -> np.ndarray:
        """Eigenvalues via the DFT of the first column (the matrix is circulant)."""
        return np.fft.fft(self.entries[:, 0]).real


@dataclass(frozen=True, eq=False)
class EntanglementSpectrum:
    xis: np.ndarray
    weights: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.xis)


def _check_lengths(gs: GroundStateRecord, basis: FockBasis) -> None:
    if gs.coeffs.shape != (basis.dim,):
        raise ValueError(
            f"coefficient vector has shape {gs.coeffs.shape}, basis dimension is {basis.dim}"
        )
    if gs.K_gs.N != basis.n_sites:
        raise ValueError(f"ground state is for N={gs.K_gs.N}, basis has N={basis.n_sites}")


def reduced_density(gs: GroundStateRecord, basis: FockBasis) -> ReducedDensityMatrix:
    _check_lengths(gs, basis)
    N = basis.n_sites
    c = gs.coeffs
    table = basis.translation_table
    g = np.empty(N, dtype=complex)
    for d in range(N):
        g[d] = gs.K_gs.phase(-d) * np.vdot(c[table[d]], c) / N
    n = np.arange(N)
    rho = g[(n[:, None] - n[None, :]) % N]
    return ReducedDensityMatrix(rho, gs.K_gs)


def _from_weights(p: np.ndarray) -> EntanglementSpectrum:
    if p.min() < -NEGATIVE_TOL:
        raise InvalidDensityMatrix(f"density matrix has eigenvalue {p.min():.3e} < 0")
    p = np.clip(p, 0.0, 1.0)
    p[p < ZERO_WEIGHT] = 0.0
    p = np.sort(p)[::-1]
    with np.errstate(divide="ignore"):
        xis = -np.log(p) + 0.0  # no negative zero for p == 1
    xis[p == 0.0] = np.inf
    return EntanglementSpectrum(xis, p)


def spectrum(rho: ReducedDensityMatrix) -> EntanglementSpectrum:
    """Entanglement spectrum ``{-ln p}`` of the reduced density matrix."""
    try:
        p = np.linalg.eigvalsh(rho.entries)
    except np.linalg.LinAlgError as exc:
        raise InvalidDensityMatrix(f"eigendecomposition failed: {exc}") from exc
    return _from_weights(p)


def entropy(spec: EntanglementSpectrum) -> float:
    """``sum xi e^{-xi}``; infinite levels contribute nothing."""
    finite = np.isfinite(spec.xis)
    xi = spec.xis[finite]
    return float(np.sum(xi * np.exp(-xi)))


def von_neumann(weights) -> float:
    """``-sum p ln p`` computed directly from the weights."""
    p = np.asarray(weights, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def product_amplitudes(gs: GroundStateRecord, basis: FockBasis) -> np.ndarray:
    """Ground state on ``|n>_e (x) |m>_ph`` as an ``N x D_ph`` matrix.

    Row ``n`` (site index from 0) holds ``N^{-1/2} e^{iK(n+1)} C_m`` at the
    column of ``T_n m``.
    """
    _check_lengths(gs, basis)
    N = basis.n_sites
    table = basis.translation_table
    amps = np.zeros((N, basis.dim), dtype=complex)
    for n in range(N):
        amps[n, table[n]] = gs.K_gs.phase(-(n + 1)) * gs.coeffs
    return amps / math.sqrt(N)


def svd_cross_check(gs: GroundStateRecord, basis: FockBasis) -> EntanglementSpectrum:
    """Entanglement spectrum from the singular values of the entanglement matrix."""
    sigma = np.linalg.svd(product_amplitudes(gs, basis), compute_uv=False)
    return _from_weights(sigma**2)


def bare_overlap(gs: GroundStateRecord) -> float:
    """``|<Psi_{k=0}|psi_gs>|^2`` with the bare zero-momentum excitation.

    The bare state is ``|K=0, vacuum>``; the vacuum has rank 0.
    """
    if gs.K_gs.j != 0:
        return 0.0
    return float(abs(gs.coeffs[0]) ** 2)


@dataclass(frozen=True, eq=False)
class EntanglementResult:
    rho: ReducedDensityMatrix
    spectrum: EntanglementSpectrum
    entropy: float


def analyze(gs: GroundStateRecord, basis: FockBasis) -> EntanglementResult:
    rho = reduced_density(gs, basis)
    spec = spectrum(rho)
    return EntanglementResult(rho, spec, entropy(spec))
