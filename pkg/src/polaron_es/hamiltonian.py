"""Sparse Hamiltonian of one total-quasimomentum sector.

The sector basis is the Bloch sum

    |K, m> = N^{-1/2} sum_j e^{iK(j+1)} T^j (|site 0>_e (x) |m>_ph),

one state per phonon configuration ``m``.  ``H |K, m>`` is obtained by acting
with every real-space term on the representative ``|0>_e (x) |m>``; a term
that leaves the excitation on site ``s`` (s in {-1, 0, +1} mod N) is brought
back to site 0 by translating the phonon configuration by ``-s``, which
costs a Bloch phase ``e^{-iKs}``.  Terms that would push the total phonon
number above the cap are dropped.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .fock import FockBasis, translate_config
from .model import ModelParams


@dataclass(frozen=True)
class Momentum:
    """Quasimomentum ``K = 2 pi j / N`` with ``j`` in ``(-N/2, N/2]``."""

    j: int
    N: int

    def __post_init__(self):
        if not (-self.N / 2 < self.j <= self.N / 2):
            raise ValueError(f"momentum index {self.j} outside (-{self.N}/2, {self.N}/2]")

    @classmethod
    def from_index(cls, j: int, N: int) -> "Momentum":
        """Fold any integer index into the first Brillouin zone."""
        j = j % N
        if j > N // 2:
            j -= N
        return cls(j, N)

    @property
    def value(self) -> float:
        return 2.0 * math.pi * self.j / self.N

    @property
    def over_pi(self) -> float:
        return 2.0 * self.j / self.N

    def __neg__(self) -> "Momentum":
        return Momentum.from_index(-self.j, self.N)

    def phase(self, shift: int) -> complex:
        """``e^{-iK shift}``, with exact values on the real and imaginary axes."""
        c = math.cos(self.value * shift)
        s = -math.sin(self.value * shift)
        # exact 0/+-1 for K a multiple of pi/2 keeps K=0, pi sectors real
        if abs(c) < 1e-15:
            c = 0.0
        if abs(s) < 1e-15:
            s = 0.0
        return complex(c, s)


def allowed_momenta(N: int) -> list[Momentum]:
    """All sector momenta, ordered by index ``j`` ascending."""
    return [Momentum(j, N) for j in range(-((N - 1) // 2), N // 2 + 1)]


@dataclass(frozen=True, eq=False)
class SectorHamiltonian:
    K: Momentum
    matrix: sp.csr_matrix
    params: ModelParams

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _boson_moves(params: ModelParams):
    """(recentering shift, base amplitude, [(site, +1 create / -1 annihilate, sign)])."""
    N = params.N
    t = params.t_e
    gp = params.g_P * params.omega_ph
    gb = params.g_BM * params.omega_ph
    right, left = 1 % N, (N - 1) % N

    def disp(site, sign):
        # a^dag + a on one site
        return [(site, +1, sign), (site, -1, sign)]

    return [
        (+1, -t, None),
        (-1, -t, None),
        # Peierls: hop 0 -> 1 weighted by (A_1 - A_0); hop 0 -> N-1 by (A_0 - A_{N-1})
        (+1, gp, disp(right, +1) + disp(0, -1)),
        (-1, gp, disp(0, +1) + disp(left, -1)),
        # breathing mode: density on site 0 times (A_{N-1} - A_1)
        (0, gb, disp(left, +1) + disp(right, -1)),
    ]


def _triplets(K: Momentum, basis: FockBasis, params: ModelParams):
    configs = basis.configs.astype(np.int64)
    totals = configs.sum(axis=1)
    cols_all = np.arange(basis.dim, dtype=np.int64)
    rows, cols, vals = [cols_all], [cols_all], [params.omega_ph * totals.astype(complex)]

    for shift, amp, ops in _boson_moves(params):
        if amp == 0.0:
            continue
        phase = K.phase(shift)
        if ops is None:
            target = translate_config(configs, -shift)
            rows.append(basis.rank(target))
            cols.append(cols_all)
            vals.append(np.full(basis.dim, amp * phase))
            continue
        for site, kind, sign in ops:
            occ = configs[:, site]
            if kind > 0:
                mask = totals < basis.n_ph
                factor = np.sqrt(occ[mask] + 1.0)
            else:
                mask = occ > 0
                factor = np.sqrt(occ[mask].astype(float))
            moved = configs[mask].copy()
            moved[:, site] += kind
            target = translate_config(moved, -shift)
            rows.append(basis.rank(target))
            cols.append(cols_all[mask])
            vals.append(sign * amp * factor * phase)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def assemble(K: Momentum, basis: FockBasis, params: ModelParams) -> SectorHamiltonian:
    """Sector-``K`` Hamiltonian in the symmetry-adapted basis (CSR, Hermitian)."""
    if basis.n_sites != params.N or basis.n_ph != params.N_ph:
        raise ValueError(
            f"basis is (N={basis.n_sites}, N_ph={basis.n_ph}) but params "
            f"ask for (N={params.N}, N_ph={params.N_ph})"
        )
    if K.N != params.N:
        raise ValueError(f"momentum defined for N={K.N}, params have N={params.N}")
    rows, cols, vals = _triplets(K, basis, params)
    dim = basis.dim
    h = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)
    h.sum_duplicates()
    # merging several duplicates is order dependent; averaging with the adjoint
    # makes h[i, j] == conj(h[j, i]) bit for bit
    h = ((h + h.conj().T) * 0.5).tocsr()
    h.sort_indices()
    return SectorHamiltonian(K, h, params)


def apply(h: SectorHamiltonian, v: np.ndarray) -> np.ndarray:
    """``H v`` for a vector of the sector dimension."""
    v = np.asarray(v)
    if v.shape != (h.dim,):
        raise ValueError(f"vector has shape {v.shape}, sector dimension is {h.dim}")
    return h.matrix @ v


_DUMP_MAGIC = b"PESH"
_DUMP_VERSION = 1
_HEADER = struct.Struct("<4sIQQqq")  # magic, version, dim, nnz, K index, N
_TRIPLET = np.dtype([("row", "<u8"), ("col", "<u8"), ("re", "<f8"), ("im", "<f8")])


def dump(h: SectorHamiltonian, path) -> None:
    """Write the matrix as a little-endian header followed by (row, col, re, im) triplets.

    Debugging aid only; the layout is not a stable interchange format.
    """
    coo = h.matrix.tocoo()
    rec = np.empty(coo.nnz, dtype=_TRIPLET)
    rec["row"], rec["col"] = coo.row, coo.col
    rec["re"], rec["im"] = coo.data.real, coo.data.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_DUMP_MAGIC, _DUMP_VERSION, h.dim, coo.nnz, h.K.j, h.K.N))
        fh.write(rec.tobytes())


def load_dump(path) -> tuple[Momentum, sp.csr_matrix]:
    raw = Path(path).read_bytes()
    magic, version, dim, nnz, j, N = _HEADER.unpack_from(raw)
    if magic != _DUMP_MAGIC or version != _DUMP_VERSION:
        raise ValueError(f"{path}: not a sector Hamiltonian dump")
    rec = np.frombuffer(raw, dtype=_TRIPLET, count=nnz, offset=_HEADER.size)
    data = rec["re"] + 1j * rec["im"]
    mat = sp.csr_matrix((data, (rec["row"], rec["col"])), shape=(dim, dim))
    return Momentum(j, N), mat
