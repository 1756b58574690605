"""Truncated phonon Fock basis on an N-site ring.

A phonon configuration is the occupation vector ``m = (m_0, ..., m_{N-1})``
with ``sum(m) <= n_ph``.  Configurations are stored as rows of a ``uint8``
array in lexicographic order (site 0 most significant), and ranked with the
combinatorial number system so no hash table is needed.

Sites are indexed from 0 here.  A translation by ``shift`` moves the phonon
at site ``l`` to site ``l + shift (mod N)``, i.e. the translated occupation at
site ``l`` is ``m[(l - shift) % N]``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

MAX_PHONONS = int(np.iinfo(np.uint8).max)


class SizingError(ValueError):
    """The requested basis cannot be indexed on this platform."""


def basis_dimension(n_sites: int, n_ph: int) -> int:
    """Number of occupation vectors over ``n_sites`` sites with total ``<= n_ph``."""
    return comb(n_ph + n_sites, n_sites)


@lru_cache(maxsize=None)
def _count_table(n_sites: int, n_ph: int) -> np.ndarray:
    # count[k, b]: number of k-site configs with total <= b
    table = np.zeros((n_sites + 1, n_ph + 1), dtype=np.int64)
    for k in range(n_sites + 1):
        for b in range(n_ph + 1):
            table[k, b] = comb(b + k, k)
    return table


@lru_cache(maxsize=None)
def _offset_table(n_sites: int, n_ph: int) -> np.ndarray:
    # offset[i, rem, v]: configs that agree on sites < i, have remaining budget
    # rem at site i, and put strictly fewer than v phonons on site i
    count = _count_table(n_sites, n_ph)
    off = np.zeros((n_sites, n_ph + 1, n_ph + 2), dtype=np.int64)
    for i in range(n_sites):
        tail = n_sites - i - 1
        for rem in range(n_ph + 1):
            acc = 0
            for v in range(rem + 1):
                off[i, rem, v] = acc
                acc += count[tail, rem - v]
            off[i, rem, rem + 1] = acc
    return off


def _enumerate(n_sites: int, n_ph: int) -> np.ndarray:
    # build sites right to left; blocks[b] holds all configs of the tail with total <= b
    blocks = [np.zeros((1, 0), dtype=np.uint8) for _ in range(n_ph + 1)]
    for _ in range(n_sites):
        new_blocks = []
        for b in range(n_ph + 1):
            parts = []
            for v in range(b + 1):
                tail = blocks[b - v]
                head = np.full((tail.shape[0], 1), v, dtype=np.uint8)
                parts.append(np.hstack([head, tail]))
            new_blocks.append(np.vstack(parts))
        blocks = new_blocks
    return blocks[n_ph]


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Immutable, lexicographically ordered phonon basis with O(N) ranking.

    Attributes
    ----------
    n_sites, n_ph : int
        Ring size and cap on the total phonon number.
    configs : ndarray, shape (dim, n_sites), uint8
        Occupation vectors; ``configs[i]`` has rank ``i``.
    """

    n_sites: int
    n_ph: int
    configs: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.configs.shape[0]

    def __len__(self) -> int:
        return self.dim

    def totals(self) -> np.ndarray:
        """Total phonon number of every basis state."""
        return self.configs.sum(axis=1, dtype=np.int64)

    def rank(self, occ) -> np.ndarray | int:
        """Index of one config (1-D input) or of each row of a 2-D array.

        Rows must be valid members of the basis; use :meth:`contains` first
        when that is not guaranteed.
        """
        occ = np.asarray(occ)
        single = occ.ndim == 1
        rows = np.atleast_2d(occ).astype(np.int64)
        if rows.shape[1] != self.n_sites:
            raise ValueError(f"expected {self.n_sites} occupations, got {rows.shape[1]}")
        off = _offset_table(self.n_sites, self.n_ph)
        rem = np.full(rows.shape[0], self.n_ph, dtype=np.int64)
        idx = np.zeros(rows.shape[0], dtype=np.int64)
        for i in range(self.n_sites):
            v = rows[:, i]
            idx += off[i, rem, v]
            rem -= v
        return int(idx[0]) if single else idx

    def unrank(self, index: int) -> np.ndarray:
        return self.configs[index].copy()

    def contains(self, occ) -> np.ndarray | bool:
        """Whether config(s) are non-negative and within the phonon cap."""
        occ = np.asarray(occ)
        rows = np.atleast_2d(occ).astype(np.int64)
        ok = (rows >= 0).all(axis=1) & (rows.sum(axis=1) <= self.n_ph)
        return bool(ok[0]) if occ.ndim == 1 else ok

    @property
    def translation_table(self) -> np.ndarray:
        """``table[s, i]`` is the rank of ``translate_config(configs[i], s)``."""
        return _translation_table(self)


@lru_cache(maxsize=16)
def _translation_table(basis: FockBasis) -> np.ndarray:
    table = np.empty((basis.n_sites, basis.dim), dtype=np.int64)
    for s in range(basis.n_sites):
        table[s] = basis.rank(np.roll(basis.configs, s, axis=1))
    table.setflags(write=False)
    return table


def enumerate_basis(n_sites: int, n_ph: int) -> FockBasis:
    """All occupation vectors on ``n_sites`` sites with total at most ``n_ph``."""
    if n_sites < 2:
        raise ValueError(f"need at least 2 sites, got {n_sites}")
    if n_ph < 0:
        raise ValueError(f"phonon cap must be non-negative, got {n_ph}")
    if n_ph > MAX_PHONONS:
        raise SizingError(f"phonon cap {n_ph} exceeds 8-bit occupation width")
    dim = basis_dimension(n_sites, n_ph)
    if dim > sys.maxsize or dim > np.iinfo(np.intp).max:
        raise SizingError(f"basis dimension {dim} exceeds the platform index range")
    configs = _enumerate(n_sites, n_ph)
    assert configs.shape == (dim, n_sites)
    configs.setflags(write=False)
    return FockBasis(n_sites, n_ph, configs)


def site_map(l: int, n: int, n_sites: int) -> int:
    """1-based source site feeding site ``l`` after translating by ``n``.

    ``N - n + l`` for ``l <= n``, else ``l - n``.
    """
    return n_sites - n + l if l <= n else l - n


def translate_config(occ, shift: int) -> np.ndarray:
    """Translate an occupation vector by ``shift`` sites along the ring."""
    occ = np.asarray(occ)
    return np.roll(occ, shift % occ.shape[-1], axis=-1)


def overlap_translated(occ_bra, occ_ket, shift: int) -> int:
    """``<m'|T_shift m>`` for Fock states: 1 if occupations match, else 0."""
    return int(np.array_equal(np.asarray(occ_bra), translate_config(occ_ket, shift)))


@lru_cache(maxsize=8)
def cached_basis(n_sites: int, n_ph: int) -> FockBasis:
    """Process-wide shared basis; safe because bases are immutable."""
    return enumerate_basis(n_sites, n_ph)
