"""Model parameters, effective couplings and momentum-space vertex functions.

Energies are measured in units of the hopping amplitude; by default
``t_e = 1`` and ``omega_ph`` is the adiabaticity ratio ``omega_ph / t_e``.
Only ``t_e > 0`` is supported.  The ``t_e < 0`` case maps onto it through the
gauge transform ``c_n -> (-1)^n c_n``, which moves the bare eigenstate from
``k = 0`` to ``k = pi``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the Peierls + breathing-mode ring."""

    g_P: float = 0.0
    g_BM: float = 0.0
    omega_ph: float = 1.0
    N: int = 8
    N_ph: int = 9
    t_e: float = 1.0

    def __post_init__(self):
        if not self.t_e > 0:
            raise ValueError(f"t_e must be positive, got {self.t_e}")
        if not self.omega_ph > 0:
            raise ValueError(f"omega_ph must be positive, got {self.omega_ph}")
        if self.g_P < 0 or self.g_BM < 0:
            raise ValueError("couplings g_P and g_BM must be non-negative")
        if self.N < 2:
            raise ValueError(f"N must be at least 2, got {self.N}")
        if self.N_ph < 0:
            raise ValueError(f"N_ph must be non-negative, got {self.N_ph}")

    @property
    def omega_ratio(self) -> float:
        return self.omega_ph / self.t_e

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


def lambda_P(params: ModelParams) -> float:
    """Effective Peierls coupling ``2 g_P^2 omega_ph / t_e``."""
    return 2.0 * params.g_P**2 * params.omega_ratio


def lambda_BM(params: ModelParams) -> float:
    """Effective breathing-mode coupling ``g_BM^2 omega_ph / t_e``."""
    return params.g_BM**2 * params.omega_ratio


def lambda_total(params: ModelParams) -> float:
    return lambda_P(params) + lambda_BM(params)


def g_P_from_lambda(lam: float, params: ModelParams) -> float:
    """Dimensionless Peierls coupling producing effective coupling ``lam``."""
    if lam < 0:
        raise ValueError(f"lambda_P must be non-negative, got {lam}")
    return math.sqrt(lam * params.t_e / (2.0 * params.omega_ph))


def g_BM_from_lambda(lam: float, params: ModelParams) -> float:
    if lam < 0:
        raise ValueError(f"lambda_BM must be non-negative, got {lam}")
    return math.sqrt(lam * params.t_e / params.omega_ph)


def vertex_P(k, q, params: ModelParams):
    return 2j * params.g_P * params.omega_ph * (np.sin(k) - np.sin(np.add(k, q)))


def vertex_BM(q, params: ModelParams):
    return 2j * params.g_BM * params.omega_ph * np.sin(q)


def vertex_total(k, q, params: ModelParams):
    """Total vertex ``gamma(k, q)`` for scattering ``k -> k + q``; purely imaginary.

    Accepts scalars or broadcastable arrays.
    """
    return vertex_P(k, q, params) + vertex_BM(q, params)


def _bz_grid(n_grid: int) -> np.ndarray:
    # uniform periodic trapezoid on (-pi, pi]: the endpoint weights merge
    return -np.pi + 2.0 * np.pi * (np.arange(n_grid) + 1) / n_grid


def bz_average(func, n_grid: int = 256) -> float:
    """Brillouin-zone average of ``func(k, q)`` over ``(-pi, pi]^2``."""
    k = _bz_grid(n_grid)
    kk, qq = np.meshgrid(k, k, indexing="ij")
    return float(np.mean(func(kk, qq)))


def lambda_from_quadrature(params: ModelParams, n_grid: int = 256) -> float:
    """``<|gamma|^2>_BZ / (2 t_e omega_ph)`` evaluated numerically."""
    avg = bz_average(lambda k, q: np.abs(vertex_total(k, q, params)) ** 2, n_grid)
    return avg / (2.0 * params.t_e * params.omega_ph)


def cross_term_average(params: ModelParams, n_grid: int = 256) -> float:
    """BZ average of ``2 Re[conj(gamma_P) gamma_BM]``; vanishes analytically."""

    def cross(k, q):
        return 2.0 * np.real(np.conj(vertex_P(k, q, params)) * vertex_BM(q, params))

    return bz_average(cross, n_grid)
