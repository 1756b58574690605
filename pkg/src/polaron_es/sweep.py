"""Coupling sweeps, level-crossing detection and truncation convergence."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .eigensolver import ConvergenceError, SolverSettings, ground_state_over_K, lowest_eigenpair
from .entanglement import InvalidDensityMatrix, analyze, bare_overlap
from .fock import cached_basis
from .hamiltonian import Momentum, assemble
from .model import ModelParams, g_P_from_lambda

log = logging.getLogger(__name__)

DEFAULT_OMEGA_RATIOS = (0.5, 1.0, 2.0)
CONVERGENCE_THRESHOLD = 1e-4


@dataclass(frozen=True)
class LambdaGrid:
    start: float = 0.0
    stop: float = 3.2
    step: float = 0.05

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if self.stop < self.start:
            raise ValueError(f"grid stop {self.stop} is below start {self.start}")

    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        # rounding keeps grid values free of accumulated representation error
        return np.round(self.start + self.step * np.arange(n + 1), 12)


@dataclass(frozen=True)
class SweepConfig:
    g_BM: float = 0.25
    omega_ratios: tuple = DEFAULT_OMEGA_RATIOS
    lambda_P_grid: LambdaGrid = LambdaGrid()
    N: int = 8
    N_ph: int = 9
    solver: SolverSettings = SolverSettings()
    out_dir: str = "sweep_out"
    figures: bool = True
    workers: int = 1
    strict: bool = False

    def __post_init__(self):
        if not self.omega_ratios:
            raise ValueError("at least one adiabaticity ratio is required")
        if self.g_BM < 0:
            raise ValueError(f"g_BM must be non-negative, got {self.g_BM}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["omega_ratios"] = list(self.omega_ratios)
        return d


@dataclass(frozen=True)
class SweepRow:
    lambda_P: float
    g_P: float
    g_BM: float
    omega_ratio: float
    K_gs_over_pi: float
    degenerate: bool
    E_gs: float
    S_E: float
    xis: tuple
    bare_overlap: float
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class SweepResult:
    rows: list
    metadata: dict = field(default_factory=dict)


def point_params(lambda_P: float, g_BM: float, omega_ratio: float, N: int, N_ph: int) -> ModelParams:
    base = ModelParams(g_BM=g_BM, omega_ph=omega_ratio, N=N, N_ph=N_ph)
    return base.with_(g_P=g_P_from_lambda(lambda_P, base))


def solve_point(
    lambda_P: float, g_BM: float, omega_ratio: float, N: int, N_ph: int, settings: SolverSettings
) -> SweepRow:
    """Ground state, entanglement spectrum and entropy at one grid point.

    Solver failures do not raise; they come back as a row with a non-"ok"
    status and NaN observables.
    """
    params = point_params(lambda_P, g_BM, omega_ratio, N, N_ph)
    basis = cached_basis(N, N_ph)
    try:
        gs = ground_state_over_K(params, basis, settings)
        ent = analyze(gs, basis)
    except (ConvergenceError, InvalidDensityMatrix) as exc:
        log.warning("lambda_P=%g omega=%g failed: %s", lambda_P, omega_ratio, exc)
        nan = float("nan")
        return SweepRow(
            lambda_P, params.g_P, g_BM, omega_ratio, nan, False, nan, nan,
            (nan,) * N, nan, status=f"error: {exc}",
        )
    return SweepRow(
        lambda_P=float(lambda_P),
        g_P=params.g_P,
        g_BM=g_BM,
        omega_ratio=omega_ratio,
        K_gs_over_pi=gs.K_gs.over_pi,
        degenerate=gs.degenerate,
        E_gs=gs.energy,
        S_E=ent.entropy,
        xis=tuple(float(x) for x in ent.spectrum.xis),
        bare_overlap=bare_overlap(gs),
    )


def _solve_job(args):
    return solve_point(*args)


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Solve every (omega ratio, lambda_P) grid point.

    Rows are ordered by omega ratio (config order) and then by lambda_P,
    independent of the order in which workers finish.
    """
    t0 = time.perf_counter()
    grid = cfg.lambda_P_grid.values()
    jobs = [
        (float(lam), cfg.g_BM, float(omega), cfg.N, cfg.N_ph, cfg.solver)
        for omega in cfg.omega_ratios
        for lam in grid
    ]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_solve_job, jobs))
    else:
        rows = [_solve_job(job) for job in jobs]
    elapsed = time.perf_counter() - t0
    meta = sweep_metadata(cfg)
    meta["timings"] = {"total_seconds": elapsed, "points": len(jobs)}
    meta["failed_points"] = sum(not r.ok for r in rows)
    meta["transitions"] = {
        str(omega): [asdict(t) for t in detect_transitions([r for r in rows if r.omega_ratio == omega])]
        for omega in cfg.omega_ratios
    }
    return SweepResult(rows, meta)


def sweep_metadata(cfg: SweepConfig) -> dict:
    from . import __version__

    import scipy

    return {
        "code_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "config": cfg.to_dict(),
        "units": {"energy": "t_e", "K_gs": "pi"},
        "defaults_where_unspecified": {
            "omega_ratios": list(DEFAULT_OMEGA_RATIOS),
            "omega_ratios_is_default": tuple(cfg.omega_ratios) == DEFAULT_OMEGA_RATIOS,
            "lanczos_convergence": "||Hv - Ev|| <= tol * max(1, |E|)",
            "lanczos_reorthogonalization": "full" if cfg.solver.reorth else "none",
            "start_vector": f"seeded complex Gaussian (seed {cfg.solver.seed})",
            "truncation": "projector: terms exceeding N_ph are dropped",
            "degeneracy_tie": "sectors +-K within 10*tol; K >= 0 reported",
            "zero_weight_cutoff": 1e-14,
            "lambda_step": cfg.lambda_P_grid.step,
        },
    }


# transitions -------------------------------------------------------------------


@dataclass(frozen=True)
class Transition:
    omega_ratio: float
    lambda_lo: float
    lambda_hi: float
    K_from_over_pi: float
    K_to_over_pi: float
    lambda_c: float | None = None


def detect_transitions(rows) -> list[Transition]:
    """Grid intervals across which the ground-state momentum changes.

    ``rows`` must belong to one adiabaticity ratio; failed rows are skipped.
    """
    good = sorted((r for r in rows if r.ok), key=lambda r: r.lambda_P)
    out = []
    for a, b in zip(good, good[1:]):
        if a.K_gs_over_pi != b.K_gs_over_pi:
            out.append(Transition(a.omega_ratio, a.lambda_P, b.lambda_P, a.K_gs_over_pi, b.K_gs_over_pi))
    return out


def _sector_energy(lam, j, g_BM, omega, N, N_ph, settings):
    params = point_params(lam, g_BM, omega, N, N_ph)
    h = assemble(Momentum(j, N), cached_basis(N, N_ph), params)
    return lowest_eigenpair(h, settings)[0]


def refine_transition(
    tr: Transition, g_BM: float, N: int, N_ph: int, settings: SolverSettings, width: float = 1e-3
) -> Transition:
    """Bisect the crossing of the two competing sectors down to ``width`` in lambda_P."""
    j_from = round(tr.K_from_over_pi * N / 2)
    j_to = round(tr.K_to_over_pi * N / 2)

    def gap(lam):
        args = (g_BM, tr.omega_ratio, N, N_ph, settings)
        return _sector_energy(lam, j_to, *args) - _sector_energy(lam, j_from, *args)

    lo, hi = tr.lambda_lo, tr.lambda_hi
    g_lo = gap(lo)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return Transition(tr.omega_ratio, lo, hi, tr.K_from_over_pi, tr.K_to_over_pi, 0.5 * (lo + hi))


def first_transition(rows) -> Transition | None:
    trs = detect_transitions(rows)
    return trs[0] if trs else None


def mimicry_correlation(rows) -> float | None:
    """Spearman correlation of xi_1 with S_E below the first transition.

    Only points where both are nonzero enter; ``None`` if fewer than three.
    """
    good = sorted((r for r in rows if r.ok), key=lambda r: r.lambda_P)
    tr = first_transition(good)
    below = [r for r in good if tr is None or r.lambda_P <= tr.lambda_lo]
    pts = [(r.xis[0], r.S_E) for r in below if r.xis[0] > 0 and r.S_E > 0]
    if len(pts) < 3:
        return None
    x, s = zip(*pts)
    return float(stats.spearmanr(x, s).statistic)


# convergence -------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergencePoint:
    N: int
    N_ph: int
    E_gs: float
    S_E: float | None
    rel_change: float | None


@dataclass(frozen=True)
class ConvergenceReport:
    trace: tuple
    certified_index: int | None
    threshold: float = CONVERGENCE_THRESHOLD

    @property
    def converged(self) -> bool:
        return self.certified_index is not None

    @property
    def certified(self) -> ConvergencePoint | None:
        return None if self.certified_index is None else self.trace[self.certified_index]

    def monotone(self) -> bool:
        """Energy non-increasing along steps that only raise N_ph at fixed N."""
        for a, b in zip(self.trace, self.trace[1:]):
            if a.N == b.N and b.N_ph >= a.N_ph and b.E_gs > a.E_gs + 1e-12 * max(1.0, abs(a.E_gs)):
                return False
        return True


def converge(
    params: ModelParams,
    schedule,
    settings: SolverSettings | None = None,
    with_entropy: bool = False,
    threshold: float = CONVERGENCE_THRESHOLD,
) -> ConvergenceReport:
    """Ground energy along increasing ``(N, N_ph)`` truncations.

    The certified point is the first step whose energy differs from the
    previous step by less than ``threshold`` relative.  The whole schedule is
    always evaluated so the report carries the full trace.
    """
    schedule = [tuple(map(int, p)) for p in schedule]
    if not schedule:
        raise ValueError("empty convergence schedule")
    settings = settings or SolverSettings()
    trace = []
    certified = None
    prev = None
    for i, (N, N_ph) in enumerate(schedule):
        p = params.with_(N=N, N_ph=N_ph)
        basis = cached_basis(N, N_ph)
        gs = ground_state_over_K(p, basis, settings)
        s_e = analyze(gs, basis).entropy if with_entropy else None
        rel = None if prev is None else abs(gs.energy - prev) / abs(gs.energy)
        if rel is not None and certified is None and rel < threshold:
            certified = i
        trace.append(ConvergencePoint(N, N_ph, gs.energy, s_e, rel))
        prev = gs.energy
    return ConvergenceReport(tuple(trace), certified, threshold)
