"""CSV / JSON serialization of sweep results and config loading."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import fields
from pathlib import Path

from .eigensolver import SolverSettings
from .sweep import LambdaGrid, SweepConfig, SweepResult, SweepRow


class ConfigError(ValueError):
    pass


class OutputError(OSError):
    def __init__(self, path, exc):
        super().__init__(f"{path}: {exc}")
        self.path = Path(path)


def csv_columns(N: int) -> list[str]:
    return (
        ["lambda_P", "g_P", "g_BM", "omega_ratio", "K_gs_over_pi", "degenerate", "E_gs", "S_E"]
        + [f"xi_{a}" for a in range(1, N + 1)]
        + ["bare_overlap", "status"]
    )


def fmt(x: float) -> str:
    """17 significant digits; infinities print as ``inf``."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _row_cells(row: SweepRow) -> list[str]:
    return (
        [fmt(row.lambda_P), fmt(row.g_P), fmt(row.g_BM), fmt(row.omega_ratio),
         fmt(row.K_gs_over_pi), "1" if row.degenerate else "0", fmt(row.E_gs), fmt(row.S_E)]
        + [fmt(x) for x in row.xis]
        + [fmt(row.bare_overlap), row.status]
    )


def _open_for_write(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OutputError(path, exc) from exc


def write_csv(rows, path, N: int) -> Path:
    path = Path(path)
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_columns(N))
        for row in rows:
            w.writerow(_row_cells(row))
    return path


def read_csv(path) -> list[SweepRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_xi = sum(1 for h in header if h.startswith("xi_"))
        rows = []
        for cells in reader:
            vals = [float(c) for c in cells[:8]]
            xis = tuple(float(c) for c in cells[8 : 8 + n_xi])
            rows.append(
                SweepRow(
                    lambda_P=vals[0], g_P=vals[1], g_BM=vals[2], omega_ratio=vals[3],
                    K_gs_over_pi=vals[4], degenerate=cells[5] == "1", E_gs=vals[6], S_E=vals[7],
                    xis=xis, bare_overlap=float(cells[8 + n_xi]), status=cells[9 + n_xi],
                )
            )
    return rows


def write_metadata(meta: dict, path) -> Path:
    path = Path(path)
    with _open_for_write(path) as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


FIGURE_QUANTITIES = ("S_E", "xi_1", "xi_2", "xi_3", "xi_4")


def write_figure_file(rows, path, g_BM: float) -> Path:
    """One table per BM coupling: ``lambda_P`` then a column group per omega ratio.

    Each group holds ``S_E`` and ``xi_1..xi_4``, the quantities plotted
    against lambda_P.
    """
    rows = [r for r in rows if r.g_BM == g_BM]
    omegas = sorted({r.omega_ratio for r in rows})
    lambdas = sorted({r.lambda_P for r in rows})
    table = {(r.omega_ratio, r.lambda_P): r for r in rows}
    header = ["lambda_P"] + [f"{q}@omega={fmt(w)}" for w in omegas for q in FIGURE_QUANTITIES]
    path = Path(path)
    with _open_for_write(path) as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for lam in lambdas:
            cells = [fmt(lam)]
            for w in omegas:
                r = table.get((w, lam))
                if r is None:
                    cells += ["nan"] * len(FIGURE_QUANTITIES)
                    continue
                cells.append(fmt(r.S_E))
                cells += [fmt(r.xis[a]) if a < len(r.xis) else "nan" for a in range(4)]
            out.writerow(cells)
    return path


def emit(result: SweepResult, out_dir, N: int, figures: bool = True, stem: str = "sweep") -> dict:
    """Write the sweep CSV, its JSON sidecar, and optionally the figure tables."""
    out_dir = Path(out_dir)
    written = {"csv": write_csv(result.rows, out_dir / f"{stem}.csv", N)}
    written["metadata"] = write_metadata(result.metadata, out_dir / f"{stem}.json")
    if figures:
        for g in sorted({r.g_BM for r in result.rows}):
            written[f"figure_gBM={g}"] = write_figure_file(
                result.rows, out_dir / f"figure_gBM{fmt(g)}.csv", g
            )
    return written


# config ------------------------------------------------------------------------

_TOP_KEYS = {"g_BM", "omega_ratios", "lambda_P_grid", "N", "N_ph", "solver", "outputs", "workers", "strict"}
_GRID_KEYS = {f.name for f in fields(LambdaGrid)}
_SOLVER_KEYS = {f.name for f in fields(SolverSettings)}
_OUTPUT_KEYS = {"dir", "figures"}


def _reject_unknown(section: str, given: dict, allowed: set) -> None:
    if not isinstance(given, dict):
        raise ConfigError(f"{section}: expected an object, got {type(given).__name__}")
    extra = sorted(set(given) - allowed)
    if extra:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(extra)}")


def config_from_dict(data: dict, **overrides) -> SweepConfig:
    """Build a ``SweepConfig``; keyword overrides (CLI flags) win over the file.

    Unknown keys anywhere in the document are errors.
    """
    _reject_unknown("config", data, _TOP_KEYS)
    grid = dict(data.get("lambda_P_grid", {}))
    _reject_unknown("lambda_P_grid", grid, _GRID_KEYS)
    solver = dict(data.get("solver", {}))
    _reject_unknown("solver", solver, _SOLVER_KEYS)
    outputs = dict(data.get("outputs", {}))
    _reject_unknown("outputs", outputs, _OUTPUT_KEYS)

    kw = {k: data[k] for k in ("g_BM", "N", "N_ph", "workers", "strict") if k in data}
    if "omega_ratios" in data:
        kw["omega_ratios"] = data["omega_ratios"]
    if "dir" in outputs:
        kw["out_dir"] = outputs["dir"]
    if "figures" in outputs:
        kw["figures"] = outputs["figures"]

    for key in ("lambda_start", "lambda_stop", "lambda_step"):
        val = overrides.pop(key, None)
        if val is not None:
            grid[key.removeprefix("lambda_")] = val
    for key in list(overrides):
        if key in _SOLVER_KEYS:
            val = overrides.pop(key)
            if val is not None:
                solver[key] = val
    kw.update({k: v for k, v in overrides.items() if v is not None})

    try:
        if "omega_ratios" in kw:
            ratios = kw["omega_ratios"]
            ratios = [ratios] if isinstance(ratios, (int, float)) else ratios
            kw["omega_ratios"] = tuple(float(w) for w in ratios)
        for w in kw.get("omega_ratios", ()):
            if not w > 0:
                raise ValueError(f"omega ratios must be positive, got {w}")
        return SweepConfig(
            lambda_P_grid=LambdaGrid(**{k: float(v) for k, v in grid.items()}),
            solver=SolverSettings(**solver),
            **kw,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def read_config_dict(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def load_config(path, **overrides) -> SweepConfig:
    return config_from_dict(read_config_dict(path), **overrides)
