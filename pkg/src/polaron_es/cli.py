"""Command-line interface: ``polaron-es {sweep,converge,spectrum,verify}``.

Exit codes: 0 success, 1 configuration error, 2 solver failure (strict
mode) or failed verification, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .eigensolver import ConvergenceError, ground_state_over_K
from .emit import ConfigError, OutputError, config_from_dict, emit, fmt, read_config_dict
from .entanglement import analyze, bare_overlap
from .fock import cached_basis
from .hamiltonian import allowed_momenta
from .model import lambda_BM
from .sweep import converge, detect_transitions, point_params, refine_transition, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("polaron_es")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--g-bm", type=float, dest="g_BM")
    p.add_argument("--n", type=int, dest="N", help="number of sites")
    p.add_argument("--n-ph", type=int, dest="N_ph", help="cap on the total phonon number")
    p.add_argument("--tol", type=float, help="Lanczos residual tolerance")
    p.add_argument("--seed", type=int, help="Lanczos start-vector seed")
    p.add_argument("--max-iter", type=int, dest="max_iter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polaron-es", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="sweep lambda_P at fixed g_BM for each omega ratio")
    _add_model_flags(p)
    p.add_argument("--omega-ratio", type=float, action="append", dest="omega_ratios",
                   help="adiabaticity ratio omega_ph/t_e (repeatable)")
    p.add_argument("--lambda-min", type=float, dest="lambda_start")
    p.add_argument("--lambda-max", type=float, dest="lambda_stop")
    p.add_argument("--step", type=float, dest="lambda_step")
    p.add_argument("--out", dest="out_dir", help="output directory")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-figures", action="store_false", dest="figures", default=None)
    p.add_argument("--strict", action="store_true", default=None,
                   help="exit with status 2 if any grid point fails")
    p.add_argument("--refine", action="store_true", help="bisect each transition to 1e-3 in lambda_P")

    p = sub.add_parser("converge", help="certify the truncation at one parameter point")
    _add_model_flags(p)
    p.add_argument("--lambda-p", type=float, default=2.0, dest="lambda_P")
    p.add_argument("--omega-ratio", type=float, default=1.0, dest="omega_ratio")
    p.add_argument("--min-nph", type=int, default=1)
    p.add_argument("--max-nph", type=int, required=True)
    p.add_argument("--entropy", action="store_true", help="also track S_E")

    p = sub.add_parser("spectrum", help="entanglement spectrum at a single point")
    _add_model_flags(p)
    p.add_argument("--lambda-p", type=float, required=True, dest="lambda_P")
    p.add_argument("--omega-ratio", type=float, default=1.0, dest="omega_ratio")

    p = sub.add_parser("verify", help="run oracle and invariant self-checks")
    p.add_argument("--small", action="store_true", help="only the small-system checks")
    return parser


def _config(args, **extra):
    data = read_config_dict(args.config) if getattr(args, "config", None) else {}
    overrides = {k: getattr(args, k, None) for k in ("g_BM", "N", "N_ph", "tol", "seed", "max_iter")}
    overrides.update(extra)
    return config_from_dict(data, **overrides)


def cmd_sweep(args) -> int:
    cfg = _config(
        args,
        omega_ratios=args.omega_ratios,
        lambda_start=args.lambda_start,
        lambda_stop=args.lambda_stop,
        lambda_step=args.lambda_step,
        out_dir=args.out_dir,
        workers=args.workers,
        figures=args.figures,
        strict=args.strict,
    )
    result = run_sweep(cfg)
    if args.refine:
        refined = {}
        for omega in cfg.omega_ratios:
            rows = [r for r in result.rows if r.omega_ratio == omega]
            refined[str(omega)] = [
                refine_transition(t, cfg.g_BM, cfg.N, cfg.N_ph, cfg.solver).__dict__
                for t in detect_transitions(rows)
            ]
        result.metadata["transitions"] = refined
    written = emit(result, cfg.out_dir, cfg.N, figures=cfg.figures)
    for kind, path in written.items():
        print(f"{kind}: {path}")
    for omega, trs in result.metadata["transitions"].items():
        for t in trs:
            where = f"{t['lambda_lo']:.4g}..{t['lambda_hi']:.4g}"
            print(f"omega={omega}: K_gs/pi {t['K_from_over_pi']:g} -> {t['K_to_over_pi']:g} in [{where}]")
    failed = result.metadata["failed_points"]
    if failed:
        print(f"{failed} grid point(s) failed", file=sys.stderr)
        if cfg.strict:
            return EXIT_SOLVER
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _config(args)
    omega = args.omega_ratio
    if args.min_nph > args.max_nph:
        raise ConfigError(f"--min-nph {args.min_nph} exceeds --max-nph {args.max_nph}")
    params = point_params(args.lambda_P, cfg.g_BM, omega, cfg.N, args.max_nph)
    schedule = [(cfg.N, n) for n in range(args.min_nph, args.max_nph + 1)]
    report = converge(params, schedule, cfg.solver, with_entropy=args.entropy)
    print(f"# lambda_P={args.lambda_P} g_BM={cfg.g_BM} omega/t={omega} N={cfg.N}")
    print("N\tN_ph\tE_gs\trel_change" + ("\tS_E" if args.entropy else ""))
    for pt in report.trace:
        rel = "-" if pt.rel_change is None else f"{pt.rel_change:.3e}"
        line = f"{pt.N}\t{pt.N_ph}\t{fmt(pt.E_gs)}\t{rel}"
        if args.entropy:
            line += f"\t{fmt(pt.S_E)}"
        print(line)
    if report.converged:
        c = report.certified
        print(f"certified at N={c.N}, N_ph={c.N_ph} (relative change < {report.threshold:g})")
    else:
        print(f"NOT converged: no step below relative change {report.threshold:g}")
    print(f"energy monotone in N_ph: {report.monotone()}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    omega = args.omega_ratio
    params = point_params(args.lambda_P, cfg.g_BM, omega, cfg.N, cfg.N_ph)
    basis = cached_basis(cfg.N, cfg.N_ph)
    gs = ground_state_over_K(params, basis, cfg.solver)
    res = analyze(gs, basis)
    print(f"# lambda_P={args.lambda_P} g_P={params.g_P:.12g} g_BM={cfg.g_BM} "
          f"lambda_BM={lambda_BM(params):.6g} omega/t={omega} N={cfg.N} N_ph={cfg.N_ph}")
    partner = f" (degenerate with {gs.degenerate_partner.over_pi:g} pi)" if gs.degenerate else ""
    print(f"K_gs = {gs.K_gs.over_pi:g} pi{partner}")
    print(f"E_gs = {fmt(gs.energy)}")
    print(f"S_E = {fmt(res.entropy)}")
    print(f"bare_overlap = {fmt(bare_overlap(gs))}")
    print("alpha\txi\te^-xi")
    for a, (xi, w) in enumerate(zip(res.spectrum.xis, res.spectrum.weights), start=1):
        print(f"{a}\t{fmt(xi)}\t{fmt(w)}")
    print("sector energies:")
    for K in allowed_momenta(cfg.N):
        print(f"  K={K.over_pi:+g} pi\t{fmt(gs.sector_energies[K.j])}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    checks = run_checks(small=args.small)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    n_fail = sum(not c.passed for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_SOLVER


COMMANDS = {"sweep": cmd_sweep, "converge": cmd_converge, "spectrum": cmd_spectrum, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
