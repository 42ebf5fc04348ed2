"""Command-line front end.

Subcommands: verify | solve-min | solve-mp | norm | lambda-star.
Exit codes: 0 success, 1 check/solve failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config
from .energy import REG_EPS
from .errors import ConfigError, DoublePhaseError, FieldShapeError
from .exponents import validate_hypotheses
from .grid import GridFunction
from .outputs import (
    read_field_csv,
    write_field_csv,
    write_history_csv,
    write_json,
    write_manifest,
    write_matrix_csv,
    write_path_profile_csv,
)
from .solvers import (
    bump_function,
    dedupe_with_negatives,
    distinctness_matrix,
    find_endpoint,
    lambda_star_search,
    minimize_energy,
    mountain_pass,
)
from .spaces import luxemburg_norm, modular, sobolev_norm
from .verification import run_all_checks

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doublephase",
        description="Double-phase variable-exponent energies: checks, minimizers, saddle points.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="INI config file")
        p.add_argument("--seed", type=int, default=None, help="override sampling seed")
        p.add_argument("--out", type=Path, default=None, help="override output directory")
        p.add_argument(
            "--override-hypotheses",
            action="store_true",
            help="run even when the theorem hypotheses fail (logged in the manifest)",
        )

    common(sub.add_parser("verify", help="run every inequality/geometry check"))
    common(sub.add_parser("solve-min", help="bump, threshold search, global minimization"))
    common(sub.add_parser("solve-mp", help="endpoint, saddle search, multi-solution sweep"))
    common(sub.add_parser("lambda-star", help="threshold-parameter search only"))
    p_norm = sub.add_parser("norm", help="norms of a stored field under the configured exponents")
    common(p_norm)
    p_norm.add_argument("field", type=Path, help="field CSV (x1..xN,value rows)")
    return parser


def _prepare(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = str(args.out)
    if getattr(args, "override_hypotheses", False):
        cfg.override_hypotheses = True
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid()
    exps = cfg.exponents()
    return cfg, out_dir, grid, exps


def _hyp_reports(exps):
    return {
        "mountain": validate_hypotheses(exps, "mountain").to_dict(),
        "coercive": validate_hypotheses(exps, "coercive").to_dict(),
    }


def _gate_or_fail(cfg, out_dir, exps, form: str, hyps) -> bool:
    if hyps[form]["passed"] or cfg.override_hypotheses:
        return True
    write_json(out_dir / "hypothesis_reports.json", hyps)
    failing = [c["name"] for c in hyps[form]["conditions"] if not c["satisfied"]]
    print(f"{form} hypotheses fail: {', '.join(failing)}", file=sys.stderr)
    print(f"report written to {out_dir / 'hypothesis_reports.json'}", file=sys.stderr)
    return False


def cmd_verify(args) -> int:
    cfg, out_dir, grid, exps = _prepare(args)
    hyps = _hyp_reports(exps)
    lam = cfg.lam if cfg.lam is not None else 1.0
    reports = run_all_checks(exps, lam=lam, seed=cfg.seed, on_error="report")
    for rep in reports:
        write_json(out_dir / f"check_{rep.name}.json", rep.to_dict())
        status = "pass" if rep.passed else "FAIL"
        print(f"{status}  {rep.name}  samples={rep.samples} failures={rep.failures}")
    write_json(out_dir / "hypothesis_reports.json", hyps)
    write_manifest(out_dir, cfg.echo(), hyps, extra={"lambda": lam, "reg_eps": REG_EPS})
    all_ok = (
        bool(reports)
        and all(r.passed for r in reports)
        and hyps["mountain"]["passed"]
        and hyps["coercive"]["passed"]
    )
    for form in ("mountain", "coercive"):
        status = "pass" if hyps[form]["passed"] else "FAIL"
        print(f"{status}  hypotheses[{form}]")
    return EXIT_OK if all_ok else EXIT_FAIL


def cmd_lambda_star(args) -> int:
    cfg, out_dir, grid, exps = _prepare(args)
    hyps = _hyp_reports(exps)
    if not _gate_or_fail(cfg, out_dir, exps, "coercive", hyps):
        return EXIT_FAIL
    bump = bump_function(grid, cfg.t0, cfg.bump_box())
    report = lambda_star_search(exps, bump, cfg.lam_grid())
    write_field_csv(out_dir / "bump.csv", bump.fn)
    write_json(out_dir / "lambda_star.json", report.to_dict())
    write_manifest(out_dir, cfg.echo(), hyps, extra={"reg_eps": REG_EPS})
    print(
        f"lambda_star={report.lam_star!r} exact={report.lam_star_exact!r} "
        f"bound={report.analytic_bound!r}"
    )
    return EXIT_OK


def cmd_solve_min(args) -> int:
    cfg, out_dir, grid, exps = _prepare(args)
    hyps = _hyp_reports(exps)
    if not _gate_or_fail(cfg, out_dir, exps, "coercive", hyps):
        return EXIT_FAIL
    bump = bump_function(grid, cfg.t0, cfg.bump_box())
    star = lambda_star_search(exps, bump, cfg.lam_grid())
    if cfg.lam is None:
        lam = 2.0 * star.lam_star
        lam_source = "auto: 2 * lambda_star"
    else:
        lam = cfg.lam
        lam_source = "config"
    result = minimize_energy(
        lam, exps, bump.fn, cfg.solver_options(), override_hypotheses=cfg.override_hypotheses
    )
    write_json(out_dir / "lambda_star.json", star.to_dict())
    write_field_csv(out_dir / "solution.csv", result.u)
    write_history_csv(out_dir / "history.csv", result.history)
    write_json(
        out_dir / "solve_min.json",
        {
            "lambda": lam,
            "lambda_source": lam_source,
            "termination": result.termination,
            "iterations": result.iterations,
            "residual": result.residual,
            "energy": result.energy.to_dict(),
            "solution_grad_norm": sobolev_norm(result.u, exps.pmax),
        },
    )
    write_manifest(
        out_dir, cfg.echo(), hyps,
        extra={"lambda": lam, "lambda_source": lam_source, "reg_eps": REG_EPS},
    )
    print(
        f"{result.termination}: iterations={result.iterations} "
        f"residual={result.residual!r} energy={result.energy.total!r}"
    )
    return EXIT_OK if result.converged else EXIT_FAIL


def cmd_solve_mp(args) -> int:
    cfg, out_dir, grid, exps = _prepare(args)
    hyps = _hyp_reports(exps)
    if not _gate_or_fail(cfg, out_dir, exps, "mountain", hyps):
        return EXIT_FAIL
    lam = cfg.lam if cfg.lam is not None else 1.0
    seeds = [bump_function(grid, cfg.seed_t0, box).fn for box in cfg.seed_boxes()]
    opts = cfg.solver_options()

    # run seeds individually so each path profile can be recorded
    snap_iters = (0,) + tuple(2**j for j in range(24))
    results = []
    profiles = []
    for i, seed_fn in enumerate(seeds):
        e, _ = find_endpoint(lam, exps, seed_fn)
        res = mountain_pass(
            lam, exps, e, K=cfg.path_points, opts=opts,
            override_hypotheses=cfg.override_hypotheses, snapshot_iters=snap_iters,
        )
        profiles.append((i, res.path_snapshots or []))
        results.append(res)
    solutions = dedupe_with_negatives(results, lam, exps)

    for i, snaps in profiles:
        write_path_profile_csv(out_dir / f"path_profile_seed{i}.csv", snaps)
    summary = []
    for j, sol in enumerate(solutions):
        write_field_csv(out_dir / f"solution_{j:02d}.csv", sol.u)
        write_history_csv(out_dir / f"history_{j:02d}.csv", sol.history)
        summary.append(
            {
                "index": j,
                "energy": sol.energy.to_dict(),
                "residual": sol.residual,
                "iterations": sol.iterations,
                "termination": sol.termination,
                "grad_norm": sobolev_norm(sol.u, exps.pmax),
            }
        )
    if solutions:
        write_matrix_csv(out_dir / "distinct_matrix.csv", distinctness_matrix(solutions, exps))
    write_json(out_dir / "solve_mp.json", {"lambda": lam, "solutions": summary})
    write_manifest(out_dir, cfg.echo(), hyps, extra={"lambda": lam, "reg_eps": REG_EPS})
    print(f"distinct solutions: {len(solutions)} (lambda={lam!r})")
    return EXIT_OK if solutions else EXIT_FAIL


def cmd_norm(args) -> int:
    cfg, out_dir, grid, exps = _prepare(args)
    u = read_field_csv(args.field, grid)
    boundary_zero = not np.any(u.values[grid.boundary_mask()])
    if boundary_zero:
        u = GridFunction(grid, u.values, bc_zero=True)
    rows = {}
    for name, p in (("p1", exps.p1), ("p2", exps.p2), ("pmax", exps.pmax), ("q", exps.q)):
        mod = modular(u, p)
        lux, _ = luxemburg_norm(u, p)
        grad = sobolev_norm(u, p) if boundary_zero else None
        rows[name] = {"modular": mod, "luxemburg": lux, "gradient_luxemburg": grad}
        grad_txt = repr(grad) if grad is not None else "n/a (nonzero boundary)"
        print(f"{name}: modular={mod!r} luxemburg={lux!r} gradient_luxemburg={grad_txt}")
    write_json(out_dir / "norms.json", {"field": str(args.field), "norms": rows})
    return EXIT_OK


_COMMANDS = {
    "verify": cmd_verify,
    "solve-min": cmd_solve_min,
    "solve-mp": cmd_solve_mp,
    "lambda-star": cmd_lambda_star,
    "norm": cmd_norm,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FieldShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DoublePhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
