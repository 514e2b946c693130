"""Command-line front end.

    resolving-power binormal-curve --prevalence 0.01 --out curves/
    resolving-power binormal-sweep --profile desk --seed 1 --out sweep/
    resolving-power empirical scores.csv --replicates 2000 --out study/
    resolving-power simulate --auroc 0.65 --prevalence 0.01 --n 10000
    resolving-power se --auroc 0.65 --n-pos 100 --n-neg 9900

Exit codes: 0 success, 2 usage error (including unreadable files), 3 score-file
parse error, 4 numeric domain error (e.g. a confidence bound outside the
signal curve).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .binormal import (BinormalModel, PopulationSpec, binormal_signal_curve,
                       hanley_mcneil_se, normal_ci)
from .experiment import StudyKind, StudySpec, run_binormal_sweep, run_empirical_study
from .io import ScoreFileError, format_json, format_tsv, read_scores
from .noise import NoiseEstimate, SamplingPlan, simulate_metrics
from .resolve import format_sig
from .scores import DegenerateDataError, MetricId

log = logging.getLogger("resolving_power")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_DOMAIN = 0, 2, 3, 4

REPORT_COLUMNS = ["metric", "lower_ci", "upper_ci", "kappa", "resolving_power"]


class UsageError(Exception):
    pass


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


def _emit(args, name: str, text: str, stdout: bool = False) -> None:
    if args.out:
        path = Path(args.out) / name
        path.write_text(text, encoding="utf-8")
        log.info("wrote %s", path)
    if stdout or not args.out:
        sys.stdout.write(text)


def _report_table(report, fmt: str) -> str:
    rows = report.rows()
    if fmt == "json":
        return format_json(report.to_dict())
    return format_tsv(rows, REPORT_COLUMNS,
                      fmt=lambda v: v if isinstance(v, str) else format_sig(v))


def cmd_binormal_curve(args) -> int:
    _check(args.prevalence is not None and len(args.prevalence) == 1,
           "binormal-curve needs exactly one --prevalence")
    p = args.prevalence[0]
    _check(0 < p < 1, f"--prevalence must lie in (0, 1), got {p}")
    step = args.grid_step if args.grid_step is not None else 0.00005
    _check(0 < step < 0.5, "--grid-step must lie in (0, 0.5)")
    curve = binormal_signal_curve(p, step)
    if args.format == "json":
        text = format_json(dict(prevalence=p, auroc=curve.quality, auprc=curve.companion))
    else:
        text = format_tsv({"auroc": q, "auprc": c}
                          for q, c in zip(curve.quality.tolist(), curve.companion.tolist()))
    _emit(args, f"curve.{'json' if args.format == 'json' else 'tsv'}", text)
    return EXIT_OK


def _study_spec(args, kind: StudyKind) -> StudySpec:
    overrides = {}
    if args.prevalence is not None:
        overrides["prevalences"] = tuple(args.prevalence)
    if args.auroc is not None:
        overrides["quality_points"] = tuple(args.auroc)
    for flag, key in (("n", "sample_size"), ("replicates", "replicates"),
                      ("repeats", "repeats"), ("grid_step", "grid_step"),
                      ("alpha", "alpha"), ("average", "averaging"),
                      ("grid_points", "grid_points"), ("strategy", "strategy")):
        v = getattr(args, flag, None)
        if v is not None:
            overrides[key] = v
    overrides["master_seed"] = args.seed
    overrides["kind"] = kind
    if kind is StudyKind.EMPIRICAL_STUDY:
        overrides.setdefault("sample_size", None)
        if "grid_step" in overrides:
            overrides["target_step"] = overrides.pop("grid_step")
    profile = getattr(args, "profile", "desk")
    try:
        return (StudySpec.full if profile == "full" else StudySpec.desk)(**overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_binormal_sweep(args) -> int:
    spec = _study_spec(args, StudyKind.BINORMAL_SWEEP)
    log.info("sweep: %d cells x %d runs, %d replicates", len(spec.prevalences)
             * len(spec.quality_points), spec.repeats, spec.replicates)
    result = run_binormal_sweep(spec, workers=args.workers)
    cell_cols = ["prevalence", "quality", "label", "delta", "delta_min", "delta_max", "runs"]
    if args.out:
        _emit(args, "sweep.json", format_json(result.to_dict()))
        _emit(args, "sweep_runs.tsv", format_tsv(result.run_rows()))
        _emit(args, "sweep_cells.tsv", format_tsv(result.cell_rows(), cell_cols))
    if args.format == "json":
        sys.stdout.write(format_json(result.cell_rows()))
    else:
        sys.stdout.write(format_tsv(result.cell_rows(), cell_cols))
    return EXIT_OK


def _replicate_rows(estimates: list[NoiseEstimate]) -> list[dict]:
    rows = []
    for e in estimates:
        rows += [dict(replicate=i, metric=str(e.metric_id), value=v)
                 for i, v in enumerate(e.replicate_values.tolist())]
    return rows


def _noise_summary(estimates: list[NoiseEstimate]) -> list[dict]:
    return [dict(metric=str(e.metric_id), ci_low=e.ci_low, ci_high=e.ci_high,
                 std_error=e.std_error, mean=e.mean, skewness=e.skewness, alpha=e.alpha)
            for e in estimates]


def cmd_empirical(args) -> int:
    data = read_scores(args.scores)
    spec = _study_spec(args, StudyKind.EMPIRICAL_STUDY)
    result = run_empirical_study(data, spec, workers=args.workers)
    cell = result.cells[0]
    grid = result.grid
    report = cell.runs[0] if len(cell.runs) == 1 else None
    if args.out:
        _emit(args, "curve.tsv", format_tsv(
            {"auroc": q, "auprc": c}
            for q, c in zip(grid.auroc.tolist(), grid.auprc.tolist())))
        _emit(args, "grid.tsv", format_tsv(
            {"increment": d, "auroc": q, "auprc": c}
            for d, q, c in zip(grid.increments.tolist(), grid.auroc.tolist(),
                               grid.auprc.tolist())))
        estimates = [e for pair in cell.noise for e in pair]
        _emit(args, "noise.tsv", format_tsv(_noise_summary(estimates)))
        _emit(args, "replicates.tsv", format_tsv(_replicate_rows(estimates)))
        _emit(args, "study.json", format_json(dict(
            result.to_dict(), n_pos=data.n_pos, n_neg=data.n_neg,
            grid=dict(strategy=grid.strategy, step_up=grid.step_up,
                      step_down=grid.step_down, points=len(grid.auroc),
                      truncated=grid.truncated, notes=grid.notes))))
        for k, r in enumerate(cell.runs):
            suffix = "" if len(cell.runs) == 1 else f"_run{k}"
            _emit(args, f"report{suffix}.tsv", _report_table(r, "tsv"))
            _emit(args, f"report{suffix}.json", _report_table(r, "json"))
    for note in grid.notes:
        log.warning(note)
    if report is not None:
        sys.stdout.write(_report_table(report, args.format))
    else:
        sys.stdout.write(format_json(cell.to_dict()) if args.format == "json"
                         else format_tsv(result.run_rows()))
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.scores:
        population = read_scores(args.scores)
        sample_size = args.n
    else:
        _check(args.auroc is not None and len(args.auroc) == 1, "simulate needs one --auroc")
        _check(args.prevalence is not None and len(args.prevalence) == 1,
               "simulate needs one --prevalence")
        a, p = args.auroc[0], args.prevalence[0]
        _check(0.5 <= a < 1, f"--auroc must lie in [0.5, 1), got {a}")
        _check(0 < p < 1, f"--prevalence must lie in (0, 1), got {p}")
        n = args.n if args.n is not None else 10_000
        try:
            population = PopulationSpec(BinormalModel.for_auroc(a), p, n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        sample_size = None
    replicates = args.replicates if args.replicates is not None else 10_000
    alpha = args.alpha if args.alpha is not None else 0.05
    try:
        plan = SamplingPlan(population, replicates, args.seed, sample_size, alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    metrics = (MetricId.AUROC, MetricId.AUPRC)
    values = simulate_metrics(plan, metrics, args.workers)
    estimates = [NoiseEstimate.from_values(m, values[:, j], alpha) for j, m in enumerate(metrics)]
    if args.out:
        _emit(args, "replicates.tsv", format_tsv(_replicate_rows(estimates)))
        _emit(args, "noise.json", format_json(_noise_summary(estimates)))
    summary = _noise_summary(estimates)
    sys.stdout.write(format_json(summary) if args.format == "json" else format_tsv(summary))
    return EXIT_OK


def cmd_se(args) -> int:
    _check(args.auroc is not None and len(args.auroc) == 1, "se needs one --auroc")
    a = args.auroc[0]
    n_pos, n_neg = args.n_pos, args.n_neg
    if n_pos is None and n_neg is None and args.n is not None and args.prevalence:
        n_pos = int(round(args.prevalence[0] * args.n))
        n_neg = args.n - n_pos
    _check(n_pos is not None and n_neg is not None,
           "se needs --n-pos and --n-neg (or --n with --prevalence)")
    _check(0.5 <= a < 1, f"--auroc must lie in [0.5, 1), got {a}")
    _check(n_pos >= 1 and n_neg >= 1, "class counts must be >= 1")
    se = hanley_mcneil_se(a, n_pos, n_neg)
    lo, hi = normal_ci(a, se)
    row = dict(auroc=a, n_pos=n_pos, n_neg=n_neg, se=se, ci_low=lo, ci_high=hi)
    sys.stdout.write(format_json(row) if args.format == "json" else format_tsv([row]))
    return EXIT_OK


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option values; flags override it")
    common.add_argument("--prevalence", type=float, nargs="+")
    common.add_argument("--auroc", type=float, nargs="+")
    common.add_argument("--n", type=_positive_int, help="sample size per replicate")
    common.add_argument("--replicates", type=_positive_int)
    common.add_argument("--repeats", type=_positive_int)
    common.add_argument("--grid-step", type=float)
    common.add_argument("--grid-points", type=_positive_int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--strategy", choices=["additive", "top-first", "bottom-first"])
    common.add_argument("--average", choices=["delta", "bounds"])
    common.add_argument("--profile", choices=["desk", "full"], default="desk",
                        help="default replicates/repeats/grid step (desk: 2000/1/0.0005)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=_positive_int, default=1)
    common.add_argument("--format", choices=["json", "tsv"], default="tsv")
    common.add_argument("--out", help="directory for output files")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="resolving-power", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("binormal-curve", parents=[common], help="AUROC-AUPRC signal curve")
    p.set_defaults(func=cmd_binormal_curve)
    p = sub.add_parser("binormal-sweep", parents=[common],
                       help="relative resolution over prevalence x quality")
    p.set_defaults(func=cmd_binormal_sweep)
    p = sub.add_parser("empirical", parents=[common], help="resolving power from a score file")
    p.add_argument("scores", help="CSV file with header score,label")
    p.set_defaults(func=cmd_empirical)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo metric noise only")
    p.add_argument("--scores", help="empirical population (CSV score,label)")
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("se", parents=[common], help="Hanley-McNeil standard error of an AUROC")
    p.add_argument("--n-pos", type=int)
    p.add_argument("--n-neg", type=int)
    p.set_defaults(func=cmd_se)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(config, dict):
        parser.error("config file must hold a JSON object")
    known = vars(args)
    unknown = [k for k in config if k.replace("-", "_") not in known]
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    # flags given on the command line win: re-parse with config values as defaults
    sub = parser._subparsers._group_actions[0].choices[args.command]
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})
    args = parser.parse_args(argv)
    for key in ("prevalence", "auroc"):
        v = getattr(args, key)
        if isinstance(v, (int, float)):
            setattr(args, key, [float(v)])
    return args


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScoreFileError as exc:
        print(f"{parser.prog}: {args.scores}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DegenerateDataError as exc:
        print(f"{parser.prog}: invalid scores: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, ArithmeticError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
