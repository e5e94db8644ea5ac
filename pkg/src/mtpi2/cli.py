"""Command-line front door: tables, diffs, simulation studies, one-off
decisions, and the HTTP service.

Data goes to stdout or the files under --out; diagnostics go to stderr.
When --out is given, the report paths also render matplotlib figures next
to the delimited output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import decision_card, decision_table, table_diff
from .export import (
    bayes_factor_csv,
    comparison_csv,
    decision_grid_csv,
    diff_csv,
    diff_summary,
    oc_report_csv,
    oc_report_json,
    side_by_side_csv,
    to_json_text,
)
from .partition import VARIANT_MTPI, VARIANT_MTPI2, DesignParams
from .posterior import DoseData
from .simulate import SimConfig, compare_designs, default_suite, load_scenarios, run_study


def _add_design_args(parser: argparse.ArgumentParser, with_variant: bool = True) -> None:
    if with_variant:
        parser.add_argument(
            "--design", choices=[VARIANT_MTPI, VARIANT_MTPI2, "both"], default=VARIANT_MTPI2
        )
    parser.add_argument("--pt", type=float, required=True, help="target toxicity probability")
    parser.add_argument("--eps1", type=float, default=0.05)
    parser.add_argument("--eps2", type=float, default=0.05)
    parser.add_argument("--xi", type=float, default=0.95, help="exclusion threshold")
    parser.add_argument("--max-n", type=int, default=12)
    parser.add_argument("--cohort", type=int, default=3)
    parser.add_argument(
        "--leftover-policy", choices=["exclude", "include"], default="exclude"
    )


def _params(args: argparse.Namespace, variant: str) -> DesignParams:
    return DesignParams(
        p_t=args.pt,
        eps1=args.eps1,
        eps2=args.eps2,
        xi=args.xi,
        variant=variant,
        leftover_policy=args.leftover_policy,
        max_n=args.max_n,
        cohort_size=args.cohort,
    )


def _write(out_dir: Path, name: str, text: str) -> None:
    path = out_dir / name
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}", file=sys.stderr)


def cmd_table(args: argparse.Namespace) -> int:
    variants = [VARIANT_MTPI, VARIANT_MTPI2] if args.design == "both" else [args.design]
    tables = [decision_table(_params(args, v)) for v in variants]
    if args.out is None:
        if args.format == "json":
            sys.stdout.write(to_json_text([t.to_json() for t in tables]))
        elif len(tables) == 2:
            sys.stdout.write(side_by_side_csv(*tables))
        else:
            sys.stdout.write(decision_grid_csv(tables[0]))
        return 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for table in tables:
        v = table.params.variant
        _write(out, f"decisions_{v}.csv", decision_grid_csv(table))
        _write(out, f"bayes_factors_{v}.csv", bayes_factor_csv(table))
        _write(out, f"table_{v}.json", to_json_text(table.to_json()))
    if len(tables) == 2:
        _write(out, "decisions_side_by_side.csv", side_by_side_csv(*tables))
    if args.figures:
        from . import plots

        plots.decision_table_figure(tables, str(out / "decision_table.png"))
        print(f"wrote {out / 'decision_table.png'}", file=sys.stderr)
    return 0


def cmd_diff(args: argparse.Namespace) -> int:
    table_a = decision_table(_params(args, args.from_design))
    table_b = decision_table(_params(args, args.to_design))
    entries = table_diff(table_a, table_b)
    payload = {
        "from": args.from_design,
        "to": args.to_design,
        "p_T": args.pt,
        "max_n": args.max_n,
        "summary": diff_summary(entries),
        "changes": [e.to_json() for e in entries],
    }
    if args.out is None:
        if args.format == "json":
            sys.stdout.write(to_json_text(payload))
        else:
            sys.stdout.write(diff_csv(entries))
        return 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "diff.csv", diff_csv(entries))
    _write(out, "diff.json", to_json_text(payload))
    if args.figures and entries:
        from . import plots

        plots.diff_figure(entries, str(out / "diff.png"))
        print(f"wrote {out / 'diff.png'}", file=sys.stderr)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    scenarios = load_scenarios(args.scenarios) if args.scenarios else default_suite()
    designs = tuple(args.designs.split(","))
    config = SimConfig(
        n_trials=args.trials,
        seed=args.seed,
        designs=designs,
        n_workers=args.workers,
    )
    reports = run_study(scenarios, config)
    comparison = None
    if args.compare:
        if len(designs) != 2:
            raise ValueError("--compare needs exactly two designs (e.g. --designs mtpi,mtpi2)")
        second = [r for r in reports if r.design == designs[1]]
        first = [r for r in reports if r.design == designs[0]]
        comparison = compare_designs(second, first)
    if args.out is None:
        if args.format == "json":
            doc = oc_report_json(reports)
            if comparison:
                doc["comparison"] = comparison.to_json()
            sys.stdout.write(to_json_text(doc))
        else:
            sys.stdout.write(oc_report_csv(reports))
            if comparison:
                sys.stdout.write(comparison_csv(comparison))
        return 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "oc_report.csv", oc_report_csv(reports))
    _write(out, "oc_report.json", to_json_text(oc_report_json(reports)))
    if comparison:
        _write(out, "comparison.csv", comparison_csv(comparison))
        _write(out, "comparison.json", to_json_text(comparison.to_json()))
    if args.figures:
        from . import plots

        plots.selection_figure(reports, str(out / "selection.png"))
        print(f"wrote {out / 'selection.png'}", file=sys.stderr)
        if comparison:
            plots.comparison_figure(comparison, str(out / "comparison.png"))
            print(f"wrote {out / 'comparison.png'}", file=sys.stderr)
    return 0


def cmd_next(args: argparse.Namespace) -> int:
    if args.design == "both":
        raise ValueError("next needs a single design")
    if args.n < 1:
        raise ValueError("n must be >= 1 (no decision is defined before any data)")
    if args.x > args.n:
        raise ValueError(f"x={args.x} cannot exceed n={args.n}")
    card = decision_card(DoseData(args.x, args.n), _params(args, args.design))
    sys.stdout.write(json.dumps(card, indent=2) + "\n")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtpi2",
        description="Interval-based Bayesian dose-finding: decision tables, "
        "trial conduct service, and operating-characteristic studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("table", help="generate a decision table")
    _add_design_args(p_table)
    p_table.add_argument("--format", choices=["csv", "json"], default="csv")
    p_table.add_argument("--out", help="directory for CSV/JSON/figure outputs")
    p_table.add_argument("--no-figures", dest="figures", action="store_false")
    p_table.set_defaults(func=cmd_table)

    p_diff = sub.add_parser("diff", help="compare two design variants cell by cell")
    _add_design_args(p_diff, with_variant=False)
    p_diff.add_argument("--from-design", choices=[VARIANT_MTPI, VARIANT_MTPI2], default=VARIANT_MTPI)
    p_diff.add_argument("--to-design", choices=[VARIANT_MTPI, VARIANT_MTPI2], default=VARIANT_MTPI2)
    p_diff.add_argument("--format", choices=["csv", "json"], default="csv")
    p_diff.add_argument("--out")
    p_diff.add_argument("--no-figures", dest="figures", action="store_false")
    p_diff.set_defaults(func=cmd_diff)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo operating-characteristics study")
    p_sim.add_argument("--scenarios", help="scenario JSON file (default: packaged 10-scenario suite)")
    p_sim.add_argument("--trials", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--designs", default="mtpi,mtpi2", help="comma-separated design list")
    p_sim.add_argument("--compare", action="store_true", help="add paired design deltas")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sim.add_argument("--out")
    p_sim.add_argument("--no-figures", dest="figures", action="store_false")
    p_sim.set_defaults(func=cmd_simulate)

    p_next = sub.add_parser("next", help="decision for a single (x, n) observation")
    _add_design_args(p_next)
    p_next.add_argument("--x", type=int, required=True, help="DLT count")
    p_next.add_argument("--n", type=int, required=True, help="patients treated")
    p_next.set_defaults(func=cmd_next)

    p_serve = sub.add_parser("serve", help="launch the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--data-dir", default="./mtpi2-data")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
