"""Delimited and JSON renderings of tables, diffs, and simulation reports.

CSV carries probabilities to 6 decimals and Bayes factors to 2 (the
precision decision tables are usually published at); JSON keeps full
double precision.  All output is deterministic for fixed inputs.
"""

from __future__ import annotations

import csv
import io
import json

from .engine import DecisionTable, DiffEntry
from .simulate import TRUE_MTD_CONVENTION, Comparison, OCReport


def to_json_text(payload: dict | list) -> str:
    return json.dumps(payload, indent=2) + "\n"


def decision_grid_csv(table: DecisionTable) -> str:
    """Decision tokens on the x-by-n grid; '-' marks infeasible x > n."""
    max_n = table.params.max_n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x\\n"] + [str(n) for n in range(1, max_n + 1)])
    for x in range(max_n + 1):
        row = [str(x)]
        for n in range(1, max_n + 1):
            row.append(table.cell(x, n).decision if x <= n else "-")
        writer.writerow(row)
    return buf.getvalue()


def bayes_factor_csv(table: DecisionTable) -> str:
    """Companion grid of Bayes factors; blank where the decision is U."""
    max_n = table.params.max_n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x\\n"] + [str(n) for n in range(1, max_n + 1)])
    for x in range(max_n + 1):
        row = [str(x)]
        for n in range(1, max_n + 1):
            if x > n:
                row.append("-")
            else:
                bf = table.cell(x, n).bayes_factor
                row.append("" if bf is None else f"{bf:.2f}")
        writer.writerow(row)
    return buf.getvalue()


def side_by_side_csv(a: DecisionTable, b: DecisionTable) -> str:
    """Paired-column layout: for each n, one subcolumn per design."""
    max_n = a.params.max_n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["x\\n"]
    for n in range(1, max_n + 1):
        header += [f"{n}:{a.params.variant}", f"{n}:{b.params.variant}"]
    writer.writerow(header)
    for x in range(max_n + 1):
        row = [str(x)]
        for n in range(1, max_n + 1):
            if x > n:
                row += ["-", "-"]
            else:
                row += [a.cell(x, n).decision, b.cell(x, n).decision]
        writer.writerow(row)
    return buf.getvalue()


def diff_csv(entries: list[DiffEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "n", "from", "to", "empirical_gap"])
    for e in entries:
        writer.writerow([e.x, e.n, e.from_decision, e.to_decision, f"{e.empirical_gap:.6f}"])
    return buf.getvalue()


def diff_summary(entries: list[DiffEntry]) -> dict:
    counts: dict[str, int] = {}
    for e in entries:
        key = f"{e.from_decision}->{e.to_decision}"
        counts[key] = counts.get(key, 0) + 1
    return {"total": len(entries), "by_class": dict(sorted(counts.items()))}


def oc_report_csv(reports: list[OCReport]) -> str:
    """One row per scenario x design, prefixed by the true-MTD convention."""
    n_doses = max(len(r.selection_freq) for r in reports)
    buf = io.StringIO()
    buf.write(f"# {TRUE_MTD_CONVENTION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    header = ["scenario", "design", "p_T", "true_mtd", "n_trials", "seed"]
    header += [f"sel_d{i}" for i in range(1, n_doses + 1)]
    header += ["sel_none"]
    header += [f"alloc_d{i}" for i in range(1, n_doses + 1)]
    header += ["reliability", "safety", "stop_tox_rate", "mean_sample_size"]
    writer.writerow(header)
    for r in reports:
        row = [
            r.scenario,
            r.design,
            f"{r.p_t:.6f}",
            "" if r.true_mtd is None else r.true_mtd,
            r.n_trials,
            r.seed,
        ]
        row += [f"{v:.6f}" for v in r.selection_freq]
        row += [""] * (n_doses - len(r.selection_freq))
        row += [f"{r.none_rate:.6f}"]
        row += [f"{v:.6f}" for v in r.allocation]
        row += [""] * (n_doses - len(r.allocation))
        row += [
            f"{r.reliability:.6f}",
            f"{r.safety:.6f}",
            f"{r.stop_tox_rate:.6f}",
            f"{r.mean_sample_size:.6f}",
        ]
        writer.writerow(row)
    return buf.getvalue()


def oc_report_json(reports: list[OCReport]) -> dict:
    return {
        "conventions": {"true_mtd": TRUE_MTD_CONVENTION},
        "reports": [r.to_json() for r in reports],
    }


def comparison_csv(comparison: Comparison) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["scenario", "p_T", "design_a", "design_b", "reliability_delta", "safety_delta"]
    )
    for row in comparison.rows:
        writer.writerow(
            [
                row.scenario,
                f"{row.p_t:.6f}",
                row.design_a,
                row.design_b,
                f"{row.reliability_delta:.6f}",
                f"{row.safety_delta:.6f}",
            ]
        )
    return buf.getvalue()
