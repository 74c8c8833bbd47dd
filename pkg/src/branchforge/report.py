"""Report rendering: delimited tables plus matplotlib figures on disk.

The `report` command of the CLI funnels through `write_report`, which drops
CSV tables and PNG figures side by side in an output directory together with
a JSON summary.  Figures use the Agg backend so everything works headless.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .shrinking import hypothesis_ratio, landau_table


def landau_figure(rows):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ns = [row["n"] for row in rows]
    ax.semilogy(ns, [row["g"] for row in rows], "o-", label="max permutation order g(n)")
    ax.semilogy(ns, [row["bound_num"] / row["bound_den"] for row in rows],
                "s--", label="n! / 2^(n-1)")
    failures = [row["n"] for row in rows if not row["holds"]]
    if failures:
        ax.scatter(failures, [rows[n - 1]["g"] for n in failures],
                   marker="x", s=90, color="red", zorder=5,
                   label="estimate fails")
    ax.set_xlabel("n")
    ax.set_ylabel("order (log scale)")
    ax.set_title("Maximal permutation order vs. the factorial estimate")
    ax.legend()
    fig.tight_layout()
    return fig


def ratio_figure(level_rows):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    labels = [f"level {row['level']}\n(n={row['n']})" for row in level_rows]
    xs = range(len(level_rows))
    ax.bar([x - 0.2 for x in xs], [row["ratio"] for row in level_rows],
           width=0.4, label="|Y||Y'| / (m(|Y|+|Y'|))")
    ax.bar([x + 0.2 for x in xs], [row["bound"] for row in level_rows],
           width=0.4, label="closed-form lower bound")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_ylabel("ratio")
    ax.set_title("Per-level counting ratio against its lower bound")
    ax.legend()
    fig.tight_layout()
    return fig


def _write_csv(path, fieldnames, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_report(scenario, out_dir: str, landau_max: int = 12) -> dict:
    """Write landau and per-level tables as CSV with matching PNG figures."""
    os.makedirs(out_dir, exist_ok=True)
    written = {}

    rows = landau_table(landau_max)
    landau_csv = os.path.join(out_dir, "landau.csv")
    _write_csv(landau_csv, ["n", "g", "bound_num", "bound_den", "holds"], rows)
    written["landau_csv"] = landau_csv
    fig = landau_figure(rows)
    landau_png = os.path.join(out_dir, "landau.png")
    fig.savefig(landau_png, dpi=150)
    plt.close(fig)
    written["landau_png"] = landau_png

    level_rows = []
    seen = set()
    for offset in range(scenario.horizon):
        data = scenario.level(offset)
        info = hypothesis_ratio(data)
        level_rows.append({
            "level": offset,
            "n": data.n,
            "x_size": data.x_size,
            "y_size": len(data.y),
            "y_prime_size": len(data.y_prime),
            "max_order": data.max_order,
            "ratio": float(info["ratio"]),
            "ratio_exact": str(info["ratio"]),
            "bound": float(info["bound"]),
            "bound_exact": str(info["bound"]),
            "holds": info["ratio"] >= info["bound"],
        })
        seen.add(data.cache_key())
    levels_csv = os.path.join(out_dir, "levels.csv")
    _write_csv(levels_csv,
               ["level", "n", "x_size", "y_size", "y_prime_size", "max_order",
                "ratio", "ratio_exact", "bound", "bound_exact", "holds"],
               level_rows)
    written["levels_csv"] = levels_csv
    fig = ratio_figure(level_rows)
    ratio_png = os.path.join(out_dir, "ratios.png")
    fig.savefig(ratio_png, dpi=150)
    plt.close(fig)
    written["ratios_png"] = ratio_png

    summary = {
        "scenario": scenario.label or "custom",
        "provenance": scenario.provenance(),
        "horizon": scenario.horizon,
        "distinct_levels": len(seen),
        "landau_max": landau_max,
        "landau_failures": [row["n"] for row in rows if not row["holds"]],
        "files": written,
    }
    summary_path = os.path.join(out_dir, "report.json")
    with open(summary_path, "w") as handle:
        json.dump(summary, handle, sort_keys=True, indent=2)
    written["summary"] = summary_path
    return summary


def format_table(rows: list[dict], columns: list[str]) -> str:
    """Plain-text table for terminal summaries."""
    widths = {col: max(len(col), *(len(str(row.get(col, ""))) for row in rows))
              for col in columns} if rows else {col: len(col) for col in columns}
    header = "  ".join(col.ljust(widths[col]) for col in columns)
    lines = [header, "  ".join("-" * widths[col] for col in columns)]
    for row in rows:
        lines.append("  ".join(str(row.get(col, "")).ljust(widths[col]) for col in columns))
    return "\n".join(lines)
