"""Catalogue report output: JSON, delimited table, and figures."""

from __future__ import annotations

import csv
import json
import os

from .classify import canonical_form
from .diagram import parse_diagram


def summary_table(report) -> str:
    lines = ["mult  distinct_real  distinct_complex  strict_engine  provisional"]
    for m, v in sorted(report.per_multiplicity.items()):
        lines.append(f"{m:>4}  {v['distinct_real']:>13}  "
                     f"{v['distinct_complex']:>16}  "
                     f"{v['distinct_real_engine_strict']:>13}  "
                     f"{v['provisional']:>11}")
    if report.reconciliations:
        lines.append("")
        lines.append(f"reconciliations ({len(report.reconciliations)}):")
        for rec in report.reconciliations:
            tgt = rec["listed_key"] or "(new key, counted as-is)"
            lines.append(f"  {rec['family']}: engine {rec['engine_key']}")
            lines.append(f"      counted under {tgt}  [{rec['note']}]")
    if report.uncertain_entries:
        lines.append("")
        lines.append(f"uncertain ('?') entries preserved: "
                     f"{len(report.uncertain_entries)}")
    if report.unexpandable:
        lines.append("")
        for u in report.unexpandable:
            lines.append(f"  preserved verbatim, not expandable: {u['source']} "
                         f"{u['values']}")
    if report.errors:
        lines.append("")
        for e in report.errors:
            lines.append(f"  ERROR {e['family']}: {e['error']}")
    return "\n".join(lines)


def write_report(report, out_dir, figures: bool = True):
    """Write report.json, report.csv, and per-key diagram figures."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report.to_json(), fh, indent=1)

    rows = []
    fig_dir = os.path.join(out_dir, "figures")
    if figures:
        os.makedirs(fig_dir, exist_ok=True)
    for m, v in sorted(report.per_multiplicity.items()):
        for idx, key in enumerate(v["keys_real"]):
            provenance = ";".join(v["provenance"].get(key, [])[:4])
            d = parse_diagram(key)
            rows.append({
                "multiplicity": m,
                "index": idx,
                "key_real": key,
                "key_complex": canonical_form(d, "complex").text,
                "leaves": d.leaf_count(),
                "brace_pairs": len(d.pairs),
                "provenance": provenance,
            })
            if figures:
                from .render import render_figure
                render_figure(
                    os.path.join(fig_dir, f"m{m}_type{idx:03d}.png"),
                    diagram=d, title=f"multiplicity {m}, type {idx}: {key}")
    with open(os.path.join(out_dir, "report.csv"), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "multiplicity", "index", "key_real", "key_complex", "leaves",
            "brace_pairs", "provenance"])
        writer.writeheader()
        writer.writerows(rows)
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(summary_table(report) + "\n")
