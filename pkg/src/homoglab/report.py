"""Delimited output and companion figures.

CSV files are the normative machine-readable output (byte-deterministic:
floats are written with ``repr``, row order is fixed).  When a report is
written to disk a matplotlib figure is rendered next to it with the same
stem, unless the caller opts out.
"""

from __future__ import annotations

import csv
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "format_value",
    "write_csv",
    "write_sweep_csv",
    "write_qp_csv",
    "write_multiscale_csv",
    "write_transport_csv",
    "sweep_figure",
    "qp_figure",
    "multiscale_figure",
    "transport_figure",
    "figure_path",
]

SWEEP_HEADER = ("scenario", "epsilon", "horizon", "sup_error", "theory_bound", "ratio")


def format_value(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return ""
        return repr(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(x) for x in row])


def sweep_rows(table):
    return [
        (table.scenario, r.epsilon, table.horizon, r.sup_error, r.theory_bound, r.ratio)
        for r in table.rows
    ]


def write_sweep_csv(tables, path):
    if not isinstance(tables, (list, tuple)):
        tables = [tables]
    rows = []
    for table in tables:
        rows.extend(sweep_rows(table))
    write_csv(path, SWEEP_HEADER, rows)


def write_qp_csv(table, path):
    header = ("scenario", "epsilon", "horizon", "sup_error", "ratio_to_eps")
    rows = [("qp", r.epsilon, table.horizon, r.sup_error, r.ratio) for r in table.rows]
    write_csv(path, header, rows)


def write_multiscale_csv(report, path):
    header = (
        "scenario",
        "epsilon",
        "horizon",
        "split_time",
        "long_norm_error",
        "short_c_emp",
        "short_speed_ok",
        "sup_error",
    )
    rows = [
        (report.scenario, r.epsilon, report.horizon, r.split_time, r.long_norm,
         r.short_c, int(r.short_speed_ok), r.sup_error)
        for r in report.rows
    ]
    write_csv(path, header, rows)


def write_transport_csv(runs, path, dimension):
    """``runs``: list of (epsilon, grid, values, homogenized)."""
    if dimension == 1:
        coords = ("x",)
    else:
        coords = tuple(f"x{i}" for i in range(1, dimension + 1))
    header = ("epsilon", *coords, "v_eps", "homogenized", "abs_diff")
    rows = []
    for eps, grid, values, ref in runs:
        for point, v, h in zip(grid, values, ref):
            cs = (point,) if dimension == 1 else tuple(point)
            rows.append((eps, *cs, v, h, abs(v - h)))
    write_csv(path, header, rows)


def figure_path(csv_path):
    stem, _ = os.path.splitext(csv_path)
    return stem + ".png"


def sweep_figure(tables, path):
    if not isinstance(tables, (list, tuple)):
        tables = [tables]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for table in tables:
        eps = [r.epsilon for r in table.rows]
        errs = [r.sup_error for r in table.rows]
        line, = ax.loglog(eps, errs, "o-", label=f"{table.scenario} (slope {table.fit.slope:.2f})")
        bounds = [r.theory_bound for r in table.rows]
        if not any(math.isnan(b) for b in bounds):
            ax.loglog(eps, bounds, "--", color=line.get_color(), alpha=0.6)
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel("sup error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def qp_figure(table, path):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    eps = [r.epsilon for r in table.rows]
    ax.semilogx(eps, [r.ratio for r in table.rows], "o-")
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel(r"sup error / $\varepsilon$")
    ax.set_title(f"drift {table.drift:.6f} (mean value {table.mean:g})")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def multiscale_figure(report, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    eps = [r.epsilon for r in report.rows]
    ax1.semilogx(eps, [r.long_norm for r in report.rows], "o-")
    ax1.set_xlabel(r"$\varepsilon$")
    ax1.set_ylabel(r"sup $|u^\varepsilon-\bar u|\,|\log\varepsilon|/t$")
    ax1.set_title("long-time normalized error")
    ax1.grid(True, which="both", alpha=0.3)
    ax2.semilogx(eps, [r.short_c for r in report.rows], "o-")
    ax2.set_xlabel(r"$\varepsilon$")
    ax2.set_ylabel(r"sup $|u^\varepsilon-\bar u|/\varepsilon$")
    ax2.set_title("short-time normalized error")
    ax2.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def transport_figure(runs, path, dimension):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if dimension == 1:
        for eps, grid, values, ref in runs:
            ax.plot(grid, values, ".", ms=3, label=f"eps={eps:g}")
        eps, grid, values, ref = runs[-1]
        ax.plot(grid, ref, "k-", lw=1, label="homogenized")
        ax.set_xlabel("x")
        ax.set_ylabel("V")
    else:
        for eps, grid, values, ref in runs:
            err = [abs(v - h) for v, h in zip(values, ref)]
            ax.semilogy(range(len(err)), err, ".", ms=3, label=f"eps={eps:g}")
        ax.set_xlabel("grid index")
        ax.set_ylabel("|V - homogenized|")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
