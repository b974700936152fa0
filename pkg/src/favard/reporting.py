"""Machine-readable outputs: p/q rationals, RFC-4180 CSV, JSON, figures.

Rationals serialize as "p/q" strings so nothing is lost in transit; float
columns use repr, which round-trips.  Figure rendering is optional and
always lands next to (or instead of) the delimited output, with metadata
stripped so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

if TYPE_CHECKING:
    from .quadrature import DecayReport, FavardEstimate
    from .spectral import SpectralGrid, ZeroSetReport


def fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    num, den = text.split("/")
    return Fraction(int(num), int(den))


def dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


FAVARD_CSV_HEADER = ["n", "nodes", "favard_estimate", "error_bound", "n_times_favard"]


def favard_csv(estimates: list["FavardEstimate"]) -> str:
    """One row per (n, refinement); the error bound of a refinement is the
    delta from the previous one (empty on the first)."""
    rows = []
    for est in estimates:
        prev = None
        for nodes, value in est.refinements:
            bound = "" if prev is None else repr(abs(value - prev))
            rows.append([est.n, nodes, value, bound, est.n * value])
            prev = value
    return _csv_text(FAVARD_CSV_HEADER, rows)


SPECTRUM_CSV_HEADER = ["xi", "re", "im", "abs2"]


def spectrum_csv(grid: "SpectralGrid") -> str:
    return _csv_text(SPECTRUM_CSV_HEADER, [list(row) for row in grid.rows()])


def step_function_csv(step) -> str:
    """Breakpoint/value table: value holds on [x, next_x)."""
    rows = []
    for x, v in zip(step.breakpoints, step.values + (0,)):
        rows.append([fraction_str(Fraction(x)), float(x), v])
    return _csv_text(["breakpoint", "breakpoint_float", "value"], rows)


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=120, metadata={"Software": None, "CreationDate": None})
    plt.close(fig)


def plot_decay(report: "DecayReport", path: str) -> None:
    """Log-log decay of the Favard estimates against the reference curves."""
    ns = [row.n for row in report.rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(ns, [row.estimate for row in report.rows], "o-", label="estimate")
    anchor = report.rows[0].estimate
    ax.loglog(ns, [anchor * row.ref_inverse for row in report.rows], "--", label="1/n")
    if len(ns) > 1:
        ax.loglog(
            ns[1:],
            [anchor * row.ref_inverse_log for row in report.rows[1:]],
            ":",
            label="log(n)/n",
        )
    if report.p_reference:
        ax.loglog(
            ns,
            [anchor * row.ref_power for row in report.rows],
            "-.",
            label=f"n^(-1/{report.p_reference:g})",
        )
    ax.set_xlabel("n")
    ax.set_ylabel("Favard length estimate")
    ax.set_title(f"fitted exponent {report.fitted_exponent:.3f}")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def plot_spectrum(grid: "SpectralGrid", path: str) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 3.5))
    power = [abs(v) ** 2 for v in grid.values]
    ax.plot(grid.xs, power, lw=0.7)
    ax.set_xlabel("xi")
    ax.set_ylabel(f"|{grid.kind}|^2")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_zero_structure(report: "ZeroSetReport", path: str) -> None:
    """Hit intervals on [0, K^m] with their lattice/root classification."""
    fig, ax = plt.subplots(figsize=(7.0, 2.4))
    for label, intervals, y, color in (
        ("lattice", report.lattice, 1.0, "tab:blue"),
        ("root", report.root, 0.6, "tab:red"),
        ("boundary", report.boundary, 0.2, "tab:orange"),
    ):
        first = True
        for lo, hi in intervals:
            width = max(hi - lo, report.resolution)
            ax.plot([lo, lo + width], [y, y], color=color, lw=4,
                    label=label if first else None)
            first = False
    spacing = report.r / report.modulus
    ticks = [k * spacing for k in range(int((report.hits[-1][1] if report.hits else 1) / spacing) + 1)]
    ax.plot(ticks, [1.4] * len(ticks), "|", color="gray", ms=8, label="lattice points")
    ax.set_ylim(0, 1.8)
    ax.set_yticks([])
    ax.set_xlabel("y")
    ax.legend(loc="upper right", fontsize=8, ncol=4)
    _save(fig, path)
