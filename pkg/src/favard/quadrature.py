"""Favard length by angular quadrature, with refinement-based error bars.

The angle integral over [0, pi] splits into two quarter-range integrals
over (0, pi/2): one for the system itself and one for its x-reflection,
which accounts for angles past pi/2 exactly.  Each nodal value is a
projection measure; the integrand is bounded and piecewise Lipschitz but
kinked, so midpoint-style rules with refinement doubling are used and the
reported error bound is the last refinement delta.

Nodes are independent; evaluation may be spread over FAVARD_THREADS
workers, and sums always use a pairwise tree reduction in a fixed order
so results are bit-reproducible for a fixed spec.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cantor import DigitSystem
from .errors import ValidationError
from .projection import Slope, farey_slopes, projection_measure

PLACEMENTS = ("theta", "t", "farey")


def worker_count() -> int:
    """Worker cap from FAVARD_THREADS (default 1, i.e. serial)."""
    raw = os.environ.get("FAVARD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pairwise_sum(terms: list[float]) -> float:
    """Deterministic pairwise tree reduction (order-independent of workers)."""
    if not terms:
        return 0.0
    block = list(terms)
    while len(block) > 1:
        nxt = [
            block[i] + block[i + 1] if i + 1 < len(block) else block[i]
            for i in range(0, len(block), 2)
        ]
        block = nxt
    return block[0]


def _map_ordered(fn, items):
    count = worker_count()
    if count <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class QuadratureSpec:
    """Node count per quarter-range, placement rule and refinement depth.

    'theta' places midpoints uniformly in angle (float slopes); 't' places
    midpoints uniformly in slope on [0, 1] plus reciprocals, so every node
    is an exact rational; 'farey' uses the Farey fractions of
    ``farey_order`` plus reciprocals with angular cell weights.
    """

    nodes: int = 128
    placement: str = "theta"
    levels: int = 3
    farey_order: int = 8

    def __post_init__(self) -> None:
        if self.nodes < 2:
            raise ValidationError("need at least 2 nodes per quarter-range")
        if self.placement not in PLACEMENTS:
            raise ValidationError(f"placement must be one of {PLACEMENTS}")
        if self.levels < 1:
            raise ValidationError("need at least one refinement level")
        if self.farey_order < 1:
            raise ValidationError("Farey order must be >= 1")


def _quarter_nodes(spec: QuadratureSpec, level: int) -> list[tuple[Slope, float]]:
    """(slope, angular weight) pairs covering theta in (0, pi/2)."""
    if spec.placement == "theta":
        n = spec.nodes * (1 << level)
        h = (math.pi / 2.0) / n
        return [(Slope.real(math.tan((i + 0.5) * h)), h) for i in range(n)]
    if spec.placement == "t":
        n = spec.nodes * (1 << level)
        n_low = (n + 1) // 2
        n_high = n // 2
        nodes: list[tuple[Slope, float]] = []
        for i in range(n_low):
            u = Fraction(2 * i + 1, 2 * n_low)
            weight = (1.0 / n_low) / float(1 + u * u)
            nodes.append((Slope.rational(u.numerator, u.denominator), weight))
        for i in range(n_high):
            u = Fraction(2 * i + 1, 2 * n_high)
            weight = (1.0 / n_high) / float(1 + u * u)
            nodes.append((Slope.rational(u.denominator, u.numerator), weight))
        return nodes
    order = spec.farey_order * (1 << level)
    slopes = farey_slopes(order)
    ts = sorted({s.t for s in slopes} | {1 / s.t for s in slopes if s.t != 0})
    thetas = [math.atan(float(t)) for t in ts]
    bounds = [0.0]
    bounds += [0.5 * (a + b) for a, b in zip(thetas, thetas[1:])]
    bounds.append(math.pi / 2.0)
    return [
        (Slope.rational(t.numerator, t.denominator), hi - lo)
        for t, lo, hi in zip(ts, bounds, bounds[1:])
    ]


@dataclass(frozen=True)
class FavardEstimate:
    """Favard length of the n-th iteration with a convergence report."""

    n: int
    value: float
    error_bound: float | None
    refinements: tuple[tuple[int, float], ...]
    placement: str


def favard_length(
    ds: DigitSystem,
    n: int,
    spec: QuadratureSpec | None = None,
    cap: int | None = None,
) -> FavardEstimate:
    """Angle integral of the projection measures over [0, pi].

    The value is the finest refinement; the error bound is the difference
    between the last two refinements (None when levels == 1).
    """
    spec = spec or QuadratureSpec()
    systems = (ds, ds.reflect_x())
    refinements: list[tuple[int, float]] = []
    for level in range(spec.levels):
        nodes = _quarter_nodes(spec, level)
        tasks = [(system, slope) for system in systems for slope, _ in nodes]
        weights = [w for _ in systems for _, w in nodes]
        values = _map_ordered(
            lambda task: projection_measure(task[0], n, task[1], cap=cap).value, tasks
        )
        total = pairwise_sum([v * w for v, w in zip(values, weights)])
        refinements.append((len(nodes), total))
    error = None
    if len(refinements) >= 2:
        error = abs(refinements[-1][1] - refinements[-2][1])
    return FavardEstimate(
        n=n,
        value=refinements[-1][1],
        error_bound=error,
        refinements=tuple(refinements),
        placement=spec.placement,
    )


@dataclass(frozen=True)
class DecayRow:
    n: int
    estimate: float
    error_bound: float | None
    n_times_estimate: float
    ref_inverse: float
    ref_inverse_log: float
    ref_power: float | None


@dataclass(frozen=True)
class DecayReport:
    """Per-level Favard estimates against the reference decay curves.

    ``fitted_exponent`` is e in the least-squares fit of estimate to
    C * n^-e; ``band_ratio`` is max/min of n * estimate over the range.
    """

    rows: tuple[DecayRow, ...]
    estimates: tuple[FavardEstimate, ...]
    fitted_exponent: float
    band_ratio: float
    inf_positive: bool
    nonincreasing: bool
    p_reference: float | None

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {
                    "n": row.n,
                    "estimate": row.estimate,
                    "error_bound": row.error_bound,
                    "n_times_estimate": row.n_times_estimate,
                    "ref_inverse": row.ref_inverse,
                    "ref_inverse_log": row.ref_inverse_log,
                    "ref_power": row.ref_power,
                }
                for row in self.rows
            ],
            "fitted_exponent": self.fitted_exponent,
            "band_ratio": self.band_ratio,
            "inf_positive": self.inf_positive,
            "nonincreasing": self.nonincreasing,
            "p_reference": self.p_reference,
        }


def decay_experiment(
    ds: DigitSystem,
    n_max: int,
    spec: QuadratureSpec | None = None,
    p_reference: float | None = None,
    cap: int | None = None,
) -> DecayReport:
    """Favard estimates for n = 1..n_max with a fitted decay exponent."""
    if n_max < 2:
        raise ValidationError("need n_max >= 2 to fit a decay slope")
    estimates = [favard_length(ds, n, spec=spec, cap=cap) for n in range(1, n_max + 1)]
    return decay_report_from_estimates(estimates, p_reference=p_reference)


def decay_report_from_estimates(
    estimates: list[FavardEstimate], p_reference: float | None = None
) -> DecayReport:
    """Assemble the decay report from already-computed estimates."""
    if len(estimates) < 2:
        raise ValidationError("need at least 2 estimates to fit a decay slope")
    rows = tuple(
        DecayRow(
            n=est.n,
            estimate=est.value,
            error_bound=est.error_bound,
            n_times_estimate=est.n * est.value,
            ref_inverse=1.0 / est.n,
            ref_inverse_log=math.log(est.n) / est.n,
            ref_power=est.n ** (-1.0 / p_reference) if p_reference else None,
        )
        for est in estimates
    )
    ns = np.array([row.n for row in rows], dtype=float)
    vals = np.array([row.estimate for row in rows], dtype=float)
    slope, _ = np.polyfit(np.log(ns), np.log(vals), 1)
    n_times = [row.n_times_estimate for row in rows]
    return DecayReport(
        rows=rows,
        estimates=tuple(estimates),
        fitted_exponent=float(-slope),
        band_ratio=max(n_times) / min(n_times),
        inf_positive=min(n_times) > 0,
        nonincreasing=all(a.value >= b.value for a, b in zip(estimates, estimates[1:])),
        p_reference=p_reference,
    )
