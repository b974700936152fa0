"""Exact projections of Cantor iterations onto lines of rational slope.

For slope t = q/r in lowest terms, every projected corner a + t*b of a
level-n square lies on the lattice (r K^n)^-1 Z once both level sets are
read as integer encodings: r*a_int + q*b_int.  The projected square is an
interval of lattice length r+q, so interval unions, measures and counting
functions reduce to integer sweep lines; all results are exact rationals.
Irrational slopes fall back to a float sweep with a small collision
tolerance and are used only for quadrature nodes.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cantor import DigitSystem, check_cap, iter_level_encodings, level_size
from .errors import DomainError

#: Sorting tolerance for float endpoints on the irrational-slope path.
FLOAT_COLLISION_TOL = 1e-12

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class Slope:
    """Projection direction tan(theta) = t >= 0, rational or float.

    Rational slopes are kept as reduced pairs (q, r) with t = q/r; they
    drive every exact code path.  ``Slope.real`` wraps an arbitrary float.
    """

    q: int | None
    r: int | None
    t_float: float

    @classmethod
    def rational(cls, q: int, r: int) -> "Slope":
        if r <= 0 or q < 0:
            raise DomainError(f"rational slope needs q >= 0, r >= 1, got {q}/{r}")
        g = math.gcd(q, r)
        q, r = q // g, r // g
        return cls(q=q, r=r, t_float=q / r)

    @classmethod
    def real(cls, t: float) -> "Slope":
        if t < 0 or not math.isfinite(t):
            raise DomainError(f"slope must be finite and nonnegative, got {t}")
        return cls(q=None, r=None, t_float=float(t))

    @classmethod
    def parse(cls, text: str) -> "Slope":
        """Accept 'q/r' (exact) or a plain decimal (float slope)."""
        text = text.strip()
        if "/" in text:
            qs, rs = text.split("/", 1)
            return cls.rational(int(qs), int(rs))
        value = Fraction(text)
        return cls.rational(value.numerator, value.denominator)

    @property
    def is_rational(self) -> bool:
        return self.q is not None

    @property
    def t(self) -> Fraction | float:
        if self.is_rational:
            return Fraction(self.q, self.r)
        return self.t_float

    @property
    def cos_theta(self) -> float:
        if self.is_rational:
            return self.r / math.hypot(self.q, self.r)
        return 1.0 / math.hypot(self.t_float, 1.0)

    @property
    def sin_theta(self) -> float:
        if self.is_rational:
            return self.q / math.hypot(self.q, self.r)
        return self.t_float / math.hypot(self.t_float, 1.0)

    @property
    def cos_sq(self) -> Fraction | float:
        """cos^2(theta); exact for rational slopes."""
        if self.is_rational:
            return Fraction(self.r * self.r, self.q * self.q + self.r * self.r)
        c = self.cos_theta
        return c * c

    def __str__(self) -> str:
        if self.is_rational:
            return f"{self.q}/{self.r}"
        return repr(self.t_float)


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted disjoint closed intervals; touching intervals are merged.

    Endpoints are Fractions (or ints) on the exact path and floats on the
    irrational-slope path; the measure is the cached endpoint sum.
    """

    intervals: tuple[tuple, ...]
    measure: Fraction | float

    @classmethod
    def from_intervals(cls, raw: Iterable[tuple], tol=0) -> "IntervalUnion":
        items = sorted((lo, hi) for lo, hi in raw if hi > lo)
        merged: list[list] = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1] + tol:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        total = sum((hi - lo for lo, hi in merged), 0 if tol == 0 else 0.0)
        return cls(tuple((lo, hi) for lo, hi in merged), total)

    @classmethod
    def from_points(cls, points: Iterable, width, tol=0) -> "IntervalUnion":
        return cls.from_intervals(((p, p + width) for p in points), tol=tol)

    def __len__(self) -> int:
        return len(self.intervals)


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function with sorted breakpoints, zero outside.

    values[i] holds the value on (breakpoints[i], breakpoints[i+1]); all
    values carry the common rational ``scale`` so integrals stay exact.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[int, ...]
    scale: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if len(self.breakpoints) != len(self.values) + 1:
            raise ValueError("need exactly one more breakpoint than values")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def from_atoms(
        cls, atoms: dict[int, int], width: int, denominator: int, scale: Fraction = Fraction(1)
    ) -> "StepFunction":
        """Sum of mult * indicator([p, p + width]) over atoms on a lattice.

        Atom positions, the window width and the breakpoints are integers
        over ``denominator``; a single event sweep produces the function.
        """
        events: dict[int, int] = {}
        for p, mult in atoms.items():
            events[p] = events.get(p, 0) + mult
            events[p + width] = events.get(p + width, 0) - mult
        cuts = sorted(events)
        if not cuts:
            return cls((Fraction(0), Fraction(1)), (0,), scale)
        levels: list[int] = []
        running = 0
        for x in cuts:
            running += events[x]
            levels.append(running)
        # levels[i] is the value on (cuts[i], cuts[i+1]); merge equal neighbours.
        bp: list[int] = [cuts[0]]
        vals: list[int] = [levels[0]]
        for i in range(1, len(cuts) - 1):
            if levels[i] != vals[-1]:
                bp.append(cuts[i])
                vals.append(levels[i])
        bp.append(cuts[-1])
        # Trim zero-valued stretches at either end (zero outside by convention).
        while vals and vals[0] == 0:
            vals.pop(0)
            bp.pop(0)
        while vals and vals[-1] == 0:
            vals.pop()
            bp.pop()
        if not vals:
            return cls((Fraction(0), Fraction(1)), (0,), scale)
        return cls(
            tuple(Fraction(x, denominator) for x in bp), tuple(vals), scale
        )

    def integral(self) -> Fraction:
        total = Fraction(0)
        for v, lo, hi in zip(self.values, self.breakpoints, self.breakpoints[1:]):
            total += v * (hi - lo)
        return total * self.scale

    def l2_norm_sq(self) -> Fraction:
        total = Fraction(0)
        for v, lo, hi in zip(self.values, self.breakpoints, self.breakpoints[1:]):
            total += v * v * (hi - lo)
        return total * self.scale * self.scale

    def __call__(self, x) -> Fraction:
        if x < self.breakpoints[0] or x >= self.breakpoints[-1]:
            return Fraction(0)
        # Linear scan is fine; step functions here have modest breakpoint counts.
        for v, lo, hi in zip(self.values, self.breakpoints, self.breakpoints[1:]):
            if lo <= x < hi:
                return v * self.scale
        return Fraction(0)

    def support_bounds(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]


@dataclass(frozen=True)
class ProjectedPoints:
    """Multiset of projected corners r*a + q*b on the lattice (r K^n)^-1 Z."""

    n: int
    q: int
    r: int
    K: int
    counts: dict[int, int] = field(repr=False)

    @property
    def denominator(self) -> int:
        return self.r * self.K**self.n

    def sorted_items(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())

    def distinct(self) -> list[int]:
        return sorted(self.counts)

    def total_multiplicity(self) -> int:
        return sum(self.counts.values())


def _encoding_array(ds: DigitSystem, n: int, side: str) -> np.ndarray:
    return np.fromiter(iter_level_encodings(ds, n, side), dtype=np.int64, count=level_size(ds, n, side))


def projected_points(
    ds: DigitSystem, n: int, slope: Slope, cap: int | None = None
) -> ProjectedPoints:
    """Enumerate r*a_int + q*b_int with multiplicities (exact path only)."""
    if not slope.is_rational:
        raise DomainError("projected_points requires a rational slope")
    count = level_size(ds, n, "A") * level_size(ds, n, "B")
    check_cap(count, cap)
    q, r = slope.q, slope.r
    max_val = (r + q) * ds.K**n
    if max_val < _INT64_SAFE:
        a = r * _encoding_array(ds, n, "A")
        b = q * _encoding_array(ds, n, "B")
        sums = np.add.outer(a, b).ravel()
        uniq, mult = np.unique(sums, return_counts=True)
        counts = {int(u): int(m) for u, m in zip(uniq, mult)}
    else:
        counts = Counter()
        b_vals = [q * b for b in iter_level_encodings(ds, n, "B")]
        for a_enc in iter_level_encodings(ds, n, "A"):
            ra = r * a_enc
            for qb in b_vals:
                counts[ra + qb] += 1
        counts = dict(counts)
    return ProjectedPoints(n=n, q=q, r=r, K=ds.K, counts=counts)


@dataclass(frozen=True)
class ProjectionMeasure:
    """|pi_theta(E_n)| reported as (rational part) * cos(theta) plus a float.

    The rational part is the sweep-line measure of the interval union in
    line-parameter units (x / cos theta); ``measure_sq`` is the exact
    square of the physical measure, usable for exact comparisons across
    slope representations.
    """

    value: float
    rational_part: Fraction | None
    cos_theta: float
    union_components: int
    exact: bool

    @property
    def measure_sq(self) -> Fraction | None:
        return None if self.rational_part is None else self._measure_sq

    _measure_sq: Fraction | None = None


def projection_measure(
    ds: DigitSystem, n: int, slope: Slope, cap: int | None = None
) -> ProjectionMeasure:
    """Measure of the projection of the n-th iteration onto direction theta.

    Exact sweep for rational slopes: each projected square is the lattice
    interval [p, p + r + q], the merged total is an integer and the
    rational part is total / (r K^n).
    """
    if slope.is_rational:
        pts = projected_points(ds, n, slope, cap=cap)
        width = slope.r + slope.q
        total = 0
        components = 0
        cur_lo = cur_hi = None
        for p in pts.distinct():
            if cur_hi is not None and p <= cur_hi:
                if p + width > cur_hi:
                    cur_hi = p + width
            else:
                if cur_hi is not None:
                    total += cur_hi - cur_lo
                    components += 1
                cur_lo, cur_hi = p, p + width
        if cur_hi is not None:
            total += cur_hi - cur_lo
            components += 1
        rational = Fraction(total, pts.denominator)
        cos_sq = slope.cos_sq
        return ProjectionMeasure(
            value=float(rational) * slope.cos_theta,
            rational_part=rational,
            cos_theta=slope.cos_theta,
            union_components=components,
            exact=True,
            _measure_sq=rational * rational * cos_sq,
        )
    return _projection_measure_float(ds, n, slope, cap=cap)


def _projection_measure_float(
    ds: DigitSystem, n: int, slope: Slope, cap: int | None = None
) -> ProjectionMeasure:
    count = level_size(ds, n, "A") * level_size(ds, n, "B")
    check_cap(count, cap)
    t = slope.t_float
    K_n = float(ds.K**n)
    a = _encoding_array(ds, n, "A") / K_n
    b = _encoding_array(ds, n, "B") / K_n
    pts = np.add.outer(a, t * b).ravel()
    pts.sort()
    width = (1.0 + t) / K_n
    # Sweep on sorted floats; gaps below the collision tolerance merge.
    gaps = pts[1:] - pts[:-1]
    breaks = gaps > width + FLOAT_COLLISION_TOL
    components = int(breaks.sum()) + 1
    covered = float(pts[-1] - pts[0]) + width - float(np.where(breaks, gaps - width, 0.0).sum())
    return ProjectionMeasure(
        value=covered * slope.cos_theta,
        rational_part=None,
        cos_theta=slope.cos_theta,
        union_components=components,
        exact=False,
    )


def projection_interval_union(
    ds: DigitSystem, n: int, slope: Slope, cap: int | None = None
) -> IntervalUnion:
    """The projected set as an explicit exact interval union (rational slopes)."""
    if not slope.is_rational:
        raise DomainError("exact interval union requires a rational slope")
    pts = projected_points(ds, n, slope, cap=cap)
    den = pts.denominator
    width = Fraction(slope.r + slope.q, den)
    return IntervalUnion.from_points((Fraction(p, den) for p in pts.distinct()), width)


WINDOWS = ("box", "shadow")


def _window_width_units(slope: Slope, window: str) -> int:
    """Window length in lattice units of (r K^n)^-1.

    'box' is the unit-mass mollifier of width K^-n (r lattice units);
    'shadow' is the full projected square of width (1+t) K^-n (r+q units),
    whose convolution counts squares over each line point.
    """
    if window == "box":
        return slope.r
    if window == "shadow":
        return slope.r + slope.q
    raise ValueError(f"window must be one of {WINDOWS}, got {window!r}")


def counting_function(
    ds: DigitSystem, n: int, slope: Slope, window: str = "box", cap: int | None = None
) -> StepFunction:
    """Exact square-counting step function of the projected measure."""
    if not slope.is_rational:
        raise DomainError("counting_function requires a rational slope")
    pts = projected_points(ds, n, slope, cap=cap)
    width = _window_width_units(slope, window)
    return StepFunction.from_atoms(pts.counts, width, pts.denominator)


def l2_norm_sq(
    ds: DigitSystem, n: int, slope: Slope, window: str = "box", cap: int | None = None
) -> Fraction:
    """Exact integral of the squared counting function."""
    return counting_function(ds, n, slope, window=window, cap=cap).l2_norm_sq()


@dataclass(frozen=True)
class XLambdaResult:
    member: bool
    witness_n: int
    max_value: Fraction
    per_level: tuple[Fraction, ...]


def x_lambda_member(
    ds: DigitSystem,
    N: int,
    slope: Slope,
    lam: float | Fraction,
    window: str = "box",
    cap: int | None = None,
) -> XLambdaResult:
    """Does max over 1 <= n <= N of the squared-counting integral stay <= lambda?

    The comparison is exact: the integrals are rationals and lambda is
    converted to the exact rational value of the given float.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    values = [l2_norm_sq(ds, n, slope, window=window, cap=cap) for n in range(1, N + 1)]
    best = max(range(N), key=lambda i: values[i])
    lam_exact = lam if isinstance(lam, Fraction) else Fraction(lam)
    return XLambdaResult(
        member=values[best] <= lam_exact,
        witness_n=best + 1,
        max_value=values[best],
        per_level=tuple(values),
    )


@dataclass(frozen=True)
class XLambdaGridReport:
    N: int
    lam: Fraction
    entries: tuple[tuple[Slope, XLambdaResult], ...]

    @property
    def member_fraction(self) -> Fraction:
        if not self.entries:
            raise ValueError("empty slope grid")
        hits = sum(1 for _, res in self.entries if res.member)
        return Fraction(hits, len(self.entries))


def x_lambda_measure_estimate(
    ds: DigitSystem,
    N: int,
    lam: float | Fraction,
    slopes: Sequence[Slope],
    window: str = "box",
    cap: int | None = None,
) -> XLambdaGridReport:
    """Empirical fraction of a slope grid lying in the small-norm set."""
    if not slopes:
        raise ValueError("empty slope grid")
    lam_exact = lam if isinstance(lam, Fraction) else Fraction(lam)
    entries = tuple(
        (s, x_lambda_member(ds, N, s, lam_exact, window=window, cap=cap)) for s in slopes
    )
    return XLambdaGridReport(N=N, lam=lam_exact, entries=entries)


def farey_slopes(order: int, include_zero: bool = True) -> list[Slope]:
    """All reduced fractions q/r in [0, 1] with r <= order, ascending."""
    if order < 1:
        raise ValueError("Farey order must be >= 1")
    fractions = sorted(
        {Fraction(q, r) for r in range(1, order + 1) for q in range(0, r + 1)}
    )
    if not include_zero:
        fractions = [f for f in fractions if f != 0]
    return [Slope.rational(f.numerator, f.denominator) for f in fractions]
