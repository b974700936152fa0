"""Fourier-side evaluators and diagnostics for the projected measures.

The transform of the level-n projected measure factorizes over digits:

    nu_hat(xi) = K^-n * S_A(xi) * S_B(t*xi),
    S_X(y)     = prod_{j=1..n} sum_{d in X} exp(-2 pi i K^-j d y),

so an n-digit evaluation costs O(n |digits|) instead of K^n.  On top of
the evaluators sit trapezoid integrals over guarded grids, a scanner for
the near-zero set of the A-side symbol, and a structure checker that
covers the scanned set by a lattice neighbourhood plus a bounded number
of residual (root) intervals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cantor import DigitSystem
from .errors import DomainError, GridTooCoarse, NoCover
from .projection import Slope, l2_norm_sq

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

#: Default oscillation guard: grid steps must stay below guard / (1 + t).
NYQUIST_GUARD = 0.02
#: Hard ceiling for a user-configured guard.
MAX_GUARD = 0.1
#: Boundary refinement target for zero-set scans, relative to K^m.
ZERO_REFINE_REL = 1e-6

_UNIT_CIRCLE_TOL = 1e-12


def digit_symbol(digits: Sequence[int], z: complex) -> complex:
    """Generating function sum z^d of a digit set on the unit circle."""
    if abs(abs(z) - 1.0) > _UNIT_CIRCLE_TOL:
        raise DomainError(f"|z| = {abs(z)} is off the unit circle")
    return sum(z**d for d in digits)


def level_symbol(ds: DigitSystem, n: int, side: str, y: float) -> complex:
    """Product-formula evaluation of the level-n symbol at frequency y.

    Equals the direct sum of exp(-2 pi i u y) over the K^-n-denominated
    level set, at O(n |digits|) cost.
    """
    if n < 0:
        raise ValueError("level n must be nonnegative")
    digits = ds.digits(side)
    out = complex(1.0)
    scale = 1.0
    for _ in range(n):
        scale /= ds.K
        out *= digit_symbol(digits, cmath.exp(-2j * math.pi * scale * y))
    return out


def _level_symbol_grid(ds: DigitSystem, n: int, side: str, y: np.ndarray) -> np.ndarray:
    digits = ds.digits(side)
    out = np.ones_like(y, dtype=complex)
    scale = 1.0
    for _ in range(n):
        scale /= ds.K
        factor = np.zeros_like(out)
        for d in digits:
            factor += np.exp((-2j * math.pi * scale * d) * y)
        out *= factor
    return out


def chi(xi: float) -> complex:
    """Transform of the unit-interval indicator, chi(0) = 1.

    (1 - exp(-2 pi i xi)) / (2 pi i xi) rewritten as a phase times
    sin(pi xi)/(pi xi) for stable evaluation through the removable zero.
    """
    return cmath.exp(-1j * math.pi * xi) * float(np.sinc(xi))


def _chi_grid(xi: np.ndarray) -> np.ndarray:
    return np.exp(-1j * math.pi * xi) * np.sinc(xi)


def chi_lower_bound(K: int, n: int, m: int) -> float:
    """Lower bound for |chi(K^-n xi)| over |xi| <= K^m.

    sinc decreases on [0, 1], so the minimum sits at the endpoint; past
    the first zero (m >= n) no positive bound exists.
    """
    u_max = float(K) ** (m - n)
    if u_max >= 1.0:
        return 0.0
    return float(np.sinc(u_max))


def nu_hat(ds: DigitSystem, n: int, slope: Slope, xi: float) -> complex:
    """Transform of the level-n projected probability measure."""
    t = slope.t_float
    return (ds.K ** -n) * level_symbol(ds, n, "A", xi) * level_symbol(ds, n, "B", t * xi)


def _nu_hat_grid(ds: DigitSystem, n: int, slope: Slope, xi: np.ndarray) -> np.ndarray:
    t = slope.t_float
    return (
        (ds.K ** -n)
        * _level_symbol_grid(ds, n, "A", xi)
        * _level_symbol_grid(ds, n, "B", t * xi)
    )


def f_hat(ds: DigitSystem, n: int, slope: Slope, xi: float) -> complex:
    """Transform of the counting function: nu_hat times the scaled window."""
    return nu_hat(ds, n, slope, xi) * chi(xi / ds.K**n)


def _f_hat_grid(ds: DigitSystem, n: int, slope: Slope, xi: np.ndarray) -> np.ndarray:
    return _nu_hat_grid(ds, n, slope, xi) * _chi_grid(xi / ds.K**n)


def _checked_step(step: float | None, t: float, guard: float) -> float:
    if not 0 < guard <= MAX_GUARD:
        raise ValueError(f"guard must lie in (0, {MAX_GUARD}], got {guard}")
    limit = guard / (1.0 + t)
    if step is None:
        return limit
    if step > limit * (1.0 + 1e-12):
        raise GridTooCoarse(f"step {step} exceeds the guard limit {limit}")
    if step <= 0:
        raise ValueError("step must be positive")
    return step


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if hi <= lo:
        raise ValueError("need hi > lo")
    count = max(2, int(math.ceil((hi - lo) / step)) + 1)
    return np.linspace(lo, hi, count)


@dataclass(frozen=True)
class SpectralGrid:
    """Sampled spectrum on [lo, hi] with a guard-checked step."""

    lo: float
    hi: float
    step: float
    kind: str
    xs: np.ndarray
    values: np.ndarray

    def rows(self):
        for x, v in zip(self.xs, self.values):
            yield float(x), float(v.real), float(v.imag), float(abs(v) ** 2)


def sample_spectrum(
    ds: DigitSystem,
    n: int,
    slope: Slope,
    lo: float,
    hi: float,
    step: float | None = None,
    kind: str = "nu-hat",
    guard: float = NYQUIST_GUARD,
) -> SpectralGrid:
    """Evaluate nu-hat or f-hat on a uniform grid (step checked)."""
    step = _checked_step(step, slope.t_float, guard)
    xs = _grid(lo, hi, step)
    if kind == "nu-hat":
        values = _nu_hat_grid(ds, n, slope, xs)
    elif kind == "f-hat":
        values = _f_hat_grid(ds, n, slope, xs)
    else:
        raise ValueError(f"kind must be 'nu-hat' or 'f-hat', got {kind!r}")
    return SpectralGrid(lo=lo, hi=hi, step=float(xs[1] - xs[0]), kind=kind, xs=xs, values=values)


@dataclass(frozen=True)
class SpectralIntegrals:
    """Trapezoid values of the frequency-band integrals.

    I integrates |nu_hat at level N|^2 over [K^n, K^(m+n)]; I1 does the
    same for level n.  With a threshold delta, I2 restricts I1 to the set
    where the intermediate-level factor is small, and zdelta_measure
    estimates that set's length.
    """

    I: float
    I1: float
    I2: float | None
    zdelta_measure: float | None
    lo: float
    hi: float
    step: float
    points: int


def integral_I(
    ds: DigitSystem,
    N: int,
    n: int,
    m: int,
    slope: Slope,
    step: float | None = None,
    delta: float | None = None,
    guard: float = NYQUIST_GUARD,
) -> SpectralIntegrals:
    """Band integrals of the squared transform; see SpectralIntegrals."""
    if n < 1 or m < 1:
        raise ValueError("need n, m >= 1")
    lo = float(ds.K**n)
    hi = float(ds.K ** (m + n))
    step = _checked_step(step, slope.t_float, guard)
    xs = _grid(lo, hi, step)
    w_N = np.abs(_nu_hat_grid(ds, N, slope, xs)) ** 2
    w_n = np.abs(_nu_hat_grid(ds, n, slope, xs)) ** 2
    I = float(_trapezoid(w_N, xs))
    I1 = float(_trapezoid(w_n, xs))
    I2 = zdelta_measure = None
    if delta is not None:
        # The intermediate-level factor at xi equals nu_hat at level m of xi/K^n.
        inter = np.abs(_nu_hat_grid(ds, m, slope, xs / ds.K**n))
        mask = inter <= (ds.K ** (-2 * m)) * delta * delta
        I2 = float(_trapezoid(np.where(mask, w_n, 0.0), xs))
        zdelta_measure = float(_trapezoid(mask.astype(float), xs))
    return SpectralIntegrals(
        I=I,
        I1=I1,
        I2=I2,
        zdelta_measure=zdelta_measure,
        lo=lo,
        hi=hi,
        step=float(xs[1] - xs[0]),
        points=len(xs),
    )


@dataclass(frozen=True)
class PlancherelResult:
    numeric: float
    exact: float
    abs_error: float
    rel_error: float


def plancherel_check(
    ds: DigitSystem,
    n: int,
    slope: Slope,
    xi_max: float = 1e3,
    step: float | None = None,
    guard: float = NYQUIST_GUARD,
    cap: int | None = None,
) -> PlancherelResult:
    """Numeric integral of |f_hat|^2 over |xi| <= xi_max vs the exact value.

    The counting function is real, so the spectrum is even and one side
    is integrated and doubled.
    """
    step = _checked_step(step, slope.t_float, guard)
    xs = _grid(0.0, xi_max, step)
    power = np.abs(_f_hat_grid(ds, n, slope, xs)) ** 2
    numeric = 2.0 * float(_trapezoid(power, xs))
    exact = float(l2_norm_sq(ds, n, slope, window="box", cap=cap))
    abs_error = abs(numeric - exact)
    return PlancherelResult(
        numeric=numeric, exact=exact, abs_error=abs_error, rel_error=abs_error / exact
    )


def mean_square_level_symbol(
    ds: DigitSystem,
    n: int,
    side: str,
    lo: float,
    hi: float,
    num: int = (1 << 14) + 1,
) -> float:
    """Average of |level symbol at K^n y|^2 over [lo, hi] (trapezoid).

    Over any unit interval this equals |digits|^n exactly: the rescaled
    symbol is a trigonometric polynomial with integer frequencies whose
    off-diagonal terms integrate to zero.
    """
    ys = np.linspace(lo, hi, num)
    vals = np.abs(_level_symbol_grid(ds, n, side, (ds.K**n) * ys)) ** 2
    return float(_trapezoid(vals, ys)) / (hi - lo)


@dataclass(frozen=True)
class ZeroScan:
    """Maximal intervals where |A-symbol| * |B|^m <= delta on [0, K^m]."""

    m: int
    delta: float
    resolution: float
    intervals: tuple[tuple[float, float], ...]


def _symbol_small(ds: DigitSystem, m: int, delta: float, y: float) -> bool:
    mass_b = len(ds.B) ** m
    return abs(level_symbol(ds, m, "A", y)) * mass_b <= delta


def zero_set_scan(
    ds: DigitSystem,
    m: int,
    delta: float,
    num: int = 1 << 18,
    step: float | None = None,
    refine: bool = True,
    guard: float = NYQUIST_GUARD,
) -> ZeroScan:
    """Scan one period [0, K^m] for the near-zero set of the A-side symbol.

    Grid hits are grouped into maximal runs and the run boundaries are
    sharpened by bisection down to ZERO_REFINE_REL * K^m.  Dips narrower
    than the base grid step cannot be detected; callers control ``num``.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    span = float(ds.K**m)
    if step is not None:
        if step > guard:
            raise GridTooCoarse(f"scan step {step} exceeds the guard {guard}")
        num = max(2, int(math.ceil(span / step)) + 1)
    ys = np.linspace(0.0, span, num)
    if ys[1] - ys[0] > guard:
        raise GridTooCoarse(
            f"scan step {ys[1] - ys[0]} exceeds the guard {guard}; increase num"
        )
    mass_b = float(len(ds.B) ** m)
    hits = np.abs(_level_symbol_grid(ds, m, "A", ys)) * mass_b <= delta
    resolution = ZERO_REFINE_REL * span

    intervals: list[tuple[float, float]] = []
    idx = 0
    while idx < num:
        if not hits[idx]:
            idx += 1
            continue
        start = idx
        while idx + 1 < num and hits[idx + 1]:
            idx += 1
        end = idx
        lo = float(ys[start])
        hi = float(ys[end])
        if refine and start > 0:
            lo = _bisect_edge(ds, m, delta, float(ys[start - 1]), lo, resolution, want_hit_right=True)
        if refine and end + 1 < num:
            hi = _bisect_edge(ds, m, delta, hi, float(ys[end + 1]), resolution, want_hit_right=False)
        intervals.append((lo, hi))
        idx += 1
    return ZeroScan(m=m, delta=delta, resolution=resolution, intervals=tuple(intervals))


def _bisect_edge(
    ds: DigitSystem,
    m: int,
    delta: float,
    lo: float,
    hi: float,
    resolution: float,
    want_hit_right: bool,
) -> float:
    """Locate the hit/miss transition inside (lo, hi) to the given resolution."""
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if _symbol_small(ds, m, delta, mid) == want_hit_right:
            hi = mid
        else:
            lo = mid
    return hi if want_hit_right else lo


@dataclass(frozen=True)
class ZeroSetReport:
    """Cover of the scanned near-zero set by lattice and root intervals.

    Lattice intervals sit inside p + (-c*delta^(1-eps), c*delta^(1-eps))
    for lattice points p in (r/modulus) Z; at most r+q root intervals of
    length at most C * K^m * delta^(eps/(r+q)) absorb the rest.  The
    constants c and C are fitted (smallest valid), not assumed.  Hit
    intervals whose lattice membership was decided only within the scan
    resolution are flagged as boundary cells.  ``uncovered`` is empty in
    any returned report; an interval fitting neither class raises
    NoCover instead of being silently dropped.
    """

    m: int
    delta: float
    epsilon: float
    q: int
    r: int
    modulus: int
    resolution: float
    hits: tuple[tuple[float, float], ...]
    lattice: tuple[tuple[float, float], ...]
    root: tuple[tuple[float, float], ...]
    boundary: tuple[tuple[float, float], ...]
    uncovered: tuple[tuple[float, float], ...]
    c: float
    C: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "q": self.q,
            "r": self.r,
            "modulus": self.modulus,
            "resolution": self.resolution,
            "hits": [list(iv) for iv in self.hits],
            "lattice": [list(iv) for iv in self.lattice],
            "root": [list(iv) for iv in self.root],
            "boundary": [list(iv) for iv in self.boundary],
            "uncovered": [list(iv) for iv in self.uncovered],
            "c": self.c,
            "C": self.C,
            "passed": self.passed,
        }


def default_epsilon(q: int, r: int) -> float:
    """The exponent split (r+q)/(1+r+q) used by the covering estimate."""
    return (r + q) / (1 + r + q)


def zero_set_structure_check(
    ds: DigitSystem,
    m: int,
    delta: float,
    epsilon: float,
    q: int,
    r: int,
    modulus: int,
    scan: ZeroScan | None = None,
    num: int = 1 << 18,
    try_variants: bool = False,
    guard: float = NYQUIST_GUARD,
) -> ZeroSetReport:
    """Classify each scanned hit interval as lattice- or root-covered.

    A hit interval belongs to the lattice part when it straddles a point
    of (r/modulus) Z (within the scan resolution) and fits inside a
    neighbourhood smaller than half the lattice spacing.  Everything else
    must be a root interval, admissible only while genuinely short; an
    interval that fits neither class raises NoCover.  With
    ``try_variants`` the divisors and small multiples of ``modulus`` are
    retried before giving up, since the tiling period is only known up to
    a factor.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if scan is None:
        scan = zero_set_scan(ds, m, delta, num=num, guard=guard)
    if not try_variants:
        return _classify(ds, scan, epsilon, q, r, modulus)
    candidates = sorted(
        {d for d in range(1, modulus + 1) if modulus % d == 0}
        | {modulus * k for k in (1, 2, 3, 4)}
    )
    last_error: NoCover | None = None
    failed: ZeroSetReport | None = None
    for mod in candidates:
        try:
            report = _classify(ds, scan, epsilon, q, r, mod)
        except NoCover as exc:
            last_error = exc
            continue
        if report.passed:
            return report
        failed = report
    if failed is not None:
        return failed
    raise last_error if last_error is not None else NoCover("no admissible modulus")


def _classify(
    ds: DigitSystem, scan: ZeroScan, epsilon: float, q: int, r: int, modulus: int
) -> ZeroSetReport:
    spacing = r / modulus
    span = float(ds.K**scan.m)
    res = scan.resolution
    lattice_scale = scan.delta ** (1.0 - epsilon)
    root_scale = span * scan.delta ** (epsilon / (r + q))
    max_root_len = span / (2.0 * (r + q))

    lattice: list[tuple[float, float]] = []
    root: list[tuple[float, float]] = []
    boundary: list[tuple[float, float]] = []
    c_fit = 0.0
    C_fit = 0.0
    for lo, hi in scan.intervals:
        p = round(0.5 * (lo + hi) / spacing) * spacing
        straddles = lo - res <= p <= hi + res
        radius = max(hi - p, p - lo)
        if straddles and radius < 0.5 * spacing:
            lattice.append((lo, hi))
            if not lo <= p <= hi:
                boundary.append((lo, hi))
            c_fit = max(c_fit, radius / lattice_scale)
        elif hi - lo <= max_root_len:
            root.append((lo, hi))
            C_fit = max(C_fit, (hi - lo) / root_scale)
        else:
            raise NoCover(
                f"hit interval [{lo}, {hi}] is neither a lattice neighbourhood "
                f"nor a short root interval (modulus {modulus})"
            )
    return ZeroSetReport(
        m=scan.m,
        delta=scan.delta,
        epsilon=epsilon,
        q=q,
        r=r,
        modulus=modulus,
        resolution=res,
        hits=scan.intervals,
        lattice=tuple(lattice),
        root=tuple(root),
        boundary=tuple(boundary),
        uncovered=(),
        c=c_fit,
        C=C_fit,
        passed=len(root) <= r + q,
    )
