"""Digit systems and exact enumeration of product Cantor set levels.

A digit system is a triple (K, A, B) with A, B subsets of {0, ..., K-1},
|A| * |B| = K and both factors of size at least 2.  The level-n set on the
A side is the collection of base-K expansions

    sum_{j=1..n} d_j K^(n-j),   d_j in A,

stored as arbitrary-precision integers with the implicit denominator K^n,
so the true values e / K^n fill out the n-th Cantor iteration of the A
factor.  Keeping integers (never floats) preserves the lattice structure
that every downstream exact computation relies on.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import (
    CardinalityError,
    DigitRangeError,
    DuplicateDigitError,
    ResourceError,
)

#: Default bound on materialized level-set sizes (K=4 reaches it at n=12).
DEFAULT_ELEMENT_CAP = 2**24


def _prime_factorization(n: int) -> dict[int, int]:
    """Trial-division factorization; digit-system cardinalities are tiny."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


@dataclass(frozen=True)
class LogRatio:
    """The number log(num_arg) / log(den_arg) for integers num_arg >= 1, den_arg >= 2.

    The pair is kept exactly; ``as_fraction`` recovers an exact rational
    value whenever one exists (num_arg and den_arg powers of a common base),
    which is what makes exponent bookkeeping like gamma = 1/2 exact.
    """

    num_arg: int
    den_arg: int

    def __post_init__(self) -> None:
        if self.num_arg < 1 or self.den_arg < 2:
            raise ValueError("log ratio needs num_arg >= 1 and den_arg >= 2")

    def as_fraction(self) -> Fraction | None:
        """Exact rational value, or None when the ratio is irrational.

        log(a)/log(b) = s/t holds iff a^t = b^s, i.e. iff the prime
        exponent vectors of a and b are proportional.
        """
        if self.num_arg == 1:
            return Fraction(0)
        fa = _prime_factorization(self.num_arg)
        fb = _prime_factorization(self.den_arg)
        if set(fa) != set(fb):
            return None
        ratios = {Fraction(fa[p], fb[p]) for p in fa}
        if len(ratios) != 1:
            return None
        return ratios.pop()

    def __float__(self) -> float:
        return math.log(self.num_arg) / math.log(self.den_arg)

    def __str__(self) -> str:
        exact = self.as_fraction()
        if exact is not None:
            return str(exact)
        return f"log({self.num_arg})/log({self.den_arg})"


@dataclass(frozen=True)
class Exponents:
    """Similarity dimensions of the two factors; gamma is the smaller one."""

    alpha: LogRatio
    beta: LogRatio
    gamma: LogRatio

    @property
    def alpha_float(self) -> float:
        return float(self.alpha)

    @property
    def beta_float(self) -> float:
        return float(self.beta)

    @property
    def gamma_float(self) -> float:
        return float(self.gamma)


@dataclass(frozen=True)
class DigitSystem:
    """Validated digit system (K, A, B); immutable, safe to share."""

    K: int
    A: tuple[int, ...]
    B: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.K < 2:
            raise CardinalityError(f"base K={self.K} must be at least 2")
        for name, digits in (("A", self.A), ("B", self.B)):
            if len(set(digits)) != len(digits):
                raise DuplicateDigitError(f"digit set {name}={digits} has repeats")
            if tuple(sorted(digits)) != tuple(digits):
                raise DigitRangeError(f"digit set {name}={digits} must be sorted ascending")
            for d in digits:
                if not 0 <= d < self.K:
                    raise DigitRangeError(f"digit {d} in {name} outside [0, {self.K - 1}]")
        if len(self.A) < 2 or len(self.B) < 2:
            raise CardinalityError("both digit sets need at least 2 digits")
        if len(self.A) * len(self.B) != self.K:
            raise CardinalityError(
                f"|A|*|B| = {len(self.A)}*{len(self.B)} != K = {self.K}"
            )

    def digits(self, side: str) -> tuple[int, ...]:
        side = side.upper()
        if side == "A":
            return self.A
        if side == "B":
            return self.B
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")

    @property
    def exponents(self) -> Exponents:
        alpha = LogRatio(len(self.A), self.K)
        beta = LogRatio(len(self.B), self.K)
        gamma = alpha if len(self.A) <= len(self.B) else beta
        return Exponents(alpha=alpha, beta=beta, gamma=gamma)

    def reflect_x(self) -> "DigitSystem":
        """Mirror the horizontal factor: digits a -> K-1-a.

        The level-n squares of the reflected system are exactly the
        x-reflections of the original ones, which is how angles in
        (pi/2, pi) reduce to the first quadrant.
        """
        return DigitSystem(self.K, tuple(sorted(self.K - 1 - a for a in self.A)), self.B)

    def swap(self) -> "DigitSystem":
        return DigitSystem(self.K, self.B, self.A)


def validate_digit_system(K: int, A: Sequence[int], B: Sequence[int]) -> DigitSystem:
    """Validate raw input and return the immutable system.

    Raises CardinalityError / DigitRangeError / DuplicateDigitError.
    """
    return DigitSystem(int(K), tuple(sorted(int(a) for a in A)), tuple(sorted(int(b) for b in B)))


def four_corner() -> DigitSystem:
    """K=4, A=B={0,3}: the classical four-corner system."""
    return DigitSystem(4, (0, 3), (0, 3))


@dataclass(frozen=True)
class LevelSet:
    """Level-n encodings for one side; true values are element / K^n."""

    K: int
    n: int
    side: str
    elements: tuple[int, ...] = field(repr=False)

    @property
    def denominator(self) -> int:
        return self.K**self.n

    def __len__(self) -> int:
        return len(self.elements)

    def true_values(self) -> list[Fraction]:
        den = self.denominator
        return [Fraction(e, den) for e in self.elements]


def level_size(ds: DigitSystem, n: int, side: str) -> int:
    return len(ds.digits(side)) ** n


def check_cap(count: int, cap: int | None = None) -> None:
    limit = DEFAULT_ELEMENT_CAP if cap is None else cap
    if count > limit:
        raise ResourceError(f"enumeration of {count} elements exceeds cap {limit}")


def iter_level_encodings(ds: DigitSystem, n: int, side: str) -> Iterator[int]:
    """Stream the level-n encodings in ascending order without materializing.

    itertools.product with the most significant digit first walks the
    digit tuples lexicographically, which is ascending numeric order
    because the digit sets are sorted.
    """
    if n < 0:
        raise ValueError("level n must be nonnegative")
    digits = ds.digits(side)
    K = ds.K
    for combo in itertools.product(digits, repeat=n):
        acc = 0
        for d in combo:
            acc = acc * K + d
        yield acc


def level_set(ds: DigitSystem, n: int, side: str, cap: int | None = None) -> LevelSet:
    """Materialize the level-n set; ResourceError past the element cap."""
    check_cap(level_size(ds, n, side), cap)
    return LevelSet(ds.K, n, side.upper(), tuple(iter_level_encodings(ds, n, side)))


def split_identity_check(
    ds: DigitSystem,
    m: int,
    n: int,
    side: str = "A",
    level_m: LevelSet | None = None,
    cap: int | None = None,
) -> bool:
    """Check the positional-split identity on integer encodings.

    The level-m encodings must equal {K^n * u + v} with u running over
    level m-n and v over level n.  ``level_m`` may be supplied explicitly
    (e.g. as a negative control); by default it is enumerated.
    """
    if not 0 <= n < m:
        raise ValueError("need 0 <= n < m")
    check_cap(level_size(ds, m, side), cap)
    if level_m is None:
        level_m = level_set(ds, m, side, cap=cap)
    shift = ds.K**n
    sums = sorted(
        shift * u + v
        for u in iter_level_encodings(ds, m - n, side)
        for v in iter_level_encodings(ds, n, side)
    )
    return sums == sorted(level_m.elements)
