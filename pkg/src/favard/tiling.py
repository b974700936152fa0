"""Integer tilings, complementing sets and positive-measure directions.

A direction t = q/r (lowest terms) projects the generating cell onto the
digit multiset D = r*A + q*B.  When the |D| = K sums are distinct and the
translates d + [0, r+q] tile an interval, the projection measure is the
same at every level; the machine-checkable witness is a complementing
pair: gen(D) * gen(C) = 1 + x + ... + x^(M-1) modulo x^M - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cantor import DigitSystem, LogRatio
from .errors import SizeError
from .projection import Slope, projection_measure


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial; coeffs[i] multiplies x^i, trailing zeros trimmed."""

    coeffs: tuple[int, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int]) -> "IntPolynomial":
        trimmed = list(coeffs)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        return cls(tuple(trimmed))

    @classmethod
    def from_set(cls, values: Sequence[int]) -> "IntPolynomial":
        """Generating polynomial sum of x^v; values must be nonnegative."""
        values = sorted(set(values))
        if values and values[0] < 0:
            raise ValueError("generating polynomial needs nonnegative exponents")
        coeffs = [0] * (values[-1] + 1 if values else 0)
        for v in values:
            coeffs[v] = 1
        return cls.from_coeffs(coeffs)

    @classmethod
    def all_ones(cls, M: int) -> "IntPolynomial":
        return cls(tuple([1] * M))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if not self.coeffs or not other.coeffs:
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for j, d in enumerate(other.coeffs):
                out[i + j] += c * d
        return IntPolynomial.from_coeffs(out)

    def mod_cyclic(self, M: int) -> "IntPolynomial":
        """Reduce modulo x^M - 1 (exponents wrap around mod M)."""
        if M < 1:
            raise ValueError("modulus must be >= 1")
        out = [0] * M
        for i, c in enumerate(self.coeffs):
            out[i % M] += c
        return IntPolynomial.from_coeffs(out)


def poly_mul_mod(p: IntPolynomial, q: IntPolynomial, M: int) -> IntPolynomial:
    """Coefficient-exact cyclic convolution modulo x^M - 1."""
    return (p * q).mod_cyclic(M)


def _normalize(values: Sequence[int]) -> tuple[int, ...]:
    vals = sorted(set(values))
    if not vals:
        raise ValueError("empty set")
    base = vals[0]
    return tuple(v - base for v in vals)


def tiling_check(D: Sequence[int], C: Sequence[int], M: int) -> bool:
    """Do D and C complement each other modulo M?

    Both sets are shift-normalized to min 0; the check is the generating
    function identity gen(D)*gen(C) = 1 + x + ... + x^(M-1) mod x^M - 1,
    equivalently every residue mod M is hit exactly once by D + C.
    """
    D = _normalize(D)
    C = _normalize(C)
    if len(D) * len(C) != M:
        raise SizeError(f"|D|*|C| = {len(D)}*{len(C)} != M = {M}")
    product = poly_mul_mod(IntPolynomial.from_set(D), IntPolynomial.from_set(C), M)
    return product == IntPolynomial.all_ones(M)


@dataclass(frozen=True)
class TilingCertificate:
    """Verified witness that D + C covers the segment [0, M) exactly once."""

    D: tuple[int, ...]
    C: tuple[int, ...]
    M: int
    verified: bool

    def to_json_dict(self) -> dict:
        return {"D": list(self.D), "C": list(self.C), "M": self.M, "verified": self.verified}


def _segment_complement(D: tuple[int, ...], M: int) -> tuple[int, ...] | None:
    """Backtracking fill of [0, M) by integer translates of D.

    Repeatedly cover the smallest uncovered value h with a translate D + c
    (c = h - d for some d in D, no wraparound, all sums inside [0, M)),
    backtracking on conflicts.  Complete for segment tilings because the
    translate covering h is one of at most |D| candidates.
    """
    target = M // len(D)
    covered = bytearray(M)
    chosen: list[int] = []
    max_d = D[-1]

    def place(c: int, flag: int) -> None:
        for d in D:
            covered[d + c] = flag

    def backtrack() -> bool:
        if len(chosen) == target:
            return True
        h = covered.index(0)
        for d in D:
            c = h - d
            if c < 0 or c + max_d >= M:
                continue
            if any(covered[e + c] for e in D):
                continue
            place(c, 1)
            chosen.append(c)
            if backtrack():
                return True
            chosen.pop()
            place(c, 0)
        return False

    if backtrack():
        return tuple(sorted(chosen))
    return None


def complement_search(D: Sequence[int], M_max: int = 256) -> TilingCertificate | None:
    """Smallest M <= M_max (a multiple of |D|) admitting a segment complement.

    The search fills the segment [0, M) with unreduced integer translates
    of D, so a found pair also satisfies the residue identity mod M.
    Returns None when every admissible M is exhausted.
    """
    Dn = _normalize(D)
    k = len(Dn)
    if k == 1:
        return TilingCertificate(D=Dn, C=(0,), M=1, verified=True) if M_max >= 1 else None
    for M in range(k, M_max + 1, k):
        if M <= Dn[-1]:
            continue
        C = _segment_complement(Dn, M)
        if C is not None:
            cert = TilingCertificate(D=Dn, C=C, M=M, verified=tiling_check(Dn, C, M))
            return cert
    return None


@dataclass(frozen=True)
class ExponentReport:
    """Dimension gamma and the admissible-exponent threshold for a direction.

    gamma is kept as an exact log ratio; sigma = (1 + r + q) / gamma and
    p_inf = 6 + 4*sigma are exact rationals whenever gamma is.
    """

    q: int
    r: int
    gamma: LogRatio
    gamma_exact: Fraction | None
    sigma: Fraction | float
    p_inf: Fraction | float

    @property
    def sigma_float(self) -> float:
        return float(self.sigma)

    @property
    def p_inf_float(self) -> float:
        return float(self.p_inf)

    def to_json_dict(self) -> dict:
        from .reporting import fraction_str

        return {
            "q": self.q,
            "r": self.r,
            "gamma": fraction_str(self.gamma_exact) if self.gamma_exact is not None else str(self.gamma),
            "gamma_float": float(self.gamma),
            "sigma": fraction_str(self.sigma) if isinstance(self.sigma, Fraction) else self.sigma,
            "sigma_float": self.sigma_float,
            "p_inf": fraction_str(self.p_inf) if isinstance(self.p_inf, Fraction) else self.p_inf,
            "p_inf_float": self.p_inf_float,
        }


def exponent_report(ds: DigitSystem, q: int, r: int) -> ExponentReport:
    """gamma, sigma = (1+r+q)/gamma, and the open lower bound p_inf = 6 + 4*sigma."""
    if math.gcd(q, r) != 1:
        raise ValueError(f"direction {q}/{r} must be in lowest terms")
    gamma = ds.exponents.gamma
    gamma_exact = gamma.as_fraction()
    if gamma_exact is not None:
        sigma: Fraction | float = Fraction(1 + r + q) / gamma_exact
        p_inf: Fraction | float = 6 + 4 * sigma
    else:
        sigma = (1 + r + q) / float(gamma)
        p_inf = 6 + 4 * sigma
    return ExponentReport(q=q, r=r, gamma=gamma, gamma_exact=gamma_exact, sigma=sigma, p_inf=p_inf)


VERDICTS = ("certified-positive", "empirically-positive", "collision", "shrinking")


@dataclass(frozen=True)
class DirectionAnalysis:
    """Evidence about one projection direction q/r.

    certified-positive needs both a verified certificate and probe
    measures that are constant across the probed levels; stable measures
    without a certificate stay merely empirical.  A certificate alone is
    not enough: segment complements exist for digit multisets whose
    interval translates still overlap.
    """

    q: int
    r: int
    D: tuple[int, ...]
    distinct: bool
    certificate: TilingCertificate | None
    measures: tuple[tuple[int, Fraction], ...]
    verdict: str
    exponents: ExponentReport

    @property
    def measures_constant(self) -> bool:
        vals = [m for _, m in self.measures]
        return bool(vals) and all(v == vals[0] for v in vals)

    def to_json_dict(self) -> dict:
        from .reporting import fraction_str

        return {
            "q": self.q,
            "r": self.r,
            "D": list(self.D),
            "distinct": self.distinct,
            "certificate": self.certificate.to_json_dict() if self.certificate else None,
            "measures": [
                {"n": n, "rational_part": fraction_str(m), "value": float(m)}
                for n, m in self.measures
            ],
            "measures_constant": self.measures_constant,
            "verdict": self.verdict,
            "exponents": self.exponents.to_json_dict(),
        }


def direction_multiset(ds: DigitSystem, q: int, r: int) -> list[int]:
    """The multiset r*A + q*B (sorted, repeats kept)."""
    return sorted(r * a + q * b for a in ds.A for b in ds.B)


def direction_analysis(
    ds: DigitSystem,
    q: int,
    r: int,
    n_probe: int = 4,
    m_max: int = 256,
    cap: int | None = None,
) -> DirectionAnalysis:
    """Classify the direction q/r by tiling evidence and measure probes."""
    if math.gcd(q, r) != 1:
        raise ValueError(f"direction {q}/{r} must be in lowest terms")
    D = direction_multiset(ds, q, r)
    distinct = len(set(D)) == len(D)
    slope = Slope.rational(q, r)
    measures = tuple(
        (n, projection_measure(ds, n, slope, cap=cap).rational_part)
        for n in range(1, n_probe + 1)
    )
    certificate = complement_search(D, M_max=m_max) if distinct else None
    constant = bool(measures) and all(m == measures[0][1] for _, m in measures)
    if not distinct:
        verdict = "collision"
    elif constant and certificate is not None and certificate.verified:
        verdict = "certified-positive"
    elif constant:
        verdict = "empirically-positive"
    else:
        verdict = "shrinking"
    return DirectionAnalysis(
        q=q,
        r=r,
        D=tuple(D),
        distinct=distinct,
        certificate=certificate,
        measures=measures,
        verdict=verdict,
        exponents=exponent_report(ds, q, r),
    )
