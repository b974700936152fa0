import random
from collections import Counter
from fractions import Fraction

import pytest

from favard import (
    IntPolynomial,
    SizeError,
    complement_search,
    direction_analysis,
    direction_multiset,
    exponent_report,
    poly_mul_mod,
    tiling_check,
    validate_digit_system,
)
from conftest import random_digit_system


def residue_oracle(D, C, M):
    """Brute-force check that D + C hits every residue mod M exactly once."""
    counts = Counter((d + c) % M for d in D for c in C)
    return len(counts) == M and set(counts.values()) == {1}


class TestIntPolynomial:
    def test_cyclic_product_example(self):
        p = IntPolynomial.from_set([0, 3])
        q = IntPolynomial.from_set([0, 1])
        assert poly_mul_mod(p, q, 4).coeffs == (2, 1, 0, 1)

    def test_multiplicative_identity(self):
        p = IntPolynomial.from_coeffs([3, 0, -1, 2])
        one = IntPolynomial.from_set([0])
        assert p * one == p

    def test_power_wraps_to_constant(self):
        for M in (1, 3, 7):
            x_M = IntPolynomial.from_set([M])
            one = IntPolynomial.from_set([0])
            assert poly_mul_mod(x_M, one, M).coeffs == (1,)

    def test_trailing_zero_trim(self):
        assert IntPolynomial.from_coeffs([1, 2, 0, 0]).coeffs == (1, 2)
        assert IntPolynomial.from_coeffs([0, 0]).coeffs == ()


class TestTilingCheck:
    def test_known_positive(self):
        assert tiling_check([0, 3, 6, 9], [0, 1, 2], 12)
        assert tiling_check([0, 2], [0, 1], 4)

    def test_known_negative(self):
        assert not tiling_check([0, 3, 6, 9], [0, 1, 3], 12)

    def test_size_fast_reject(self):
        with pytest.raises(SizeError):
            tiling_check([0, 1], [0, 1], 6)

    def test_shift_invariance(self):
        for s in (1, 5, -3, 17):
            assert tiling_check([d + s for d in (0, 3, 6, 9)], [0, 1, 2], 12)
            assert tiling_check([0, 3, 6, 9], [c + s for c in (0, 1, 2)], 12) == tiling_check(
                [0, 3, 6, 9], [0, 1, 2], 12
            )

    def test_symmetry(self):
        cases = [
            ((0, 3, 6, 9), (0, 1, 2), 12),
            ((0, 2), (0, 1), 4),
            ((0, 1, 4, 5), (0, 2), 8),
            ((0, 1, 3), (0, 2, 4), 9),
        ]
        for D, C, M in cases:
            try:
                forward = tiling_check(D, C, M)
            except SizeError:
                continue
            assert forward == tiling_check(C, D, M)

    def test_matches_residue_oracle_sampled(self):
        rng = random.Random(31)
        M = 12
        for _ in range(500):
            k = rng.choice([1, 2, 3, 4])
            D = tuple(sorted(rng.sample(range(M), k)))
            C = tuple(sorted(rng.sample(range(M), M // k)))
            assert tiling_check(D, C, M) == residue_oracle(D, C, M)


class TestComplementSearch:
    def test_four_corner_direction_set(self):
        cert = complement_search([0, 3, 6, 9], M_max=64)
        assert cert is not None
        assert (tuple(cert.C), cert.M) == ((0, 1, 2), 12)
        assert cert.verified

    def test_singleton(self):
        cert = complement_search([0], M_max=4)
        assert cert is not None and (cert.C, cert.M) == ((0,), 1)

    def test_non_tile_returns_none(self):
        assert complement_search([0, 1, 2, 4], M_max=64) is None

    def test_results_reverify(self):
        rng = random.Random(32)
        found = 0
        for _ in range(40):
            k = rng.choice([2, 3, 4])
            D = sorted(rng.sample(range(0, 10), k))
            cert = complement_search(D, M_max=48)
            if cert is not None:
                found += 1
                assert cert.verified
                assert tiling_check(cert.D, cert.C, cert.M)
                assert len(cert.D) * len(cert.C) == cert.M
        assert found > 0

    def test_shifted_input_normalized(self):
        cert = complement_search([5, 8, 11, 14], M_max=64)
        assert cert is not None and cert.M == 12


class TestDirectionAnalysis:
    def test_four_corner_certified(self, fc):
        analysis = direction_analysis(fc, 2, 1)
        assert analysis.verdict == "certified-positive"
        assert analysis.D == (0, 3, 6, 9)
        assert analysis.distinct
        assert analysis.certificate is not None and analysis.certificate.M == 12
        assert analysis.measures_constant
        assert all(m == 3 for _, m in analysis.measures)

    def test_four_corner_diagonal_collision(self, fc):
        analysis = direction_analysis(fc, 1, 1)
        assert analysis.verdict == "collision"
        assert not analysis.distinct
        assert analysis.certificate is None

    def test_mixed_system_shrinks_despite_certificate(self):
        # The direction set admits a segment complement, yet the interval
        # translates overlap, so the measures shrink and no certified
        # verdict is issued.
        ds = validate_digit_system(4, [0, 1], [0, 2])
        analysis = direction_analysis(ds, 2, 1)
        assert analysis.D == (0, 1, 4, 5)
        assert analysis.distinct
        assert analysis.verdict == "shrinking"
        assert [m for _, m in analysis.measures] == [
            Fraction(2),
            Fraction(3, 2),
            Fraction(9, 8),
            Fraction(27, 32),
        ]

    def test_direction_multiset(self, fc):
        assert direction_multiset(fc, 1, 1) == [0, 3, 3, 6]

    def test_unreduced_direction_rejected(self, fc):
        with pytest.raises(ValueError):
            direction_analysis(fc, 2, 2)

    def test_certified_implies_constant_measures(self):
        rng = random.Random(33)
        for _ in range(12):
            ds = random_digit_system(rng)
            q, r = rng.choice([(1, 2), (2, 1), (1, 3), (3, 1), (1, 1)])
            analysis = direction_analysis(ds, q, r, n_probe=3)
            if analysis.verdict == "certified-positive":
                assert analysis.measures_constant
                assert analysis.certificate is not None and analysis.certificate.verified

    def test_json_fields(self, fc):
        payload = direction_analysis(fc, 2, 1).to_json_dict()
        assert payload["verdict"] == "certified-positive"
        assert payload["certificate"]["M"] == 12
        assert payload["measures"][0]["rational_part"] == "3/1"
        assert payload["exponents"]["sigma"] == "8/1"


class TestExponentReport:
    def test_four_corner_direction(self, fc):
        report = exponent_report(fc, 2, 1)
        assert report.gamma_exact == Fraction(1, 2)
        assert report.sigma == 8
        assert report.p_inf == 38

    def test_minimal_direction(self, fc):
        report = exponent_report(fc, 1, 1)
        assert report.sigma == 6
        assert report.p_inf == 30

    def test_balanced_system_has_gamma_half(self):
        for K, A, B in ((4, [0, 1], [0, 2]), (9, [0, 1, 2], [3, 4, 8])):
            ds = validate_digit_system(K, A, B)
            assert ds.exponents.gamma.as_fraction() == Fraction(1, 2)

    def test_p_inf_always_above_six(self):
        rng = random.Random(34)
        for _ in range(20):
            ds = random_digit_system(rng)
            q, r = rng.choice([(1, 2), (2, 1), (1, 1), (3, 2)])
            report = exponent_report(ds, q, r)
            assert report.p_inf_float > 6

    def test_irrational_gamma_keeps_pair(self):
        ds = validate_digit_system(6, [0, 1], [0, 2, 4])
        report = exponent_report(ds, 1, 1)
        assert report.gamma_exact is None
        assert report.gamma.num_arg == 2 and report.gamma.den_arg == 6
        assert isinstance(report.sigma, float)
        assert report.p_inf_float > 6
