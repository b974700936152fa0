import random

import pytest

from favard import DigitSystem, four_corner, validate_digit_system


@pytest.fixture
def fc() -> DigitSystem:
    return four_corner()


def random_digit_system(rng: random.Random) -> DigitSystem:
    """A uniformly-ish random valid system with small K."""
    K = rng.choice([4, 6, 8, 9, 10, 12])
    pairs = [(a, K // a) for a in range(2, K) if K % a == 0 and K // a >= 2]
    size_a, size_b = rng.choice(pairs)
    A = sorted(rng.sample(range(K), size_a))
    B = sorted(rng.sample(range(K), size_b))
    return validate_digit_system(K, A, B)
