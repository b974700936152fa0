"""Exception hierarchy shared across the package.

Exit-code contract for the CLI: 2 validation, 3 resource, 4 numeric grid,
1 anything else.
"""


class FavardError(Exception):
    exit_code = 1


class ValidationError(FavardError):
    exit_code = 2


class CardinalityError(ValidationError):
    """|A|*|B| != K, or one of the digit sets has fewer than 2 digits."""


class DigitRangeError(ValidationError):
    """A digit falls outside {0, ..., K-1}."""


class DuplicateDigitError(ValidationError):
    """A digit set contains a repeated digit."""


class SizeError(ValidationError):
    """|D|*|C| != M in a tiling check (fast reject)."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain (e.g. |z| != 1)."""


class ResourceError(FavardError):
    """An enumeration would exceed the configured element cap."""

    exit_code = 3


class GridTooCoarse(FavardError):
    """A sampling grid violates the oscillation (Nyquist) guard."""

    exit_code = 4


class NoCover(FavardError):
    """A scanned near-zero set cannot be covered by the lattice + root structure."""
