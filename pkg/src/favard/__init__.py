"""Computable core of the Favard-length analysis of product Cantor sets.

Exact rational projections of Cantor iterations, angular quadrature for
the Favard length, Fourier-side diagnostics of the projected measures,
and the integer-tiling machinery that witnesses positive-measure
projection directions.
"""

from .cantor import (
    DEFAULT_ELEMENT_CAP,
    DigitSystem,
    Exponents,
    LevelSet,
    LogRatio,
    four_corner,
    iter_level_encodings,
    level_set,
    split_identity_check,
    validate_digit_system,
)
from .errors import (
    CardinalityError,
    DigitRangeError,
    DomainError,
    DuplicateDigitError,
    FavardError,
    GridTooCoarse,
    NoCover,
    ResourceError,
    SizeError,
    ValidationError,
)
from .projection import (
    IntervalUnion,
    ProjectionMeasure,
    Slope,
    StepFunction,
    counting_function,
    farey_slopes,
    l2_norm_sq,
    projected_points,
    projection_interval_union,
    projection_measure,
    x_lambda_measure_estimate,
    x_lambda_member,
)
from .quadrature import (
    DecayReport,
    FavardEstimate,
    QuadratureSpec,
    decay_experiment,
    favard_length,
)
from .spectral import (
    SpectralGrid,
    ZeroScan,
    ZeroSetReport,
    chi,
    chi_lower_bound,
    default_epsilon,
    digit_symbol,
    f_hat,
    integral_I,
    level_symbol,
    mean_square_level_symbol,
    nu_hat,
    plancherel_check,
    sample_spectrum,
    zero_set_scan,
    zero_set_structure_check,
)
from .tiling import (
    DirectionAnalysis,
    ExponentReport,
    IntPolynomial,
    TilingCertificate,
    complement_search,
    direction_analysis,
    direction_multiset,
    exponent_report,
    poly_mul_mod,
    tiling_check,
)

__version__ = "0.1.0"
