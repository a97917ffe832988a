"""Sampling and integration on algebraic varieties over Q_p.

Points are drawn by intersecting the variety with random linear spaces
of complementary dimension; reweighting the finite intersections makes
the method exact for any bounded density supported near the lattice.
"""

from .context import PadicContext, PadicRng, is_prime, sample_uniform_O, split_stream
from .errors import (
    BoundViolationError,
    DegenerateRootError,
    DegenerateSliceError,
    NegativeValuationCoefficientError,
    NotHomogeneousError,
    NotOnVarietyError,
    PadicError,
    PolySyntaxError,
    PrecisionExhausted,
    RankDeficientError,
    SingularPointError,
    SpecFileError,
    UnknownVariableError,
    ZeroVectorError,
)
from .intersect import (
    SliceIntersection,
    intersect_affine,
    intersect_projective,
    lift_simple_root,
    solve_zero_dim_in_O,
    univariate_roots_in_O,
)
from .matrices import (
    AffineParametrization,
    PadicMatrix,
    SmithDecomposition,
    absolute_det,
    orthonormal_kernel_basis,
    smith_normal_form,
    solve_affine_in_O,
    unimodular_transport,
)
from .poly import (
    MultiPoly,
    PadicPoly,
    PolySystem,
    dehomogenize,
    homogenize,
    jacobian,
    parse_poly,
    substitute_affine,
)
from .sampler import (
    UNIFORM,
    DensitySpec,
    IntegralEstimate,
    SampleBatch,
    chebyshev_sample_size,
    integrate_affine,
    integrate_projective,
    rejection_bound,
    sample_affine,
    sample_projective,
    slice_sum_affine,
    slice_sum_projective,
)
from .scalar import PadicScalar, decode_scalar
from .specfile import (
    BUILTIN_EXAMPLES,
    RunManifest,
    builtin_variety,
    load_density,
    load_variety,
    read_sample_file,
)
from .variety import (
    VarietyPoint,
    VarietySpec,
    canonical_representative,
    fubini_study_distance,
    is_smooth_point,
    lattice_distortion,
    on_variety,
    rescale_variety,
    slice_weight,
    tangent_basis,
    weight_constant,
)
from .vectors import PadicVector, vec_val_norm

__version__ = "0.1.0"
