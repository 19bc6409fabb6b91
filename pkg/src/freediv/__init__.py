"""Exact construction, verification, and refutation of free divisors.

A divisor f is free when some square matrix over the polynomial ring has
determinant a nonzero scalar multiple of f while each of its columns, read
as a vector field, sends f into the ideal (f).  Everything here runs over
exact rational arithmetic: certificates are checkable term by term, and
refutations come with finite linear-algebra witnesses.
"""

from .poly import (
    Context,
    NotHomogeneousError,
    Poly,
    PolyError,
    parse_poly,
    poly_to_str,
)
from .matrices import InternalCheckError, PolyMatrix
from .linalg import (
    AnnihilatorSpace,
    MembershipResult,
    euler_annihilators,
    graded_membership,
)
from .saito import (
    FramedDivisor,
    FramingError,
    HilbertBurch,
    PreconditionError,
    SaitoCertificate,
    VerificationError,
    certificate_to_json,
    column_roles,
    euler_frame,
    frame_divisor,
    free_multiple_via_xifi,
    hilbert_burch_from_framed,
    matrix_to_json,
    saito_from_xifi,
    verify_saito,
    xifi_generators,
)
from .families import (
    BinomialSpec,
    CommonFactorError,
    FamilyVerdict,
    TriangularStep,
    binomial_divisor,
    brieskorn_chain,
    brieskorn_seed,
    compose,
    compose_factors,
    cone_family,
    euler3_divisor,
    is_free_binomial,
    iterate_tangent,
    multi_jet_extend,
    normal_crossing_matrix,
    sum_compose,
    tangent_extend,
    triangular_extend,
)
from .obstruction import (
    ObstructionCheck,
    ObstructionReport,
    SmoothnessRefutedError,
    obstruction_report_to_json,
    smooth_times_nc_verdict,
)

__version__ = "0.1.0"

__all__ = [
    "AnnihilatorSpace",
    "BinomialSpec",
    "CommonFactorError",
    "Context",
    "FamilyVerdict",
    "FramedDivisor",
    "FramingError",
    "HilbertBurch",
    "InternalCheckError",
    "MembershipResult",
    "NotHomogeneousError",
    "ObstructionCheck",
    "ObstructionReport",
    "Poly",
    "PolyError",
    "PolyMatrix",
    "PreconditionError",
    "SaitoCertificate",
    "SmoothnessRefutedError",
    "TriangularStep",
    "VerificationError",
    "__version__",
    "binomial_divisor",
    "brieskorn_chain",
    "brieskorn_seed",
    "certificate_to_json",
    "column_roles",
    "compose",
    "compose_factors",
    "cone_family",
    "euler3_divisor",
    "euler_annihilators",
    "euler_frame",
    "frame_divisor",
    "free_multiple_via_xifi",
    "graded_membership",
    "hilbert_burch_from_framed",
    "is_free_binomial",
    "iterate_tangent",
    "matrix_to_json",
    "multi_jet_extend",
    "normal_crossing_matrix",
    "obstruction_report_to_json",
    "parse_poly",
    "poly_to_str",
    "saito_from_xifi",
    "smooth_times_nc_verdict",
    "sum_compose",
    "tangent_extend",
    "triangular_extend",
    "verify_saito",
    "xifi_generators",
]
