"""Integral cohomology of Bott manifolds and certified stabilization.

The library computes with rings Z[x_1..x_n]/(x_i^2 - alpha_i x_i) attached
to strictly lower triangular integer matrices, classifies their square-zero
degree-2 classes and block structure, searches bounded graded ring
isomorphisms, and transforms a given isomorphism by realizable switch and
twist moves into one preserving the filtration up to the top two stages,
emitting a replayable certificate.
"""

from .errors import (
    BottError,
    ContextMismatch,
    ContractViolation,
    DecompositionInconsistent,
    ExtractionFailure,
    NonIntegralError,
    NonTermination,
    NotUnimodular,
    OddAtBoundary,
    ProofPathViolation,
    RangeError,
    RelationViolated,
    ShapeError,
    SwitchBlocked,
    TripwireError,
    TwistInvalid,
    WellOrderFailure,
)
from .iso import (
    GradedIso,
    SigmaEps,
    compose,
    extract_sigma_eps,
    identity_iso,
    invert,
    make_iso,
    max_stable,
    search_isos,
)
from .moves import Move, MoveSeq, ReplayResult, invert_move, invert_seq, replay, switch, twist
from .ring import (
    BottMatrix,
    Class2,
    CohClass,
    HalfClass2,
    height,
    make_bott_matrix,
    multiply,
    pair_product,
    primitive_part,
    reduce,
    square,
    sub_bar,
    sub_hat,
    two_x_minus_alpha,
)
from .stabilize import (
    KeyStepTrace,
    StabilizationCertificate,
    XkDecomposition,
    decompose_xk,
    key_step,
    raise_stability,
    stabilize_full,
    verify_certificate,
)
from .structure import (
    BlockStructure,
    DecompositionTower,
    SquareZeroGenerator,
    blocks_at,
    decompose_tower,
    level,
    qtrivial_partition,
    same_block,
    square_zero_bruteforce,
    square_zero_generators,
    well_order,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
