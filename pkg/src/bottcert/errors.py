"""Exception hierarchy.

Domain errors signal bad input or an unsatisfiable request.  Tripwire errors
signal that a runtime consistency check failed which, for valid inputs, is
mathematically guaranteed to hold; seeing one means an implementation bug,
never a property of the data.
"""


class BottError(Exception):
    """Base class for all library errors."""


class ShapeError(BottError):
    """Matrix rows do not form a strictly lower triangular shape."""


class RangeError(BottError):
    """An index or cut position is out of range."""


class ContextMismatch(BottError):
    """Operands belong to different Bott matrices."""


class NonIntegralError(BottError):
    """A half-integral class was used where an integral one is required."""


class WellOrderFailure(BottError):
    """No admissible switch sequence orders the square-zero rows first."""


class NotUnimodular(BottError):
    """A degree-2 matrix does not have determinant +1 or -1."""


class RelationViolated(BottError):
    """A candidate isomorphism does not respect x_i^2 = alpha_i x_i."""

    def __init__(self, index, residue):
        super().__init__(f"relation {index} violated, residue {residue}")
        self.index = index
        self.residue = residue


class ExtractionFailure(BottError):
    """A validated isomorphism does not permute the classes 2x_i - alpha_i."""

    def __init__(self, index, message):
        super().__init__(f"generator {index}: {message}")
        self.index = index


class SwitchBlocked(BottError):
    """Switch requested at j with b_{j+1,j} != 0."""


class TwistInvalid(BottError):
    """Twist parameter v fails height(v) < j or v(beta_j - v) = 0."""


class OddAtBoundary(BottError):
    """Height-reduction step with odd subdiagonal entry at l = k+2."""


class TripwireError(BottError):
    """A mathematically guaranteed runtime check failed (bug indicator)."""


class ContractViolation(TripwireError):
    """A verified identity of the height-reduction step failed."""


class DecompositionInconsistent(TripwireError):
    """The image of x_{k+1} is not of the shape eps(2y_l - trunc(beta_l)) + w."""


class ProofPathViolation(TripwireError):
    """A parity, block, height or row-preservation fact failed mid-run."""


class NonTermination(TripwireError):
    """The stabilization loop exceeded its step budget."""
