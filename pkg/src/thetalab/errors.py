"""Exception types shared across the library.

Every exception carries a short diagnostic message naming the violated
precondition or invariant; numerical failure modes (cap exceeded, singular
matrix, divisor proximity) are distinct classes so callers can react
programmatically.
"""


class ThetaLabError(Exception):
    """Base class for all library errors."""


# --- Siegel domain / theta evaluation ---------------------------------------

class NotSymmetric(ThetaLabError):
    """Matrix fails the symmetry requirement of the Siegel upper half-space."""


class ImagNotPositiveDefinite(ThetaLabError):
    """Imaginary part of the period matrix is not positive definite."""

    def __init__(self, smallest_eigenvalue):
        self.smallest_eigenvalue = smallest_eigenvalue
        super().__init__(
            "imaginary part not positive definite "
            f"(smallest eigenvalue {smallest_eigenvalue:.6g})"
        )


class RadiusCapExceeded(ThetaLabError):
    """Required lattice truncation radius exceeds the policy cap.

    Signals a nearly degenerate Im(omega) or a very large |Im z|.
    """


class OrderCapExceeded(ThetaLabError):
    """Requested derivative order exceeds the implementation cap."""


# --- integer symplectic algebra ----------------------------------------------

class NotSkew(ThetaLabError):
    """Integer matrix is not antisymmetric."""


class DegenerateForm(ThetaLabError):
    """Integer skew form has zero determinant."""


class DimensionMismatch(ThetaLabError):
    """Operands have incompatible dimensions."""


class NotSymplectic(ThetaLabError):
    """Matrix does not preserve the standard symplectic form."""


class SingularDenominator(ThetaLabError):
    """C*omega + D is numerically singular in a modular transformation."""


# --- identities / fits --------------------------------------------------------

class NearZeroDenominator(ThetaLabError):
    """Too many sample points fell on the theta divisor."""


class DegenerateSamples(ThetaLabError):
    """Sample matrix rank collapsed for a reason other than a genuine secant."""


class NotHalfPeriod(ThetaLabError):
    """Shift vector is not of the form (m1 + omega*m2)/2 with integer m1, m2."""


class InvalidBlockData(ThetaLabError):
    """Assembled period-matrix blocks leave the Siegel upper half-space."""


# --- Hirota calculus ----------------------------------------------------------

class VariableMismatch(ThetaLabError):
    """Exponential sums are defined over different variable sets."""


class SpecMismatch(ThetaLabError):
    """Tau specification does not match the hierarchy's variable layout."""


# --- effectivization / solutions ----------------------------------------------

class ReducibleVariety(ThetaLabError):
    """Period matrix failed the irreducibility test required by the solver."""


class NotConverged(ThetaLabError):
    """Nonlinear solve did not reach the target residual."""

    def __init__(self, residual, message=""):
        self.residual = residual
        super().__init__(message or f"solver stalled at residual {residual:.3e}")


class NearDivisor(ThetaLabError):
    """Evaluation point lies too close to the theta divisor."""


class SingularDuality(ThetaLabError):
    """The 4x4 theta-constant value/derivative matrix is numerically singular."""


# --- curves --------------------------------------------------------------------

class BranchCollision(ThetaLabError):
    """Two branch points coincide (or nearly coincide)."""


class QuadratureNotConverged(ThetaLabError):
    """Doubling the quadrature order still changes the periods too much."""
