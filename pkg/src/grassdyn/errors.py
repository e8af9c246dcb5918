"""Exception hierarchy shared by every grassdyn module."""


class GrassdynError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(GrassdynError, ValueError):
    pass


class ModulusZeroError(InvalidInputError):
    pass


class UnsupportedStructureError(GrassdynError):
    """Matrix lies outside the class ``recover_structure`` handles."""


class RankDeficiencyError(InvalidInputError):
    pass


class PreconditionError(InvalidInputError):
    pass


class SingularMatrixError(GrassdynError, ArithmeticError):
    pass


class DegenerateOrbitError(GrassdynError, ArithmeticError):
    def __init__(self, k, sigma_min):
        super().__init__(f"orbit frame collapsed at iterate k={k} (smallest singular value {sigma_min:.3e})")
        self.k = k
        self.sigma_min = sigma_min


class InvarianceViolationError(GrassdynError):
    def __init__(self, residual):
        super().__init__(f"subspace is not invariant under the operator (residual {residual:.3e})")
        self.residual = residual
