class GatecheckError(Exception):
    """Base class for every error raised by gatecheck."""


class InvalidInputError(GatecheckError, ValueError):
    """An input violates a documented precondition. Commands exit with status 2."""

    exit_code = 2


class NormalizationError(InvalidInputError):
    pass


class DimensionError(InvalidInputError):
    pass


class HermiticityError(InvalidInputError):
    pass


class UnitarityError(InvalidInputError):
    pass


class NotProductError(InvalidInputError):
    pass


class ProbabilityError(InvalidInputError):
    pass


class GateSpecError(InvalidInputError):
    """A gate or channel document could not be understood."""


class ConstructionError(GatecheckError, ArithmeticError):
    """A numerical construction failed on valid input. Commands exit with status 3."""

    exit_code = 3


class DecompositionError(ConstructionError):
    pass


class ProductStateError(ConstructionError):
    """The product-preserving state construction missed its tolerance."""

    def __init__(self, message, *, lambdas=None, null_vector=None, residuals=None):
        super().__init__(message)
        self.lambdas = lambdas
        self.null_vector = null_vector
        self.residuals = residuals

    def __str__(self):
        base = super().__str__()
        details = []
        if self.lambdas is not None:
            details.append(f"lambdas={list(self.lambdas)}")
        if self.null_vector is not None:
            details.append(f"v={list(self.null_vector)}")
        if self.residuals is not None:
            details.append(f"residuals={list(self.residuals)}")
        return f"{base} ({', '.join(details)})" if details else base
