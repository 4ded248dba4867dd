"""Exception hierarchy shared by all modules."""


class AbmetricError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZeroJet(AbmetricError, ZeroDivisionError):
    pass


class DomainError(AbmetricError, ValueError):
    pass


class OutOfDomain(DomainError):
    pass


class Degenerate(AbmetricError, ArithmeticError):
    """phi - s phi' or Delta left the positive range; the metric degenerates."""


class QuadratureFailure(AbmetricError):
    pass


class SingularMetric(AbmetricError, ArithmeticError):
    pass


class ZeroBeta(AbmetricError):
    """b vanishes at the point; only the Riemannian branch applies."""


class OutOfCone(DomainError):
    pass


class IllConditioned(AbmetricError, ArithmeticError):
    pass


class InsufficientSamples(AbmetricError, ValueError):
    pass


class RankDeficient(AbmetricError, ArithmeticError):
    pass


class DegenerateAngular(AbmetricError, ArithmeticError):
    pass


class NotPolynomial(AbmetricError):
    pass


class PreconditionNotMet(AbmetricError):
    pass


class ParseError(AbmetricError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(AbmetricError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
