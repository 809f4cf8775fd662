"""Exception hierarchy shared by all modules."""


class DrinfeldError(Exception):
    pass


class DivisionByZero(DrinfeldError, ZeroDivisionError):
    pass


class MismatchedField(DrinfeldError, ValueError):
    pass


class InvalidQ(DrinfeldError, ValueError):
    pass


class EmptyTerms(DrinfeldError, ValueError):
    pass


class ZeroPolynomial(DrinfeldError, ValueError):
    pass


class PrecisionExhausted(DrinfeldError, ArithmeticError):
    """Not enough known coefficients to certify a result; retry at higher precision."""


class HenselConditionFailed(DrinfeldError, ValueError):
    pass


class ZeroMultiplier(DrinfeldError, ValueError):
    pass


class ZeroGamma(DrinfeldError, ValueError):
    pass


class MonicizationError(DrinfeldError, ValueError):
    pass


class NotInS(DrinfeldError, ValueError):
    pass


class NoEscapeFound(DrinfeldError):
    pass


class ZeroHeight(DrinfeldError, ValueError):
    pass


class HypothesisViolated(DrinfeldError, ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DimensionTooLarge(DrinfeldError, ValueError):
    pass


class GlobalUndecided(DrinfeldError):
    def __init__(self, place, result=None):
        super().__init__(f"local height undecided at place {place}")
        self.place = place
        self.result = result


class ConfigError(DrinfeldError, ValueError):
    pass
