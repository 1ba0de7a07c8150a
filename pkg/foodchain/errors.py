"""
Exception hierarchy for the food-chain toolkit.

Every error carries the CLI exit code it maps to so that the command layer
can translate failures without a lookup table.
"""


class FoodChainError(Exception):
    exit_code = 3

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def to_dict(self):
        return {
            'error': type(self).__name__,
            'message': str(self),
            'exit_code': self.exit_code,
            **{k: _plain(v) for k, v in self.context.items()},
        }


def _plain(value):
    if hasattr(value, 'tolist'):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


# --- exit code 1 ---

class UsageError(FoodChainError):
    exit_code = 1


class TooLarge(UsageError):
    pass


# --- exit code 2 ---

class ValidationError(FoodChainError):
    exit_code = 2


class NonPositiveRate(ValidationError):
    pass


class ReducibleSwitching(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ModeMismatch(ValidationError):
    pass


class NegativeState(ValidationError):
    pass


class ConfigParseError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class AssumptionViolated(ValidationError):
    pass


class PrefixNotPositive(ValidationError):
    pass


class EpsilonTooLarge(ValidationError):
    pass


# --- exit code 3 ---

class NumericalError(FoodChainError):
    exit_code = 3


class SingularSolve(NumericalError):
    pass


class OracleMismatch(NumericalError):
    pass


class StepSizeUnderflow(NumericalError):
    pass


class NegativeStateOverflow(NumericalError):
    pass


# --- exit code 4 ---

class DegenerateBoundary(FoodChainError):
    """Some delta^nu(k) sits inside the zero band: the verdict is undecided."""
    exit_code = 4

    def __init__(self, message, report=None, **context):
        super().__init__(message, **context)
        self.report = report
