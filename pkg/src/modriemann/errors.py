"""Exception hierarchy shared by every module."""


class ModRiemannError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(ModRiemannError, ValueError):
    pass


class ExprSyntaxError(ModRiemannError):
    def __init__(self, message: str, offset: int, expected: str = ""):
        self.offset = offset
        self.expected = expected
        text = f"{message} at offset {offset}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class UnknownIdentifier(ExprSyntaxError):
    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset)


class DomainError(ModRiemannError, ArithmeticError):
    pass


class HypothesisViolation(ModRiemannError):
    """A mapping or weight fails one of the conditions it was built under.

    ``condition`` names the failed hypothesis, ``witness`` is the sampled
    point (or pair) where it failed.
    """

    def __init__(self, condition: str, witness=None, detail: str = ""):
        self.condition = condition
        self.witness = witness
        text = f"{condition} violated"
        if witness is not None:
            text += f" at {witness}"
        if detail:
            text += f": {detail}"
        super().__init__(text)


class CellTooWide(ModRiemannError):
    pass


class NoSignChange(ModRiemannError):
    pass


class ScheduleTooCoarse(ModRiemannError):
    pass


class DerivativeDisagreement(HypothesisViolation):
    pass
