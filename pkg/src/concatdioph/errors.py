"""Exception types shared across the package."""


class InvalidBaseError(ValueError):
    """Base outside the supported range 2..10."""


class AmbiguityError(ArithmeticError):
    """An enclosure is too wide to decide a sign, a floor or a nearest integer.

    Callers are expected to retry at a higher precision.
    """


class EscalationError(ArithmeticError):
    """Precision escalation hit the hard cap without resolving an ambiguity."""


class HypothesisViolation(ValueError):
    """A lemma was invoked outside its hypotheses."""


class ExpansionTooShort(IndexError):
    """A continued fraction expansion does not reach the requested index or size."""


class ResourceError(RuntimeError):
    """The embedded solution tables are missing or malformed."""


def check_base(b: int) -> None:
    if not isinstance(b, int) or isinstance(b, bool) or not 2 <= b <= 10:
        raise InvalidBaseError(f"base must be an integer in 2..10, got {b!r}")
