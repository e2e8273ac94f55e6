"""Exception hierarchy shared by all motx modules."""


class MotxError(Exception):
    """Base class; ``code`` is the CLI exit status for this failure."""

    code = 1
    kind = "internal"


class MalformedInput(MotxError, ValueError):
    code = 2
    kind = "malformed-input"


class UnsupportedInput(MotxError, ValueError):
    code = 2
    kind = "unsupported-input"


class RingMismatch(MotxError, ValueError):
    code = 2
    kind = "ring-mismatch"


class NotIdempotent(MotxError, ValueError):
    code = 2
    kind = "not-idempotent"


class HypothesisViolation(MotxError, ValueError):
    code = 2
    kind = "hypothesis-violation"


class NotIsomorphism(HypothesisViolation):
    kind = "not-isomorphism"


class NonAssociative(HypothesisViolation):
    kind = "non-associative"


class Contradiction(MotxError):
    """A certified vanishing line would delete a computed nonzero entry."""

    code = 2
    kind = "contradiction"


class IncompleteInformation(MotxError):
    """A differential that cannot be pruned was never supplied."""

    code = 3
    kind = "incomplete-information"

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = list(missing)


class TorWarning(UserWarning):
    """Tensor product of two modules with torsion: Tor terms are ignored."""
