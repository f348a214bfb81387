"""Shared exception types for brauerkit."""


class BrauerkitError(Exception):
    """Base class for all brauerkit errors."""


class AmbiguousExtension(BrauerkitError):
    """More than one isomorphism class satisfies the extension constraints."""

    def __init__(self, msg, candidates=None, stage=None):
        super().__init__(msg)
        self.candidates = candidates or []
        self.stage = stage


class NoExtension(BrauerkitError):
    """No abelian group satisfies the extension constraints."""


class NotAnAction(BrauerkitError):
    """The supplied automorphism does not define a cyclic group action."""


class WindowTooSmall(BrauerkitError):
    """The degree window cannot certify the requested kernel/cokernel."""


class DensityUnknown(BrauerkitError):
    """A required per-prime density fact is missing from the descriptor."""


class InconsistentPoint(BrauerkitError):
    """The requested residue characteristic and j-value are incompatible."""


class UnmatchedRule(BrauerkitError):
    """A differential rule points at a zero entry."""


class NoFact(BrauerkitError):
    """No stored fact decides the requested sheaf-level computation."""


class OutOfRange(BrauerkitError):
    """A comparison import was requested outside its range of validity."""


class NotStabilized(BrauerkitError):
    """Later differentials could still act; no stabilization certificate."""
