"""Exception types raised across the package."""

from __future__ import annotations


class HgpError(Exception):
    """Base class for all errors raised by hgpnlets."""


class NoSolutionError(HgpError, ValueError):
    """Linear system has no solution over GF(2)."""


class CapacityExceededError(HgpError, ValueError):
    """An enumeration would produce more elements than allowed."""


class DegeneratePairingError(HgpError, ValueError):
    """Gram matrix of a pair of bases is singular."""


class InfeasibleDegreeError(HgpError, ValueError):
    pass


class NotRegularError(HgpError, ValueError):
    pass


class TooLargeError(HgpError, ValueError):
    """Exhaustive computation exceeds its size limit."""


class EmptyResidualError(HgpError, ValueError):
    pass


class DisconnectedError(HgpError, ValueError):
    pass


class ZeroSoundnessError(HgpError, ValueError):
    pass


class CssViolationError(HgpError, ValueError):
    """hx and hz rows fail to commute."""

    def __init__(self, x_row: int, z_row: int):
        super().__init__(f"rows hx[{x_row}] and hz[{z_row}] have odd overlap")
        self.x_row = x_row
        self.z_row = z_row


class TrivialCodeError(HgpError, ValueError):
    pass


class OutOfRangeError(HgpError, IndexError):
    pass


class NotLogicalError(HgpError, AssertionError):
    pass


class UnresolvedError(HgpError, RuntimeError):
    """Bounded decoder exhausted its budget."""


class AmbiguousCellError(HgpError, AssertionError):
    """A string was certified in both cells of a partition."""


class InvalidMuError(HgpError, ValueError):
    pass


class TooManyQubitsError(HgpError, ValueError):
    pass


class UnclassifiableSetError(HgpError, ValueError):
    pass


class NoValidCandidateError(HgpError, ValueError):
    pass


class SetTooImplicitError(HgpError, ValueError):
    pass
