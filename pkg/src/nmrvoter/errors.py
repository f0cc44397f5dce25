"""Exception hierarchy for the voter engine."""


class VoterError(Exception):
    """Base class for all errors raised by :mod:`nmrvoter`."""


class ZeroActiveError(VoterError):
    """No input is active; a 0MR configuration has no defined outputs."""


class NotReducibleError(VoterError):
    """A single-input matrix has no reduced form."""


class UndefinedError(VoterError, ValueError):
    """A closed form was requested outside its domain."""


class NotTransitiveError(VoterError):
    """The equality matrix violates transitivity."""


class NoEligibleClassError(VoterError):
    """No value class has three or more members, so nothing can be injected."""


class AllPairsOffError(VoterError):
    """The simulator was asked to run with no powered, active pair."""
