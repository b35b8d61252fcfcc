"""Exception hierarchy shared by the solvers and the command line."""

from __future__ import annotations


class BubbleError(Exception):
    """Base class for every error raised by :mod:`csbubble`."""

    exit_code = 1


class ConfigError(BubbleError, ValueError):
    exit_code = 2


class DomainError(BubbleError, ValueError):
    """An argument lies outside the domain of a formula (e.g. ``D <= 2``)."""

    exit_code = 2


class BracketNotFound(BubbleError):
    exit_code = 3


class ToleranceNotMet(BubbleError):
    """A bracketed search stalled short of its tolerance."""

    exit_code = 5


class Diverged(BubbleError):
    """A component reached ``u_k = 0``; the non-topological ansatz is void."""

    exit_code = 4

    def __init__(self, component: int, t: float, profile=None):
        super().__init__(f"u{component} crossed 0 at t = {t:.12g}")
        self.component = component
        self.t = t
        self.profile = profile


class ProfileOverflow(BubbleError):
    exit_code = 4


class StepUnderflow(BubbleError):
    exit_code = 5


class NotConverged(BubbleError):
    exit_code = 5


class OriginValidationError(BubbleError):
    exit_code = 5
