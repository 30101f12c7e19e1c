"""Exception types shared across the package."""


class PebbleboundError(Exception):
    """Base class for all package errors."""


class CdagError(PebbleboundError):
    """Structurally invalid CDAG or bad graph argument."""


class FormatError(PebbleboundError):
    """A text-format file could not be parsed."""


class GameError(PebbleboundError):
    """A trace violates the rules of the pebble game being validated."""

    def __init__(self, message, step=None, rule=None, vertex=None):
        parts = []
        if step is not None:
            parts.append(f"step {step}")
        if rule is not None:
            parts.append(str(rule))
        if vertex is not None:
            parts.append(f"vertex {vertex}")
        prefix = " ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.step = step
        self.rule = rule
        self.vertex = vertex


class InfeasibleGameError(PebbleboundError):
    """No complete game exists for the given CDAG and capacity."""


class BudgetExhaustedError(PebbleboundError):
    """A search budget ran out before an exact answer was established.

    ``best_known`` carries an upper bound found along the way, when one
    exists; it is a hint only, never a certified optimum.
    """

    def __init__(self, message, best_known=None):
        if best_known is not None:
            message = f"{message} (best known upper bound: {best_known})"
        super().__init__(message)
        self.best_known = best_known


class BoundError(PebbleboundError):
    """Invalid argument or precondition failure in a bound engine."""
