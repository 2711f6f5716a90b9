"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class PfError(Exception):
    """Base class for all library errors."""


class InputError(PfError, ValueError):
    """Malformed or invalid user-supplied data (CLI exit code 2)."""


# graph_core
class NotBipartite(InputError):
    pass


class Disconnected(InputError):
    pass


class EmptyGraph(InputError):
    pass


class NonPositiveDimension(InputError):
    pass


class ConvergenceFailure(PfError, ArithmeticError):
    pass


# loop_tower / tangles
class BasisTooLarge(PfError):
    pass


class AmbientMismatch(PfError, TypeError):
    pass


class NotInCommutant(PfError, ValueError):
    pass


class TangleSyntaxError(InputError):
    """Parse failure with the offending position and the tokens that would have been accepted."""

    def __init__(self, message: str, pos: int, expected: tuple[str, ...] = ()):
        self.pos = pos
        self.expected = tuple(expected)
        detail = f"{message} at position {pos}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)


class ShadingMismatch(InputError):
    pass


class ArityMismatch(InputError):
    pass


class SlotUnbound(PfError, LookupError):
    pass


# matrix_algebra / commuting_square / embedding_check
class ClosureOverflow(PfError):
    def __init__(self, message: str, depth_reached: int | None = None):
        self.depth_reached = depth_reached
        super().__init__(message)


class NonFaithfulTrace(PfError, ValueError):
    pass


class DegenerateDecomposition(PfError, ArithmeticError):
    pass


class NotHadamard(InputError):
    pass


class NotUnitary(InputError):
    pass


class DepthUnavailable(PfError):
    pass


class RankDeficient(PfError, ArithmeticError):
    pass
