"""Exception hierarchy shared across the package.

Invalid user input (bad files, malformed configs, mismatched dimensions,
misaligned grids) and mathematical failures on valid input (rank
deficiency, infeasible subproblems) are kept distinct so the command
line can map them to different exit codes.
"""


class InputError(ValueError):
    """Invalid user-supplied data: files, dimensions, configuration."""


class GridAlignmentError(InputError):
    """Grid spacing incompatible with the half-integer shift structure."""


class MathError(RuntimeError):
    """A mathematical precondition failed while processing valid input."""


class RankDeficientError(MathError):
    """Generators do not span the ambient space."""


class InfeasibleFiberError(MathError):
    """Requested fiber lies outside the projection of the zonotope."""


class SupportViolationError(MathError):
    """A grid function has mass outside its declared support."""


class EtaSearchError(MathError):
    """Adaptive perturbation-radius search failed to terminate."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])
