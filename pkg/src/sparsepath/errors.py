"""Exception types raised by sparsepath."""


class SparsePathError(Exception):
    """Base class for all sparsepath errors."""


class DimensionMismatch(SparsePathError, ValueError):
    pass


class ZeroVarianceColumn(SparsePathError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} has zero variance")


class RankDeficientGroup(SparsePathError, ValueError):
    def __init__(self, group):
        self.group = group
        super().__init__(f"group {group} is rank deficient after centering")


class InvalidGroups(SparsePathError, ValueError):
    pass


class InvalidPathSpec(SparsePathError, ValueError):
    pass


class LambdaOutOfRange(SparsePathError, ValueError):
    pass


class InvalidAlpha(SparsePathError, ValueError):
    pass


class NonDecreasingLambda(SparsePathError, ValueError):
    pass


class MaxIterExceeded(SparsePathError, RuntimeError):
    """Raised (or recorded) when an iterative solver hits its iteration cap.

    ``state`` carries whatever the solver had when it stopped.
    """

    def __init__(self, message, state=None):
        self.state = state
        super().__init__(message)


class PathAborted(SparsePathError, RuntimeError):
    """A path run stopped early; ``partial`` holds the solutions computed so far."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class ParseError(SparsePathError, ValueError):
    def __init__(self, path, row, column, text):
        self.path, self.row, self.column = path, row, column
        super().__init__(f"{path}: row {row}, column {column}: cannot parse {text!r}")


class RaggedRows(SparsePathError, ValueError):
    def __init__(self, path, row, expected, got):
        self.path, self.row = path, row
        super().__init__(f"{path}: row {row} has {got} fields, expected {expected}")
