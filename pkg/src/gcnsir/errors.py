"""Exception types shared across the pipeline."""


class SchemaError(ValueError):
    """Input file is missing columns or is structurally malformed."""


class CellError(SchemaError):
    def __init__(self, message, row, column):
        super().__init__(message)
        self.row = row
        self.column = column


class UnknownRegionError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate
