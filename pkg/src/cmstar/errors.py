"""Exception hierarchy.

Every error raised for bad user input derives from :class:`CmstarError`
(itself a ``ValueError``) so the CLI can map it to exit status 2.
"""


class CmstarError(ValueError):
    """Base class for input and consistency errors."""


class DegenerateProblemError(CmstarError):
    """Fewer than two distinct classes."""


class EncodingError(CmstarError):
    """A label is not part of the label encoding, or class sets disagree."""


class DimensionError(CmstarError):
    """Matrix shapes do not agree."""


class InconsistencyError(CmstarError):
    """Two matrices describe a different number of instances."""


class ZeroMassError(CmstarError):
    """A measure was asked to evaluate a matrix whose total sum is zero."""


class UndefinedRatioError(CmstarError):
    """The certainty ratio has no meaningful value for these inputs."""


class StratificationError(CmstarError):
    """Fold count exceeds the size of the smallest class."""


class ValidationError(CmstarError):
    """Malformed matrix or file content.

    ``row`` is 1-based; ``column`` is a column name or 1-based index.
    """

    def __init__(self, message, row=None, column=None, path=None):
        self.row = row
        self.column = column
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ReportSchemaError(CmstarError):
    """A report document has the wrong schema version or shape."""
