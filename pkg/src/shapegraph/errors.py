"""Exception types shared across the package."""


class ShapegraphError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ShapegraphError):
    """Syntax error in a graph, schema, or expression text."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + where)


class GraphKindError(ShapegraphError):
    """A declared graph kind (simple/shape/compressed) is violated by an edge."""


class UnpackBudgetError(ShapegraphError):
    """Unpacking a compressed graph would exceed the node-count cap."""


class WorkCapError(ShapegraphError):
    """An exact check exceeded its configured work cap; the result is unknown.

    Carries whatever partial state the caller may want to report.
    """

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class AlphabetError(ShapegraphError):
    """A bag uses symbols outside the alphabet of the expression."""


class ClassPreconditionError(ShapegraphError):
    """A schema does not belong to the class required by the operation."""


class BudgetError(ShapegraphError):
    """A search budget is malformed or exceeded."""
