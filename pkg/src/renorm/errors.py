"""Exception hierarchy shared by all modules."""


class RenormError(Exception):
    """Base class for every error raised by the package."""


class ArgumentError(RenormError, ValueError):
    """Invalid argument (wrong dimension, bad count, failed precondition)."""


class SpecError(RenormError, ValueError):
    """A specification object violates its declared hypotheses.

    Attributes
    ----------
    witness : object
        Optional data exhibiting the violation.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SolverError(RenormError, RuntimeError):
    """A numerical solver did not reach the requested accuracy.

    Attributes
    ----------
    upper, lower : float or None
        Best primal (upper) and dual (lower) bounds reached.
    """

    def __init__(self, message, upper=None, lower=None):
        super().__init__(message)
        self.upper = upper
        self.lower = lower


class OracleError(RenormError, RuntimeError):
    """A membership oracle returned inconsistent answers."""


class ScheduleError(RenormError, ValueError):
    """No admissible parameter schedule exists for some point index."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SeparationError(RenormError, ValueError):
    """The base point does not separate the group."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConstructionError(RenormError, RuntimeError):
    """An inductive construction step could not be completed."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class GroupError(RenormError, ValueError):
    """Group closure or table axioms failed."""


class SchemaError(RenormError, ValueError):
    """A JSON document does not match its schema.

    Attributes
    ----------
    location : str
        JSON pointer-like path of the offending value.
    """

    def __init__(self, message, location=""):
        super().__init__(f"{location or '<root>'}: {message}")
        self.location = location
