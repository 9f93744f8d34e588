"""Exception hierarchy shared by all firmfold modules."""


class FirmFoldError(Exception):
    """Base class for every error raised by this package."""


class UnknownNodeError(FirmFoldError):
    """A node id does not exist in the graph, or has the wrong class."""


class UnknownBlockError(UnknownNodeError):
    """An id expected to name a block node does not."""


class IncompatibleEndpointsError(FirmFoldError):
    """Edge endpoints or attributes violate the kind's compatibility rules."""


class DuplicatePositionError(FirmFoldError):
    """An Edge node with the same (kind, target, position) already exists."""


class GxlError(FirmFoldError):
    """Base class for GXL loading and saving errors."""


class GxlParseError(GxlError):
    """The input is not well-formed XML."""


class SchemaError(GxlError):
    """Well-formed XML that does not fit the expected dialect schema."""


class GxlReferenceError(GxlError):
    """A relation edge references an undeclared node id."""


class UnsupportedNodeTypeError(SchemaError):
    """A node type outside the supported catalog; the offending type is named."""


class StaleMatchError(FirmFoldError):
    """A match no longer embeds into the graph it is applied to."""


class StepLimitExceeded(FirmFoldError):
    """The fold driver hit its step limit with rules still enabled."""


class StateLimitExceeded(FirmFoldError):
    """State-space exploration exceeded the allowed number of states."""


class FuelExhaustedError(FirmFoldError):
    """The interpreter ran out of fuel, typically due to a control cycle."""


class MalformedGraphError(FirmFoldError):
    """The interpreter hit a structure its preconditions rule out."""
