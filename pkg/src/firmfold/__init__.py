"""Constant folding on FIRM-style SSA program graphs by graph rewriting."""

from .engine import (
    FoldResult,
    Lts,
    Match,
    Rule,
    apply,
    explore,
    fold,
    format_trace,
    matches,
    normalize_positions,
    replay,
)
from .errors import (
    DuplicatePositionError,
    FirmFoldError,
    FuelExhaustedError,
    GxlError,
    GxlParseError,
    GxlReferenceError,
    IncompatibleEndpointsError,
    MalformedGraphError,
    SchemaError,
    StaleMatchError,
    StateLimitExceeded,
    StepLimitExceeded,
    UnknownBlockError,
    UnknownNodeError,
    UnsupportedNodeTypeError,
)
from .graph import (
    ADD,
    ARITY,
    COND,
    INT32_MAX,
    INT32_MIN,
    JMP,
    PHI,
    RELATIONS,
    RETURN,
    BlockKind,
    Cmp,
    Const,
    EdgeKind,
    EdgeNode,
    NodeId,
    OpKind,
    ProgramGraph,
    wrap32,
)
from .gxl import (
    DialectTag,
    detect_dialect,
    export_dot,
    import_firm_gxl,
    load,
    load_native,
    save_native,
)
from .interp import DEFAULT_FUEL, evaluate
from .isomorphism import canonical_form, canonical_hash, is_isomorphic
from .rules import CATALOG, RULE_NAMES, build_min_plus_one
from .verifier import CHECK_NAMES, Violation, verify

__version__ = "0.1.0"

__all__ = [
    "ADD",
    "ARITY",
    "CATALOG",
    "CHECK_NAMES",
    "COND",
    "DEFAULT_FUEL",
    "DialectTag",
    "DuplicatePositionError",
    "EdgeKind",
    "EdgeNode",
    "FirmFoldError",
    "FoldResult",
    "FuelExhaustedError",
    "GxlError",
    "GxlParseError",
    "GxlReferenceError",
    "INT32_MAX",
    "INT32_MIN",
    "IncompatibleEndpointsError",
    "JMP",
    "Lts",
    "MalformedGraphError",
    "Match",
    "NodeId",
    "OpKind",
    "PHI",
    "ProgramGraph",
    "RELATIONS",
    "RETURN",
    "RULE_NAMES",
    "Rule",
    "SchemaError",
    "StaleMatchError",
    "StateLimitExceeded",
    "StepLimitExceeded",
    "UnknownBlockError",
    "UnknownNodeError",
    "UnsupportedNodeTypeError",
    "Violation",
    "BlockKind",
    "Cmp",
    "Const",
    "apply",
    "build_min_plus_one",
    "canonical_form",
    "canonical_hash",
    "detect_dialect",
    "evaluate",
    "explore",
    "export_dot",
    "fold",
    "format_trace",
    "import_firm_gxl",
    "is_isomorphic",
    "load",
    "load_native",
    "matches",
    "normalize_positions",
    "replay",
    "save_native",
    "verify",
    "wrap32",
]
