"""Reference execution of program graphs.

`evaluate` runs a graph the way the IR means it: control starts in the
start block, each block hands off through its single control operation,
and the value returned by the Return operation is the program's result.
A Phi resolves to the input whose position matches the entry through
which its block was most recently reached.

Values are memoized per run.  For the acyclic graphs this package
rewrites that is exact; a cyclic graph whose values change between
iterations will pin its exit condition to the first computed value,
never leave the loop, and exhaust its fuel, so the memo can cost
termination but never a wrong result.
"""

from __future__ import annotations

from .errors import FuelExhaustedError, MalformedGraphError
from .graph import BlockKind, NodeId, ProgramGraph, wrap32

DEFAULT_FUEL = 10_000

_CONTROL_OPS = ("Jmp", "Cond", "Return")

_RELATION_TESTS = {
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
}


def evaluate(g: ProgramGraph, fuel: int = DEFAULT_FUEL) -> int:
    """Execute `g` and return its Return value.

    Raises MalformedGraphError when the graph cannot be executed (no
    unique start block, a block without exactly one control operation,
    missing operands, an unresolvable Phi) and FuelExhaustedError when
    `fuel` value computations plus block transitions are not enough.
    """
    starts = g.blocks_of_kind(BlockKind.START_BLOCK)
    if len(starts) != 1:
        raise MalformedGraphError(f"execution needs exactly one start block, found {len(starts)}")

    budget = fuel
    env: dict[NodeId, int] = {}
    entered: dict[NodeId, int] = {}

    def spend() -> None:
        nonlocal budget
        if budget <= 0:
            raise FuelExhaustedError(f"no fixpoint of execution within {fuel} steps")
        budget -= 1

    def operands(op: NodeId, count: int) -> list[NodeId]:
        inputs = g.data_inputs(op)
        positions = [g.edge_nodes[eid].position for eid, _ in inputs]
        if len(inputs) != count or positions != list(range(count)):
            raise MalformedGraphError(
                f"n{op} needs {count} operands at positions 0..{count - 1}"
            )
        return [src for _, src in inputs]

    def value(op: NodeId) -> int:
        if op in env:
            return env[op]
        spend()
        kind = g.op_nodes[op]
        if kind.name == "Const":
            result = kind.value
        elif kind.name == "Add":
            a, b = (value(src) for src in operands(op, 2))
            result = wrap32(a + b)
        elif kind.name == "Cmp":
            a, b = (value(src) for src in operands(op, 2))
            result = 1 if _RELATION_TESTS[kind.relation](a, b) else 0
        elif kind.name == "Phi":
            block = g.containment.get(op)
            if block is None or block not in entered:
                raise MalformedGraphError(f"Phi n{op} has no resolved block entry")
            matching = [
                src
                for eid, src in g.data_inputs(op)
                if g.edge_nodes[eid].position == entered[block]
            ]
            if len(matching) != 1:
                raise MalformedGraphError(
                    f"Phi n{op} has no unique input for entry {entered[block]}"
                )
            result = value(matching[0])
        else:
            raise MalformedGraphError(f"n{op} ({kind.name}) produces no value")
        env[op] = result
        return result

    current = starts[0]
    while True:
        control = [
            op for op in g.members(current) if g.op_nodes[op].name in _CONTROL_OPS
        ]
        if len(control) != 1:
            raise MalformedGraphError(
                f"block n{current} needs exactly one control operation, found {len(control)}"
            )
        op = control[0]
        name = g.op_nodes[op].name
        if name == "Return":
            (operand,) = operands(op, 1)
            return value(operand)
        if name == "Jmp":
            succs = g.control_succs(op)
            if len(succs) != 1:
                raise MalformedGraphError(f"Jmp n{op} needs exactly one successor")
            eid, target = succs[0]
        else:
            (selector,) = operands(op, 1)
            want = 1 if value(selector) != 0 else 0
            succs = [
                (eid, target)
                for eid, target in g.control_succs(op)
                if g.edge_nodes[eid].branch == want
            ]
            if len(succs) != 1:
                raise MalformedGraphError(
                    f"Cond n{op} needs exactly one branch-{want} successor"
                )
            eid, target = succs[0]
        spend()
        entered[target] = g.edge_nodes[eid].position
        current = target
