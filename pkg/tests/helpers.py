"""Shared test utilities.

`GraphPlan` describes a program symbolically so the same program can be
materialized through the public construction API in many different
insertion orders; since node ids are handed out sequentially, each
order realizes a different id assignment of the same graph.  That is
the workhorse for isomorphism and round-trip tests.

`random_program` emits plans for a family of branch-and-merge programs:
constants in the start block, one or two compare/branch diamonds whose
arms jump into a merge block with a Phi (sometimes followed by an Add),
optionally an unreachable block feeding the merge, and a final Return.
Every plan is well formed and executable, and folds to a fixpoint.
"""

from __future__ import annotations

import random
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from firmfold import (
    ADD,
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
    OpKind,
    ProgramGraph,
)


@dataclass(frozen=True)
class GraphPlan:
    blocks: tuple[tuple[str, BlockKind], ...]
    ops: tuple[tuple[str, OpKind, str], ...]
    edges: tuple[tuple[str, str, EdgeKind, int, int | None], ...]


def materialize(plan: GraphPlan, rng: random.Random | None = None) -> ProgramGraph:
    """Build the planned graph, in plan order or a random legal order."""
    g = ProgramGraph()
    ids: dict[str, int] = {}
    blocks = list(plan.blocks)
    ops = list(plan.ops)
    edges = list(plan.edges)
    while blocks or ops or edges:
        ready: list[tuple[str, int]] = []
        ready += [("block", i) for i in range(len(blocks))]
        ready += [("op", i) for i, (_, _, blk) in enumerate(ops) if blk in ids]
        ready += [
            ("edge", i)
            for i, (src, tgt, _, _, _) in enumerate(edges)
            if src in ids and tgt in ids
        ]
        assert ready, "plan has unsatisfiable dependencies"
        kind, index = ready[0] if rng is None else rng.choice(ready)
        if kind == "block":
            name, block_kind = blocks.pop(index)
            ids[name] = g.add_block(block_kind)
        elif kind == "op":
            name, op_kind, blk = ops.pop(index)
            ids[name] = g.add_op(op_kind, ids[blk])
        else:
            src, tgt, edge_kind, position, branch = edges.pop(index)
            g.connect(ids[src], ids[tgt], edge_kind, position, branch=branch)
    return g


def random_program(rng: random.Random) -> GraphPlan:
    blocks: list[tuple[str, BlockKind]] = [
        ("start", BlockKind.START_BLOCK),
        ("end", BlockKind.END_BLOCK),
    ]
    ops: list[tuple[str, OpKind, str]] = []
    edges: list[tuple[str, str, EdgeKind, int, int | None]] = []

    consts: list[str] = []
    for i in range(rng.randint(2, 5)):
        if rng.random() < 0.5:
            value = rng.randint(-10, 10)
        else:
            value = rng.randint(INT32_MIN, INT32_MAX)
        ops.append((f"c{i}", Const(value), "start"))
        consts.append(f"c{i}")

    values = list(consts)
    current_block = "start"
    for d in range(rng.randint(1, 2)):
        cmp_name = f"cmp{d}"
        ops.append((cmp_name, Cmp(rng.choice(RELATIONS)), current_block))
        edges.append((rng.choice(consts), cmp_name, EdgeKind.DATAFLOW, 0, None))
        edges.append((rng.choice(consts), cmp_name, EdgeKind.DATAFLOW, 1, None))
        cond_name = f"cond{d}"
        ops.append((cond_name, COND, current_block))
        edges.append((cmp_name, cond_name, EdgeKind.DATAFLOW, 0, None))
        for arm, branch in (("t", 1), ("f", 0)):
            arm_block = f"arm{d}{arm}"
            blocks.append((arm_block, BlockKind.BLOCK))
            edges.append((cond_name, arm_block, EdgeKind.CONTROLFLOW, 0, branch))
            ops.append((f"jmp{d}{arm}", JMP, arm_block))
        merge = f"merge{d}"
        blocks.append((merge, BlockKind.BLOCK))
        edges.append((f"jmp{d}t", merge, EdgeKind.CONTROLFLOW, 0, None))
        edges.append((f"jmp{d}f", merge, EdgeKind.CONTROLFLOW, 1, None))
        entries = 2
        if rng.random() < 0.3:
            dead = f"dead{d}"
            blocks.append((dead, BlockKind.BLOCK))
            ops.append((f"jmp{d}dead", JMP, dead))
            edges.append((f"jmp{d}dead", merge, EdgeKind.CONTROLFLOW, 2, None))
            entries = 3
        phi_name = f"phi{d}"
        ops.append((phi_name, PHI, merge))
        for position in range(entries):
            edges.append((rng.choice(values), phi_name, EdgeKind.DATAFLOW, position, None))
        result = phi_name
        if rng.random() < 0.7:
            add_name = f"add{d}"
            ops.append((add_name, ADD, merge))
            edges.append((phi_name, add_name, EdgeKind.DATAFLOW, 0, None))
            edges.append((rng.choice(values), add_name, EdgeKind.DATAFLOW, 1, None))
            result = add_name
        values.append(result)
        current_block = merge

    ops.append(("ret", RETURN, current_block))
    edges.append((values[-1], "ret", EdgeKind.DATAFLOW, 0, None))
    edges.append(("ret", "end", EdgeKind.CONTROLFLOW, 0, None))
    return GraphPlan(tuple(blocks), tuple(ops), tuple(edges))


def random_graph(rng: random.Random) -> ProgramGraph:
    return materialize(random_program(rng), rng)


def permute_native_ids(data: bytes, rng: random.Random) -> bytes:
    """Consistently rename the node ids of a native-dialect document."""
    root = ET.fromstring(data)
    graph = root.find("graph")
    assert graph is not None
    old = [el.get("id") for el in graph if el.tag == "node"]
    shuffled = list(old)
    rng.shuffle(shuffled)
    mapping = dict(zip(old, shuffled))
    for el in graph:
        for attr in ("id", "from", "to"):
            value = el.get(attr)
            if value is not None:
                el.set(attr, mapping[value])
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)
