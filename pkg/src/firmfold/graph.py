"""Typed simple-graph model for FIRM-style program graphs.

Three node classes live in one graph: operation nodes (constants,
arithmetic, comparisons, control operations), block nodes (basic
blocks), and Edge nodes.  Dataflow and control flow are not plain
adjacencies: each such edge is nodified into an Edge node carrying its
kind, its consumer-side port position, and its two endpoints.  That
keeps the graph simple (no parallel edges, no edge attributes) while
edges still carry data.  Block membership of an operation is the one
plain adjacency (the containment map); it has no attributes.

Node ids are ints, unique within a graph and never reused, not even
after deletion.  All queries return deterministically ordered results.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    DuplicatePositionError,
    IncompatibleEndpointsError,
    UnknownBlockError,
    UnknownNodeError,
)

NodeId = int

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1

RELATIONS = ("lt", "le", "gt", "ge", "eq", "ne")


def wrap32(value: int) -> int:
    """Reduce an integer to 32-bit two's-complement range."""
    return ((value - INT32_MIN) & 0xFFFFFFFF) + INT32_MIN


class BlockKind(Enum):
    START_BLOCK = "StartBlock"
    END_BLOCK = "EndBlock"
    BLOCK = "Block"


class EdgeKind(Enum):
    DATAFLOW = "Dataflow"
    CONTROLFLOW = "Controlflow"


_OP_NAMES = ("Const", "Cmp", "Cond", "Phi", "Add", "Jmp", "Return")

#: Dataflow input count per operation kind.  Phi is variable (>= 1) and
#: therefore absent.
ARITY = {"Const": 0, "Cmp": 2, "Cond": 1, "Add": 2, "Return": 1, "Jmp": 0}

#: Operation kinds that may source a Controlflow edge.
CONTROL_SOURCES = ("Jmp", "Cond", "Return")


@dataclass(frozen=True)
class OpKind:
    """Operation label.  `value` is set for Const only, `relation` for Cmp only."""

    name: str
    value: int | None = None
    relation: str | None = None

    def __post_init__(self) -> None:
        if self.name not in _OP_NAMES:
            raise ValueError(f"unknown operation kind {self.name!r}")
        if (self.value is not None) != (self.name == "Const"):
            raise ValueError("value is carried by Const and only by Const")
        if self.value is not None and not INT32_MIN <= self.value <= INT32_MAX:
            raise ValueError(f"constant {self.value} outside 32-bit range")
        if (self.relation is not None) != (self.name == "Cmp"):
            raise ValueError("relation is carried by Cmp and only by Cmp")
        if self.relation is not None and self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")


def Const(value: int) -> OpKind:
    """Integer constant; the value is reduced to 32-bit two's-complement."""
    return OpKind("Const", value=wrap32(value))


def Cmp(relation: str) -> OpKind:
    """Signed comparison producing 1 (holds) or 0 (does not hold)."""
    return OpKind("Cmp", relation=relation)


COND = OpKind("Cond")
PHI = OpKind("Phi")
ADD = OpKind("Add")
JMP = OpKind("Jmp")
RETURN = OpKind("Return")


@dataclass
class EdgeNode:
    """A nodified edge: kind, consumer-side port position, endpoints.

    `branch` is set exactly on Controlflow edges sourced by a Cond and
    distinguishes the successor taken when the selector is non-zero
    (branch 1) from the zero successor (branch 0).
    """

    id: NodeId
    kind: EdgeKind
    position: int
    source: NodeId
    target: NodeId
    branch: int | None = None


class ProgramGraph:
    """Mutable program graph over operation, block, and Edge nodes.

    Structural invariants maintained by every public operation: the
    three node maps have disjoint key sets, Edge node endpoints and
    containment targets always reference existing nodes, Dataflow edges
    connect operation nodes, and Controlflow edges run from a Jmp, Cond,
    or Return into a block.  Position uniqueness per input port set is
    enforced by `connect` but not re-checked after deletions; the
    verifier's pos-check owns that invariant.
    """

    __slots__ = ("op_nodes", "block_nodes", "edge_nodes", "containment", "_next_id")

    def __init__(self) -> None:
        self.op_nodes: dict[NodeId, OpKind] = {}
        self.block_nodes: dict[NodeId, BlockKind] = {}
        self.edge_nodes: dict[NodeId, EdgeNode] = {}
        self.containment: dict[NodeId, NodeId] = {}
        self._next_id = 0

    # -- construction -------------------------------------------------

    def _fresh_id(self) -> NodeId:
        nid = self._next_id
        self._next_id += 1
        return nid

    def add_block(self, kind: BlockKind) -> NodeId:
        nid = self._fresh_id()
        self.block_nodes[nid] = kind
        return nid

    def add_op(self, kind: OpKind, block: NodeId) -> NodeId:
        """Create an operation node contained in `block`."""
        if block not in self.block_nodes:
            raise UnknownBlockError(f"n{block} is not a block node")
        nid = self._fresh_id()
        self.op_nodes[nid] = kind
        self.containment[nid] = block
        return nid

    def connect(
        self,
        source: NodeId,
        target: NodeId,
        kind: EdgeKind,
        position: int,
        *,
        branch: int | None = None,
    ) -> NodeId:
        """Create an Edge node from `source` to `target` at `position`.

        Raises:
            UnknownNodeError: an endpoint does not exist.
            IncompatibleEndpointsError: endpoint classes or the branch
                attribute do not fit the edge kind.
            DuplicatePositionError: an Edge node with the same
                (kind, target, position) already exists.
        """
        if position < 0:
            raise ValueError("position must be non-negative")
        for endpoint in (source, target):
            if endpoint not in self.op_nodes and endpoint not in self.block_nodes:
                raise UnknownNodeError(f"n{endpoint} does not exist")
        if kind is EdgeKind.DATAFLOW:
            if source not in self.op_nodes or target not in self.op_nodes:
                raise IncompatibleEndpointsError(
                    "Dataflow edges connect operation nodes"
                )
        else:
            if target not in self.block_nodes:
                raise IncompatibleEndpointsError("Controlflow edges target a block")
            if self.op_nodes.get(source, OpKind("Phi")).name not in CONTROL_SOURCES:
                raise IncompatibleEndpointsError(
                    "Controlflow edges are sourced by Jmp, Cond, or Return"
                )
        cond_sourced = (
            kind is EdgeKind.CONTROLFLOW
            and self.op_nodes.get(source) is not None
            and self.op_nodes[source].name == "Cond"
        )
        if cond_sourced:
            if branch not in (0, 1):
                raise IncompatibleEndpointsError(
                    "Controlflow edges sourced by a Cond carry branch 0 or 1"
                )
        elif branch is not None:
            raise IncompatibleEndpointsError(
                "branch is only carried by Cond-sourced Controlflow edges"
            )
        for edge in self.edge_nodes.values():
            if edge.kind is kind and edge.target == target and edge.position == position:
                raise DuplicatePositionError(
                    f"{kind.value} input {position} of n{target} already occupied"
                )
        nid = self._fresh_id()
        self.edge_nodes[nid] = EdgeNode(nid, kind, position, source, target, branch)
        return nid

    def delete_node(self, node: NodeId) -> int:
        """Delete a node and every Edge node incident to it.

        Deleting a block does not delete its member operations; they
        merely lose their containment entry.  Returns the number of
        deleted elements (the node itself plus incident Edge nodes).
        """
        if node in self.edge_nodes:
            del self.edge_nodes[node]
            return 1
        if node in self.op_nodes:
            incident = [
                eid
                for eid, e in self.edge_nodes.items()
                if e.source == node or e.target == node
            ]
            for eid in incident:
                del self.edge_nodes[eid]
            del self.op_nodes[node]
            self.containment.pop(node, None)
            return 1 + len(incident)
        if node in self.block_nodes:
            incident = [
                eid
                for eid, e in self.edge_nodes.items()
                if e.source == node or e.target == node
            ]
            for eid in incident:
                del self.edge_nodes[eid]
            del self.block_nodes[node]
            for op in [op for op, blk in self.containment.items() if blk == node]:
                del self.containment[op]
            return 1 + len(incident)
        raise UnknownNodeError(f"n{node} does not exist")

    # -- queries ------------------------------------------------------

    def op_kind(self, n: NodeId) -> OpKind:
        if n not in self.op_nodes:
            raise UnknownNodeError(f"n{n} is not an operation node")
        return self.op_nodes[n]

    def block_kind(self, b: NodeId) -> BlockKind:
        if b not in self.block_nodes:
            raise UnknownBlockError(f"n{b} is not a block node")
        return self.block_nodes[b]

    def blocks_of_kind(self, kind: BlockKind) -> list[NodeId]:
        return sorted(b for b, k in self.block_nodes.items() if k is kind)

    def data_inputs(self, n: NodeId) -> list[tuple[NodeId, NodeId]]:
        """Dataflow (edge id, source) pairs into `n`, ascending by position."""
        if n not in self.op_nodes:
            raise UnknownNodeError(f"n{n} is not an operation node")
        edges = [
            e
            for e in self.edge_nodes.values()
            if e.kind is EdgeKind.DATAFLOW and e.target == n
        ]
        edges.sort(key=lambda e: (e.position, e.id))
        return [(e.id, e.source) for e in edges]

    def data_users(self, n: NodeId) -> list[tuple[NodeId, NodeId]]:
        """Dataflow (edge id, target) pairs out of `n`, ascending by target id."""
        if n not in self.op_nodes:
            raise UnknownNodeError(f"n{n} is not an operation node")
        edges = [
            e
            for e in self.edge_nodes.values()
            if e.kind is EdgeKind.DATAFLOW and e.source == n
        ]
        edges.sort(key=lambda e: (e.target, e.id))
        return [(e.id, e.target) for e in edges]

    def control_preds(self, b: NodeId) -> list[tuple[NodeId, NodeId]]:
        """Controlflow (edge id, source) pairs into block `b`, ascending by position."""
        if b not in self.block_nodes:
            raise UnknownBlockError(f"n{b} is not a block node")
        edges = [
            e
            for e in self.edge_nodes.values()
            if e.kind is EdgeKind.CONTROLFLOW and e.target == b
        ]
        edges.sort(key=lambda e: (e.position, e.id))
        return [(e.id, e.source) for e in edges]

    def control_succs(self, n: NodeId) -> list[tuple[NodeId, NodeId]]:
        """Controlflow (edge id, target block) pairs sourced by operation `n`."""
        if n not in self.op_nodes:
            raise UnknownNodeError(f"n{n} is not an operation node")
        edges = [
            e
            for e in self.edge_nodes.values()
            if e.kind is EdgeKind.CONTROLFLOW and e.source == n
        ]
        edges.sort(key=lambda e: e.id)
        return [(e.id, e.target) for e in edges]

    def members(self, b: NodeId) -> list[NodeId]:
        """Operation nodes contained in block `b`, ascending by id."""
        if b not in self.block_nodes:
            raise UnknownBlockError(f"n{b} is not a block node")
        return sorted(op for op, blk in self.containment.items() if blk == b)

    def element_count(self) -> int:
        return len(self.op_nodes) + len(self.block_nodes) + len(self.edge_nodes)

    # -- copying and low-level assembly -------------------------------

    def copy(self) -> ProgramGraph:
        h = ProgramGraph()
        h.op_nodes = dict(self.op_nodes)
        h.block_nodes = dict(self.block_nodes)
        h.edge_nodes = {eid: replace(e) for eid, e in self.edge_nodes.items()}
        h.containment = dict(self.containment)
        h._next_id = self._next_id
        return h

    @classmethod
    def _from_parts(
        cls,
        op_nodes: dict[NodeId, OpKind],
        block_nodes: dict[NodeId, BlockKind],
        edge_nodes: dict[NodeId, EdgeNode],
        containment: dict[NodeId, NodeId],
    ) -> ProgramGraph:
        """Assemble a graph from raw maps, validating structural invariants.

        Used by loaders.  Position uniqueness is deliberately not
        enforced here; pos-check reports it.
        """
        ids = list(op_nodes) + list(block_nodes) + list(edge_nodes)
        if len(set(ids)) != len(ids):
            raise UnknownNodeError("node classes share an id")
        g = cls()
        g.op_nodes = dict(op_nodes)
        g.block_nodes = dict(block_nodes)
        g.edge_nodes = {eid: replace(e) for eid, e in edge_nodes.items()}
        g.containment = dict(containment)
        g._next_id = max(ids, default=-1) + 1
        for e in g.edge_nodes.values():
            for endpoint in (e.source, e.target):
                if endpoint not in g.op_nodes and endpoint not in g.block_nodes:
                    raise UnknownNodeError(f"edge n{e.id} references missing n{endpoint}")
            if e.position < 0:
                raise IncompatibleEndpointsError(f"edge n{e.id} has negative position")
            if e.kind is EdgeKind.DATAFLOW:
                if e.source not in g.op_nodes or e.target not in g.op_nodes:
                    raise IncompatibleEndpointsError(
                        f"Dataflow edge n{e.id} must connect operation nodes"
                    )
                if e.branch is not None:
                    raise IncompatibleEndpointsError(
                        f"Dataflow edge n{e.id} carries a branch attribute"
                    )
            else:
                if e.target not in g.block_nodes:
                    raise IncompatibleEndpointsError(
                        f"Controlflow edge n{e.id} must target a block"
                    )
                src_kind = g.op_nodes.get(e.source)
                if src_kind is None or src_kind.name not in CONTROL_SOURCES:
                    raise IncompatibleEndpointsError(
                        f"Controlflow edge n{e.id} must be sourced by Jmp, Cond, or Return"
                    )
                cond_sourced = src_kind.name == "Cond"
                if cond_sourced and e.branch not in (0, 1):
                    raise IncompatibleEndpointsError(
                        f"Cond-sourced Controlflow edge n{e.id} needs branch 0 or 1"
                    )
                if not cond_sourced and e.branch is not None:
                    raise IncompatibleEndpointsError(
                        f"Controlflow edge n{e.id} carries a branch attribute"
                    )
        for op, blk in g.containment.items():
            if op not in g.op_nodes:
                raise UnknownNodeError(f"containment key n{op} is not an operation")
            if blk not in g.block_nodes:
                raise UnknownBlockError(f"containment target n{blk} is not a block")
        return g

    def __repr__(self) -> str:
        return (
            f"ProgramGraph(ops={len(self.op_nodes)}, blocks={len(self.block_nodes)}, "
            f"edges={len(self.edge_nodes)})"
        )
