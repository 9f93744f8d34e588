"""Deterministic rewriting and exhaustive state-space exploration.

A rule pairs a matcher, which enumerates every match of its pattern in
a graph, with an applier that rewrites one match on a copy.  The fold
driver is deterministic: at each step it takes the lowest-priority-value
rule that matches at all and that rule's anchor-lexicographically
smallest match.  The explorer instead takes every match of every rule
from every reachable state, deduplicating states up to isomorphism, and
so observes whether all maximal rewrites end in the same place.

Every rule application strictly shrinks the element count; that measure
is asserted on each step and bounds both drivers.

After each step the drivers compact input positions (see
`normalize_positions`), so consumer ports stay 0..n-1 without the rules
having to renumber anything themselves.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

from .errors import StaleMatchError, StateLimitExceeded, StepLimitExceeded
from .graph import NodeId, ProgramGraph
from .isomorphism import canonical_hash, is_isomorphic


@dataclass(frozen=True)
class Match:
    """One occurrence of a rule's pattern, identified by its anchor nodes."""

    rule_name: str
    anchors: tuple[NodeId, ...]


@dataclass(frozen=True)
class Rule:
    name: str
    priority: int
    matcher: Callable[[ProgramGraph], list[Match]]
    applier: Callable[[ProgramGraph, Match], ProgramGraph]


def matches(g: ProgramGraph, rule: Rule) -> list[Match]:
    """All matches of `rule` in `g`, anchor-lexicographic order."""
    return sorted(rule.matcher(g), key=lambda m: m.anchors)


def apply(g: ProgramGraph, rule: Rule, match: Match) -> ProgramGraph:
    """Rewrite one match on a copy of `g`.

    Raises StaleMatchError when the match does not occur in `g` (for
    example, a match computed before an earlier rewrite invalidated it).
    """
    if match not in rule.matcher(g):
        raise StaleMatchError(f"{match.rule_name} does not match at {match.anchors}")
    result = rule.applier(g, match)
    assert result.element_count() < g.element_count(), (
        f"{rule.name} did not shrink the graph"
    )
    return result


def normalize_positions(g: ProgramGraph, target: NodeId) -> ProgramGraph:
    """Compact the input positions of one consumer to 0..n-1 on a copy.

    For an operation node the dataflow input edges are renumbered in
    (position, edge id) order.  For a block the control entry edges are
    renumbered the same way, and the identical old-to-new position
    mapping is applied to the dataflow inputs of every Phi in the block,
    keeping Phi selection aligned with block entries.
    """
    h = g.copy()
    if target in h.op_nodes:
        edges = [h.edge_nodes[eid] for eid, _ in h.data_inputs(target)]
        for index, e in enumerate(edges):
            e.position = index
        return h
    edges = [h.edge_nodes[eid] for eid, _ in h.control_preds(target)]
    mapping: dict[int, int] = {}
    for index, e in enumerate(edges):
        mapping.setdefault(e.position, index)
        e.position = index
    for phi in h.members(target):
        if h.op_nodes[phi].name != "Phi":
            continue
        for eid, _ in h.data_inputs(phi):
            e = h.edge_nodes[eid]
            if e.position in mapping:
                e.position = mapping[e.position]
    return h


def _contiguous(positions: list[int]) -> bool:
    return positions == list(range(len(positions)))


def _normalize_all(g: ProgramGraph) -> ProgramGraph:
    """Compact every consumer's positions, deferring blocks with misaligned Phis.

    A block whose Phi still has an input at a position no entry edge
    carries is left alone: renumbering it now could collide that stale
    input with a live one.  The stale input is a rewrite's job to
    remove; once it is gone the block is compacted on a later pass.
    """
    current = g
    while True:
        changed = False
        for block in sorted(current.block_nodes):
            positions = [
                current.edge_nodes[eid].position
                for eid, _ in current.control_preds(block)
            ]
            if _contiguous(positions):
                continue
            entry_set = set(positions)
            misaligned = False
            for phi in current.members(block):
                if current.op_nodes[phi].name != "Phi":
                    continue
                for eid, _ in current.data_inputs(phi):
                    if current.edge_nodes[eid].position not in entry_set:
                        misaligned = True
            if misaligned:
                continue
            current = normalize_positions(current, block)
            changed = True
        for op in sorted(current.op_nodes):
            if current.op_nodes[op].name == "Phi":
                continue
            positions = [
                current.edge_nodes[eid].position for eid, _ in current.data_inputs(op)
            ]
            if not _contiguous(positions):
                current = normalize_positions(current, op)
                changed = True
        if not changed:
            return current


def format_trace(trace: tuple[Match, ...]) -> str:
    """One line per step: `step 1: rule-name @ [n8, n5]`."""
    out = []
    for index, m in enumerate(trace, 1):
        anchors = ", ".join(f"n{a}" for a in m.anchors)
        out.append(f"step {index}: {m.rule_name} @ [{anchors}]\n")
    return "".join(out)


@dataclass(frozen=True)
class FoldResult:
    graph: ProgramGraph
    trace: tuple[Match, ...]
    steps: int

    def format_trace(self) -> str:
        return format_trace(self.trace)


def fold(
    g: ProgramGraph, rules: tuple[Rule, ...], max_steps: int = 10_000
) -> FoldResult:
    """Rewrite deterministically until no rule matches.

    Raises StepLimitExceeded if a rule still matches after `max_steps`
    applications.
    """
    ordered = sorted(rules, key=lambda r: r.priority)
    current = g
    trace: list[Match] = []
    while True:
        chosen: tuple[Rule, Match] | None = None
        for rule in ordered:
            found = matches(current, rule)
            if found:
                chosen = (rule, found[0])
                break
        if chosen is None:
            return FoldResult(current, tuple(trace), len(trace))
        if len(trace) >= max_steps:
            raise StepLimitExceeded(f"no fixpoint within {max_steps} steps")
        rule, match = chosen
        current = _normalize_all(apply(current, rule, match))
        trace.append(match)


def replay(g: ProgramGraph, rules: tuple[Rule, ...], trace: tuple[Match, ...]) -> ProgramGraph:
    """Re-apply a recorded trace step by step."""
    by_name = {r.name: r for r in rules}
    current = g
    for match in trace:
        current = _normalize_all(apply(current, by_name[match.rule_name], match))
    return current


@dataclass(frozen=True)
class Lts:
    """Labelled transition system over rewrite states.

    States are keyed by canonical digest; transitions are
    (source digest, rule name, target digest) triples.  Final states
    have no outgoing transition.
    """

    states: dict[str, ProgramGraph]
    transitions: tuple[tuple[str, str, str], ...]
    initial: str
    final: frozenset[str]

    def final_states_isomorphic(self) -> bool:
        """Whether all maximal rewrites ended in the same graph."""
        finals = sorted(self.final)
        if not finals:
            return True
        first = self.states[finals[0]]
        return all(is_isomorphic(first, self.states[d]) for d in finals[1:])


def explore(
    g: ProgramGraph, rules: tuple[Rule, ...], max_states: int = 10_000
) -> Lts:
    """Breadth-first closure of `g` under all matches of all rules.

    States are deduplicated by canonical digest and the digest identity
    is confirmed with the independent isomorphism test.  Raises
    StateLimitExceeded when more than `max_states` distinct states turn
    up.
    """
    ordered = sorted(rules, key=lambda r: r.priority)
    initial = canonical_hash(g)
    states: dict[str, ProgramGraph] = {initial: g}
    transitions: set[tuple[str, str, str]] = set()
    queue: deque[str] = deque([initial])
    while queue:
        digest = queue.popleft()
        state = states[digest]
        for rule in ordered:
            for match in matches(state, rule):
                successor = _normalize_all(apply(state, rule, match))
                succ_digest = canonical_hash(successor)
                if succ_digest in states:
                    if not is_isomorphic(successor, states[succ_digest]):
                        raise RuntimeError(
                            "canonical digest collision between non-isomorphic states"
                        )
                else:
                    if len(states) >= max_states:
                        raise StateLimitExceeded(
                            f"state space exceeds {max_states} states"
                        )
                    states[succ_digest] = successor
                    queue.append(succ_digest)
                transitions.add((digest, rule.name, succ_digest))
    outgoing = {src for src, _, _ in transitions}
    final = frozenset(d for d in states if d not in outgoing)
    return Lts(states, tuple(sorted(transitions)), initial, final)
