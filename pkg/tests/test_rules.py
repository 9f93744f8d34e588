"""Rule-by-rule behavior: patterns, rewrites, and what each leaves alone."""

from __future__ import annotations

import pytest

from firmfold import (
    ADD,
    COND,
    INT32_MAX,
    INT32_MIN,
    JMP,
    PHI,
    RETURN,
    BlockKind,
    Cmp,
    Const,
    EdgeKind,
    Match,
    ProgramGraph,
    StaleMatchError,
    build_min_plus_one,
    matches,
)
from firmfold.rules import (
    CATALOG,
    RULE_NAMES,
    rule_add_fold_int,
    rule_block_remove,
    rule_cleanup_dangling_control,
    rule_cleanup_dangling_dataflow,
    rule_cleanup_unref_const,
    rule_cmp_fold_int,
    rule_cond_fold_false,
    rule_cond_fold_true,
    rule_phi_adjust,
    rule_phi_fold_single,
)


def rule(name: str):
    return next(r for r in CATALOG if r.name == name)


def test_catalog_shape():
    assert len(CATALOG) == 10
    assert [r.priority for r in CATALOG] == list(range(1, 11))
    assert len(set(RULE_NAMES)) == 10


def straightline(*values: int) -> tuple[ProgramGraph, list[int]]:
    """A start block with the given constants; returns (graph, const ids)."""
    g = ProgramGraph()
    start = g.add_block(BlockKind.START_BLOCK)
    g.add_block(BlockKind.END_BLOCK)
    return g, [g.add_op(Const(v), start) for v in values]


def test_add_fold_basic():
    g, (a, b) = straightline(2, 3)
    add = g.add_op(ADD, 0)
    ret = g.add_op(RETURN, 0)
    g.connect(a, add, EdgeKind.DATAFLOW, 0)
    g.connect(b, add, EdgeKind.DATAFLOW, 1)
    user = g.connect(add, ret, EdgeKind.DATAFLOW, 0)
    found = matches(g, rule("add-fold-int"))
    assert found == [Match("add-fold-int", (add, a, b))]
    h = rule_add_fold_int(g, found[0])
    # the операnds themselves survive; only the Add and its input edges go
    assert a in h.op_nodes and b in h.op_nodes
    assert add not in h.op_nodes
    (new_const,) = [
        n for n, k in h.op_nodes.items() if k.name == "Const" and n not in (a, b)
    ]
    assert h.op_nodes[new_const].value == 5
    assert h.containment[new_const] == 0
    # the user edge is the same Edge node, redirected
    assert h.edge_nodes[user].source == new_const
    assert h.edge_nodes[user].target == ret
    assert h.element_count() == g.element_count() - 2


def test_add_fold_wraps_around():
    g, (a, b) = straightline(INT32_MAX, 1)
    add = g.add_op(ADD, 0)
    ret = g.add_op(RETURN, 0)
    g.connect(a, add, EdgeKind.DATAFLOW, 0)
    g.connect(b, add, EdgeKind.DATAFLOW, 1)
    g.connect(add, ret, EdgeKind.DATAFLOW, 0)
    h = rule_add_fold_int(g, matches(g, rule("add-fold-int"))[0])
    (new_const,) = [
        n for n, k in h.op_nodes.items() if k.name == "Const" and n not in (a, b)
    ]
    assert h.op_nodes[new_const].value == INT32_MIN


def test_add_fold_preserves_every_user():
    g, (a, b) = straightline(2, 3)
    add = g.add_op(ADD, 0)
    g.connect(a, add, EdgeKind.DATAFLOW, 0)
    g.connect(b, add, EdgeKind.DATAFLOW, 1)
    users = []
    for position in range(3):
        ret = g.add_op(RETURN, 0)
        users.append(g.connect(add, ret, EdgeKind.DATAFLOW, 0))
    h = rule_add_fold_int(g, matches(g, rule("add-fold-int"))[0])
    survivors = [eid for eid in users if eid in h.edge_nodes]
    assert survivors == users
    sources = {h.edge_nodes[eid].source for eid in users}
    assert len(sources) == 1
    (folded,) = sources
    assert h.op_nodes[folded].value == 5


def test_add_fold_requires_a_user():
    g, (a, b) = straightline(2, 3)
    add = g.add_op(ADD, 0)
    g.connect(a, add, EdgeKind.DATAFLOW, 0)
    g.connect(b, add, EdgeKind.DATAFLOW, 1)
    assert matches(g, rule("add-fold-int")) == []


def test_add_fold_requires_const_operands():
    g, (a, b, c) = straightline(2, 3, 4)
    inner = g.add_op(ADD, 0)
    outer = g.add_op(ADD, 0)
    ret = g.add_op(RETURN, 0)
    g.connect(a, inner, EdgeKind.DATAFLOW, 0)
    g.connect(b, inner, EdgeKind.DATAFLOW, 1)
    g.connect(inner, outer, EdgeKind.DATAFLOW, 0)
    g.connect(c, outer, EdgeKind.DATAFLOW, 1)
    g.connect(outer, ret, EdgeKind.DATAFLOW, 0)
    found = matches(g, rule("add-fold-int"))
    assert [m.anchors[0] for m in found] == [inner]


def test_add_fold_requires_a_start_block():
    g = ProgramGraph()
    block = g.add_block(BlockKind.BLOCK)
    a = g.add_op(Const(1), block)
    b = g.add_op(Const(2), block)
    add = g.add_op(ADD, block)
    ret = g.add_op(RETURN, block)
    g.connect(a, add, EdgeKind.DATAFLOW, 0)
    g.connect(b, add, EdgeKind.DATAFLOW, 1)
    g.connect(add, ret, EdgeKind.DATAFLOW, 0)
    assert matches(g, rule("add-fold-int")) == []


@pytest.mark.parametrize(
    "relation,a,b,expected",
    [
        ("lt", 3, 5, 1),
        ("lt", 5, 5, 0),
        ("le", 5, 5, 1),
        ("gt", -1, -2, 1),
        ("ge", INT32_MIN, INT32_MAX, 0),
        ("eq", 7, 7, 1),
        ("ne", -1, -1, 0),
    ],
)
def test_cmp_fold_signed_relations(relation, a, b, expected):
    g, (ca, cb) = straightline(a, b)
    cmp_ = g.add_op(Cmp(relation), 0)
    ret = g.add_op(RETURN, 0)
    g.connect(ca, cmp_, EdgeKind.DATAFLOW, 0)
    g.connect(cb, cmp_, EdgeKind.DATAFLOW, 1)
    user = g.connect(cmp_, ret, EdgeKind.DATAFLOW, 0)
    h = rule_cmp_fold_int(g, matches(g, rule("cmp-fold-int"))[0])
    assert h.op_nodes[h.edge_nodes[user].source].value == expected


def diamond() -> ProgramGraph:
    return build_min_plus_one(3, 5, "lt")


def cond_ready(selector_value: int) -> ProgramGraph:
    """A Cond whose selector is already a constant."""
    g = ProgramGraph()
    start = g.add_block(BlockKind.START_BLOCK)
    bt = g.add_block(BlockKind.BLOCK)
    bf = g.add_block(BlockKind.BLOCK)
    sel = g.add_op(Const(selector_value), start)
    cond = g.add_op(COND, start)
    g.connect(sel, cond, EdgeKind.DATAFLOW, 0)
    g.connect(cond, bt, EdgeKind.CONTROLFLOW, 0, branch=1)
    g.connect(cond, bf, EdgeKind.CONTROLFLOW, 0, branch=0)
    return g


def test_cond_fold_true_keeps_branch_one():
    g = cond_ready(7)
    assert matches(g, rule("cond-fold-false")) == []
    found = matches(g, rule("cond-fold-true"))
    assert found == [Match("cond-fold-true", (4, 3))]
    h = rule_cond_fold_true(g, found[0])
    assert 4 not in h.op_nodes
    (jmp,) = [n for n, k in h.op_nodes.items() if k.name == "Jmp"]
    assert h.containment[jmp] == 0
    succs = h.control_succs(jmp)
    assert [target for _, target in succs] == [1]
    assert h.edge_nodes[succs[0][0]].branch is None
    assert h.element_count() == g.element_count() - 2


def test_cond_fold_false_keeps_branch_zero():
    g = cond_ready(0)
    assert matches(g, rule("cond-fold-true")) == []
    h = rule_cond_fold_false(g, matches(g, rule("cond-fold-false"))[0])
    (jmp,) = [n for n, k in h.op_nodes.items() if k.name == "Jmp"]
    assert [target for _, target in h.control_succs(jmp)] == [2]


def test_cond_fold_negative_selector_counts_as_true():
    g = cond_ready(-1)
    assert len(matches(g, rule("cond-fold-true"))) == 1


def test_cond_fold_needs_const_selector():
    g = diamond()
    assert matches(g, rule("cond-fold-true")) == []
    assert matches(g, rule("cond-fold-false")) == []


def test_block_remove_only_predless_ordinary_blocks():
    g = diamond()
    assert matches(g, rule("block-remove")) == []
    g2 = ProgramGraph()
    g2.add_block(BlockKind.START_BLOCK)
    g2.add_block(BlockKind.END_BLOCK)
    dead = g2.add_block(BlockKind.BLOCK)
    found = matches(g2, rule("block-remove"))
    # start and end blocks are never candidates, predless or not
    assert found == [Match("block-remove", (dead,))]


def test_block_remove_takes_members_and_their_edges():
    g = ProgramGraph()
    g.add_block(BlockKind.START_BLOCK)
    merge = g.add_block(BlockKind.BLOCK)
    dead = g.add_block(BlockKind.BLOCK)
    jmp = g.add_op(JMP, dead)
    g.connect(jmp, merge, EdgeKind.CONTROLFLOW, 0)
    before = g.element_count()
    h = rule_block_remove(g, Match("block-remove", (dead,)))
    assert h.element_count() == before - 3
    assert jmp not in h.op_nodes
    assert h.control_preds(merge) == []


def test_phi_adjust_drops_stale_input():
    g = diamond()
    # sever the false arm by hand: the entry edge at position 1 goes away
    g.delete_node(21)
    found = matches(g, rule("phi-adjust"))
    assert found == [Match("phi-adjust", (12, 23))]
    h = rule_phi_adjust(g, found[0])
    assert 23 not in h.edge_nodes
    assert [src for _, src in h.data_inputs(12)] == [5]


def test_phi_adjust_quiet_on_aligned_phi():
    assert matches(diamond(), rule("phi-adjust")) == []


def test_phi_fold_single_shorts_out_the_phi():
    g = ProgramGraph()
    start = g.add_block(BlockKind.START_BLOCK)
    merge = g.add_block(BlockKind.BLOCK)
    c = g.add_op(Const(9), start)
    jmp = g.add_op(JMP, start)
    phi = g.add_op(PHI, merge)
    ret = g.add_op(RETURN, merge)
    g.connect(jmp, merge, EdgeKind.CONTROLFLOW, 0)
    g.connect(c, phi, EdgeKind.DATAFLOW, 0)
    user = g.connect(phi, ret, EdgeKind.DATAFLOW, 0)
    found = matches(g, rule("phi-fold-single"))
    assert found == [Match("phi-fold-single", (phi, c))]
    h = rule_phi_fold_single(g, found[0])
    assert phi not in h.op_nodes
    assert h.edge_nodes[user].source == c
    assert h.element_count() == g.element_count() - 2


def test_phi_fold_single_needs_single_entry():
    g = diamond()
    assert matches(g, rule("phi-fold-single")) == []


def test_cleanup_dangling_dataflow():
    g = ProgramGraph()
    g.add_block(BlockKind.START_BLOCK)
    block = g.add_block(BlockKind.BLOCK)
    stray = g.add_op(Const(5), block)
    ret = g.add_op(RETURN, 0)
    edge = g.connect(stray, ret, EdgeKind.DATAFLOW, 0)
    g.delete_node(block)
    found = matches(g, rule("cleanup-dangling-dataflow"))
    assert found == [Match("cleanup-dangling-dataflow", (edge,))]
    h = rule_cleanup_dangling_dataflow(g, found[0])
    assert edge not in h.edge_nodes
    assert stray in h.op_nodes  # the constant itself is unref-const's turn


def test_cleanup_dangling_control():
    g = ProgramGraph()
    g.add_block(BlockKind.START_BLOCK)
    block = g.add_block(BlockKind.BLOCK)
    jmp = g.add_op(JMP, block)
    edge = g.connect(jmp, 0, EdgeKind.CONTROLFLOW, 0)
    g.delete_node(block)
    found = matches(g, rule("cleanup-dangling-control"))
    assert found == [Match("cleanup-dangling-control", (edge,))]
    h = rule_cleanup_dangling_control(g, found[0])
    assert edge not in h.edge_nodes


def test_cleanup_unref_const():
    g, (a, b) = straightline(1, 2)
    ret = g.add_op(RETURN, 0)
    g.connect(a, ret, EdgeKind.DATAFLOW, 0)
    found = matches(g, rule("cleanup-unref-const"))
    assert found == [Match("cleanup-unref-const", (b,))]
    h = rule_cleanup_unref_const(g, found[0])
    assert b not in h.op_nodes
    assert a in h.op_nodes


def test_appliers_reject_fabricated_matches():
    g = diamond()
    cases = [
        (rule_add_fold_int, Match("add-fold-int", (13, 5, 6))),
        (rule_cmp_fold_int, Match("cmp-fold-int", (8, 6, 5))),
        (rule_cond_fold_true, Match("cond-fold-true", (9, 8))),
        (rule_cond_fold_false, Match("cond-fold-false", (9, 8))),
        (rule_block_remove, Match("block-remove", (1,))),
        (rule_phi_adjust, Match("phi-adjust", (12, 22))),
        (rule_phi_fold_single, Match("phi-fold-single", (12, 5))),
        (rule_cleanup_dangling_dataflow, Match("cleanup-dangling-dataflow", (15,))),
        (rule_cleanup_dangling_control, Match("cleanup-dangling-control", (18,))),
        (rule_cleanup_unref_const, Match("cleanup-unref-const", (5,))),
    ]
    for applier, bogus in cases:
        with pytest.raises(StaleMatchError):
            applier(g, bogus)
