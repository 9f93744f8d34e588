"""Build the example program through the graph API and look around.

The program is a small diamond: compare two constants, branch, merge
the winner through a Phi, add one, return.  Every dataflow and control
edge is itself a node carrying a position, so the structure printed
here is exactly what the rewrite rules pattern-match on.
"""

from __future__ import annotations

from firmfold import EdgeKind, build_min_plus_one, export_dot


def main() -> None:
    g = build_min_plus_one(3, 5, "lt")
    print(f"element count: {g.element_count()} "
          f"({len(g.op_nodes)} ops + {len(g.block_nodes)} blocks + "
          f"{len(g.edge_nodes)} edge nodes)")
    print()

    for block in sorted(g.block_nodes):
        kind = g.block_nodes[block]
        entries = [
            f"n{src}@{g.edge_nodes[eid].position}"
            for eid, src in g.control_preds(block)
        ]
        print(f"n{block} {kind.value}  entries: {entries or '-'}")
        for op in g.members(block):
            op_kind = g.op_nodes[op]
            detail = ""
            if op_kind.value is not None:
                detail = f" {op_kind.value}"
            if op_kind.relation is not None:
                detail = f" {op_kind.relation}"
            inputs = [
                f"n{src}@{g.edge_nodes[eid].position}"
                for eid, src in g.data_inputs(op)
            ]
            print(f"    n{op} {op_kind.name}{detail}  inputs: {inputs or '-'}")
    print()

    flows = sum(1 for e in g.edge_nodes.values() if e.kind is EdgeKind.DATAFLOW)
    print(f"dataflow edge nodes: {flows}, control edge nodes: {len(g.edge_nodes) - flows}")
    print()
    print("Graphviz rendering (pipe into `dot -Tpng`):")
    print(export_dot(g))


if __name__ == "__main__":
    main()
