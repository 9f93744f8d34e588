"""Watch constant folding run to its fixpoint, one rule at a time.

The driver always applies the highest-priority rule that matches (the
smallest match if there are several), so the trace below is the same
on every run.  Each application strictly shrinks the graph, which is
why the loop must terminate.  At the end the whole branch-and-merge
diamond has collapsed into `return 4`, and the reference interpreter
agrees with the value the rewrites computed.
"""

from __future__ import annotations

from firmfold import CATALOG, build_min_plus_one, evaluate, fold, replay


def main() -> None:
    g = build_min_plus_one(3, 5, "lt")
    print(f"start: {g.element_count()} elements, interpreter says {evaluate(g)}")
    print()

    result = fold(g, CATALOG)
    current = g
    for index, match in enumerate(result.trace, 1):
        current = replay(current, CATALOG, (match,))
        anchors = ", ".join(f"n{a}" for a in match.anchors)
        print(f"step {index:2}: {match.rule_name:26} @ [{anchors}]"
              f"  -> {current.element_count()} elements")
    print()

    final = result.graph
    (const,) = [n for n, k in final.op_nodes.items() if k.name == "Const"]
    print(f"fixpoint after {result.steps} steps: {final.element_count()} elements")
    print(f"the program is now: return {final.op_nodes[const].value}")
    print(f"interpreter on the folded graph: {evaluate(final)}")


if __name__ == "__main__":
    main()
