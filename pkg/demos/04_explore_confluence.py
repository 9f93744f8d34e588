"""Exhaust every rewrite order and check that they all agree.

The deterministic driver picks one rule application per step, but the
rules themselves allow many orders.  `explore` builds the full
transition system: every reachable graph (up to isomorphism) and every
rule application between them.  If all orders funnel into a single
final state, the rewrite relation is confluent on this input, and the
driver's particular choices did not matter.
"""

from __future__ import annotations

from collections import Counter

from firmfold import CATALOG, build_min_plus_one, explore


def main() -> None:
    g = build_min_plus_one(3, 5, "lt")
    lts = explore(g, CATALOG)

    print(f"states reached: {len(lts.states)}")
    print(f"transitions:    {len(lts.transitions)}")
    print(f"final states:   {len(lts.final)}")
    print(f"confluent here: {lts.final_states_isomorphic()}")
    print()

    by_rule = Counter(rule for _, rule, _ in lts.transitions)
    print("transitions per rule:")
    for rule, count in sorted(by_rule.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"    {rule:26} {count}")
    print()

    (final_digest,) = lts.final
    final = lts.states[final_digest]
    print(f"the one final state has {final.element_count()} elements")
    sizes = sorted({s.element_count() for s in lts.states.values()}, reverse=True)
    print(f"element counts seen along the way: {sizes}")


if __name__ == "__main__":
    main()
