"""Run the well-formedness checks, then see them catch real damage.

Six checks cover the shape a program graph has to have: unique start
and end blocks, every operation in a block, Phi inputs aligned with
block entries, contiguous input positions with correct arities, and
constants kept in the start block.
"""

from __future__ import annotations

from firmfold import BlockKind, Const, build_min_plus_one, verify


def report(title: str, g) -> None:
    findings = verify(g)
    print(f"{title}: {len(findings)} finding(s)")
    for violation in findings:
        print(f"    {violation.render()}")
    print()


def main() -> None:
    report("pristine example", build_min_plus_one(3, 5, "lt"))

    g = build_min_plus_one(3, 5, "lt")
    g.add_block(BlockKind.START_BLOCK)
    report("after adding a second start block", g)

    g = build_min_plus_one(3, 5, "lt")
    g.delete_node(23)  # the Phi's position-1 input edge
    report("after severing one Phi input", g)

    g = build_min_plus_one(3, 5, "lt")
    g.add_op(Const(9), 3)  # a constant parked in the merge block
    g.delete_node(25)  # the Add's second operand edge
    report("after two independent kinds of damage", g)


if __name__ == "__main__":
    main()
