"""Tour of the relation and pair-distance checkers.

Run with:  python3 demos/01_relations_and_pair_distances.py

Every "for all pairs" claim below is decided on an explicit finite sample;
failing checks come back with concrete witness pairs instead of a bare False.
"""

from relfix import (
    check_complete_on,
    check_t_closed,
    check_triangle,
    check_w3,
    check_weak_t_closed,
    find_start_points,
    is_preserving,
    sample_space,
    scalar,
)
from relfix.fixtures import ordered_halving_fixture, parity_successor_fixture

print("=" * 72)
print("1. A relation that survives the map only after swapping the order")
print("=" * 72)

parity = parity_successor_fixture()
sample = sample_space(parity.space, step=1.0)
closed = check_t_closed(parity.relation, parity.map, sample)
print(f"map-closed on {{1..20}}?     {closed.verdict.value}")
x, y = closed.witnesses[0]
print(f"first witness pair:        ({x.value:g}, {y.value:g}) maps to "
      f"({x.value + 1:g}, {y.value + 1:g}), which is unrelated")
weak = check_weak_t_closed(parity.relation, parity.map, sample)
print(f"weakly map-closed?         {weak.verdict.value}")
complete = check_complete_on(parity.relation, sample[:4])
print(f"complete on {{1..4}}?        {complete.verdict.value}, "
      f"witness {tuple(p.value for p in complete.witnesses[0])}")

print()
print("=" * 72)
print("2. A descending order with a capped halving map on [1, 3)")
print("=" * 72)

halving = ordered_halving_fixture()
sample = sample_space(halving.space, step=0.1)
print(f"sample:                    lattice of {len(sample)} points, step 0.1")
print(f"map-closed?                {check_t_closed(halving.relation, halving.map, sample).verdict.value}")
print(f"complete (total order)?    {check_complete_on(halving.relation, sample).verdict.value}")
starts = find_start_points(halving.relation, halving.map, sample)
print(f"admissible start points:   {len(starts)} of {len(sample)}")
print(f"sequence (3, 2, 1.5, 1) preserving? "
      f"{is_preserving(halving.relation, [scalar(v) for v in (3, 2, 1.5, 1)])}")
print(f"sequence (1, 2) preserving?         "
      f"{is_preserving(halving.relation, [scalar(v) for v in (1, 2)])}")

print()
print("=" * 72)
print("3. Pair-distance axioms for p(x, y) = |x| + |y| on the same sample")
print("=" * 72)

triangle = check_triangle(halving.wdistance, sample)
print(f"triangle inequality:       {triangle.verdict.value} "
      f"({triangle.detail['triples']} triples)")
separation = check_w3(halving.wdistance, halving.space, sample, eps_grid=(0.5, 0.1))
for row in separation.table:
    print(f"separation at eps = {row.eps}: largest working delta = {row.delta}")
print("(p never drops below 1 on this interval, so small deltas hold vacuously)")
