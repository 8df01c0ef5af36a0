"""
Symbol indexing and which symbols a helper sends
================================================

Each node stores alpha = r^m symbols.  A symbol is named by an m-tuple over
Z_r, and a systematic node by a pair (s, t).  When node (s, t) fails, every
other node sends the symbols whose s-th digit equals t: beta = r^(m-1) of them,
and the same positions from every helper.
"""
from msrcode.params import (
    NodeId,
    access_set,
    all_indices,
    split_index_sets,
    tuple_to_ordinal,
    validate,
)

###############################################################################
# The (6, 4, 5) code: m = 2, r = 2, four symbols per node.

p = validate(2, 2, 8)
print(p)
for idx in all_indices(p):
    print(idx, "-> ordinal", tuple_to_ordinal(idx, p))

###############################################################################
# Access sets for the four systematic nodes.  Printed 1-based to line up with
# the usual figures: {1,2}, {3,4}, {1,3}, {2,4}.

for u in range(p.k):
    node = NodeId.from_ordinal(u, p)
    print(node, [i + 1 for i in access_set(node, p)])

###############################################################################
# The same sets come out of the recursive splitting view: cut {1..alpha} into
# r blocks, then each block into r pieces, and so on.

print(split_index_sets(p) == [access_set(u, p) for u in range(p.k)])

###############################################################################
# The (9, 6, 8) code, r = 3.  Node N(2,0) reads symbols {1, 4, 7}.

q = validate(2, 3)
for u in range(q.k):
    print(NodeId.from_ordinal(u, q), [i + 1 for i in access_set(u, q)])

###############################################################################
# For every (m, r) the sets for a fixed s partition the node, which is what
# lets repair proceed one slice at a time.

for m, r in [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3)]:
    pr = validate(m, r)
    cover = all(
        sorted(i for t in range(r) for i in access_set((s, t), pr)) == list(range(pr.alpha))
        for s in range(1, m + 1)
    )
    print(f"m={m} r={r} alpha={pr.alpha} beta={pr.beta} partition={cover}")
