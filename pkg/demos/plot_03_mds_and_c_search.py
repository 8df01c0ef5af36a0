"""
Checking the MDS property and choosing c
========================================

With c = 0 the code is just alpha copies of a scalar MDS code, so every
k-subset matrix is invertible.  Each determinant is a nonzero polynomial in c
of degree at most r^(m+1), so in a field of size at least
C(n, k) * r^(m+1) some nonzero c keeps every subset invertible.  We scan
c = 1, 2, ... and stop at the first one that works.
"""
import itertools

from msrcode.construction import (
    assign_coefficients,
    build_subset_matrix,
    search_c,
    verify_mds,
    verify_mds_reduced,
)
from msrcode.params import validate

###############################################################################
# Row coefficients come from a Cauchy matrix scaled so parity 0 is all ones.

p = validate(2, 2, 8)
desc = assign_coefficients(p)
print(desc.scalar_generator())
print("existence bound:", p.field_bound, "field size:", p.field.order)

###############################################################################
# c = 0: every subset matrix is invertible.

gf = p.gf
print(all(gf.is_invertible(build_subset_matrix(desc, D, 0).matrix)
          for D in itertools.combinations(range(p.n), p.k)))

###############################################################################
# Which nonzero c break the code?  Only a handful, far fewer than the bound.

bad = [c for c in range(1, p.field.order) if not verify_mds(desc, c).ok]
print("bad c values:", bad)
print("first failing subsets for c =", bad[0], verify_mds(desc, bad[0]).failing)

###############################################################################
# The search and an independent reduced-system check.

found = search_c(desc)
print(found)
print(verify_mds(desc, found.c).ok, verify_mds_reduced(desc, found.c).ok)

###############################################################################
# Below the bound nothing is promised, but for (9, 6, 8) GF(2^8) happens to
# work too.

q = validate(2, 3, 8)
print(q.field_bound, search_c(assign_coefficients(q)))
