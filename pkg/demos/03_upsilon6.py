"""The first step past Upsilon_4: solve delta U6 = -1/2 [U4, U4] in GCor_2.

Run with  python3 demos/03_upsilon6.py   (about half a minute)
"""

from fractions import Fraction

from gcx import homology
from gcx.gclib import ComplexId, bracket, differential, upsilon4
from gcx.homology import SliceKey, lift, slice_basis

homology.set_cache(None)
GCOR2 = ComplexId("GCor", 2)

u4 = upsilon4()
sq = bracket(u4, u4, 2)
print("[U4, U4]:", len(sq), "terms, shapes", sorted({(g.vertex_count, len(g.edges)) for g in sq.terms}))

key = SliceKey(GCOR2, 4, 1)
print("solving in", key, "with", len(slice_basis(key)), "basis graphs")
u6 = lift(sq * Fraction(-1, 2), key)
print("U6 found with", len(u6), "terms")
print("delta U6 + 1/2 [U4, U4] = 0:", (differential(u6, GCOR2) + sq * Fraction(1, 2)).is_zero())
