"""A tour of the oriented graph complexes GCor_2 and GCor_3.

Run with  python3 demos/01_oriented_graph_complex.py
"""

from gcx import homology
from gcx.gclib import ComplexId, differential, format_sum, hbar_differential, loop_class, mc_residual, phi_hbar, theta, upsilon4
from gcx.homology import SliceKey, betti

homology.set_cache(None)
GCOR2, GCOR3 = ComplexId("GCor", 2), ComplexId("GCor", 3)

# %% Two vertices joined by two parallel edges.
# For even d the edges carry the orientation and swapping them is an odd
# automorphism, so the graph is zero.  For odd d it survives.
print("theta_2 in GCor_2:", format_sum(theta(2, 2)) or "0")
print("theta_2 in GCor_3:", format_sum(theta(2, 3)))

# %% It is a cocycle, and it spans H^{-1} at loop order 1.
print("delta theta_2 =", format_sum(differential(theta(2, 3), GCOR3)) or "0")
for g in (1, 2, 3):
    print(f"  betti(GCor_3, g={g}, k=-1) =", betti(SliceKey(GCOR3, g, -1)))

# %% The series phi_hbar = sum hbar^(k-1) theta_k is Maurer-Cartan.
phi = phi_hbar(4, 3)
print("[phi, phi] through hbar^4 vanishes:", mc_residual(phi, 3).is_zero())
print("loop class closed under [phi, .]:", hbar_differential(loop_class(4, 3), 4, 3).is_zero())

# %% In GCor_2 the first class sits at genus 2, degree 1.
u4 = upsilon4()
print("Upsilon_4 =")
print(format_sum(u4), end="")
print("delta Upsilon_4 =", format_sum(differential(u4, GCOR2)) or "0")
for k in (0, 1, 2):
    row = [betti(SliceKey(GCOR2, g, k)) for g in (1, 2, 3)]
    print(f"  degree {k}: betti for g = 1, 2, 3 ->", row)
