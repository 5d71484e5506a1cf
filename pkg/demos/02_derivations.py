"""From graphs to derivations of the Lie bialgebra properad.

Run with  python3 demos/02_derivations.py
"""

from gcx import propcalc as pc
from gcx.gclib import ComplexId, differential, phi_hbar, single_edge, theta

c, d = 1, 1
GCOR3 = ComplexId("GCor", 3)

# %% The single edge acts as the differential of Holieb.
fe = pc.map_F(single_edge(3), c, d, 4)
x = pc.LegGraphSum.of(pc.corolla(2, 2), c, d)
print("delta_H of the (2,2) corolla:")
print(pc.format_legsum(pc.delta_holieb(x)), end="")
print("value of F(e) on the (2,2) corolla agrees:", fe.restrict(lambda p, m, n: (m, n) == (2, 2)) == pc.delta_holieb(x))

# %% theta_2 becomes a derivation; its value on the (1,1) operation is one graph.
ft = pc.map_F(theta(2, 3), c, d, 4)
print("F(theta_2) on arity (1,1):")
print(pc.format_legsum(ft.restrict(lambda p, m, n: (m, n) == (1, 1))), end="")

# %% F is a chain map: F(delta theta_2) = 0 and F(theta_2) is closed.
print("der_delta F(theta_2) = 0:", pc.der_delta(pc.map_F(theta(2, 3), c, d, 5), max_legs=5).is_zero())
print("F(delta theta_2) = 0:", pc.map_F(differential(theta(2, 3), GCOR3), c, d, 5).is_zero())

# %% phi_hbar gives the differential of the involutive version.
f = pc.map_F_diamond(phi_hbar(3, 3), c, d, 4, 3)
y = pc.LegGraphSum.of(pc.corolla(1, 1, 1), c, d, power=1)
print("F_diamond(phi_hbar) on C(1,1,1) equals delta_diamond:",
      f.restrict(lambda p, m, n: (m, n, p) == (1, 1, 1)) == pc.delta_diamond(y))

# %% The rescaling classes.
d1 = pc.make_special_der("D1", c, d, 6)
print("der_delta(D1) = 0 up to m+n <= 6:", pc.der_delta(d1, max_legs=6).is_zero())
t = pc.make_special_der("T", c, d, 8, 3)
res = pc.der_delta(t, "diamond", max_legs=5, hbar_order=3).restrict(lambda p, m, n: m + n + p <= 5)
print("der_delta(T) = 0 up to m+n+a <= 5:", res.is_zero())

# %% The weighted exponent that is conserved by delta_diamond is m+n+2a-2.
print("terms breaking m+n+a-2:", len(pc.exponent_violations(True, 5, 3)))
print("terms breaking m+n+2a-2:", len(pc.exponent_violations(True, 5, 3, exponent=lambda m, n, a: m + n + 2 * a - 2)))
