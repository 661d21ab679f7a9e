"""The group Gamma(s) = <x, y, z | [x, y] = z^(p^s), z central> and its order-3 automorphism.

Run with:  python3 demos/02_gamma_fixed_points.py
"""

from muinv import propgroups as pg

p = 7
for s in (0, 1, 2):
    res = pg.uniformity_check(pg.GammaGroup(p, s, 8), 3)
    print(f"Gamma({s}) uniform: {res.uniform}  slice dimensions {res.slice_dims}  {res.reason}")

# sigma scales x and y by a primitive cube root of unity zeta and z by zeta^2.
sigma = pg.sigma_gamma(p, 1, 8)
print("sigma well defined:", sigma.is_well_defined(), " order:", sigma.order())

Q = pg.quotient_by_level(pg.GammaGroup(p, 1, 8), 2)
print(f"|Gamma(1)/Gamma_3| = {Q.order}")
print("fixed points, exhaustive:", pg.fixed_points(Q, sigma).order)
print("fixed points, slice by slice:", pg.fixed_points(Q, sigma, "algebraic").slice_dims)

Q0 = pg.quotient_by_level(pg.GammaGroup(p, 0, 4), 1)
fr = pg.frobenius_check(Q0, pg.sigma_gamma(p, 0, Q0.G.N), 3)
print(f"Gamma(0)/Gamma_2 (order {Q0.order}) with sigma is a Frobenius group: {fr.ok}")
print("nilpotency class of Gamma(0)/Gamma_3:", pg.nilpotency_class(pg.quotient_by_level(pg.GammaGroup(p, 0, 5), 2)))

# In dimension 3 an order-3 matrix over F_2 or F_5 always fixes a vector.
for q in (2, 5, 7):
    print(f"GL_3(F_{q}) has a fixed-point-free element of order 3:", pg.no_fpf_order3_search(q).fpf_exists)
