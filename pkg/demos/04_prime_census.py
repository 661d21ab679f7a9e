"""Frobenius classes of primes in the real cubic subfield of Q(zeta_7).

Run with:  python3 demos/04_prime_census.py
"""

from muinv.census import census, census_rows, empirical_constant, log_grid, ResidueSubgroup

H = ResidueSubgroup.of(7, [1, 6])
for row in list(census_rows(7, H, 50)):
    print(f"q = {row.q:2d}: {row.classification}")

s = census(7, H, 10**6, cache=False)
print(f"q <= 10^6: {s.split} split, {s.not_split} inert, {s.ramified} ramified; inert density {s.not_split_density:.5f}")

grid = log_grid(1e3, 1e9, 7)
floor, stats = empirical_constant(3, 7, H, grid)
for st in stats:
    print(f"x = {st.x:>10d}: inert q <= x^(1/3) = {st.count:3d}, ratio to x^(1/3)/log x = {st.ratio:.3f}")
print(f"smallest ratio on the grid: {floor:.3f}")
