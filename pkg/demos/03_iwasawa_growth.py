"""Coinvariant growth of cyclic Lambda-modules and the fitted (r, mu, lambda).

Run with:  python3 demos/03_iwasawa_growth.py
"""

from muinv.iwasawa import LambdaSeries, ModulePresentation, coinvariant_growth, fit_invariants, parse_polynomial, weierstrass_prepare

p = 3
for text in ("p", "T^2+p", "p^2*(T^3+p*T+p)"):
    X = ModulePresentation.parse(text, p)
    table = coinvariant_growth(X, range(0, 6))
    fit = fit_invariants(table)
    dims = [row.dim for row in table.rows]
    sizes = [row.logsize for row in table.rows]
    print(f"Lambda/({text}): dims {dims}, log sizes {sizes}")
    print(f"   r = {fit.r}, mu = {fit.mu}, lambda = {fit.lam}, nu = {fit.nu}")

f = LambdaSeries.from_poly(p, parse_polynomial("p^2*(T^3+p*T+p)*(1+T+T^2)", p), N=20, M=40)
w = weierstrass_prepare(f)
print(f"Weierstrass: mu = {w.mu}, lambda = {w.lam}, P = {w.P} (exact mod p^{w.P_precision})")
