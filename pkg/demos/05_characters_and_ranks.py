"""Character bookkeeping: the mirror relation, Koch-Shafarevich ranks and realizability.

Run with:  python3 demos/05_characters_and_ranks.py
"""

from muinv.characters import CharacterVec, koch_shafarevich, mirror_identity, realizability_check
from muinv.numberfield import CycloField
from muinv.prationality import character_of_ASp
from muinv.suite import dpA_inert_T_cyclotomic
from muinv.census import select_free_T

# Gal(Q(zeta_7)/Q(sqrt -7)) has order 3; its action on A_{S_37} mod 37
print("chi(A_S) for Q(zeta_7)/Q(sqrt -7), p = 37:", character_of_ASp(CycloField(7), [1, 2, 4], 37).mult)

r, m = 2, 3
chi_AS = mirror_identity(r, m, s_inert=1).solve_AS_T(CharacterVec.zero(m))
t = r + 1
chi_AST = chi_AS - t * CharacterVec.trivial(m)
chi_ATS = mirror_identity(r, m, s_inert=1, t_inert=t).solve_AT_S(chi_AST)
print(f"r = {r}: chi(A_S) = {chi_AS.mult}, chi(A_S^T) = {chi_AST.mult}, chi(A_T^S) = {chi_ATS.mult}")
ks = koch_shafarevich(0, m * r, 1, t, chi_ATS.degree, 2 * m * r)
print(f"   generator rank {ks.rank}, free: {ks.free}")

for p in (5, 7, 11):
    ell = select_free_T(p, 200).primes[0]
    ks = koch_shafarevich(0, (p - 1) // 2, 1, 1, dpA_inert_T_cyclotomic(p, ell), p - 1)
    print(f"Q(zeta_{p}), S = {{{p}}}, T = {{{ell}}}: rank {ks.rank}, free: {ks.free}")

for deg, n in ((2, 0), (2, 1), (4, 0)):
    v = realizability_check(3, 3, deg, 7, n)
    print(f"degree 3 characters in chi(F/F_2) for [K_0':Q] = {deg}, n = {n}: {v.embeddable} (room {v.available})")
