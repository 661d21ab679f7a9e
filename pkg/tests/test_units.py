from itertools import product

import pytest

from muinv.errors import UnsupportedError
from muinv.numberfield import CycloField, QuadField
from muinv.units import OneUnitFiltration, TruncRing, residue_ring_units_p_part


def sylow_brute_force(K, p, a):
    """The p-Sylow subgroup of (O_K/p^a)^x as a set, by enumeration."""
    ring = TruncRing(K.ring_poly, p**a)
    units = []
    for x in product(range(p**a), repeat=ring.n):
        # x is a unit iff it is invertible mod p, i.e. its norm form is prime to p
        if pow_is_unit(ring, x, p):
            units.append(x)
    order = len(units)
    m = order
    while m % p == 0:
        m //= p
    return ring, {ring.pow(x, m) for x in units}


def pow_is_unit(ring, x, p):
    # x is a unit iff x^(|(O/p)^x|) reduces to 1 mod p; test by brute search for an inverse mod p
    r1 = TruncRing(ring.modpoly, p)
    xr = tuple(c % p for c in x)
    return any(r1.mul(xr, y) == r1.one() for y in product(range(p), repeat=ring.n))


def killed_counts(orders, p, jmax):
    out = []
    for j in range(jmax + 1):
        c = 1
        for o in orders:
            c *= min(o, p**j)
        out.append(c)
    return out


@pytest.mark.parametrize("d,p,a", [(-1, 3, 2), (-1, 3, 3), (2, 3, 3), (-5, 3, 2), (-2, 5, 2), (3, 5, 2), (-7, 3, 3)])
def test_sylow_structure_against_enumeration(d, p, a):
    K = QuadField(d)
    ring, S = sylow_brute_force(K, p, a)
    st = residue_ring_units_p_part(K, p, a)
    assert st.order == len(S)
    counts = [sum(1 for x in S if ring.pow(x, p**j) == ring.one()) for j in range(a + 1)]
    assert killed_counts(st.orders, p, a) == counts
    for g, o in zip(st.generators, st.orders):
        assert ring.pow(g, o) == ring.one()
        assert ring.pow(g, o // p) != ring.one()


def quotient_rank_brute_force(K, p, a, unit_coeffs):
    ring, S = sylow_brute_force(K, p, a)
    F = OneUnitFiltration(K, p, a)
    q = F.q
    imgs = [ring.pow(ring.reduce(u), q - 1) for u in unit_coeffs]
    # closure of S^p together with the unit images
    H = {ring.pow(x, p) for x in S}
    frontier = list(H)
    gens = imgs
    while frontier:
        new = []
        for h in frontier:
            for g in gens:
                y = ring.mul(h, g)
                if y not in H:
                    H.add(y)
                    new.append(y)
        frontier = new
    size, r = len(S) // len(H), 0
    while size > 1:
        size //= p
        r += 1
    return r


@pytest.mark.parametrize("d,p,a", [(2, 3, 3), (3, 5, 2), (6, 5, 2), (7, 3, 3), (-1, 3, 3)])
def test_quotient_rank_against_enumeration(d, p, a):
    K = QuadField(d)
    units = K.global_units()
    F = OneUnitFiltration(K, p, a)
    assert F.quotient_p_rank(units) == quotient_rank_brute_force(K, p, a, units)


@pytest.mark.parametrize("f,p,a", [(7, 37, 3), (5, 11, 3), (7, 29, 2), (8, 17, 3)])
def test_unramified_order(f, p, a):
    K = CycloField(f)
    st = residue_ring_units_p_part(K, p, a)
    assert st.order == p ** (K.degree * (a - 1))
    assert st.p_rank == K.degree


@pytest.mark.parametrize("f,p,a", [(5, 5, 4), (7, 7, 5), (9, 3, 7), (25, 5, 9)])
def test_totally_ramified_order(f, p, a):
    F = OneUnitFiltration(CycloField(f), p, a)
    assert F.structure().order == p ** (a - 1)


@pytest.mark.parametrize("f,p,a", [(5, 5, 4), (7, 7, 5), (9, 3, 7), (7, 37, 3)])
def test_decompose_recovers_the_element(f, p, a):
    K = CycloField(f)
    F = OneUnitFiltration(K, p, a)
    for u in K.global_units():
        x = F.project(u)
        vec = F.decompose(x)
        y = F.ring.one()
        for g, e in zip(F.generators, vec):
            y = F.ring.mul(y, F.ring.pow(g, e % (p ** (a + 2))))
        assert F.valuation_minus_one(F.ring.mul(y, F.ring.pow(x, p ** (2 * a) - 1))) >= a


def test_q_zeta7_at_37():
    K = CycloField(7)
    F = OneUnitFiltration(K, 37, 3)
    assert F.q == 37**3
    assert F.quotient_p_rank(K.global_units()) == K.r2 + 1


def test_unsupported_models():
    with pytest.raises(UnsupportedError):
        OneUnitFiltration(CycloField(15), 3, 3)
    with pytest.raises(UnsupportedError):
        residue_ring_units_p_part(QuadField(-3), 3, 2)
