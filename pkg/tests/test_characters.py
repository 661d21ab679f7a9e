import cmath
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from muinv._linalg import rank_mod_p
from muinv.errors import DomainError
from muinv.characters import (
    CharacterVec,
    character_of_action,
    embeds,
    fpf_criterion,
    genus_bound,
    induce,
    inner_product,
    koch_shafarevich,
    mirror_identity,
    mu_lower_bound,
    primitive_root_of_unity,
    realizability_check,
    restrict,
    reversal_lower_bound,
    twist,
)


@st.composite
def characters(draw, m=None, genuine=True):
    m = m or draw(st.sampled_from([1, 2, 3, 4, 6, 8, 12]))
    lo = 0 if genuine else -3
    return CharacterVec(m, tuple(draw(st.lists(st.integers(lo, 4), min_size=m, max_size=m))))


def values(chi):
    """Character values chi(sigma^t) as complex numbers."""
    m = chi.m
    return [sum(a * cmath.exp(2j * cmath.pi * k * t / m) for k, a in enumerate(chi.mult)) for t in range(m)]


def decompose(vals, m):
    return [round((sum(v * cmath.exp(-2j * cmath.pi * k * t / m) for t, v in enumerate(vals)) / m).real) for k in range(m)]


@settings(max_examples=60, deadline=None)
@given(characters(), st.data())
def test_restriction_against_character_values(chi, data):
    sub = data.draw(st.sampled_from([d for d in range(1, chi.m + 1) if chi.m % d == 0]))
    step = chi.m // sub
    vals = values(chi)
    sub_vals = [vals[(step * t) % chi.m] for t in range(sub)]
    assert list(restrict(chi, sub).mult) == decompose(sub_vals, sub)


@settings(max_examples=60, deadline=None)
@given(characters(), st.data())
def test_frobenius_reciprocity(chi, data):
    sub = data.draw(st.sampled_from([d for d in range(1, chi.m + 1) if chi.m % d == 0]))
    psi = data.draw(characters(m=sub))
    assert inner_product(induce(psi, chi.m), chi) == inner_product(psi, restrict(chi, sub))
    assert induce(psi, chi.m).degree == psi.degree * (chi.m // sub)


@settings(max_examples=60, deadline=None)
@given(characters(genuine=False), st.integers(0, 20))
def test_twist_is_an_involution(chi, w):
    assert twist(twist(chi, w), w) == chi
    assert twist(chi, w).degree == chi.degree


def fpf_brute_force(chi):
    # sigma^t fixes a vector iff some eigenvalue eps^(k t) equals 1
    return not any(a and (k * t) % chi.m == 0 for t in range(1, chi.m) for k, a in enumerate(chi.mult))


@settings(max_examples=100, deadline=None)
@given(characters())
def test_fpf_criterion(chi):
    assert fpf_criterion(chi) == fpf_brute_force(chi)


def test_fpf_examples():
    assert fpf_criterion(CharacterVec(3, (0, 2, 1)))
    assert not fpf_criterion(CharacterVec(3, (1, 1, 1)))
    assert not fpf_criterion(CharacterVec(4, (0, 0, 1, 0)))  # sigma^2 acts trivially
    with pytest.raises(DomainError):
        fpf_criterion(CharacterVec(3, (0, -1, 1)))


def random_conjugate(D, p, rng):
    d = len(D)
    while True:
        P = [[rng.randrange(p) for _ in range(d)] for _ in range(d)]
        if rank_mod_p(P, p) == d:
            break
    Pm = np.array(P, dtype=object)
    # inverse via adjugate-free Gauss-Jordan
    aug = [list(r) + [int(i == j) for j in range(d)] for i, r in enumerate(P)]
    for c in range(d):
        piv = next(i for i in range(c, d) if aug[i][c] % p)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = pow(aug[c][c], -1, p)
        aug[c] = [x * inv % p for x in aug[c]]
        for i in range(d):
            if i != c and aug[i][c]:
                t = aug[i][c]
                aug[i] = [(x - t * y) % p for x, y in zip(aug[i], aug[c])]
    Pinv = np.array([r[d:] for r in aug], dtype=object)
    return (Pm.dot(np.array(D, dtype=object)).dot(Pinv) % p).tolist()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(3, 7), (4, 13), (6, 37), (2, 5)]), st.data())
def test_character_of_action_roundtrip(mp, data):
    m, p = mp
    chi = data.draw(characters(m=m))
    eps = primitive_root_of_unity(m, p)
    diag = [pow(eps, k, p) for k, a in enumerate(chi.mult) for _ in range(a)]
    D = [[diag[i] if i == j else 0 for j in range(len(diag))] for i in range(len(diag))]
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    M = random_conjugate(D, p, rng) if diag else []
    assert character_of_action(M, p, m) == chi


def test_character_of_action_rejects_non_diagonalisable():
    with pytest.raises(DomainError):
        character_of_action([[1, 1], [0, 1]], 7, 3)


def test_primitive_root_of_unity():
    for m, p in [(3, 7), (6, 37), (4, 13), (1, 5)]:
        e = primitive_root_of_unity(m, p)
        assert pow(e, m, p) == 1 and all(pow(e, k, p) != 1 for k in range(1, m))
    with pytest.raises(DomainError):
        primitive_root_of_unity(3, 5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4), st.sampled_from([2, 3, 4, 6]), st.integers(0, 6), st.data())
def test_mirror_roundtrip(r, m, w, data):
    kw = dict(s_split=data.draw(st.integers(0, 2)), s_inert=data.draw(st.integers(0, 2)))
    rel = mirror_identity(r, m, w, **kw)
    # start from a character large enough that the solved side is genuine
    chi = data.draw(characters(m=m)) + (r + 4) * CharacterVec.regular(m)
    at_s = rel.solve_AT_S(chi)
    assert rel.solve_AS_T(at_s) == chi
    assert twist(chi, w) - at_s == rel.rhs


def test_mirror_inconsistent_input():
    rel = mirror_identity(2, 3, 1)
    with pytest.raises(DomainError):
        rel.solve_AT_S(CharacterVec.zero(3))


def test_mirror_rhs():
    rel = mirror_identity(1, 3, w=1, s_inert=1)
    # r reg + omega - 1 + 1 = reg + omega
    assert rel.rhs == CharacterVec(3, (1, 2, 1))
    rel = mirror_identity(1, 3, w=1, s_inert=1, t_inert=2)
    assert rel.rhs == CharacterVec(3, (1, 0, 1))


def test_koch_shafarevich_arithmetic():
    ks = koch_shafarevich(0, 3, 1, 1, 0, 6)
    assert ks.rank == 0 + 1 - 1 - 3 + 6 and ks.h2_bound == 0 and ks.free
    ks = koch_shafarevich(0, 2, 4, 1, 2, 4)
    assert ks.rank == 2 + 4 - 1 - 2 + 4 and ks.h2_bound == 5 and not ks.free


@pytest.mark.parametrize("r1,r2,S,T,want", [(0, 3, 1, 1, 0), (0, 3, 1, 10, 6), (2, 1, 0, 2, 0), (0, 1, 0, 5, 4)])
def test_reversal_lower_bound(r1, r2, S, T, want):
    assert reversal_lower_bound(r1, r2, S, T) == want


def test_simple_bounds():
    assert genus_bound(3, 2) == 4
    assert mu_lower_bound(5, 3) == 2 and mu_lower_bound(1, 3) == 0


@pytest.mark.parametrize("m", [1, 2, 3, 6])
@pytest.mark.parametrize("deg", [2, 4, 6])
@pytest.mark.parametrize("p,n", [(3, 0), (3, 1), (5, 1), (7, 2)])
def test_realizability_grid(m, deg, p, n):
    base = (deg // 2) * p**n
    for d in range(0, base + 3):
        v = realizability_check(d, m, deg, p, n)
        # brute force: every degree-d character embeds iff d * chi_k embeds for every k
        brute = all(embeds(d * CharacterVec.basis(m, k), v.ambient) for k in range(m))
        assert v.embeddable == brute
        assert v.available == (base + 1 if m == 1 else base)


def test_realizability_rejects_odd_degree():
    with pytest.raises(DomainError):
        realizability_check(1, 3, 3, 7, 1)


def test_character_vector_validation():
    with pytest.raises(DomainError):
        CharacterVec(3, (1, 2))
    with pytest.raises(DomainError):
        CharacterVec(3, (1, 2, 3)) + CharacterVec(2, (1, 1))
    with pytest.raises(DomainError):
        restrict(CharacterVec.regular(6), 4)
    with pytest.raises(DomainError):
        induce(CharacterVec.regular(4), 6)
