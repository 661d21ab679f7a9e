import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from muinv import census as cz
from muinv.census import (
    INERT,
    PARTIAL,
    RAMIFIED,
    SPLIT,
    ResidueSubgroup,
    admissible_S,
    census,
    census_rows,
    classify,
    empirical_constant,
    integer_root,
    log_grid,
    parse_subgroup,
    pi_split_statistic,
    primes_up_to,
    qualifies_free_T,
    rows_to_csv,
    select_free_T,
)
from muinv.errors import DomainError, ResourceError

x = sympy.symbols("x")

# (conductor, subgroup, defining polynomial of the fixed field)
FIELDS = [
    (7, [1, 6], x**3 + x**2 - 2 * x - 1),  # real cubic subfield of Q(zeta_7)
    (13, [1, 3, 4, 9, 10, 12], x**2 - x - 3),  # Q(sqrt 13)
    (4, [1], x**2 + 1),  # Q(i)
    (9, [1, 8], x**3 - 3 * x + 1),  # real cubic subfield of Q(zeta_9)
    (5, [1], x**4 + x**3 + x**2 + x + 1),  # Q(zeta_5)
]


def factor_shape(poly, q):
    P = sympy.Poly(poly, x, modulus=q)
    return sorted((f.degree(), e) for f, e in P.factor_list()[1])


@pytest.mark.parametrize("f,H,poly", FIELDS)
def test_classification_against_factorisation(f, H, poly):
    n = sympy.degree(poly, x)
    disc = int(sympy.discriminant(poly, x))
    for q in sympy.primerange(2, 400):
        row = classify(q, f, H)
        if f % q == 0:
            assert row.classification == RAMIFIED
            continue
        if disc % q == 0:
            continue  # index divisors: the polynomial need not reflect the splitting
        shape = factor_shape(poly, q)
        if row.classification == SPLIT:
            assert shape == [(1, 1)] * n
        elif row.classification == INERT:
            assert shape == [(n, 1)]
        else:
            assert row.classification == PARTIAL
            assert len(shape) not in (1, n)


def test_classify_examples():
    assert classify(29, 7, [1, 6]).classification == SPLIT
    assert classify(2, 7, [1, 6]).classification == INERT
    assert classify(7, 7, [1, 6]).classification == RAMIFIED
    assert classify(11, 5, [1]).classification == SPLIT
    assert classify(19, 5, [1]).classification == PARTIAL
    assert classify(2, 5, [1]).classification == INERT
    assert classify(3, 7, [1, 6]).frobenius == 3
    with pytest.raises(DomainError):
        classify(15, 7, [1, 6])


def test_subgroup_validation():
    assert ResidueSubgroup.of(13, [3, 9]).elements == frozenset({1, 3, 9})
    assert ResidueSubgroup.of(7, [6]).index == 3
    with pytest.raises(DomainError):
        ResidueSubgroup.of(7, [2, 3])
    with pytest.raises(DomainError):
        ResidueSubgroup.of(12, [2])
    with pytest.raises(DomainError):
        ResidueSubgroup.of(1, [])
    assert parse_subgroup(7, "1,6") == ResidueSubgroup.of(7, [6])
    assert parse_subgroup(7, None) == ResidueSubgroup.of(7, [1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 20000))
def test_sieve_against_sympy(n):
    assert primes_up_to(n).tolist() == list(sympy.primerange(0, n + 1))


def test_sieve_across_segments(monkeypatch):
    monkeypatch.setattr(cz, "SEGMENT", 1000)
    assert primes_up_to(25000).tolist() == list(sympy.primerange(0, 25001))
    with pytest.raises(ResourceError):
        primes_up_to(cz.SIEVE_CAP + 1)


@pytest.mark.parametrize(
    "f,H,not_split",
    [(7, [1, 6], 2 / 3), (13, [1, 3, 4, 9, 10, 12], 1 / 2), (4, [1], 1 / 2)],
)
def test_densities(f, H, not_split, monkeypatch):
    monkeypatch.delenv(cz.CACHE_ENV, raising=False)
    s = census(f, H, 10**6)
    assert s.primes == 78498
    assert abs(s.not_split_density - not_split) < 0.02
    assert abs(s.split_density - s.expected_split_density) < 0.02
    assert s.split + s.not_split + s.ramified == s.primes


def test_census_counts_match_rows():
    rows = list(census_rows(7, ResidueSubgroup.of(7, [6]), 2000))
    last = rows[-1]
    s = census(7, [1, 6], 2000, cache=False)
    assert last.split == s.split and last.ramified == s.ramified
    assert last.inert + last.partial == s.not_split


def test_parallel_census_matches_serial(monkeypatch):
    monkeypatch.setattr(cz, "SEGMENT", 50_000)
    a = census(13, [1, 3, 9], 300_000, workers=2, cache=False)
    b = census(13, [1, 3, 9], 300_000, workers=1, cache=False)
    assert a == b


def test_csv():
    text = rows_to_csv(census_rows(7, ResidueSubgroup.of(7, [6]), 30))
    lines = text.strip().split("\n")
    assert lines[0] == "q,frobenius,classification,split,inert,ramified,partial"
    assert lines[1] == "2,2,inert,0,1,0,0"
    assert len(lines) == 1 + 10


def test_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv(cz.CACHE_ENV, str(tmp_path))
    first = census(7, [1, 6], 10**5)
    assert len(list(tmp_path.glob("*.json"))) == 1
    calls = []
    monkeypatch.setattr(cz, "_count_segment", lambda args: calls.append(args))
    assert census(7, [1, 6], 10**5) == first
    assert calls == []


def test_integer_root():
    for n in [10**9, 10**12 + 7, 2**64, 999]:
        for k in (2, 3, 5):
            r = integer_root(n, k)
            assert r**k <= n < (r + 1) ** k


def test_pi_split_statistic():
    s = pi_split_statistic(10**9, 3, 7, [1, 6])
    assert s.bound == 1000
    assert s.primes == 168
    assert s.count == 112
    assert math.isclose(s.reference, 1000 / math.log(10**9))
    assert abs(s.ratio - 112 / s.reference) < 1e-12
    with pytest.raises(DomainError):
        pi_split_statistic(10**6, 2, 7, [1, 6])
    with pytest.raises(DomainError):
        pi_split_statistic(50, 3, 7, [1, 6])


def test_pi_split_is_monotone():
    grid = log_grid(1e4, 1e9, 12)
    _, stats = empirical_constant(3, 7, [1, 6], grid)
    counts = [s.count for s in stats]
    assert counts == sorted(counts)
    assert grid == sorted(set(grid))


def test_admissible_S():
    assert admissible_S(5, 4, 200) == [11, 31, 41, 61]
    assert admissible_S(7, 2, 100) == [29, 43]
    with pytest.raises(ResourceError):
        admissible_S(7, 5, 100)
    with pytest.raises(DomainError):
        admissible_S(4, 1, 100)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_select_free_T(p):
    sel = select_free_T(p, 300)
    for ell in sel.primes:
        assert sympy.n_order(ell, p) == p - 1
        assert pow(ell, p - 1, p * p) != 1
    rejected = sum(sel.rejected.values())
    assert rejected + len(sel.primes) == len(list(sympy.primerange(2, 301)))


def test_select_free_T_known_values():
    assert select_free_T(5, 20).primes == [2, 3, 13, 17]
    assert select_free_T(7, 20).primes[:3] == [3, 5, 17]
    # 7 is inert mod 5 but 7^4 = 2401 = 1 mod 25
    assert qualifies_free_T(7, 5) == (True, False)
    assert qualifies_free_T(11, 5) == (False, True)
    with pytest.raises(DomainError):
        select_free_T(37, 100)
