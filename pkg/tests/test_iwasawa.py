import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from muinv.errors import DomainError, ResourceError
from muinv.iwasawa import (
    GrowthRow,
    GrowthTable,
    LambdaSeries,
    ModulePresentation,
    PrecisionError,
    classical_size_exponent,
    coinvariant_dim,
    coinvariant_growth,
    coinvariant_logsize,
    fit_invariants,
    invariants_of,
    omega,
    parse_polynomial,
    weierstrass_prepare,
)

P3 = 3
coeff_lists = st.lists(st.integers(-(10**6), 10**6), min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists, coeff_lists)
def test_lambda_ring_laws(a, b, c):
    A, B, C = (LambdaSeries.from_poly(5, x, N=6, M=10) for x in (a, b, c))
    assert A * B == B * A
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A - A == LambdaSeries.from_poly(5, [0], N=6, M=10)


@settings(max_examples=60, deadline=None)
@given(coeff_lists)
def test_lambda_inverse(a):
    A = LambdaSeries.from_poly(5, a, N=6, M=10)
    if not A.is_unit():
        with pytest.raises(DomainError):
            A.inverse()
    else:
        assert A * A.inverse() == LambdaSeries.one(5, 6, 10)


def test_mixed_precision_meets():
    a = LambdaSeries.from_poly(3, [1, 2], N=5, M=8)
    b = LambdaSeries.from_poly(3, [1], N=3, M=4)
    assert (a * b).N == 3 and (a * b).M == 4


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def poly_divmod_monic(f, P, mod):
    f = [x % mod for x in f]
    d = len(P) - 1
    q = [0] * max(len(f) - d, 1)
    for i in range(len(f) - 1, d - 1, -1):
        c = f[i] % mod
        q[i - d] = c
        for j in range(d + 1):
            f[i - d + j] = (f[i - d + j] - c * P[j]) % mod
    return q, f[:d]


@st.composite
def factored_series(draw):
    p = draw(st.sampled_from([3, 5, 7]))
    mu = draw(st.integers(0, 2))
    lam = draw(st.integers(0, 4))
    P = [p * draw(st.integers(-20, 20)) for _ in range(lam)] + [1]
    U = [draw(st.integers(1, p - 1))] + draw(st.lists(st.integers(-20, 20), max_size=4))
    return p, mu, lam, P, U


@settings(max_examples=100, deadline=None)
@given(factored_series())
def test_weierstrass_recovers_the_factorisation(data):
    p, mu, lam, P, U = data
    f = [p**mu * c for c in poly_mul(P, U)]
    w = weierstrass_prepare(LambdaSeries.from_poly(p, f, N=16, M=40))
    assert (w.mu, w.lam) == (mu, lam)
    assert w.U.is_unit()
    assert w.reconstruct() == LambdaSeries.from_poly(p, f, *w.precision)
    assert all(c % p == 0 for c in w.P[:-1]) and w.P[-1] == 1
    mod = p**w.P_precision
    assert [c % mod for c in w.P] == [c % mod for c in P]


@settings(max_examples=60, deadline=None)
@given(factored_series())
def test_distinguished_factor_divides_the_polynomial(data):
    # polynomial division by the computed P leaves no remainder, independently of any series
    p, mu, lam, P, U = data
    f = [p**mu * c for c in poly_mul(P, U)]
    w = weierstrass_prepare(LambdaSeries.from_poly(p, f, N=16, M=40))
    mod = p ** (mu + w.P_precision)
    q, r = poly_divmod_monic(f, list(w.P), mod)
    assert not any(r)
    assert (q[0] // p**mu) % p != 0


def test_weierstrass_zero_series():
    with pytest.raises(PrecisionError):
        weierstrass_prepare(LambdaSeries.from_poly(3, [0], N=4, M=8))
    with pytest.raises(PrecisionError):
        weierstrass_prepare(LambdaSeries.from_poly(3, [81, 162], N=4, M=8))


@pytest.mark.parametrize("lam,M", [(1, 6), (2, 9), (2, 10), (3, 12), (3, 14)])
def test_weierstrass_precision_is_sharp(lam, M):
    # the unseen tail beyond T^M perturbs P exactly from digit floor(M / lam) on
    rng = random.Random(lam * 100 + M)
    p = 3
    margins = []
    for _ in range(150):
        P = [p * rng.choice([1, 2, 4, 5]) for _ in range(lam)] + [1]
        U = [1] + [rng.randint(-9, 9) for _ in range(3 * M)]
        w = weierstrass_prepare(LambdaSeries.from_poly(p, poly_mul(P, U), N=12, M=M))
        agree = min(next((k for k in range(30) if (a - b) % p ** (k + 1)), 30) for a, b in zip(w.P, P))
        margins.append(agree - w.P_precision)
    assert w.P_precision == M // lam
    assert min(margins) == 0


@pytest.mark.parametrize(
    "text,p,coeffs",
    [
        ("T^2 + p", 3, [3, 0, 1]),
        ("p*T + T**2", 5, [0, 5, 1]),
        ("(T+1)^3 - 1", 7, [0, 3, 3, 1]),
        ("-T", 3, [0, -1]),
        ("2*(T - p)", 3, [-6, 2]),
        ("0", 3, []),
    ],
)
def test_parse_polynomial(text, p, coeffs):
    assert [c for c in parse_polynomial(text, p)] == coeffs or (coeffs == [] and not any(parse_polynomial(text, p)))


@pytest.mark.parametrize("text", ["x + 1", "T/2", "T^T", "T^-1", "1.5*T", "f(T)", "T +", "import os"])
def test_parse_polynomial_rejects(text):
    with pytest.raises(DomainError):
        parse_polynomial(text, 3)


def test_module_parse_lists():
    for text in ("p, T", "(p, T)"):
        X = ModulePresentation.parse(text, 3)
        assert X.r == 1 and len(X.relations) == 2
    assert ModulePresentation.parse("T^2+p", 3).is_torsion()
    assert not ModulePresentation.parse("0", 3).is_torsion()
    assert not ModulePresentation(3, 2, [([1], [0])]).is_torsion()
    with pytest.raises(DomainError):
        ModulePresentation(3, 2, [([1],)])


def test_omega():
    x = sympy.symbols("x")
    want = sympy.Poly((1 + x) ** 9 - 1, x).all_coeffs()[::-1]
    assert omega(3, 2) == want


def ord_T_mod_p(f, p):
    return next((i for i, c in enumerate(f) if c % p), None)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5]), st.lists(st.integers(-30, 30), min_size=1, max_size=6), st.integers(0, 2))
def test_dim_of_cyclic_module(p, f, n):
    X = ModulePresentation.cyclic(p, f)
    k = ord_T_mod_p(f, p)
    want = p**n if k is None else min(p**n, k)
    assert coinvariant_dim(X, n) == want


def snf_logsize(X, n):
    """log_p |Lambda^r / (relations, omega_n, p^n)| via sympy's Smith normal form over Z."""
    p, k = X.p, X.p**n
    om = omega(p, n)
    rows = []
    for rel in X.relations:
        for s in range(k):
            row = []
            for comp in rel:
                shifted = [0] * s + list(comp)
                _, r = poly_divmod_monic(shifted, om, p**n)
                row += r + [0] * (k - len(r))
            rows.append(row)
    if not rows:
        return X.r * k * n
    D = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    diag = [D[i, i] for i in range(min(D.shape))]
    total = 0
    for d in diag:
        d = int(d)
        v = n if d == 0 else min(n, sympy.multiplicity(p, d))
        total += v
    total += (X.r * k - len(diag)) * n
    return total


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from([(3, 1), (3, 2), (5, 1)]),
    st.integers(1, 2),
    st.lists(st.lists(st.integers(-12, 12), min_size=1, max_size=3), min_size=1, max_size=3),
)
def test_logsize_against_smith_form(pn, r, raw):
    p, n = pn
    rels = [tuple(raw[(i + j) % len(raw)] for j in range(r)) for i in range(len(raw))]
    X = ModulePresentation(p, r, rels)
    assert coinvariant_logsize(X, n) == snf_logsize(X, n)


@pytest.mark.parametrize(
    "text,p,expected",
    [
        ("p", 3, (1, 1, 0, 0)),
        ("T^2+p", 3, (0, 0, 2, 0)),
        ("T", 3, (0, 0, 1, 0)),
        ("p^2*(T^3+p*T+p)", 3, (1, 2, 3, -6)),
        ("p*(T+p)*(1+T)", 3, (1, 1, 1, -1)),
    ],
)
def test_invariant_examples(text, p, expected):
    fit = invariants_of(ModulePresentation.parse(text, p), range(0, 6))
    assert (fit.r, fit.mu, fit.lam, fit.nu) == expected
    assert fit.r_exact and fit.mu_exact


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2), st.lists(st.integers(-3, 3), min_size=0, max_size=2), st.integers(1, 2))
def test_fit_matches_weierstrass_and_invariant_relations(mu, tail, u0):
    p = 3
    P = [p * c for c in tail] + [1]
    f = [p**mu * c for c in poly_mul(P, [u0, 1])]
    fit = invariants_of(ModulePresentation.cyclic(p, f), range(0, 6))
    w = weierstrass_prepare(LambdaSeries.from_poly(p, f))
    assert (fit.mu, fit.lam) == (w.mu, w.lam)
    assert fit.mu >= fit.r
    assert (fit.r == 0) == (fit.mu == 0)
    for row in coinvariant_growth(ModulePresentation.cyclic(p, f), range(fit.tail_start, 6)).rows:
        assert classical_size_exponent(fit.mu, fit.lam, fit.nu, p, row.n) == row.logsize


def test_non_torsion_is_unbounded():
    fit = invariants_of(ModulePresentation.parse("0", 3), range(0, 4))
    assert fit.unbounded and fit.mu is None


def test_fit_needs_consecutive_levels():
    rows = [GrowthRow(0, 1, 0), GrowthRow(2, 9, 0), GrowthRow(3, 27, 0)]
    with pytest.raises(DomainError):
        fit_invariants(GrowthTable(3, rows, True))
    with pytest.raises(DomainError):
        fit_invariants(GrowthTable(3, rows[:2], True))


def test_level_cap():
    X = ModulePresentation.parse("T", 3)
    with pytest.raises(ResourceError):
        coinvariant_dim(X, 7)
    with pytest.raises(ResourceError):
        coinvariant_logsize(X, 7)


def test_parallel_growth_matches_serial():
    X = ModulePresentation.parse("p*(T^2+p)", 3)
    assert coinvariant_growth(X, range(0, 4), workers=2).rows == coinvariant_growth(X, range(0, 4)).rows
