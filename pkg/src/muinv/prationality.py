"""Deciding p-rationality.

Two criteria are implemented:

* the numerical one: with ``m`` the product of ``P^(2e_P + 1)`` over the
  primes above p, K is p-rational iff ``d_p A_m = r_2 + 1``.  When p does
  not divide the class number, ``A_m`` is the p-part of ``(O_K/m)^x``
  modulo the image of the global units.  That quotient is computed exactly
  with :class:`~muinv.units.OneUnitFiltration`.
* the theoretical one, for fields containing ``zeta_p``: K is p-rational iff
  exactly one prime lies above p and the p-class group is generated by it.

Every verdict is either certified or reported as ``undecided`` with a reason.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from ._arith import is_prime, is_squarefree, kronecker
from ._linalg import rank_mod_p, row_reduce_mod_p
from .characters import CharacterVec, character_of_action
from .errors import DomainError, InapplicableError, ResourceError, UnsupportedError
from .forms import form_order, reduce_with_matrix
from .numberfield import (
    MINUS_CLASS_NUMBER_MAX_DEGREE,
    CycloField,
    QuadField,
    class_number_imag_quadratic,
    hplus_is_one,
    minus_class_number,
    reduced_forms,
    splitting_data,
)
from .padic import hensel_lift
from .units import OneUnitFiltration

RATIONAL = "p-rational"
NOT_RATIONAL = "not p-rational"
UNDECIDED = "undecided"

REGULARITY_CAP = 10_000

# --- regular primes -----------------------------------------------------------

_BERNOULLI = [Fraction(1)]


def bernoulli(n: int) -> Fraction:
    """B_n (with B_1 = -1/2) from sum_{k<=n} C(n+1, k) B_k = 0, memoized."""
    while len(_BERNOULLI) <= n:
        m = len(_BERNOULLI)
        s = sum(comb(m + 1, k) * _BERNOULLI[k] for k in range(m) if k < 2 or k % 2 == 0)
        _BERNOULLI.append(Fraction(0) if m > 1 and m % 2 else -s / (m + 1))
    return _BERNOULLI[n]


def _bernoulli_mod_p(p: int) -> np.ndarray:
    """B_0..B_{p-3} reduced mod p via the same recurrence over F_p.

    All these B_k are p-integral and the recurrence only divides by
    m + 1 <= p - 2, so the reduction is exact.
    """
    B = np.zeros(p - 2, dtype=np.int64)
    B[0] = 1
    row = np.zeros(p, dtype=np.int64)  # C(m+1, k) mod p
    row[0], row[1] = 1, 1  # m = 0 -> C(1, k)
    for m in range(1, p - 2):
        row[1 : m + 2] = (row[1 : m + 2] + row[0 : m + 1]) % p  # now C(m+1, k)
        if m > 1 and m % 2:
            continue
        s = int(np.dot(row[:m], B[:m]) % p)
        B[m] = (-s * pow(m + 1, -1, p)) % p
    return B


@dataclass(frozen=True)
class RegularityResult:
    p: int
    regular: bool
    witness: tuple  # even indices 2k <= p-3 with p | numerator(B_2k)

    def __bool__(self):
        return self.regular


def is_regular_prime(p: int) -> RegularityResult:
    if p == 2:
        raise UnsupportedError("regularity is defined here for odd primes")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p > REGULARITY_CAP:
        raise ResourceError(f"p = {p} exceeds the cap {REGULARITY_CAP}")
    if p == 3:
        return RegularityResult(p, True, ())
    B = _bernoulli_mod_p(p)
    witness = tuple(k for k in range(2, p - 2, 2) if B[k] == 0)
    return RegularityResult(p, not witness, witness)


def irregular_primes_below(bound: int) -> list:
    return [q for q in range(3, bound) if is_prime(q) and not is_regular_prime(q)]


# --- reports ------------------------------------------------------------------


@dataclass
class PrationalityReport:
    field: str
    p: int
    method: str
    verdict: str
    dpAm: int | None = None
    expected: int | None = None
    splitting: dict | None = None
    assumptions: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def is_rational(self) -> bool:
        return self.verdict == RATIONAL

    def to_dict(self):
        return {
            "field": self.field,
            "p": self.p,
            "method": self.method,
            "verdict": self.verdict,
            "dpAm": self.dpAm,
            "expected": self.expected,
            "splitting": self.splitting,
            "assumptions": list(self.assumptions),
            "notes": list(self.notes),
        }


def _class_number_status(K, p):
    """Return (p_divides_h: True/False/None, assumptions, notes)."""
    assumptions, notes = [], []
    if isinstance(K, QuadField):
        if K.d > 0:
            return None, assumptions, ["real quadratic class numbers are not provided"]
        h = class_number_imag_quadratic(K.d)
        notes.append(f"h = {h}")
        return h % p == 0, assumptions, notes
    if K.prime_power is None:
        return None, assumptions, ["class number data needs a prime-power conductor"]
    if K.degree > MINUS_CLASS_NUMBER_MAX_DEGREE:
        return None, assumptions, ["conductor too large for the relative class number"]
    hm = minus_class_number(K.f)
    notes.append(f"h- = {hm}")
    if hm % p == 0:
        return True, assumptions, notes
    if hplus_is_one(K.f):
        assumptions.append("p does not divide h+ (h+ = 1 by built-in table)")
        return False, assumptions, notes
    return None, ["p does not divide h+ (not certified)"], notes + ["h+ not covered by the built-in table"]


def _filtration(K, p):
    sd = splitting_data(K, p)
    return OneUnitFiltration(K, p, 2 * sd.e + 1)


def test_numerical(K, p: int, a: int | None = None) -> PrationalityReport:
    """Numerical criterion: compare d_p A_m with r_2 + 1."""
    sd = splitting_data(K, p)
    expected = K.r2 + 1
    rep = PrationalityReport(K.descriptor, p, "numerical", UNDECIDED, expected=expected, splitting=sd.to_dict())
    rep.assumptions.append("Leopoldt conjecture at p (a theorem for abelian fields)")
    if not sd.splits_totally:
        rep.notes.append(f"{p} does not split totally: residue degree {sd.fres}, {sd.g} primes")
    if not (sd.e == 1 or (isinstance(K, CycloField) and sd.g == 1 and sd.e == K.degree)):
        rep.notes.append("partially ramified p is not supported")
        return rep
    divides, assumptions, notes = _class_number_status(K, p)
    rep.assumptions += assumptions
    rep.notes += notes
    if divides is None:
        return rep
    if divides:
        if isinstance(K, QuadField) and K.d < 0:
            _, rep.dpAm = imag_quadratic_dpAm(K.d, p)
            if rep.dpAm is None:
                rep.notes.append("the p-class group is not cyclic")
                return rep
            rep.notes.append("p divides h; the class group generator enters through a split prime")
            rep.verdict = RATIONAL if rep.dpAm == expected else NOT_RATIONAL
            return rep
        rep.notes.append("p divides the class number; ray class extension data is not computed")
        return rep
    F = OneUnitFiltration(K, p, a if a is not None else 2 * sd.e + 1)
    rep.dpAm = F.quotient_p_rank(K.global_units())
    rep.verdict = RATIONAL if rep.dpAm == expected else NOT_RATIONAL
    return rep


def test_theoretical(K, p: int) -> PrationalityReport:
    """Criterion for fields containing zeta_p: one prime above p, generating the p-class group."""
    if not K.contains_zeta_p(p):
        raise InapplicableError(f"zeta_{p} is not in {K.descriptor}; use the numerical criterion")
    sd = splitting_data(K, p)
    rep = PrationalityReport(K.descriptor, p, "theoretical", UNDECIDED, splitting=sd.to_dict())
    if sd.g > 1:
        rep.verdict = NOT_RATIONAL
        rep.notes.append(f"{sd.g} primes above {p}")
        return rep
    divides, assumptions, notes = _class_number_status(K, p)
    rep.assumptions += assumptions
    rep.notes += notes
    if divides is None:
        return rep
    if not divides:
        rep.verdict = RATIONAL
        return rep
    if isinstance(K, CycloField) and K.f % p == 0:
        # the prime above p is (1 - zeta_{p^n}), principal, so it cannot generate
        rep.verdict = NOT_RATIONAL
        rep.notes.append("p divides h and the prime above p is principal")
    else:
        rep.notes.append("p divides h; the class of the prime above p is not computed")
    return rep


# --- Galois action on A_{S_p} ----------------------------------------------------


def _cyclic_generator(H, f):
    H = sorted({h % f for h in H})
    if 1 not in H:
        raise DomainError("H must contain 1")
    for g in H:
        span, x = {1}, g
        while x != 1:
            span.add(x)
            x = x * g % f
        if span == set(H):
            return g, len(H)
    raise DomainError(f"{H} is not a cyclic subgroup of (Z/{f})^x")


def _ring_substitute(F, coeffs, image):
    """Evaluate the ring element with given coefficients at ``image`` (Horner)."""
    ring = F.ring
    acc = ring.reduce([0])
    for c in reversed(coeffs):
        acc = ring.mul(acc, image)
        acc = tuple((x + (c if k == 0 else 0)) % ring.mod for k, x in enumerate(acc))
    return acc


def galois_image_of_variable(F, a):
    """Image of the ring variable under sigma_a : zeta -> zeta^a."""
    ring = F.ring
    if not F.ramified:
        return ring.reduce([0] * a + [1])
    # y = 1 - zeta  ->  1 - zeta^a = 1 - (1 - y)^a
    one_minus_y = ring.reduce([1, -1])
    w = ring.pow(one_minus_y, a)
    return tuple((-x + (1 if k == 0 else 0)) % ring.mod for k, x in enumerate(w))


def quotient_action_matrix(F, units, a):
    """Matrix of sigma_a on (G/G^p)/<units> in a complement basis (row convention)."""
    p = F.p
    rows = F.relations() + [F.decompose(F.project(u)) for u in units]
    W, pivots = row_reduce_mod_p(rows, p)
    free = [c for c in range(F.N) if c not in pivots]
    image = galois_image_of_variable(F, a)
    S = [F.decompose(_ring_substitute(F, g, image)) for g in F.generators]

    def reduce_vec(v):
        v = [x % p for x in v]
        for r, c in zip(W, pivots):
            if v[c]:
                t = v[c]
                v = [(x - t * y) % p for x, y in zip(v, r)]
        return [v[c] for c in free]

    return [reduce_vec(S[c]) for c in free]


def character_of_ASp(K, H, p: int) -> CharacterVec:
    """Eigen-decomposition of A_{S_p}/p under Gal(K/K_0), K_0 the fixed field of H.

    Entry k of the result is the multiplicity of the character sigma -> eps^k,
    where sigma is the smallest generator of H and eps the smallest primitive
    m-th root of unity mod p.
    """
    if not isinstance(K, CycloField):
        raise UnsupportedError("character_of_ASp expects a cyclotomic field")
    sigma, m = _cyclic_generator(H, K.f)
    if m > 1 and (K.f - 1) in {h % K.f for h in H}:
        raise DomainError("K_0 must be totally imaginary (complex conjugation outside H)")
    if (p - 1) % m:
        raise UnsupportedError(f"m = {m} must divide p - 1 so eigenvalues lie in F_p")
    rep = test_numerical(K, p)
    if not rep.is_rational:
        raise DomainError(f"{K.descriptor} is not certified {p}-rational ({rep.verdict})")
    F = _filtration(K, p)
    A = quotient_action_matrix(F, K.global_units(), sigma)
    return character_of_action(A, p, m)


# --- imaginary quadratic survey ---------------------------------------------------


def _split_prime_ideal_power(D, ell, N):
    """Form (ell^N, B, C) of the N-th power of a prime above the odd split prime ell."""
    r0 = next(x for x in range(ell) if (x * x - D) % ell == 0)
    B = int(hensel_lift([-D, 0, 1], r0, ell, N).residue)
    mod = ell**N
    if (B - D) % 2:
        B += mod
    return mod, B, (B * B - D) // (4 * mod)


def _ideal_generator(D, a, b, c):
    """Generator alpha = x*a + y*(-b + sqrt D)/2 of a principal ideal [a, (-b + sqrt D)/2]."""
    red, M = reduce_with_matrix((a, -b, c))
    if red[0] != 1:
        raise AssertionError("ideal is not principal")
    return M[0][0], M[1][0]


def imag_quadratic_verdict(d: int, p: int):
    """(h, verdict) for K = Q(sqrt d), d < 0, p >= 5 unramified."""
    h, dpAm = imag_quadratic_dpAm(d, p)
    if dpAm is None:
        return h, UNDECIDED
    return h, RATIONAL if dpAm == 2 else NOT_RATIONAL


def imag_quadratic_dpAm(d: int, p: int):
    """(h, d_p A_m) for K = Q(sqrt d), d < 0, p unramified; d_p A_m is None if undecided.

    When p divides h and the p-class group is cyclic of order p^k, A_m is
    the extension of Cl_p by the unit quotient; a generator alpha of
    l^(order) for a split prime l generating Cl_p gives the extra relation.
    """
    K = QuadField(d)
    D = K.D
    if D % p == 0:
        return class_number_imag_quadratic(d), None
    forms = reduced_forms(D)
    h = len(forms)
    if h % p:
        F = OneUnitFiltration(K, p, 3)
        return h, F.quotient_p_rank(K.global_units())
    k = 0
    while h % p ** (k + 1) == 0:
        k += 1
    max_pk = max(_vp(form_order(f, h), p) for f in forms)
    if max_pk < k:
        return h, None  # non-cyclic p-class group
    ell = 3
    while True:
        if ell != p and is_prime(ell) and D % ell and kronecker(D, ell) == 1:
            a, b, c = _split_prime_ideal_power(D, ell, 1)
            order = form_order((a, b, c), h)
            if _vp(order, p) == k:
                break
        ell += 2
        if ell > 10**6:
            raise ResourceError("no split prime generating the p-class group found")
    a, b, c = _split_prime_ideal_power(D, ell, order)
    x, y = _ideal_generator(D, a, b, c)
    # coordinates in the basis (1, omega)
    if D % 4 == 1:
        alpha = (x * a + y * (-b - 1) // 2, y)
    else:
        alpha = (x * a - y * b // 2, y)
    F = OneUnitFiltration(K, p, 3)
    cvec = F.decompose(F.project(alpha))
    rows = [r + [0] for r in F.relations()]
    rows.append([-v for v in cvec] + [(F.q - 1) * p**k])
    for u in K.global_units():
        rows.append(F.decompose(F.project(u)) + [0])
    return h, F.N + 1 - rank_mod_p(rows, p)


def _vp(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass
class SurveyReport:
    p: int
    bound: int
    rows: list  # (D, h, verdict)

    @property
    def counts(self):
        out = {RATIONAL: 0, NOT_RATIONAL: 0, UNDECIDED: 0}
        for _, _, v in self.rows:
            out[v] += 1
        return out

    @property
    def proportion(self) -> Fraction:
        return Fraction(self.counts[RATIONAL], len(self.rows)) if self.rows else Fraction(0)

    def csv_lines(self):
        yield "D,h,verdict"
        for D, h, v in self.rows:
            yield f"{D},{h},{v}"

    def to_dict(self):
        return {
            "p": self.p,
            "bound": self.bound,
            "counts": self.counts,
            "proportion": str(self.proportion),
            "fields": len(self.rows),
        }


def _fundamental_d(bound):
    """Squarefree d < 0 with |disc(Q(sqrt d))| <= bound."""
    out = []
    for n in range(1, bound + 1):
        d = -n
        if is_squarefree(d) and (abs(d if d % 4 == 1 else 4 * d) <= bound):
            out.append(d)
    return out


def _survey_chunk(args):
    p, ds = args
    rows = []
    for d in ds:
        D = d if d % 4 == 1 else 4 * d
        if D % p == 0:
            continue
        h, verdict = imag_quadratic_verdict(d, p)
        rows.append((D, h, verdict))
    return rows


def survey_quadratic(p: int, bound: int, workers: int = 1) -> SurveyReport:
    """p-rationality of every imaginary quadratic field with |D| <= bound, p not dividing D."""
    if p < 5 or not is_prime(p):
        raise DomainError("the survey needs a prime p >= 5")
    ds = _fundamental_d(bound)
    if workers > 1 and len(ds) > workers:
        chunks = [ds[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_survey_chunk, [(p, c) for c in chunks]))
        rows = [r for part in parts for r in part]
    else:
        rows = _survey_chunk((p, ds))
    rows.sort(key=lambda r: -r[0])
    return SurveyReport(p, bound, rows)



# keep pytest from collecting the criteria as tests when imported by name
test_numerical.__test__ = False
test_theoretical.__test__ = False
