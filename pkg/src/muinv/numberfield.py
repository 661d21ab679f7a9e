"""Cyclotomic and quadratic fields with exact arithmetic.

Both field types expose the same small interface used by the
p-rationality code: ``degree``, ``r1``/``r2``, ``ring_poly`` (a monic integer
polynomial whose power basis is an integral basis, constant term first) and
``global_units()`` (integer coordinates in that basis of a set generating a
finite-index subgroup of the unit group).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from ._arith import euler_phi, is_prime, is_squarefree, kronecker, mult_order, prime_power, primitive_root
from ._linalg import det_fraction, det_int
from .errors import DomainError, ResourceError, UnsupportedError

# Prime-power conductors f <= 67 (f not 2 mod 4).  For all of them the class
# number of the maximal real subfield is 1, so cyclotomic units have index
# prime to every p.
HPLUS_ONE_CONDUCTORS = frozenset(
    f for f in range(3, 68) if f % 4 != 2 and prime_power(f) is not None
)

MINUS_CLASS_NUMBER_MAX_DEGREE = 200


def _poly_divmod(num, den):
    """Exact division of integer polynomials (den monic), constant term first."""
    num = list(num)
    dd = len(den) - 1
    q = [0] * max(len(num) - dd, 1)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            q[i - dd] = c
            for j, d in enumerate(den):
                num[i - dd + j] -= c * d
    return q, num[:dd]


_CYCLO_CACHE = {1: (-1, 1)}


def cyclotomic_polynomial(f: int) -> tuple:
    """Phi_f as integer coefficients, constant term first."""
    if f in _CYCLO_CACHE:
        return _CYCLO_CACHE[f]
    num = [-1] + [0] * (f - 1) + [1]
    for d in range(1, f):
        if f % d == 0:
            num, rem = _poly_divmod(num, cyclotomic_polynomial(d))
            assert not any(rem)
    _CYCLO_CACHE[f] = tuple(num)
    return _CYCLO_CACHE[f]


def _reduce(coeffs, modpoly):
    """Reduce a coefficient list modulo a monic polynomial."""
    c = list(coeffs)
    n = len(modpoly) - 1
    for i in range(len(c) - 1, n - 1, -1):
        t = c[i]
        if t:
            for j in range(n):
                c[i - n + j] -= t * modpoly[j]
        c[i] = 0
    return c[:n] + [0] * (n - len(c[:n]))


def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


class CycloField:
    """The cyclotomic field Q(zeta_f)."""

    def __init__(self, f: int):
        if f < 3 or f % 4 == 2:
            raise DomainError(f"conductor must be >= 3 and not 2 mod 4, got {f}")
        self.f = f
        self.degree = euler_phi(f)
        self.poly = cyclotomic_polynomial(f)
        self.r1, self.r2 = 0, self.degree // 2

    ring_poly = property(lambda self: self.poly)
    descriptor = property(lambda self: f"cyclotomic:{self.f}")

    def __repr__(self):
        return f"CycloField({self.f})"

    def __eq__(self, other):
        return isinstance(other, CycloField) and other.f == self.f

    def __hash__(self):
        return hash(("cyclo", self.f))

    def element(self, coeffs) -> "CycloElement":
        return CycloElement(self, coeffs)

    def zeta(self) -> "CycloElement":
        return self.element([0, 1])

    def one(self) -> "CycloElement":
        return self.element([1])

    @property
    def prime_power(self):
        return prime_power(self.f)

    @property
    def num_roots_of_unity(self) -> int:
        return 2 * self.f if self.f % 2 else self.f

    def global_units(self):
        return [u.int_coeffs() for u in cyclotomic_units(self)]

    def contains_zeta_p(self, p: int) -> bool:
        return p == 2 or self.f % p == 0


@dataclass(frozen=True)
class CycloElement:
    field: CycloField
    coeffs: tuple

    def __init__(self, field, coeffs):
        c = _reduce([Fraction(x) for x in coeffs], field.poly) if len(coeffs) else [Fraction(0)] * field.degree
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(c))

    def _other(self, other):
        if isinstance(other, CycloElement):
            if other.field != self.field:
                raise DomainError("elements of different fields")
            return other
        return CycloElement(self.field, [other])

    def __add__(self, other):
        o = self._other(other)
        return CycloElement(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        return CycloElement(self.field, _polymul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def multiplication_matrix(self):
        """Columns are self * x^j in the power basis."""
        n = self.field.degree
        cols = []
        for j in range(n):
            cols.append((self * CycloElement(self.field, [0] * j + [1])).coeffs)
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def norm(self) -> Fraction:
        return det_fraction(self.multiplication_matrix())

    def inverse(self):
        # solve M v = e_0 by Cramer-free elimination over Q
        M = self.multiplication_matrix()
        n = len(M)
        aug = [list(r) + [Fraction(int(i == 0))] for i, r in enumerate(M)]
        for c in range(n):
            piv = next((i for i in range(c, n) if aug[i][c]), None)
            if piv is None:
                raise ZeroDivisionError("zero element has no inverse")
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [x / pv for x in aug[c]]
            for i in range(n):
                if i != c and aug[i][c]:
                    t = aug[i][c]
                    aug[i] = [x - t * y for x, y in zip(aug[i], aug[c])]
        return CycloElement(self.field, [aug[i][n] for i in range(n)])

    def galois(self, a: int) -> "CycloElement":
        """Image under sigma_a : zeta -> zeta^a."""
        if gcd(a, self.field.f) != 1:
            raise DomainError(f"{a} is not prime to the conductor {self.field.f}")
        a %= self.field.f
        out = [Fraction(0)] * (a * (self.field.degree - 1) + 1)
        for j, c in enumerate(self.coeffs):
            out[a * j] += c
        return CycloElement(self.field, out)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def int_coeffs(self) -> list:
        if not self.is_integral():
            raise DomainError("element has non-integral coordinates")
        return [int(c) for c in self.coeffs]

    def __repr__(self):
        return f"CycloElement(f={self.field.f}, {[str(c) for c in self.coeffs]})"


def cyclotomic_units(K: CycloField) -> list:
    """-zeta followed by (1 - zeta^a)/(1 - zeta) for 1 < a < f/2, gcd(a, f) = 1."""
    if K.prime_power is None:
        raise UnsupportedError("cyclotomic units are provided for prime-power conductors only")
    units = [-K.zeta()]
    for a in range(2, (K.f + 1) // 2):
        if 2 * a < K.f and gcd(a, K.f) == 1:
            units.append(K.element([1] * a))
    for u in units:
        if abs(u.norm()) != 1:
            raise AssertionError(f"cyclotomic unit {u} has norm {u.norm()}")
    return units


class QuadField:
    """Q(sqrt d) for squarefree d != 0, 1."""

    def __init__(self, d: int):
        if d in (0, 1) or not is_squarefree(d):
            raise DomainError(f"d must be squarefree and not 0 or 1, got {d}")
        self.d = d
        self.D = d if d % 4 == 1 else 4 * d
        self.degree = 2
        self.r1, self.r2 = (2, 0) if d > 0 else (0, 1)
        # omega = (1 + sqrt d)/2 or sqrt d
        if d % 4 == 1:
            self.omega_trace, self.omega_norm = 1, (1 - d) // 4
        else:
            self.omega_trace, self.omega_norm = 0, -d

    descriptor = property(lambda self: f"quadratic:{self.d}")

    @property
    def ring_poly(self):
        return (self.omega_norm, -self.omega_trace, 1)

    def __repr__(self):
        return f"QuadField({self.d})"

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.d == self.d

    def __hash__(self):
        return hash(("quad", self.d))

    @property
    def num_roots_of_unity(self) -> int:
        return {-1: 4, -3: 6}.get(self.d, 2)

    def fundamental_unit(self):
        """(x, y) with epsilon = x + y*sqrt(d) > 1, as Fractions (real fields only)."""
        u, v = self.fundamental_unit_basis()
        if self.omega_trace:
            return Fraction(2 * u + v, 2), Fraction(v, 2)
        return Fraction(u), Fraction(v)

    def fundamental_unit_basis(self):
        """Fundamental unit as (u, v) meaning u + v*omega, from the continued fraction of omega."""
        if self.d < 0:
            raise DomainError("imaginary quadratic fields have no fundamental unit")
        d = self.d
        # omega = (P + sqrt(d)) / Q with Q | d - P^2
        P, Q = (1, 2) if self.omega_trace else (0, 1)
        s = isqrt(d)
        p_prev, p_cur = 0, 1
        q_prev, q_cur = 1, 0
        while True:
            a = (P + s) // Q if Q > 0 else -((P + s) // -Q + 1)
            p_prev, p_cur = p_cur, a * p_cur + p_prev
            q_prev, q_cur = q_cur, a * q_cur + q_prev
            nrm = p_cur * p_cur - p_cur * q_cur * self.omega_trace + q_cur * q_cur * self.omega_norm
            if nrm in (1, -1):
                # p - q*omega is the small conjugate; return its conjugate
                return p_cur - q_cur * self.omega_trace, q_cur
            P = a * Q - P
            Q = (d - P * P) // Q

    def global_units(self):
        if self.d == -1:
            return [[0, 1]]
        if self.d == -3:
            return [[0, 1]]
        if self.d < 0:
            return [[-1, 0]]
        return [[-1, 0], list(self.fundamental_unit_basis())]

    def class_number(self) -> int:
        if self.d > 0:
            raise UnsupportedError("real quadratic class numbers are not provided")
        return class_number_imag_quadratic(self.d)

    def contains_zeta_p(self, p: int) -> bool:
        return p == 2 or (p == 3 and self.d == -3)


@dataclass(frozen=True)
class SplittingData:
    field: str
    p: int
    e: int
    fres: int
    g: int
    degree: int

    @property
    def splits_totally(self) -> bool:
        return self.g == self.degree

    def to_dict(self):
        return {"field": self.field, "p": self.p, "e": self.e, "fres": self.fres, "g": self.g}


def splitting_data(K, p: int) -> SplittingData:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if isinstance(K, CycloField):
        k, rest = 0, K.f
        while rest % p == 0:
            rest //= p
            k += 1
        e = euler_phi(p**k)
        fres = mult_order(p, rest)
        g = euler_phi(rest) // fres
        return SplittingData(K.descriptor, p, e, fres, g, K.degree)
    if isinstance(K, QuadField):
        s = kronecker(K.D, p)
        e, fres, g = {0: (2, 1, 1), 1: (1, 1, 2), -1: (1, 2, 1)}[s]
        return SplittingData(K.descriptor, p, e, fres, g, 2)
    raise UnsupportedError(f"unsupported field {K!r}")


def parse_field(text: str):
    """Parse ``cyclotomic:<f>`` or ``quadratic:<d>``."""
    kind, _, arg = text.partition(":")
    try:
        n = int(arg)
    except ValueError:
        raise DomainError(f"bad field descriptor {text!r}") from None
    if kind == "cyclotomic":
        return CycloField(n)
    if kind == "quadratic":
        return QuadField(n)
    raise DomainError(f"bad field descriptor {text!r}")


def reduced_forms(D: int) -> list:
    """Reduced primitive positive definite forms (a, b, c) with b^2 - 4ac = D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise DomainError(f"{D} is not a negative discriminant")
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, abs(b)), c) == 1:
                forms.append((a, b, c))
        a += 1
    return forms


def class_number_imag_quadratic(d: int) -> int:
    if d >= 0:
        raise DomainError("d must be negative")
    return len(reduced_forms(QuadField(d).D))


def minus_class_number(f: int) -> int:
    """Relative class number of Q(zeta_f) for a prime power f.

    Uses h^- = w * prod over odd chi of (-B_{1,chi}/2), with the product of
    the sums sum_a chi(a) a evaluated exactly as a resultant.
    """
    pp = prime_power(f)
    if pp is None or f % 4 == 2 or f < 3:
        raise UnsupportedError("minus_class_number needs a prime-power conductor f >= 3, f != 2 mod 4")
    n = euler_phi(f)
    if n > MINUS_CLASS_NUMBER_MAX_DEGREE:
        raise ResourceError(f"phi({f}) = {n} exceeds {MINUS_CLASS_NUMBER_MAX_DEGREE}")
    p, _ = pp
    half = n // 2
    if p == 2:
        # (Z/f)^x = <-1> x <5>; odd chi: chi(-1) = -1, chi(5) = eta with eta^half = 1
        F = [2 * pow(5, i, f) - f for i in range(half)]
        ring = [-1] + [0] * (half - 1) + [1]  # X^half - 1
        w = f
    else:
        g = primitive_root(f)
        F = [pow(g, i, f) for i in range(n)]
        ring = [1] + [0] * (half - 1) + [1]  # X^half + 1
        w = 2 * f
    # determinant of multiplication by F in Q[X]/(ring) = prod of F over roots
    F = _reduce(F, ring)
    cols = []
    for j in range(half):
        cols.append(_reduce(_polymul(F, [0] * j + [1]), ring))
    res = det_int([[cols[j][i] for j in range(half)] for i in range(half)])
    h = Fraction(w) * Fraction(-1, 2) ** half * Fraction(res, f**half)
    if h.denominator != 1 or h <= 0:
        raise AssertionError(f"non-integral relative class number {h} for f={f}")
    return int(h)


def hplus_is_one(f: int) -> bool:
    """True when the built-in table certifies h^+(Q(zeta_f)) = 1."""
    return f in HPLUS_ONE_CONDUCTORS
