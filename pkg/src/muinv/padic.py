"""Finite-precision arithmetic in Z_p and its unramified extensions.

A :class:`PadicInt` is an integer known modulo ``p**N``.  Binary operations
between values of different precision coerce to the smaller one, and
operations that lose digits (division by ``p``-divisible integers in the
logarithm series) return a value whose ``N`` is the precision actually
attained.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product

from .errors import DomainError, UnsupportedError

DEFAULT_PRECISION = 32

#: returned by :func:`valuation` for a value that is zero to working precision
INFINITY = math.inf


class NonUnitError(DomainError, ArithmeticError):
    """Raised when a unit is required but the value is divisible by p."""


class PadicDomainError(DomainError):
    pass


class SingularLiftError(DomainError):
    """Hensel lifting refused because the seed root is not simple mod p."""


@dataclass(frozen=True)
class PadicInt:
    p: int
    N: int
    residue: int

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("precision must be non-negative")
        object.__setattr__(self, "residue", self.residue % self.p**self.N)

    @classmethod
    def of(cls, value: int, p: int, N: int = DEFAULT_PRECISION) -> "PadicInt":
        return cls(p, N, value)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _coerce(self, other):
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise ValueError(f"prime mismatch: {self.p} vs {other.p}")
            return min(self.N, other.N), other.residue
        if isinstance(other, int):
            return self.N, other
        return None, None

    def __add__(self, other):
        N, r = self._coerce(other)
        if N is None:
            return NotImplemented
        return PadicInt(self.p, N, self.residue + r)

    __radd__ = __add__

    def __neg__(self):
        return PadicInt(self.p, self.N, -self.residue)

    def __sub__(self, other):
        N, r = self._coerce(other)
        if N is None:
            return NotImplemented
        return PadicInt(self.p, N, self.residue - r)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        N, r = self._coerce(other)
        if N is None:
            return NotImplemented
        return PadicInt(self.p, N, self.residue * r)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return padic_inv(self) ** (-k)
        return PadicInt(self.p, self.N, pow(self.residue, k, self.modulus))

    def __truediv__(self, other):
        if isinstance(other, int):
            other = PadicInt(self.p, self.N, other)
        return self * padic_inv(other)

    def __eq__(self, other):
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        if not isinstance(other, PadicInt) or other.p != self.p:
            return NotImplemented
        N = min(self.N, other.N)
        return (self.residue - other.residue) % self.p**N == 0

    def __hash__(self):
        return hash((self.p, self.N, self.residue))

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"PadicInt({self.residue} mod {self.p}^{self.N})"

    def reduce(self, N: int) -> "PadicInt":
        return PadicInt(self.p, min(N, self.N), self.residue)

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "N": self.N, "residue": str(self.residue)}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PadicInt":
        d = json.loads(text)
        return cls(int(d["p"]), int(d["N"]), int(d["residue"]))


def padic_add(a: PadicInt, b: PadicInt) -> PadicInt:
    return a + b


def padic_mul(a: PadicInt, b: PadicInt) -> PadicInt:
    return a * b


def padic_inv(a: PadicInt) -> PadicInt:
    if not a.is_unit():
        raise NonUnitError(f"{a} is not a unit")
    return PadicInt(a.p, a.N, pow(a.residue, -1, a.modulus))


def valuation(a: PadicInt):
    """Largest v <= N with p^v | residue, or :data:`INFINITY` for zero."""
    if a.residue == 0:
        return INFINITY
    v, r = 0, a.residue
    while r % a.p == 0:
        r //= a.p
        v += 1
    return v


def teichmuller(a: PadicInt) -> PadicInt:
    """The (p-1)-st root of unity congruent to ``a`` mod p."""
    if not a.is_unit():
        raise NonUnitError("Teichmuller lift of a non-unit")
    w = a.residue
    mod = a.modulus
    # each a -> a^p step gains one digit
    for _ in range(a.N + 1):
        nxt = pow(w, a.p, mod)
        if nxt == w:
            break
        w = nxt
    return PadicInt(a.p, a.N, w)


def padic_log(u: PadicInt) -> PadicInt:
    """p-adic logarithm of a 1-unit, p odd.

    The result carries the attained precision: the series
    sum (-1)^(n+1) x^n / n is truncated once every remaining term vanishes
    mod p^N, and each retained term contributes its own error bound
    N + (n-1) v(x) - v_p(n).
    """
    p, N = u.p, u.N
    if p == 2:
        raise UnsupportedError("p-adic log is not supported for p = 2")
    if u.residue % p != 1 % p:
        raise PadicDomainError(f"{u} is not a 1-unit")
    x = (u.residue - 1) % u.modulus
    if x == 0:
        return PadicInt(p, N, 0)
    v = valuation(PadicInt(p, N, x))
    # term n has valuation n*v - v_p(n) >= n*v - floor(log_p n), which is
    # nondecreasing in n; stop at the first n where that bound reaches N
    terms = []
    n = 1
    while n * v - _log_floor(n, p) < N:
        terms.append((n, _vp_int(n, p)))
        n += 1
    extra = max(vn for _, vn in terms)
    work = p ** (N + extra)
    total = 0
    attained = N
    for n, vn in terms:
        num = pow(x, n, work * p**vn)
        unit = n // p**vn
        term = (num // p**vn) * pow(unit, -1, work) % work
        total += term if n % 2 else -term
        # x is known mod p^N, so x^n / n is known mod p^(N + (n-1)v - v_p(n))
        attained = min(attained, N + (n - 1) * v - vn)
    return PadicInt(p, attained, total)


def _vp_int(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _log_floor(n, p):
    k = 0
    while p ** (k + 1) <= n:
        k += 1
    return k


def _poly_eval(coeffs, x, mod):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


def _poly_deriv(coeffs):
    return [i * c for i, c in enumerate(coeffs)][1:]


def hensel_lift(f, r0: int, p: int, N: int = DEFAULT_PRECISION) -> PadicInt:
    """Lift a simple root of ``f`` mod p to a root mod p^N.

    ``f`` is a list of integer coefficients, constant term first.
    """
    if _poly_eval(f, r0, p) != 0:
        raise PadicDomainError(f"{r0} is not a root of f mod {p}")
    df = _poly_deriv(f)
    if _poly_eval(df, r0, p) == 0:
        raise SingularLiftError(f"{r0} is a multiple root of f mod {p}")
    r = r0 % p
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        mod = p**prec
        r = (r - _poly_eval(f, r, mod) * pow(_poly_eval(df, r, mod), -1, mod)) % mod
    return PadicInt(p, N, r)


# --- unramified extensions -------------------------------------------------


def _polymod_p(a, m, p):
    """Remainder of a modulo monic m over F_p (constant term first)."""
    a = [c % p for c in a]
    dm = len(m) - 1
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1]
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymulmod_p(a, b, m, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _polymod_p(out, m, p)


def _polygcd_p(a, b, p):
    a = _strip([c % p for c in a])
    b = _strip([c % p for c in b])
    while b:
        inv = pow(b[-1], -1, p)
        b = [c * inv % p for c in b]
        a, b = b, _polymod_p(a, b, p)
    return a


def _strip(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible_mod_p(m, p) -> bool:
    """Rabin-style test for a monic polynomial (constant term first)."""
    k = len(m) - 1
    if k <= 0:
        return False
    if k == 1:
        return True
    x = [0, 1]
    xp = x
    for i in range(1, k // 2 + 1):
        # xp = x^(p^i) mod m
        xp = _polypow_p(xp, p, m, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        g = _polygcd_p(m, _strip(diff), p)
        if len(g) > 1:
            return False
    return True


def _polypow_p(a, e, m, p):
    result = [1]
    base = _polymod_p(a, m, p)
    while e:
        if e & 1:
            result = _polymulmod_p(result, base, m, p)
        base = _polymulmod_p(base, base, m, p)
        e >>= 1
    return result


def smallest_irreducible(p: int, k: int):
    """Lexicographically smallest monic irreducible of degree k over F_p.

    Coefficients are compared from the x^(k-1) term down to the constant.
    """
    for tail in product(range(p), repeat=k):
        m = list(reversed(tail)) + [1]
        if m[0] == 0 and k > 1:
            continue
        if is_irreducible_mod_p(m, p):
            return tuple(m)
    raise AssertionError("unreachable: irreducibles exist in every degree")


@dataclass(frozen=True)
class UnramifiedElement:
    """Element of the degree-k unramified extension of Z_p, mod p^N.

    ``coeffs`` are residues mod p^N in the power basis of ``modulus``
    (monic, irreducible mod p, constant term first).
    """

    p: int
    k: int
    N: int
    coeffs: tuple
    modulus: tuple

    @classmethod
    def from_ints(cls, coeffs, p, k, N=DEFAULT_PRECISION, modulus=None):
        modulus = tuple(modulus) if modulus is not None else smallest_irreducible(p, k)
        c = list(coeffs) + [0] * (k - len(coeffs))
        return cls(p, k, N, tuple(x % p**N for x in c[:k]), modulus)

    @property
    def padic_coeffs(self):
        return [PadicInt(self.p, self.N, c) for c in self.coeffs]

    def _like(self, coeffs, N=None):
        N = self.N if N is None else N
        mod = self.p**N
        return UnramifiedElement(self.p, self.k, N, tuple(c % mod for c in coeffs), self.modulus)

    def _check(self, other):
        if (other.p, other.k, other.modulus) != (self.p, self.k, self.modulus):
            raise ValueError("elements of different extensions")
        return min(self.N, other.N)

    def __add__(self, other):
        N = self._check(other)
        return self._like([a + b for a, b in zip(self.coeffs, other.coeffs)], N)

    def __sub__(self, other):
        N = self._check(other)
        return self._like([a - b for a, b in zip(self.coeffs, other.coeffs)], N)

    def __neg__(self):
        return self._like([-a for a in self.coeffs])

    def __mul__(self, other):
        N = self._check(other)
        mod = self.p**N
        prod = [0] * (2 * self.k - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                prod[i + j] += a * b
        m = self.modulus
        for d in range(len(prod) - 1, self.k - 1, -1):
            c = prod[d] % mod
            if c:
                for i in range(self.k):
                    prod[d - self.k + i] -= c * m[i]
            prod[d] = 0
        return self._like(prod[: self.k], N)

    def __eq__(self, other):
        if not isinstance(other, UnramifiedElement):
            return NotImplemented
        N = self._check(other)
        mod = self.p**N
        return all((a - b) % mod == 0 for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.p, self.k, self.N, self.coeffs))

    def one(self):
        return self._like([1] + [0] * (self.k - 1))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_unit(self) -> bool:
        return any(c % self.p for c in self.coeffs)

    def inverse(self):
        if not self.is_unit():
            raise NonUnitError("element is divisible by p")
        # inverse in the residue field, then Newton b <- b(2 - ab)
        q = self.p**self.k
        res = UnramifiedElement(self.p, self.k, 1, tuple(c % self.p for c in self.coeffs), self.modulus)
        b = res ** (q - 2)
        b = self._like(b.coeffs)
        two = self._like([2] + [0] * (self.k - 1))
        prec = 1
        while prec < self.N:
            b = b * (two - self * b)
            prec *= 2
        return b
