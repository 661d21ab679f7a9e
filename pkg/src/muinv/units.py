"""Finite one-unit groups (O_K / m)^x[p] with explicit filtration coordinates.

The p-part of ``(O_K/m)^x`` is the group of principal units ``U_1 / U_a``.
Each slice ``U_i / U_{i+1}`` is an F_p-vector space with an explicit basis
of elements ``1 + pi^i * b``.  Peeling digits off level by level writes any
element as a product of these basis elements.  The same peeling applied to
``g^p`` for every basis element ``g`` yields a complete set of relations.
This replaces discrete logarithms in the local factors by linear algebra.

Two ring models are supported:

* ``p`` unramified: ``Z[x]/(f(x), p^a)`` for the integral-basis polynomial
  ``f`` of the field, with ``pi = p``.
* ``K = Q(zeta_{p^n})`` with ``p`` totally ramified:
  ``Z[y]/(E(y), p^M)`` where ``E(y) = Phi_{p^n}(1 - y)`` is Eisenstein and
  ``pi = y = 1 - zeta``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._linalg import local_snf, rank_mod_p
from .errors import UnsupportedError
from .numberfield import CycloField, splitting_data


class TruncRing:
    """Z[x]/(modpoly, mod) with coefficient lists, constant term first."""

    def __init__(self, modpoly, mod):
        self.modpoly = tuple(modpoly)
        self.n = len(modpoly) - 1
        self.mod = mod

    def reduce(self, c):
        c = list(c)
        n, m = self.n, self.modpoly
        for i in range(len(c) - 1, n - 1, -1):
            t = c[i] % self.mod
            if t:
                for j in range(n):
                    c[i - n + j] -= t * m[j]
        c = c[:n] + [0] * (n - min(len(c), n))
        return tuple(x % self.mod for x in c)

    def mul(self, a, b):
        out = [0] * (2 * self.n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self.reduce(out)

    def one(self):
        return (1,) + (0,) * (self.n - 1)

    def pow(self, a, e):
        result, base = self.one(), a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result


def _vp_capped(c, p, cap):
    if c == 0:
        return cap
    v = 0
    while c % p == 0 and v < cap:
        c //= p
        v += 1
    return v


@dataclass(frozen=True)
class UnitGroupPPart:
    """The p-part of (O_K/m)^x as a product of cyclic groups."""

    p: int
    orders: tuple
    generators: tuple  # ring elements (coefficient tuples) in the field's basis
    p_rank: int

    @property
    def order(self) -> int:
        out = 1
        for o in self.orders:
            out *= o
        return out


class OneUnitFiltration:
    """Principal units U_1/U_a of O_K at all primes above p, with digit coordinates."""

    def __init__(self, K, p: int, a: int):
        self.K, self.p, self.a = K, p, a
        sd = splitting_data(K, p)
        self.splitting = sd
        if sd.e == 1:
            self.ramified = False
            self.ring = TruncRing(K.ring_poly, p**a)
            self.q = p**sd.fres
            n = self.ring.n
            self.levels = [[self._basis_elt(i, j) for j in range(n)] for i in range(1, a)]
        elif isinstance(K, CycloField) and sd.g == 1 and sd.e == K.degree:
            self.ramified = True
            self.e = sd.e
            M = -(-a // self.e) + 1
            phi = K.poly
            self.ring = TruncRing(self._eisenstein(phi), p**M)
            self.q = p
            # leading data of pi^i: pi^i = y^j0 * p^k * (unit d mod pi)
            self._pi_powers = {}
            self.levels = [[self._pi_one_plus(i)] for i in range(1, a)]
        else:
            raise UnsupportedError(
                "one-unit groups are implemented for unramified p and for totally ramified Q(zeta_{p^n})"
            )
        self.generators = [g for lvl in self.levels for g in lvl]
        self.N = len(self.generators)

    # --- ring models -----------------------------------------------------

    @staticmethod
    def _eisenstein(phi):
        """Coefficients of Phi(1 - y)."""
        out = [0] * len(phi)
        # (1 - y)^j by repeated multiplication
        power = [1]
        for c in phi:
            for i, x in enumerate(power):
                out[i] += c * x
            power = [a - b for a, b in zip(power + [0], [0] + power)]
        return tuple(out)

    def _basis_elt(self, i, j):
        c = [0] * self.ring.n
        c[0] = 1
        c[j] = (c[j] + self.p**i) % self.ring.mod
        return tuple(c)

    def _pi_power(self, i):
        if i not in self._pi_powers:
            y = [0] * self.ring.n
            if self.ring.n > 1:
                y[1] = 1
            self._pi_powers[i] = self.ring.pow(tuple(y), i)
        return self._pi_powers[i]

    def _pi_one_plus(self, i):
        pi_i = self._pi_power(i)
        return tuple((c + (k == 0)) % self.ring.mod for k, c in enumerate(pi_i))

    def embed(self, coeffs):
        """Map field coordinates (integral power basis) into the ring model."""
        if not self.ramified:
            return self.ring.reduce([int(c) for c in coeffs])
        # substitute x = 1 - y
        one_minus_y = self.ring.reduce([1, -1])
        acc = self.ring.reduce([0])
        for c in reversed([int(c) for c in coeffs]):
            acc = self.ring.mul(acc, one_minus_y)
            acc = tuple((x + (c if k == 0 else 0)) % self.ring.mod for k, x in enumerate(acc))
        return acc

    # --- valuations and digits ----------------------------------------------

    def valuation_minus_one(self, u):
        """pi-adic valuation of u - 1 (capped at a)."""
        d = list(u)
        d[0] -= 1
        if not self.ramified:
            return min(_vp_capped(c % self.ring.mod, self.p, self.a) for c in d)
        cap = self.a
        best = cap
        for j, c in enumerate(d):
            c %= self.ring.mod
            if c:
                best = min(best, self.e * _vp_capped(c, self.p, cap) + j)
        return min(best, cap)

    def digits(self, u, i):
        """Coordinates of u in U_i/U_{i+1} (u must lie in U_i)."""
        p = self.p
        d = list(u)
        d[0] -= 1
        if not self.ramified:
            pi = p**i
            out = []
            for c in d:
                c %= self.ring.mod
                if c % pi:
                    raise ValueError(f"element is not in U_{i}")
                out.append((c // pi) % p)
            return out
        j0 = i % self.e
        k = i // self.e
        if self.valuation_minus_one(u) < i:
            raise ValueError(f"element is not in U_{i}")
        c = d[j0] % self.ring.mod
        ref = self._pi_power(i)[j0]
        # both coefficients are p^k times a unit (or c has higher valuation)
        num = (c // p**k) % p
        den = (ref // p**k) % p
        return [num * pow(den, -1, p) % p]

    def decompose(self, u):
        """Exponent vector v with u = prod g^v over the filtration generators."""
        p = self.p
        vec = []
        for i, lvl in enumerate(self.levels, start=1):
            ds = self.digits(u, i)
            for g, c in zip(lvl, ds):
                if c:
                    u = self.ring.mul(u, self.ring.pow(g, p - c))
                    vec.append(c - p)
                else:
                    vec.append(0)
        if self.valuation_minus_one(u) < self.a:
            raise AssertionError("digit peeling did not terminate at 1")
        return vec

    def relations(self):
        """Rows p*e_g - decompose(g^p); they generate all relations."""
        rows = []
        for idx, g in enumerate(self.generators):
            w = self.decompose(self.ring.pow(g, self.p))
            row = [-x for x in w]
            row[idx] += self.p
            rows.append(row)
        return rows

    def project(self, coeffs):
        """Image of a unit of O_K in the p-part: u -> u^(q-1)."""
        return self.ring.pow(self.embed(coeffs), self.q - 1)

    def structure(self) -> UnitGroupPPart:
        vals, Vinv = local_snf(self.relations(), self.p, self.a)
        orders, gens = [], []
        for v, row in zip(vals, Vinv):
            if v == 0:
                continue
            elt = self.ring.one()
            for g, ex in zip(self.generators, row):
                if ex:
                    elt = self.ring.mul(elt, self.ring.pow(g, ex))
            orders.append(self.p**v)
            gens.append(elt)
        return UnitGroupPPart(self.p, tuple(orders), tuple(gens), len(orders))

    def quotient_p_rank(self, unit_coeffs) -> int:
        """d_p of the p-part modulo the subgroup generated by the given units."""
        rows = self.relations() + [self.decompose(self.project(u)) for u in unit_coeffs]
        return self.N - rank_mod_p(rows, self.p)


def residue_ring_units_p_part(K, p: int, a: int) -> UnitGroupPPart:
    """p-Sylow subgroup of (O_K / p^a)^x for p unramified in K."""
    if splitting_data(K, p).e != 1:
        raise UnsupportedError(f"{p} ramifies in {K.descriptor}")
    if a < 1:
        raise ValueError("exponent a must be positive")
    if a == 1:
        return UnitGroupPPart(p, (), (), 0)
    return OneUnitFiltration(K, p, a).structure()
