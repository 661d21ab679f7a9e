"""Virtual characters of a cyclic group of order m, and the rank formulas built on them.

A character is stored as a multiplicity vector over the m degree-one
characters ``chi_k : sigma -> eps^k`` (``eps`` a fixed primitive m-th root of
unity).  The Teichmuller-type character ``omega`` enters only through the
twist ``chi -> omega * chi^{-1}``, which on indices is ``k -> w - k`` for a
designated index ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._arith import divisors, factorize
from ._linalg import rank_mod_p
from .errors import DomainError


@dataclass(frozen=True)
class CharacterVec:
    m: int
    mult: tuple

    def __post_init__(self):
        if self.m < 1 or len(self.mult) != self.m:
            raise DomainError(f"multiplicity vector must have length m = {self.m}")
        object.__setattr__(self, "mult", tuple(int(x) for x in self.mult))

    @classmethod
    def regular(cls, m):
        return cls(m, (1,) * m)

    @classmethod
    def trivial(cls, m):
        return cls.basis(m, 0)

    @classmethod
    def basis(cls, m, k):
        v = [0] * m
        v[k % m] = 1
        return cls(m, tuple(v))

    @classmethod
    def zero(cls, m):
        return cls(m, (0,) * m)

    def _check(self, other):
        if not isinstance(other, CharacterVec) or other.m != self.m:
            raise DomainError("characters of different groups")

    def __add__(self, other):
        self._check(other)
        return CharacterVec(self.m, tuple(a + b for a, b in zip(self.mult, other.mult)))

    def __sub__(self, other):
        self._check(other)
        return CharacterVec(self.m, tuple(a - b for a, b in zip(self.mult, other.mult)))

    def __neg__(self):
        return CharacterVec(self.m, tuple(-a for a in self.mult))

    def __mul__(self, k: int):
        return CharacterVec(self.m, tuple(k * a for a in self.mult))

    __rmul__ = __mul__

    @property
    def degree(self) -> int:
        return sum(self.mult)

    @property
    def is_genuine(self) -> bool:
        return all(a >= 0 for a in self.mult)

    def __repr__(self):
        return f"CharacterVec(m={self.m}, {list(self.mult)})"


def inner_product(a: CharacterVec, b: CharacterVec) -> int:
    a._check(b)
    return sum(x * y for x, y in zip(a.mult, b.mult))


def restrict(chi: CharacterVec, m_sub: int) -> CharacterVec:
    """Restriction to the subgroup of order m_sub (generated by sigma^(m/m_sub))."""
    if m_sub < 1 or chi.m % m_sub:
        raise DomainError(f"{m_sub} does not divide {chi.m}")
    out = [0] * m_sub
    for k, a in enumerate(chi.mult):
        out[k % m_sub] += a
    return CharacterVec(m_sub, tuple(out))


def induce(psi: CharacterVec, m: int) -> CharacterVec:
    """Induction from the subgroup of order psi.m to the cyclic group of order m."""
    if psi.m < 1 or m % psi.m:
        raise DomainError(f"{psi.m} does not divide {m}")
    return CharacterVec(m, tuple(psi.mult[k % psi.m] for k in range(m)))


def fpf_criterion(chi: CharacterVec) -> bool:
    """True iff no nontrivial element of the group fixes a nonzero vector."""
    if not chi.is_genuine:
        raise DomainError("fpf_criterion needs a genuine character")
    for m_sub in divisors(chi.m):
        if m_sub > 1 and restrict(chi, m_sub).mult[0]:
            return False
    return True


def twist(chi: CharacterVec, w: int) -> CharacterVec:
    """omega * chi^{-1}, with omega = chi_w."""
    return CharacterVec(chi.m, tuple(chi.mult[(w - j) % chi.m] for j in range(chi.m)))


@dataclass(frozen=True)
class MirrorRelation:
    """The relation  twist(chi(A_S^T)) - chi(A_T^S) = rhs."""

    m: int
    w: int
    rhs: CharacterVec

    def solve_AT_S(self, chi_AS_T: CharacterVec) -> CharacterVec:
        out = twist(chi_AS_T, self.w) - self.rhs
        if not out.is_genuine:
            raise DomainError(f"inconsistent input: solved character {out} is not genuine")
        return out

    def solve_AS_T(self, chi_AT_S: CharacterVec) -> CharacterVec:
        out = twist(chi_AT_S + self.rhs, self.w)
        if not out.is_genuine:
            raise DomainError(f"inconsistent input: solved character {out} is not genuine")
        return out


def mirror_identity(r, m, w=1, s_split=0, s_inert=0, t_split=0, t_inert=0) -> MirrorRelation:
    """Right-hand side r*reg + omega - 1 + |S_inert| 1 + |S_split| reg - |T_split| reg - |T_inert| omega."""
    reg, one, omega = CharacterVec.regular(m), CharacterVec.trivial(m), CharacterVec.basis(m, w)
    rhs = r * reg + omega - one + s_inert * one + s_split * reg - t_split * reg - t_inert * omega
    return MirrorRelation(m, w % m, rhs)


@dataclass(frozen=True)
class KochShafarevichResult:
    rank: int
    h2_bound: int

    @property
    def free(self) -> bool:
        return self.h2_bound == 0


def koch_shafarevich(r1, r2, S, T, dpA_TS, local_degree_sum) -> KochShafarevichResult:
    """Generator rank of G_S^T and the bound on d_p H^2 (K containing zeta_p)."""
    rank = dpA_TS + S - T - (r1 + r2) + local_degree_sum
    return KochShafarevichResult(rank, dpA_TS + S - 1)


def reversal_lower_bound(r1, r2, S, T) -> int:
    """Lower bound on d_p A_T^S obtained by reading the rank formula with S and T swapped."""
    return max(0, T - (r1 + r2 + S))


@dataclass(frozen=True)
class RealizabilityVerdict:
    embeddable: bool
    ambient: CharacterVec
    binding_index: int
    needed: int
    available: int


def realizability_check(d, m, deg_K0p, p, n) -> RealizabilityVerdict:
    """Can every character of degree d of the order-m group embed in chi(F/F_2)?

    chi(F/F_2) = (deg/2) p^n reg + 1.  The worst candidate is d * chi_k for
    the index k with the smallest ambient multiplicity.
    """
    if deg_K0p % 2:
        raise DomainError("the degree of a totally imaginary field is even")
    ambient = (deg_K0p // 2) * p**n * CharacterVec.regular(m) + CharacterVec.trivial(m)
    k = min(range(m), key=lambda i: (ambient.mult[i], -i))
    available = ambient.mult[k]
    return RealizabilityVerdict(d <= available, ambient, k, d, available)


def embeds(chi: CharacterVec, ambient: CharacterVec) -> bool:
    chi._check(ambient)
    return all(a <= b for a, b in zip(chi.mult, ambient.mult))


def genus_bound(S: int, dp_units: int) -> int:
    return S - 1 + dp_units


def mu_lower_bound(S: int, r2: int) -> int:
    return max(0, S - r2)


def primitive_root_of_unity(m: int, p: int) -> int:
    """Smallest residue of exact multiplicative order m modulo p."""
    if (p - 1) % m:
        raise DomainError(f"{m} does not divide {p} - 1")
    primes = list(factorize(m)) if m > 1 else []
    for e in range(1, p):
        if pow(e, m, p) == 1 and all(pow(e, m // q, p) != 1 for q in primes):
            return e
    raise AssertionError("unreachable")


def character_of_action(M, p: int, m: int) -> CharacterVec:
    """Eigen-multiplicities of an order-m matrix over F_p (m | p - 1)."""
    eps = primitive_root_of_unity(m, p)
    d = len(M)
    mult = []
    for k in range(m):
        lam = pow(eps, k, p)
        shifted = [[(M[i][j] - (lam if i == j else 0)) % p for j in range(d)] for i in range(d)]
        mult.append(d - rank_mod_p(shifted, p) if d else 0)
    if sum(mult) != d:
        raise DomainError("matrix is not diagonalisable over F_p with eigenvalues of order dividing m")
    return CharacterVec(m, tuple(mult))
