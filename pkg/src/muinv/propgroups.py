"""Finite quotients of uniform pro-p groups and their automorphisms.

Groups are given in coordinates ``g = e_0^{g_0} e_1^{g_1} ... e_{d-1}^{g_{d-1}}``
where coordinate ``j`` is read modulo ``p^{prec_j}``.  The coordinate
groups used here have a central-series shape: the elements with zero
coordinates before ``j`` form a normal subgroup ``G_j``, coordinate ``j``
is additive on ``G_j``, and ``[G_i, G_j]`` lies in ``G_{max(i,j)+1}``.
This makes echelon bases (induced pc-sequences) and sifting available.

The main family is ``Gamma(s) = <x, y, z | [x, y] = z^{p^s}, z central>`` in
normal form ``x^a y^b z^c`` with product
``(a1, b1, c1)(a2, b2, c2) = (a1 + a2, b1 + b2, c1 + c2 - p^s a2 b1)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ._linalg import det_mod_p, identity, matmul_mod, nullspace_mod_p, rank_mod_p
from .errors import DomainError, ResourceError, UnsupportedError
from .padic import PadicInt, hensel_lift

ENUMERATION_CAP = 2**24


# --- coordinate groups --------------------------------------------------------


class CoordGroup:
    """Base class: a finite p-group in central-series coordinates."""

    name = "coord"

    def __init__(self, p: int, precs):
        self.p = p
        self.precs = tuple(precs)
        self.mods = tuple(p**k for k in self.precs)
        self.d = len(self.precs)

    def normalize(self, g):
        return tuple(x % m for x, m in zip(g, self.mods))

    def identity(self):
        return (0,) * self.d

    def generators(self):
        return [tuple(int(i == j) for i in range(self.d)) for j in range(self.d)]

    def mul(self, g, h):  # pragma: no cover - abstract
        raise NotImplementedError

    def inv(self, g):  # pragma: no cover - abstract
        raise NotImplementedError

    def pow(self, g, k: int):
        if k < 0:
            g, k = self.inv(g), -k
        result, base = self.identity(), g
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def comm(self, g, h):
        """[g, h] = g h g^-1 h^-1."""
        return self.mul(self.mul(g, h), self.inv(self.mul(h, g)))

    def conj(self, g, h):
        """g h g^-1."""
        return self.mul(self.mul(g, h), self.inv(g))

    @property
    def log_order(self) -> int:
        return sum(self.precs)

    def elements(self):
        if self.p**self.log_order > ENUMERATION_CAP:
            raise ResourceError("group too large to enumerate")
        return itertools.product(*[range(m) for m in self.mods])

    def relations_hold(self, images) -> bool:
        """Do the given generator images satisfy the defining relations?"""
        raise NotImplementedError  # pragma: no cover

    def compose_word(self, images, g):
        """prod images[j]^{g_j} in coordinate order."""
        out = self.identity()
        for im, e in zip(images, g):
            if e:
                out = self.mul(out, self.pow(im, e))
        return out

    def with_precision(self, N):  # pragma: no cover - abstract
        raise NotImplementedError


class AbelianGroup(CoordGroup):
    """(Z/p^N)^d, a finite quotient of Z_p^d."""

    name = "abelian"

    def __init__(self, p: int, d: int, N: int):
        super().__init__(p, [N] * d)
        self.N = N

    def mul(self, g, h):
        return tuple((a + b) % m for a, b, m in zip(g, h, self.mods))

    def inv(self, g):
        return tuple(-a % m for a, m in zip(g, self.mods))

    def pow(self, g, k):
        return tuple(a * k % m for a, m in zip(g, self.mods))

    def relations_hold(self, images):
        return all(self.mul(a, b) == self.mul(b, a) for a in images for b in images)

    def with_precision(self, N):
        return AbelianGroup(self.p, self.d, N)

    def __repr__(self):
        return f"AbelianGroup(p={self.p}, d={self.d}, N={self.N})"


class GammaGroup(CoordGroup):
    """Gamma(s) modulo p^N in every coordinate (or p^c_prec in the central one)."""

    name = "gamma"

    def __init__(self, p: int, s: int, N: int, c_prec: int | None = None):
        super().__init__(p, [N, N, N if c_prec is None else c_prec])
        self.s, self.N, self.c_prec = s, N, c_prec
        self.ps = p**s

    def mul(self, g, h):
        a1, b1, c1 = g
        a2, b2, c2 = h
        ma, mb, mc = self.mods
        return ((a1 + a2) % ma, (b1 + b2) % mb, (c1 + c2 - self.ps * a2 * b1) % mc)

    def inv(self, g):
        a, b, c = g
        ma, mb, mc = self.mods
        return (-a % ma, -b % mb, (-c - self.ps * a * b) % mc)

    def pow(self, g, k):
        if k < 0:
            return self.pow(self.inv(g), -k)
        a, b, c = g
        ma, mb, mc = self.mods
        return (a * k % ma, b * k % mb, (c * k - self.ps * a * b * (k * (k - 1) // 2)) % mc)

    def relations_hold(self, images):
        X, Y, Z = images
        e = self.identity()
        return (
            self.comm(X, Y) == self.pow(Z, self.ps)
            and self.comm(X, Z) == e
            and self.comm(Y, Z) == e
        )

    def with_precision(self, N):
        return GammaGroup(self.p, self.s, N, self.c_prec)

    def __repr__(self):
        extra = f", c_prec={self.c_prec}" if self.c_prec is not None else ""
        return f"GammaGroup(p={self.p}, s={self.s}, N={self.N}{extra})"


# --- elements of Gamma(s) as values ----------------------------------------------


@dataclass(frozen=True)
class GammaElement:
    p: int
    s: int
    N: int
    a: int
    b: int
    c: int

    @property
    def group(self):
        return GammaGroup(self.p, self.s, self.N)

    @property
    def coords(self):
        return (self.a, self.b, self.c)

    @classmethod
    def of(cls, G: GammaGroup, g):
        a, b, c = G.normalize(g)
        return cls(G.p, G.s, G.N, a, b, c)

    def padic_coords(self):
        return tuple(PadicInt(self.p, self.N, x) for x in self.coords)

    def _params(self, other):
        if (self.p, self.s, self.N) != (other.p, other.s, other.N):
            raise DomainError("elements of different groups")

    def __mul__(self, other):
        self._params(other)
        return GammaElement.of(self.group, self.group.mul(self.coords, other.coords))


def gamma_mul(g: GammaElement, h: GammaElement) -> GammaElement:
    return g * h


def gamma_inv(g: GammaElement) -> GammaElement:
    return GammaElement.of(g.group, g.group.inv(g.coords))


def gamma_pow(g: GammaElement, k) -> GammaElement:
    k = int(k.residue) if isinstance(k, PadicInt) else int(k)
    return GammaElement.of(g.group, g.group.pow(g.coords, k))


# --- subgroups via echelon bases ------------------------------------------------------


def _vp_mod(x, p, cap):
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


class Subgroup:
    """A subgroup of a coordinate group given by an echelon basis.

    ``basis[j] = (h, v)`` means h has zero coordinates before j and
    ``h_j = p^v``.  Every element is uniquely a product
    ``prod_j basis[j]^{e_j}`` with ``0 <= e_j < p^(prec_j - v)``.
    """

    def __init__(self, G: CoordGroup, basis: dict):
        self.G = G
        self.basis = dict(basis)

    @classmethod
    def generated(cls, G, gens, normal=False):
        H = cls(G, {})
        H._close(list(gens), normal)
        return H

    @classmethod
    def whole(cls, G):
        return cls.generated(G, G.generators())

    @classmethod
    def congruence(cls, G, k):
        """Elements with every coordinate divisible by p^k (normal in the groups used here)."""
        basis = {}
        for j in range(G.d):
            if k < G.precs[j]:
                e = [0] * G.d
                e[j] = G.p**k
                basis[j] = (tuple(e), k)
        return cls(G, basis)

    def _lead(self, g):
        for j, (x, m) in enumerate(zip(g, self.G.mods)):
            if x % m:
                return j
        return None

    def sift(self, g):
        """Return (residual, exponents); residual is identity iff g is in the subgroup."""
        G = self.G
        g = G.normalize(g)
        exps = {}
        while True:
            j = self._lead(g)
            if j is None:
                return g, exps
            if j not in self.basis:
                return g, exps
            h, v = self.basis[j]
            pv = G.p**v
            if g[j] % pv:
                return g, exps
            e = g[j] // pv
            g = G.mul(G.pow(h, -e), g)
            exps[j] = e

    def contains(self, g) -> bool:
        return self._lead(self.sift(g)[0]) is None

    def _insert(self, r, queue, normal):
        G, p = self.G, self.G.p
        j = self._lead(r)
        v = _vp_mod(r[j], p, G.precs[j])
        unit = (r[j] // p**v) % G.mods[j]
        r = G.pow(r, pow(unit, -1, G.mods[j]))
        if j in self.basis:
            queue.append(self.basis[j][0])
        self.basis[j] = (r, v)
        queue.append(G.pow(r, p ** (G.precs[j] - v)))
        for k, (b, _) in self.basis.items():
            if k != j:
                queue.append(G.comm(r, b))
        if normal:
            for x in G.generators():
                queue.append(G.comm(x, r))

    def _close(self, queue, normal):
        G = self.G
        while True:
            while queue:
                r, _ = self.sift(queue.pop())
                if self._lead(r) is not None:
                    self._insert(r, queue, normal)
            # verify the closure relations of the final basis
            items = list(self.basis.values())
            for i, (h, v) in enumerate(items):
                j = self._lead(h)
                queue.append(G.pow(h, G.p ** (G.precs[j] - v)))
                for b, _ in items[i + 1 :]:
                    queue.append(G.comm(h, b))
                if normal:
                    for x in G.generators():
                        queue.append(G.comm(x, h))
            queue = [q for q in queue if self._lead(self.sift(q)[0]) is not None]
            if not queue:
                return

    @property
    def log_order(self) -> int:
        return sum(self.G.precs[j] - v for j, (_, v) in self.basis.items())

    @property
    def order(self) -> int:
        return self.G.p**self.log_order

    def index_log(self) -> int:
        return self.G.log_order - self.log_order

    def lead_valuations(self):
        """Per coordinate: v if a basis element leads there, else prec (nothing)."""
        return tuple(self.basis[j][1] if j in self.basis else self.G.precs[j] for j in range(self.G.d))

    def canonical(self, g):
        """Canonical representative of the coset g*H (H normal)."""
        G, p = self.G, self.G.p
        g = G.normalize(g)
        for j in range(G.d):
            if j in self.basis:
                h, v = self.basis[j]
                e = g[j] // p**v
                if e:
                    g = G.mul(g, G.pow(h, -e))
        return g

    def box(self):
        """If the subgroup is {g : p^alpha_j | g_j for all j}, return alpha; else None."""
        alpha = self.lead_valuations()
        G = self.G
        for j, a in enumerate(alpha):
            if a < G.precs[j]:
                e = [0] * G.d
                e[j] = G.p**a
                if not self.contains(tuple(e)):
                    return None
        # the box has the same order as the subgroup iff equal
        box_log = sum(prec - a for prec, a in zip(G.precs, alpha))
        return alpha if box_log == self.log_order else None

    def basis_elements(self):
        return [self.basis[j][0] for j in sorted(self.basis)]

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.log_order == other.log_order
            and all(other.contains(b) for b in self.basis_elements())
        )

    def __repr__(self):
        return f"Subgroup(order=p^{self.log_order}, leads={self.lead_valuations()})"


# --- p-central and lower central series -------------------------------------------------


def p_central_series(G: CoordGroup, n: int):
    """[Gamma_1, ..., Gamma_n] by closure: Gamma_{i+1} = Gamma_i^p [Gamma, Gamma_i]."""
    series = [Subgroup.whole(G)]
    for _ in range(n - 1):
        cur = series[-1]
        gens = []
        for b in cur.basis_elements():
            gens.append(G.pow(b, G.p))
            for x in G.generators():
                gens.append(G.comm(x, b))
        series.append(Subgroup.generated(G, gens, normal=True))
    return series


def default_precision(G_or_s, n: int) -> int:
    s = G_or_s if isinstance(G_or_s, int) else getattr(G_or_s, "s", 0)
    return n + s + 3


class FiniteQuotient:
    """G / H for a normal subgroup H, with canonical coset representatives."""

    def __init__(self, G: CoordGroup, H: Subgroup, level: int | None = None, label: str = ""):
        self.G, self.H, self.level, self.label = G, H, level, label
        self.box_sizes = tuple(G.p**v for v in H.lead_valuations())

    @property
    def p(self):
        return self.G.p

    @property
    def log_order(self) -> int:
        return self.H.index_log()

    @property
    def order(self) -> int:
        return self.G.p**self.log_order

    def canonical(self, g):
        return self.H.canonical(g)

    def mul(self, g, h):
        return self.canonical(self.G.mul(g, h))

    def inv(self, g):
        return self.canonical(self.G.inv(g))

    def identity(self):
        return self.G.identity()

    def is_identity(self, g):
        return self.H.contains(g)

    def elements(self):
        if self.order > ENUMERATION_CAP:
            raise ResourceError(f"quotient of order {self.order} exceeds the enumeration cap")
        return [tuple(t) for t in itertools.product(*[range(m) for m in self.box_sizes])]

    def __repr__(self):
        return f"FiniteQuotient({self.label or self.G!r}, order={self.order})"


def quotient_by_level(G: CoordGroup, n: int, verify: bool = True) -> FiniteQuotient:
    """The quotient Gamma/Gamma_{n+1} (so n = 1 gives Gamma/Gamma_2).

    ``G`` fixes the group family; the working precision is raised if needed
    and, with ``verify``, the index is recomputed at one more digit.
    """
    N = max(getattr(G, "N", 0), default_precision(G, n + 1))
    G1 = G.with_precision(N)
    series = p_central_series(G1, n + 1)
    Q = FiniteQuotient(G1, series[n], n, f"{G1!r}/level {n + 1}")
    if verify:
        G2 = G.with_precision(N + 1)
        other = p_central_series(G2, n + 1)[n]
        if other.index_log() != Q.log_order:
            raise ResourceError("p-central series index is not stable under a precision increase")
    return Q


def congruence_quotient(G: CoordGroup, k: int) -> FiniteQuotient:
    """Coordinates modulo p^k."""
    G1 = G.with_precision(max(k, getattr(G, "N", k)))
    return FiniteQuotient(G1, Subgroup.congruence(G1, k), None, f"{G1!r} mod p^{k}")


def series_closed_form(G: CoordGroup, n: int):
    """Lead valuations (box exponents) of Gamma_1..Gamma_n, when each is a box."""
    N = max(getattr(G, "N", 0), default_precision(G, n))
    series = p_central_series(G.with_precision(N), n)
    return [S.box() for S in series]


# --- uniformity --------------------------------------------------------------------------


@dataclass
class UniformityResult:
    uniform: bool
    witness: object = None
    reason: str = ""
    slice_dims: tuple = ()


def _slice_coords(alpha_i, alpha_next, g, p):
    return [(g[j] // p**a) % p for j, (a, b) in enumerate(zip(alpha_i, alpha_next)) if a < b]


def uniformity_check(G: CoordGroup, n_max: int) -> UniformityResult:
    """Check powerfulness and that x -> x^p maps each slice bijectively onto the next."""
    p = G.p
    N = max(getattr(G, "N", 0), default_precision(G, n_max + 2))
    G1 = G.with_precision(N)
    series = p_central_series(G1, n_max + 2)
    boxes = [S.box() for S in series]
    if any(b is None for b in boxes):
        raise UnsupportedError("p-central series terms are not coordinate boxes")
    dims = tuple(S.log_order - T.log_order for S, T in zip(series, series[1:]))
    # powerful: generator commutators lie in the subgroup generated by p-th powers
    Q1 = FiniteQuotient(G1, series[1])
    powers = Subgroup.generated(G1, [G1.pow(t, p) for t in Q1.elements()], normal=False)
    gens = G1.generators()
    for i, x in enumerate(gens):
        for y in gens[i + 1 :]:
            c = G1.comm(x, y)
            if not powers.contains(c):
                return UniformityResult(False, (x, y), "commutator of generators outside Gamma^p", dims)
    for i in range(min(n_max, len(series) - 2)):
        a_i, a_n, a_nn = boxes[i], boxes[i + 1], boxes[i + 2]
        if dims[i] != dims[i + 1]:
            # find a slice element whose p-th power dies in the next slice
            witness = _pth_power_kernel(G1, a_i, a_n, a_nn)
            return UniformityResult(False, witness, f"slice dimensions differ at level {i + 1}", dims)
        rows = []
        for j, (a, b) in enumerate(zip(a_i, a_n)):
            if a < b:
                e = [0] * G1.d
                e[j] = p**a
                rows.append(_slice_coords(a_n, a_nn, G1.pow(tuple(e), p), p))
        if rank_mod_p(rows, p) != dims[i + 1]:
            return UniformityResult(False, _pth_power_kernel(G1, a_i, a_n, a_nn), "p-power map not bijective", dims)
    return UniformityResult(True, None, "", dims)


def _pth_power_kernel(G, a_i, a_n, a_nn):
    p = G.p
    for j, (a, b) in enumerate(zip(a_i, a_n)):
        if a < b:
            e = [0] * G.d
            e[j] = p**a
            g = tuple(e)
            img = G.pow(g, p)
            if not any(_slice_coords(a_n, a_nn, img, p)):
                return g
    return None


# --- automorphisms ------------------------------------------------------------------------


class GroupAutomorphism:
    """An endomorphism of a coordinate group given by the images of the unit generators."""

    def __init__(self, G: CoordGroup, images, name: str = "sigma"):
        self.G = G
        self.images = [G.normalize(im) for im in images]
        self.name = name

    def __call__(self, g):
        return self.G.compose_word(self.images, g)

    def compose(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        """self after other."""
        return GroupAutomorphism(self.G, [self(im) for im in other.images], f"{self.name}*{other.name}")

    def power(self, k: int) -> "GroupAutomorphism":
        out = identity_automorphism(self.G)
        for _ in range(k):
            out = self.compose(out)
        return out

    def order(self, bound: int = 10_000) -> int:
        gens = self.G.generators()
        cur = list(self.images)
        for k in range(1, bound + 1):
            if cur == gens:
                return k
            cur = [self(g) for g in cur]
        raise DomainError(f"automorphism order exceeds {bound}")

    def is_well_defined(self) -> bool:
        """Relations preserved and images generate the group."""
        if not self.G.relations_hold(self.images):
            return False
        return Subgroup.generated(self.G, self.images).log_order == self.G.log_order

    def conjugated_by(self, g) -> "GroupAutomorphism":
        """c_g o self o c_g^{-1}, with c_g(h) = g h g^-1."""
        G = self.G
        ginv = G.inv(g)
        return GroupAutomorphism(G, [G.conj(g, self(G.conj(ginv, e))) for e in G.generators()], f"{self.name}^g")

    def with_group(self, G):
        return GroupAutomorphism(G, self.images, self.name)


def identity_automorphism(G):
    return GroupAutomorphism(G, G.generators(), "id")


def teichmuller_cube_root(p: int, N: int) -> int:
    """The primitive cube root of unity in Z_p (mod p^N) with smallest residue mod p."""
    if p % 3 != 1:
        raise DomainError(f"p = {p} is not 1 mod 3")
    r0 = min(r for r in range(2, p) if (r * r + r + 1) % p == 0)
    return int(hensel_lift([1, 1, 1], r0, p, N).residue)


def sigma_gamma(p: int, s: int, N: int) -> GroupAutomorphism:
    """x -> x^zeta, y -> y^zeta, z -> z^(zeta^2)."""
    G = GammaGroup(p, s, N)
    zeta = teichmuller_cube_root(p, N)
    mod = p**N
    return GroupAutomorphism(G, [(zeta, 0, 0), (0, zeta, 0), (0, 0, zeta * zeta % mod)], "sigma")


def sigma_relation_mod_level(p: int, s: int, n: int, N: int | None = None) -> bool:
    """sigma_n([x, y]) == z^(zeta^2 p^s) modulo Gamma_n, with zeta truncated at p^n."""
    N = N or default_precision(s, n)
    G = GammaGroup(p, s, N)
    zeta = teichmuller_cube_root(p, N)
    t = zeta % p**n
    sig = GroupAutomorphism(G, [(t, 0, 0), (0, t, 0), (0, 0, t * t)])
    lhs = sig(G.comm((1, 0, 0), (0, 1, 0)))
    rhs = G.pow((0, 0, 1), (zeta * zeta % p**n) * p**s)
    Gn = p_central_series(G, n)[-1]
    return Gn.contains(G.mul(lhs, G.inv(rhs)))


# --- fixed points -------------------------------------------------------------------------


@dataclass
class FixedPointResult:
    order: int
    mode: str
    elements: list | None = None
    slice_dims: tuple = ()

    @property
    def trivial(self) -> bool:
        return self.order == 1


def _check_invariant(Q: FiniteQuotient, sigma: GroupAutomorphism):
    for b in Q.H.basis_elements():
        if not Q.H.contains(sigma(b)):
            raise DomainError("automorphism does not preserve the normal subgroup")


def order_on_quotient(Q: FiniteQuotient, sigma: GroupAutomorphism, bound: int = 100_000) -> int:
    """Order of the automorphism induced on Q."""
    sigma = sigma.with_group(Q.G)
    gens = [Q.canonical(g) for g in Q.G.generators()]
    cur = [Q.canonical(im) for im in sigma.images]
    for k in range(1, bound + 1):
        if cur == gens:
            return k
        cur = [Q.canonical(sigma(g)) for g in cur]
    raise DomainError(f"automorphism order on the quotient exceeds {bound}")


def fixed_points(Q: FiniteQuotient, sigma: GroupAutomorphism, mode: str = "exhaustive", levels: int | None = None):
    """Fix(Q, sigma) exhaustively, or by kernels of sigma - 1 on the p-central slices.

    The algebraic count multiplies slice kernel sizes, which is valid when
    the order of sigma on Q is prime to p; other automorphisms are refused.
    """
    sigma = sigma.with_group(Q.G)
    if mode == "exhaustive":
        _check_invariant(Q, sigma)
        fixed = [g for g in Q.elements() if Q.canonical(sigma(g)) == g]
        return FixedPointResult(len(fixed), mode, fixed)
    if mode != "algebraic":
        raise DomainError(f"unknown mode {mode!r}")
    # the slice count is exact only for coprime actions, where H^1 of each slice vanishes
    if order_on_quotient(Q, sigma) % Q.p == 0:
        raise UnsupportedError("algebraic mode needs an automorphism of order prime to p")
    n = levels if levels is not None else Q.level + 1
    G = Q.G
    series = p_central_series(G, n)
    boxes = [S.box() for S in series]
    if any(b is None for b in boxes):
        raise UnsupportedError("algebraic mode needs box-shaped p-central series terms")
    p = G.p
    dims = []
    for a_i, a_n in zip(boxes, boxes[1:]):
        rows = []
        for j, (a, b) in enumerate(zip(a_i, a_n)):
            if a < b:
                e = [0] * G.d
                e[j] = p**a
                rows.append(_slice_coords(a_i, a_n, sigma(tuple(e)), p))
        k = len(rows)
        M_minus = [[(rows[i][j] - (i == j)) % p for j in range(k)] for i in range(k)]
        dims.append(k - rank_mod_p(M_minus, p) if k else 0)
    return FixedPointResult(p ** sum(dims), mode, None, tuple(dims))


def slice_matrix(G: CoordGroup, sigma: GroupAutomorphism, level: int = 1):
    """Matrix (row convention) of sigma on Gamma_level / Gamma_{level+1}."""
    sigma = sigma.with_group(G)
    series = p_central_series(G, level + 1)
    a_i, a_n = series[level - 1].box(), series[level].box()
    if a_i is None or a_n is None:
        raise UnsupportedError("slice is not box-shaped")
    p = G.p
    rows = []
    for j, (a, b) in enumerate(zip(a_i, a_n)):
        if a < b:
            e = [0] * G.d
            e[j] = p**a
            rows.append(_slice_coords(a_i, a_n, sigma(tuple(e)), p))
    return rows


# --- matrices over F_p -----------------------------------------------------------------------


def matrix_order(M, p, bound=None):
    d = len(M)
    bound = bound or p ** (d * d)
    I = identity(d)
    cur = [[x % p for x in r] for r in M]
    for k in range(1, bound + 1):
        if cur == I:
            return k
        cur = matmul_mod(cur, M, p)
    raise DomainError("matrix order exceeds bound")


def fpf_charpoly_test(M, p: int) -> bool:
    """P_M(1) != 0, i.e. det(I - M) != 0 over F_p."""
    d = len(M)
    if det_mod_p(M, p) == 0:
        raise DomainError("matrix is singular")
    if matrix_order(M, p) % p == 0:
        raise DomainError("matrix order is divisible by p")
    I_minus = [[(int(i == j) - M[i][j]) % p for j in range(d)] for i in range(d)]
    return det_mod_p(I_minus, p) != 0


def fixed_vectors(M, p):
    """Basis of ker(M - I) (column convention)."""
    d = len(M)
    return nullspace_mod_p([[(M[i][j] - (i == j)) % p for j in range(d)] for i in range(d)], p)


def _monic_divisors(target, p, max_deg):
    """Monic polynomials (constant term first) of degree 1..max_deg dividing target over F_p."""
    out = []
    for deg in range(1, max_deg + 1):
        for tail in itertools.product(range(p), repeat=deg):
            poly = list(tail) + [1]
            if not any(_polyrem(target, poly, p)):
                out.append(tuple(poly))
    return out


def _polyrem(a, b, p):
    a = [x % p for x in a]
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            for j, y in enumerate(b):
                a[i - db + j] = (a[i - db + j] - c * y) % p
    return a[:db]


def companion(poly):
    """Companion matrix of a monic polynomial (constant term first)."""
    k = len(poly) - 1
    C = [[0] * k for _ in range(k)]
    for i in range(1, k):
        C[i][i - 1] = 1
    for i in range(k):
        C[i][k - 1] = -poly[i]
    return C


def block_diag(blocks, p):
    d = sum(len(b) for b in blocks)
    M = [[0] * d for _ in range(d)]
    o = 0
    for B in blocks:
        for i, r in enumerate(B):
            for j, x in enumerate(r):
                M[o + i][o + j] = x % p
        o += len(B)
    return M


@dataclass
class Order3Certificate:
    p: int
    d: int
    classes: list  # (invariant factors, fixed-point-free?)

    @property
    def fpf_exists(self) -> bool:
        return any(f for _, f in self.classes)


def no_fpf_order3_search(p: int, d: int = 3) -> Order3Certificate:
    """Scan conjugacy classes of order-3 elements of GL_d(F_p) by rational canonical form."""
    if p not in (2, 5, 7, 11, 13) or p == 3:
        raise UnsupportedError("supported primes: 2, 5 (and 7, 11, 13 as sanity checks)")
    if d < 1 or d > 4:
        raise UnsupportedError("dimension must be between 1 and 4")
    target = [-1, 0, 0, 1]  # x^3 - 1
    divs = _monic_divisors(target, p, d)
    classes = []

    def chains(prefix, remaining):
        if remaining == 0:
            yield list(prefix)
            return
        for q in divs:
            deg = len(q) - 1
            if deg > remaining:
                continue
            if prefix and any(_polyrem(list(q), list(prefix[-1]), p)):
                continue
            yield from chains(prefix + [q], remaining - deg)

    for chain in chains([], d):
        if chain[-1] == tuple(x % p for x in (-1, 1)):
            continue  # identity
        M = block_diag([companion(q) for q in chain], p)
        if matrix_order(M, p) != 3:
            continue
        classes.append((tuple(chain), fpf_charpoly_test(M, p)))
    return Order3Certificate(p, d, classes)


# --- semidirect products and Frobenius groups -------------------------------------------------


@dataclass
class FrobeniusResult:
    ok: bool
    centralizers_trivial: bool
    complements_conjugate: bool
    complements: int
    witness: object = None


def frobenius_check(Q: FiniteQuotient, sigma: GroupAutomorphism, m: int) -> FrobeniusResult:
    """Exhaustive Frobenius-group checks on Q x| <sigma> with <sigma> cyclic of order m."""
    G = Q.G
    sigma = sigma.with_group(G)
    if m % Q.p == 0:
        raise DomainError("m must be prime to p")
    _check_invariant(Q, sigma)
    elems = Q.elements()
    # sigma^i on canonical representatives
    tables = [{g: g for g in elems}]
    sig = {g: Q.canonical(sigma(g)) for g in elems}
    for _ in range(1, m):
        prev = tables[-1]
        tables.append({g: sig[prev[g]] for g in elems})
    if any(sig[tables[m - 1][g]] != g for g in elems):
        raise DomainError(f"sigma does not have order dividing {m} on the quotient")
    ident = Q.identity()
    # (i) centralizer of (g, sigma^i), i != 0, inside Q is trivial
    witness = None
    for i in range(1, m):
        t = tables[i]
        for g in elems:
            ginv = Q.inv(g)
            for h in elems:
                if h != ident and Q.mul(Q.mul(g, t[h]), ginv) == h:
                    witness = ((g, i), h)
                    break
            if witness:
                break
        if witness:
            break
    central_ok = witness is None
    # (ii) complements: g with (g, sigma)^m = 1 versus conjugates h sigma(h)^-1
    def power_m(g):
        # (g, s)^m = g s(g) s^2(g) ... s^(m-1)(g)
        acc = ident
        for i in range(m):
            acc = Q.mul(acc, tables[i][g])
        return acc

    comps = {g for g in elems if power_m(g) == ident}
    orbit = {Q.mul(h, Q.inv(sig[h])) for h in elems}
    conj_ok = comps == orbit
    if not conj_ok and witness is None:
        witness = ("non-conjugate complement", sorted(comps - orbit)[:1])
    return FrobeniusResult(central_ok and conj_ok, central_ok, conj_ok, len(comps), witness)


def nilpotency_class(Q: FiniteQuotient) -> int:
    """Length of the lower central series of Q."""
    G, H = Q.G, Q.H
    if Q.log_order == 0:
        return 0
    cur = Subgroup.whole(G)
    c = 0
    while cur.log_order > H.log_order:
        gens = list(H.basis_elements())
        for b in cur.basis_elements():
            for x in G.generators():
                gens.append(G.comm(x, b))
        nxt = Subgroup.generated(G, gens, normal=True)
        c += 1
        if nxt.log_order == cur.log_order:
            raise DomainError("lower central series does not reach the identity (not nilpotent)")
        cur = nxt
    return c


# --- matrix one-units ----------------------------------------------------------------------


class OneUnitMatrix:
    """The group 1 + p M_n(Z_p) modulo p^N."""

    def __init__(self, p: int, n: int, N: int):
        if p == 2:
            raise UnsupportedError("use 1 + 4 M_n(Z_2) for p = 2")
        self.p, self.n, self.N = p, n, N
        self.mod = p**N

    def element(self, M):
        M = [[x % self.mod for x in r] for r in M]
        for i in range(self.n):
            for j in range(self.n):
                if (M[i][j] - (i == j)) % self.p:
                    raise DomainError("not congruent to the identity mod p")
        return M

    def mul(self, A, B):
        return matmul_mod(A, B, self.mod)

    def identity(self):
        return identity(self.n)

    def pow(self, A, k):
        result, base = self.identity(), A
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def p_power_slice_bijective(self, i: int) -> bool:
        """x -> x^p induces a bijection (1 + p^i M)/(1 + p^{i+1} M) -> (1 + p^{i+1} M)/(1 + p^{i+2} M)."""
        if i + 2 > self.N:
            raise DomainError("precision too small for this slice")
        p, n = self.p, self.n
        rows = []
        for a in range(n):
            for b in range(n):
                E = identity(n)
                E[a][b] = (E[a][b] + p**i) % self.mod
                P = self.pow(E, p)
                rows.append(
                    [((P[r][c] - (r == c)) // p ** (i + 1)) % p for r in range(n) for c in range(n)]
                )
        return rank_mod_p(rows, p) == n * n


def make_group(kind: str, p: int, s: int = 0, N: int = 4, d: int = 3) -> CoordGroup:
    if kind == "gamma":
        return GammaGroup(p, s, N)
    if kind == "abelian":
        return AbelianGroup(p, d, N)
    raise DomainError(f"unknown group kind {kind!r}")
