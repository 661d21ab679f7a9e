"""Finitely generated modules over the Iwasawa algebra Lambda = Z_p[[T]].

Elements of Lambda are handled as truncated series modulo ``(p^N, T^M)``.
A module is a finite presentation ``Lambda^r / (relations)``.  For
``Gamma = Z_p`` with topological generator ``1 + T`` the coinvariants at
level ``n`` are ``X / omega_n X`` with ``omega_n = (1 + T)^{p^n} - 1``, and
their sizes are computed exactly by linear algebra over ``Z/p^k``.

Growth is modelled as ``dim_Fp X_n = r p^n + c`` and
``log_p |X_n / p^n| = mu p^n + lambda n + nu`` on a stable tail of levels.
"""

from __future__ import annotations

import ast
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._linalg import local_snf_valuations, rank_mod_p
from .errors import DomainError, ResourceError
from .padic import PadicInt

DEFAULT_N = 24
DEFAULT_M = 64
LEVEL_CAP = 2048  # largest p^n handled by coinvariant_growth


class PrecisionError(ResourceError):
    """The working precision is too small to decide the question."""


def _vp(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class LambdaSeries:
    """sum c_i T^i modulo (p^N, T^M); coefficients stored as integers in [0, p^N)."""

    p: int
    N: int
    M: int
    coeffs: tuple

    def __post_init__(self):
        mod = self.p**self.N
        c = [int(x) % mod for x in self.coeffs][: self.M]
        c += [0] * (self.M - len(c))
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_poly(cls, p, poly, N=DEFAULT_N, M=DEFAULT_M):
        return cls(p, N, M, tuple(poly))

    @classmethod
    def one(cls, p, N=DEFAULT_N, M=DEFAULT_M):
        return cls(p, N, M, (1,))

    @property
    def mod(self):
        return self.p**self.N

    def padic_coeffs(self):
        return [PadicInt(self.p, self.N, c) for c in self.coeffs]

    def _compat(self, other):
        if isinstance(other, int):
            return LambdaSeries(self.p, self.N, self.M, (other,))
        if other.p != self.p:
            raise DomainError("series over different primes")
        return other

    def _meet(self, other):
        return min(self.N, other.N), min(self.M, other.M)

    def __add__(self, other):
        other = self._compat(other)
        N, M = self._meet(other)
        return LambdaSeries(self.p, N, M, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return LambdaSeries(self.p, self.N, self.M, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._compat(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._compat(other)
        N, M = self._meet(other)
        mod = self.p**N
        a = np.array(self.coeffs[:M], dtype=object)
        b = np.array(other.coeffs[:M], dtype=object)
        prod = np.convolve(a, b)[:M]
        return LambdaSeries(self.p, N, M, tuple(int(x) % mod for x in prod))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LambdaSeries):
            return NotImplemented
        N, M = self._meet(other)
        mod = self.p**N
        return self.p == other.p and all((a - b) % mod == 0 for a, b in zip(self.coeffs[:M], other.coeffs[:M]))

    def __hash__(self):
        return hash((self.p, self.N, self.M, self.coeffs))

    def is_zero(self):
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        return self.coeffs[0] % self.p != 0

    def inverse(self) -> "LambdaSeries":
        if not self.is_unit():
            raise DomainError("series with non-unit constant term is not invertible")
        mod, M = self.mod, self.M
        c = self.coeffs
        inv0 = pow(c[0], -1, mod)
        out = [inv0] + [0] * (M - 1)
        for k in range(1, M):
            s = sum(c[i] * out[k - i] for i in range(1, k + 1))
            out[k] = -s * inv0 % mod
        return LambdaSeries(self.p, self.N, M, tuple(out))

    def mu(self) -> int:
        """min v_p of the coefficients (capped at N)."""
        return min(_vp(c, self.p, self.N) for c in self.coeffs)

    def shift_down(self, k: int) -> "LambdaSeries":
        """(f - (f mod T^k)) / T^k, known modulo T^(M - k)."""
        return LambdaSeries(self.p, self.N, self.M - k, self.coeffs[k:])

    def truncate(self, N=None, M=None):
        return LambdaSeries(self.p, N or self.N, M or self.M, self.coeffs)

    def __repr__(self):
        terms = [f"{c}*T^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"LambdaSeries(p={self.p}, N={self.N}, M={self.M}, {' + '.join(terms) or '0'})"


@dataclass(frozen=True)
class WeierstrassResult:
    mu: int
    lam: int
    P: tuple  # monic, constant term first, length lam + 1
    U: LambdaSeries
    precision: tuple  # (N', M') at which p^mu * P * U == f holds
    P_precision: int  # p-adic digits of P determined by f modulo T^M

    def reconstruct(self) -> LambdaSeries:
        N, M = self.precision
        p = self.U.p
        P = LambdaSeries(p, N, M, self.P)
        return LambdaSeries(p, N, M, (p**self.mu,)) * P * self.U.truncate(N, M)


def weierstrass_prepare(f: LambdaSeries) -> WeierstrassResult:
    """f = p^mu * P * U with P distinguished of degree lambda and U a unit."""
    p = f.p
    mu = f.mu()
    if mu >= f.N:
        raise PrecisionError("series is indistinguishable from 0 at the working precision")
    N1 = f.N - mu
    g = LambdaSeries(p, N1, f.M, tuple(c // p**mu for c in f.coeffs))
    lam = next((i for i, c in enumerate(g.coeffs) if c % p), None)
    if lam is None:  # pragma: no cover - excluded by the choice of mu
        raise PrecisionError("no unit coefficient within the T-truncation")
    M1 = f.M - lam
    if M1 < 1:
        raise PrecisionError("T-truncation too short for the Weierstrass degree")
    B = LambdaSeries(p, N1, M1, g.coeffs[:lam])
    C = g.shift_down(lam)
    Cinv = C.inverse()
    # q = C^-1 (1 - tau(q B)) with tau the shift by T^lam; contraction by p each step
    q = Cinv
    for _ in range(N1 + 1):
        qB = q * B
        tail = LambdaSeries(p, N1, M1, qB.coeffs[lam:])
        q_new = Cinv * (LambdaSeries.one(p, N1, M1) - tail)
        if q_new == q:
            break
        q = q_new
    low = (q * B).coeffs[:lam]
    P = tuple(low) + (1,)
    U = q.inverse()
    # T^M is p^floor(M/lam) times a polynomial modulo P, so the unseen tail of f
    # moves P only from that digit on
    p_prec = N1 if lam == 0 else min(N1, f.M // lam)
    return WeierstrassResult(mu, lam, P, U, (f.N, M1), p_prec)


# --- presentations and the expression grammar -------------------------------------------


def _poly_add(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_neg(a):
    return [-x for x in a]


def _trim(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


class _PolyEval(ast.NodeVisitor):
    def __init__(self, p):
        self.p = p

    def visit_Expression(self, node):
        return self.visit(node.body)

    def visit_Constant(self, node):
        if isinstance(node.value, int) and not isinstance(node.value, bool):
            return [node.value]
        raise DomainError(f"unsupported literal {node.value!r}")

    def visit_Name(self, node):
        if node.id == "p":
            return [self.p]
        if node.id == "T":
            return [0, 1]
        raise DomainError(f"unknown symbol {node.id!r} (only p and T are allowed)")

    def visit_UnaryOp(self, node):
        val = self.visit(node.operand)
        if isinstance(node.op, ast.USub):
            return _poly_neg(val)
        if isinstance(node.op, ast.UAdd):
            return val
        raise DomainError("unsupported unary operator")

    def visit_BinOp(self, node):
        left, right = self.visit(node.left), self.visit(node.right)
        if isinstance(node.op, ast.Add):
            return _poly_add(left, right)
        if isinstance(node.op, ast.Sub):
            return _poly_add(left, _poly_neg(right))
        if isinstance(node.op, ast.Mult):
            return _poly_mul(left, right)
        if isinstance(node.op, ast.Pow):
            right = _trim(right)
            if len(right) != 1 or right[0] < 0 or right[0] > 4096:
                raise DomainError("exponents must be integers between 0 and 4096")
            out = [1]
            for _ in range(right[0]):
                out = _poly_mul(out, left)
            return out
        raise DomainError("unsupported operator")

    def generic_visit(self, node):
        raise DomainError(f"unsupported syntax: {type(node).__name__}")


def parse_polynomial(text: str, p: int):
    """Integer coefficients (constant first) of an expression in p and T."""
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse {text!r}: {exc.msg}") from None
    return _trim(_PolyEval(p).visit(tree))


@dataclass
class ModulePresentation:
    """Lambda^r modulo the Lambda-span of the relation vectors."""

    p: int
    r: int
    relations: list = field(default_factory=list)  # list of r-tuples of integer polynomials
    label: str = ""

    def __post_init__(self):
        for rel in self.relations:
            if len(rel) != self.r:
                raise DomainError("relation length does not match the number of generators")
        self.relations = [tuple(_trim(list(c)) for c in rel) for rel in self.relations]

    @classmethod
    def parse(cls, text: str, p: int) -> "ModulePresentation":
        """A cyclic module Lambda/(f_1, ..., f_k) from a comma-separated list."""
        try:
            tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise DomainError(f"cannot parse {text!r}: {exc.msg}") from None
        body = tree.body
        parts = body.elts if isinstance(body, ast.Tuple) else [body]
        if not parts:
            raise DomainError("empty module expression")
        ev = _PolyEval(p)
        return cls(p, 1, [(_trim(ev.visit(e)),) for e in parts], text)

    @classmethod
    def cyclic(cls, p, poly, label=""):
        return cls(p, 1, [(list(poly),)], label)

    def relation_series(self, N, M):
        return [[LambdaSeries(self.p, N, M, c) for c in rel] for rel in self.relations]

    def is_torsion(self, N=DEFAULT_N, M=DEFAULT_M) -> bool:
        """Certify torsion by a nonzero r x r minor of the relation matrix (an annihilator)."""
        if self.r == 0:
            return True
        rels = self.relation_series(N, M)
        if len(rels) < self.r:
            return False
        from itertools import combinations

        for rows in combinations(range(len(rels)), self.r):
            det = _det_series([rels[i] for i in rows])
            if not det.is_zero():
                return True
        return False

    def to_dict(self):
        return {"p": self.p, "r": self.r, "relations": [[list(c) for c in rel] for rel in self.relations]}


def _det_series(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * _det_series(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


# --- coinvariants ------------------------------------------------------------------------


def omega(p: int, n: int):
    """(1 + T)^{p^n} - 1 as integer coefficients."""
    from math import comb

    k = p**n
    return [0] + [comb(k, i) for i in range(1, k + 1)]


def _poly_mod_monic(a, m, mod):
    """a mod m for monic m, coefficients reduced mod ``mod``."""
    a = [x % mod for x in a]
    d = len(m) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j in range(d + 1):
                a[i - d + j] = (a[i - d + j] - c * m[j]) % mod
    return (a + [0] * d)[:d]


def _relation_rows(X: ModulePresentation, modulus_poly, mod):
    """All T^k * rel reduced modulo the monic modulus_poly, flattened over generators."""
    d = len(modulus_poly) - 1
    rows = []
    for rel in X.relations:
        comps = [_poly_mod_monic(c, modulus_poly, mod) for c in rel]
        for _ in range(d):
            rows.append([x for comp in comps for x in comp])
            comps = [_poly_mod_monic([0] + comp, modulus_poly, mod) for comp in comps]
    return rows


def coinvariant_dim(X: ModulePresentation, n: int) -> int:
    """dim_Fp of X / (p, omega_n) = (F_p[T]/T^{p^n})^r / relations."""
    p = X.p
    k = p**n
    if k > LEVEL_CAP:
        raise ResourceError(f"p^n = {k} exceeds the level cap {LEVEL_CAP}")
    mod_poly = [0] * k + [1]  # omega_n == T^{p^n} mod p
    rows = _relation_rows(X, mod_poly, p)
    if not rows:
        return X.r * k
    return X.r * k - rank_mod_p(rows, p)


def coinvariant_logsize(X: ModulePresentation, n: int) -> int:
    """log_p |X / (omega_n, p^n)|, exact via Smith form over Z/p^n."""
    p = X.p
    k = p**n
    if k > LEVEL_CAP:
        raise ResourceError(f"p^n = {k} exceeds the level cap {LEVEL_CAP}")
    if n == 0:
        return 0
    mod = p**n
    rows = _relation_rows(X, omega(p, n), mod)
    if not rows:
        return X.r * k * n
    vals = local_snf_valuations(np.array(rows, dtype=np.int64), p, n)
    return int(sum(vals))


@dataclass(frozen=True)
class GrowthRow:
    n: int
    dim: int
    logsize: int


def _growth_row(args):
    X, n = args
    return GrowthRow(n, coinvariant_dim(X, n), coinvariant_logsize(X, n))


@dataclass
class GrowthTable:
    p: int
    rows: list
    torsion: bool

    def to_dict(self):
        return {
            "p": self.p,
            "torsion": self.torsion,
            "rows": [{"n": r.n, "dim": r.dim, "logsize": r.logsize} for r in self.rows],
        }


def coinvariant_growth(X: ModulePresentation, n_range, workers: int = 1) -> GrowthTable:
    levels = list(n_range)
    args = [(X, n) for n in levels]
    if workers > 1 and len(levels) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_growth_row, args))
    else:
        rows = [_growth_row(a) for a in args]
    return GrowthTable(X.p, rows, X.is_torsion())


# --- fitting ------------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantFit:
    r: int | None
    mu: int | None
    lam: int | None
    nu: int | None
    r_exact: bool
    mu_exact: bool
    unbounded: bool = False
    tail_start: int | None = None

    def to_dict(self):
        return dict(self.__dict__)


def _exact_tail_fit(xs, ys, basis):
    """Longest tail on which ys is an integer combination of the basis functions."""
    k = len(basis)
    for start in range(len(xs) - k):
        tail = list(zip(xs[start:], ys[start:]))
        if len(tail) < k + 1:
            break
        A = np.array([[float(f(x)) for f in basis] for x, _ in tail])
        b = np.array([float(y) for _, y in tail])
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        coeffs = [int(round(c)) for c in sol]
        if all(sum(c * f(x) for c, f in zip(coeffs, basis)) == y for x, y in tail):
            return coeffs, xs[start]
    return None, None


def fit_invariants(table) -> InvariantFit:
    """Fit dim = r p^n + c and logsize = mu p^n + lambda n + nu on the stable tail."""
    rows = table.rows if isinstance(table, GrowthTable) else table
    p = table.p if isinstance(table, GrowthTable) else None
    if len(rows) < 3:
        raise DomainError("at least three consecutive levels are needed")
    ns = [r.n for r in rows]
    if ns != list(range(ns[0], ns[0] + len(ns))):
        raise DomainError("levels must be consecutive")
    if p is None:
        raise DomainError("table must carry its prime")
    if isinstance(table, GrowthTable) and not table.torsion:
        return InvariantFit(None, None, None, None, False, False, True)
    dims = [r.dim for r in rows]
    logs = [r.logsize for r in rows]
    rc, _ = _exact_tail_fit(ns, dims, [lambda n: p**n, lambda n: 1])
    lc, start = _exact_tail_fit(ns, logs, [lambda n: p**n, lambda n: n, lambda n: 1])
    if rc is None:
        # least-squares fallback: slope against p^n over all levels
        xs = [Fraction(p**n) for n in ns]
        r_est = round((dims[-1] - dims[0]) / (xs[-1] - xs[0]))
        r_val, r_exact = int(r_est), False
    else:
        r_val, r_exact = rc[0], True
    if lc is None:
        mu_est = round((logs[-1] - logs[-2]) / (p ** ns[-1] - p ** ns[-2]))
        return InvariantFit(r_val, int(mu_est), None, None, r_exact, False)
    return InvariantFit(r_val, lc[0], lc[1], lc[2], r_exact, True, False, start)


def invariants_of(X: ModulePresentation, levels=range(0, 5), workers: int = 1) -> InvariantFit:
    return fit_invariants(coinvariant_growth(X, levels, workers))


def classical_size_exponent(mu: int, lam: int, nu: int, p: int, n: int) -> int:
    """mu p^n + lambda n + nu (the classical growth formula, used for cross-checks)."""
    return mu * p**n + lam * n + nu
