"""Splitting of primes in abelian fields, counted with a segmented numpy sieve.

An abelian field of conductor ``f`` is described by a subgroup ``H`` of
``(Z/f)^x``: a prime ``q`` not dividing ``f`` splits completely exactly when
``q mod f`` lies in ``H``.  Its Frobenius class is the coset ``qH``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ._arith import euler_phi, is_prime, mult_order
from .errors import DomainError, ResourceError

SIEVE_CAP = 10**8
SEGMENT = 1 << 22
CACHE_ENV = "MUINV_CACHE_DIR"

SPLIT, INERT, RAMIFIED, PARTIAL = "split", "inert", "ramified", "partial"


# --- subgroups of (Z/f)^x ------------------------------------------------------------


@dataclass(frozen=True)
class ResidueSubgroup:
    f: int
    elements: frozenset

    @classmethod
    def of(cls, f: int, elements) -> "ResidueSubgroup":
        if f < 2:
            raise DomainError("conductor must be at least 2")
        elems = frozenset(int(e) % f for e in elements) | {1 % f}
        for e in elems:
            if math.gcd(e, f) != 1:
                raise DomainError(f"{e} is not a unit modulo {f}")
        for a in elems:
            for b in elems:
                if a * b % f not in elems:
                    raise DomainError(f"{sorted(elems)} is not closed under multiplication mod {f}")
        return cls(f, elems)

    @property
    def index(self) -> int:
        return euler_phi(self.f) // len(self.elements)

    def coset_rep(self, q: int) -> int:
        return min(q * h % self.f for h in self.elements)

    def quotient_order(self, q: int) -> int:
        """Order of q in (Z/f)^x / H."""
        k, x = 1, q % self.f
        while x not in self.elements:
            x = x * q % self.f
            k += 1
        return k

    def lookup(self):
        table = np.zeros(self.f, dtype=bool)
        table[list(self.elements)] = True
        return table


def parse_subgroup(f: int, text: str | None) -> ResidueSubgroup:
    if not text:
        return ResidueSubgroup.of(f, [1])
    return ResidueSubgroup.of(f, [int(t) for t in text.split(",") if t.strip()])


# --- classification -----------------------------------------------------------------------


@dataclass(frozen=True)
class CensusRow:
    q: int
    frobenius: int
    classification: str
    split: int = 0
    inert: int = 0
    ramified: int = 0
    partial: int = 0


def classify(q: int, f: int, H) -> CensusRow:
    """Exact coset classification of the prime q in the field cut out by H."""
    if not isinstance(H, ResidueSubgroup):
        H = ResidueSubgroup.of(f, H)
    if H.f != f:
        raise DomainError("subgroup modulus does not match the conductor")
    if not is_prime(q):
        raise DomainError(f"{q} is not prime")
    if f % q == 0:
        return CensusRow(q, 0, RAMIFIED)
    rep = H.coset_rep(q)
    if q % f in H.elements:
        kind = SPLIT
    elif H.quotient_order(q) == H.index:
        kind = INERT
    else:
        kind = PARTIAL
    return CensusRow(q, rep, kind)


def census_rows(f: int, H: ResidueSubgroup, x: int):
    """CensusRow stream for all primes q <= x, with running counts."""
    counts = {SPLIT: 0, INERT: 0, RAMIFIED: 0, PARTIAL: 0}
    for q in primes_up_to(x).tolist():
        row = classify(q, f, H)
        counts[row.classification] += 1
        yield CensusRow(q, row.frobenius, row.classification, counts[SPLIT], counts[INERT], counts[RAMIFIED], counts[PARTIAL])


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "frobenius", "classification", "split", "inert", "ramified", "partial"])
    for r in rows:
        w.writerow([r.q, r.frobenius, r.classification, r.split, r.inert, r.ramified, r.partial])
    return buf.getvalue()


# --- sieve ------------------------------------------------------------------------------------


def _base_primes(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def _segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi)."""
    seg = np.ones(hi - lo, dtype=bool)
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, -(-lo // p) * p)
        seg[start - lo :: p] = False
    if lo < 2:
        seg[: 2 - lo] = False
    return np.nonzero(seg)[0].astype(np.int64) + lo


def primes_up_to(x: int) -> np.ndarray:
    x = int(x)
    if x > SIEVE_CAP:
        raise ResourceError(f"sieve bound {x} exceeds the cap {SIEVE_CAP}")
    base = _base_primes(math.isqrt(x) + 1)
    parts = [_segment(lo, min(lo + SEGMENT, x + 1), base) for lo in range(0, x + 1, SEGMENT)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def _count_segment(args):
    lo, hi, f, elems = args
    base = _base_primes(math.isqrt(hi) + 1)
    qs = _segment(lo, hi, base)
    ram = int(np.count_nonzero(f % qs == 0))
    table = np.zeros(f, dtype=bool)
    table[list(elems)] = True
    split_mask = table[qs % f]
    return ram, int(np.count_nonzero(split_mask)), int(qs.size)


# --- densities -------------------------------------------------------------------------------


@dataclass(frozen=True)
class CensusSummary:
    f: int
    subgroup: tuple
    x: int
    primes: int
    split: int
    not_split: int
    ramified: int
    expected_split_density: float

    @property
    def split_density(self) -> float:
        return self.split / self.primes if self.primes else 0.0

    @property
    def not_split_density(self) -> float:
        return self.not_split / self.primes if self.primes else 0.0

    def to_dict(self):
        d = asdict(self)
        d["split_density"] = self.split_density
        d["not_split_density"] = self.not_split_density
        return d


def census(f: int, H, x: int, workers: int = 1, cache: bool = True) -> CensusSummary:
    """Counts of split / non-split / ramified primes q <= x."""
    if not isinstance(H, ResidueSubgroup):
        H = ResidueSubgroup.of(f, H)
    x = int(x)
    if x > SIEVE_CAP:
        raise ResourceError(f"sieve bound {x} exceeds the cap {SIEVE_CAP}")
    key = {"op": "census", "f": f, "H": sorted(H.elements), "x": x}
    hit = _cache_get(key) if cache else None
    if hit is not None:
        return CensusSummary(**hit)
    elems = tuple(sorted(H.elements))
    jobs = [(lo, min(lo + SEGMENT, x + 1), f, elems) for lo in range(0, x + 1, SEGMENT)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_segment, jobs))
    else:
        results = [_count_segment(j) for j in jobs]
    ram = sum(r[0] for r in results)
    split = sum(r[1] for r in results)
    total = sum(r[2] for r in results)
    out = CensusSummary(f, elems, x, total, split, total - split - ram, ram, 1 / H.index)
    if cache:
        _cache_put(key, asdict(out))
    return out


@dataclass(frozen=True)
class PiSplitStatistic:
    x: int
    ell: int
    bound: int  # floor(x^(1/ell))
    count: int  # primes q <= bound with inert Frobenius
    primes: int
    expected: float  # (ell - 1)/ell * pi(bound)
    reference: float  # x^(1/ell) / log x
    ratio: float

    def to_dict(self):
        return asdict(self)


def integer_root(x: int, k: int) -> int:
    """floor(x^(1/k)) exactly."""
    r = int(round(x ** (1.0 / k)))
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def pi_split_statistic(x: int, ell: int, f: int, H) -> PiSplitStatistic:
    """Inert primes q <= x^(1/ell) in a cyclic field of prime degree ell."""
    if not isinstance(H, ResidueSubgroup):
        H = ResidueSubgroup.of(f, H)
    x = int(x)
    if not is_prime(ell):
        raise DomainError(f"{ell} is not prime")
    if x < 100:
        raise DomainError("x must be at least 100")
    if H.index != ell:
        raise DomainError(f"the subgroup has index {H.index}, not {ell}")
    y = integer_root(x, ell)
    qs = primes_up_to(y)
    unram = qs[(f % qs) != 0]
    inert = int(np.count_nonzero(~H.lookup()[unram % f]))
    ref = x ** (1.0 / ell) / math.log(x)
    return PiSplitStatistic(x, ell, y, inert, int(qs.size), (ell - 1) / ell * qs.size, ref, inert / ref)


def log_grid(lo: float, hi: float, points: int):
    return sorted({int(round(10**t)) for t in np.linspace(math.log10(lo), math.log10(hi), points)})


def empirical_constant(ell: int, f: int, H, xs) -> tuple:
    """(min ratio over the grid, the statistics)."""
    stats = [pi_split_statistic(x, ell, f, H) for x in xs]
    return min(s.ratio for s in stats), stats


# --- ramification sets ---------------------------------------------------------------------------


def admissible_S(p: int, t: int, bound: int) -> list:
    """First t primes l <= bound with l == 1 mod p."""
    if p < 3 or not is_prime(p):
        raise DomainError("p must be an odd prime")
    found = [int(q) for q in primes_up_to(bound) if q % p == 1][:t]
    if len(found) < t:
        raise ResourceError(f"only {len(found)} primes congruent to 1 mod {p} below {bound}: {found}")
    return found


@dataclass
class FreeTSelection:
    p: int
    bound: int
    primes: list
    rejected: dict  # reason -> count

    def to_dict(self):
        return asdict(self)


def qualifies_free_T(ell: int, p: int) -> tuple:
    """(inert in Q(zeta_p), p^2 does not divide ell^(p-1) - 1)."""
    if ell == p:
        return False, False
    inert = mult_order(ell % p, p) == p - 1
    return inert, pow(ell, p - 1, p * p) != 1


def select_free_T(p: int, bound: int) -> FreeTSelection:
    from .prationality import is_regular_prime

    if p < 3 or not is_prime(p):
        raise DomainError("p must be an odd prime")
    if not is_regular_prime(p):
        raise DomainError(f"{p} is irregular")
    good, rejected = [], {"split or partially split": 0, "p^2 divides l^(p-1) - 1": 0, "equal to p": 0}
    for ell in primes_up_to(bound).tolist():
        if ell == p:
            rejected["equal to p"] += 1
            continue
        inert, exact = qualifies_free_T(ell, p)
        if not inert:
            rejected["split or partially split"] += 1
        elif not exact:
            rejected["p^2 divides l^(p-1) - 1"] += 1
        else:
            good.append(ell)
    return FreeTSelection(p, bound, good, rejected)


# --- cache ---------------------------------------------------------------------------------------


def cache_dir() -> Path | None:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def _cache_path(key) -> Path | None:
    d = cache_dir()
    if d is None:
        return None
    digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()
    return d / f"{digest}.json"


def _cache_get(key):
    path = _cache_path(key)
    if path is None or not path.exists():
        return None
    data = json.loads(path.read_text())
    if data.get("key") != key:
        return None
    value = data["value"]
    value["subgroup"] = tuple(value["subgroup"])
    return value


def _cache_put(key, value):
    path = _cache_path(key)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"key": key, "value": value}, sort_keys=True))
    tmp.replace(path)
