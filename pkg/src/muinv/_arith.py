"""Elementary integer arithmetic used across the package."""

from __future__ import annotations

from functools import lru_cache
from math import gcd


def factorize(n: int) -> dict:
    """Prime factorization by trial division (inputs here are small)."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power(n: int):
    """Return (p, k) if n = p^k with k >= 1, else None."""
    if n < 2:
        return None
    f = factorize(n)
    if len(f) != 1:
        return None
    ((p, k),) = f.items()
    return p, k


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result = result // p * (p - 1)
    return result


def divisors(n: int) -> list:
    divs = [1]
    for p, k in factorize(n).items():
        divs = [d * p**i for d in divs for i in range(k + 1)]
    return sorted(divs)


def mult_order(a: int, n: int) -> int:
    """Multiplicative order of a modulo n (n >= 1, gcd(a, n) = 1)."""
    if gcd(a, n) != 1:
        raise ValueError(f"{a} is not invertible mod {n}")
    if n == 1:
        return 1
    order = euler_phi(n)
    for p in factorize(order):
        while order % p == 0 and pow(a, order // p, n) == 1:
            order //= p
    return order


@lru_cache(maxsize=None)
def primitive_root(n: int) -> int:
    """Smallest generator of (Z/n)^x; raises if the group is not cyclic."""
    phi = euler_phi(n)
    for g in range(1, n + 1):
        if gcd(g, n) == 1 and mult_order(g, n) == phi:
            return g % n
    raise ValueError(f"(Z/{n})^x is not cyclic")


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D | n) for a prime n."""
    if n == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = D % n
    if r == 0:
        return 0
    return 1 if pow(r, (n - 1) // 2, n) == 1 else -1


def is_squarefree(n: int) -> bool:
    return all(k == 1 for k in factorize(abs(n)).values()) if abs(n) > 1 else True
