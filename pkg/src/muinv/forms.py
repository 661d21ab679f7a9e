"""Positive definite binary quadratic forms: reduction, composition, class orders."""

from __future__ import annotations

from math import gcd

from .errors import DomainError


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def discriminant(form) -> int:
    a, b, c = form
    return b * b - 4 * a * c


def reduce_with_matrix(form):
    """Reduce (a, b, c), returning (reduced, M) with reduced(X) = form(M X), det M = 1."""
    a, b, c = form
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise DomainError(f"{form} is not positive definite")
    M = [[1, 0], [0, 1]]
    while True:
        # translate x -> x + t y so that -a < b <= a
        t = (a - b) // (2 * a)
        if t:
            b, c = b + 2 * a * t, a * t * t + b * t + c
            M = [[M[0][0], M[0][0] * t + M[0][1]], [M[1][0], M[1][0] * t + M[1][1]]]
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            M = [[M[0][1], -M[0][0]], [M[1][1], -M[1][0]]]
            continue
        return (a, b, c), M


def reduce_form(form):
    return reduce_with_matrix(form)[0]


def identity_form(D: int):
    return (1, D % 2, (D % 2 - D) // 4)


def compose(f1, f2):
    """Gauss composition of primitive forms of equal discriminant, reduced."""
    D = discriminant(f1)
    if discriminant(f2) != D:
        raise DomainError("forms of different discriminants")
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return reduce_form((a3, b3, c3))


def form_power(form, k: int):
    D = discriminant(form)
    result, base = identity_form(D), reduce_form(form)
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


def form_order(form, bound: int) -> int:
    """Order of the class of a primitive form (searching up to ``bound``)."""
    e = identity_form(discriminant(form))
    f = reduce_form(form)
    g = f
    for k in range(1, bound + 1):
        if g == e:
            return k
        g = compose(g, f)
    raise DomainError(f"class order exceeds {bound}")


def is_primitive(form) -> bool:
    a, b, c = form
    return gcd(gcd(a, abs(b)), c) == 1
