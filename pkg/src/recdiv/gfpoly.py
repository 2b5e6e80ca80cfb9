"""Dense polynomials over F_p.

Polynomials are plain lists of ints in ``[0, p)``, lowest degree first, with
no trailing zeros. The zero polynomial is ``[]``.
"""

from __future__ import annotations

from typing import Sequence

Poly = list[int]


def trim(f: Sequence[int], p: int) -> Poly:
    out = [c % p for c in f]
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(f: Sequence[int]) -> int:
    return len(f) - 1


def add(f: Poly, g: Poly, p: int) -> Poly:
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = (out[i] + c) % p
    return trim(out, p)


def sub(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    out = [0] * n
    for i, c in enumerate(f):
        out[i] = c
    for i, c in enumerate(g):
        out[i] = (out[i] - c) % p
    return trim(out, p)


def mul(f: Poly, g: Poly, p: int) -> Poly:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim(out, p)


def divmod_(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    if len(r) - 1 < dg:
        return [], trim(r, p)
    q = [0] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i] % p
        if c == 0:
            continue
        c = c * inv % p
        q[i - dg] = c
        for j, b in enumerate(g):
            r[i - dg + j] = (r[i - dg + j] - c * b) % p
    return trim(q, p), trim(r[:dg], p)


def mod(f: Poly, g: Poly, p: int) -> Poly:
    return divmod_(f, g, p)[1]


def monic(f: Poly, p: int) -> Poly:
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return [c * inv % p for c in f]


def gcd(f: Poly, g: Poly, p: int) -> Poly:
    f, g = trim(f, p), trim(g, p)
    while g:
        f, g = g, mod(f, g, p)
    return monic(f, p)


def powmod(f: Poly, e: int, m: Poly, p: int) -> Poly:
    """``f**e mod m`` by left-to-right square and multiply."""
    result: Poly = [1] if len(m) > 1 else []
    base = mod(f, m, p)
    for bit in bin(e)[2:]:
        result = mod(mul(result, result, p), m, p)
        if bit == "1":
            result = mod(mul(result, base, p), m, p)
    return result


def evaluate(f: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def is_irreducible(f: Poly, p: int) -> bool:
    """Distinct-degree test: no factor of degree ``i`` for ``i <= deg/2``."""
    f = monic(trim(f, p), p)
    n = degree(f)
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    h = x
    for _ in range(n // 2):
        h = powmod(h, p, f, p)
        if degree(gcd(sub(h, x, p), f, p)) > 0:
            return False
    return True


def count_roots(f: Poly, p: int) -> int:
    """Number of distinct roots in F_p, as ``deg gcd(f, X^p - X)``."""
    f = trim(f, p)
    if not f:
        raise ValueError("zero polynomial has every residue as a root")
    if len(f) == 1:
        return 0
    h = powmod([0, 1], p, f, p)
    return degree(gcd(sub(h, [0, 1], p), f, p))
