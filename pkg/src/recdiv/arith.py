"""Integer, modular, prime and finite-field arithmetic."""

from __future__ import annotations

import math
import random
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import gfpoly
from .errors import DomainError, ResourceError

SEGMENT = 1 << 18

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


# ---------------------------------------------------------------------------
# primes
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    """Miller-Rabin with the first 20 prime bases.

    Deterministic below 3.3e24; beyond that the error probability is below
    4**-20 for any input.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def prime_segments(lo: int, hi: int, segment: int = SEGMENT) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, flags)`` where ``flags[i]`` tells whether ``start+i`` is prime.

    Covers ``[lo, hi)`` in blocks of at most ``segment`` integers.
    """
    lo = max(lo, 0)
    if hi <= lo:
        return
    base = _simple_sieve(math.isqrt(hi - 1) + 1)
    for start in range(lo, hi, segment):
        stop = min(start + segment, hi)
        flags = np.ones(stop - start, dtype=bool)
        for p in base.tolist():
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            flags[first - start :: p] = False
        for k in range(start, min(2, stop)):
            flags[k - start] = False
        yield start, flags


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes.tolist())

    def __contains__(self, n: int) -> bool:
        i = int(np.searchsorted(self.primes, n))
        return i < len(self.primes) and int(self.primes[i]) == n

    def up_to(self, x: int) -> np.ndarray:
        return self.primes[: int(np.searchsorted(self.primes, x, side="right"))]

    def between(self, lo: int, hi: int) -> np.ndarray:
        """Primes in the half-open interval ``(lo, hi]``."""
        a = int(np.searchsorted(self.primes, lo, side="right"))
        b = int(np.searchsorted(self.primes, hi, side="right"))
        return self.primes[a:b]


def primes_up_to(limit: int, segment: int = SEGMENT) -> PrimeTable:
    """All primes ``<= limit`` by a segmented sieve of Eratosthenes."""
    if limit < 2:
        raise DomainError(f"empty range: no primes <= {limit}")
    chunks = [start + np.flatnonzero(flags) for start, flags in prime_segments(0, limit + 1, segment)]
    return PrimeTable(limit, np.concatenate(chunks).astype(np.int64))


def smallest_prime_factors(limit: int) -> np.ndarray:
    """``spf[n]`` for ``0 <= n <= limit`` (``spf[0] = spf[1] = 0``)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in _simple_sieve(math.isqrt(limit)).tolist():
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


# ---------------------------------------------------------------------------
# factoring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


def _brent(n: int, c: int) -> int | None:
    y, m, g, r, q = 2, 128, 1, 1, 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        if r > 1 << 26:
            return None
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g if g != n else None


def _split(n: int, rng: random.Random) -> int:
    for _ in range(64):
        d = _brent(n, rng.randrange(1, n - 1))
        if d is not None:
            return d
    raise ResourceError(f"rho failed to split {n}")


def factorize(n: int, trial_bound: int = 1000) -> Factorization:
    """Complete prime factorization: trial division, then Pollard-Brent rho.

    Rho constants come from a fixed-seed generator, so results and running
    time are reproducible.
    """
    if n <= 0:
        raise DomainError("factorize needs a positive integer")
    if n >= 1 << 128:
        raise DomainError("factorize is capped at 2**128")
    counts: dict[int, int] = {}
    m = n
    for p in _simple_sieve(trial_bound).tolist():
        if p * p > m:
            break
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    rng = random.Random(0x5EED)
    stack = [m] if m > 1 else []
    while stack:
        v = stack.pop()
        if is_prime(v):
            counts[v] = counts.get(v, 0) + 1
            continue
        r = math.isqrt(v)
        if r * r == v:
            stack += [r, r]
            continue
        d = _split(v, rng)
        stack += [d, v // d]
    return Factorization(n, tuple(sorted(counts.items())))


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n).factors:
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


# ---------------------------------------------------------------------------
# vectorised modular helpers (moduli below 2**31 so products fit in int64)
# ---------------------------------------------------------------------------

def batch_powmod(base: np.ndarray, exp: np.ndarray, mod: np.ndarray) -> np.ndarray:
    """Elementwise ``base**exp % mod`` for int64 arrays with ``mod < 2**31``."""
    base = np.asarray(base, dtype=np.int64) % mod
    exp = np.asarray(exp, dtype=np.int64).copy()
    result = np.ones_like(base) % mod
    while np.any(exp):
        odd = (exp & 1).astype(bool)
        result = np.where(odd, result * base % mod, result)
        base = base * base % mod
        exp >>= 1
    return result


# ---------------------------------------------------------------------------
# finite fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteField:
    """F_q with ``q = p**k``, realised as ``F_p[X] / (modulus)``.

    Elements are encoded as integers in ``[0, q)`` whose base-``p`` digits are
    the coefficients, lowest degree first.
    """

    p: int
    k: int
    modulus: tuple[int, ...]
    seed: int | None = None

    @property
    def q(self) -> int:
        return self.p**self.k

    def __repr__(self) -> str:
        return f"FiniteField(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    # encoding ----------------------------------------------------------
    def encode(self, rep: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(rep)):
            v = v * self.p + c % self.p
        return v

    def decode(self, v: int) -> list[int]:
        out = []
        while v:
            v, c = divmod(v, self.p)
            out.append(c)
        return out

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, int):
            return FieldElement(self, value % self.p)
        rep = gfpoly.trim(list(value), self.p)
        if len(rep) > self.k:
            rep = gfpoly.mod(rep, list(self.modulus), self.p)
        return FieldElement(self, self.encode(rep))

    def elements(self) -> Iterator["FieldElement"]:
        for v in range(self.q):
            yield FieldElement(self, v)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    # raw arithmetic on encoded ints -------------------------------------
    def _mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        prod = gfpoly.mul(self.decode(a), self.decode(b), self.p)
        return self.encode(gfpoly.mod(prod, list(self.modulus), self.p))

    def _add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        da, db = self.decode(a), self.decode(b)
        return self.encode(gfpoly.add(da, db, self.p))

    def _neg(self, a: int) -> int:
        return self.encode([-c for c in self.decode(a)]) if self.k > 1 else (-a) % self.p

    def _pow(self, a: int, e: int) -> int:
        if self.k == 1:
            return pow(a, e, self.p)
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    def multiplication_table(self, a: int) -> np.ndarray:
        """Lookup array ``t`` with ``t[v] = a * v`` for every encoded ``v``."""
        if self.k == 1:
            return (np.arange(self.p, dtype=np.int64) * a) % self.p
        basis = np.array(
            [(self.decode(self._mul(a, self.p**j)) + [0] * self.k)[: self.k] for j in range(self.k)],
            dtype=np.int64,
        )
        digits = self.digit_matrix()
        images = digits @ basis % self.p
        weights = self.p ** np.arange(self.k, dtype=np.int64)
        return images @ weights

    def digit_matrix(self) -> np.ndarray:
        v = np.arange(self.q, dtype=np.int64)
        return np.stack([(v // self.p**j) % self.p for j in range(self.k)], axis=1)


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    value: int

    @property
    def rep(self) -> list[int]:
        return self.field.decode(self.value)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise DomainError("elements of different fields")
            return other.value
        return self.field(other).value

    def __add__(self, other):
        return FieldElement(self.field, self.field._add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.value))

    def __sub__(self, other):
        return self + (-self.field(other) if not isinstance(other, FieldElement) else -other)

    def __mul__(self, other):
        return FieldElement(self.field, self.field._mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(self.field, self.field._pow(self.value, e))

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise DomainError("zero has no inverse")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        return self * self.field(other).inverse()

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field(other).value
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.modulus, self.value))

    def __repr__(self) -> str:
        if self.field.k == 1:
            return f"{self.value} (mod {self.field.p})"
        return f"{self.rep} in F_{self.field.q}"


def field_make(p: int, k: int = 1, seed: int = 0, max_tries: int = 10_000) -> FiniteField:
    """Construct F_{p^k}; for ``k > 1`` a random monic irreducible modulus is drawn.

    The modulus depends only on ``(p, k, seed)``.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if not 1 <= k <= 12:
        raise DomainError("extension degree must lie in 1..12")
    if k == 1:
        return FiniteField(p, 1, (0, 1), seed)
    rng = random.Random(f"field:{p}:{k}:{seed}")
    for _ in range(max_tries):
        cand = [rng.randrange(p) for _ in range(k)] + [1]
        if cand[0] and gfpoly.is_irreducible(cand, p):
            return FiniteField(p, k, tuple(cand), seed)
    raise ResourceError(f"no irreducible of degree {k} over F_{p} in {max_tries} tries")


def group_order_factors(fld: FiniteField) -> Factorization:
    return _order_factor_cache(fld.q)


@lru_cache(maxsize=4096)
def _order_factor_cache(q: int) -> Factorization:
    return factorize(q - 1)


def multiplicative_order(a: FieldElement) -> int:
    """Order of ``a`` in F_q^*: strip prime factors off ``q - 1``."""
    if a.value == 0:
        raise DomainError("zero has no multiplicative order")
    fld = a.field
    if fld.q >= 1 << 64:
        raise DomainError("order computation is capped at q < 2**64")
    t = fld.q - 1
    for ell, e in group_order_factors(fld).factors:
        for _ in range(e):
            if fld._pow(a.value, t // ell) == 1:
                t //= ell
            else:
                break
    return t


def order_mod(a: int, p: int) -> int:
    """Multiplicative order of the integer ``a`` modulo the prime ``p``."""
    if a % p == 0:
        raise DomainError(f"{a} is not a unit mod {p}")
    t = p - 1
    for ell, e in _order_factor_cache(p).factors:
        for _ in range(e):
            if pow(a, t // ell, p) == 1:
                t //= ell
            else:
                break
    return t
