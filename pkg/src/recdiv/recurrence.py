"""Integer linear recurrences in companion and exponential-polynomial form."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

from .errors import DomainError, PreconditionError, ResourceError
from .polyzero import IntPolynomial


@dataclass(frozen=True)
class CompanionRecurrence:
    """``F(n+k) = sum_j coeffs[j] * F(n+j)`` with ``F(0..k-1) = init``."""

    coeffs: tuple[int, ...]
    init: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "init", tuple(int(v) for v in self.init))
        if not self.coeffs:
            raise DomainError("order must be at least 1")
        if len(self.init) != len(self.coeffs):
            raise DomainError("need exactly k initial values")
        if self.coeffs[0] == 0:
            raise DomainError("c_0 must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def characteristic(self) -> IntPolynomial:
        """``X^k - c_{k-1} X^{k-1} - ... - c_0``."""
        return IntPolynomial([-c for c in self.coeffs] + [1])


@dataclass(frozen=True)
class ExpPolyRecurrence:
    """``F(n) = sum_i f_i(n) * alpha_i**n`` with distinct nonzero integer roots."""

    terms: tuple[tuple[IntPolynomial, int], ...]

    def __post_init__(self):
        terms = tuple((f if isinstance(f, IntPolynomial) else IntPolynomial(f), int(a)) for f, a in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise DomainError("need at least one term")
        roots = [a for _, a in terms]
        if any(a == 0 for a in roots):
            raise DomainError("roots must be nonzero")
        if len(set(roots)) != len(roots):
            raise DomainError("roots must be pairwise distinct")
        if any(f.is_zero() for f, _ in terms):
            raise DomainError("polynomial coefficients must be nonzero")

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.terms)

    @property
    def r(self) -> int:
        return len(self.terms)

    @property
    def order(self) -> int:
        return sum(f.degree + 1 for f, _ in self.terms)

    def is_simple(self) -> bool:
        return all(f.degree == 0 for f, _ in self.terms)


Recurrence = Union[CompanionRecurrence, ExpPolyRecurrence]


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def iter_exact(rec: Recurrence, start: int = 0) -> Iterator[int]:
    """Exact values ``F(start), F(start+1), ...``."""
    comp = rec if isinstance(rec, CompanionRecurrence) else expand_to_companion(rec)
    state = list(comp.init) if start == 0 else state_at(comp, start)
    c = comp.coeffs
    while True:
        yield state[0]
        nxt = sum(cj * sj for cj, sj in zip(c, state))
        state = state[1:] + [nxt]


def eval_exact(rec: Recurrence, n: int) -> int:
    if n < 0:
        raise DomainError("n must be nonnegative")
    if isinstance(rec, ExpPolyRecurrence):
        return sum(f(n) * a**n for f, a in rec.terms)
    return state_at(rec, n)[0]


def _xpow_mod_charpoly(coeffs: Sequence[int], n: int, m: int | None) -> list[int]:
    """Coefficients of ``X^n mod (X^k - sum c_j X^j)``, over Z/m or exactly when ``m`` is None."""
    k = len(coeffs)
    red = [c % m for c in coeffs] if m else list(coeffs)
    norm = (lambda v: v % m) if m else (lambda v: v)

    def mulmod(a: list[int], b: list[int]) -> list[int]:
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        for d in range(2 * k - 2, k - 1, -1):
            t = norm(prod[d])
            if t:
                for j in range(k):
                    prod[d - k + j] += t * red[j]
        return [norm(v) for v in prod[:k]]

    if k == 1:
        return [pow(red[0], n, m) if m else red[0] ** n]
    result = [norm(1)] + [0] * (k - 1)
    base = [0, 1] + [0] * (k - 2)
    for bit in bin(n)[2:]:
        result = mulmod(result, result)
        if bit == "1":
            result = mulmod(result, base)
    return result


def state_at(rec: Recurrence, n: int) -> list[int]:
    """Exact ``[F(n), ..., F(n+k-1)]`` without iterating from zero."""
    comp = rec if isinstance(rec, CompanionRecurrence) else expand_to_companion(rec)
    k = comp.order
    head = list(comp.init)
    while len(head) < 2 * k - 1:
        head.append(sum(c * v for c, v in zip(comp.coeffs, head[-k:])))
    if n < k:
        return head[n : n + k]
    r = _xpow_mod_charpoly(comp.coeffs, n, None)
    return [sum(ri * head[i + j] for i, ri in enumerate(r)) for j in range(k)]


def eval_mod(rec: Recurrence, n: int, m: int) -> int:
    """``F(n) mod m`` in O(k^2 log n) modular operations."""
    if m < 1:
        raise DomainError("modulus must be positive")
    if n < 0:
        raise DomainError("n must be nonnegative")
    if isinstance(rec, ExpPolyRecurrence):
        return sum(f(n) % m * pow(a, n, m) for f, a in rec.terms) % m
    if n < rec.order:
        return rec.init[n] % m
    r = _xpow_mod_charpoly(rec.coeffs, n, m)
    return sum(ri * v for ri, v in zip(r, rec.init)) % m


# ---------------------------------------------------------------------------
# conversions and structure
# ---------------------------------------------------------------------------

def expand_to_companion(rec: ExpPolyRecurrence) -> CompanionRecurrence:
    chi = IntPolynomial((1,))
    for f, a in rec.terms:
        chi = chi * IntPolynomial((-a, 1)) ** (f.degree + 1)
    k = chi.degree
    coeffs = tuple(-chi.coeffs[j] for j in range(k))
    init = tuple(eval_exact(rec, n) for n in range(k))
    return CompanionRecurrence(coeffs, init)


def is_nondegenerate(rec: ExpPolyRecurrence) -> tuple[bool, tuple[int, int] | None]:
    """For integer roots the only possible root-of-unity ratio is -1."""
    roots = rec.roots
    for i, a in enumerate(roots):
        for b in roots[i + 1 :]:
            if a == -b:
                return False, (a, b)
    return True, None


def has_torsion(rec: Recurrence) -> bool | None:
    """Conservative torsion flag: any negative integer root. None if unknown."""
    if isinstance(rec, CompanionRecurrence):
        return None
    return any(a < 0 for a in rec.roots)


def restrict_to_progression(rec: ExpPolyRecurrence, q: int, r: int) -> ExpPolyRecurrence:
    """The recurrence ``n -> F(q*n + r)``; with even ``q`` every root becomes positive."""
    if q < 1 or not 0 <= r < q:
        raise DomainError("need q >= 1 and 0 <= r < q")
    lin = IntPolynomial((r, q))
    merged: dict[int, IntPolynomial] = {}
    for f, a in rec.terms:
        g = IntPolynomial(())
        for i, c in enumerate(f.coeffs):
            g = g + c * lin**i
        g = g * a**r
        root = a**q
        merged[root] = merged.get(root, IntPolynomial(())) + g
    terms = tuple((f, a) for a, f in sorted(merged.items()) if not f.is_zero())
    return ExpPolyRecurrence(terms)


def period_mod(rec: CompanionRecurrence, m: int, max_steps: int | None = None) -> int:
    """Least period of the state vector modulo ``m``."""
    if isinstance(rec, ExpPolyRecurrence):
        rec = expand_to_companion(rec)
    if m < 1:
        raise DomainError("modulus must be positive")
    if math.gcd(rec.coeffs[0], m) != 1:
        raise PreconditionError(f"gcd(c_0, m) = {math.gcd(rec.coeffs[0], m)} != 1; sequence need not be purely periodic")
    if m == 1:
        return 1
    k = rec.order
    c = [v % m for v in rec.coeffs]
    start = tuple(v % m for v in rec.init)
    state = start
    limit = max_steps if max_steps is not None else m**k
    for t in range(1, limit + 1):
        nxt = sum(cj * sj for cj, sj in zip(c, state)) % m
        state = state[1:] + (nxt,)
        if state == start:
            return t
    raise ResourceError(f"no period found within {limit} steps")


def residues_over_period(rec: CompanionRecurrence, m: int, period: int) -> list[int]:
    out = []
    state = [v % m for v in rec.init]
    c = [v % m for v in rec.coeffs]
    for _ in range(period):
        out.append(state[0])
        state = state[1:] + [sum(cj * sj for cj, sj in zip(c, state)) % m]
    return out


# ---------------------------------------------------------------------------
# named families and JSON
# ---------------------------------------------------------------------------

def fibonacci() -> CompanionRecurrence:
    return CompanionRecurrence((1, 1), (0, 1))


def lucas_sequence(a: int, b: int) -> CompanionRecurrence:
    """``F(0)=0, F(1)=1, F(n+2) = a F(n+1) + b F(n)``."""
    return CompanionRecurrence((b, a), (0, 1))


def to_json(rec: Recurrence) -> dict:
    if isinstance(rec, CompanionRecurrence):
        return {"companion": {"coeffs": [str(c) for c in rec.coeffs], "init": [str(v) for v in rec.init]}}
    return {"exppoly": [{"poly": f.to_json(), "root": str(a)} for f, a in rec.terms]}


def from_json(data: dict) -> Recurrence:
    if "companion" in data:
        body = data["companion"]
        return CompanionRecurrence(tuple(int(str(c)) for c in body["coeffs"]), tuple(int(str(v)) for v in body["init"]))
    if "exppoly" in data:
        return ExpPolyRecurrence(tuple((IntPolynomial.from_json(t["poly"]), int(str(t["root"]))) for t in data["exppoly"]))
    raise DomainError("recurrence needs a 'companion' or 'exppoly' key")
