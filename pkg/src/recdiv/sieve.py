"""Residue systems Omega_p, the admissible prime set, and exact sieved counts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .arith import batch_powmod, is_prime, primes_up_to, order_mod
from .errors import DomainError, PreconditionError
from .parallel import map_chunks
from .polyzero import IntPolynomial, factor_over_Z, roots_mod_p
from .wirsing import MultFnSpec

ORDER_EXPONENT = 4
BLOCK = 1 << 22

IN_S = "in-S"
VANISHES = "identically-vanishing"
SMALL_ORDER = "small-order"
FULL = "full-residue-set"


@dataclass
class SieveSystem:
    y: int
    z: int
    gtilde: IntPolynomial
    roots: tuple[int, ...]
    inverted: tuple[int, ...]
    residues: dict[int, tuple[int, ...]] = field(default_factory=dict)
    exclusions: dict[int, str] = field(default_factory=dict)
    order_exponent: int = ORDER_EXPONENT
    warnings: list[str] = field(default_factory=list)

    @property
    def primes(self) -> list[int]:
        return sorted(self.residues)

    @property
    def h(self) -> int:
        return factor_over_Z(self.gtilde).h

    def omega_size(self, p: int) -> int:
        return len(self.residues.get(p, ()))

    def to_json(self) -> dict:
        return {
            "y": self.y,
            "z": self.z,
            "gtilde": self.gtilde.to_json(),
            "roots": [str(a) for a in self.roots],
            "invert_primes": list(self.inverted),
            "order_exponent": self.order_exponent,
            "residues": {str(p): list(v) for p, v in sorted(self.residues.items())},
            "exclusions": {str(p): r for p, r in sorted(self.exclusions.items())},
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SieveSystem":
        return cls(
            int(data["y"]),
            int(data["z"]),
            IntPolynomial.from_json(data["gtilde"]),
            tuple(int(a) for a in data.get("roots", [])),
            tuple(int(p) for p in data.get("invert_primes", [])),
            {int(p): tuple(v) for p, v in data.get("residues", {}).items()},
            {int(p): r for p, r in data.get("exclusions", {}).items()},
            int(data.get("order_exponent", ORDER_EXPONENT)),
            list(data.get("warnings", [])),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def audit(self) -> list[str]:
        """Re-verify every stored residue and exclusion; returns the problems found."""
        problems = []
        for p, res in self.residues.items():
            if len(res) >= p:
                problems.append(f"Omega_{p} is not proper")
            for ell in res:
                if self.gtilde(ell) % p:
                    problems.append(f"G({ell}) != 0 mod {p}")
            if sorted(res) != roots_mod_p(self.gtilde, p):
                problems.append(f"Omega_{p} is not the full zero set")
        betas = order_bases(self.roots)
        for p, reason in self.exclusions.items():
            if reason == IN_S and p not in self.inverted and all(a % p for a in self.roots):
                problems.append(f"{p} excluded as in-S without cause")
            elif reason == VANISHES and any(c % p for c in self.gtilde.coeffs):
                problems.append(f"{p} excluded as vanishing without cause")
            elif reason == SMALL_ORDER and not any(
                b % p and order_mod(b % p, p) ** self.order_exponent < p for b in _betas_mod(betas, p)
            ):
                problems.append(f"{p} excluded for small order without cause")
        return problems


def order_bases(roots: Sequence[int]) -> list[Fraction]:
    """Elements whose orders mod p are tested: pairwise ratios, or the lone root."""
    roots = list(roots)
    if len(roots) >= 2:
        return [Fraction(a, b) for i, a in enumerate(roots) for b in roots[i + 1 :]]
    if len(roots) == 1 and abs(roots[0]) != 1:
        return [Fraction(roots[0])]
    return []


def _betas_mod(betas: Sequence[Fraction], p: int) -> list[int]:
    return [b.numerator * pow(b.denominator, -1, p) % p for b in betas if b.denominator % p and b.numerator % p]


def _check_roots(roots: Sequence[int]) -> None:
    if any(a == 0 for a in roots):
        raise PreconditionError("roots must be nonzero")
    for i, a in enumerate(roots):
        for b in roots[i + 1 :]:
            if a == b or a == -b:
                raise PreconditionError(f"roots {a}, {b} have ratio {Fraction(a, b)}, a root of unity")


def small_order_mask(betas: Sequence[Fraction], primes: np.ndarray, exponent: int = ORDER_EXPONENT) -> np.ndarray:
    """True where some beta has multiplicative order ``t`` with ``t**exponent < p``.

    Primes dividing a numerator or denominator are never flagged here.
    """
    primes = np.asarray(primes, dtype=np.int64)
    flagged = np.zeros(len(primes), dtype=bool)
    if not len(primes) or not betas:
        return flagged
    if primes.max() >= 1 << 31:
        raise DomainError("vectorised order filter needs p < 2**31")
    tmax = 1
    while (tmax + 1) ** exponent < int(primes.max()):
        tmax += 1
    for b in betas:
        num = np.asarray(b.numerator % primes, dtype=np.int64)
        den = np.asarray(b.denominator % primes, dtype=np.int64)
        valid = (num != 0) & (den != 0)
        inv = batch_powmod(np.where(valid, den, 1), primes - 2, primes)
        beta = num * inv % primes
        pw = np.ones_like(beta)
        for t in range(1, tmax + 1):
            pw = pw * beta % primes
            flagged |= valid & (pw == 1) & (t**exponent < primes)
    return flagged


def build_sieve_system(
    gtilde: IntPolynomial,
    roots: Sequence[int],
    inverted: Iterable[int],
    y: int,
    z: int,
    order_exponent: int = ORDER_EXPONENT,
) -> SieveSystem:
    """Omega_p for every prime ``p`` in ``(y, z]`` that survives the exclusions."""
    if gtilde.degree < 1:
        raise PreconditionError("G~ must be nonconstant")
    roots = tuple(int(a) for a in roots)
    _check_roots(roots)
    inverted = tuple(sorted(set(int(p) for p in inverted)))
    for p in inverted:
        if not is_prime(p):
            raise DomainError(f"inverted prime {p} is not prime")
    g = gtilde.primitive()
    system = SieveSystem(y, z, g, roots, inverted, order_exponent=order_exponent)
    if z <= max(y, 1):
        return system
    primes = primes_up_to(z).between(y, z)
    betas = order_bases(roots)
    small = small_order_mask(betas, primes, order_exponent)
    for p, is_small in zip(primes.tolist(), small.tolist()):
        if p in inverted or any(a % p == 0 for a in roots):
            system.exclusions[p] = IN_S
        elif all(c % p == 0 for c in g.coeffs):
            system.exclusions[p] = VANISHES
        elif is_small:
            system.exclusions[p] = SMALL_ORDER
        else:
            res = tuple(roots_mod_p(g, p))
            if len(res) == p:
                system.exclusions[p] = FULL
            else:
                system.residues[p] = res
    return system


def regime_parameters(x: float, r: int, h: int, d: int = 1) -> tuple[float, float, bool]:
    """``y = (log x)^(2^r h)`` and ``z = x^(1/(d+1))``; flag whether ``y < z``."""
    y = math.log(x) ** (2**r * h)
    z = x ** (1 / (d + 1))
    return y, z, y < z


@dataclass
class ExclusionCount:
    x: int
    count: int
    ratio: float
    primes: list[int]


def count_excluded_small_order(betas: Sequence[int], x: int, exponent: int = ORDER_EXPONENT) -> ExclusionCount:
    """Primes ``p <= x`` at which some given value has order below ``p^(1/4)``."""
    betas = [int(b) for b in betas]
    for b in betas:
        if b == 0 or abs(b) == 1:
            raise PreconditionError(f"{b} is zero or a root of unity")
    primes = primes_up_to(max(x, 2)).primes
    mask = small_order_mask([Fraction(b) for b in betas], primes, exponent)
    hit = primes[mask].tolist()
    return ExclusionCount(x, len(hit), len(hit) / math.sqrt(x), hit)


# ---------------------------------------------------------------------------
# exact sieved counts
# ---------------------------------------------------------------------------

def _count_block(args) -> int:
    lo, hi, residues = args
    alive = np.ones(hi - lo, dtype=bool)
    for p, res in residues:
        for ell in res:
            first = lo + (ell - lo) % p
            if first < hi:
                alive[first - lo :: p] = False
    return int(np.count_nonzero(alive))


def sieved_count(x: int, system: SieveSystem, threads: int = 1, block: int = BLOCK) -> int:
    """``#{1 <= n <= x : n mod p not in Omega_p for every sieving prime p}``."""
    if x > 10**8:
        raise DomainError("x is capped at 10**8")
    if x < 1:
        return 0
    residues = [(p, res) for p, res in sorted(system.residues.items()) if res]
    chunks = [(lo, min(lo + block, x + 1), residues) for lo in range(1, x + 1, block)]
    return sum(map_chunks(_count_block, chunks, threads))


def sieve_bound_shape(x: float, y: float, h: float) -> float:
    """``x (log y / log x)^h``."""
    if not x > y >= 2:
        raise DomainError("need x > y >= 2")
    return x * (math.log(y) / math.log(x)) ** h


def omega_log_sum(system: SieveSystem, xs: Sequence[int]) -> list[float]:
    """``sum_{p <= t} #Omega_p log p / p`` over the system's sieving primes."""
    ps = np.array(system.primes, dtype=np.int64)
    sizes = np.array([system.omega_size(p) for p in ps.tolist()], dtype=float)
    terms = (sizes * np.log(ps) / ps).tolist() if len(ps) else []
    out = []
    for t in xs:
        k = int(np.searchsorted(ps, t, side="right"))
        out.append(math.fsum(terms[:k]))
    return out


def fitted_constants(counts: Sequence[int], shapes: Sequence[float]) -> tuple[list[float], float]:
    """Per-point constants ``count/shape`` and their spread ``max/min - 1``."""
    cs = [c / s for c, s in zip(counts, shapes)]
    lo = min(cs)
    spread = max(cs) / lo - 1 if lo > 0 else math.inf
    return cs, spread


def gy_from_system(system: SieveSystem) -> MultFnSpec:
    """``g_y(p) = #Omega_p / (p - #Omega_p)`` on squarefree support, primes in ``(y, z]``."""
    sizes = {p: len(r) for p, r in system.residues.items()}

    def rule(p: int, s: int) -> Fraction:
        w = sizes.get(p, 0)
        return Fraction(w, p - w) if s == 1 else Fraction(0)

    def prime_rule(ps: np.ndarray) -> np.ndarray:
        w = np.array([sizes.get(p, 0) for p in ps.tolist()], dtype=float)
        return w / (ps.astype(float) - w)

    return MultFnSpec(
        f"omega_system:y={system.y},z={system.z}",
        rule,
        h=system.h,
        L=math.log(max(system.y, 2)),
        cutoff=system.y,
        squarefree=True,
        decay=float(max(sizes.values(), default=1)) ** 2,
        prime_rule=prime_rule,
        support=(system.y, system.z),
    )
