"""Counting n with G(n) | F(n) in Z[1/S], the N1/N2 split, and the Hardy-Littlewood family."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arith import is_prime, prime_segments, primes_up_to
from .errors import DomainError, PreconditionError, RegimeError, ResourceError
from .parallel import map_chunks
from .polyzero import IntPolynomial, factor_over_Z, poly_gcd, roots_mod_p
from .recurrence import (
    CompanionRecurrence,
    ExpPolyRecurrence,
    Recurrence,
    eval_mod,
    expand_to_companion,
    has_torsion,
    iter_exact,
    period_mod,
    residues_over_period,
)
from .sieve import build_sieve_system, regime_parameters

MEMBER_CAP = 100_000
EXACT_MAX = 10**6
MODULAR_MAX = 10**8
CHUNK = 20_000


@dataclass(frozen=True)
class QuotientProblem:
    """``N = {n >= 1 : G(n) != 0, F(n)/G(n) in Z[1/S]}``."""

    F: Recurrence
    G: IntPolynomial
    inverted: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inverted", tuple(sorted(set(int(p) for p in self.inverted))))
        if self.G.is_zero():
            raise DomainError("G must be nonzero")
        for p in self.inverted:
            if not is_prime(p):
                raise DomainError(f"inverted prime {p} is not prime")

    @property
    def r(self) -> int | None:
        return self.F.r if isinstance(self.F, ExpPolyRecurrence) else None

    @property
    def d(self) -> int:
        return 1

    def normalized_G(self) -> IntPolynomial:
        """G with any common factor of G and every f_i divided out (ExpPoly form only)."""
        if not isinstance(self.F, ExpPolyRecurrence) or self.G.degree < 1:
            return self.G
        g = self.G
        common = g.primitive()
        for f, _ in self.F.terms:
            common = poly_gcd(common, f)
            if common.degree < 1:
                return g
        return g.exact_div(common) or g

    @property
    def h(self) -> int:
        g = self.normalized_G()
        return factor_over_Z(g).h if g.degree >= 1 else 0

    def caveats(self) -> list[str]:
        out = []
        if self.G.degree < 1:
            out.append("G is constant: membership is trivial")
        if isinstance(self.F, CompanionRecurrence):
            out.append("F given in companion form: gcd normalisation skipped, h taken from G directly")
        return out

    def strip(self, v: int) -> int:
        v = abs(v)
        for p in self.inverted:
            while v and v % p == 0:
                v //= p
        return v


def _companion(F: Recurrence) -> CompanionRecurrence:
    return F if isinstance(F, CompanionRecurrence) else expand_to_companion(F)


def membership(prob: QuotientProblem, n: int, method: str = "exact", value: int | None = None) -> bool:
    """Whether ``n`` lies in N. ``value`` may supply ``F(n)`` when already known."""
    if n < 1:
        raise DomainError("n must be positive")
    g = prob.G(n)
    if g == 0:
        return False
    m = prob.strip(g)
    if m == 1:
        return True
    if method == "modular":
        return eval_mod(prob.F, n, m) == 0
    if value is None:
        value = next(iter_exact(prob.F, n))
    return value % m == 0


def _check_torsion(prob: QuotientProblem) -> None:
    if has_torsion(prob.F):
        raise PreconditionError(
            "F has a negative root, so its roots may generate torsion; split n into residue "
            "classes mod 2 (recurrence.restrict_to_progression) and count each class separately"
        )


def _exact_chunk(args) -> list[int]:
    prob, lo, hi = args
    out = []
    for n, v in zip(range(lo, hi), iter_exact(prob.F, lo)):
        if membership(prob, n, value=v):
            out.append(n)
    return out


def _modular_chunk(args) -> list[int]:
    prob, candidates = args
    return [n for n in candidates if membership(prob, n, method="modular")]


def congruence_filter(prob: QuotientProblem, x: int, bound: int = 1000) -> np.ndarray:
    """Candidates ``n <= x`` surviving the small-prime necessary conditions.

    For each prime ``p <= bound`` outside S with ``p | G(n)``, membership forces
    ``p | F(n)``; ``F mod p`` is read off one period of the recurrence.
    """
    comp = _companion(prob.F)
    alive = np.ones(x + 1, dtype=bool)
    alive[0] = False
    for p in primes_up_to(max(2, min(bound, x))).primes.tolist():
        if p in prob.inverted or comp.coeffs[0] % p == 0:
            continue
        if all(c % p == 0 for c in prob.G.coeffs):
            omega = list(range(p))
        else:
            omega = roots_mod_p(prob.G, p)
        if not omega:
            continue
        try:
            T = period_mod(comp, p, max_steps=50 * p * comp.order)
        except ResourceError:
            continue
        zero = np.array(residues_over_period(comp, p, T)) == 0
        if zero.all():
            continue
        for ell in omega:
            idx = np.arange(ell, x + 1, p)
            alive[idx] &= zero[idx % T]
    return np.flatnonzero(alive)


@dataclass
class CountReport:
    x: int
    count: int
    members: list[int] | None
    h: int
    bound_shape: float
    fitted_constant: float
    mode: str
    sampled: bool = False
    caveats: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "count": self.count,
            "members": self.members,
            "members_sampled": self.sampled,
            "h": self.h,
            "bound_shape": self.bound_shape,
            "fitted_constant": self.fitted_constant,
            "mode": self.mode,
            "caveats": self.caveats,
        }


def bound_shape(x: float, h: int) -> float:
    """``x (log log x / log x)^h``."""
    if x < 3:
        raise DomainError("the bound shape needs x >= 3")
    return x * (math.log(math.log(x)) / math.log(x)) ** h


def list_members(prob: QuotientProblem, x: int, mode: str = "exact", threads: int = 1, filter_bound: int = 1000) -> list[int]:
    _check_torsion(prob)
    if mode == "exact":
        if x > EXACT_MAX:
            raise DomainError(f"exact mode is capped at x <= {EXACT_MAX}")
        chunks = [(prob, lo, min(lo + CHUNK, x + 1)) for lo in range(1, x + 1, CHUNK)]
        parts = map_chunks(_exact_chunk, chunks, threads)
    elif mode == "modular":
        if x > MODULAR_MAX:
            raise DomainError(f"modular mode is capped at x <= {MODULAR_MAX}")
        cand = congruence_filter(prob, x, filter_bound).tolist()
        chunks = [(prob, cand[i : i + CHUNK]) for i in range(0, len(cand), CHUNK)]
        parts = map_chunks(_modular_chunk, chunks, threads)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return [n for part in parts for n in part]


def count_N(
    prob: QuotientProblem,
    x: int,
    retain_members: bool = True,
    mode: str = "exact",
    threads: int = 1,
    seed: int = 0,
    member_cap: int = MEMBER_CAP,
) -> CountReport:
    members = list_members(prob, x, mode, threads)
    h = prob.h
    shape = bound_shape(max(x, 3), h)
    kept: list[int] | None = None
    sampled = False
    if retain_members:
        if len(members) > member_cap:
            kept = sorted(random.Random(seed).sample(members, member_cap))
            sampled = True
        else:
            kept = members
    return CountReport(x, len(members), kept, h, shape, len(members) / shape, mode, sampled, prob.caveats())


# ---------------------------------------------------------------------------
# N1 / N2 split
# ---------------------------------------------------------------------------

@dataclass
class SplitReport:
    x: int
    y: int
    z: int
    r: int
    h: int
    n_total: int
    n1: int
    n2: int
    histogram: dict[int, int]
    shapes: dict[int, float]
    fitted_constant: float
    regime_y: float
    regime_z: float
    warnings: list[str] = field(default_factory=list)

    @property
    def partition_holds(self) -> bool:
        return self.n1 + self.n2 == self.n_total

    def dominated(self) -> bool:
        return all(self.histogram[p] <= self.fitted_constant * self.shapes[p] * (1 + 1e-12) for p in self.histogram)

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "z": self.z,
            "r": self.r,
            "h": self.h,
            "n_total": self.n_total,
            "n1": self.n1,
            "n2": self.n2,
            "partition_holds": self.partition_holds,
            "fitted_constant": self.fitted_constant,
            "regime_y": self.regime_y,
            "regime_z": self.regime_z,
            "histogram": [{"p": p, "count": c, "shape": self.shapes[p]} for p, c in sorted(self.histogram.items())],
            "warnings": self.warnings,
        }


def split_diagnostic(
    prob: QuotientProblem,
    x: int,
    y: int | None = None,
    z: int | None = None,
    members: Sequence[int] | None = None,
    mode: str = "exact",
    threads: int = 1,
) -> SplitReport:
    """Split N(x) into N1 (avoids every Omega_p, p in (y, z]) and N2 (hits one)."""
    warnings = []
    if isinstance(prob.F, ExpPolyRecurrence):
        r, roots = prob.F.r, prob.F.roots
    else:
        r, roots = prob.F.order, ()
        warnings.append("F in companion form: r taken as the order k and no order filter applied")
    h = prob.h
    py, pz, reachable = regime_parameters(max(x, 3), r, max(h, 1))
    if y is None or z is None:
        if not reachable:
            raise RegimeError(
                f"asymptotic regime unreachable: y = (log x)^(2^r h) = {py:.4g} >= z = x^(1/2) = {pz:.4g}; "
                "pass y and z explicitly"
            )
        y = int(py) if y is None else y
        z = int(pz) if z is None else z
    elif not reachable:
        warnings.append(f"asymptotic regime unreachable (y = {py:.4g} >= z = {pz:.4g}); using supplied y, z")
    g = prob.normalized_G()
    system = build_sieve_system(g, roots, prob.inverted, y, z)
    warnings.extend(system.warnings)
    if members is None:
        members = list_members(prob, x, mode, threads)
    arr = np.array(members, dtype=np.int64)
    hit = np.zeros(len(arr), dtype=bool)
    histogram, shapes = {}, {}
    for p, res in sorted(system.residues.items()):
        mask = np.isin(arr % p, np.array(res, dtype=np.int64)) if res else np.zeros(len(arr), dtype=bool)
        histogram[p] = int(mask.sum())
        shapes[p] = x / p ** (1 + 1 / 2**r)
        hit |= mask
    n2 = int(hit.sum())
    ratios = [histogram[p] / shapes[p] for p in histogram]
    fitted = max(ratios, default=0.0)
    return SplitReport(x, y, z, r, h, len(arr), len(arr) - n2, n2, histogram, shapes, fitted, py, pz, warnings)


# ---------------------------------------------------------------------------
# Hardy-Littlewood family
# ---------------------------------------------------------------------------

def _check_tuple(tup: Sequence[int]) -> tuple[int, ...]:
    tup = tuple(int(t) for t in tup)
    if not tup:
        raise DomainError("tuple must be nonempty")
    if any(b <= a for a, b in zip(tup, tup[1:])) or tup[0] < 0:
        raise DomainError("tuple must be strictly increasing and nonnegative")
    return tup


def admissible(tup: Sequence[int]) -> tuple[bool, int | None]:
    """Whether some residue class mod every prime misses the tuple; else the covering prime."""
    tup = _check_tuple(tup)
    for p in range(2, len(tup) + 1):
        if is_prime(p) and len({t % p for t in tup}) == p:
            return False, p
    return True, None


def hl_members(tup: Sequence[int], x: int) -> np.ndarray:
    """Every ``n`` in ``[1, x]`` with ``n + n_i`` prime for all ``i``."""
    tup = _check_tuple(tup)
    if x + tup[-1] > 10**9:
        raise DomainError("x + max(tuple) is capped at 10**9")
    span = tup[-1]
    out = []
    seg = 1 << 20
    for lo in range(1, x + 1, seg):
        hi = min(lo + seg, x + 1)
        flags = np.concatenate([f for _, f in prime_segments(lo, hi + span, seg + span + 1)])
        ok = np.ones(hi - lo, dtype=bool)
        for t in tup:
            ok &= flags[t : t + hi - lo]
        out.append(lo + np.flatnonzero(ok))
    return np.concatenate(out) if out else np.zeros(0, np.int64)


def hl_count(tup: Sequence[int], x: int) -> int:
    """T_h(x) = #{n <= x : n + n_i prime for every i}."""
    return int(len(hl_members(tup, x)))


def hl_count_sieve(tup: Sequence[int], x: int) -> int:
    """T_h(x) through the residue sieve with ``Omega_p = {-n_i mod p}``, ``p <= sqrt(x + n_h)``.

    Survivors are exactly the ``n`` whose shifts have no prime factor up to the
    square root; the few ``n`` with a shift equal to 1 or to a small prime are
    corrected by direct inspection.
    """
    from .sieve import sieved_count

    tup = _check_tuple(tup)
    z = math.isqrt(x + tup[-1])
    G = IntPolynomial.from_roots([-t for t in tup])
    system = build_sieve_system(G, (), (), 1, z)
    if len(system.residues) != len(primes_up_to(max(z, 2)).up_to(z)):
        raise DomainError("tuple is not admissible at some sieving prime")
    count = sieved_count(x, system)

    def survives(n: int) -> bool:
        return all((n % p) not in res for p, res in system.residues.items())

    for n in range(1, min(x, z) + 1):
        shifts = [n + t for t in tup]
        if all(is_prime(s) for s in shifts) and not survives(n):
            count += 1
        if any(s == 1 for s in shifts) and survives(n):
            count -= 1
    return count


@dataclass
class SingularSeries:
    value: float
    truncation: int
    tail_bound: float


def singular_series(tup: Sequence[int], truncation: int = 10**6) -> SingularSeries:
    """``prod_{p <= P0} (1 - w(p)/p) / (1 - 1/p)^h`` with ``w(p)`` the residues hit mod p."""
    tup = _check_tuple(tup)
    ok, witness = admissible(tup)
    if not ok:
        raise DomainError(f"tuple is inadmissible at p = {witness}; the product vanishes")
    h = len(tup)
    primes = primes_up_to(max(truncation, 2)).primes
    w = np.full(len(primes), h, dtype=float)
    span = tup[-1] - tup[0]
    for i, p in enumerate(primes.tolist()):
        if p > span and p > h:
            break
        w[i] = len({t % p for t in tup})
    pf = primes.astype(float)
    terms = np.log1p(-w / pf) - h * np.log1p(-1.0 / pf)
    value = math.exp(math.fsum(terms.tolist()))
    tail = h * (h - 1) / 2 / (truncation * math.log(truncation)) if truncation > 1 else 0.0
    return SingularSeries(value, truncation, math.expm1(tail))


def hl_family(tup: Sequence[int]) -> QuotientProblem:
    """``F(n) = prod (2^(n+n_i) - 2)`` expanded in powers of ``2^n``, ``G(n) = prod (n + n_i)``."""
    tup = _check_tuple(tup)
    if len(tup) > 4:
        raise DomainError("the family is capped at h <= 4 (r = 2^h terms)")
    ok, witness = admissible(tup)
    if not ok:
        raise DomainError(f"tuple is inadmissible at p = {witness}")
    u_poly = IntPolynomial((1,))
    for t in tup:
        u_poly = u_poly * IntPolynomial((-2, 2**t))
    terms = tuple((IntPolynomial((c,)), 2**j) for j, c in enumerate(u_poly.coeffs) if c)
    G = IntPolynomial.from_roots([-t for t in tup])
    return QuotientProblem(ExpPolyRecurrence(terms), G)
