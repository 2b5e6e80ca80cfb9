"""Multiplicative functions: von Mangoldt companions, partial sums and Euler products."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .arith import primes_up_to
from .errors import DomainError

Rule = Callable[[int, int], Fraction]
VectorRule = Callable[[np.ndarray], np.ndarray]

MAX_X = 10**7


@dataclass(frozen=True)
class MultFnSpec:
    """A multiplicative ``g`` with ``g(1) = 1`` fixed by its prime-power values.

    ``rule(p, s)`` returns ``g(p**s)`` exactly. ``cutoff`` forces ``g(p**s) = 0``
    for ``p <= cutoff``; ``squarefree`` declares ``g(p**s) = 0`` for ``s >= 2``.
    ``decay`` is a constant ``D`` with ``|sum_s g(p**s) - 1 - h/p| <= D/p**2``
    for large ``p``; it only feeds the truncation estimate of the Euler product.
    """

    name: str
    rule: Rule
    h: float = 1.0
    L: float = 1.0
    cutoff: int = 0
    squarefree: bool = False
    decay: float = 1.0
    prime_rule: VectorRule | None = field(default=None, compare=False)
    support: tuple[int, int] | None = None

    def value(self, p: int, s: int) -> Fraction:
        if s == 0:
            return Fraction(1)
        if p <= self.cutoff or (self.squarefree and s >= 2):
            return Fraction(0)
        if self.support is not None and not self.support[0] < p <= self.support[1]:
            return Fraction(0)
        return Fraction(self.rule(p, s))

    def __call__(self, n: int) -> Fraction:
        """``g(n)`` by trial division; meant for small ``n`` and cross-checks."""
        out = Fraction(1)
        d = 2
        while d * d <= n:
            if n % d == 0:
                s = 0
                while n % d == 0:
                    n //= d
                    s += 1
                out *= self.value(d, s)
            d += 1
        if n > 1:
            out *= self.value(n, 1)
        return out

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        """``g(p)`` as floats for an array of primes."""
        if self.prime_rule is not None:
            vals = np.asarray(self.prime_rule(primes), dtype=float)
        else:
            vals = np.array([float(self.rule(p, 1)) for p in primes.tolist()], dtype=float)
        mask = primes <= self.cutoff
        if self.support is not None:
            mask |= (primes <= self.support[0]) | (primes > self.support[1])
        vals[mask] = 0.0
        return vals


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def squarefree_weight(k: int = 1, cutoff: int = 0) -> MultFnSpec:
    """``g(p) = k/p`` on squarefree support (``k = 1`` is mu^2(n)/n)."""
    name = "mu2_over_n" if k == 1 and cutoff == 0 else f"squarefree_k_over_n:{k}"
    return MultFnSpec(
        name,
        lambda p, s: Fraction(k, p) if s == 1 else Fraction(0),
        h=k,
        cutoff=cutoff,
        squarefree=True,
        decay=0.0,
        prime_rule=lambda ps: k / ps.astype(float),
    )


def mu2_over_n() -> MultFnSpec:
    return squarefree_weight(1)


def divisor_over_n() -> MultFnSpec:
    """``g(n) = d(n)/n``; ``sum_s (s+1)/p^s = (1 - 1/p)^-2`` so ``h = 2``."""
    return MultFnSpec(
        "divisor_over_n",
        lambda p, s: Fraction(s + 1, p**s),
        h=2,
        decay=3.0,
        prime_rule=lambda ps: 2 / ps.astype(float),
    )


def trivial() -> MultFnSpec:
    """``g(1) = 1`` and zero elsewhere."""
    return MultFnSpec("trivial", lambda p, s: Fraction(0), h=0, squarefree=True, decay=0.0,
                      prime_rule=lambda ps: np.zeros(len(ps)))


def gy_single_residue(y: int) -> MultFnSpec:
    """``g_y`` for ``Omega_p = {0}``: ``g_y(p) = 1/(p-1)`` for ``p > y``."""
    return MultFnSpec(
        f"gy_single_residue:{y}",
        lambda p, s: Fraction(1, p - 1),
        h=1,
        L=math.log(max(y, 2)),
        cutoff=y,
        squarefree=True,
        decay=2.0,
        prime_rule=lambda ps: 1 / (ps.astype(float) - 1),
    )


def catalog(name: str) -> MultFnSpec:
    """Resolve a built-in name such as ``mu2_over_n`` or ``squarefree_k_over_n:2``."""
    base, _, arg = name.partition(":")
    if base == "mu2_over_n":
        return mu2_over_n()
    if base == "squarefree_k_over_n":
        return squarefree_weight(int(arg or 1))
    if base == "divisor_over_n":
        return divisor_over_n()
    if base == "trivial":
        return trivial()
    if base == "gy_single_residue":
        return gy_single_residue(int(arg or 2))
    raise DomainError(f"unknown multiplicative function {name!r}")


# ---------------------------------------------------------------------------
# von Mangoldt companion
# ---------------------------------------------------------------------------

@dataclass
class VonMangoldtTable:
    x: int
    support: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self._index = {int(n): float(v) for n, v in zip(self.support.tolist(), self.values.tolist())}

    def __getitem__(self, n: int) -> float:
        return self._index.get(int(n), 0.0)

    def cumulative(self, w: int) -> float:
        k = int(np.searchsorted(self.support, w, side="right"))
        return math.fsum(self.values[:k].tolist())


def lambda_g(g: MultFnSpec, x: int) -> VonMangoldtTable:
    """Lambda_g on prime powers ``<= x``.

    Uses ``Lambda(p^s) = s g(p^s) log p - sum_{t<s} g(p^(s-t)) Lambda(p^t)``.
    """
    if x > MAX_X:
        raise DomainError(f"x is capped at {MAX_X}")
    if x < 2:
        return VonMangoldtTable(x, np.zeros(0, np.int64), np.zeros(0))
    primes = primes_up_to(x).primes
    support: list[int] = []
    values: list[float] = []
    small = primes[primes <= math.isqrt(x)].tolist()
    gp = g.prime_values(primes)
    logs = np.log(primes.astype(float))
    support.extend(primes.tolist())
    values.extend((gp * logs).tolist())
    for p in small:
        lp = math.log(p)
        gv = [1.0]
        lam = [0.0, float(g.value(p, 1)) * lp]
        q, s = p * p, 2
        while q <= x:
            while len(gv) <= s:
                gv.append(float(g.value(p, len(gv))))
            v = s * gv[s] * lp - math.fsum(gv[s - t] * lam[t] for t in range(1, s))
            lam.append(v)
            support.append(q)
            values.append(v)
            q *= p
            s += 1
    order = np.argsort(np.array(support, dtype=np.int64), kind="stable")
    return VonMangoldtTable(x, np.array(support, dtype=np.int64)[order], np.array(values)[order])


def lambda_residuals(g: MultFnSpec, ws: Sequence[int]) -> list[float]:
    """``sum_{n <= w} Lambda_g(n) - h log w`` at each ``w``."""
    table = lambda_g(g, max(ws))
    return [table.cumulative(w) - g.h * math.log(w) for w in ws]


# ---------------------------------------------------------------------------
# partial sums
# ---------------------------------------------------------------------------

def g_values(g: MultFnSpec, x: int) -> np.ndarray:
    """``g(n)`` as floats for ``0 <= n <= x`` (index 0 holds 0)."""
    if x > MAX_X:
        raise DomainError(f"x is capped at {MAX_X}")
    out = np.ones(x + 1)
    out[0] = 0.0
    if x < 2:
        return out
    primes = primes_up_to(x).primes
    gp = g.prime_values(primes)
    root = math.isqrt(x)
    for p, v in zip(primes.tolist(), gp.tolist()):
        if p > root:
            if v != 1.0:
                out[p::p] *= v
            continue
        factor = np.full(x // p, v)
        q, s = p * p, 2
        while q <= x:
            factor[q // p - 1 :: q // p] = float(g.value(p, s))
            q *= p
            s += 1
        out[p::p] *= factor
    return out


@dataclass
class WirsingRow:
    x: int
    sum: float
    ratio: float
    abs_ratio: float


def wirsing_sum(g: MultFnSpec, x: int | Sequence[int]) -> WirsingRow | list[WirsingRow]:
    """``sum_{n <= x} g(n)`` and its ratio against ``(log x)^h``.

    With a sequence of thresholds the table is built once and a row is
    returned per threshold.
    """
    xs = [x] if isinstance(x, int) else sorted(x)
    vals = g_values(g, max(xs))
    rows = []
    for t in xs:
        chunk = vals[1 : t + 1].tolist()
        total = math.fsum(chunk)
        absum = math.fsum(abs(v) for v in chunk)
        scale = math.log(t) ** g.h if t > 1 else 1.0
        rows.append(WirsingRow(t, total, total / scale, absum / scale))
    return rows[0] if isinstance(x, int) else rows


def _local_factor(g: MultFnSpec, p: int, max_terms: int = 200) -> float:
    """``sum_s g(p^s)`` with a geometric-tail convergence check."""
    if g.squarefree or p <= g.cutoff:
        return 1.0 + float(g.value(p, 1))
    total, prev = 1.0, None
    for s in range(1, max_terms):
        term = float(g.value(p, s))
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            return total
        if prev is not None and prev != 0 and s > 8 and abs(term / prev) >= 1.0:
            raise DomainError(f"prime-power series diverges at p={p}")
        prev = term
    raise DomainError(f"prime-power series at p={p} did not converge in {max_terms} terms")


@dataclass
class EulerConstant:
    value: float
    truncation: int
    h: float
    tail_bound: float  # relative error estimate from primes beyond the truncation


def euler_constant_cg(g: MultFnSpec, h: float | None = None, truncation: int = 10**5) -> EulerConstant:
    """``Gamma(h+1)^-1 prod_{p <= P0} (sum_s g(p^s)) (1 - 1/p)^h``, summed in log space."""
    h = g.h if h is None else h
    if truncation > MAX_X:
        raise DomainError(f"truncation is capped at {MAX_X}")
    primes = primes_up_to(max(truncation, 2)).primes
    if g.squarefree:
        local = 1.0 + g.prime_values(primes)
    else:
        local = np.array([_local_factor(g, p) for p in primes.tolist()])
    if np.any(local <= 0):
        bad = int(primes[np.argmax(local <= 0)])
        if np.any(local == 0):
            return EulerConstant(0.0, truncation, h, 0.0)
        raise DomainError(f"local factor at p={bad} is negative")
    terms = np.log(local) + h * np.log1p(-1.0 / primes.astype(float))
    log_c = math.fsum(terms.tolist()) - math.lgamma(h + 1)
    tail = (g.decay + h * h + h) / (truncation * math.log(truncation))
    return EulerConstant(math.exp(log_c), truncation, h, math.expm1(tail))
