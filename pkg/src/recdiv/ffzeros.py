"""Zeros of ``m -> sum_i c_i a_i^m`` over F_q and the bound they obey."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .arith import FieldElement, FiniteField, field_make, is_prime, multiplicative_order
from .errors import DomainError, PreconditionError, RecdivError
from .parallel import map_chunks

MAX_Q = 1 << 20


class LemmaViolation(RecdivError):
    """A counted instance exceeded the bound; ``instance`` holds the counterexample."""

    def __init__(self, message: str, instance: dict):
        super().__init__(message)
        self.instance = instance


@dataclass(frozen=True)
class SparseInstance:
    field: FiniteField
    c: tuple[int, ...]
    a: tuple[int, ...]

    def __post_init__(self):
        if not self.c or len(self.c) != len(self.a):
            raise DomainError("need r >= 1 coefficients and as many bases")
        if any(v == 0 for v in self.c + self.a):
            raise DomainError("coefficients and bases must be nonzero")
        if len(set(self.a)) != len(self.a):
            raise DomainError("bases must be pairwise distinct")

    @classmethod
    def of(cls, fld: FiniteField, c: Sequence, a: Sequence) -> "SparseInstance":
        return cls(fld, tuple(fld(v).value for v in c), tuple(fld(v).value for v in a))

    @property
    def r(self) -> int:
        return len(self.c)

    def coefficients(self) -> list[FieldElement]:
        return [FieldElement(self.field, v) for v in self.c]

    def bases(self) -> list[FieldElement]:
        return [FieldElement(self.field, v) for v in self.a]

    def to_json(self) -> dict:
        f = self.field
        return {
            "p": f.p,
            "k": f.k,
            "modulus": list(f.modulus),
            "c": [f.decode(v) for v in self.c],
            "a": [f.decode(v) for v in self.a],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SparseInstance":
        p, k = int(data["p"]), int(data.get("k", 1))
        if "modulus" in data and k > 1:
            fld = FiniteField(p, k, tuple(int(v) for v in data["modulus"]))
        else:
            fld = field_make(p, k)
        conv = lambda v: fld(v if isinstance(v, list) else int(v))
        return cls(fld, tuple(conv(v).value for v in data["c"]), tuple(conv(v).value for v in data["a"]))


def _power_chain(fld: FiniteField, start: int, base: int, length: int) -> np.ndarray:
    table = fld.multiplication_table(base).tolist()
    out = [0] * length
    v = start
    for m in range(length):
        out[m] = v
        v = table[v]
    return np.array(out, dtype=np.int64)


def zero_exponents(inst: SparseInstance) -> np.ndarray:
    """All ``m`` in ``[0, q-2]`` with ``sum c_i a_i^m = 0``."""
    fld = inst.field
    if fld.q > MAX_Q:
        raise DomainError(f"brute force is capped at q <= {MAX_Q}")
    n = fld.q - 1
    chains = [_power_chain(fld, c, a, n) for c, a in zip(inst.c, inst.a)]
    if fld.k == 1:
        total = np.zeros(n, dtype=np.int64)
        for ch in chains:
            total = (total + ch) % fld.p
        return np.flatnonzero(total == 0)
    digits = fld.digit_matrix()
    total = np.zeros((n, fld.k), dtype=np.int64)
    for ch in chains:
        total = (total + digits[ch]) % fld.p
    return np.flatnonzero(~total.any(axis=1))


def sparse_zero_count(inst: SparseInstance) -> int:
    return int(len(zero_exponents(inst)))


def min_ratio_order(inst: SparseInstance, fallback: int | None = None) -> int:
    """Minimum multiplicative order of ``a_i / a_j`` over ``i != j``."""
    if inst.r < 2:
        if fallback is None:
            raise PreconditionError("r = 1: N is arbitrary, pass it explicitly")
        return fallback
    bs = inst.bases()
    return min(multiplicative_order(bs[i] / bs[j]) for i in range(inst.r) for j in range(i + 1, inst.r))


def ff_bound(q: int, N: int, r: int, form: str = "lemma") -> float | None:
    """``4(q-1) N^(-1/2^(r-2))``; ``form="proof"`` uses exponent ``1/2^r``.

    Returns None for ``r < 2`` in the lemma form, where no bound applies.
    """
    if N < 1:
        raise DomainError("N must be positive")
    if form == "lemma":
        if r < 2:
            return None
        return 4 * (q - 1) * N ** (-1.0 / 2 ** (r - 2))
    if form == "proof":
        return 4 * (q - 1) * N ** (-1.0 / 2**r)
    raise DomainError(f"unknown bound form {form!r}")


# ---------------------------------------------------------------------------
# stress harness
# ---------------------------------------------------------------------------

def prime_powers(q_max: int, k_max: int = 12) -> list[tuple[int, int]]:
    out = []
    for p in range(2, q_max + 1):
        if is_prime(p):
            k, q = 1, p
            while q <= q_max and k <= k_max:
                out.append((p, k))
                k += 1
                q *= p
    return sorted(out, key=lambda t: t[0] ** t[1])


@lru_cache(maxsize=256)
def _field(p: int, k: int) -> FiniteField:
    return field_make(p, k, seed=0)


@lru_cache(maxsize=256)
def _generator(fld: FiniteField) -> int:
    for v in range(2 if fld.q > 2 else 1, fld.q):
        if multiplicative_order(FieldElement(fld, v)) == fld.q - 1:
            return v
    return 1


def random_instance(rng: random.Random, q_max: int, r_values: Sequence[int]) -> SparseInstance:
    """A random instance; half the time the bases share a small subgroup so N is small."""
    pairs = prime_powers(q_max)
    r = rng.choice(list(r_values))
    while True:
        p, k = rng.choice(pairs)
        if p**k - 1 >= r:
            break
    fld = _field(p, k)
    n = fld.q - 1
    c = tuple(rng.randrange(1, fld.q) for _ in range(r))
    if rng.random() < 0.5:
        g = FieldElement(fld, _generator(fld))
        ds = [d for d in range(r, n + 1) if n % d == 0]
        d = rng.choice(ds)
        step = n // d
        exps = rng.sample(range(d), r)
        a = tuple((g ** (step * e)).value for e in exps)
        xs = rng.sample(range(fld.q - 1), 1)[0]
        shift = FieldElement(fld, 1 + xs)
        a = tuple((FieldElement(fld, v) * shift).value for v in a)
    else:
        a = tuple(rng.sample(range(1, fld.q), r))
    return SparseInstance(fld, c, a)


def check_instance(inst: SparseInstance) -> dict:
    q = inst.field.q
    count = sparse_zero_count(inst)
    if inst.r < 2:
        return {"q": q, "r": inst.r, "count": count, "N": None, "bound": None, "ratio": None}
    N = min_ratio_order(inst)
    bound = ff_bound(q, N, inst.r)
    return {"q": q, "r": inst.r, "count": count, "N": N, "bound": bound, "ratio": count / bound}


def _stress_chunk(args) -> list[dict]:
    seed, q_max, r_values, indices = args
    out = []
    for t in indices:
        rng = random.Random(f"{seed}:{t}")
        inst = random_instance(rng, q_max, r_values)
        rec = check_instance(inst)
        rec["trial"] = t
        rec["instance"] = inst.to_json()
        out.append(rec)
    return out


def stress_lemma(
    q_max: int = 1 << 12,
    r_values: Sequence[int] = (2, 3, 4),
    trials: int = 1000,
    seed: int = 0,
    threads: int = 1,
    chunk: int = 50,
) -> dict:
    """Count zeros on random instances and compare each with the bound.

    Any instance above its bound raises :class:`LemmaViolation`.
    """
    if q_max > 1 << 16:
        raise DomainError("stress instances are capped at q <= 2**16")
    r_values = tuple(sorted(r_values))
    pieces = [(seed, q_max, r_values, range(i, min(i + chunk, trials))) for i in range(0, trials, chunk)]
    records = [rec for part in map_chunks(_stress_chunk, pieces, threads) for rec in part]
    for rec in records:
        if rec["bound"] is not None and rec["count"] > rec["bound"]:
            raise LemmaViolation(
                f"trial {rec['trial']}: {rec['count']} zeros exceeds bound {rec['bound']:.6g}",
                rec["instance"],
            )
    ratios = [rec["ratio"] for rec in records if rec["ratio"] is not None]
    return {
        "trials": trials,
        "seed": seed,
        "q_max": q_max,
        "r_values": list(r_values),
        "violations": 0,
        "max_ratio": max(ratios) if ratios else None,
        "max_count": max((rec["count"] for rec in records), default=0),
        "records": [{k: v for k, v in rec.items() if k != "instance"} for rec in records],
    }


def stress_report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True)
