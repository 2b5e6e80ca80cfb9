"""Integer polynomials: factoring over Z, zeros mod p, and the Kronecker statistic."""

from __future__ import annotations

import ast
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import gfpoly
from .arith import batch_powmod, divisors, primes_up_to
from .errors import DomainError, VanishesIdentically
from .parallel import map_chunks

SCAN_LIMIT = 10_000
MAX_FACTOR_DEGREE = 8


@dataclass(frozen=True)
class IntPolynomial:
    """Dense polynomial with integer coefficients, lowest degree first."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    # construction ------------------------------------------------------
    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> "IntPolynomial":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> "IntPolynomial":
        out = cls((1,))
        for r in roots:
            out = out * cls((-r, 1))
        return out

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse a JSON coefficient list or an expression in ``x``.

        ``'["1", "0", "1"]'``, ``"x^2 + 1"`` and ``"(x**2+1)*(x**2-2)"`` are all
        accepted.
        """
        text = text.strip()
        if text.startswith("["):
            return cls.from_json(json.loads(text))
        try:
            tree = ast.parse(text.replace("^", "**").replace("X", "x"), mode="eval")
        except SyntaxError as exc:
            raise DomainError(f"bad polynomial literal {text!r} at column {exc.offset}") from exc
        return _eval_ast(tree.body)

    @classmethod
    def from_json(cls, data: Sequence) -> "IntPolynomial":
        return cls(int(str(c)) for c in data)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    # basic properties --------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        """Primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        c = self.content() * (1 if self.leading > 0 else -1)
        return IntPolynomial(a // c for a in self.coeffs)

    def __call__(self, n: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def mod_p(self, p: int) -> list[int]:
        return gfpoly.trim(self.coeffs, p)

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    # arithmetic --------------------------------------------------------
    def __add__(self, other) -> "IntPolynomial":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other) -> "IntPolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "IntPolynomial":
        return _as_poly(other) - self

    def __mul__(self, other) -> "IntPolynomial":
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IntPolynomial":
        out = IntPolynomial((1,))
        for _ in range(e):
            out = out * self
        return out

    def exact_div(self, other: "IntPolynomial") -> "IntPolynomial | None":
        """Quotient in Z[X] if ``other`` divides ``self`` exactly, else None."""
        q, r = _qdivmod(_to_q(self), _to_q(other))
        if r or any(c.denominator != 1 for c in q):
            return None
        return IntPolynomial(int(c) for c in q)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            mag = abs(c)
            body = f"{mag}" if (mag != 1 or not mono) else ""
            if body and mono:
                body += "*"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body + mono))
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {s} {t}" for s, t in terms[1:])


def _as_poly(v) -> IntPolynomial:
    if isinstance(v, IntPolynomial):
        return v
    if isinstance(v, int):
        return IntPolynomial((v,))
    raise TypeError(f"cannot use {type(v).__name__} as a polynomial")


def _eval_ast(node) -> IntPolynomial:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return IntPolynomial((node.value,))
    if isinstance(node, ast.Name) and node.id == "x":
        return IntPolynomial.x()
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_ast(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval_ast(node.left)
        if isinstance(node.op, ast.Pow):
            e = _eval_ast(node.right)
            if e.degree > 0 or (e.coeffs and e.coeffs[0] < 0):
                raise DomainError("exponent must be a nonnegative integer")
            return left ** (e.coeffs[0] if e.coeffs else 0)
        right = _eval_ast(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
    raise DomainError(f"unsupported polynomial syntax at column {getattr(node, 'col_offset', '?')}")


# ---------------------------------------------------------------------------
# polynomial arithmetic over Q (degree <= 8, so plain Fractions suffice)
# ---------------------------------------------------------------------------

def _to_q(f: IntPolynomial) -> list[Fraction]:
    return [Fraction(c) for c in f.coeffs]


def _qtrim(f: list[Fraction]) -> list[Fraction]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _qdivmod(f: list[Fraction], g: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    if len(r) - 1 < dg:
        return [], _qtrim(r)
    q = [Fraction(0)] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i] / g[-1]
        q[i - dg] = c
        if c:
            for j, b in enumerate(g):
                r[i - dg + j] -= c * b
    return _qtrim(q), _qtrim(r[:dg])


def _from_q(f: list[Fraction]) -> IntPolynomial:
    """Primitive integer polynomial proportional to ``f``."""
    if not f:
        return IntPolynomial()
    den = math.lcm(*(c.denominator for c in f))
    return IntPolynomial(int(c * den) for c in f).primitive()


def poly_gcd(f: IntPolynomial, g: IntPolynomial) -> IntPolynomial:
    """Primitive gcd over Q[X] with positive leading coefficient (zero if both zero)."""
    a, b = _to_q(f), _to_q(g)
    while b:
        a, b = b, _qdivmod(a, b)[1]
    return _from_q(a)


# ---------------------------------------------------------------------------
# discriminant
# ---------------------------------------------------------------------------

def _bareiss_det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Sylvester-matrix resultant."""
    m, n = f.degree, g.degree
    if m < 0 or n < 0:
        return 0
    size = m + n
    if size == 0:
        return 1
    rows = []
    fc, gc = list(reversed(f.coeffs)), list(reversed(g.coeffs))
    for i in range(n):
        rows.append([0] * i + fc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gc + [0] * (size - n - 1 - i))
    return _bareiss_det(rows)


def discriminant(f: IntPolynomial) -> int:
    n = f.degree
    if n < 1:
        raise DomainError("discriminant needs degree >= 1")
    if n == 1:
        return 1
    res = resultant(f, f.derivative())
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    q, r = divmod(sign * res, f.leading)
    assert r == 0
    return q


# ---------------------------------------------------------------------------
# zeros modulo p
# ---------------------------------------------------------------------------

def _scan_roots(coeffs: Sequence[int], p: int) -> np.ndarray:
    ell = np.arange(p, dtype=object if p >= 1 << 31 else np.int64)
    acc = np.zeros(p, dtype=ell.dtype)
    for c in reversed(coeffs):
        acc = (acc * ell + c % p) % p
    return np.flatnonzero(acc == 0)


def _split_roots(h: list[int], p: int, salt: int = 0) -> list[int]:
    """Roots of a monic ``h`` that splits into distinct linear factors over F_p."""
    d = gfpoly.degree(h)
    if d <= 0:
        return []
    if d == 1:
        return [(-h[0]) % p]
    a = 1 + salt
    while True:
        w = gfpoly.powmod([a % p, 1], (p - 1) // 2, h, p)
        g = gfpoly.gcd(gfpoly.sub(w, [1], p), h, p)
        if 0 < gfpoly.degree(g) < d:
            rest = gfpoly.divmod_(h, g, p)[0]
            return _split_roots(g, p, a) + _split_roots(gfpoly.monic(rest, p), p, a)
        a += 1


def roots_mod_p(f: IntPolynomial, p: int) -> list[int]:
    """Sorted distinct residues ``l`` in ``[0, p)`` with ``f(l) = 0 mod p``."""
    fp = f.mod_p(p)
    if not fp:
        raise VanishesIdentically(f"{f} vanishes identically mod {p}")
    if p <= SCAN_LIMIT:
        return _scan_roots(fp, p).tolist()
    if len(fp) == 1:
        return []
    xp = gfpoly.powmod([0, 1], p, fp, p)
    h = gfpoly.gcd(gfpoly.sub(xp, [0, 1], p), fp, p)
    return sorted(_split_roots(h, p))


def zeros_mod_p(f: IntPolynomial, p: int, method: str = "auto") -> int:
    """eta_f(p): number of distinct zeros of ``f`` modulo ``p``.

    ``method`` is ``"scan"``, ``"gcd"`` or ``"auto"`` (scan up to 10**4).
    """
    fp = f.mod_p(p)
    if not fp:
        raise VanishesIdentically(f"{f} vanishes identically mod {p}")
    if method == "scan" or (method == "auto" and p <= SCAN_LIMIT):
        return int(len(_scan_roots(fp, p)))
    return gfpoly.count_roots(fp, p)


def _xpow_batch(coeffs: Sequence[int], primes: np.ndarray) -> np.ndarray:
    """``X**p mod (f mod p)`` for every ``p`` in ``primes`` at once.

    ``f`` must keep its degree modulo each prime and every prime must lie below
    ``2**31``. Returns an array of shape ``(len(primes), deg f)``.
    """
    d = len(coeffs) - 1
    P = primes.astype(np.int64)[:, None]
    inv = batch_powmod(np.array([coeffs[-1] % p for p in primes.tolist()], dtype=np.int64), primes - 2, primes)
    fc = np.array([[c % int(p) for c in coeffs[:-1]] for p in primes], dtype=np.int64)
    fm = fc * inv[:, None] % P  # monic: X^d = -sum fm_i X^i

    def reduce(t: np.ndarray) -> np.ndarray:
        for k in range(t.shape[1] - 1, d - 1, -1):
            c = t[:, k : k + 1]
            t[:, k - d : k] = (t[:, k - d : k] - c * fm) % P
        return t[:, :d]

    m = len(primes)
    res = np.zeros((m, d), dtype=np.int64)
    res[:, 0] = 1
    nbits = int(primes.max()).bit_length()
    for bit in range(nbits - 1, -1, -1):
        sq = np.zeros((m, 2 * d - 1), dtype=np.int64)
        for i in range(d):
            sq[:, i : i + d] = (sq[:, i : i + d] + res[:, i : i + 1] * res) % P
        res = reduce(sq) if d > 1 else sq[:, :1] % P
        has = ((primes >> bit) & 1).astype(bool)
        if has.any():
            shifted = np.zeros((m, d + 1), dtype=np.int64)
            shifted[:, 1:] = res
            shifted = reduce(shifted)
            res = np.where(has[:, None], shifted, res)
    return res


def _eta_chunk(args: tuple[tuple[int, ...], np.ndarray]) -> np.ndarray:
    coeffs, primes = args
    f = IntPolynomial(coeffs)
    eta = np.full(len(primes), -1, dtype=np.int64)
    batch = []
    for i, p in enumerate(primes.tolist()):
        fp = f.mod_p(p)
        if not fp:
            continue
        if p <= SCAN_LIMIT or p >= 1 << 31 or len(fp) != len(f.coeffs):
            eta[i] = zeros_mod_p(f, p)
        else:
            batch.append(i)
    if batch:
        idx = np.array(batch)
        ps = primes[idx]
        if f.degree == 1:
            eta[idx] = 1
        else:
            xp = _xpow_batch(f.coeffs, ps)
            for row, i, p in zip(xp.tolist(), idx.tolist(), ps.tolist()):
                h = gfpoly.sub(gfpoly.trim(row, p), [0, 1], p)
                eta[i] = gfpoly.degree(gfpoly.gcd(h, f.mod_p(p), p))
    return eta


def eta_table(f: IntPolynomial, primes: np.ndarray, threads: int = 1, chunk: int = 8192) -> np.ndarray:
    """eta_f(p) for each prime; ``-1`` marks primes where ``f`` vanishes identically."""
    if f.degree < 1:
        raise DomainError("need a nonconstant polynomial")
    pieces = [(f.coeffs, primes[i : i + chunk]) for i in range(0, len(primes), chunk)]
    return np.concatenate(map_chunks(_eta_chunk, pieces, threads)) if pieces else np.zeros(0, np.int64)


# ---------------------------------------------------------------------------
# factorization over Z
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorizationZ:
    content: int
    factors: tuple[tuple[IntPolynomial, int], ...]

    @property
    def h(self) -> int:
        return sum(1 for g, _ in self.factors if g.degree >= 1)

    def expand(self) -> IntPolynomial:
        out = IntPolynomial((self.content,))
        for g, e in self.factors:
            out = out * g**e
        return out


def _squarefree_parts(f: IntPolynomial) -> list[tuple[IntPolynomial, int]]:
    """Yun's algorithm over Q; ``f`` primitive with positive leading coefficient."""
    out = []
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f.exact_div(a) if a.degree > 0 else f
    c = df.exact_div(a) if a.degree > 0 else df
    # work over Q to avoid content bookkeeping
    bq, cq = _to_q(b), _to_q(c)
    i = 1
    while len(bq) > 1:
        dq = _qsub(cq, _qderiv(bq))
        a = _from_q(_qgcd(bq, dq))
        aq = _to_q(a)
        if a.degree > 0:
            out.append((a, i))
        bq = _qdivmod(bq, aq)[0]
        cq = _qdivmod(dq, aq)[0]
        i += 1
    return out


def _qsub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _qtrim([x - y for x, y in zip(a, b)])


def _qderiv(a: list[Fraction]) -> list[Fraction]:
    return _qtrim([i * c for i, c in enumerate(a) if i])


def _qgcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    while b:
        a, b = b, _qdivmod(a, b)[1]
    return a


def _rational_roots(f: IntPolynomial) -> list[Fraction]:
    a0, an = f.coeffs[0], f.leading
    if a0 == 0:
        return [Fraction(0)]
    out = []
    for u in divisors(abs(a0)):
        for v in divisors(abs(an)):
            for s in (1, -1):
                r = Fraction(s * u, v)
                if r not in out and _qeval(f, r) == 0:
                    out.append(r)
    return out


def _qeval(f: IntPolynomial, r: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(f.coeffs):
        acc = acc * r + c
    return acc


def _lagrange_basis(points: Sequence[int]) -> list[list[Fraction]]:
    basis = []
    for i, xi in enumerate(points):
        poly = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(points):
            if j == i:
                continue
            poly = [Fraction(0)] + poly
            for k in range(len(poly) - 1):
                poly[k] -= xj * poly[k + 1]
            denom *= xi - xj
        basis.append([c / denom for c in poly])
    return basis


def _kronecker_factor(f: IntPolynomial, d: int) -> IntPolynomial | None:
    """A factor of ``f`` of degree exactly ``d`` found by interpolation, or None."""
    candidates = []
    for a in sorted(range(-40, 41), key=abs):
        v = f(a)
        if v != 0:
            candidates.append((len(divisors(abs(v))), abs(a), a, v))
    candidates.sort()
    chosen = candidates[: d + 1]
    points = [c[2] for c in chosen]
    values = [c[3] for c in chosen]
    basis = _lagrange_basis(points)
    divs = [divisors(abs(v)) for v in values]
    lead, const = abs(f.leading), abs(f.coeffs[0])
    options = [[s * dv for dv in ds for s in (1, -1)] for ds in divs]
    options[0] = divs[0]  # fix the overall sign
    for combo in itertools.product(*options):
        coeffs = [Fraction(0)] * (d + 1)
        for val, bas in zip(combo, basis):
            for k, c in enumerate(bas):
                coeffs[k] += val * c
        if coeffs[d] == 0 or any(c.denominator != 1 for c in coeffs):
            continue
        g = IntPolynomial(int(c) for c in coeffs)
        if lead % g.leading or (g.coeffs[0] == 0 or const % g.coeffs[0]):
            continue
        if f.exact_div(g) is not None:
            return g.primitive()
    return None


def _factor_squarefree(f: IntPolynomial) -> list[IntPolynomial]:
    """Irreducible primitive factors of a squarefree primitive ``f``."""
    if f.degree <= 1:
        return [f]
    for r in _rational_roots(f):
        lin = IntPolynomial((-r.numerator, r.denominator))
        rest = f.exact_div(lin)
        if rest is not None:
            return [lin.primitive()] + _factor_squarefree(rest.primitive())
    for d in range(2, f.degree // 2 + 1):
        g = _kronecker_factor(f, d)
        if g is not None:
            rest = f.exact_div(g)
            return _factor_squarefree(g) + _factor_squarefree(rest.primitive())
    return [f]


def factor_over_Z(f: IntPolynomial) -> FactorizationZ:
    """Content and irreducible primitive factors of ``f`` in Z[X]."""
    if f.is_zero():
        raise DomainError("cannot factor the zero polynomial")
    if f.degree > MAX_FACTOR_DEGREE:
        raise DomainError(f"degree {f.degree} exceeds the supported cap of {MAX_FACTOR_DEGREE}")
    if f.degree == 0:
        return FactorizationZ(f.coeffs[0], ())
    prim = f.primitive()
    content = f.leading // prim.leading
    mult: dict[IntPolynomial, int] = {}
    for part, e in _squarefree_parts(prim):
        for g in _factor_squarefree(part):
            mult[g] = mult.get(g, 0) + e
    factors = tuple(sorted(mult.items(), key=lambda t: (t[0].degree, t[0].coeffs)))
    return FactorizationZ(content, factors)


# ---------------------------------------------------------------------------
# Kronecker statistic
# ---------------------------------------------------------------------------

@dataclass
class KroneckerResult:
    poly: IntPolynomial
    x: int
    h: int
    points: list[int]
    sums: list[float]
    slope: float
    intercept: float
    residuals: list[float] = field(default_factory=list)
    excluded_primes: list[int] = field(default_factory=list)

    @property
    def slope_error(self) -> float:
        return abs(self.slope - self.h)

    @property
    def max_residual(self) -> float:
        return max(abs(r) for r in self.residuals) if self.residuals else 0.0


def default_points(x: int) -> list[int]:
    pts = [10**k for k in range(2, 20) if 10**k <= x]
    if not pts or pts[-1] != x:
        pts.append(x)
    return pts


def kronecker_statistic(
    f: IntPolynomial,
    x: int,
    points: Sequence[int] | None = None,
    threads: int = 1,
) -> KroneckerResult:
    """Tabulate sum_{p <= t} eta_f(p) log p / p and fit its slope against log t."""
    if f.degree < 1:
        raise DomainError("the statistic needs a nonconstant polynomial")
    if x > 10**8:
        raise DomainError("x is capped at 10**8")
    pts = sorted(points) if points else default_points(x)
    if pts[-1] > x:
        raise DomainError("sample points must not exceed x")
    h = factor_over_Z(f).h
    primes = primes_up_to(max(x, 2)).primes
    eta = eta_table(f, primes, threads)
    excluded = primes[eta < 0].tolist()
    plist = primes.tolist()
    terms = [e * math.log(p) / p if e > 0 else 0.0 for e, p in zip(eta.tolist(), plist)]
    sums = []
    for t in pts:
        k = int(np.searchsorted(primes, t, side="right"))
        sums.append(math.fsum(terms[:k]))
    logs = np.log(np.array(pts, dtype=float))
    if len(pts) >= 2:
        slope, intercept = np.polyfit(logs, np.array(sums), 1)
    else:
        slope, intercept = float("nan"), float("nan")
    residuals = [s - h * math.log(t) for s, t in zip(sums, pts)]
    return KroneckerResult(f, x, h, list(pts), sums, float(slope), float(intercept), residuals, excluded)
