import math

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from recdiv.errors import DomainError, VanishesIdentically
from recdiv.polyzero import (
    IntPolynomial,
    discriminant,
    eta_table,
    factor_over_Z,
    kronecker_statistic,
    resultant,
    roots_mod_p,
    zeros_mod_p,
)
from recdiv.arith import primes_up_to

X = sympy.symbols("x")


def to_sym(f):
    return sum(int(c) * X**i for i, c in enumerate(f.coeffs))


def test_parse_forms():
    assert IntPolynomial.parse("x^2+1").coeffs == (1, 0, 1)
    assert IntPolynomial.parse("(x**2+1)*(x**2-2)").coeffs == (-2, 0, -1, 0, 1)
    assert IntPolynomial.parse("[3, 0, 1]").coeffs == (3, 0, 1)
    assert IntPolynomial.parse("2*x - 7").coeffs == (-7, 2)
    with pytest.raises(DomainError):
        IntPolynomial.parse("x^")


def test_json_roundtrip_bignum():
    f = IntPolynomial((10**40 + 1, -3, 7))
    assert IntPolynomial.from_json(f.to_json()) == f


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=5), st.lists(st.integers(-20, 20), min_size=1, max_size=5))
@settings(max_examples=100, deadline=None)
def test_arithmetic_matches_sympy(a, b):
    f, g = IntPolynomial(a), IntPolynomial(b)
    assert sympy.expand(to_sym(f * g) - to_sym(f) * to_sym(g)) == 0
    assert sympy.expand(to_sym(f + g) - to_sym(f) - to_sym(g)) == 0


@pytest.mark.parametrize(
    "text,h",
    [("x", 1), ("x^2+1", 1), ("(x^2+1)*(x^2-2)", 2), ("x^2+2*x", 2), ("(x-1)^3*(x+2)", 2), ("6*x^4-6", 3)],
)
def test_factor_counts_distinct_factors(text, h):
    f = IntPolynomial.parse(text)
    fz = factor_over_Z(f)
    assert fz.h == h
    assert fz.expand() == f
    assert fz.h == len(sympy.factor_list(to_sym(f))[1])


@given(st.lists(st.integers(-9, 9), min_size=2, max_size=7))
@settings(max_examples=60, deadline=None)
def test_factor_vs_sympy(coeffs):
    f = IntPolynomial(coeffs)
    if f.degree < 1:
        return
    fz = factor_over_Z(f)
    assert fz.expand() == f
    assert fz.h == len(sympy.factor_list(to_sym(f))[1])


def test_factor_degree_cap():
    with pytest.raises(DomainError):
        factor_over_Z(IntPolynomial([1] * 10))


def test_discriminant_and_resultant():
    assert discriminant(IntPolynomial.parse("x^2+1")) == -4
    assert discriminant(IntPolynomial.parse("x^2-2")) == 8
    for text in ("x^3-x+1", "2*x^3+5*x-7", "x^4+x+3"):
        f = IntPolynomial.parse(text)
        assert discriminant(f) == sympy.discriminant(to_sym(f), X)
    f, g = IntPolynomial.parse("x^2+1"), IntPolynomial.parse("x^3-2")
    assert resultant(f, g) == sympy.resultant(to_sym(f), to_sym(g), X)


def test_roots_mod_p_scan_and_splitting():
    f = IntPolynomial.parse("x^2+1")
    for p in (5, 13, 10007, 1000003):
        rts = roots_mod_p(f, p)
        assert all(f(r) % p == 0 for r in rts)
        assert len(rts) == (2 if p % 4 == 1 else 0)
    assert roots_mod_p(f, 1000039) == []
    g = IntPolynomial.parse("(x-3)*(x-5)*(x-1000)")
    assert sorted(roots_mod_p(g, 1000003)) == [3, 5, 1000]


def test_zeros_methods_agree():
    f = IntPolynomial.parse("x^3-2")
    for p in primes_up_to(600).primes:
        p = int(p)
        assert zeros_mod_p(f, p, "scan") == zeros_mod_p(f, p, "gcd")


def test_vanishing_polynomial_raises():
    with pytest.raises(VanishesIdentically):
        roots_mod_p(IntPolynomial((0, 2)), 2)
    assert eta_table(IntPolynomial((0, 2)), primes_up_to(10).primes)[0] == -1


def test_eta_table_matches_scan():
    f = IntPolynomial.parse("(x^2+1)*(x^2-2)")
    ps = primes_up_to(3000).primes
    eta = eta_table(f, ps)
    for p, e in zip(ps, eta):
        p = int(p)
        assert e == sum(1 for x in range(p) if f(x) % p == 0)


def test_kronecker_small():
    res = kronecker_statistic(IntPolynomial.parse("x"), 10**4, [100, 1000, 10**4])
    want = sum(math.log(p) / p for p in sympy.primerange(2, 10**4 + 1))
    assert res.sums[-1] == pytest.approx(want, rel=1e-12)
    assert res.h == 1
