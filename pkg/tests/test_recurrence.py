import pytest
from hypothesis import given, settings, strategies as st

from recdiv.errors import DomainError, PreconditionError
from recdiv.polyzero import IntPolynomial
from recdiv.recurrence import (
    CompanionRecurrence,
    ExpPolyRecurrence,
    eval_exact,
    eval_mod,
    expand_to_companion,
    fibonacci,
    from_json,
    has_torsion,
    is_nondegenerate,
    iter_exact,
    lucas_sequence,
    period_mod,
    restrict_to_progression,
    state_at,
    to_json,
)


def fib_doubling(n):
    """Fast-doubling oracle, independent of the companion machinery."""
    def go(k):
        if k == 0:
            return 0, 1
        a, b = go(k >> 1)
        c = a * (2 * b - a)
        d = a * a + b * b
        return (d, c + d) if k & 1 else (c, d)
    return go(n)[0]


def naive(rec, n):
    vals = list(rec.init)
    while len(vals) <= n:
        vals.append(sum(c * v for c, v in zip(rec.coeffs, vals[-rec.order :])))
    return vals[n]


@given(st.integers(0, 3000))
@settings(max_examples=100, deadline=None)
def test_fibonacci_exact_vs_doubling(n):
    assert eval_exact(fibonacci(), n) == fib_doubling(n)


@given(st.integers(0, 10**12), st.integers(2, 10**6))
@settings(max_examples=100, deadline=None)
def test_fibonacci_mod_vs_doubling(n, m):
    # doubling mod m, independent reduction path
    def go(k):
        if k == 0:
            return 0, 1
        a, b = go(k >> 1)
        c = a * (2 * b - a) % m
        d = (a * a + b * b) % m
        return (d, (c + d) % m) if k & 1 else (c, d)
    assert eval_mod(fibonacci(), n, m) == go(n)[0]


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=4), st.data())
@settings(max_examples=80, deadline=None)
def test_companion_state_at_vs_naive(coeffs, data):
    if coeffs[0] == 0:
        coeffs[0] = 1
    init = data.draw(st.lists(st.integers(-5, 5), min_size=len(coeffs), max_size=len(coeffs)))
    rec = CompanionRecurrence(coeffs, init)
    n = data.draw(st.integers(0, 60))
    assert eval_exact(rec, n) == naive(rec, n)
    assert eval_mod(rec, n, 97) == naive(rec, n) % 97
    it = iter_exact(rec, n)
    assert [next(it) for _ in range(3)] == [naive(rec, n + i) for i in range(3)]


def test_exppoly_expansion():
    rec = ExpPolyRecurrence(((IntPolynomial((1, 2)), 3), (IntPolynomial((-5,)), -2)))
    comp = expand_to_companion(rec)
    for n in range(40):
        direct = (1 + 2 * n) * 3**n - 5 * (-2) ** n
        assert eval_exact(rec, n) == direct
        assert eval_exact(comp, n) == direct
        assert eval_mod(rec, n, 1001) == direct % 1001
    assert rec.order == 3 and rec.r == 2 and not rec.is_simple()


def test_exppoly_validation():
    with pytest.raises(DomainError):
        ExpPolyRecurrence(((IntPolynomial((1,)), 0),))
    with pytest.raises(DomainError):
        ExpPolyRecurrence(((IntPolynomial((1,)), 2), (IntPolynomial((3,)), 2)))
    with pytest.raises(DomainError):
        CompanionRecurrence((0, 1), (0, 1))


def test_degeneracy_and_torsion():
    rec = ExpPolyRecurrence(((IntPolynomial((1,)), 2), (IntPolynomial((1,)), -2)))
    assert is_nondegenerate(rec) == (False, (2, -2))
    assert has_torsion(rec) is True
    assert has_torsion(fibonacci()) is None
    ok = ExpPolyRecurrence(((IntPolynomial((1,)), 2), (IntPolynomial((1,)), 3)))
    assert is_nondegenerate(ok)[0] and has_torsion(ok) is False


def test_restrict_to_progression():
    rec = ExpPolyRecurrence(((IntPolynomial((1, 1)), -3), (IntPolynomial((2,)), 5)))
    for r in (0, 1):
        sub = restrict_to_progression(rec, 2, r)
        assert all(a > 0 for a in sub.roots)
        for n in range(20):
            assert eval_exact(sub, n) == eval_exact(rec, 2 * n + r)


def test_pisano_periods():
    known = {2: 3, 3: 8, 5: 20, 10: 60, 144: 24}
    for m, per in known.items():
        assert period_mod(fibonacci(), m) == per
    with pytest.raises(PreconditionError):
        period_mod(CompanionRecurrence((2, 1), (0, 1)), 4)


def test_lucas_and_json_roundtrip():
    rec = lucas_sequence(3, -2)  # 2^n - 1
    assert [eval_exact(rec, n) for n in range(8)] == [2**n - 1 for n in range(8)]
    for r in (rec, ExpPolyRecurrence(((IntPolynomial((10**30, 1)), 7),))):
        assert from_json(to_json(r)) == r


def test_state_at_large_n():
    assert state_at(fibonacci(), 1000)[0] == fib_doubling(1000)
