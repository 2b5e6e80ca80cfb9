import random

import pytest
from hypothesis import given, settings, strategies as st

from recdiv.arith import FieldElement, field_make, multiplicative_order
from recdiv.ffzeros import (
    LemmaViolation,
    SparseInstance,
    check_instance,
    ff_bound,
    min_ratio_order,
    random_instance,
    sparse_zero_count,
    stress_lemma,
    zero_exponents,
)
from recdiv.errors import DomainError, PreconditionError


def slow_zeros(inst):
    """Element-by-element oracle using FieldElement powers."""
    cs, bs = inst.coefficients(), inst.bases()
    out = []
    for m in range(inst.field.q - 1):
        total = cs[0] * bs[0] ** m
        for c, b in zip(cs[1:], bs[1:]):
            total = total + c * b**m
        if total == 0:
            out.append(m)
    return out


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_zero_exponents_vs_slow(seed):
    inst = random_instance(random.Random(seed), 256, (1, 2, 3, 4))
    assert zero_exponents(inst).tolist() == slow_zeros(inst)


def test_prime_field_known_case():
    F = field_make(7, 1)
    # 2^m - 4^m = 0 mod 7 iff 2^m = 1 iff 3 | m
    inst = SparseInstance.of(F, [1, -1], [2, 4])
    assert zero_exponents(inst).tolist() == [0, 3]
    assert min_ratio_order(inst) == multiplicative_order(FieldElement(F, 2) / FieldElement(F, 4))


def test_bound_forms():
    assert ff_bound(17, 16, 2) == pytest.approx(4)
    assert ff_bound(17, 16, 3) == pytest.approx(16)
    assert ff_bound(17, 16, 2, "proof") == pytest.approx(32)
    assert ff_bound(17, 16, 1) is None
    with pytest.raises(DomainError):
        ff_bound(17, 16, 2, "other")


def test_r1_needs_explicit_N():
    inst = SparseInstance.of(field_make(5, 1), [1], [2])
    with pytest.raises(PreconditionError):
        min_ratio_order(inst)
    assert check_instance(inst)["bound"] is None
    assert sparse_zero_count(inst) == 0


def test_json_roundtrip_extension_field():
    inst = random_instance(random.Random(3), 729, (3,))
    back = SparseInstance.from_json(inst.to_json())
    assert sparse_zero_count(back) == sparse_zero_count(inst)


def test_stress_small_and_deterministic():
    a = stress_lemma(q_max=512, trials=120, seed=5)
    b = stress_lemma(q_max=512, trials=120, seed=5, threads=2, chunk=7)
    assert a == b and a["violations"] == 0


def test_violation_carries_instance():
    err = LemmaViolation("x", {"p": 3})
    assert err.instance == {"p": 3}
