"""
Tests for prime-field arithmetic and projective enumeration.
"""
import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import FieldError
from src.core.ff import (
    FieldElement,
    enumerate_pg,
    field_arith,
    inverse_mod,
    is_odd_prime,
    normalize_projective,
    pg_size,
    rank_mod,
)

PRIMES = [3, 5, 7, 11, 13]


def test_small_arithmetic():
    assert field_arith(FieldElement(2, 3), FieldElement(2, 3), "mul") == FieldElement(1, 3)
    assert field_arith(FieldElement(1, 5), FieldElement(2, 5), "div") == FieldElement(3, 5)
    assert field_arith(FieldElement(3, 7), FieldElement(5, 7), "sub") == FieldElement(5, 7)


def test_division_by_zero():
    with pytest.raises(FieldError):
        field_arith(FieldElement(1, 5), FieldElement(0, 5), "div")


@pytest.mark.parametrize("q", [1, 2, 4, 9, 15, -3])
def test_bad_modulus(q):
    assert not is_odd_prime(q)
    with pytest.raises(FieldError):
        FieldElement(0, q)


def test_mixed_moduli():
    with pytest.raises(FieldError):
        FieldElement(1, 3) + FieldElement(1, 5)


def test_unknown_operation():
    with pytest.raises(FieldError):
        field_arith(FieldElement(1, 3), FieldElement(1, 3), "pow")


@settings(max_examples=200, deadline=None)
@given(
    q=st.sampled_from(PRIMES),
    a=st.integers(0, 100),
    b=st.integers(0, 100),
    c=st.integers(0, 100),
)
def test_field_axioms(q, a, b, c):
    x, y, z = FieldElement.of(a, q), FieldElement.of(b, q), FieldElement.of(c, q)
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x - x == FieldElement(0, q)
    if y.value:
        assert (x / y) * y == x
        assert y * y.inverse() == FieldElement(1, q)


@pytest.mark.parametrize("q", PRIMES)
def test_inverse_every_unit(q):
    for a in range(1, q):
        assert a * inverse_mod(a, q) % q == 1


def test_euler_criterion():
    # -1 is a square exactly when q = 1 mod 4
    assert FieldElement(4, 5).is_square()
    assert not FieldElement(2, 3).is_square()
    assert FieldElement(0, 7).is_square()


def test_normalize_projective():
    assert normalize_projective((2, 2, 0), 3).coords == (1, 1, 0)
    assert normalize_projective((0, 3, 1), 5).coords == (0, 1, 2)
    assert normalize_projective((1, 0), 3) == normalize_projective((2, 0), 3)


def test_normalize_zero_vector():
    with pytest.raises(FieldError):
        normalize_projective((0, 0, 0), 5)


def test_enumerate_pg_sizes():
    assert len(enumerate_pg(3, 2)) == 4
    assert len(enumerate_pg(3, 3)) == 13
    coords = {p.coords for p in enumerate_pg(5, 2)}
    assert coords == {(1, 0), (1, 1), (1, 2), (1, 3), (1, 4), (0, 1)}


@pytest.mark.parametrize("q,m", [(3, 2), (3, 4), (5, 3), (7, 3)])
def test_enumerate_pg_canonical_and_distinct(q, m):
    points = enumerate_pg(q, m)
    assert len(points) == pg_size(q, m)
    assert len(set(points)) == len(points)
    for p in points:
        lead = next(c for c in p.coords if c)
        assert lead == 1
    assert points == sorted(points)


def test_enumerate_pg_needs_m_at_least_2():
    with pytest.raises(FieldError):
        enumerate_pg(3, 1)


def test_rank_mod():
    assert rank_mod([(1, 0), (0, 1)], 3) == 2
    assert rank_mod([(1, 2), (2, 1)], 3) == 1
    assert rank_mod([], 5) == 0
    assert rank_mod([(0, 0, 0)], 7) == 0
