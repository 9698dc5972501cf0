from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from renormlab.errors import EmptyInput, ParseError
from renormlab.ordinals import (
    OMEGA, Cmp, Ordinal, format_ordinal, ord_classify, ord_compare, ord_sup, parse_ordinal,
)

# ordinals below w^4 as coefficient vectors (c3, c2, c1, c0)
coeffs = st.tuples(*(st.integers(0, 3) for _ in range(4)))


def build(c) -> Ordinal:
    return Ordinal(tuple((3 - k, v) for k, v in enumerate(c) if v))


def oracle_add(a, b):
    """Left-absorbing addition on coefficient vectors."""
    lead = next((k for k, v in enumerate(b) if v), None)
    if lead is None:
        return a
    return tuple(a[:lead]) + (a[lead] + b[lead],) + tuple(b[lead + 1:])


def test_basic_values():
    assert format_ordinal(Ordinal()) == "0"
    assert format_ordinal(Ordinal.of(4)) == "4"
    assert format_ordinal(OMEGA) == "w*1"
    assert format_ordinal(Ordinal(((2, 3),))) == "w^2*3"
    assert Ordinal.omega_times(2, 1) == parse_ordinal("w*2+1")


def test_absorption():
    assert Ordinal.of(1) + OMEGA == OMEGA
    assert OMEGA + 1 != OMEGA
    assert (OMEGA + 3).predecessor() == OMEGA + 2


def test_classify():
    assert ord_classify(Ordinal()).kind == "zero"
    c = ord_classify(OMEGA + 1)
    assert c.kind == "successor" and c.pred == OMEGA
    assert ord_classify(Ordinal.omega_times(3)).kind == "limit"
    with pytest.raises(ValueError):
        OMEGA.predecessor()


def test_sup_and_errors():
    assert ord_sup([Ordinal.of(5), OMEGA, Ordinal.of(2)]) == OMEGA
    with pytest.raises(EmptyInput):
        ord_sup([])
    with pytest.raises(ParseError):
        parse_ordinal("w+")


@given(coeffs, coeffs)
def test_compare_matches_lexicographic_oracle(a, b):
    expect = Cmp.EQUAL if a == b else (Cmp.LESS if a < b else Cmp.GREATER)
    assert ord_compare(build(a), build(b)) is expect


@given(coeffs, coeffs)
def test_add_matches_oracle(a, b):
    assert build(a) + build(b) == build(oracle_add(a, b))


@given(coeffs)
def test_format_round_trip(a):
    x = build(a)
    assert parse_ordinal(format_ordinal(x)) == x


@given(coeffs, coeffs, coeffs)
def test_addition_associative_and_monotone_on_right(a, b, c):
    x, y, z = build(a), build(b), build(c)
    assert (x + y) + z == x + (y + z)
    if y < z:
        assert x + y < x + z
