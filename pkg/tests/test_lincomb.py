"""Exact linear combinations over hashable basis keys.

Core claims:
    - construction merges duplicate keys and drops exact zeros
    - arithmetic (+, -, negation, scaling) is exact over Fraction
    - equality, hashing, and iteration order are deterministic
    - tensor and apply_linear behave bilinearly / linearly
    - JSON round-trips coefficients as numerator/denominator pairs
"""

from fractions import Fraction

import pytest

from bphz.lincomb import LinComb, add, apply_linear, as_scalar, tensor


def test_as_scalar_accepts_ints_strings_fractions():
    assert as_scalar(3) == Fraction(3)
    assert as_scalar("-1/2") == Fraction(-1, 2)
    assert as_scalar(Fraction(7, 3)) == Fraction(7, 3)


def test_construction_merges_and_prunes():
    c = LinComb([("a", 2), ("b", 1), ("a", -2)])
    assert c.coeff("a") == 0
    assert c.coeff("b") == 1
    assert len(c) == 1
    assert list(c.keys()) == ["b"]


def test_zero_and_bool():
    assert not LinComb.zero()
    assert LinComb.single("x")
    assert LinComb.single("x") - LinComb.single("x") == LinComb.zero()


def test_arithmetic_is_exact():
    c = LinComb.single("a", Fraction(1, 3)) + LinComb.single("a", Fraction(1, 6))
    assert c.coeff("a") == Fraction(1, 2)
    assert (-c).coeff("a") == Fraction(-1, 2)
    assert c.scale(4).coeff("a") == 2


def test_items_sorted_by_key_text():
    c = LinComb([("b", 1), ("a", 1), ("c", 1)])
    assert [k for k, _ in c.items()] == ["a", "b", "c"]


def test_equality_and_hash():
    c1 = LinComb([("a", 1), ("b", 2)])
    c2 = LinComb([("b", 2), ("a", 1)])
    assert c1 == c2
    assert hash(c1) == hash(c2)
    assert c1 != LinComb.single("a")


def test_add_function_matches_operator():
    c1 = LinComb.single("a", 2)
    c2 = LinComb.single("b", 3)
    assert add(c1, c2) == c1 + c2


def test_tensor_is_bilinear():
    c1 = LinComb([("a", 2), ("b", 1)])
    c2 = LinComb([("x", 3)])
    t = tensor(c1, c2)
    assert t.coeff(("a", "x")) == 6
    assert t.coeff(("b", "x")) == 3


def test_apply_linear_maps_keys_through():
    c = LinComb([("a", 1), ("b", 2)])
    image = apply_linear(lambda k: LinComb.single(k.upper(), 2), c)
    assert image == LinComb([("A", 2), ("B", 4)])


def test_to_json_and_str():
    c = LinComb.single("a", Fraction(-1, 2))
    assert c.to_json() == [{"key": "a", "num": -1, "den": 2}]
    assert str(LinComb.zero()) == "0"
    assert "a" in str(c)


def test_scale_by_zero_is_zero():
    assert LinComb.single("a", 5).scale(0) == LinComb.zero()


def test_rejects_bad_scalar():
    with pytest.raises((ValueError, TypeError, ZeroDivisionError)):
        LinComb.single("a", "not-a-number")
