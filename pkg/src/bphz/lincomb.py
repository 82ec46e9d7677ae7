"""Exact rational scalars and free-module linear combinations.

Every algebraic output of this package is a finite linear combination of
basis elements (monomials, forests, diagrams, tensor pairs) with exact
rational coefficients.  ``LinComb`` is that free module: an immutable map
from basis keys to nonzero ``Fraction`` values.

Basis keys may be any hashable objects whose ``str`` form is canonical
(equal objects print identically, distinct objects print distinctly);
serialization and ordering rely on it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Generic, Hashable, Iterable, Iterator, Mapping, Tuple, TypeVar

Scalar = Fraction

B = TypeVar("B", bound=Hashable)
C = TypeVar("C", bound=Hashable)

RationalLike = int | str | Fraction


def as_scalar(value: RationalLike) -> Scalar:
    """Coerce an int, ``p/q`` string, or Fraction to an exact Scalar."""
    return value if isinstance(value, Fraction) else Fraction(value)


class LinComb(Generic[B]):
    """Immutable finite linear combination with exact rational coefficients.

    Zero coefficients are never stored; two combinations are equal iff
    they store the same key -> coefficient map.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[B, RationalLike] | Iterable[Tuple[B, RationalLike]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[B, Scalar] = {}
        for key, raw in items:
            coef = as_scalar(raw)
            if not coef:
                continue
            total = acc.get(key, Fraction(0)) + coef
            if total:
                acc[key] = total
            else:
                acc.pop(key, None)
        self._terms = acc

    @classmethod
    def zero(cls) -> "LinComb[B]":
        return cls()

    @classmethod
    def single(cls, key: B, coef: RationalLike = 1) -> "LinComb[B]":
        return cls(((key, coef),))

    def coeff(self, key: B) -> Scalar:
        return self._terms.get(key, Fraction(0))

    def items(self) -> Iterator[Tuple[B, Scalar]]:
        """Terms in canonical order (sorted by the key's string form)."""
        return iter(sorted(self._terms.items(), key=lambda kv: str(kv[0])))

    def keys(self) -> Iterator[B]:
        return (k for k, _ in self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinComb):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "LinComb[B]") -> "LinComb[B]":
        merged = dict(self._terms)
        for key, coef in other._terms.items():
            total = merged.get(key, Fraction(0)) + coef
            if total:
                merged[key] = total
            else:
                merged.pop(key, None)
        return _wrap(merged)

    def __sub__(self, other: "LinComb[B]") -> "LinComb[B]":
        return self + other.scale(-1)

    def __neg__(self) -> "LinComb[B]":
        return self.scale(-1)

    def scale(self, factor: RationalLike) -> "LinComb[B]":
        coef = as_scalar(factor)
        if not coef:
            return LinComb()
        return _wrap({k: v * coef for k, v in self._terms.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join("{}*({})".format(coef, key) for key, coef in self.items())

    def __repr__(self) -> str:
        if not self._terms:
            return "LinComb(0)"
        parts = ["{}*{}".format(coef, key) for key, coef in self.items()]
        return "LinComb(" + " + ".join(parts) + ")"

    def to_json(self) -> list[dict]:
        """Sorted array of {key, num, den} with keys as canonical strings."""
        return [
            {"key": str(key), "num": coef.numerator, "den": coef.denominator}
            for key, coef in self.items()
        ]


def _wrap(terms: dict) -> LinComb:
    out: LinComb = LinComb()
    out._terms = terms
    return out


def add(a: LinComb[B], b: LinComb[B]) -> LinComb[B]:
    """Coefficientwise sum with zero pruning."""
    return a + b


def tensor(a: LinComb[B], b: LinComb[C]) -> LinComb[Tuple[B, C]]:
    """Bilinear tensor product; keys are paired into tuples."""
    acc: dict = {}
    for ka, ca in a._terms.items():
        for kb, cb in b._terms.items():
            key = (ka, kb)
            total = acc.get(key, Fraction(0)) + ca * cb
            if total:
                acc[key] = total
            else:
                acc.pop(key, None)
    return _wrap(acc)


def apply_linear(f: Callable[[B], LinComb[C]], a: LinComb[B]) -> LinComb[C]:
    """Linear extension of a basis map: sum of coeff * f(key)."""
    acc: dict = {}
    for key, coef in a._terms.items():
        for out_key, out_coef in f(key)._terms.items():
            total = acc.get(out_key, Fraction(0)) + coef * out_coef
            if total:
                acc[out_key] = total
            else:
                acc.pop(out_key, None)
    return _wrap(acc)
