"""Antipodes, twisted antipode evaluation, and the character group.

Both Hopf algebras carry the recursive antipode on their negative parts;
evaluating a character against the antipode of extracted pieces yields
the subtraction scheme.  The output of a subtraction is a combination of
basis forests with polynomial coefficients over formal evaluation
symbols, so the result stays exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Tuple

from . import feynman as fy
from . import multiindex as mi
from .feynman import CanonDiagram, DiagForest, Diagram
from .lincomb import LinComb, Scalar
from .multiindex import DegreeParams, MIForest, MultiIndex, Rule
from .symvalue import SymbolicValue


def in_negative_part_M(m: MultiIndex, p: DegreeParams) -> bool:
    """Populatable and of non-positive degree."""
    return mi.is_populatable(m) and mi.is_divergent(m, p)


def in_negative_part_F(g: Diagram, p: DegreeParams) -> bool:
    return fy.is_divergent(g, p)


def _merge_forest_combs(
    a: LinComb[MIForest], b: LinComb[MIForest]
) -> LinComb[MIForest]:
    out: list[tuple[MIForest, Scalar]] = []
    for fa, ca in a.items():
        for fb, cb in b.items():
            out.append((fa.merge(fb), ca * cb))
    return LinComb(out)


_ANTIPODE_M_CACHE: dict = {}


def antipode_M(m: MultiIndex, p: DegreeParams, rule: Rule) -> LinComb[MIForest]:
    """Recursive antipode on the negative part; zero elsewhere.

    A(m) = -m - sum over reduced-coproduct terms of A(forest) * trunk,
    extended multiplicatively to forests.  Trunks must lie in the image
    of the counting map for the recursion to stay inside the algebra of
    realizable monomials (this is what kills, e.g., a lone z2 trunk: one
    arity-2 vertex cannot pair its own legs).
    """
    key = (m, p, rule)
    cached = _ANTIPODE_M_CACHE.get(key)
    if cached is not None:
        return cached
    if not in_negative_part_M(m, p):
        result: LinComb[MIForest] = LinComb.zero()
    else:
        acc = LinComb.single(MIForest.of(m), Fraction(-1))
        reduced = mi.coproduct_reduced(m, p, rule, trunk_in_image=True)
        for (forest, trunk), coef in reduced.items():
            term = antipode_M_forest(forest, p, rule)
            term = _merge_forest_combs(term, LinComb.single(MIForest.of(trunk)))
            acc = acc + term.scale(-coef)
        result = acc
    _ANTIPODE_M_CACHE[key] = result
    return result


def antipode_M_forest(f: MIForest, p: DegreeParams, rule: Rule) -> LinComb[MIForest]:
    """Multiplicative extension of the antipode to forests."""
    acc = LinComb.single(MIForest.empty())
    for part in f.parts():
        acc = _merge_forest_combs(acc, antipode_M(part, p, rule))
    return acc


_HAT_ANTIPODE_M_CACHE: dict = {}


def hat_antipode_M(m: MultiIndex, p: DegreeParams, rule: Rule) -> LinComb[MIForest]:
    """Antipode of the negative-part quotient: trunks projected to it too.

    Defined only on the negative part; the recursion matches antipode_M
    except that reduced-coproduct trunks must themselves be populatable
    and divergent.  This is the inversion kernel of the character group.
    """
    if not in_negative_part_M(m, p):
        raise ValueError("hat antipode is defined on the negative part only")
    key = (m, p, rule)
    cached = _HAT_ANTIPODE_M_CACHE.get(key)
    if cached is not None:
        return cached
    acc = LinComb.single(MIForest.of(m), Fraction(-1))
    reduced = mi.coproduct_reduced(m, p, rule, trunk_in_image=True)
    for (forest, trunk), coef in reduced.items():
        if not mi.is_divergent(trunk, p):
            continue
        term = hat_antipode_M_forest(forest, p, rule)
        term = _merge_forest_combs(term, LinComb.single(MIForest.of(trunk)))
        acc = acc + term.scale(-coef)
    _HAT_ANTIPODE_M_CACHE[key] = acc
    return acc


def hat_antipode_M_forest(
    f: MIForest, p: DegreeParams, rule: Rule
) -> LinComb[MIForest]:
    acc = LinComb.single(MIForest.empty())
    for part in f.parts():
        acc = _merge_forest_combs(acc, hat_antipode_M(part, p, rule))
    return acc


def _merge_diag_combs(
    a: LinComb[DiagForest], b: LinComb[DiagForest]
) -> LinComb[DiagForest]:
    out: list[tuple[DiagForest, Scalar]] = []
    for fa, ca in a.items():
        for fb, cb in b.items():
            out.append((fa.merge(fb), ca * cb))
    return LinComb(out)


_ANTIPODE_F_CACHE: dict = {}


def antipode_F(
    g: Diagram, p: DegreeParams, *, strict: bool = False
) -> LinComb[DiagForest]:
    """Recursive diagram antipode.

    By default the recursion runs on any diagram; with strict=True the
    result is zero outside the negative part, which is the form entering
    the subtraction (extracted pieces are always divergent, so strictness
    only matters at the top level).
    """
    if strict and not in_negative_part_F(g, p):
        return LinComb.zero()
    canon = fy.canonicalize(g)
    key = (canon, p)
    cached = _ANTIPODE_F_CACHE.get(key)
    if cached is not None:
        return cached
    acc = LinComb.single(DiagForest.of(canon), Fraction(-1))
    for (forest, trunk), coef in fy.coproduct_reduced_F(g, p).items():
        term = antipode_F_forest(forest, p)
        term = _merge_diag_combs(term, LinComb.single(DiagForest.of(trunk)))
        acc = acc + term.scale(-coef)
    _ANTIPODE_F_CACHE[key] = acc
    return acc


def antipode_F_forest(f: DiagForest, p: DegreeParams) -> LinComb[DiagForest]:
    acc = LinComb.single(DiagForest.empty())
    for part in f.parts():
        acc = _merge_diag_combs(acc, antipode_F(part.diagram, p))
    return acc


def _to_symbolic(value) -> SymbolicValue:
    if isinstance(value, SymbolicValue):
        return value
    return SymbolicValue.constant(value)


class Character:
    """Multiplicative functional on forests, valued in symbolic polynomials.

    Built from a function on single components (monomials or canonical
    diagrams); the empty forest maps to one and forests map to the
    product over their components.  Values are memoized by component.
    """

    def __init__(self, component_fn: Callable, name: str = ""):
        self._fn = component_fn
        self.name = name
        self._memo: dict = {}

    def on_component(self, comp) -> SymbolicValue:
        cached = self._memo.get(comp)
        if cached is None:
            cached = _to_symbolic(self._fn(comp))
            self._memo[comp] = cached
        return cached

    def __call__(self, x) -> SymbolicValue:
        if isinstance(x, (MIForest, DiagForest)):
            acc = SymbolicValue.one()
            for part in x.parts():
                acc = acc * self.on_component(part)
            return acc
        return self.on_component(x)

    def on_lincomb(self, comb: LinComb) -> SymbolicValue:
        acc = SymbolicValue.zero()
        for key, coef in comb.items():
            acc = acc + self(key) * SymbolicValue.constant(coef)
        return acc

    def __repr__(self) -> str:
        return "Character({})".format(self.name or "anonymous")


def counit_M() -> Character:
    return Character(lambda comp: SymbolicValue.zero(), name="counit")


class RenormOutput:
    """Combination of basis forests with symbolic-polynomial coefficients."""

    __slots__ = ("_items",)

    def __init__(self, items: Iterable[Tuple[object, SymbolicValue]] = ()):
        acc: dict = {}
        for key, value in items:
            value = _to_symbolic(value)
            if key in acc:
                acc[key] = acc[key] + value
            else:
                acc[key] = value
        self._items = tuple(
            sorted(
                ((k, v) for k, v in acc.items() if not v.is_zero()),
                key=lambda kv: str(kv[0]),
            )
        )

    @classmethod
    def zero(cls) -> "RenormOutput":
        return cls()

    def items(self) -> tuple:
        return self._items

    def keys(self) -> tuple:
        return tuple(k for k, _ in self._items)

    def coeff(self, key) -> SymbolicValue:
        for k, v in self._items:
            if k == key:
                return v
        return SymbolicValue.zero()

    def is_zero(self) -> bool:
        return not self._items

    def __add__(self, other: "RenormOutput") -> "RenormOutput":
        return RenormOutput(self._items + other._items)

    def scale(self, factor) -> "RenormOutput":
        factor = _to_symbolic(factor)
        return RenormOutput((k, v * factor) for k, v in self._items)

    def map_keys(self, fn: Callable) -> "RenormOutput":
        return RenormOutput((fn(k), v) for k, v in self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RenormOutput):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __str__(self) -> str:
        if not self._items:
            return "0"
        return " + ".join(
            "({}) * [{}]".format(v, k) for k, v in self._items
        )

    def __repr__(self) -> str:
        return "RenormOutput({})".format(str(self))

    def to_json(self) -> list:
        return [
            {"basis": str(k), "coefficient": str(v)} for k, v in self._items
        ]


def bphz_M(
    m: MultiIndex, char: Character, p: DegreeParams, rule: Rule
) -> RenormOutput:
    """Twisted-antipode subtraction on a monomial.

    (char o antipode tensor id) applied to the full coproduct: the
    monomial itself, a constant term char(A(m)) on the empty basis, and
    one term per reduced extraction weighted by char of the antipode of
    the extracted forest.
    """
    terms: list[tuple[object, SymbolicValue]] = [
        (MIForest.of(m), SymbolicValue.one())
    ]
    constant = char.on_lincomb(antipode_M(m, p, rule))
    terms.append((MIForest.empty(), constant))
    reduced = mi.coproduct_reduced(m, p, rule, trunk_in_image=True)
    for (forest, trunk), coef in reduced.items():
        weight = char.on_lincomb(antipode_M_forest(forest, p, rule))
        terms.append(
            (MIForest.of(trunk), weight * SymbolicValue.constant(coef))
        )
    return RenormOutput(terms)


def bphz_F(g: Diagram, char: Character, p: DegreeParams) -> RenormOutput:
    """Twisted-antipode subtraction on a diagram."""
    terms: list[tuple[object, SymbolicValue]] = [
        (DiagForest.of(fy.canonicalize(g)), SymbolicValue.one())
    ]
    constant = char.on_lincomb(antipode_F(g, p, strict=True))
    terms.append((DiagForest.empty(), constant))
    for (forest, trunk), coef in fy.coproduct_reduced_F(g, p).items():
        weight = char.on_lincomb(antipode_F_forest(forest, p))
        terms.append(
            (DiagForest.of(trunk), weight * SymbolicValue.constant(coef))
        )
    return RenormOutput(terms)


def convolve(f: Character, g: Character, p: DegreeParams, rule: Rule) -> Character:
    """Convolution product of characters on the negative part.

    (f tensor g) against the coproduct with the right leg projected to
    the negative part: f(m) + g(m) plus the sum over reduced extractions
    with divergent populatable trunks of f(forest) * g(trunk).
    """

    def component_fn(m: MultiIndex) -> SymbolicValue:
        acc = f(m) + g(m)
        reduced = mi.coproduct_reduced(m, p, rule, trunk_in_image=True)
        for (forest, trunk), coef in reduced.items():
            if not mi.is_divergent(trunk, p):
                continue
            acc = acc + f(forest) * g(trunk) * SymbolicValue.constant(coef)
        return acc

    name = "({} * {})".format(f.name or "f", g.name or "g")
    return Character(component_fn, name=name)


def convolve_F(f: Character, g: Character, p: DegreeParams) -> Character:
    """Diagram-side convolution with the same negative-part projection."""

    def component_fn(canon: CanonDiagram) -> SymbolicValue:
        acc = f(canon) + g(canon)
        for (forest, trunk), coef in fy.coproduct_reduced_F(
            canon.diagram, p
        ).items():
            acc = acc + f(forest) * g(trunk) * SymbolicValue.constant(coef)
        return acc

    name = "({} * {})".format(f.name or "f", g.name or "g")
    return Character(component_fn, name=name)


def character_inverse(f: Character, p: DegreeParams, rule: Rule) -> Character:
    """Group inverse: compose with the hat antipode."""

    def component_fn(m: MultiIndex) -> SymbolicValue:
        if not in_negative_part_M(m, p):
            return SymbolicValue.zero()
        return f.on_lincomb(hat_antipode_M(m, p, rule))

    return Character(component_fn, name="inv({})".format(f.name or "f"))


def renorm_map(
    f: Character, m: MultiIndex, p: DegreeParams, rule: Rule
) -> RenormOutput:
    """The measure-transport map: (f tensor id) against the full coproduct.

    Yields m itself, f(m) on the empty basis (zero unless m is in the
    negative part, since characters extend by zero), and the reduced
    extraction terms weighted by f of the extracted forest.
    """
    terms: list[tuple[object, SymbolicValue]] = [
        (MIForest.of(m), SymbolicValue.one())
    ]
    if in_negative_part_M(m, p):
        terms.append((MIForest.empty(), f(m)))
    reduced = mi.coproduct_reduced(m, p, rule, trunk_in_image=True)
    for (forest, trunk), coef in reduced.items():
        terms.append(
            (MIForest.of(trunk), f(forest) * SymbolicValue.constant(coef))
        )
    return RenormOutput(terms)


def renorm_map_forest(
    f: Character, basis: MIForest, p: DegreeParams, rule: Rule
) -> RenormOutput:
    """Multiplicative extension of the transport map to basis forests."""
    acc = RenormOutput([(MIForest.empty(), SymbolicValue.one())])
    for part in basis.parts():
        part_out = renorm_map(f, part, p, rule)
        merged: list[tuple[object, SymbolicValue]] = []
        for key_a, val_a in acc.items():
            for key_b, val_b in part_out.items():
                merged.append((key_a.merge(key_b), val_a * val_b))
        acc = RenormOutput(merged)
    return acc


def renorm_map_output(
    f: Character, series: RenormOutput, p: DegreeParams, rule: Rule
) -> RenormOutput:
    """Apply the transport map linearly to a combination of basis forests."""
    acc = RenormOutput.zero()
    for key, value in series.items():
        acc = acc + renorm_map_forest(f, key, p, rule).scale(value)
    return acc
