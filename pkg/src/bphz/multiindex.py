"""Multi-index algebra: monomials z^beta, forests, insertion, extraction.

A multi-index records how many vertices of each arity a diagram has; the
monomial z^beta with beta(k) vertices of arity k is a "pre-Feynman
diagram".  This module provides symmetry factors, degrees, the derivation
D, the insertion products (single and simultaneous), and the reduced
extraction-contraction coproduct computed from its explicit coefficient
formula.  Everything is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence, Tuple

from . import pairings
from .lincomb import LinComb, RationalLike, Scalar, as_scalar
from .symvalue import SymbolicValue

_TOKEN = re.compile(r"^z(\d+)(?:\^(\d+))?$")


class MultiIndex:
    """Immutable finitely supported map arity -> multiplicity (monomial z^beta).

    The empty monomial (the unit) is representable as an internal
    intermediate; elements of the monomial space proper are nonempty.
    """

    __slots__ = ("_entries",)

    def __init__(self, beta: Mapping[int, int] | Iterable[Tuple[int, int]] = ()):
        items = beta.items() if isinstance(beta, Mapping) else beta
        acc: dict[int, int] = {}
        for k, mult in items:
            if k < 0 or mult < 0:
                raise ValueError("arities and multiplicities must be nonnegative")
            if mult:
                acc[k] = acc.get(k, 0) + mult
        self._entries = tuple(sorted(acc.items()))

    @classmethod
    def unit(cls) -> "MultiIndex":
        return cls()

    @classmethod
    def single(cls, k: int, mult: int = 1) -> "MultiIndex":
        return cls(((k, mult),))

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        """Parse 'z2 z4^2'-style monomial text (whitespace-separated tokens)."""
        tokens = text.split()
        if not tokens:
            raise ValueError("empty monomial text")
        acc: dict[int, int] = {}
        for token in tokens:
            match = _TOKEN.match(token)
            if not match:
                raise ValueError("bad monomial token {!r}".format(token))
            k = int(match.group(1))
            mult = int(match.group(2) or 1)
            if mult < 1:
                raise ValueError("bad multiplicity in token {!r}".format(token))
            acc[k] = acc.get(k, 0) + mult
        return cls(acc)

    @classmethod
    def from_json(cls, payload: Mapping) -> "MultiIndex":
        return cls({int(k): int(v) for k, v in payload["beta"].items()})

    def to_json(self) -> dict:
        return {"beta": {str(k): mult for k, mult in self._entries}}

    def beta(self) -> dict[int, int]:
        return dict(self._entries)

    def get(self, k: int) -> int:
        for arity, mult in self._entries:
            if arity == k:
                return mult
        return 0

    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self._entries)

    def arity_list(self) -> tuple[int, ...]:
        """All vertex arities with multiplicity, ascending."""
        return tuple(k for k, mult in self._entries for _ in range(mult))

    def is_empty(self) -> bool:
        return not self._entries

    def norm(self) -> int:
        """Vertex count |beta|."""
        return sum(m for _, m in self._entries)

    def half_edges(self) -> int:
        """Total half-edge count: sum of k * beta(k)."""
        return sum(k * m for k, m in self._entries)

    def mul(self, other: "MultiIndex") -> "MultiIndex":
        acc = dict(self._entries)
        for k, mult in other._entries:
            acc[k] = acc.get(k, 0) + mult
        return MultiIndex(acc)

    def shift(self, k: int, delta: int) -> "MultiIndex":
        acc = dict(self._entries)
        acc[k] = acc.get(k, 0) + delta
        if acc[k] < 0:
            raise ValueError("negative multiplicity")
        return MultiIndex(acc)

    def submonomial_of(self, other: "MultiIndex") -> bool:
        return all(other.get(k) >= m for k, m in self._entries)

    def minus(self, other: "MultiIndex") -> "MultiIndex":
        if not other.submonomial_of(self):
            raise ValueError("not a pointwise submonomial")
        acc = dict(self._entries)
        for k, mult in other._entries:
            acc[k] -= mult
        return MultiIndex(acc)

    def max_arity(self) -> int:
        return self._entries[-1][0] if self._entries else 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiIndex):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __lt__(self, other: "MultiIndex") -> bool:
        return self._entries < other._entries

    def __str__(self) -> str:
        if not self._entries:
            return "1"
        return " ".join(
            "z{}^{}".format(k, m) if m > 1 else "z{}".format(k) for k, m in self._entries
        )

    def __repr__(self) -> str:
        return "MultiIndex({})".format(self)


class MIForest:
    """Unordered multiset of multi-indices; the empty forest is the unit."""

    __slots__ = ("_parts",)

    def __init__(self, parts: Iterable[MultiIndex] = ()):
        parts = tuple(parts)
        if any(p.is_empty() for p in parts):
            raise ValueError("forests may not contain the empty monomial")
        self._parts = tuple(sorted(parts))

    @classmethod
    def empty(cls) -> "MIForest":
        return cls()

    @classmethod
    def of(cls, *parts: MultiIndex) -> "MIForest":
        return cls(parts)

    @classmethod
    def parse(cls, text: str) -> "MIForest":
        text = text.strip()
        if text == "1":
            return cls()
        return cls(MultiIndex.parse(chunk) for chunk in text.split("."))

    def parts(self) -> tuple[MultiIndex, ...]:
        return self._parts

    def counts(self) -> list[tuple[MultiIndex, int]]:
        """Distinct components with multiplicities, in canonical order."""
        out: list[tuple[MultiIndex, int]] = []
        for part in self._parts:
            if out and out[-1][0] == part:
                out[-1] = (part, out[-1][1] + 1)
            else:
                out.append((part, 1))
        return out

    def is_empty(self) -> bool:
        return not self._parts

    def __len__(self) -> int:
        return len(self._parts)

    def merge(self, other: "MIForest") -> "MIForest":
        return MIForest(self._parts + other._parts)

    def add(self, part: MultiIndex) -> "MIForest":
        return MIForest(self._parts + (part,))

    def product(self) -> MultiIndex:
        """Forget the partition: the product monomial of all components."""
        out = MultiIndex.unit()
        for part in self._parts:
            out = out.mul(part)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MIForest):
            return NotImplemented
        return self._parts == other._parts

    def __hash__(self) -> int:
        return hash(self._parts)

    def __lt__(self, other: "MIForest") -> bool:
        return self._parts < other._parts

    def __str__(self) -> str:
        if not self._parts:
            return "1"
        return " . ".join(str(p) for p in self._parts)

    def __repr__(self) -> str:
        return "MIForest({})".format(self)


@dataclass(frozen=True)
class DegreeParams:
    """Kernel Hoelder degree ell (< 1) and spatial dimension d."""

    ell: Fraction
    d: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "ell", as_scalar(self.ell))
        if self.ell >= 1:
            raise ValueError("ell must be < 1")
        if self.d < 1:
            raise ValueError("dimension must be positive")


@dataclass(frozen=True)
class Rule:
    """Set of allowed vertex arities (positive integers, nonempty)."""

    arities: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arities", frozenset(self.arities))
        if not self.arities:
            raise ValueError("rule must be nonempty")
        if any(k < 1 for k in self.arities):
            raise ValueError("rule arities must be positive")

    @classmethod
    def parse(cls, text: str) -> "Rule":
        return cls(frozenset(int(tok) for tok in text.split(",")))

    def admits(self, m: MultiIndex) -> bool:
        return all(k in self.arities for k in m.support())

    def __str__(self) -> str:
        return ",".join(str(k) for k in sorted(self.arities))


def norm(m: MultiIndex) -> int:
    """Vertex count: sum of the multiplicities of beta."""
    return m.norm()


def sym_factor(m: MultiIndex) -> int:
    """S(z^beta) = prod_k beta(k)! * (k!)^beta(k)."""
    out = 1
    for k, mult in m.beta().items():
        out *= factorial(mult) * factorial(k) ** mult
    return out


def sym_factor_forest(f: MIForest) -> int:
    """Forest symmetry factor: prod_i r_i! * S(component_i)^{r_i}."""
    out = 1
    for part, count in f.counts():
        out *= factorial(count) * sym_factor(part) ** count
    return out


def hat_sym_factor(m: MultiIndex) -> int:
    """S-hat(z^beta) = prod_k beta(k)!."""
    out = 1
    for _, mult in m.beta().items():
        out *= factorial(mult)
    return out


def upsilon(couplings: Mapping[int, SymbolicValue | RationalLike], m: MultiIndex) -> SymbolicValue:
    """Coupling monomial prod_k (-alpha_k)^beta(k); missing couplings are 0."""
    out = SymbolicValue.one()
    for k, mult in m.beta().items():
        base = couplings.get(k)
        if base is None:
            return SymbolicValue.zero()
        if not isinstance(base, SymbolicValue):
            base = SymbolicValue.constant(as_scalar(base))
        out = out * (-base) ** mult
    return out


def degree(m: MultiIndex, p: DegreeParams) -> Scalar:
    """deg z^beta = (ell/2) * sum k*beta(k) + d * (|beta| - 1)."""
    return p.ell / 2 * m.half_edges() + p.d * (m.norm() - 1)


def is_divergent(m: MultiIndex, p: DegreeParams) -> bool:
    return degree(m, p) <= 0


def apply_D(p: LinComb[MultiIndex] | MultiIndex, times: int = 1) -> LinComb[MultiIndex]:
    """Apply the derivation D = sum_k z_{k+1} d/dz_k the given number of times."""
    comb = LinComb.single(p) if isinstance(p, MultiIndex) else p
    for _ in range(times):
        acc: list[tuple[MultiIndex, Scalar]] = []
        for mono, coef in comb.items():
            for k, mult in mono.beta().items():
                acc.append((mono.shift(k, -1).shift(k + 1, 1), coef * mult))
        comb = LinComb(acc)
    return comb


def partial(k: int, m: MultiIndex) -> LinComb[MultiIndex]:
    """d/dz_k z^beta = beta(k) * z^{beta - e_k} (possibly the empty monomial)."""
    mult = m.get(k)
    if not mult:
        return LinComb.zero()
    return LinComb.single(m.shift(k, -1), Fraction(mult))


def _project_rule(comb: LinComb[MultiIndex], rule: Rule | None) -> LinComb[MultiIndex]:
    if rule is None:
        return comb
    return LinComb((mono, coef) for mono, coef in comb.items() if rule.admits(mono))


def insert(b: MultiIndex, a: MultiIndex, rule: Rule | None = None) -> LinComb[MultiIndex]:
    """Insertion z^b |> z^a = sum_k (D^k z^b) * (d/dz_k z^a), rule-projected.

    The rule, when present, keeps only result monomials whose support lies
    inside the allowed arities (the trunk condition).
    """
    acc = LinComb.zero()
    for k in a.support():
        shifted = apply_D(b, k)
        stripped = a.shift(k, -1)
        for mono, coef in shifted.items():
            acc = acc + LinComb.single(mono.mul(stripped), coef * a.get(k))
    return _project_rule(acc, rule)


def _k_assignments(count: int, allowed: Sequence[int]) -> Iterator[tuple[dict[int, int], int]]:
    """Ways to decorate `count` identical components with insertion arities.

    Yields (multiset of k values as {k: t_k}, arrangement weight), the weight
    counting ordered k-tuples that realize the multiset: count! / prod t_k!.
    """
    for combo in combinations_with_replacement(sorted(allowed), count):
        tally: dict[int, int] = {}
        for k in combo:
            tally[k] = tally.get(k, 0) + 1
        weight = factorial(count)
        for t in tally.values():
            weight //= factorial(t)
        yield tally, weight


def _falling(n: int, steps: int) -> int:
    out = 1
    for i in range(steps):
        out *= n - i
    return out


def _poly_mul(
    a: LinComb[MultiIndex], b: LinComb[MultiIndex], bound: MultiIndex | None = None
) -> LinComb[MultiIndex]:
    """Multiply monomial combinations, optionally pruning above a bound."""
    acc: list[tuple[MultiIndex, Scalar]] = []
    for mono_a, coef_a in a.items():
        for mono_b, coef_b in b.items():
            product = mono_a.mul(mono_b)
            if bound is not None and not product.submonomial_of(bound):
                continue
            acc.append((product, coef_a * coef_b))
    return LinComb(acc)


def simultaneous_insert(
    f: MIForest, a: MultiIndex, rule: Rule | None = None
) -> LinComb[MultiIndex]:
    """Simultaneous insertion of a forest into z^a over ordered arity tuples.

    For components (gamma_1, ..., gamma_n) the result sums over ordered
    (k_1, ..., k_n) the monomial (prod_i D^{k_i} gamma_i) times the iterated
    partial (prod_i d/dz_{k_i}) z^a; the rule, when present, projects the
    result support.  Reduces to `insert` for a single component.
    """
    if f.is_empty():
        raise ValueError("simultaneous insertion needs a nonempty forest")
    supp = a.support()
    counts = f.counts()
    acc = LinComb.zero()

    def recurse(idx: int, taken: dict[int, int], poly: LinComb[MultiIndex], weight: int) -> None:
        nonlocal acc
        if idx == len(counts):
            coef_partial = 1
            trunk = a
            for k, t in taken.items():
                coef_partial *= _falling(a.get(k), t)
                trunk = trunk.shift(k, -t)
            for mono, coef in poly.items():
                acc = acc + LinComb.single(mono.mul(trunk), coef * weight * coef_partial)
            return
        component, count = counts[idx]
        for tally, arrangements in _k_assignments(count, supp):
            merged = dict(taken)
            feasible = True
            for k, t in tally.items():
                merged[k] = merged.get(k, 0) + t
                if merged[k] > a.get(k):
                    feasible = False
                    break
            if not feasible:
                continue
            extended = poly
            for k, t in tally.items():
                piece = apply_D(component, k)
                for _ in range(t):
                    extended = _poly_mul(extended, piece)
            recurse(idx + 1, merged, extended, weight * arrangements)

    recurse(0, {}, LinComb.single(MultiIndex.unit()), 1)
    return _project_rule(acc, rule)


def inner_product(a: MIForest | MultiIndex, b: MIForest | MultiIndex) -> Scalar:
    """Dirac pairing: S(a) when the forests coincide, else 0."""
    fa = MIForest.of(a) if isinstance(a, MultiIndex) else a
    fb = MIForest.of(b) if isinstance(b, MultiIndex) else b
    if fa != fb:
        return Fraction(0)
    return Fraction(sym_factor_forest(fa))


def is_populatable(m: MultiIndex, free_legs: int = 0) -> bool:
    """True iff the half-edges pair into a connected loopless graph.

    Exactly free_legs half-edges stay unpaired; every vertex must be
    spanned.  Decided by matching search on the labeled half-edges.
    """
    if m.is_empty():
        return False
    return pairings.matching_exists(m.arity_list(), free_legs)


@lru_cache(maxsize=None)
def _populatable_cached(m: MultiIndex, free_legs: int) -> bool:
    return is_populatable(m, free_legs)


def iter_monomials_within(max_half_edges: int, max_vertices: int) -> Iterator[MultiIndex]:
    """All nonempty monomials with bounded half-edge and vertex counts."""

    def recurse(min_arity: int, he_left: int, verts_left: int, acc: list[tuple[int, int]]):
        if acc:
            yield MultiIndex(acc)
        if verts_left == 0:
            return
        for k in range(min_arity, he_left + 1):
            for mult in range(1, verts_left + 1):
                if k * mult > he_left:
                    break
                acc.append((k, mult))
                yield from recurse(k + 1, he_left - k * mult, verts_left - mult, acc)
                acc.pop()

    yield from recurse(1, max_half_edges, max_vertices, [])


@lru_cache(maxsize=None)
def extraction_candidates(
    max_half_edges: int, max_vertices: int, p: DegreeParams
) -> tuple[MultiIndex, ...]:
    """Populatable non-positive-degree monomials with at least one edge.

    These are the monomials allowed as components of the left leg of the
    reduced coproduct.  The edge requirement (half-edge count >= 2) rules
    out the lone arity-0 vertex, which pairs vacuously but corresponds to
    no extractable subdiagram.
    """
    out = [
        gamma
        for gamma in iter_monomials_within(max_half_edges, max_vertices)
        if gamma.half_edges() >= 2
        and is_divergent(gamma, p)
        and _populatable_cached(gamma, 0)
    ]
    return tuple(sorted(out))


def coproduct_reduced(
    m: MultiIndex,
    p: DegreeParams,
    rule: Rule | None = None,
    *,
    trunk_in_image: bool = False,
) -> LinComb[Tuple[MIForest, MultiIndex]]:
    """Reduced extraction-contraction coproduct from the explicit formula.

    Left legs range over nonempty forests whose components are populatable
    with non-positive degree; right legs (trunks) are formal monomials,
    projected by the rule's support condition when a rule is given, and
    further restricted to populatable monomials when trunk_in_image is set
    (the variant the renormalisation recursions consume).

    The coefficient of forest (x) trunk is

        S(beta) / (S(forest) * S(trunk)) * sum over ordered insertion
        tuples of (arrangement count) * (iterated-partial falling
        factorial) * (matching coefficient in the product of shifted
        components).
    """
    he_m = m.half_edges()
    n_m = m.norm()
    top = m.max_arity()

    def usable_shifts(gamma: MultiIndex) -> dict[int, LinComb[MultiIndex]]:
        """Filtered D^k gamma for every k whose image meets the submonomials of m."""
        shifts: dict[int, LinComb[MultiIndex]] = {}
        piece = LinComb.single(gamma)
        k = 0
        while piece and gamma.half_edges() + k <= he_m:
            filtered = LinComb(
                (mono, coef) for mono, coef in piece.items() if mono.submonomial_of(m)
            )
            if filtered:
                shifts[k] = filtered
            k += 1
            piece = LinComb(
                (mono, coef)
                for mono, coef in apply_D(piece).items()
                if mono.max_arity() <= top
            )
        return shifts

    candidate_shifts: list[tuple[MultiIndex, dict[int, LinComb[MultiIndex]]]] = []
    for gamma in extraction_candidates(he_m, n_m, p):
        shifts = usable_shifts(gamma)
        if shifts:
            candidate_shifts.append((gamma, shifts))

    raw: dict[Tuple[MIForest, MultiIndex], Fraction] = {}

    def emit(
        spec: list[tuple[MultiIndex, int, dict[int, int]]],
        weight: int,
        poly: LinComb[MultiIndex],
    ) -> None:
        taken: dict[int, int] = {}
        parts: list[MultiIndex] = []
        for gamma, count, tally in spec:
            parts.extend([gamma] * count)
            for k, t in tally.items():
                taken[k] = taken.get(k, 0) + t
        forest = MIForest(parts)
        for sigma, coef in poly.items():
            alpha_hat = m.minus(sigma)
            trunk = alpha_hat
            coef_partial = 1
            for k, t in taken.items():
                coef_partial *= _falling(alpha_hat.get(k) + t, t)
                trunk = trunk.shift(k, t)
            key = (forest, trunk)
            raw[key] = raw.get(key, Fraction(0)) + weight * coef_partial * coef

    def choose(
        idx: int,
        he_left: int,
        contractions_left: int,
        spec: list[tuple[MultiIndex, int, dict[int, int]]],
        weight: int,
        poly: LinComb[MultiIndex],
    ) -> None:
        if spec:
            emit(spec, weight, poly)
        for j in range(idx, len(candidate_shifts)):
            gamma, shifts = candidate_shifts[j]
            he_gamma = gamma.half_edges()
            shrink = gamma.norm() - 1
            if he_gamma > he_left or shrink > contractions_left:
                continue
            max_count = he_left // he_gamma
            if shrink:
                max_count = min(max_count, contractions_left // shrink)
            for count in range(1, max_count + 1):
                for tally, arrangements in _k_assignments(count, sorted(shifts)):
                    cost = count * he_gamma + sum(k * t for k, t in tally.items())
                    if cost > he_left:
                        continue
                    extended = poly
                    for k, t in tally.items():
                        for _ in range(t):
                            extended = _poly_mul(extended, shifts[k], bound=m)
                            if not extended:
                                break
                        if not extended:
                            break
                    if not extended:
                        continue
                    choose(
                        j + 1,
                        he_left - cost,
                        contractions_left - count * shrink,
                        spec + [(gamma, count, tally)],
                        weight * arrangements,
                        extended,
                    )

    choose(0, he_m, n_m - 1, [], 1, LinComb.single(MultiIndex.unit()))

    s_m = sym_factor(m)
    out: list[tuple[Tuple[MIForest, MultiIndex], Scalar]] = []
    for (forest, trunk), value in raw.items():
        if rule is not None and not rule.admits(trunk):
            continue
        if trunk_in_image and not _populatable_cached(trunk, 0):
            continue
        coefficient = value * s_m / (sym_factor_forest(forest) * sym_factor(trunk))
        out.append(((forest, trunk), coefficient))
    return LinComb(out)


def coproduct_full(
    m: MultiIndex,
    p: DegreeParams,
    rule: Rule | None = None,
    *,
    trunk_in_image: bool = False,
) -> LinComb[Tuple[MIForest, MIForest]]:
    """Full coproduct: both primitive terms plus the reduced part.

    Keys are pairs of forests so that the empty right leg of the term
    (m, empty) is representable; reduced trunks appear as singletons.
    """
    acc: list[tuple[Tuple[MIForest, MIForest], Scalar]] = [
        ((MIForest.empty(), MIForest.of(m)), Fraction(1)),
        ((MIForest.of(m), MIForest.empty()), Fraction(1)),
    ]
    reduced = coproduct_reduced(m, p, rule, trunk_in_image=trunk_in_image)
    for (forest, trunk), coef in reduced.items():
        acc.append(((forest, MIForest.of(trunk)), coef))
    return LinComb(acc)


def coproduct_full_forest(
    f: MIForest,
    p: DegreeParams,
    rule: Rule | None = None,
    *,
    trunk_in_image: bool = False,
) -> LinComb[Tuple[MIForest, MIForest]]:
    """Multiplicative extension of the full coproduct to forests."""
    acc: LinComb[Tuple[MIForest, MIForest]] = LinComb.single(
        (MIForest.empty(), MIForest.empty())
    )
    for part in f.parts():
        part_cop = coproduct_full(part, p, rule, trunk_in_image=trunk_in_image)
        merged: list[tuple[Tuple[MIForest, MIForest], Scalar]] = []
        for (left_a, right_a), coef_a in acc.items():
            for (left_b, right_b), coef_b in part_cop.items():
                merged.append(
                    ((left_a.merge(left_b), right_a.merge(right_b)), coef_a * coef_b)
                )
        acc = LinComb(merged)
    return acc
