"""The correspondence between multi-indices and diagrams.

The counting map sends a diagram to the monomial of its vertex arities;
the lift sends a monomial to the weighted sum of connected diagrams
obtained by pairing its half-edges.  This module implements both, the
brute-force pairing enumerator that grounds the weights, and the
orbit-stabilizer / adjointness / commuting-square checks that tie the
two sides together.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterator, Tuple

from . import pairings
from .feynman import (
    CanonDiagram,
    DiagForest,
    Diagram,
    _canonical_search,
    _components,
    canonicalize,
    coproduct_reduced_F,
    counting_map,
    insert_F,
    simultaneous_insert_F,
)
from .lincomb import LinComb, Scalar
from .multiindex import (
    DegreeParams,
    MIForest,
    MultiIndex,
    Rule,
    coproduct_reduced,
    inner_product,
    insert,
    sym_factor,
    sym_factor_forest,
    simultaneous_insert,
)


class LeggedClass:
    """Internal bucket key for pairings that keep free legs.

    Wraps the canonical text of the body graph decorated with per-vertex
    leg counts.  Not a Diagram: legs are outside the diagram space.
    """

    __slots__ = ("key",)

    def __init__(self, key: str):
        self.key = key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LeggedClass):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "LeggedClass") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.key

    def __repr__(self) -> str:
        return "LeggedClass({})".format(self.key)


class PairingOutcome:
    """Counts of labeled half-edge pairings bucketed by isomorphism class."""

    __slots__ = ("counts", "connected_only", "free_legs")

    def __init__(self, counts: dict, connected_only: bool, free_legs: int):
        self.counts = counts
        self.connected_only = connected_only
        self.free_legs = free_legs

    def total(self) -> int:
        return sum(self.counts.values())

    def get(self, key, default: int = 0) -> int:
        return self.counts.get(key, default)

    def __repr__(self) -> str:
        return "PairingOutcome({} classes, {} pairings)".format(
            len(self.counts), self.total()
        )


def _iter_index_matchings(
    owners: list[int], indices: tuple[int, ...]
) -> Iterator[tuple[tuple[int, int], ...]]:
    """Perfect matchings of the given half-edge indices avoiding same-vertex pairs."""
    if not indices:
        yield ()
        return
    first, rest = indices[0], indices[1:]
    for pos, partner in enumerate(rest):
        if owners[partner] == owners[first]:
            continue
        remainder = rest[:pos] + rest[pos + 1 :]
        for tail in _iter_index_matchings(owners, remainder):
            yield ((first, partner),) + tail


def enumerate_pairings(
    m: MultiIndex, connected_only: bool, free_legs: int = 0
) -> PairingOutcome:
    """Brute-force half-edge pairing census.

    Labels every half-edge (vertices sorted by arity, half-edges numbered
    per vertex), designates every possible free-leg subset when free legs
    are requested, enumerates loopless perfect matchings of the rest, and
    buckets the outcomes: connected vacuum pairings by canonical diagram,
    unrestricted vacuum pairings by diagram forest (isolated arity-0
    vertices are dropped: they contribute an empty factor), and legged
    pairings by a leg-decorated canonical key.
    """
    arities = m.arity_list()
    n = len(arities)
    total = sum(arities)
    counts: dict = {}
    outcome = PairingOutcome(counts, connected_only, free_legs)
    if free_legs < 0 or free_legs > total or (total - free_legs) % 2:
        return outcome
    owners = [v for v, k in enumerate(arities) for _ in range(k)]

    for free_set in combinations(range(total), free_legs):
        held = set(free_set)
        paired = tuple(i for i in range(total) if i not in held)
        leg_count = [0] * n
        for i in free_set:
            leg_count[owners[i]] += 1
        for matching in _iter_index_matchings(owners, paired):
            edges = tuple(
                (owners[i], owners[j]) if owners[i] < owners[j] else (owners[j], owners[i])
                for i, j in matching
            )
            if connected_only and len(_components(n, edges)) != 1:
                continue
            if free_legs:
                canon_edges, _, _, deco = _canonical_search(
                    n, tuple(sorted(edges)), tuple(leg_count)
                )
                key = LeggedClass(
                    "n={}; e={}; l={}".format(
                        n,
                        ",".join("{}-{}".format(u + 1, v + 1) for u, v in canon_edges),
                        ",".join(str(c) for c in deco),
                    )
                )
            elif connected_only and all(a >= 1 for a in arities):
                key = canonicalize(Diagram(n, edges))
            else:
                parts = []
                for comp in _components(n, edges):
                    local = {v: i for i, v in enumerate(comp)}
                    comp_edges = [
                        (local[u], local[v]) for u, v in edges if u in local
                    ]
                    if not comp_edges:
                        continue
                    parts.append(canonicalize(Diagram(len(comp), comp_edges)))
                key = DiagForest(parts)
            counts[key] = counts.get(key, 0) + 1
    return outcome


def lift_P(m: MultiIndex) -> LinComb[CanonDiagram]:
    """Lift to diagrams: sum of N(Gamma) * Gamma over connected pairings.

    Computed from multiplicity matrices (the per-matrix labeled matching
    count is a product of factorials), which agrees with the brute-force
    enumerator; arity-0 vertices can never join a connected diagram, so
    any monomial containing them lifts to zero.
    """
    arities = m.arity_list()
    n = len(arities)
    if n == 0 or any(a == 0 for a in arities):
        return LinComb.zero()
    acc: dict[CanonDiagram, Fraction] = {}
    for edges, count in pairings.iter_multiplicity_matrices(arities):
        if len(_components(n, edges)) != 1:
            continue
        key = canonicalize(Diagram(n, edges))
        acc[key] = acc.get(key, Fraction(0)) + count
    return LinComb(acc)


def lift_P_forest(f: MIForest) -> LinComb[DiagForest]:
    """Componentwise lift: the product of the component lifts as forests."""
    acc: LinComb[DiagForest] = LinComb.single(DiagForest.empty())
    for part in f.parts():
        lifted = lift_P(part)
        merged: list[tuple[DiagForest, Scalar]] = []
        for forest, coef_a in acc.items():
            for diagram, coef_b in lifted.items():
                merged.append((forest.add(diagram), coef_a * coef_b))
        acc = LinComb(merged)
    return acc


def orbit_stabilizer_check(g: Diagram) -> bool:
    """S_M(counting_map(g)) == N(g) * S_F(g) with N counted by brute force."""
    m = counting_map(g)
    canon = canonicalize(g)
    n_count = enumerate_pairings(m, connected_only=True).get(canon)
    return sym_factor(m) == n_count * canon.aut_order


def adjoint_phi_P_check(g: Diagram, m: MultiIndex) -> bool:
    """<counting_map(g), m> == <g, lift_P(m)> under the two inner products."""
    lhs = inner_product(counting_map(g), m)
    canon = canonicalize(g)
    rhs = lift_P(m).coeff(canon) * canon.aut_order
    return lhs == rhs


def commuting_square_check(
    m: MultiIndex, p: DegreeParams, rule: Rule | None = None
) -> bool:
    """Lift of the monomial coproduct equals the diagram coproduct of the lift.

    Both sides land in combinations over (diagram forest, canonical trunk)
    pairs; the rule, when given, projects trunks on both sides (monomial
    support on the left, trunk vertex arities on the right).
    """
    lhs: dict[Tuple[DiagForest, CanonDiagram], Fraction] = {}
    for (forest, trunk), coef in coproduct_reduced(m, p, rule).items():
        lifted_forest = lift_P_forest(forest)
        lifted_trunk = lift_P(trunk)
        for df, ca in lifted_forest.items():
            for dt, cb in lifted_trunk.items():
                key = (df, dt)
                lhs[key] = lhs.get(key, Fraction(0)) + coef * ca * cb

    rhs: dict[Tuple[DiagForest, CanonDiagram], Fraction] = {}
    for diagram, weight in lift_P(m).items():
        for (forest, trunk), coef in coproduct_reduced_F(diagram.diagram, p).items():
            if rule is not None and not rule.admits(counting_map(trunk.diagram)):
                continue
            key = (forest, trunk)
            rhs[key] = rhs.get(key, Fraction(0)) + weight * coef

    lhs = {k: v for k, v in lhs.items() if v}
    rhs = {k: v for k, v in rhs.items() if v}
    return lhs == rhs


def morphism_insert_check(g1: Diagram, g2: Diagram, rule: Rule | None = None) -> bool:
    """counting_map is a morphism for single insertion."""
    lhs: dict[MultiIndex, Fraction] = {}
    for canon, coef in insert_F(g1, g2, rule).items():
        key = counting_map(canon.diagram)
        lhs[key] = lhs.get(key, Fraction(0)) + coef
    lhs = {k: v for k, v in lhs.items() if v}
    rhs = {
        k: v for k, v in insert(counting_map(g1), counting_map(g2), rule).items()
    }
    return lhs == rhs


def morphism_star_check(f: DiagForest, g: Diagram, rule: Rule | None = None) -> bool:
    """counting_map is a morphism for simultaneous insertion."""
    lhs: dict[MultiIndex, Fraction] = {}
    for canon, coef in simultaneous_insert_F(f, g, rule).items():
        key = counting_map(canon.diagram)
        lhs[key] = lhs.get(key, Fraction(0)) + coef
    lhs = {k: v for k, v in lhs.items() if v}
    mi_forest = counting_map(f)
    rhs = {
        k: v
        for k, v in simultaneous_insert(mi_forest, counting_map(g), rule).items()
    }
    return lhs == rhs
