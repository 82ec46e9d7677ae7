"""Connected loopless multigraphs: canonicalization, extraction, insertion.

Diagrams are connected multigraphs without self-loops in which every
vertex carries at least one edge.  The module provides a deterministic
canonical labeling with automorphism counting, the degree map, divergent
subgraph extraction with contraction (the diagram-side coproduct), and
the cut/graft insertion products adjoint to it.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence, Tuple

from .lincomb import LinComb, Scalar
from .multiindex import DegreeParams, MIForest, MultiIndex, Rule

Edge = Tuple[int, int]

_TEXT = re.compile(r"^n=(\d+);\s*e=(.*)$")
_PAIR = re.compile(r"^(\d+)-(\d+)$")


def _normalize_edges(edges: Iterable[Sequence[int]]) -> tuple[Edge, ...]:
    out: list[Edge] = []
    for edge in edges:
        u, v = edge
        if u == v:
            raise ValueError("self-loops are forbidden")
        out.append((u, v) if u < v else (v, u))
    return tuple(sorted(out))


def _components(vertex_count: int, edges: Sequence[Edge]) -> list[list[int]]:
    parent = list(range(vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    buckets: dict[int, list[int]] = {}
    for v in range(vertex_count):
        buckets.setdefault(find(v), []).append(v)
    return sorted(buckets.values())


class Diagram:
    """Connected loopless multigraph; vertices 0..n-1, each incident to an edge."""

    __slots__ = ("_n", "_edges")

    def __init__(self, vertex_count: int, edges: Iterable[Sequence[int]]):
        edges = _normalize_edges(edges)
        if vertex_count < 1:
            raise ValueError("need at least one vertex")
        if not edges:
            raise ValueError("need at least one edge")
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValueError("edge endpoint out of range")
        covered = {u for e in edges for u in e}
        if len(covered) != vertex_count:
            raise ValueError("every vertex must be incident to an edge")
        if len(_components(vertex_count, edges)) != 1:
            raise ValueError("diagram must be connected")
        self._n = vertex_count
        self._edges = edges

    @classmethod
    def parse(cls, text: str) -> "Diagram":
        match = _TEXT.match(text.strip())
        if not match:
            raise ValueError("bad diagram text {!r}".format(text))
        n = int(match.group(1))
        body = match.group(2).strip()
        if not body:
            raise ValueError("diagram needs at least one edge")
        edges = []
        for chunk in body.split(","):
            pair = _PAIR.match(chunk.strip())
            if not pair:
                raise ValueError("bad edge token {!r}".format(chunk.strip()))
            u, v = int(pair.group(1)), int(pair.group(2))
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError("edge endpoint out of range in {!r}".format(chunk))
            edges.append((u - 1, v - 1))
        return cls(n, edges)

    @classmethod
    def from_json(cls, payload: Mapping) -> "Diagram":
        return cls(int(payload["n"]), [(u - 1, v - 1) for u, v in payload["e"]])

    def to_json(self) -> dict:
        return {"n": self._n, "e": [[u + 1, v + 1] for u, v in self._edges]}

    @property
    def vertex_count(self) -> int:
        return self._n

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def edge_count(self) -> int:
        return len(self._edges)

    def arity(self, v: int) -> int:
        return sum((u == v) + (w == v) for u, w in self._edges)

    def arities(self) -> tuple[int, ...]:
        degs = [0] * self._n
        for u, v in self._edges:
            degs[u] += 1
            degs[v] += 1
        return tuple(degs)

    def multiplicity(self) -> dict[Edge, int]:
        mult: dict[Edge, int] = {}
        for e in self._edges:
            mult[e] = mult.get(e, 0) + 1
        return mult

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __str__(self) -> str:
        pairs = ",".join("{}-{}".format(u + 1, v + 1) for u, v in self._edges)
        return "n={}; e={}".format(self._n, pairs)

    def __repr__(self) -> str:
        return "Diagram({})".format(self)


def _refine_colors(
    n: int, mult: dict[Edge, int], colors: list[int]
) -> list[int]:
    """Iteratively split color classes by colored-neighborhood signatures."""
    while True:
        signatures = []
        for v in range(n):
            neigh: dict[tuple[int, int], int] = {}
            for (a, b), m in mult.items():
                if a == v:
                    key = (colors[b], m)
                elif b == v:
                    key = (colors[a], m)
                else:
                    continue
                neigh[key] = neigh.get(key, 0) + 1
            signatures.append((colors[v], tuple(sorted(neigh.items()))))
        order = sorted(set(signatures))
        new_colors = [order.index(sig) for sig in signatures]
        if new_colors == colors:
            return colors
        colors = new_colors


def _canonical_search(
    n: int, edges: tuple[Edge, ...], decorations: tuple[int, ...] | None = None
) -> tuple[tuple[Edge, ...], tuple[int, ...], int, tuple[int, ...] | None]:
    """Canonical relabeling by exhaustive search over color-respecting maps.

    Returns (canonical edge tuple, the permutation old->new achieving it,
    number of vertex automorphisms, relabeled decorations).  Decorations,
    when given, are per-vertex integers that must be preserved (used for
    pairing outcomes carrying free legs).
    """
    mult: dict[Edge, int] = {}
    for e in edges:
        mult[e] = mult.get(e, 0) + 1
    degs = [0] * n
    for (u, v), m in mult.items():
        degs[u] += m
        degs[v] += m
    base = [
        (degs[v], decorations[v] if decorations is not None else 0) for v in range(n)
    ]
    order = sorted(set(base))
    colors = _refine_colors(n, mult, [order.index(b) for b in base])

    classes: dict[int, list[int]] = {}
    for v in range(n):
        classes.setdefault(colors[v], []).append(v)
    blocks = [classes[c] for c in sorted(classes)]
    offsets = []
    pos = 0
    for block in blocks:
        offsets.append(pos)
        pos += len(block)

    best: tuple | None = None
    best_perm: tuple[int, ...] | None = None
    aut = 0
    for arrangement in product(*(permutations(block) for block in blocks)):
        perm = [0] * n
        for block_old, offset in zip(arrangement, offsets):
            for i, v in enumerate(block_old):
                perm[v] = offset + i
        relabeled = tuple(
            sorted(
                (perm[u], perm[v]) if perm[u] < perm[v] else (perm[v], perm[u])
                for u, v in edges
            )
        )
        deco = (
            tuple(
                decorations[v]
                for v in sorted(range(n), key=lambda w: perm[w])
            )
            if decorations is not None
            else None
        )
        candidate = (relabeled, deco)
        # Arrangements achieving the canonical form are a coset of the
        # automorphism group, so counting them counts automorphisms
        # independently of the input labeling.
        if best is None or candidate < best:
            best = candidate
            best_perm = tuple(perm)
            aut = 1
        elif candidate == best:
            aut += 1
    assert best is not None and best_perm is not None
    return best[0], best_perm, aut, best[1]


class CanonDiagram:
    """Canonical form of a diagram: key, representative, automorphism order.

    aut_order counts (vertex permutation, edge permutation) pairs fixing
    the diagram, i.e. the vertex automorphisms times the product of the
    parallel-edge factorials; it equals the symmetry factor S_F.
    """

    __slots__ = ("_key", "_diagram", "_aut_order")
    _interned: dict[str, "CanonDiagram"] = {}

    def __new__(cls, diagram: Diagram):
        canon_edges, _, vertex_aut, _ = _canonical_search(
            diagram.vertex_count, diagram.edges
        )
        representative = Diagram(diagram.vertex_count, canon_edges)
        key = str(representative)
        hit = cls._interned.get(key)
        if hit is not None:
            return hit
        self = object.__new__(cls)
        edge_perms = 1
        for m in representative.multiplicity().values():
            edge_perms *= factorial(m)
        self._key = key
        self._diagram = representative
        self._aut_order = vertex_aut * edge_perms
        cls._interned[key] = self
        return self

    @property
    def key(self) -> str:
        return self._key

    def key_hex(self) -> str:
        return self._key.encode("utf-8").hex()

    @property
    def diagram(self) -> Diagram:
        return self._diagram

    @property
    def aut_order(self) -> int:
        return self._aut_order

    def sym_factor(self) -> int:
        return self._aut_order

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CanonDiagram):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "CanonDiagram") -> bool:
        return self._key < other._key

    def __str__(self) -> str:
        return self._key

    def __repr__(self) -> str:
        return "CanonDiagram({})".format(self._key)


_canon_cache: dict[tuple[int, tuple[Edge, ...]], CanonDiagram] = {}


def canonicalize(g: Diagram) -> CanonDiagram:
    key = (g.vertex_count, g.edges)
    hit = _canon_cache.get(key)
    if hit is None:
        hit = CanonDiagram(g)
        _canon_cache[key] = hit
    return hit


class DiagForest:
    """Unordered multiset of canonical diagrams; empty forest is the unit."""

    __slots__ = ("_parts",)

    def __init__(self, parts: Iterable[CanonDiagram] = ()):
        self._parts = tuple(sorted(parts))

    @classmethod
    def empty(cls) -> "DiagForest":
        return cls()

    @classmethod
    def of(cls, *parts: CanonDiagram) -> "DiagForest":
        return cls(parts)

    def parts(self) -> tuple[CanonDiagram, ...]:
        return self._parts

    def counts(self) -> list[tuple[CanonDiagram, int]]:
        out: list[tuple[CanonDiagram, int]] = []
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

    def merge(self, other: "DiagForest") -> "DiagForest":
        return DiagForest(self._parts + other._parts)

    def add(self, part: CanonDiagram) -> "DiagForest":
        return DiagForest(self._parts + (part,))

    def sym_factor(self) -> int:
        out = 1
        for part, count in self.counts():
            out *= factorial(count) * part.aut_order**count
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiagForest):
            return NotImplemented
        return self._parts == other._parts

    def __hash__(self) -> int:
        return hash(self._parts)

    def __lt__(self, other: "DiagForest") -> bool:
        return tuple(p.key for p in self._parts) < tuple(p.key for p in other._parts)

    def __str__(self) -> str:
        if not self._parts:
            return "1"
        return " . ".join(p.key for p in self._parts)

    def __repr__(self) -> str:
        return "DiagForest({})".format(self)


class HalfEdgeGraph:
    """A diagram body (possibly edgeless, possibly disconnected) plus free legs.

    Legs record the body vertex each cut edge was anchored at.  Produced by
    cutting a vertex out of a diagram; consumed by grafting.
    """

    __slots__ = ("vertex_count", "body_edges", "legs")

    def __init__(self, vertex_count: int, body_edges: Iterable[Sequence[int]], legs: Iterable[int]):
        self.vertex_count = vertex_count
        self.body_edges = _normalize_edges(body_edges)
        self.legs = tuple(sorted(legs))
        for anchor in self.legs:
            if not (0 <= anchor < vertex_count):
                raise ValueError("leg anchor out of range")
        incident = {u for e in self.body_edges for u in e} | set(self.legs)
        if len(incident) != vertex_count:
            raise ValueError("every body vertex needs an edge or a leg")

    def __repr__(self) -> str:
        return "HalfEdgeGraph(n={}, edges={}, legs={})".format(
            self.vertex_count, self.body_edges, self.legs
        )


def counting_map(g: Diagram | DiagForest) -> MultiIndex | MIForest:
    """Vertex-arity census: diagram -> monomial, forest -> monomial forest."""
    if isinstance(g, DiagForest):
        return MIForest(counting_map(part.diagram) for part in g.parts())
    acc: dict[int, int] = {}
    for k in g.arities():
        acc[k] = acc.get(k, 0) + 1
    return MultiIndex(acc)


def degree(g: Diagram, p: DegreeParams) -> Scalar:
    """deg Gamma = ell * |edges| + d * (|vertices| - 1)."""
    return p.ell * g.edge_count() + p.d * (g.vertex_count - 1)


def is_divergent(g: Diagram, p: DegreeParams) -> bool:
    return degree(g, p) <= 0


def divergent_extractions(
    g: Diagram, p: DegreeParams
) -> list[tuple[DiagForest, Diagram]]:
    """All proper divergent subgraph extractions with their contractions.

    A subgraph is an edge subset; components must each have non-positive
    degree, and any omitted edge internal to one component is a self-loop
    after contraction, so such subsets are discarded.  Omitted parallel
    copies of a taken edge always trigger that rule, hence subsets are
    enumerated over whole parallel classes.  One list entry per edge
    subset; callers accumulate isomorphism multiplicities.
    """
    mult = g.multiplicity()
    class_edges = sorted(mult)
    out: list[tuple[DiagForest, Diagram]] = []
    for mask in range(1, (1 << len(class_edges)) - 1):
        taken = [class_edges[i] for i in range(len(class_edges)) if mask >> i & 1]
        sub_edges: list[Edge] = []
        for e in taken:
            sub_edges.extend([e] * mult[e])
        touched = sorted({u for e in sub_edges for u in e})
        comp_lists = [
            comp
            for comp in _components(g.vertex_count, tuple(sub_edges))
            if len(comp) > 1 or comp[0] in touched
        ]
        comp_of = {v: i for i, comp in enumerate(comp_lists) for v in comp}
        omitted = [e for e in class_edges if e not in set(taken)]
        if any(
            u in comp_of and v in comp_of and comp_of[u] == comp_of[v]
            for u, v in omitted
        ):
            continue
        pieces: list[CanonDiagram] = []
        divergent = True
        for comp in comp_lists:
            local = {v: i for i, v in enumerate(comp)}
            comp_edges = [
                (local[u], local[v]) for u, v in sub_edges if u in local and v in local
            ]
            piece = Diagram(len(comp), comp_edges)
            if not is_divergent(piece, p):
                divergent = False
                break
            pieces.append(canonicalize(piece))
        if not divergent:
            continue
        remap: dict[int, int] = {}
        for i, comp in enumerate(comp_lists):
            for v in comp:
                remap[v] = i
        next_label = len(comp_lists)
        for v in range(g.vertex_count):
            if v not in remap:
                remap[v] = next_label
                next_label += 1
        trunk_edges = []
        for e in omitted:
            for _ in range(mult[e]):
                trunk_edges.append((remap[e[0]], remap[e[1]]))
        trunk = Diagram(next_label, trunk_edges)
        out.append((DiagForest(pieces), trunk))
    return out


def coproduct_reduced_F(
    g: Diagram, p: DegreeParams
) -> LinComb[Tuple[DiagForest, CanonDiagram]]:
    """Reduced diagram coproduct: extraction pairs with iso multiplicities."""
    acc: list[tuple[Tuple[DiagForest, CanonDiagram], Scalar]] = []
    for forest, trunk in divergent_extractions(g, p):
        acc.append(((forest, canonicalize(trunk)), Fraction(1)))
    return LinComb(acc)


def coproduct_full_F(
    g: Diagram, p: DegreeParams
) -> LinComb[Tuple[DiagForest, DiagForest]]:
    """Full diagram coproduct with both legs as forests.

    Forest-valued right legs make the primitive term (g, empty)
    representable; reduced trunks appear as singleton forests.
    """
    me = canonicalize(g)
    acc: list[tuple[Tuple[DiagForest, DiagForest], Scalar]] = [
        ((DiagForest.empty(), DiagForest.of(me)), Fraction(1)),
        ((DiagForest.of(me), DiagForest.empty()), Fraction(1)),
    ]
    for (forest, trunk), coef in coproduct_reduced_F(g, p).items():
        acc.append(((forest, DiagForest.of(trunk)), coef))
    return LinComb(acc)


def cut_vertex(g: Diagram, v: int) -> HalfEdgeGraph:
    """Remove a vertex; each removed edge leaves a leg at its other endpoint."""
    if not (0 <= v < g.vertex_count):
        raise ValueError("no such vertex")
    relabel = {u: i for i, u in enumerate(w for w in range(g.vertex_count) if w != v)}
    body_edges = [
        (relabel[a], relabel[b]) for a, b in g.edges if a != v and b != v
    ]
    legs = []
    for a, b in g.edges:
        if a == v and b == v:
            raise AssertionError("self-loop in diagram")
        if a == v:
            legs.append(relabel[b])
        elif b == v:
            legs.append(relabel[a])
    return HalfEdgeGraph(g.vertex_count - 1, body_edges, legs)


def _admits(g: Diagram, rule: Rule | None) -> bool:
    return rule is None or all(k in rule.arities for k in g.arities())


def graft(
    h: HalfEdgeGraph, target: Diagram, rule: Rule | None = None
) -> LinComb[CanonDiagram]:
    """Attach every leg of h to a target vertex, in all possible ways.

    Each assignment of legs to target vertices (repetition allowed) yields
    one merged diagram; the rule, when given, keeps only results whose
    vertex arities all lie in the allowed set.
    """
    if not h.legs:
        raise ValueError("graft needs at least one leg")
    shift = h.vertex_count
    base_edges = list(h.body_edges) + [(u + shift, v + shift) for u, v in target.edges]
    acc: list[tuple[CanonDiagram, Scalar]] = []
    for assignment in product(range(target.vertex_count), repeat=len(h.legs)):
        edges = base_edges + [
            (anchor, shift + w) for anchor, w in zip(h.legs, assignment)
        ]
        merged = Diagram(h.vertex_count + target.vertex_count, edges)
        if not _admits(merged, rule):
            continue
        acc.append((canonicalize(merged), Fraction(1)))
    return LinComb(acc)


def insert_F(
    g1: Diagram, g2: Diagram, rule: Rule | None = None
) -> LinComb[CanonDiagram]:
    """Insertion of g1 into g2: cut each vertex of g2, graft its legs onto g1."""
    acc: LinComb[CanonDiagram] = LinComb.zero()
    for v in range(g2.vertex_count):
        acc = acc + graft(cut_vertex(g2, v), g1, rule)
    return acc


def simultaneous_insert_F(
    f: DiagForest, g: Diagram, rule: Rule | None = None
) -> LinComb[CanonDiagram]:
    """Insert every forest component at a distinct cut vertex of g.

    Sums over ordered injective assignments of components to vertices and
    over all reattachment choices of the cut edges: an edge from a cut
    vertex to a survivor picks a vertex in that component; an edge between
    two cut vertices picks one vertex in each.
    """
    if f.is_empty():
        raise ValueError("simultaneous insertion needs a nonempty forest")
    n = len(f)
    if n > g.vertex_count:
        return LinComb.zero()
    bodies = [part.diagram for part in f.parts()]
    acc: list[tuple[CanonDiagram, Scalar]] = []
    for cut_sites in permutations(range(g.vertex_count), n):
        site_of = {v: i for i, v in enumerate(cut_sites)}
        survivors = [v for v in range(g.vertex_count) if v not in site_of]
        survivor_label = {v: i for i, v in enumerate(survivors)}
        offsets = []
        pos = len(survivors)
        for body in bodies:
            offsets.append(pos)
            pos += body.vertex_count
        base_edges: list[Edge] = []
        for i, body in enumerate(bodies):
            base_edges.extend(
                (offsets[i] + u, offsets[i] + v) for u, v in body.edges
            )
        choice_sets: list[list[Edge]] = []
        for a, b in g.edges:
            if a in site_of and b in site_of:
                i, j = site_of[a], site_of[b]
                choice_sets.append(
                    [
                        (offsets[i] + x, offsets[j] + y)
                        for x in range(bodies[i].vertex_count)
                        for y in range(bodies[j].vertex_count)
                    ]
                )
            elif a in site_of:
                i = site_of[a]
                choice_sets.append(
                    [
                        (survivor_label[b], offsets[i] + x)
                        for x in range(bodies[i].vertex_count)
                    ]
                )
            elif b in site_of:
                i = site_of[b]
                choice_sets.append(
                    [
                        (survivor_label[a], offsets[i] + x)
                        for x in range(bodies[i].vertex_count)
                    ]
                )
            else:
                choice_sets.append([(survivor_label[a], survivor_label[b])])
        for picks in product(*choice_sets):
            merged = Diagram(pos, base_edges + list(picks))
            if not _admits(merged, rule):
                continue
            acc.append((canonicalize(merged), Fraction(1)))
    return LinComb(acc)


def iter_connected_diagrams(max_edges: int) -> Iterator[CanonDiagram]:
    """All connected diagrams with at most max_edges edges, up to isomorphism.

    Grows diagrams edge by edge.  Every connected multigraph has an edge
    whose removal (dropping an isolated endpoint) leaves a connected
    diagram: a parallel copy, a cycle edge, or a leaf edge (a graph with
    neither is a tree, and trees have leaves).  Reversing that step means
    adding an edge between existing vertices or an edge to one fresh
    vertex reaches everything.
    """
    seen: set[CanonDiagram] = set()
    frontier: list[CanonDiagram] = []
    single = canonicalize(Diagram(2, [(0, 1)]))
    seen.add(single)
    frontier.append(single)
    yield single
    for _ in range(1, max_edges):
        next_frontier: list[CanonDiagram] = []
        for canon in frontier:
            g = canon.diagram
            n = g.vertex_count
            extensions: list[Diagram] = []
            for u in range(n):
                for v in range(u + 1, n):
                    extensions.append(Diagram(n, list(g.edges) + [(u, v)]))
            for u in range(n):
                extensions.append(Diagram(n + 1, list(g.edges) + [(u, n)]))
            for ext in extensions:
                c = canonicalize(ext)
                if c not in seen:
                    seen.add(c)
                    next_frontier.append(c)
                    yield c
        frontier = next_frontier
