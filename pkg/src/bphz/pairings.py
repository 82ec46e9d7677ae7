"""Half-edge pairing machinery shared by the graph and monomial layers.

A monomial with vertex arities ``(k_1, ..., k_n)`` describes n labeled
vertices carrying that many half-edges each.  This module enumerates the
ways to pair those half-edges into loopless edges: either one labeled
matching at a time (the ground-truth oracle) or aggregated by edge
multiplicity matrix (the fast path; the two are cross-asserted in tests).
No canonicalization happens here; callers bucket the resulting labeled
graphs themselves.
"""

from __future__ import annotations

from math import factorial
from typing import Iterator, Sequence, Tuple

Edge = Tuple[int, int]  # (u, v) with u < v, 0-based vertex indices


def connected(vertex_count: int, edges: Sequence[Edge]) -> bool:
    """True iff the graph spans all vertices in one component."""
    if vertex_count <= 1:
        return True
    parent = list(range(vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merges = 0
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            merges += 1
    return merges == vertex_count - 1


def components(vertex_count: int, edges: Sequence[Edge]) -> list[list[int]]:
    """Connected components as sorted vertex lists (isolated vertices included)."""
    adjacency: list[set[int]] = [set() for _ in range(vertex_count)]
    for u, v in edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    seen = [False] * vertex_count
    out: list[list[int]] = []
    for start in range(vertex_count):
        if seen[start]:
            continue
        stack, block = [start], []
        seen[start] = True
        while stack:
            node = stack.pop()
            block.append(node)
            for nxt in adjacency[node]:
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append(nxt)
        out.append(sorted(block))
    return out


def iter_labeled_matchings(arities: Sequence[int]) -> Iterator[Tuple[Edge, ...]]:
    """Yield every loopless perfect matching of the labeled half-edges.

    Half-edges are (vertex, slot) pairs; each matching is reported as its
    edge multiset (sorted tuple of vertex pairs).  Distinct labeled
    matchings are yielded separately even when their edge multisets agree.
    """
    half_edges = [v for v, k in enumerate(arities) for _ in range(k)]
    if len(half_edges) % 2:
        return

    def recurse(free: list[int], acc: list[Edge]) -> Iterator[Tuple[Edge, ...]]:
        if not free:
            yield tuple(sorted(acc))
            return
        first = free[0]
        rest = free[1:]
        for idx, partner in enumerate(rest):
            if partner == first:
                continue
            acc.append((first, partner) if first < partner else (partner, first))
            yield from recurse(rest[:idx] + rest[idx + 1 :], acc)
            acc.pop()

    yield from recurse(half_edges, [])


def iter_multiplicity_matrices(arities: Sequence[int]) -> Iterator[Tuple[Tuple[Edge, ...], int]]:
    """Yield (edge multiset, labeled matching count) per multiplicity matrix.

    Enumerates symmetric loopless edge-multiplicity assignments with row
    sums equal to the arities; the count of labeled matchings realizing a
    matrix is  prod_v k_v! / prod_{u<v} m_uv!.
    """
    n = len(arities)
    if sum(arities) % 2:
        return
    remaining = list(arities)
    rows: list[Tuple[int, ...]] = []

    def recurse(u: int) -> Iterator[Tuple[Tuple[Edge, ...], int]]:
        if u == n:
            edges: list[Edge] = []
            denom = 1
            for i, row in enumerate(rows):
                for j, mult in enumerate(row):
                    if mult:
                        edges.extend([(i, i + 1 + j)] * mult)
                        denom *= factorial(mult)
            count = 1
            for k in arities:
                count *= factorial(k)
            yield tuple(sorted(edges)), count // denom
            return
        targets = list(range(u + 1, n))
        need = remaining[u]
        if need > sum(remaining[v] for v in targets):
            return

        def fill(pos: int, left: int, row: list[int]) -> Iterator[Tuple[Tuple[Edge, ...], int]]:
            if pos == len(targets):
                if left == 0:
                    rows.append(tuple(row))
                    yield from recurse(u + 1)
                    rows.pop()
                return
            v = targets[pos]
            tail_capacity = sum(remaining[w] for w in targets[pos + 1 :])
            low = max(0, left - tail_capacity)
            high = min(left, remaining[v])
            for take in range(low, high + 1):
                remaining[v] -= take
                row.append(take)
                yield from fill(pos + 1, left - take, row)
                row.pop()
                remaining[v] += take

        yield from fill(0, need, [])

    yield from recurse(0)


def degree_feasible_connected(degrees: Sequence[int]) -> bool:
    """Feasibility of a connected loopless multigraph with these degrees.

    Conditions: even degree sum; every vertex degree >= 1 (single vertex:
    degree 0); enough edges to span (sum/2 >= n-1); and no vertex demands
    more than the others can supply (max <= sum - max).
    """
    n = len(degrees)
    total = sum(degrees)
    if n == 0:
        return False
    if n == 1:
        return degrees[0] == 0
    if total % 2 or any(d < 1 for d in degrees):
        return False
    if total // 2 < n - 1:
        return False
    return 2 * max(degrees) <= total


def _construct_connected(degrees: Sequence[int]) -> list[Edge] | None:
    """Greedy witness construction for a feasible connected degree sequence.

    Builds a spanning structure by always joining the largest-residual
    vertex to the largest-residual vertex of another component, then pairs
    leftovers largest-first.  Returns None if the greedy gets stuck.
    """
    n = len(degrees)
    if n == 1:
        return []
    residual = list(degrees)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges: list[Edge] = []
    merges = 0
    while merges < n - 1:
        candidates = sorted(range(n), key=lambda v: -residual[v])
        u = candidates[0]
        partner = next(
            (v for v in candidates[1:] if residual[v] > 0 and find(v) != find(u)), None
        )
        if partner is None or residual[u] == 0:
            return None
        parent[find(u)] = find(partner)
        merges += 1
        residual[u] -= 1
        residual[partner] -= 1
        edges.append((u, partner) if u < partner else (partner, u))
    while True:
        order = sorted((v for v in range(n) if residual[v] > 0), key=lambda v: -residual[v])
        if not order:
            break
        if len(order) == 1:
            return None
        u, v = order[0], order[1]
        residual[u] -= 1
        residual[v] -= 1
        edges.append((u, v) if u < v else (v, u))
    return sorted(edges)


def _search_connected(degrees: Sequence[int]) -> bool:
    """Exhaustive loopless-matching search with early exit on connectivity."""
    for matching in iter_labeled_matchings(degrees):
        if connected(len(degrees), matching):
            return True
    return False


def connected_realization_exists(degrees: Sequence[int]) -> bool:
    """True iff a connected loopless multigraph realizes the degrees.

    Uses the feasibility criterion, then confirms with a greedy witness,
    falling back to exhaustive search in the (unexpected) stuck case.
    """
    if not degree_feasible_connected(degrees):
        return False
    if _construct_connected(degrees) is not None:
        return True
    return _search_connected(degrees)


def matching_exists(arities: Sequence[int], free_legs: int) -> bool:
    """Existence of a connected loopless pairing leaving free_legs unpaired.

    Free legs may sit on any vertices; all vertices must be spanned by the
    paired edges (a single vertex with every leg free counts as connected).
    """
    if free_legs < 0 or (sum(arities) - free_legs) % 2:
        return False
    n = len(arities)

    def distribute(idx: int, left: int, residual: list[int]) -> bool:
        if idx == n:
            return left == 0 and connected_realization_exists(residual)
        limit = min(left, arities[idx])
        for take in range(limit + 1):
            residual[idx] = arities[idx] - take
            if distribute(idx + 1, left - take, residual):
                return True
        return False

    return distribute(0, free_legs, [0] * n)
