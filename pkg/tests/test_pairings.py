"""Loopless perfect-matching enumeration on labeled half-edges.

Core claims:
    - labeled matching counts match hand checks: two triple vertices pair
      in 3! = 6 ways, two quadruple vertices in 4! = 24, three double
      vertices in 2^3 = 8 (the labeled triangles)
    - multiplicity-matrix enumeration reproduces the same totals through
      the prod k! / prod m! counting formula
    - connectivity and degree-feasibility predicates agree with small
      hand-checked instances
    - free-leg matching existence respects parity and self-pairing limits
"""

from bphz.pairings import (
    components,
    connected,
    connected_realization_exists,
    degree_feasible_connected,
    iter_labeled_matchings,
    iter_multiplicity_matrices,
    matching_exists,
)


# -- labeled matchings -------------------------------------------------------

def test_two_triple_vertices_pair_in_six_ways():
    assert sum(1 for _ in iter_labeled_matchings((3, 3))) == 6


def test_two_quadruple_vertices_pair_in_24_ways():
    assert sum(1 for _ in iter_labeled_matchings((4, 4))) == 24


def test_three_double_vertices_pair_in_eight_ways():
    matchings = list(iter_labeled_matchings((2, 2, 2)))
    assert len(matchings) == 8
    # every pairing of three double vertices is a labeled triangle
    triangle = ((0, 1), (0, 2), (1, 2))
    assert all(m == triangle for m in matchings)


def test_mixed_arities_3_3_4():
    # the unique multiplicity matrix is m01=1, m02=2, m12=2, giving
    # 3! 3! 4! / (1! 2! 2!) = 216 labeled matchings
    assert sum(1 for _ in iter_labeled_matchings((3, 3, 4))) == 216


def test_self_pairs_are_excluded():
    assert list(iter_labeled_matchings((2,))) == []
    assert sum(1 for _ in iter_labeled_matchings((1, 1))) == 1


def test_odd_half_edge_total_has_no_matchings():
    assert list(iter_labeled_matchings((3,))) == []
    assert list(iter_labeled_matchings((2, 1))) == []


# -- multiplicity matrices ---------------------------------------------------

def test_matrix_counts_sum_to_labeled_totals():
    for arities in ((3, 3), (4, 4), (2, 2, 2), (3, 3, 4), (4, 4, 4), (2, 4, 2)):
        labeled = sum(1 for _ in iter_labeled_matchings(arities))
        by_matrix = sum(count for _, count in iter_multiplicity_matrices(arities))
        assert labeled == by_matrix


def test_matrix_edge_multisets_are_distinct():
    seen = set()
    for edges, _ in iter_multiplicity_matrices((4, 4, 4)):
        assert edges not in seen
        seen.add(edges)
    # three quadruple vertices admit only the doubled triangle
    assert seen == {((0, 1), (0, 1), (0, 2), (0, 2), (1, 2), (1, 2))}


# -- connectivity helpers ----------------------------------------------------

def test_connected_predicate():
    assert connected(1, [])
    assert connected(2, [(0, 1)])
    assert not connected(3, [(0, 1)])
    assert connected(3, [(0, 1), (1, 2)])


def test_components_include_isolated_vertices():
    assert components(3, [(0, 1)]) == [[0, 1], [2]]


def test_degree_feasibility():
    assert degree_feasible_connected((0,))
    assert not degree_feasible_connected((2,))
    assert degree_feasible_connected((1, 1))
    assert not degree_feasible_connected((3, 1))
    assert degree_feasible_connected((6, 1, 1, 1, 1, 1, 1))


def test_connected_realization():
    assert connected_realization_exists((2, 2))
    assert connected_realization_exists((2, 2, 2))
    assert not connected_realization_exists((1, 1, 1, 1))
    assert connected_realization_exists((3, 3))
    assert not connected_realization_exists((4, 2, 1))


def test_matching_exists_with_free_legs():
    assert matching_exists((4,), 4)
    assert not matching_exists((4,), 2)
    assert matching_exists((3, 3), 2)
    assert not matching_exists((3, 3), 1)
    assert not matching_exists((2,), 0)
    assert matching_exists((2, 2), 0)
