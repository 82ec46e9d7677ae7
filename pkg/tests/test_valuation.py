"""Lattice valuations, Wick moments, cumulants, and counterterms.

Core claims (hand-checked oracles):
    - the periodic kernel wraps indices and enforces evenness
    - diagram values match direct lattice sums written out longhand
    - monomial values pass through the lift; the recursive variant
      (moments minus proper partitions) agrees with it
    - the Wick moment equals the brute-force pairing sum
    - cumulant series of a quartic coupling: alpha^2/2 on z4^2 and
      -alpha^3/6 on z4^3
    - counterterm goldens: gamma_4 = 0, gamma_2 = 48 alpha^2 Pi[triple]
      (8 alpha^2 times the lifted z3^2 value), gamma_0 =
      12 alpha^2 Pi[quadruple] - 288 alpha^3 Pi[doubled-triangle]
      (alpha^2/2 and -alpha^3/6 times the lifted z4^2 and z4^3 values),
      stable for any truncation >= 12 half-edges
"""

from fractions import Fraction

import pytest

from bphz.bridge import lift_P
from bphz.feynman import Diagram, canonicalize
from bphz.multiindex import DegreeParams, MultiIndex, Rule
from bphz.pairings import iter_labeled_matchings
from bphz.symvalue import SymbolicValue
from bphz.valuation import (
    KernelSpec,
    counterterms,
    cumulant_series,
    moment_oracle,
    phi4_couplings,
    phi4_report,
    resummation_check,
    sample_kernel,
    value_F_numeric,
    value_F_symbolic,
    value_M,
    value_M_recursive,
)

P = DegreeParams(Fraction(-1), 3)
RULE = Rule.parse("2,4")
ALPHA = SymbolicValue.symbol("alpha")


def _m(text: str) -> MultiIndex:
    return MultiIndex.parse(text)


# -- kernels ----------------------------------------------------------------------

def test_kernel_wraps_and_reads_flat_values():
    k = sample_kernel(d=1, N=4)
    assert k.at((0,), (0,)) == 1.0
    assert k.at((0,), (1,)) == pytest.approx(0.5)
    assert k.at((0,), (2,)) == pytest.approx(0.2)
    assert k.at((0,), (3,)) == pytest.approx(0.5)
    assert k.at((3,), (0,)) == k.at((0,), (3,))


def test_kernel_json_round_trip():
    k = sample_kernel(d=1, N=4)
    assert KernelSpec.from_json(k.to_json()) == k


def test_kernel_rejects_asymmetric_values():
    with pytest.raises(ValueError):
        KernelSpec(1, 4, [1.0, 0.5, 0.2, 0.4])


# -- diagram values ------------------------------------------------------------------

def test_value_of_single_edge_longhand():
    k = KernelSpec(2, 2, [1.0, 0.5, 0.5, 1.0 / 3.0])
    edge = canonicalize(Diagram.parse("n=2; e=1-2"))
    # sum over x, y in (Z_2)^2 of K(x - y), divided by 4^2
    want = sum(
        k.at((a, b), (c, d))
        for a in range(2)
        for b in range(2)
        for c in range(2)
        for d in range(2)
    ) / 16.0
    assert value_F_numeric(edge, k) == pytest.approx(want, rel=1e-12)


def test_value_of_triple_edge_longhand():
    k = sample_kernel(d=1, N=4)
    triple = canonicalize(Diagram.parse("n=2; e=1-2,1-2,1-2"))
    want = sum(
        k.at((x,), (y,)) ** 3 for x in range(4) for y in range(4)
    ) / 16.0
    assert value_F_numeric(triple, k) == pytest.approx(want, rel=1e-12)


def test_value_F_symbolic_is_one_symbol_per_class():
    triple = canonicalize(Diagram.parse("n=2; e=1-2,1-2,1-2"))
    assert value_F_symbolic(triple) == SymbolicValue.symbol("Pi[n=2; e=1-2,1-2,1-2]")


# -- monomial values -------------------------------------------------------------------

def test_value_M_through_the_lift():
    k = sample_kernel(d=1, N=4)
    triple = canonicalize(Diagram.parse("n=2; e=1-2,1-2,1-2"))
    assert value_M(_m("z3^2"), k) == pytest.approx(6 * value_F_numeric(triple, k))
    assert value_M(_m("z3^2")) == SymbolicValue.symbol("Pi[n=2; e=1-2,1-2,1-2]") \
        * SymbolicValue.constant(6)
    assert value_M(_m("z2"), k) == 0.0


def test_moment_equals_brute_force_wick_sum():
    k = sample_kernel(d=1, N=4)
    for text in ("z3^2", "z2^2", "z1^4", "z2^3"):
        m = _m(text)
        arities = m.arity_list()
        n = len(arities)
        brute = 0.0
        for matching in iter_labeled_matchings(arities):
            for placement in _placements(n, 4):
                term = 1.0
                for u, v in matching:
                    term *= k.at((placement[u],), (placement[v],))
                brute += term
        brute /= float(4 ** n)
        assert moment_oracle(m, k) == pytest.approx(brute, rel=1e-12), text


def _placements(n: int, size: int):
    if n == 0:
        yield ()
        return
    for rest in _placements(n - 1, size):
        for x in range(size):
            yield rest + (x,)


def test_recursive_value_agrees_with_lift():
    k = sample_kernel(d=1, N=4)
    for text in ("z3^2", "z2^2", "z4^2", "z2^3", "z2 z3^2", "z2^2 z4"):
        m = _m(text)
        assert value_M_recursive(m, k) == pytest.approx(
            value_M(m, k), rel=1e-9
        ), text


def test_recursive_value_rejects_arity_zero():
    k = sample_kernel(d=1, N=4)
    with pytest.raises(ValueError):
        value_M_recursive(_m("z0"), k)


# -- cumulants and counterterms -----------------------------------------------------------

def test_cumulant_series_quartic():
    series = cumulant_series({4: ALPHA}, P, RULE, max_half_edges=12)
    half = SymbolicValue.constant(Fraction(1, 2))
    sixth = SymbolicValue.constant(Fraction(1, 6))
    assert series.coeff(_m("z4^2")) == ALPHA * ALPHA * half
    assert series.coeff(_m("z4^3")) == -(ALPHA ** 3) * sixth
    assert all(k.get(4) >= 2 for k in series.keys())


def test_counterterm_goldens():
    gamma = counterterms(phi4_couplings(), P, RULE, max_half_edges=12)
    pi_iii = SymbolicValue.symbol("Pi[n=2; e=1-2,1-2,1-2]")
    pi_iv = SymbolicValue.symbol("Pi[n=2; e=1-2,1-2,1-2,1-2]")
    pi_tt = SymbolicValue.symbol("Pi[n=3; e=1-2,1-2,1-3,1-3,2-3,2-3]")
    a2 = ALPHA * ALPHA
    a3 = ALPHA ** 3
    assert gamma[4].is_zero()
    assert gamma[2] == pi_iii * a2 * SymbolicValue.constant(48)
    assert gamma[0] == pi_iv * a2 * SymbolicValue.constant(12) \
        - pi_tt * a3 * SymbolicValue.constant(288)
    assert set(gamma) == {0, 2, 4}


def test_counterterms_equal_lifted_closed_form():
    # gamma_2 = 8 alpha^2 P(z3^2), gamma_0 = (alpha^2/2) P(z4^2)
    # - (alpha^3/6) P(z4^3), with P the symbolic lifted value
    gamma = counterterms(phi4_couplings(), P, RULE, max_half_edges=12)
    assert gamma[2] == value_M(_m("z3^2")) * ALPHA * ALPHA \
        * SymbolicValue.constant(8)
    assert gamma[0] == value_M(_m("z4^2")) * ALPHA * ALPHA \
        * SymbolicValue.constant(Fraction(1, 2)) \
        - value_M(_m("z4^3")) * (ALPHA ** 3) * SymbolicValue.constant(Fraction(1, 6))


def test_counterterms_stable_above_truncation_12():
    g12 = counterterms(phi4_couplings(), P, RULE, max_half_edges=12)
    g14 = counterterms(phi4_couplings(), P, RULE, max_half_edges=14)
    assert g12 == g14


def test_counterterms_truncate_below_12():
    g8 = counterterms(phi4_couplings(), P, RULE, max_half_edges=8)
    pi_iv = SymbolicValue.symbol("Pi[n=2; e=1-2,1-2,1-2,1-2]")
    assert g8[0] == pi_iv * ALPHA * ALPHA * SymbolicValue.constant(12)
    assert g8[2] == counterterms(phi4_couplings(), P, RULE, max_half_edges=12)[2]


# -- the full example ------------------------------------------------------------------------

def test_resummation_low_order():
    assert resummation_check(P, RULE, order=4)


def test_phi4_report_shape():
    report = phi4_report(P, RULE, max_n=3, trunc=12)
    assert report["params"]["d"] == 3
    assert [row["n"] for row in report["coproduct"]] == [2, 3]
    assert all(row["closed_form_ok"] for row in report["coproduct"])
    assert all(row["closed_form_ok"] for row in report["bphz"])
    assert report["resummation_ok"] is True
    assert set(report["counterterms"]) == {"0", "2", "4"}
