"""Valuations: exact symbolic and numeric evaluation of diagrams and monomials.

A diagram evaluates either to a formal generator (one symbol per
isomorphism class) or to a number: the normalized lattice sum of kernel
products over all vertex placements on a torus.  Monomial values are
pushed through the lift; the moment/cumulant recursion provides an
independent route to the same numbers.  On top of these sit the coupling
series, the counterterms, and the end-to-end quartic example report.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial
from typing import Mapping

from . import feynman as fy
from . import multiindex as mi
from .bridge import enumerate_pairings, lift_P
from .feynman import CanonDiagram, DiagForest, Diagram
from .lincomb import LinComb
from .multiindex import DegreeParams, MIForest, MultiIndex, Rule
from .renorm import Character, RenormOutput, antipode_M, bphz_M
from .symvalue import SymbolicValue


class KernelSpec:
    """A symmetric kernel on the discrete torus (Z/N)^d.

    Values are stored flat in row-major order over offsets in [0, N)^d;
    symmetry under negation of the offset is required.
    """

    __slots__ = ("d", "N", "values")

    def __init__(self, d: int, N: int, values):
        if d < 1 or N < 1:
            raise ValueError("kernel needs d >= 1 and N >= 1")
        values = tuple(float(v) for v in values)
        if len(values) != N**d:
            raise ValueError(
                "kernel needs {} values for d={}, N={}".format(N**d, d, N)
            )
        self.d = d
        self.N = N
        self.values = values
        for offset in product(range(N), repeat=d):
            mirror = tuple((N - x) % N for x in offset)
            a = values[self._flat(offset)]
            b = values[self._flat(mirror)]
            if abs(a - b) > 1e-12 * max(1.0, abs(a), abs(b)):
                raise ValueError("kernel is not symmetric under negation")

    def _flat(self, offset) -> int:
        idx = 0
        for x in offset:
            idx = idx * self.N + x
        return idx

    def at(self, x, y) -> float:
        """Kernel value at the offset x - y, componentwise mod N."""
        offset = tuple((a - b) % self.N for a, b in zip(x, y))
        return self.values[self._flat(offset)]

    @classmethod
    def from_json(cls, payload: Mapping) -> "KernelSpec":
        return cls(int(payload["d"]), int(payload["N"]), payload["K"])

    def to_json(self) -> dict:
        return {"d": self.d, "N": self.N, "K": list(self.values)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KernelSpec):
            return NotImplemented
        return (self.d, self.N, self.values) == (other.d, other.N, other.values)

    def __hash__(self) -> int:
        return hash((self.d, self.N, self.values))

    def __repr__(self) -> str:
        return "KernelSpec(d={}, N={})".format(self.d, self.N)


def sample_kernel(d: int = 1, N: int = 4) -> KernelSpec:
    """A generic smooth-ish kernel: 1 / (1 + torus distance squared)."""
    values = []
    for offset in product(range(N), repeat=d):
        dist2 = sum(min(x, N - x) ** 2 for x in offset)
        values.append(1.0 / (1.0 + dist2))
    return KernelSpec(d, N, values)


_LATTICE_LIMIT = 2_000_000


def _pi_symbol(canon: CanonDiagram) -> SymbolicValue:
    return SymbolicValue.symbol("Pi[{}]".format(canon.key))


def value_F_symbolic(g: Diagram | CanonDiagram | DiagForest) -> SymbolicValue:
    """Formal value: one generator per isomorphism class, forests multiply."""
    if isinstance(g, DiagForest):
        acc = SymbolicValue.one()
        for part in g.parts():
            acc = acc * _pi_symbol(part)
        return acc
    if isinstance(g, Diagram):
        g = fy.canonicalize(g)
    return _pi_symbol(g)


_NUMERIC_CACHE: dict = {}


def value_F_numeric(g: Diagram | CanonDiagram | DiagForest, kernel: KernelSpec) -> float:
    """Normalized lattice sum: average the kernel product over vertex placements."""
    if isinstance(g, DiagForest):
        acc = 1.0
        for part in g.parts():
            acc *= value_F_numeric(part, kernel)
        return acc
    if isinstance(g, Diagram):
        g = fy.canonicalize(g)
    key = (g, kernel)
    cached = _NUMERIC_CACHE.get(key)
    if cached is not None:
        return cached
    diagram = g.diagram
    n = diagram.vertex_count
    sites = list(product(range(kernel.N), repeat=kernel.d))
    if len(sites) ** n > _LATTICE_LIMIT:
        raise ValueError("lattice sum exceeds the size limit")
    edges = diagram.edges
    total = 0.0
    for placement in product(sites, repeat=n):
        w = 1.0
        for u, v in edges:
            w *= kernel.at(placement[u], placement[v])
        total += w
    result = total / len(sites) ** n
    _NUMERIC_CACHE[key] = result
    return result


def value_M(m: MultiIndex | MIForest, kernel: KernelSpec | None = None):
    """Monomial value through the lift: sum of N(Gamma) times the diagram value.

    Symbolic (polynomial in the diagram generators) without a kernel, a
    float with one.  Forests multiply.
    """
    if isinstance(m, MIForest):
        if kernel is None:
            acc = SymbolicValue.one()
            for part in m.parts():
                acc = acc * value_M(part)
            return acc
        acc = 1.0
        for part in m.parts():
            acc *= value_M(part, kernel)
        return acc
    lifted = lift_P(m)
    if kernel is None:
        out = SymbolicValue.zero()
        for canon, coef in lifted.items():
            out = out + _pi_symbol(canon) * SymbolicValue.constant(coef)
        return out
    return sum(
        (float(coef) * value_F_numeric(canon, kernel) for canon, coef in lifted.items()),
        start=0.0,
    )


def moment_oracle(m: MultiIndex, kernel: KernelSpec) -> float:
    """Expectation of the monomial by direct pairing census.

    Sums, over all loopless pairings of the half-edges (connected or
    not), the product of component diagram values.
    """
    outcome = enumerate_pairings(m, connected_only=False)
    total = 0.0
    for forest, count in outcome.counts.items():
        total += count * value_F_numeric(forest, kernel)
    return total


def _set_partitions(items: tuple) -> list[list[tuple]]:
    """All partitions of a labeled tuple into nonempty blocks."""
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for partition in _set_partitions(rest):
        for i in range(len(partition)):
            out.append(partition[:i] + [(first,) + partition[i]] + partition[i + 1 :])
        out.append([(first,)] + partition)
    return out


def value_M_recursive(
    m: MultiIndex, kernel: KernelSpec, _memo: dict | None = None
) -> float:
    """Connected value by the moment recursion, independent of the lift.

    The moment of a monomial splits over set partitions of its vertices
    into products of connected values, so the connected value is the
    moment minus every properly split contribution.
    """
    arities = m.arity_list()
    if any(a == 0 for a in arities):
        raise ValueError("arity-0 vertices have no connected value")
    if _memo is None:
        _memo = {}
    cached = _memo.get(m)
    if cached is not None:
        return cached
    total = moment_oracle(m, kernel)
    labeled = tuple(range(len(arities)))
    for partition in _set_partitions(labeled):
        if len(partition) < 2:
            continue
        w = 1.0
        for block in partition:
            merged: dict[int, int] = {}
            for i in block:
                merged[arities[i]] = merged.get(arities[i], 0) + 1
            w *= value_M_recursive(MultiIndex(merged), kernel, _memo)
            if w == 0.0:
                break
        total -= w
    _memo[m] = total
    return total


def cumulant_series(
    couplings: Mapping[int, SymbolicValue | int | Fraction],
    p: DegreeParams,
    rule: Rule,
    max_half_edges: int,
) -> RenormOutput:
    """The coupling expansion: populatable admissible monomials with weight
    upsilon(m) / hat-symmetry-factor."""
    terms = []
    for m in mi.iter_monomials_within(max_half_edges, max_half_edges):
        if not rule.admits(m) or not mi.is_populatable(m):
            continue
        weight = mi.upsilon(couplings, m)
        if weight.is_zero():
            continue
        coeff = weight * SymbolicValue.constant(Fraction(1, mi.hat_sym_factor(m)))
        terms.append((m, coeff))
    return RenormOutput(terms)


def pi_character_M() -> Character:
    """The symbolic monomial valuation as a character."""
    return Character(lambda m: value_M(m), name="Pi_M")


def pi_character_F() -> Character:
    """The symbolic diagram valuation as a character."""
    return Character(lambda canon: value_F_symbolic(canon), name="Pi_F")


def counterterms(
    couplings: Mapping[int, SymbolicValue | int | Fraction],
    p: DegreeParams,
    rule: Rule,
    max_half_edges: int = 12,
) -> dict[int, SymbolicValue]:
    """Renormalised-measure counterterms gamma_k for k in the rule and k = 0.

    gamma_k = - sum over admissible k-leg monomials b and negative-part
    monomials a of Pi(A(a)) <D^k a, b> / (k! Shat(b) S(a)) upsilon(b),
    truncated by half-edge count.
    """
    pi = pi_character_M()
    out: dict[int, SymbolicValue] = {}
    for k in sorted(rule.arities | {0}):
        gamma = SymbolicValue.zero()
        for target in mi.iter_monomials_within(max_half_edges, max_half_edges):
            if not rule.admits(target):
                continue
            weight = mi.upsilon(couplings, target)
            if weight.is_zero():
                continue
            if not mi.is_populatable(target, k):
                continue
            he_source = target.half_edges() - k
            if he_source < 0:
                continue
            denom_target = factorial(k) * mi.hat_sym_factor(target)
            for source in mi.iter_monomials_within(he_source, he_source):
                if source.half_edges() != he_source:
                    continue
                if not mi.is_divergent(source, p) or not mi.is_populatable(source):
                    continue
                pairing = mi.apply_D(source, k).coeff(target) * mi.sym_factor(target)
                if not pairing:
                    continue
                subtracted = pi.on_lincomb(antipode_M(source, p, rule))
                gamma = gamma - subtracted * weight * SymbolicValue.constant(
                    pairing / (denom_target * mi.sym_factor(source))
                )
        out[k] = gamma
    return out


def phi4_couplings(symbol: str = "alpha") -> dict[int, SymbolicValue]:
    """The quartic model: a single coupling on arity 4."""
    return {4: SymbolicValue.symbol(symbol)}


def _z4(n: int) -> MultiIndex:
    return MultiIndex.single(4, n)


def _closed_form_coproduct_ok(n: int, p: DegreeParams, rule: Rule) -> bool:
    """Reduced coproduct of z4^n against its closed form.

    The only admissible extractions are m copies of z3^2 (1 <= m <= n/2)
    with coefficient 2^(3m) n! / (m! (n-2m)!) and trunk z2^m z4^(n-2m).
    """
    got = mi.coproduct_reduced(_z4(n), p, rule)
    expected = []
    z32 = MultiIndex({3: 2})
    for m_count in range(1, n // 2 + 1):
        forest = MIForest([z32] * m_count)
        trunk = MultiIndex({2: m_count, 4: n - 2 * m_count})
        coef = Fraction(
            2 ** (3 * m_count) * factorial(n),
            factorial(m_count) * factorial(n - 2 * m_count),
        )
        expected.append(((forest, trunk), coef))
    return got == LinComb(expected)


def _closed_form_bphz_ok(n: int, p: DegreeParams, rule: Rule) -> bool:
    """Twisted subtraction of z4^n against its closed form."""
    got = bphz_M(_z4(n), pi_character_M(), p, rule)
    z32 = MultiIndex({3: 2})
    pi_z32 = value_M(z32)
    terms = []
    if n in (2, 3):
        terms.append((MIForest.of(_z4(n)), SymbolicValue.one()))
        terms.append((MIForest.empty(), -value_M(_z4(n))))
    else:
        for m_count in range(0, n // 2 + 1):
            trunk = MultiIndex({2: m_count, 4: n - 2 * m_count})
            if not trunk.is_empty() and not mi.is_populatable(trunk):
                continue
            coef = (pi_z32 * SymbolicValue.constant(-8)) ** m_count
            coef = coef * SymbolicValue.constant(
                Fraction(factorial(n), factorial(m_count) * factorial(n - 2 * m_count))
            )
            terms.append((MIForest.of(trunk), coef))
    return got == RenormOutput(terms)


def resummation_check(
    p: DegreeParams, rule: Rule, order: int = 8, symbol: str = "alpha"
) -> bool:
    """Resummation of the subtracted quartic series against shifted couplings.

    Sum of (-alpha)^n / n! times the subtracted z4^n over n up to the
    given order, compared with the cumulant series of the counterterm-
    shifted couplings (z2 carries two powers of alpha) minus gamma_0 on
    the empty basis.
    """
    alpha = SymbolicValue.symbol(symbol)
    pi = pi_character_M()
    lhs = RenormOutput.zero()
    for n in range(2, order + 1):
        scale = (-alpha) ** n * SymbolicValue.constant(Fraction(1, factorial(n)))
        lhs = lhs + bphz_M(_z4(n), pi, p, rule).scale(scale)

    gamma = counterterms(phi4_couplings(symbol), p, rule, max_half_edges=12)
    shifted = {2: gamma[2], 4: alpha + gamma[4]}
    series = cumulant_series(shifted, p, rule, max_half_edges=4 * order)
    rhs_terms = [(MIForest.empty(), -gamma[0])]
    for m, coeff in series.items():
        if 2 * m.get(2) + m.get(4) > order:
            continue
        rhs_terms.append((MIForest.of(m), coeff))
    return lhs == RenormOutput(rhs_terms)


def phi4_report(
    p: DegreeParams,
    rule: Rule,
    max_n: int = 6,
    trunc: int = 12,
    symbol: str = "alpha",
) -> dict:
    """The quartic running example end to end, as a JSON-friendly table."""
    pi = pi_character_M()
    coproduct_rows = []
    for n in range(2, max_n + 1):
        coproduct_rows.append(
            {"n": n, "closed_form_ok": _closed_form_coproduct_ok(n, p, rule)}
        )
    antipode_rows = []
    for n in range(2, max_n + 1):
        value = antipode_M(_z4(n), p, rule)
        antipode_rows.append({"n": n, "antipode": str(value)})
    bphz_rows = []
    for n in range(2, max_n + 1):
        bphz_rows.append({"n": n, "closed_form_ok": _closed_form_bphz_ok(n, p, rule)})
    gamma = counterterms(phi4_couplings(symbol), p, rule, max_half_edges=trunc)
    return {
        "params": {"ell": str(p.ell), "d": p.d, "rule": str(rule)},
        "coproduct": coproduct_rows,
        "antipode": antipode_rows,
        "bphz": bphz_rows,
        "counterterms": {str(k): str(v) for k, v in sorted(gamma.items())},
        "resummation_order": 8,
        "resummation_ok": resummation_check(p, rule, order=8, symbol=symbol),
    }
