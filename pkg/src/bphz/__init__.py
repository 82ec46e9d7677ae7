"""Exact extraction-contraction renormalisation, two ways.

Multigraph diagrams and vertex-arity monomials each carry an
extraction-contraction coproduct; the counting map and the pairing lift
connect the two sides, and the twisted antipode turns either coproduct
into a subtraction scheme with exact rational arithmetic throughout.
"""

from .bridge import (
    adjoint_phi_P_check,
    commuting_square_check,
    enumerate_pairings,
    lift_P,
    lift_P_forest,
    morphism_insert_check,
    morphism_star_check,
    orbit_stabilizer_check,
)
from .feynman import (
    CanonDiagram,
    DiagForest,
    Diagram,
    canonicalize,
    counting_map,
    coproduct_full_F,
    coproduct_reduced_F,
    cut_vertex,
    graft,
    insert_F,
    iter_connected_diagrams,
    simultaneous_insert_F,
)
from .lincomb import LinComb, as_scalar
from .multiindex import (
    DegreeParams,
    MIForest,
    MultiIndex,
    Rule,
    apply_D,
    coproduct_full,
    coproduct_full_forest,
    coproduct_reduced,
    degree,
    hat_sym_factor,
    insert,
    is_divergent,
    is_populatable,
    iter_monomials_within,
    simultaneous_insert,
    sym_factor,
    sym_factor_forest,
    upsilon,
)
from .renorm import (
    Character,
    RenormOutput,
    antipode_F,
    antipode_M,
    bphz_F,
    bphz_M,
    character_inverse,
    convolve,
    convolve_F,
    hat_antipode_M,
    in_negative_part_F,
    in_negative_part_M,
    renorm_map,
    renorm_map_forest,
    renorm_map_output,
)
from .symvalue import SymbolicValue
from .valuation import (
    KernelSpec,
    counterterms,
    cumulant_series,
    moment_oracle,
    phi4_couplings,
    phi4_report,
    pi_character_F,
    pi_character_M,
    resummation_check,
    sample_kernel,
    value_F_numeric,
    value_F_symbolic,
    value_M,
    value_M_recursive,
)

__version__ = "0.1.0"

__all__ = [
    "CanonDiagram",
    "Character",
    "DegreeParams",
    "DiagForest",
    "Diagram",
    "KernelSpec",
    "LinComb",
    "MIForest",
    "MultiIndex",
    "RenormOutput",
    "Rule",
    "SymbolicValue",
    "adjoint_phi_P_check",
    "antipode_F",
    "antipode_M",
    "apply_D",
    "as_scalar",
    "bphz_F",
    "bphz_M",
    "canonicalize",
    "character_inverse",
    "commuting_square_check",
    "convolve",
    "convolve_F",
    "coproduct_full",
    "coproduct_full_F",
    "coproduct_full_forest",
    "coproduct_reduced",
    "coproduct_reduced_F",
    "counterterms",
    "counting_map",
    "cumulant_series",
    "cut_vertex",
    "degree",
    "enumerate_pairings",
    "graft",
    "hat_antipode_M",
    "hat_sym_factor",
    "in_negative_part_F",
    "in_negative_part_M",
    "insert",
    "insert_F",
    "is_divergent",
    "is_populatable",
    "iter_connected_diagrams",
    "iter_monomials_within",
    "lift_P",
    "lift_P_forest",
    "moment_oracle",
    "morphism_insert_check",
    "morphism_star_check",
    "orbit_stabilizer_check",
    "phi4_couplings",
    "phi4_report",
    "pi_character_F",
    "pi_character_M",
    "renorm_map",
    "renorm_map_forest",
    "renorm_map_output",
    "resummation_check",
    "simultaneous_insert",
    "simultaneous_insert_F",
    "sym_factor",
    "sym_factor_forest",
    "sample_kernel",
    "upsilon",
    "value_F_numeric",
    "value_F_symbolic",
    "value_M",
    "value_M_recursive",
]
