"""Exact q-expansions of W(E8)-invariant Jacobi forms.

Layers, bottom up: qseries (level-1 modular forms over Fraction), linalg
(exact RREF/nullspace), e8 (lattice, Weyl orbits, coset minima), invring
(orbit-sum ring with the Σ-display), jacobi (truncated Jacobi q-expansions
and operators), catalog (named forms of index 1..4, linear systems,
verification), cli (command line).
"""
from .catalog import (
    REGISTRY,
    CascadeSystem,
    CatalogError,
    build,
    build_phi16_4,
    cusp_basis,
    dimension_bound_table,
    holomorphic_basis,
    holomorphic_subspace,
    pullback_max_table,
    rank_series,
    solve_cascade,
    verify_free_module,
)
from .e8 import (
    BudgetError,
    DominantWeight,
    E8Vector,
    FUNDAMENTAL_WEIGHTS,
    HIGHEST_ROOT,
    SIMPLE_ROOTS,
    WEYL_ORDER,
    coset_min_norm,
    dominant_reduce,
    max_coset_min_norm,
    max_pairing,
    orbit,
    orbit_array,
    orbit_size,
    pairing,
    shell,
    shell_by_enumeration,
)
from .invring import (
    SIGMA_LABELS,
    InvariantElement,
    from_display,
    inv_mul,
    label_weight,
    sigma_label,
)
from .jacobi import (
    ClassifyResult,
    JacobiQExpansion,
    check_quasi_periodicity,
    classify,
    heat,
    hecke_t_minus,
    jf_div_modular,
    jf_mul,
    jf_scale,
    rescale_z,
    theta_e8,
    weight0_identity,
)
from .qseries import (
    ModularQSeries,
    delta,
    dim_modular,
    eisenstein,
    format_rational,
    parse_rational,
)

__version__ = "0.1.0"

__all__ = [
    "REGISTRY",
    "CascadeSystem",
    "CatalogError",
    "build",
    "build_phi16_4",
    "cusp_basis",
    "dimension_bound_table",
    "holomorphic_basis",
    "holomorphic_subspace",
    "pullback_max_table",
    "rank_series",
    "solve_cascade",
    "verify_free_module",
    "BudgetError",
    "DominantWeight",
    "E8Vector",
    "FUNDAMENTAL_WEIGHTS",
    "HIGHEST_ROOT",
    "SIMPLE_ROOTS",
    "WEYL_ORDER",
    "coset_min_norm",
    "dominant_reduce",
    "max_coset_min_norm",
    "max_pairing",
    "orbit",
    "orbit_array",
    "orbit_size",
    "pairing",
    "shell",
    "shell_by_enumeration",
    "SIGMA_LABELS",
    "InvariantElement",
    "from_display",
    "inv_mul",
    "label_weight",
    "sigma_label",
    "ClassifyResult",
    "JacobiQExpansion",
    "check_quasi_periodicity",
    "classify",
    "heat",
    "hecke_t_minus",
    "jf_div_modular",
    "jf_mul",
    "jf_scale",
    "rescale_z",
    "theta_e8",
    "weight0_identity",
    "ModularQSeries",
    "delta",
    "dim_modular",
    "eisenstein",
    "format_rational",
    "parse_rational",
]
