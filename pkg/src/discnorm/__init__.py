"""Discrepancy of point sets in the unit cube under L_p, star, and
Orlicz (Luxemburg) norms, with the matching bound and constant checks."""

from .bounds import (
    BoundReport,
    construction_constants_check,
    empirical_inverse_discrepancy,
    hnww_empirical_check,
    initial_alpha_lower,
    initial_of,
    initial_phi_lower,
    lemma1_sandwich_check,
    min_const_check,
    nbound1,
    stirling_check,
    theorem2_constant,
    theorem2_n_bound,
)
from .cells import CellGrid, build_cell_grid, count_in_box, local_discrepancy
from .integrate import NumericalError, integrate_of_delta
from .lp import LpCache, NormResult, initial_lp, lp_discrepancy, warnock_l2
from .orlicz import (
    OrliczSpec,
    WeightFn,
    alpha_norm,
    luxemburg_norm,
    luxemburg_norm_piecewise,
    modular_by_quadrature,
    phi_norm,
    young_eval,
)
from .pointset import (
    PointSet,
    empty_pointset,
    generate_halton,
    generate_uniform,
    load_pointset,
    pointset_from_json,
    pointset_to_json,
    save_pointset,
)
from .star import star_discrepancy_exact, star_discrepancy_lower_mc, star_feasible

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CellGrid",
    "LpCache",
    "NormResult",
    "NumericalError",
    "OrliczSpec",
    "PointSet",
    "WeightFn",
    "alpha_norm",
    "build_cell_grid",
    "construction_constants_check",
    "count_in_box",
    "empirical_inverse_discrepancy",
    "empty_pointset",
    "generate_halton",
    "generate_uniform",
    "hnww_empirical_check",
    "initial_alpha_lower",
    "initial_lp",
    "initial_of",
    "initial_phi_lower",
    "integrate_of_delta",
    "lemma1_sandwich_check",
    "load_pointset",
    "local_discrepancy",
    "lp_discrepancy",
    "luxemburg_norm",
    "luxemburg_norm_piecewise",
    "min_const_check",
    "modular_by_quadrature",
    "nbound1",
    "phi_norm",
    "pointset_from_json",
    "pointset_to_json",
    "save_pointset",
    "star_discrepancy_exact",
    "star_discrepancy_lower_mc",
    "star_feasible",
    "stirling_check",
    "theorem2_constant",
    "theorem2_n_bound",
    "warnock_l2",
    "young_eval",
]
