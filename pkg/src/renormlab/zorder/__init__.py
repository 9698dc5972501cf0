"""Transfinite sequence orders: Y, Z and Z0."""

from .expr import Expr, analyze, parse_expr, theta, theta_inv
from .family import (
    Convergence, SupResult, ZFamily, ZRule, convergence_case, family_infimum,
    witness_between, z0_sup, z_converges, z_separate,
)
from .seq import (
    FirstDifference, OmegaBlock, ValidationReport, ZSeq, format_zseq, in_Z0,
    phi_map, theta_map, to_Z0, z_compare, z_first_difference, z_product, z_validate,
)

theta_iso = theta
Theta_map = theta_map
