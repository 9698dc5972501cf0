"""Renorming engine: tail infima, slack functions and the recursive plateau pipeline."""

from .mu import CtFunction, LambdaResult, MuResult, check_plateau, lambda_eval, mu_eval, mu_node
from .norms import NormCheck, NormModel, check_norm, quadratic_norm, scaled_lp, sup_norm, weighted_sup
from .pipeline import (
    Check, CorollaryReport, Level, PipelineLedger, PlateauRecord, RhoReport, build_pi, build_rho,
    verify_lattice_corollary,
)

__all__ = [
    "Check", "CorollaryReport", "CtFunction", "LambdaResult", "Level", "MuResult", "NormCheck",
    "NormModel", "PipelineLedger", "PlateauRecord", "RhoReport", "build_pi", "build_rho",
    "check_norm", "check_plateau", "lambda_eval", "mu_eval", "mu_node", "quadratic_norm",
    "scaled_lp", "sup_norm", "verify_lattice_corollary", "weighted_sup",
]
