"""q-analogues of multiple zeta functions: direct series, analytic continuation,
translation matrices, pole loci and residues."""

__version__ = "0.1.0"

from .errors import BudgetError, DomainError, PoleProximityError, QMZError, SingularCoefficientError
from .kernel import ArgVector, QParam, q_bracket, rising_factorial
from .series import EvalResult, ModelKind, SumBudget, eval_f_q, eval_series, in_domain, zeta
from .coefficients import CoeffTable, L_n, hessenberg_det, partitions_no_ones, permutation_det
from .matrices import ContinuationPlan, build_block, check_translation, continue_eval, verify_inverse
from .poles import HyperplaneId, pole_distance, pole_locus
from .residues import ResidueResult, numeric_residue, residue_h1, residue_hjk

__all__ = [
    "ArgVector", "BudgetError", "CoeffTable", "ContinuationPlan", "DomainError", "EvalResult",
    "HyperplaneId", "L_n", "ModelKind", "PoleProximityError", "QMZError", "QParam", "ResidueResult",
    "SingularCoefficientError", "SumBudget", "build_block", "check_translation", "continue_eval",
    "eval_f_q", "eval_series", "hessenberg_det", "in_domain", "numeric_residue", "partitions_no_ones",
    "permutation_det", "pole_distance", "pole_locus", "q_bracket", "residue_h1", "residue_hjk",
    "rising_factorial", "verify_inverse", "zeta",
]
