"""Model checking for epistemic stit logic with objective and subjective oughts."""

from .btmodel import (BTModel, ModelError, Situation, Violation, compare, epistemic_cluster, optimal_set,
                      s_optimal_set, states, validate_bt)
from .formula import ParseError, Schema, parse, render, substitute
from .kripke import KripkeModel, associated_bt, evaluate_kripke, validate_kripke, verify_truth_preservation
from .semantics import EvalMode, Evaluator, Judgment, check_validity, evaluate, extension, judge

__all__ = [
    "BTModel", "ModelError", "Situation", "Violation", "compare", "epistemic_cluster", "optimal_set",
    "s_optimal_set", "states", "validate_bt", "ParseError", "Schema", "parse", "render", "substitute",
    "KripkeModel", "associated_bt", "evaluate_kripke", "validate_kripke", "verify_truth_preservation",
    "EvalMode", "Evaluator", "Judgment", "check_validity", "evaluate", "extension", "judge",
]
