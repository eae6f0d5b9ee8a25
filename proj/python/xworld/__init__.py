"""Exact cross-world counterfactual graphs and queries over discrete SCMs."""

from fractions import Fraction

from . import _core
from ._core import (
    Intervention,
    Model,
    XWorldError,
    consistency_check,
    crossworld_joint,
    d_separated,
    duplicates,
    export_dot,
    fixture_intervention,
    fixture_names,
    parse_intervention,
    run_cli,
    trials,
    validate_text,
)

__all__ = [
    "Intervention",
    "Model",
    "XWorldError",
    "abduction",
    "adjust",
    "consistency_check",
    "criterion",
    "crossworld_joint",
    "d_separated",
    "duplicates",
    "export_dot",
    "fixture_intervention",
    "fixture_names",
    "parse_intervention",
    "run_cli",
    "trials",
    "validate_text",
]


def abduction(model, intervention, target, value, evidence=None):
    """P(target = value | evidence) by abduction, action and prediction, as a Fraction."""
    return Fraction(*_core.abduction(model, intervention, target, value, evidence or {}))


def adjust(model, intervention, target, value, evidence, adjust_set):
    """Cross-world adjustment estimate as a Fraction."""
    return Fraction(*_core.adjust(model, intervention, target, value, evidence, list(adjust_set)))


def criterion(model, intervention, target, evidence_vars, adjust_set):
    return _core.criterion(model, intervention, target, list(evidence_vars), list(adjust_set))
