"""Verification conditions for hierarchical statecharts.

Typical use::

    from scvc import parse_model, discharge_all, DischargeOptions
    report = discharge_all(parse_model(text), DischargeOptions(oracle=True))
"""

from importlib import resources

from .discharge import DischargeOptions, VerificationReport, discharge_all
from .errors import ModelError, ScvcError
from .invariants import Invariants, ai, ci, cl, encode_state_vars, sai, si
from .model import StatechartModel, VTuple
from .parser import format_model, parse_expression, parse_model, parse_statement
from .pipeline import compare_paths, expanded_tuples, tuples_for

__version__ = "0.1.0"


def example(name: str = "ex1") -> StatechartModel:
    """Load a bundled example model."""
    text = resources.files(__package__).joinpath("data", f"{name}.sch").read_text("utf-8")
    return parse_model(text)


__all__ = [
    "DischargeOptions", "Invariants", "ModelError", "ScvcError", "StatechartModel",
    "VTuple", "VerificationReport", "ai", "ci", "cl", "compare_paths", "discharge_all",
    "encode_state_vars", "example", "expanded_tuples", "format_model", "parse_expression",
    "parse_model", "parse_statement", "sai", "si", "tuples_for",
]
