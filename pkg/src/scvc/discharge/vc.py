"""Verification conditions: ``sai(sources) ∧ guard ⇒ wp(action, sai(targets))``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..expr import Expr, Implies, conj
from ..invariants import Invariants
from ..model import StatechartModel, VTuple
from .wp import wp


@dataclass(frozen=True)
class VerificationCondition:
    id: str
    event: str
    tuple: Optional[VTuple]
    formula: Optional[Expr]  # None when the VC could not be formed
    int_vars: tuple = ()
    # state variable -> the state names it ranges over
    state_sorts: dict = field(default_factory=dict, hash=False)
    provenance: tuple = ()


def provenance(model: StatechartModel, v: VTuple) -> tuple:
    return tuple(str(t) for t in model.transitions
                 if t.source in v.sources and t.target in v.targets)


def tuple_to_vc(model: StatechartModel, event: str, v: VTuple, index: int = 0,
                inv: Optional[Invariants] = None) -> VerificationCondition:
    inv = inv or Invariants(model)
    pre = conj(inv.sai(v.sources), inv.lower(v.guard))
    post = wp(v.action, inv.sai(v.targets), inv.state_var)
    return VerificationCondition(
        id=f"{event}_{index}", event=event, tuple=v,
        formula=Implies(pre, post),
        int_vars=tuple(model.variables),
        state_sorts=dict(inv.encoding.domains),
        provenance=provenance(model, v))


def standalone_vc(formula: Expr, int_vars=(), state_sorts=None, id="vc_0",
                  event="") -> VerificationCondition:
    """A VC not derived from a model, e.g. for testing back ends."""
    return VerificationCondition(id, event, None, formula, tuple(int_vars),
                                 dict(state_sorts or {}))
