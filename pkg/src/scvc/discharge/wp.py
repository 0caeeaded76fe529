"""Weakest preconditions of broadcast-free, guard-free actions."""

from __future__ import annotations

from typing import Callable, Optional

from ..errors import UnsupportedNode, WriteConflict
from ..expr import Expr, StateLit, substitute
from ..model import Assign, Bcast, Guard, Par, Seq, Skip, StateAssign, Statement

StateVarFn = Callable[[str], Optional[str]]


def _no_var(state: str) -> Optional[str]:
    return None


def effect(st: Statement, state_var: StateVarFn = _no_var) -> dict:
    """The action as one simultaneous substitution ``var -> expr``.

    Sequential composition threads earlier writes into later right-hand
    sides; parallel branches read the pre-state and must write disjoint
    variables.
    """
    if isinstance(st, Skip):
        return {}
    if isinstance(st, Assign):
        return {st.var: st.expr}
    if isinstance(st, StateAssign):
        v = state_var(st.state)
        return {} if v is None else {v: StateLit(st.state)}
    if isinstance(st, Seq):
        acc: dict = {}
        for s in st.stmts:
            step = effect(s, state_var)
            acc = {**acc, **{v: substitute(e, acc) for v, e in step.items()}}
        return acc
    if isinstance(st, Par):
        acc = {}
        for s in st.stmts:
            for v, e in effect(s, state_var).items():
                if v in acc:
                    raise WriteConflict(v)
                acc[v] = e
        return acc
    if isinstance(st, (Guard, Bcast)):
        raise UnsupportedNode(f"{type(st).__name__} node has no weakest precondition here")
    raise TypeError(f"not a statement: {st!r}")


def wp(st: Statement, q: Expr, state_var: StateVarFn = _no_var) -> Expr:
    if isinstance(st, Seq):
        for s in reversed(st.stmts):
            q = wp(s, q, state_var)
        return q
    return substitute(q, effect(st, state_var))
