"""State-variable encoding and the invariant functions si, ci, ai, cl and sai."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .expr import TRUE, Expr, StateLit, Var, conj, eq, exactly_one, map_instate
from .model import ROOT, Basic, StatechartModel, XorState, ancestor_chain

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateVarEncoding:
    """Each xor state owns one variable ranging over its direct children."""
    variables: dict  # xor state -> variable name
    domains: dict  # variable name -> tuple of child state names
    warnings: tuple = field(default=(), compare=False)

    def var_of(self, xor_state: str) -> str:
        return self.variables[xor_state]

    @property
    def state_sort(self) -> dict:
        """State name -> variable whose domain contains it."""
        return {s: v for v, dom in self.domains.items() for s in dom}


def encode_state_vars(model: StatechartModel) -> StateVarEncoding:
    taken = set(model.variables)
    variables, domains, warnings = {}, {}, []
    for name in model.state_names:
        s = model.state(name)
        if not isinstance(s, XorState):
            continue
        base = ROOT if name == ROOT else name.lower()
        var, n = base, 2
        while var in taken:
            var = f"{base}{n}"
            n += 1
        if var != base:
            msg = f"state variable for {name} renamed to {var} ({base} already in use)"
            warnings.append(msg)
            log.warning(msg)
        taken.add(var)
        variables[name] = var
        domains[var] = tuple(c.id for c in s.states)
    return StateVarEncoding(variables, domains, tuple(warnings))


class Invariants:
    """Invariant functions of one model, memoised per state.

    The module-level functions below are thin wrappers for one-off calls.
    """

    def __init__(self, model: StatechartModel, encoding: Optional[StateVarEncoding] = None):
        self.model = model
        self.encoding = encoding or encode_state_vars(model)
        self._ci: dict = {}

    def state_var(self, s: str) -> Optional[str]:
        """Variable written by ``StateAssign s`` (None when the parent is an and-state)."""
        p = self.model.parent(s)
        if p is None or not isinstance(self.model.state(p), XorState):
            return None
        return self.encoding.var_of(p)

    def state_test(self, s: str) -> Expr:
        v = self.state_var(s)
        if v is None:
            return TRUE
        return eq(Var(v), StateLit(s))

    def in_state(self, s: str) -> Expr:
        """Residence in ``s``: the state tests of ``s`` and all its ancestors."""
        path = [a for a in ancestor_chain(self.model, s) if a != ROOT] + [s]
        return conj(*(self.state_test(a) for a in path))

    def lower(self, e: Expr) -> Expr:
        """Replace ``in(S)`` atoms by state-variable equations."""
        return map_instate(e, self.in_state)

    def si(self, s: str) -> Expr:
        return conj(self.state_test(s), self.lower(self.model.state(s).invariant))

    def ci(self, s: str) -> Expr:
        if s not in self._ci:
            st = self.model.state(s)
            if isinstance(st, Basic):
                r = self.si(s)
            elif isinstance(st, XorState):
                r = conj(self.si(s), exactly_one(*(self.ci(c.id) for c in st.states)))
            else:
                r = conj(self.si(s), conj(*(self.ci(c.id) for c in st.regions)))
            self._ci[s] = r
        return self._ci[s]

    def ai(self, s: str) -> Expr:
        ups = conj(*(self.si(a) for a in ancestor_chain(self.model, s)))
        return conj(ups, self.ci(s))

    def cl(self, ss: Iterable[str]) -> set[str]:
        out = set()
        for s in ss:
            self.model.state(s)
            while s is not None and s not in out:
                out.add(s)
                s = self.model.parent(s)
        return out

    def sai(self, ss: Iterable[str]) -> Expr:
        closed = self.cl(ss)
        parts = []
        for s in self.model.sort_states(closed):
            st = self.model.state(s)
            # si suffices once the closure pins down a child of s
            if isinstance(st, Basic) or any(c.id in closed for c in st.children):
                parts.append(self.si(s))
            else:
                parts.append(self.ci(s))
        return conj(*parts)


def state_test(model, s, encoding=None) -> Expr:
    return Invariants(model, encoding).state_test(s)


def si(model, s, encoding=None) -> Expr:
    return Invariants(model, encoding).si(s)


def ci(model, s, encoding=None) -> Expr:
    return Invariants(model, encoding).ci(s)


def ai(model, s, encoding=None) -> Expr:
    return Invariants(model, encoding).ai(s)


def cl(model, ss) -> set[str]:
    return Invariants(model).cl(ss)


def sai(model, ss, encoding=None) -> Expr:
    return Invariants(model, encoding).sai(ss)
