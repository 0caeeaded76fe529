"""Verification tuples computed directly from the state hierarchy, per event.

Two routes lead to tuple sets for an event:

* :func:`event_vtuple_map` walks the event-restricted state tree
  (initialize / getNext / getSpon / state_to_tuples);
* :func:`build_event_code` emits a guarded-command operation for the event,
  whose tuples come from :func:`scvc.vcgen.stmt_to_tuples`.

Both feed the same broadcast expansion and must agree on firing tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import replace

from .errors import SpontaneousCycle
from .expr import TRUE, Not, conj
from .model import (EPSILON, SKIP, AndState, Basic, Guard, Par, Predicate,
                    StateAssign, StatechartModel, StateTest, VTuple, XorState,
                    dedupe, normalize)
from .vcgen import par_prod


def res_state_event(e: str, s):
    """Keep only transitions triggered by ``e`` or spontaneous ones."""
    if isinstance(s, Basic):
        return s
    if isinstance(s, AndState):
        return replace(s, regions=tuple(res_state_event(e, r) for r in s.regions))
    return replace(s, states=tuple(res_state_event(e, c) for c in s.states),
                   transitions=tuple(t for t in s.transitions
                                     if t.event == e or t.event == EPSILON))


def _self_tuple(model: StatechartModel, s) -> VTuple:
    parent = model.parent(s.id)
    if parent is None:
        return VTuple()
    # composite and-children have no state variable and are implied by their
    # descendants; basic and-children stay in the target set
    if isinstance(model.state(parent), AndState) and not isinstance(s, Basic):
        return VTuple()
    return VTuple((), TRUE, StateAssign(s.id), {s.id})


def initialize(model: StatechartModel, s) -> list[VTuple]:
    """Entry into ``s`` through its default initial configuration (a singleton)."""
    if isinstance(s, str):
        s = model.state(s)
    own = [_self_tuple(model, s)]
    if isinstance(s, Basic):
        return own
    if isinstance(s, AndState):
        return par_prod([own] + [initialize(model, r) for r in s.regions])
    return par_prod([own, initialize(model, model.state(s.init))])


def configurations(model: StatechartModel, s) -> list[tuple]:
    """Every configuration strictly below ``s`` as a tuple of state names.

    Xor children are listed with their own name; children of an and-state
    are implied by their descendants unless basic.
    """
    if isinstance(s, str):
        s = model.state(s)
    if isinstance(s, Basic):
        return [()]
    if isinstance(s, XorState):
        return [(c.id,) + cfg for c in s.states for cfg in configurations(model, c)]
    per_region = []
    for r in s.regions:
        own = (r.id,) if isinstance(r, Basic) else ()
        per_region.append([own + cfg for cfg in configurations(model, r)])
    return [sum(combo, ()) for combo in itertools.product(*per_region)]


def get_spon(model: StatechartModel, s, tr, _visiting=()) -> list[VTuple]:
    if isinstance(s, str):
        s = model.state(s)
    if s.id in _visiting:
        raise SpontaneousCycle(list(_visiting) + [s.id])
    eps = [t for t in tr if t.source == s.id and t.event == EPSILON]
    taken = []
    for t in eps:
        taken.extend(par_prod([[VTuple((), t.guard, t.action, ())],
                               get_spon(model, t.target, tr, _visiting + (s.id,))]))
    stop = conj(*(Not(t.guard) for t in eps))
    return dedupe(taken + par_prod([[VTuple((), stop, SKIP, ())], initialize(model, s)]))


def get_next(model: StatechartModel, s, tr) -> list[VTuple]:
    """Firing tuples for the triggered transitions leaving ``s``."""
    if isinstance(s, str):
        s = model.state(s)
    out = []
    for t in tr:
        if t.source == s.id and t.event != EPSILON:
            out.extend(par_prod([[VTuple({s.id}, t.guard, t.action, ())],
                                 get_spon(model, t.target, tr)]))
    return dedupe(out)


def consistent(model: StatechartModel, states) -> bool:
    """False if the closure of ``states`` holds two children of one xor."""
    chosen = {}
    for s in states:
        while True:
            p = model.parent(s)
            if p is None:
                break
            if isinstance(model.state(p), XorState):
                if chosen.setdefault(p, s) != s:
                    return False
            s = p
    return True


def state_to_tuples(model: StatechartModel, s) -> list[VTuple]:
    """Tuples of an event-restricted state: firing plus staying behaviour.

    For an xor state each child contributes its firing tuples (joined with
    every configuration below the child, so sources name a full source
    configuration) and a stay case guarded by the negated trigger guards.
    """
    if isinstance(s, Basic):
        return [VTuple({s.id}, TRUE, SKIP, ())]
    if isinstance(s, AndState):
        return par_prod([state_to_tuples(model, r) for r in s.regions])
    out = []
    for c in s.states:
        context = [VTuple(cfg) for cfg in configurations(model, c)]
        fire = par_prod([get_next(model, c, s.transitions), context])
        out.extend(fire)
        # spontaneous continuations after firing split on guards whose
        # disjunction is true, so only the trigger guards matter for staying
        trig = [t for t in s.transitions if t.source == c.id and t.event != EPSILON]
        stay_guard = conj(*dedupe(Not(t.guard) for t in trig))
        out.extend(par_prod([[VTuple({c.id}, stay_guard, SKIP, ())],
                             state_to_tuples(model, c)]))
    return [t for t in dedupe(out) if consistent(model, t.sources)]


def event_tuples(model: StatechartModel, e: str) -> list[VTuple]:
    return state_to_tuples(model, res_state_event(e, model.root))


def event_vtuple_map(model: StatechartModel) -> dict:
    return {e: event_tuples(model, e) for e in model.events}


# -- guarded-command route ----------------------------------------------------------

def build_event_code(model: StatechartModel, e: str, full: bool = False):
    """Guarded-command operation for event ``e``.

    Source configurations are tested with nested state tests, then the
    transition guard, then the action runs in parallel with the entry
    assignments of the target.  With ``full`` the stay branches whose body
    does nothing are kept too, so every behaviour has an explicit tuple.
    """
    if e == EPSILON or not any(t.event == e for t in model.transitions):
        return SKIP

    def nest(cfg, body):
        for name in reversed(cfg):
            body = Guard(((StateTest(name), body),))
        return body

    def spon(target, tr, visiting=()):
        if target in visiting:
            raise SpontaneousCycle(list(visiting) + [target])
        entry = initialize(model, target)[0].action
        eps = [t for t in tr if t.source == target and t.event == EPSILON]
        if not eps:
            return entry
        arms = [(Predicate(t.guard), Par((t.action, spon(t.target, tr, visiting + (target,)))))
                for t in eps]
        arms.append((Predicate(conj(*(Not(t.guard) for t in eps))), entry))
        return Guard(tuple(arms))

    def code(s):
        if isinstance(s, Basic):
            return SKIP
        if isinstance(s, AndState):
            return normalize(Par(tuple(code(r) for r in s.regions)))
        arms = []
        for c in s.states:
            trs = [t for t in s.transitions if t.source == c.id and t.event == e]
            for t in trs:
                body = Guard(((Predicate(t.guard),
                               Par((t.action, spon(t.target, s.transitions)))),))
                for cfg in configurations(model, c):
                    arms.append((StateTest(c.id), nest(cfg, body)))
            inner = code(c)
            if full or inner != SKIP:
                stay = conj(*dedupe(Not(t.guard) for t in trs))
                if stay != TRUE:
                    inner = Guard(((Predicate(stay), inner),))
                arms.append((StateTest(c.id), inner))
        return Guard(tuple(arms)) if arms else SKIP

    return code(res_state_event(e, model.root))


def event_code(model: StatechartModel, full: bool = False) -> dict:
    """EventCode map for every triggering event of ``model``."""
    return {e: build_event_code(model, e, full) for e in model.events}
