"""Statechart hierarchy, guarded-command statements and verification tuples."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Union

from .expr import TRUE, Expr, fmt

EPSILON = ""  # event name of spontaneous transitions
ROOT = "root"


# -- statements -----------------------------------------------------------------

class Statement:
    __slots__ = ()

    def __str__(self) -> str:
        return format_stmt(self)


@dataclass(frozen=True)
class StateAssign(Statement):
    state: str


@dataclass(frozen=True)
class Assign(Statement):
    var: str
    expr: Expr


@dataclass(frozen=True)
class Bcast(Statement):
    event: str


@dataclass(frozen=True)
class Guard(Statement):
    """Nondeterministic choice; ``branches`` is a tuple of (Condition, Statement)."""
    branches: tuple


@dataclass(frozen=True)
class Par(Statement):
    stmts: tuple


@dataclass(frozen=True)
class Seq(Statement):
    stmts: tuple


@dataclass(frozen=True)
class Skip(Statement):
    pass


SKIP = Skip()


@dataclass(frozen=True)
class StateTest:
    state: str


@dataclass(frozen=True)
class Predicate:
    expr: Expr


Condition = Union[StateTest, Predicate]


def normalize(st: Statement) -> Statement:
    """Flatten nested Par/Seq, drop Skip elements and unwrap singletons."""
    if isinstance(st, (Par, Seq)):
        kind = type(st)
        out = []
        for s in st.stmts:
            s = normalize(s)
            if isinstance(s, kind):
                out.extend(s.stmts)
            elif s != SKIP:
                out.append(s)
        if not out:
            return SKIP
        if len(out) == 1:
            return out[0]
        return kind(tuple(out))
    if isinstance(st, Guard):
        return Guard(tuple((c, normalize(s)) for c, s in st.branches))
    return st


def stmt_size(st: Statement) -> int:
    if isinstance(st, (Par, Seq)):
        return 1 + sum(stmt_size(s) for s in st.stmts)
    if isinstance(st, Guard):
        return 1 + sum(stmt_size(s) for _, s in st.branches)
    return 1


def walk_stmt(st: Statement):
    yield st
    if isinstance(st, (Par, Seq)):
        for s in st.stmts:
            yield from walk_stmt(s)
    elif isinstance(st, Guard):
        for _, s in st.branches:
            yield from walk_stmt(s)


def assigned_states(st: Statement) -> set[str]:
    return {s.state for s in walk_stmt(st) if isinstance(s, StateAssign)}


def format_stmt(st: Statement, state_var=None, ascii: bool = False) -> str:
    """Render a statement.

    ``state_var`` optionally maps a state to the variable its StateAssign
    writes (``None`` for no-op assigns); without it a StateAssign prints
    as ``enter S`` and a state test as ``in(S)``.
    """
    def go(st, top=False):
        if isinstance(st, Skip):
            return "skip"
        if isinstance(st, Assign):
            return f"{st.var} := {fmt(st.expr, ascii)}"
        if isinstance(st, StateAssign):
            if state_var is None:
                return f"enter {st.state}"
            v = state_var(st.state)
            return f"{v} := {st.state}" if v else f"enter {st.state}"
        if isinstance(st, Bcast):
            return f"broadcast {st.event}"
        if isinstance(st, Par):
            s = " || ".join(go(s) for s in st.stmts)
            return s if top else f"({s})"
        if isinstance(st, Seq):
            s = "; ".join(go(s) for s in st.stmts)
            return s if top else f"({s})"
        if isinstance(st, Guard):
            arms = []
            for c, s in st.branches:
                if isinstance(c, Predicate):
                    test = fmt(c.expr, ascii)
                elif state_var is not None and state_var(c.state):
                    test = f"{state_var(c.state)} = {c.state}"
                else:
                    test = f"in({c.state})"
                arms.append(f"{test} -> {go(s, True)}")
            return "if " + " [] ".join(arms) + " fi"
        raise TypeError(f"not a statement: {st!r}")

    return go(st, True)


# -- states ---------------------------------------------------------------------

@dataclass(frozen=True)
class Transition:
    source: str
    event: str
    guard: Expr
    action: Statement
    target: str
    loc: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def spontaneous(self) -> bool:
        return self.event == EPSILON

    def __str__(self):
        trig = f"on {self.event}" if self.event else "always"
        return f"{trig} from {self.source} to {self.target}"


@dataclass(frozen=True)
class Basic:
    id: str
    invariant: Expr = TRUE
    loc: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def children(self) -> tuple:
        return ()


@dataclass(frozen=True)
class AndState:
    id: str
    regions: tuple
    invariant: Expr = TRUE
    loc: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def children(self) -> tuple:
        return self.regions


@dataclass(frozen=True)
class XorState:
    id: str
    states: tuple
    init: str
    transitions: tuple = ()
    invariant: Expr = TRUE
    loc: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def children(self) -> tuple:
        return self.states


State = Union[Basic, AndState, XorState]


def iter_states(s: State):
    """Preorder traversal of a state tree."""
    yield s
    for c in s.children:
        yield from iter_states(c)


@dataclass(frozen=True)
class StatechartModel:
    name: str
    root: XorState
    variables: tuple = ()
    var_locs: tuple = field(default=(), compare=False, repr=False)

    # Indexes are derived lazily; duplicate names keep their first occurrence
    # (the parser reports duplicates before a model escapes).
    @cached_property
    def _index(self) -> dict:
        idx = {}
        for s in iter_states(self.root):
            idx.setdefault(s.id, s)
        return idx

    @cached_property
    def _parents(self) -> dict:
        par = {}
        for s in iter_states(self.root):
            for c in s.children:
                par.setdefault(c.id, s.id)
        return par

    @cached_property
    def order(self) -> dict:
        """State name -> preorder position; used for deterministic output."""
        return {name: i for i, name in enumerate(self._index)}

    @property
    def state_names(self) -> list[str]:
        return list(self._index)

    def state(self, name: str) -> State:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown state {name}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def parent(self, name: str) -> Optional[str]:
        self.state(name)
        return self._parents.get(name)

    def kind(self, name: str) -> str:
        s = self.state(name)
        return {Basic: "basic", AndState: "and", XorState: "xor"}[type(s)]

    def sort_states(self, names: Iterable[str]) -> list[str]:
        order = self.order
        return sorted(names, key=lambda n: (order.get(n, len(order)), n))

    @cached_property
    def transitions(self) -> tuple:
        return tuple(t for s in iter_states(self.root) if isinstance(s, XorState)
                     for t in s.transitions)

    @cached_property
    def events(self) -> tuple:
        """Triggering events in order of first appearance (excludes epsilon)."""
        seen = {}
        for t in self.transitions:
            if t.event != EPSILON:
                seen.setdefault(t.event, None)
        return tuple(seen)


def children(model: StatechartModel, s: str) -> set[str]:
    return {c.id for c in model.state(s).children}


def ancestors(model: StatechartModel, s: str) -> set[str]:
    out = set()
    p = model.parent(s)
    while p is not None:
        out.add(p)
        p = model.parent(p)
    return out


def ancestor_chain(model: StatechartModel, s: str) -> list[str]:
    """Strict ancestors of ``s``, outermost first."""
    chain = []
    p = model.parent(s)
    while p is not None:
        chain.append(p)
        p = model.parent(p)
    return chain[::-1]


# -- verification tuples -------------------------------------------------------

@dataclass(frozen=True)
class VTuple:
    sources: frozenset
    guard: Expr
    action: Statement
    targets: frozenset

    def __init__(self, sources=(), guard=TRUE, action=SKIP, targets=()):
        object.__setattr__(self, "sources", frozenset(sources))
        object.__setattr__(self, "guard", guard)
        object.__setattr__(self, "action", action)
        object.__setattr__(self, "targets", frozenset(targets))


UNIT = VTuple()  # (∅, true, Skip, ∅)


def dedupe(tuples: Iterable[VTuple]) -> list[VTuple]:
    """Order-preserving structural deduplication."""
    return list(dict.fromkeys(tuples))


def canonical_tuple(v: VTuple):
    """Comparison key insensitive to conjunct grouping and Par ordering."""
    from .expr import conjuncts

    return (v.sources, frozenset(conjuncts(v.guard)),
            canonical_stmt(normalize(v.action)), v.targets)


def canonical_stmt(st: Statement):
    if isinstance(st, Par):
        return ("par", tuple(sorted((canonical_stmt(s) for s in st.stmts), key=repr)))
    if isinstance(st, Seq):
        return ("seq", tuple(canonical_stmt(s) for s in st.stmts))
    if isinstance(st, Guard):
        return ("guard", tuple(sorted(((c, canonical_stmt(s)) for c, s in st.branches),
                                      key=repr)))
    return st


def format_tuple(v: VTuple, model: Optional[StatechartModel] = None, state_var=None) -> str:
    """One-line debug dump ``sources {..} | guard .. | action .. | targets {..}``."""
    def states(ss):
        names = model.sort_states(ss) if model is not None else sorted(ss)
        return "{" + ",".join(names) + "}"

    return (f"sources {states(v.sources)} | guard {fmt(v.guard)} | "
            f"action {format_stmt(v.action, state_var)} | targets {states(v.targets)}")
