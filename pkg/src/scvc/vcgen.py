"""Verification tuples from guarded-command event code, and broadcast elimination.

Tuple "sets" are lists kept free of structural duplicates, so output order
is deterministic across runs.
"""

from __future__ import annotations

import heapq
import itertools
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Mapping, Sequence

from .errors import CyclicBroadcast, UnknownBroadcast
from .expr import TRUE, conj
from .model import (SKIP, Bcast, Guard, Par, Predicate, Seq, StateAssign, Statement,
                    StateTest, VTuple, dedupe, normalize)

TupleSet = list  # list[VTuple] without duplicates
EventSequence = list  # list[tuple[str, TupleSet]]


def c2tuple(c) -> VTuple:
    if isinstance(c, StateTest):
        return VTuple({c.state}, TRUE, SKIP, ())
    if isinstance(c, Predicate):
        return VTuple((), c.expr, SKIP, ())
    raise TypeError(f"not a condition: {c!r}")


def _concat(ts: Sequence[VTuple], compose) -> VTuple:
    if not ts:
        return VTuple()
    return VTuple(frozenset().union(*(t.sources for t in ts)),
                  conj(*(t.guard for t in ts)),
                  normalize(compose(tuple(t.action for t in ts))),
                  frozenset().union(*(t.targets for t in ts)))


def concat1(ts: Sequence[VTuple]) -> VTuple:
    """Parallel concatenation: unions, conjoined guards, ``Par`` of actions."""
    return _concat(ts, Par)


def concat2(ts: Sequence[VTuple]) -> VTuple:
    """Sequential concatenation: as :func:`concat1` but actions compose with ``Seq``."""
    return _concat(ts, Seq)


def _product(tss, concat, dedup):
    tss = [list(s) for s in tss]
    if not tss:
        return []
    if len(tss) == 1:
        return tss[0]
    out = [concat(combo) for combo in itertools.product(*tss)]
    return dedupe(out) if dedup else out


def par_prod(tss: Iterable[Iterable[VTuple]], dedup: bool = True) -> TupleSet:
    return _product(tss, concat1, dedup)


def seq_prod(tss: Iterable[Iterable[VTuple]], dedup: bool = True) -> TupleSet:
    return _product(tss, concat2, dedup)


def stmt_to_tuples(st: Statement) -> TupleSet:
    if isinstance(st, StateAssign):
        return [VTuple((), TRUE, st, {st.state})]
    if isinstance(st, Guard):
        out = []
        for c, body in st.branches:
            out.extend(par_prod([[c2tuple(c)], stmt_to_tuples(body)]))
        return dedupe(out)
    if isinstance(st, Par):
        return par_prod([stmt_to_tuples(s) for s in st.stmts])
    if isinstance(st, Seq):
        return seq_prod([stmt_to_tuples(s) for s in st.stmts])
    # Assign, Bcast and Skip pass through unchanged
    return [VTuple((), TRUE, st, ())]


def vtuple_map(event_code: Mapping[str, Statement]) -> dict:
    return {e: stmt_to_tuples(st) for e, st in event_code.items()}


# -- broadcasts -------------------------------------------------------------------

def is_bcast(st: Statement) -> bool:
    return isinstance(st, Bcast)


def collect_bcast(st: Statement) -> set[str]:
    if isinstance(st, Bcast):
        return {st.event}
    if isinstance(st, Guard):
        return set().union(*(collect_bcast(s) for _, s in st.branches))
    if isinstance(st, (Par, Seq)):
        return set().union(*(collect_bcast(s) for s in st.stmts))
    return set()


def filter_bcast(st: Statement) -> Statement:
    """Remove broadcasts; bare ``Bcast`` elements of compound nodes are dropped."""
    if isinstance(st, Bcast):
        return SKIP
    if isinstance(st, Guard):
        kept = tuple((c, filter_bcast(s)) for c, s in st.branches if not is_bcast(s))
        return Guard(kept) if kept else SKIP
    if isinstance(st, (Par, Seq)):
        return type(st)(tuple(filter_bcast(s) for s in st.stmts if not is_bcast(s)))
    return st


def broadcast_deps(m: Mapping[str, Iterable[VTuple]]) -> dict:
    """Event -> events broadcast by any of its tuple actions."""
    return {e: set().union(*(collect_bcast(t.action) for t in ts))
            for e, ts in m.items()}


def topo_sort_events(m: Mapping[str, Iterable[VTuple]]) -> EventSequence:
    """Order events so each broadcasts only events placed before it.

    Ties are broken by event name.
    """
    deps = broadcast_deps(m)
    ts = TopologicalSorter()
    for e, fs in deps.items():
        for f in fs:
            if f not in deps:
                raise UnknownBroadcast(f)
        ts.add(e, *sorted(fs))
    try:
        ts.prepare()
    except CycleError as exc:
        raise CyclicBroadcast(exc.args[1]) from None
    order, ready = [], []
    while ts.is_active():
        for n in ts.get_ready():
            heapq.heappush(ready, n)
        n = heapq.heappop(ready)
        order.append(n)
        ts.done(n)
    return [(e, list(m[e])) for e in order]


def vtuple_no_bcast(v: VTuple, tspre: EventSequence) -> TupleSet:
    events = collect_bcast(v.action)
    if not events:
        return [v]
    known = {e for e, _ in tspre}
    for e in sorted(events - known):
        raise UnknownBroadcast(e)
    stripped = VTuple(v.sources, v.guard, normalize(filter_bcast(v.action)), v.targets)
    return par_prod([[stripped]] + [ts for e, ts in tspre if e in events])


def vtuple_set_no_bcast(vs: Iterable[VTuple], tspre: EventSequence) -> TupleSet:
    out = []
    for v in vs:
        out.extend(vtuple_no_bcast(v, tspre))
    return dedupe(out)


def vseq_no_bcast(tss: EventSequence) -> EventSequence:
    expanded: EventSequence = []
    for e, ts in tss:
        expanded.append((e, vtuple_set_no_bcast(ts, expanded)))
    return expanded


def expand_broadcasts(m: Mapping[str, Iterable[VTuple]]) -> dict:
    """Topologically sort an event map and eliminate every broadcast."""
    return dict(vseq_no_bcast(topo_sort_events(m)))
