"""End-to-end tuple generation: per-event tuples, broadcast expansion, cross-checks."""

from __future__ import annotations

from .errors import PathDisagreement
from .model import SKIP, StatechartModel, VTuple, canonical_tuple
from .semantics import consistent, event_code, event_vtuple_map
from .vcgen import expand_broadcasts, vtuple_map

PATHS = ("semantics", "event-code", "both")


def raw_tuples(model: StatechartModel, path: str = "semantics") -> dict:
    """Event -> tuples before broadcast expansion."""
    if path == "semantics":
        return event_vtuple_map(model)
    if path == "event-code":
        m = vtuple_map(event_code(model, full=True))
        return {e: prune(model, ts) for e, ts in m.items()}
    raise ValueError(f"unknown path {path!r}")


def prune(model: StatechartModel, ts) -> list[VTuple]:
    """Drop tuples whose sources cannot be active together."""
    return [t for t in ts if consistent(model, t.sources)]


def expanded_tuples(model: StatechartModel, path: str = "semantics") -> dict:
    """Event -> broadcast-free tuples, in topological event order."""
    m = expand_broadcasts(raw_tuples(model, path))
    return {e: prune(model, ts) for e, ts in m.items()}


def is_firing(v: VTuple) -> bool:
    return v.action != SKIP or bool(v.targets)


def firing_tuples(m: dict) -> dict:
    return {e: [v for v in ts if is_firing(v)] for e, ts in m.items()}


def canonical_firing(m: dict) -> dict:
    return {e: frozenset(canonical_tuple(v) for v in ts)
            for e, ts in firing_tuples(m).items()}


def compare_paths(model: StatechartModel) -> dict:
    """Expanded tuples of the semantics path, after checking the event-code path agrees.

    Raises :class:`PathDisagreement` naming the first event whose firing
    tuples differ.
    """
    sem = expanded_tuples(model, "semantics")
    code = expanded_tuples(model, "event-code")
    a, b = canonical_firing(sem), canonical_firing(code)
    for e in sorted(set(a) | set(b)):
        if a.get(e, frozenset()) != b.get(e, frozenset()):
            only_sem = len(a.get(e, frozenset()) - b.get(e, frozenset()))
            only_code = len(b.get(e, frozenset()) - a.get(e, frozenset()))
            raise PathDisagreement(
                f"event {e}: {only_sem} firing tuple(s) only on the semantics path, "
                f"{only_code} only on the event-code path")
    return sem


def tuples_for(model: StatechartModel, path: str = "semantics") -> dict:
    if path == "both":
        return compare_paths(model)
    return expanded_tuples(model, path)
