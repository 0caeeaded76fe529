"""From verification tuples to verdicts: VCs, SMT-LIB scripts, solver and oracle."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ScvcError
from ..expr import TRUE, fmt, simplify, to_json
from ..invariants import Invariants
from ..model import StatechartModel, format_stmt
from ..semantics import initialize
from .oracle import DEFAULT_CAP, OracleVerdict, bounded_oracle, falsifies
from .smt import SolverVerdict, emit_smt, run_solver
from .vc import VerificationCondition, standalone_vc, tuple_to_vc
from .wp import effect, wp

STATUSES = ("valid", "invalid", "unknown", "error")


@dataclass
class DischargeOptions:
    solver: Optional[str] = None  # command template, ``{file}`` placeholder
    oracle: bool = False
    bound: int = 200
    path: str = "semantics"
    strict_unknown: bool = False
    emit_init_vc: bool = False
    outdir: Optional[str] = None
    workers: int = 1
    cap: int = DEFAULT_CAP
    timeout: float = 30.0


@dataclass
class VCResult:
    vc: VerificationCondition
    status: str
    counterexample: Optional[dict] = None
    seconds: float = 0.0
    solver: Optional[SolverVerdict] = None
    oracle: Optional[OracleVerdict] = None
    trivial: bool = False
    message: str = ""

    def to_json(self, model: Optional[StatechartModel] = None, inv=None) -> dict:
        v = self.vc.tuple
        order = model.sort_states if model is not None else sorted
        d = {
            "id": self.vc.id,
            "event": self.vc.event,
            "sources": list(order(v.sources)) if v else [],
            "targets": list(order(v.targets)) if v else [],
            "guard": fmt(v.guard) if v else "true",
            "status": self.status,
        }
        if self.counterexample is not None:
            d["counterexample"] = dict(self.counterexample)
        if v is not None:
            d["action"] = format_stmt(v.action, inv.state_var if inv else None)
            d["guard_ast"] = to_json(v.guard)
        if self.vc.formula is not None:
            d["formula"] = fmt(self.vc.formula)
            d["formula_ast"] = to_json(self.vc.formula)
        d["provenance"] = list(self.vc.provenance)
        d["trivial"] = self.trivial
        d["seconds"] = round(self.seconds, 6)
        if self.message:
            d["message"] = self.message
        if self.solver is not None and self.status == "error":
            d["solver_output"] = self.solver.raw
        return d


@dataclass
class VerificationReport:
    model: str
    solver: str
    results: list = field(default_factory=list)
    strict_unknown: bool = False
    seconds: float = 0.0
    _model_obj: Optional[StatechartModel] = field(default=None, repr=False)

    def count(self, status: str) -> int:
        return sum(1 for r in self.results if r.status == status)

    @property
    def exit_code(self) -> int:
        """0 all valid, 1 some invalid (or unknown when strict), 3 some error."""
        if self.count("error"):
            return 3
        if self.count("invalid") or (self.strict_unknown and self.count("unknown")):
            return 1
        return 0

    def to_json(self) -> dict:
        inv = Invariants(self._model_obj) if self._model_obj is not None else None
        return {
            "model": self.model,
            "solver": self.solver,
            "summary": {s: self.count(s) for s in STATUSES},
            "seconds": round(self.seconds, 6),
            "vcs": [r.to_json(self._model_obj, inv) for r in self.results],
        }

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            d = r.to_json(self._model_obj)
            line = (f"{r.vc.id:<12} {r.status:<8} sources {{{','.join(d['sources'])}}}"
                    f" -> targets {{{','.join(d['targets'])}}}  guard {d['guard']}")
            if r.counterexample is not None:
                cex = ", ".join(f"{k} = {v}" for k, v in r.counterexample.items())
                line += f"\n{'':<12} counterexample: {cex}"
            if r.message:
                line += f"\n{'':<12} {r.message}"
            lines.append(line)
        summary = ", ".join(f"{self.count(s)} {s}" for s in STATUSES if self.count(s))
        lines.append(f"{self.model}: {len(self.results)} VCs ({summary or 'none'}) "
                     f"using {self.solver}")
        return "\n".join(lines)


def build_vcs(model: StatechartModel, tuples: dict, emit_init_vc: bool = False) -> list:
    """One VC per tuple, ids ``<event>_<index>`` in event and tuple order.

    A tuple whose VC cannot be formed (e.g. a write conflict between
    concurrent regions) yields a :class:`VCResult` with status ``error``
    in its place.
    """
    inv = Invariants(model)
    jobs = []
    if emit_init_vc:
        jobs.append(("init", 0, initialize(model, model.root)[0]))
    jobs += [(e, i, v) for e, ts in tuples.items() for i, v in enumerate(ts)]
    out = []
    for e, i, v in jobs:
        try:
            out.append(tuple_to_vc(model, e, v, i, inv))
        except ScvcError as exc:
            vc = VerificationCondition(f"{e}_{i}", e, v, None, tuple(model.variables),
                                       dict(inv.encoding.domains))
            out.append(VCResult(vc, "error", message=f"{type(exc).__name__}: {exc}"))
    return out


def _within(cex: dict, bound: int) -> bool:
    return all(abs(v) <= bound for v in cex.values() if isinstance(v, int) and not isinstance(v, bool))


def discharge_vc(vc: VerificationCondition, opts: DischargeOptions) -> VCResult:
    """Decide one VC; failures become an ``error`` result instead of raising."""
    start = time.perf_counter()
    res = VCResult(vc, "unknown")
    try:
        if simplify(vc.formula) == TRUE:
            res.status, res.trivial = "valid", True
            return res
        if opts.solver:
            res.solver = run_solver(emit_smt(vc), opts.solver, opts.timeout)
        if opts.oracle:
            res.oracle = bounded_oracle(vc, opts.bound, opts.cap)
        _merge(res, opts)
    except ScvcError as exc:
        res.status, res.message = "error", f"{type(exc).__name__}: {exc}"
        if getattr(exc, "raw", None) is not None:
            res.solver = SolverVerdict("error", raw=exc.raw)
    finally:
        res.seconds = time.perf_counter() - start
    return res


def _merge(res: VCResult, opts: DischargeOptions) -> None:
    s, o = res.solver, res.oracle
    if s is not None and s.status in ("valid", "invalid"):
        res.status, res.counterexample = s.status, s.counterexample
        if o is not None and o.status != "unknown" and o.status != s.status:
            # a solver counterexample outside the box is invisible to the oracle
            if not (s.status == "invalid" and o.status == "valid"
                    and not _within(s.counterexample or {}, opts.bound)):
                res.status = "error"
                res.message = f"solver says {s.status}, oracle says {o.status} (B = {opts.bound})"
                return
    elif o is not None and o.status != "unknown":
        res.status, res.counterexample = o.status, o.counterexample
    else:
        res.status = "unknown"
        reasons = [x for x in (s and s.extra.get("reason"), o and o.reason) if x]
        res.message = "; ".join(reasons)
        return
    if res.status == "invalid":
        res.counterexample = _ordered(res.vc, res.counterexample or {})
        if not falsifies(res.vc, res.counterexample):
            res.status = "error"
            res.message = "counterexample does not falsify the formula"


def _ordered(vc: VerificationCondition, cex: dict) -> dict:
    keys = [*vc.int_vars, *vc.state_sorts]
    rank = {k: i for i, k in enumerate(keys)}
    return dict(sorted(cex.items(), key=lambda kv: (rank.get(kv[0], len(rank)), kv[0])))


def discharge_vcs(vcs: list, opts: DischargeOptions) -> list:
    if not (opts.solver or opts.oracle):
        raise ValueError("no back end selected: give a solver command or enable the oracle")
    if opts.outdir:
        os.makedirs(opts.outdir, exist_ok=True)
        for vc in vcs:
            if isinstance(vc, VCResult):
                continue
            with open(os.path.join(opts.outdir, f"{vc.id}.smt2"), "w", encoding="utf-8") as fh:
                fh.write(emit_smt(vc))
    def one(vc):
        return vc if isinstance(vc, VCResult) else discharge_vc(vc, opts)

    with ThreadPoolExecutor(max_workers=max(1, opts.workers)) as pool:
        return list(pool.map(one, vcs))


def solver_identity(opts: DischargeOptions) -> str:
    parts = []
    if opts.solver:
        parts.append(f"solver: {opts.solver}")
    if opts.oracle:
        parts.append(f"oracle B={opts.bound}")
    return ", ".join(parts)


def discharge_all(model: StatechartModel, opts: Optional[DischargeOptions] = None,
                  tuples: Optional[dict] = None) -> VerificationReport:
    """Generate and decide every VC of ``model``."""
    from ..pipeline import tuples_for

    opts = opts or DischargeOptions(oracle=True)
    start = time.perf_counter()
    if tuples is None:
        tuples = tuples_for(model, opts.path)
    vcs = build_vcs(model, tuples, opts.emit_init_vc)
    results = discharge_vcs(vcs, opts)
    return VerificationReport(model.name, solver_identity(opts), results,
                              opts.strict_unknown, time.perf_counter() - start, model)


__all__ = [
    "DischargeOptions", "OracleVerdict", "SolverVerdict", "VCResult", "VerificationCondition",
    "VerificationReport", "bounded_oracle", "build_vcs", "discharge_all", "discharge_vc",
    "discharge_vcs", "effect", "emit_smt", "falsifies", "run_solver", "standalone_vc",
    "tuple_to_vc", "wp",
]
