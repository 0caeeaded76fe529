"""``scvc`` command line: parse, invariants, vcgen and check.

Exit codes: 0 all valid, 1 some VC invalid, 2 usage or model error,
3 solver or internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

from .discharge import DischargeOptions, discharge_all
from .errors import (CyclicBroadcast, ModelError, PathDisagreement, ScvcError,
                     SpontaneousCycle, UnknownBroadcast)
from .expr import fmt, simplify, to_json
from .invariants import Invariants
from .model import format_stmt, format_tuple
from .parser import parse_model
from .pipeline import PATHS, compare_paths, expanded_tuples, raw_tuples

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

# model-level failures discovered after parsing still count as model errors
_MODEL_ERRORS = (ModelError, CyclicBroadcast, UnknownBroadcast, SpontaneousCycle)


@dataclass
class RunConfig:
    command: str
    input: str
    out: Optional[str] = None
    solver: Optional[str] = None
    oracle: bool = False
    bound: int = 200
    format: str = "text"
    path: str = "semantics"
    strict_unknown: bool = False
    emit_init_vc: bool = False
    workers: int = 1
    timeout: float = 30.0


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="statechart model file (.sch), or - for stdin")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--path", choices=PATHS, default="semantics",
                        help="tuple generation route; 'both' cross-checks them")
    common.add_argument("--out", metavar="DIR", help="directory for .smt2 files and report.json")
    common.add_argument("--solver", metavar="CMD",
                        help="solver command template with {file} (default: $SCVC_SOLVER)")
    common.add_argument("--oracle", action="store_true", help="use the bounded oracle")
    common.add_argument("--bound", type=_positive, default=200, metavar="N",
                        help="oracle integer bound B (default 200)")
    common.add_argument("--strict-unknown", action="store_true",
                        help="treat unknown verdicts as failures")
    common.add_argument("--emit-init-vc", action="store_true",
                        help="also check the initial configuration")
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--timeout", type=float, default=30.0, help="solver timeout in seconds")

    p = argparse.ArgumentParser(prog="scvc", description="Statechart verification conditions.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("parse", parents=[common], help="check well-formedness only")
    sub.add_parser("invariants", parents=[common], help="print si, ci, ai and sai per state")
    sub.add_parser("vcgen", parents=[common], help="dump tuples before and after broadcast expansion")
    sub.add_parser("check", parents=[common], help="generate and discharge all VCs")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(cfg: RunConfig, text: str, data) -> None:
    if cfg.format == "json":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


def cmd_parse(cfg: RunConfig, model) -> int:
    n_states = len(model.state_names)
    n_tr = len(model.transitions)
    _emit(cfg, f"{cfg.input}: ok ({model.name}: {n_states} states, {n_tr} transitions, "
               f"{len(model.events)} events)",
          {"model": model.name, "ok": True, "states": model.state_names,
           "variables": list(model.variables), "events": list(model.events),
           "transitions": [str(t) for t in model.transitions]})
    return EXIT_OK


def cmd_invariants(cfg: RunConfig, model) -> int:
    inv = Invariants(model)
    lines, rows = [], []
    for s in model.state_names:
        fns = {"si": inv.si(s), "ci": inv.ci(s), "ai": inv.ai(s), "sai": inv.sai([s])}
        for name, e in fns.items():
            arg = f"{{{s}}}" if name == "sai" else s
            lines.append(f"{name}({arg}) = {fmt(simplify(e))}")
        rows.append({"state": s, "kind": model.kind(s),
                     **{name: {"text": fmt(e), "ast": to_json(e)} for name, e in fns.items()}})
    enc = inv.encoding
    _emit(cfg, "\n".join(lines),
          {"model": model.name, "state_variables": enc.variables,
           "domains": {v: list(d) for v, d in enc.domains.items()}, "states": rows})
    return EXIT_OK


def cmd_vcgen(cfg: RunConfig, model) -> int:
    inv = Invariants(model)
    paths = ["semantics", "event-code"] if cfg.path == "both" else [cfg.path]
    if cfg.path == "both":
        compare_paths(model)
    lines, data = [], {"model": model.name, "paths": {}}
    for path in paths:
        before, after = raw_tuples(model, path), expanded_tuples(model, path)
        section = {}
        for stage, m in (("raw", before), ("expanded", after)):
            lines.append(f"== {path}, {stage} ==")
            section[stage] = {}
            for e, ts in m.items():
                section[stage][e] = [_tuple_json(model, inv, v) for v in ts]
                for i, v in enumerate(ts):
                    lines.append(f"{e}_{i}: {format_tuple(v, model, inv.state_var)}")
        data["paths"][path] = section
    _emit(cfg, "\n".join(lines), data)
    return EXIT_OK


def _tuple_json(model, inv, v) -> dict:
    return {"sources": model.sort_states(v.sources), "guard": fmt(v.guard),
            "guard_ast": to_json(v.guard), "action": format_stmt(v.action, inv.state_var),
            "targets": model.sort_states(v.targets)}


def cmd_check(cfg: RunConfig, model) -> int:
    solver = cfg.solver or os.environ.get("SCVC_SOLVER") or None
    oracle = cfg.oracle
    if not solver and not oracle:
        print("scvc: no solver configured (use --solver or SCVC_SOLVER); "
              "falling back to the bounded oracle", file=sys.stderr)
        oracle = True
    opts = DischargeOptions(solver=solver, oracle=oracle, bound=cfg.bound, path=cfg.path,
                            strict_unknown=cfg.strict_unknown, emit_init_vc=cfg.emit_init_vc,
                            outdir=cfg.out, workers=cfg.workers, timeout=cfg.timeout)
    report = discharge_all(model, opts)
    data = report.to_json()
    if cfg.out:
        with open(os.path.join(cfg.out, "report.json"), "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2, ensure_ascii=False)
    _emit(cfg, report.to_text(), data)
    for r in report.results:
        if r.status == "error":
            print(f"scvc: {r.vc.id}: {r.message}", file=sys.stderr)
    return report.exit_code


COMMANDS = {"parse": cmd_parse, "invariants": cmd_invariants,
            "vcgen": cmd_vcgen, "check": cmd_check}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    cfg = RunConfig(**{k.replace("-", "_"): v for k, v in vars(ns).items()})
    logging.basicConfig(level=logging.WARNING, format="scvc: %(levelname)s: %(message)s")
    try:
        text = _read(cfg.input)
    except OSError as exc:
        print(f"scvc: cannot read {cfg.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        model = parse_model(text)
        return COMMANDS[cfg.command](cfg, model)
    except ModelError as exc:
        for d in exc.diagnostics:
            print(f"{cfg.input}:{d}", file=sys.stderr)
        return EXIT_USAGE
    except _MODEL_ERRORS as exc:
        print(f"{cfg.input}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PathDisagreement as exc:
        print(f"{cfg.input}: path disagreement: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ScvcError, OSError, ValueError) as exc:
        print(f"scvc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
