"""SMT-LIB v2 emission and an external-solver subprocess driver."""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Optional

from ..errors import SolverOutputParseError, SolverSpawnError, UnsupportedNode
from ..expr import (And, BinOp, BoolLit, ExactlyOne, Expr, Implies, InState, IntLit,
                    Neg, Not, Or, StateLit, Var)

_RESERVED = frozenset({
    "and", "or", "not", "xor", "ite", "distinct", "let", "forall", "exists",
    "match", "par", "as", "true", "false", "Int", "Bool", "Real", "abs", "div", "mod",
})

_OPS = {"+": "+", "-": "-", "*": "*", "=": "=", "!=": "distinct",
        "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def var_symbol(name: str) -> str:
    return f"v!{name}" if name in _RESERVED else name


def state_symbol(state: str) -> str:
    return f"st!{state}"


def sort_symbol(var: str) -> str:
    return f"State!{var}"


def to_smt(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return var_symbol(e.name)
    if isinstance(e, StateLit):
        return state_symbol(e.name)
    if isinstance(e, Neg):
        return f"(- {to_smt(e.arg)})"
    if isinstance(e, Not):
        return f"(not {to_smt(e.arg)})"
    if isinstance(e, BinOp):
        return f"({_OPS[e.op]} {to_smt(e.left)} {to_smt(e.right)})"
    if isinstance(e, (And, Or)):
        if not e.args:
            return "true" if isinstance(e, And) else "false"
        op = "and" if isinstance(e, And) else "or"
        return f"({op} " + " ".join(to_smt(a) for a in e.args) + ")"
    if isinstance(e, Implies):
        return f"(=> {to_smt(e.left)} {to_smt(e.right)})"
    if isinstance(e, ExactlyOne):
        if not e.args:
            return "false"
        if len(e.args) == 1:
            return to_smt(e.args[0])
        return "(= (+ " + " ".join(f"(ite {to_smt(a)} 1 0)" for a in e.args) + ") 1)"
    if isinstance(e, InState):
        raise UnsupportedNode("in(...) must be lowered before SMT emission")
    raise TypeError(f"not an expression: {e!r}")


def emit_smt(vc) -> str:
    """SMT-LIB script whose answer is ``unsat`` exactly when the VC is valid."""
    lines = [f"; {vc.id}" + (f" (event {vc.event})" if vc.event else ""),
             "(set-logic ALL)"]
    sorts = [(v, dom) for v, dom in vc.state_sorts.items() if dom]
    if sorts:
        heads = " ".join(f"({sort_symbol(v)} 0)" for v, _ in sorts)
        bodies = " ".join("(" + " ".join(f"({state_symbol(s)})" for s in dom) + ")"
                          for _, dom in sorts)
        lines.append(f"(declare-datatypes ({heads}) ({bodies}))")
    for v in vc.int_vars:
        lines.append(f"(declare-const {var_symbol(v)} Int)")
    for v, _ in sorts:
        lines.append(f"(declare-const {var_symbol(v)} {sort_symbol(v)})")
    lines.append(f"(assert (not {to_smt(vc.formula)}))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# -- solver driver ----------------------------------------------------------------

@dataclass
class SolverVerdict:
    status: str  # valid | invalid | unknown
    counterexample: Optional[dict] = None
    raw: str = ""
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)


_SEXP_TOKEN = re.compile(r'\s*(?:(\()|(\))|("(?:[^"]|"")*")|(\|[^|]*\|)|([^\s()|";]+)|(;[^\n]*))')


def parse_sexps(text: str) -> list:
    """Parse a sequence of s-expressions into nested lists of atoms."""
    stack: list = [[]]
    pos = 0
    while pos < len(text):
        m = _SEXP_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip():
                raise ValueError(f"bad s-expression near {text[pos:pos + 20]!r}")
            break
        pos = m.end()
        lp, rp, string, quoted, atom, _comment = m.groups()
        if lp:
            stack.append([])
        elif rp:
            if len(stack) == 1:
                raise ValueError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        elif string:
            stack[-1].append(string)
        elif quoted:
            stack[-1].append(quoted[1:-1])
        elif atom:
            stack[-1].append(atom)
    if len(stack) != 1:
        raise ValueError("unbalanced '('")
    return stack[0]


def _model_value(v):
    if isinstance(v, list):
        if len(v) == 2 and v[0] == "-":
            return -int(v[1])
        if len(v) == 3 and v[0] == "as":  # (as st!R State!r)
            return _model_value(v[1])
        raise ValueError(f"unsupported model value {v!r}")
    if re.fullmatch(r"\d+", v):
        return int(v)
    if v in ("true", "false"):
        return v == "true"
    if v.startswith("st!"):
        return v[3:]
    return v


def parse_model_output(text: str) -> dict:
    """Read ``(define-fun name () Sort value)`` entries of a ``(get-model)`` reply."""
    values = {}
    for item in parse_sexps(text):
        entries = item[1:] if item and item[0] == "model" else item
        for d in entries:
            if isinstance(d, list) and len(d) == 5 and d[0] == "define-fun" and d[2] == []:
                name = d[1][2:] if d[1].startswith("v!") else d[1]
                values[name] = _model_value(d[4])
    return values


def run_solver(script: str, cmd: str, timeout: float = 30.0) -> SolverVerdict:
    """Run ``cmd`` (with ``{file}`` placeholder) on ``script``.

    ``unsat`` means the VC is valid; ``sat`` yields the parsed model as a
    counterexample; ``unknown`` and timeouts are reported as unknown.
    """
    fd, path = tempfile.mkstemp(suffix=".smt2", prefix="scvc-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(script)
        if "{file}" in cmd:
            argv = shlex.split(cmd.replace("{file}", shlex.quote(path)))
        else:
            argv = shlex.split(cmd) + [path]
        start = time.perf_counter()
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except (FileNotFoundError, PermissionError, IndexError) as exc:
            raise SolverSpawnError(f"cannot run solver {cmd!r}: {exc}") from None
        except subprocess.TimeoutExpired as exc:
            out = exc.stdout.decode() if isinstance(exc.stdout, bytes) else (exc.stdout or "")
            return SolverVerdict("unknown", raw=out, seconds=timeout,
                                 extra={"reason": "timeout"})
        elapsed = time.perf_counter() - start
    finally:
        os.unlink(path)

    raw = proc.stdout
    lines = raw.splitlines()
    first = next((ln.strip() for ln in lines if ln.strip()), "")
    if first == "unsat":
        return SolverVerdict("valid", raw=raw, seconds=elapsed)
    if first == "unknown":
        return SolverVerdict("unknown", raw=raw, seconds=elapsed)
    if first == "sat":
        rest = raw.split("sat", 1)[1]
        try:
            cex = parse_model_output(rest)
        except ValueError as exc:
            raise SolverOutputParseError(f"cannot read solver model: {exc}", raw) from None
        return SolverVerdict("invalid", cex, raw=raw, seconds=elapsed)
    raise SolverOutputParseError(
        f"solver printed {first!r} instead of sat/unsat/unknown"
        + (f" (stderr: {proc.stderr.strip()})" if proc.stderr.strip() else ""), raw + proc.stderr)
