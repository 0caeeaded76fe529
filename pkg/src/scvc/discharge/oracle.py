"""Exhaustive evaluation of a VC over a bounded finite domain.

Integers range over ``-B..B`` and state variables over their children.
Valuations are scanned lexicographically, first declared variable most
significant, so the reported counterexample is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..expr import (And, BinOp, BoolLit, ExactlyOne, Expr, Implies, InState, IntLit,
                    Neg, Not, Or, StateLit, Var, evaluate, free_vars,
                    state_refs)

DEFAULT_CAP = 5_000_000
CHUNK = 1 << 18


@dataclass
class OracleVerdict:
    status: str  # valid | invalid | unknown
    counterexample: Optional[dict] = None
    checked: int = 0
    bound: int = 0
    reason: str = ""


def _codes(vc) -> dict:
    # every state name gets a global code so literals of different sorts never collide
    names = [s for dom in vc.state_sorts.values() for s in dom]
    names += sorted(state_refs(vc.formula))
    return {s: i for i, s in enumerate(dict.fromkeys(names))}


def _eval(e: Expr, env: dict, codes: dict, n: int):
    if isinstance(e, IntLit):
        return np.full(n, e.value, dtype=np.int64)
    if isinstance(e, BoolLit):
        return np.full(n, e.value, dtype=bool)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, StateLit):
        return np.full(n, codes[e.name], dtype=np.int64)
    if isinstance(e, Neg):
        return -_eval(e.arg, env, codes, n)
    if isinstance(e, Not):
        return ~_eval(e.arg, env, codes, n)
    if isinstance(e, BinOp):
        a, b = _eval(e.left, env, codes, n), _eval(e.right, env, codes, n)
        return {"+": np.add, "-": np.subtract, "*": np.multiply,
                "=": np.equal, "!=": np.not_equal, "<": np.less, "<=": np.less_equal,
                ">": np.greater, ">=": np.greater_equal}[e.op](a, b)
    if isinstance(e, And):
        out = np.ones(n, dtype=bool)
        for a in e.args:
            out &= _eval(a, env, codes, n)
        return out
    if isinstance(e, Or):
        out = np.zeros(n, dtype=bool)
        for a in e.args:
            out |= _eval(a, env, codes, n)
        return out
    if isinstance(e, Implies):
        return ~_eval(e.left, env, codes, n) | _eval(e.right, env, codes, n)
    if isinstance(e, ExactlyOne):
        count = np.zeros(n, dtype=np.int64)
        for a in e.args:
            count += _eval(a, env, codes, n)
        return count == 1
    if isinstance(e, InState):
        raise ValueError("in(...) atoms must be lowered before evaluation")
    raise TypeError(f"not an expression: {e!r}")


def domains(vc, bound: int) -> list[tuple[str, list]]:
    """Scan domains of the variables the formula mentions, in declaration order."""
    used = free_vars(vc.formula)
    ints = list(range(-bound, bound + 1))
    out = [(v, ints) for v in vc.int_vars if v in used]
    out += [(v, list(dom)) for v, dom in vc.state_sorts.items() if v in used and dom]
    # free variables the VC does not declare are treated as integers
    declared = {v for v, _ in out}
    out += [(v, ints) for v in sorted(used - declared - set(vc.state_sorts))]
    return out


def bounded_oracle(vc, bound: int, cap: int = DEFAULT_CAP) -> OracleVerdict:
    if bound < 1:
        raise ValueError("bound must be at least 1")
    doms = domains(vc, bound)
    total = 1
    for _, d in doms:
        total *= len(d)
    if total > cap:
        return OracleVerdict("unknown", checked=0, bound=bound,
                             reason=f"{total} valuations exceed cap {cap}")
    codes = _codes(vc)
    shape = tuple(len(d) for _, d in doms)
    values = []
    for _, d in doms:
        if d and isinstance(d[0], str):
            values.append(np.array([codes[s] for s in d], dtype=np.int64))
        else:
            values.append(np.array(d, dtype=np.int64))
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(start + CHUNK, total))
        idx = np.unravel_index(flat, shape) if shape else ()
        env = {name: values[i][idx[i]] for i, (name, _) in enumerate(doms)}
        ok = _eval(vc.formula, env, codes, len(flat))
        bad = np.flatnonzero(~ok)
        if bad.size:
            k = int(flat[bad[0]])
            pos = np.unravel_index(k, shape) if shape else ()
            cex = {name: d[int(pos[i])] for i, (name, d) in enumerate(doms)}
            return OracleVerdict("invalid", cex, checked=k + 1, bound=bound)
    return OracleVerdict("valid", checked=total, bound=bound)


def falsifies(vc, valuation: dict) -> bool:
    """Scalar check that ``valuation`` makes the formula false.

    Variables missing from the valuation default to 0 (or the first child
    of a state sort) since they are unconstrained by the model.
    """
    env = {v: 0 for v in free_vars(vc.formula)}
    for v, dom in vc.state_sorts.items():
        if dom:
            env[v] = dom[0]
    env.update(valuation)
    return not evaluate(vc.formula, env)
