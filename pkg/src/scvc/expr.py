"""Integer/boolean expression language used for guards, invariants and VCs.

Nodes are frozen dataclasses so that expressions can be hashed, compared
structurally and shared freely.  State-variable values are represented by
:class:`StateLit` (the name of a child state) and compared with ``=``.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ExprTypeError


class Expr:
    __slots__ = ()

    def __str__(self) -> str:
        return fmt(self)


@dataclass(frozen=True, repr=False)
class IntLit(Expr):
    value: int

    def __repr__(self):
        return f"IntLit({self.value})"


@dataclass(frozen=True, repr=False)
class BoolLit(Expr):
    value: bool

    def __repr__(self):
        return f"BoolLit({self.value})"


@dataclass(frozen=True, repr=False)
class Var(Expr):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class StateLit(Expr):
    """A state name used as a value of its parent's state variable."""
    name: str

    def __repr__(self):
        return f"StateLit({self.name!r})"


@dataclass(frozen=True, repr=False)
class InState(Expr):
    """``in(S)`` -- residence test, lowered to state-variable equations."""
    state: str

    def __repr__(self):
        return f"InState({self.state!r})"


@dataclass(frozen=True, repr=False)
class Neg(Expr):
    arg: Expr

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Not(Expr):
    arg: Expr

    def __repr__(self):
        return f"Not({self.arg!r})"


ARITH_OPS = ("+", "-", "*")
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True, repr=False)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def __repr__(self):
        return f"BinOp({self.op!r}, {self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class And(Expr):
    args: tuple

    def __repr__(self):
        return f"And({list(self.args)!r})"


@dataclass(frozen=True, repr=False)
class Or(Expr):
    args: tuple

    def __repr__(self):
        return f"Or({list(self.args)!r})"


@dataclass(frozen=True, repr=False)
class Implies(Expr):
    left: Expr
    right: Expr

    def __repr__(self):
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class ExactlyOne(Expr):
    """Holds iff exactly one argument holds (n-ary, not parity)."""
    args: tuple

    def __repr__(self):
        return f"ExactlyOne({list(self.args)!r})"


TRUE = BoolLit(True)
FALSE = BoolLit(False)

Value = Union[int, bool, str]


# -- smart constructors -------------------------------------------------------

def conj(*args: Expr) -> Expr:
    """Conjunction with ``true`` operands dropped and singletons unwrapped.

    Nested conjunctions are kept as they are so that printed formulas
    preserve the grouping of their parts.
    """
    parts = tuple(a for a in args if a != TRUE)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def disj(*args: Expr) -> Expr:
    parts = tuple(a for a in args if a != FALSE)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def exactly_one(*args: Expr) -> Expr:
    if len(args) == 1:
        return args[0]
    return ExactlyOne(tuple(args))


def eq(left: Expr, right: Expr) -> Expr:
    return BinOp("=", left, right)


def conjuncts(e: Expr) -> list[Expr]:
    """Flatten nested conjunctions into a list, dropping ``true``."""
    if isinstance(e, And):
        out = []
        for a in e.args:
            out.extend(conjuncts(a))
        return out
    if e == TRUE:
        return []
    return [e]


# -- printing -----------------------------------------------------------------

_UNICODE = {"and": " ∧ ", "or": " ∨ ", "implies": " ⇒ ", "not": "¬",
            "!=": "≠", "<=": "≤", ">=": "≥"}
_ASCII = {"and": " and ", "or": " or ", "implies": " => ", "not": "not ",
          "!=": "!=", "<=": "<=", ">=": ">="}

_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_CMP, _PREC_ADD, _PREC_MUL, \
    _PREC_UNARY, _PREC_ATOM = range(1, 9)


def _prec(e: Expr) -> int:
    if isinstance(e, Implies):
        return _PREC_IMPLIES
    if isinstance(e, Or):
        return _PREC_OR
    if isinstance(e, And):
        return _PREC_AND
    if isinstance(e, BinOp):
        if e.op in CMP_OPS:
            return _PREC_CMP
        return _PREC_MUL if e.op == "*" else _PREC_ADD
    if isinstance(e, (Not, Neg)):
        return _PREC_UNARY
    if isinstance(e, IntLit) and e.value < 0:
        return _PREC_UNARY
    return _PREC_ATOM


def fmt(e: Expr, ascii: bool = False) -> str:
    """Render an expression; ``ascii=True`` yields DSL-parseable text."""
    sym = _ASCII if ascii else _UNICODE

    def paren(sub, cond):
        s = go(sub)
        return f"({s})" if cond else s

    def go(e):
        if isinstance(e, IntLit):
            return str(e.value)
        if isinstance(e, BoolLit):
            return "true" if e.value else "false"
        if isinstance(e, (Var, StateLit)):
            return e.name
        if isinstance(e, InState):
            return f"in({e.state})"
        if isinstance(e, Neg):
            return "-" + paren(e.arg, _prec(e.arg) < _PREC_ATOM)
        if isinstance(e, Not):
            return sym["not"] + paren(e.arg, _prec(e.arg) < _PREC_ATOM)
        if isinstance(e, BinOp):
            p = _prec(e)
            op = sym.get(e.op, e.op)
            if e.op in CMP_OPS:
                return f"{paren(e.left, _prec(e.left) <= p)} {op} {paren(e.right, _prec(e.right) <= p)}"
            return f"{paren(e.left, _prec(e.left) < p)} {op} {paren(e.right, _prec(e.right) <= p)}"
        if isinstance(e, (And, Or)):
            joiner = sym["and"] if isinstance(e, And) else sym["or"]
            return joiner.join(paren(a, _prec(a) <= _PREC_AND) for a in e.args)
        if isinstance(e, Implies):
            return (paren(e.left, _prec(e.left) <= _PREC_AND) + sym["implies"]
                    + paren(e.right, _prec(e.right) <= _PREC_AND))
        if isinstance(e, ExactlyOne):
            return "one(" + ", ".join(go(a) for a in e.args) + ")"
        raise TypeError(f"not an expression: {e!r}")

    return go(e)


# -- traversal ----------------------------------------------------------------

def children_of(e: Expr) -> tuple:
    if isinstance(e, (Neg, Not)):
        return (e.arg,)
    if isinstance(e, (BinOp, Implies)):
        return (e.left, e.right)
    if isinstance(e, (And, Or, ExactlyOne)):
        return e.args
    return ()


def rebuild(e: Expr, kids) -> Expr:
    kids = tuple(kids)
    if isinstance(e, Neg):
        return Neg(kids[0])
    if isinstance(e, Not):
        return Not(kids[0])
    if isinstance(e, BinOp):
        return BinOp(e.op, kids[0], kids[1])
    if isinstance(e, Implies):
        return Implies(kids[0], kids[1])
    if isinstance(e, And):
        return And(kids)
    if isinstance(e, Or):
        return Or(kids)
    if isinstance(e, ExactlyOne):
        return ExactlyOne(kids)
    return e


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    out: set[str] = set()
    for k in children_of(e):
        out |= free_vars(k)
    return out


def state_refs(e: Expr) -> set[str]:
    """State names mentioned through ``in(S)`` atoms or state literals."""
    if isinstance(e, (InState,)):
        return {e.state}
    if isinstance(e, StateLit):
        return {e.name}
    out: set[str] = set()
    for k in children_of(e):
        out |= state_refs(k)
    return out


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Simultaneous substitution of variables."""
    if not mapping:
        return e
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    kids = children_of(e)
    if not kids:
        return e
    return rebuild(e, (substitute(k, mapping) for k in kids))


def map_instate(e: Expr, fn) -> Expr:
    """Replace every ``in(S)`` atom by ``fn(S)``."""
    if isinstance(e, InState):
        return fn(e.state)
    kids = children_of(e)
    if not kids:
        return e
    return rebuild(e, (map_instate(k, fn) for k in kids))


def size(e: Expr) -> int:
    return 1 + sum(size(k) for k in children_of(e))


# -- evaluation ---------------------------------------------------------------

_ARITH = {"+": operator.add, "-": operator.sub, "*": operator.mul}
_CMP = {"=": operator.eq, "!=": operator.ne, "<": operator.lt,
        "<=": operator.le, ">": operator.gt, ">=": operator.ge}


def evaluate(e: Expr, env: Mapping[str, Value]) -> Value:
    """Evaluate under a total valuation; state variables hold state names."""
    if isinstance(e, (IntLit, BoolLit)):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, StateLit):
        return e.name
    if isinstance(e, Neg):
        return -evaluate(e.arg, env)
    if isinstance(e, Not):
        return not evaluate(e.arg, env)
    if isinstance(e, BinOp):
        lhs, rhs = evaluate(e.left, env), evaluate(e.right, env)
        if e.op in _ARITH:
            return _ARITH[e.op](lhs, rhs)
        return _CMP[e.op](lhs, rhs)
    if isinstance(e, And):
        return all(evaluate(a, env) for a in e.args)
    if isinstance(e, Or):
        return any(evaluate(a, env) for a in e.args)
    if isinstance(e, Implies):
        return (not evaluate(e.left, env)) or bool(evaluate(e.right, env))
    if isinstance(e, ExactlyOne):
        return sum(1 for a in e.args if evaluate(a, env)) == 1
    if isinstance(e, InState):
        raise ValueError("in(...) atoms must be lowered before evaluation")
    raise TypeError(f"not an expression: {e!r}")


# -- simplification -----------------------------------------------------------

def simplify(e: Expr) -> Expr:
    """Bottom-up constant folding; preserves logical meaning."""
    kids = children_of(e)
    if kids:
        e = rebuild(e, (simplify(k) for k in kids))
    if isinstance(e, Neg) and isinstance(e.arg, IntLit):
        return IntLit(-e.arg.value)
    if isinstance(e, Not):
        if isinstance(e.arg, BoolLit):
            return BoolLit(not e.arg.value)
        if isinstance(e.arg, Not):
            return e.arg.arg
        return e
    if isinstance(e, BinOp):
        lit = (IntLit, BoolLit, StateLit)
        if isinstance(e.left, lit) and isinstance(e.right, lit):
            v = evaluate(e, {})
            return BoolLit(v) if isinstance(v, bool) else IntLit(v)
        if e.op in ("=", "<=", ">=") and e.left == e.right:
            return TRUE
        return e
    if isinstance(e, And):
        parts = []
        for a in e.args:
            if a == FALSE:
                return FALSE
            if a != TRUE and a not in parts:
                parts.append(a)
        return conj(*parts)
    if isinstance(e, Or):
        parts = []
        for a in e.args:
            if a == TRUE:
                return TRUE
            if a != FALSE and a not in parts:
                parts.append(a)
        return disj(*parts)
    if isinstance(e, Implies):
        if e.left == TRUE:
            return e.right
        if e.left == FALSE or e.right == TRUE:
            return TRUE
        if e.right == FALSE:
            return simplify(Not(e.left))
        return e
    if isinstance(e, ExactlyOne):
        if all(isinstance(a, BoolLit) for a in e.args):
            return BoolLit(sum(a.value for a in e.args) == 1)
        if len(e.args) == 1:
            return e.args[0]
    return e


# -- typing -------------------------------------------------------------------

INT, BOOL = "int", "bool"


def typecheck(e: Expr, var_types: Mapping[str, str],
              state_types: Mapping[str, str] = {}) -> str:
    """Return ``"int"``, ``"bool"`` or a state-sort name; raise on ill-typed input.

    ``var_types`` maps variables to their type; ``state_types`` maps each
    state name to the sort of the variable it is a value of (used for
    :class:`StateLit`) and doubles as the set of known states for ``in(S)``.
    """
    def need(sub, want):
        got = go(sub)
        if got != want:
            raise ExprTypeError(f"expected {want} but {fmt(sub, ascii=True)} has type {got}")

    def go(e):
        if isinstance(e, IntLit):
            return INT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, Var):
            if e.name not in var_types:
                raise ExprTypeError(f"undeclared variable {e.name}")
            return var_types[e.name]
        if isinstance(e, StateLit):
            if e.name not in state_types or state_types[e.name] is None:
                raise ExprTypeError(f"{e.name} is not a state value")
            return state_types[e.name]
        if isinstance(e, InState):
            if e.state not in state_types:
                raise ExprTypeError(f"unknown state {e.state}")
            return BOOL
        if isinstance(e, Neg):
            need(e.arg, INT)
            return INT
        if isinstance(e, Not):
            need(e.arg, BOOL)
            return BOOL
        if isinstance(e, BinOp):
            if e.op in ARITH_OPS:
                need(e.left, INT)
                need(e.right, INT)
                return INT
            lt = go(e.left)
            if e.op in ("=", "!="):
                need(e.right, lt)
            else:
                if lt != INT:
                    raise ExprTypeError(f"comparison {e.op} needs integer operands")
                need(e.right, INT)
            return BOOL
        if isinstance(e, (And, Or, ExactlyOne)):
            for a in e.args:
                need(a, BOOL)
            return BOOL
        if isinstance(e, Implies):
            need(e.left, BOOL)
            need(e.right, BOOL)
            return BOOL
        raise TypeError(f"not an expression: {e!r}")

    return go(e)


# -- JSON ---------------------------------------------------------------------

def to_json(e: Expr):
    if isinstance(e, IntLit):
        return {"int": e.value}
    if isinstance(e, BoolLit):
        return {"bool": e.value}
    if isinstance(e, Var):
        return {"var": e.name}
    if isinstance(e, StateLit):
        return {"state": e.name}
    if isinstance(e, InState):
        return {"in": e.state}
    if isinstance(e, Neg):
        return {"op": "neg", "args": [to_json(e.arg)]}
    if isinstance(e, Not):
        return {"op": "not", "args": [to_json(e.arg)]}
    if isinstance(e, BinOp):
        return {"op": e.op, "args": [to_json(e.left), to_json(e.right)]}
    if isinstance(e, Implies):
        return {"op": "=>", "args": [to_json(e.left), to_json(e.right)]}
    name = {And: "and", Or: "or", ExactlyOne: "one"}[type(e)]
    return {"op": name, "args": [to_json(a) for a in e.args]}


def from_json(d) -> Expr:
    if "int" in d:
        return IntLit(d["int"])
    if "bool" in d:
        return BoolLit(d["bool"])
    if "var" in d:
        return Var(d["var"])
    if "state" in d:
        return StateLit(d["state"])
    if "in" in d:
        return InState(d["in"])
    op, args = d["op"], [from_json(a) for a in d["args"]]
    if op == "neg":
        return Neg(args[0])
    if op == "not":
        return Not(args[0])
    if op == "=>":
        return Implies(*args)
    if op in ("and", "or", "one"):
        return {"and": And, "or": Or, "one": ExactlyOne}[op](tuple(args))
    return BinOp(op, *args)
