"""Front end: statechart DSL and expression parsing, well-formedness checks.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    model      := "statechart" ID "init" ID (vardecl | statedecl | transdecl)*
    vardecl    := "var" ID ":" "int"
    statedecl  := "state" ID kind ["inv" STRING] [block]
    kind       := "basic" | "xor" | "and"
    block      := "{" ["init" ID] (statedecl | regiondecl | transdecl)* "}"
    regiondecl := "region" ID "xor" ["inv" STRING] block
    transdecl  := ("on" ID | "always") "from" ID "to" ID
                  ["when" STRING] ["do" "{" stmt (";" stmt)* "}"]
    stmt       := ID ":=" expr | "broadcast" ID | "skip"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import Diagnostic, ExprSyntaxError, ExprTypeError, ModelError
from .expr import (CMP_OPS, TRUE, And, BinOp, BoolLit, ExactlyOne, Expr, Implies,
                   InState, IntLit, Neg, Not, Or, Var, fmt, typecheck)
from .model import (EPSILON, ROOT, SKIP, AndState, Assign, Basic, Bcast, Seq,
                    StatechartModel, Statement, Transition, XorState, iter_states,
                    walk_stmt)


@dataclass(frozen=True)
class Token:
    kind: str  # ID INT STRING OP EOF
    value: str
    line: int
    col: int
    offset: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<STRING>"[^"\n]*")
  | (?P<INT>\d+)
  | (?P<ID>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<OP>:=|==|!=|<=|>=|=>|&&|[{}();:,+\-*=<>!≠≤≥∧∨¬⇒])
""", re.VERBOSE)

RESERVED = frozenset({"and", "or", "not", "implies", "true", "false", "in", "one"})

_OP_ALIASES = {"==": "=", "≠": "!=", "≤": "<=", "≥": ">=", "∧": "and", "&&": "and",
               "∨": "or", "¬": "not", "!": "not", "⇒": "=>", "implies": "=>"}


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _SyntaxError(f"unexpected character {text[pos]!r}", line, col, pos)
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                if kind == "OP" or (kind == "ID" and value == "implies"):
                    value = _OP_ALIASES.get(value, value)
                    if value in ("and", "or", "not", "=>"):
                        kind = "OP"
                toks.append(Token(kind, value, line, col, pos))
            col += len(m.group())
        pos = m.end()
    toks.append(Token("EOF", "", line, col, pos))
    return toks


class _SyntaxError(Exception):
    def __init__(self, message, line, col, offset=0):
        super().__init__(message)
        self.line, self.col, self.offset = line, col, offset


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, value, kind=None) -> bool:
        t = self.tok
        if kind is not None and t.kind != kind:
            return False
        return t.value == value and t.kind in ("ID", "OP")

    def accept(self, value) -> bool:
        if self.peek(value):
            self.i += 1
            return True
        return False

    def error(self, message, tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "EOF" else repr(tok.value)
        raise _SyntaxError(f"{message}, found {found}", tok.line, tok.col, tok.offset)

    def expect(self, value) -> Token:
        t = self.tok
        if not self.peek(value):
            self.error(f"expected {value!r}")
        self.i += 1
        return t

    def ident(self, what="identifier") -> Token:
        t = self.tok
        if t.kind != "ID":
            self.error(f"expected {what}")
        self.i += 1
        return t

    # -- expressions: not > arith > comparison > and > or > implies

    def expr(self) -> Expr:
        left = self.disjunction()
        if self.accept("=>"):
            return Implies(left, self.expr())
        return left

    def disjunction(self) -> Expr:
        args = [self.conjunction()]
        while self.accept("or"):
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Expr:
        args = [self.comparison()]
        while self.accept("and"):
            args.append(self.comparison())
        return args[0] if len(args) == 1 else And(tuple(args))

    def comparison(self) -> Expr:
        left = self.additive()
        t = self.tok
        if t.kind == "OP" and t.value in CMP_OPS:
            self.i += 1
            right = self.additive()
            if self.tok.kind == "OP" and self.tok.value in CMP_OPS:
                self.error("comparisons do not chain")
            return BinOp(t.value, left, right)
        return left

    def additive(self) -> Expr:
        left = self.multiplicative()
        while self.tok.kind == "OP" and self.tok.value in ("+", "-"):
            op = self.tok.value
            self.i += 1
            left = BinOp(op, left, self.multiplicative())
        return left

    def multiplicative(self) -> Expr:
        left = self.unary()
        while self.accept("*"):
            left = BinOp("*", left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.accept("not"):
            return Not(self.unary())
        if self.accept("-"):
            arg = self.unary()
            return IntLit(-arg.value) if isinstance(arg, IntLit) else Neg(arg)
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return IntLit(int(t.value))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ID":
            self.i += 1
            if t.value == "true":
                return BoolLit(True)
            if t.value == "false":
                return BoolLit(False)
            if t.value == "in" and self.peek("("):
                self.expect("(")
                s = self.ident("state name")
                self.expect(")")
                return InState(s.value)
            if t.value == "one" and self.peek("("):
                self.expect("(")
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                return ExactlyOne(tuple(args))
            return Var(t.value)
        self.error("expected expression")

    # -- statements

    def stmt(self) -> Statement:
        if self.accept("skip"):
            return SKIP
        if self.accept("broadcast"):
            return Bcast(self.ident("event name").value)
        lhs = self.ident("assignment target")
        self.expect(":=")
        return Assign(lhs.value, self.expr())

    def stmts(self) -> Statement:
        body = [self.stmt()]
        while self.accept(";"):
            body.append(self.stmt())
        return body[0] if len(body) == 1 else Seq(tuple(body))


def _parse_whole(text, rule, line=1, col=1):
    p = _Parser(tokenize(text, line, col))
    result = getattr(p, rule)()
    if p.tok.kind != "EOF":
        p.error("unexpected trailing input")
    return result


def parse_expression(text: str) -> Expr:
    """Parse expression text; raises :class:`ExprSyntaxError`."""
    try:
        return _parse_whole(text, "expr")
    except _SyntaxError as exc:
        raise ExprSyntaxError(str(exc), exc.offset) from None


def parse_statement(text: str) -> Statement:
    """Parse ``stmt (";" stmt)*`` as written inside a ``do`` block."""
    try:
        return _parse_whole(text, "stmts")
    except _SyntaxError as exc:
        raise ExprSyntaxError(str(exc), exc.offset) from None


# -- models ---------------------------------------------------------------------

class _ModelParser(_Parser):
    def __init__(self, tokens):
        super().__init__(tokens)
        self.structural: list[Diagnostic] = []

    def diag(self, message, tok):
        self.structural.append(Diagnostic("error", message, tok.line, tok.col))

    def string_expr(self) -> Expr:
        t = self.tok
        if t.kind != "STRING":
            self.error("expected quoted expression")
        self.i += 1
        # the payload starts one column after the opening quote
        return _parse_whole(t.value[1:-1], "expr", t.line, t.col + 1)

    def model(self) -> StatechartModel:
        self.expect("statechart")
        name = self.ident("model name").value
        init_tok = self.tok
        self.expect("init")
        init = self.ident("initial state").value
        variables, var_locs, states, transitions = [], [], [], []
        while self.tok.kind != "EOF":
            if self.peek("var"):
                self.expect("var")
                v = self.ident("variable name")
                self.expect(":")
                self.expect("int")
                variables.append(v.value)
                var_locs.append((v.line, v.col))
            elif self.peek("state"):
                states.append(self.state())
            elif self.peek("on") or self.peek("always"):
                transitions.append(self.transition())
            elif self.peek("region"):
                self.error("region declarations belong inside an and-state")
            else:
                self.error("expected 'var', 'state', 'on' or 'always'")
        root = XorState(ROOT, tuple(states), init, tuple(transitions),
                        loc=(init_tok.line, init_tok.col))
        return StatechartModel(name, root, tuple(variables), tuple(var_locs))

    def state(self):
        self.expect("state")
        tok = self.ident("state name")
        kind = self.tok
        if not (self.peek("basic") or self.peek("xor") or self.peek("and")):
            self.error("expected state kind 'basic', 'xor' or 'and'")
        self.i += 1
        return self._state_body(tok, kind.value)

    def region(self):
        self.expect("region")
        tok = self.ident("region name")
        self.expect("xor")
        if not (self.peek("inv") or self.peek("{")):
            self.error("expected region block")
        return self._state_body(tok, "xor", need_block=True)

    def _state_body(self, tok, kind, need_block=False):
        inv = TRUE
        if self.accept("inv"):
            inv = self.string_expr()
        loc = (tok.line, tok.col)
        init, kids, trans = None, [], []
        has_block = self.peek("{")
        if need_block and not has_block:
            self.error("expected '{'")
        if has_block:
            brace = self.expect("{")
            if kind == "basic":
                self.diag(f"basic state {tok.value} cannot have a body", brace)
            if self.peek("init"):
                it = self.expect("init")
                init = self.ident("initial state").value
                if kind != "xor":
                    self.diag(f"init is only allowed in xor states ({tok.value})", it)
            while not self.accept("}"):
                if self.peek("state"):
                    kids.append(self.state())
                elif self.peek("region"):
                    rt = self.tok
                    kids.append(self.region())
                    if kind != "and":
                        self.diag(f"regions are only allowed in and-states ({tok.value})", rt)
                elif self.peek("on") or self.peek("always"):
                    tt = self.tok
                    trans.append(self.transition())
                    if kind != "xor":
                        self.diag(f"transition endpoints not siblings: transitions "
                                  f"inside {kind}-state {tok.value} have no owning xor", tt)
                else:
                    self.error("expected 'state', 'region', 'on', 'always' or '}'")
        if kind == "basic":
            return Basic(tok.value, inv, loc=loc)
        if kind == "and":
            return AndState(tok.value, tuple(kids), inv, loc=loc)
        if init is None and len(kids) == 1:
            init = kids[0].id
        return XorState(tok.value, tuple(kids), init, tuple(trans), inv, loc=loc)

    def transition(self) -> Transition:
        start = self.tok
        if self.accept("always"):
            event = EPSILON
        else:
            self.expect("on")
            event = self.ident("event name").value
        self.expect("from")
        src = self.ident("source state").value
        self.expect("to")
        dst = self.ident("target state").value
        guard = TRUE
        action = SKIP
        if self.accept("when"):
            guard = self.string_expr()
        if self.accept("do"):
            self.expect("{")
            action = self.stmts()
            self.expect("}")
        return Transition(src, event, guard, action, dst, loc=(start.line, start.col))


def parse_model(text: str) -> StatechartModel:
    """Parse and check a model; raises :class:`ModelError` with diagnostics."""
    p = _ModelParser(None)
    try:
        p.toks = tokenize(text)
        model = p.model()
    except _SyntaxError as exc:
        raise ModelError([Diagnostic("error", f"syntax error: {exc}", exc.line, exc.col)])
    diags = p.structural + check_well_formed(model)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise ModelError(sorted(errors, key=lambda d: (d.line, d.column)))
    return model


def check_well_formed(model: StatechartModel) -> list[Diagnostic]:
    """Structural and typing checks; returns diagnostics, never raises."""
    diags: list[Diagnostic] = []

    def err(msg, loc):
        line, col = loc or (0, 0)
        diags.append(Diagnostic("error", msg, line, col))

    seen = {ROOT: model.root.loc}
    all_states = list(iter_states(model.root))
    for s in all_states[1:]:
        if s.id in seen:
            err(f"duplicate state name {s.id}", s.loc)
        else:
            seen[s.id] = s.loc

    var_types = {}
    for v, loc in zip(model.variables, model.var_locs or [None] * len(model.variables)):
        if v in var_types:
            err(f"duplicate variable {v}", loc)
        if v in RESERVED:
            err(f"{v} is reserved and cannot name a variable", loc)
        var_types[v] = "int"
    state_types = {s.id: None for s in all_states}
    events = set(model.events)

    def check_expr(e, want, where, loc):
        try:
            got = typecheck(e, var_types, state_types)
        except ExprTypeError as exc:
            err(f"type error in {where}: {exc}", loc)
            return
        if got != want:
            err(f"type error in {where}: {fmt(e, ascii=True)} is {got}, expected {want}", loc)

    for s in all_states:
        check_expr(s.invariant, "bool", f"invariant of {s.id}", s.loc)
        if isinstance(s, (AndState, XorState)) and not s.children:
            err(f"{s.id} must have at least one child", s.loc)
        if isinstance(s, XorState):
            kids = {c.id for c in s.states}
            if s.children:
                if s.init is None:
                    err(f"xor state {s.id} has no init", s.loc)
                elif s.init not in kids:
                    what = ("is not a direct child of" if s.init in state_types
                            else "is unknown in")
                    err(f"unknown init target {s.init}: {what} {s.id}", s.loc)
            for t in s.transitions:
                for end in (t.source, t.target):
                    if end not in state_types:
                        err(f"unknown state {end} in transition {t}", t.loc)
                    elif end not in kids:
                        err(f"transition endpoints not siblings: {end} is not a "
                            f"child of {s.id} ({t})", t.loc)
                check_expr(t.guard, "bool", f"guard of {t}", t.loc)
                for st in walk_stmt(t.action):
                    if isinstance(st, Assign):
                        if st.var not in var_types:
                            err(f"undeclared variable {st.var} in {t}", t.loc)
                        check_expr(st.expr, "int", f"assignment to {st.var}", t.loc)
                    elif isinstance(st, Bcast) and st.event not in events:
                        err(f"unknown event {st.event}", t.loc)
    return diags


# -- printing -------------------------------------------------------------------

def format_model(model: StatechartModel) -> str:
    """Render a model back to DSL text accepted by :func:`parse_model`."""
    out = [f"statechart {model.name}", f"init {model.root.init}"]
    out += [f"var {v} : int" for v in model.variables]

    def inv(s):
        return "" if s.invariant == TRUE else f' inv "{fmt(s.invariant, ascii=True)}"'

    def trans(t, ind):
        trig = f"on {t.event}" if t.event else "always"
        line = f"{ind}{trig} from {t.source} to {t.target}"
        if t.guard != TRUE:
            line += f' when "{fmt(t.guard, ascii=True)}"'
        if t.action != SKIP:
            body = t.action.stmts if isinstance(t.action, Seq) else (t.action,)
            line += " do { " + "; ".join(_fmt_simple(s) for s in body) + " }"
        return line

    def state(s, ind, in_and=False):
        if isinstance(s, Basic):
            out.append(f"{ind}state {s.id} basic{inv(s)}")
            return
        if isinstance(s, XorState) and in_and:
            out.append(f"{ind}region {s.id} xor{inv(s)} {{")
        else:
            kind = "xor" if isinstance(s, XorState) else "and"
            out.append(f"{ind}state {s.id} {kind}{inv(s)} {{")
        if isinstance(s, XorState):
            out.append(f"{ind}  init {s.init}")
        for c in s.children:
            state(c, ind + "  ", isinstance(s, AndState))
        if isinstance(s, XorState):
            out.extend(trans(t, ind + "  ") for t in s.transitions)
        out.append(f"{ind}}}")

    for s in model.root.states:
        state(s, "")
    out.extend(trans(t, "") for t in model.root.transitions)
    return "\n".join(out) + "\n"


def _fmt_simple(st: Statement) -> str:
    if st == SKIP:
        return "skip"
    if isinstance(st, Bcast):
        return f"broadcast {st.event}"
    if isinstance(st, Assign):
        return f"{st.var} := {fmt(st.expr, ascii=True)}"
    raise ValueError(f"statement {st!r} has no DSL form")
