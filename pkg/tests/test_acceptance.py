"""Acceptance criteria, one test each, each printing a PASS/FAIL line with its runtime."""

import contextlib
import itertools
import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from conftest import Z3
from helpers import equivalent
from modelgen import random_model
from scvc import parse_model
from scvc.discharge import DischargeOptions, bounded_oracle, discharge_all, falsifies
from scvc.discharge import discharge_vc, standalone_vc
from scvc.errors import CyclicBroadcast
from scvc.expr import TRUE, And, BinOp, Implies, IntLit, Not, Var, conjuncts, fmt
from scvc.invariants import Invariants
from scvc.model import (SKIP, Assign, Bcast, Par, StateAssign, VTuple, canonical_stmt,
                        canonical_tuple, normalize, walk_stmt)
from scvc.pipeline import canonical_firing, expanded_tuples, firing_tuples, tuples_for
from scvc.vcgen import par_prod, topo_sort_events, vseq_no_bcast


@contextlib.contextmanager
def criterion(capsys, n, title, limit):
    start = time.perf_counter()
    try:
        yield
        took = time.perf_counter() - start
        assert took < limit, f"took {took:.2f}s, limit {limit}s"
    except BaseException as exc:
        took = time.perf_counter() - start
        with capsys.disabled():
            print(f"\nFAIL criterion {n}: {title} ({took:.2f}s): {exc}")
        raise
    with capsys.disabled():
        print(f"\nPASS criterion {n}: {title} ({took:.2f}s < {limit}s)")


# 1 --------------------------------------------------------------------------------

def test_criterion_1_golden_invariants(ex1_text, capsys):
    with criterion(capsys, 1, "golden ai(S) and ai(U)", 1.0):
        inv = Invariants(parse_model(ex1_text))
        assert fmt(inv.ai("S")) == "(root = R ∧ x > 1) ∧ (r = S ∧ x ≤ 100)"
        assert fmt(inv.ai("U")) == \
            "(root = U ∧ x > 6) ∧ ((a = M ∧ x < 111) ∧ (b = N ∧ x ≠ 15))"


# 2 --------------------------------------------------------------------------------

def test_criterion_2_golden_tuple(ex1_text, capsys):
    with criterion(capsys, 2, "single firing tuple for E", 1.0):
        m = parse_model(ex1_text)
        [t] = firing_tuples(tuples_for(m, "semantics"))["E"]
        x = Var("x")
        assert t.sources == {"R", "S"} and t.targets == {"U", "M", "N"}
        assert t.guard == BinOp("!=", x, IntLit(5))
        want = Par((Assign("x", BinOp("+", x, IntLit(10))), StateAssign("U"),
                    StateAssign("M"), StateAssign("N")))
        assert canonical_stmt(normalize(t.action)) == canonical_stmt(want)


# 3 --------------------------------------------------------------------------------

def _e_result(model, opts):
    return discharge_all(model, opts).results[0]


def test_criterion_3_vc_validity(ex1_text, capsys):
    limit = 5.0 if Z3 else 2.0
    with criterion(capsys, 3, "E's VC valid, x != 11 mutation invalid with x = 1", limit):
        m = parse_model(ex1_text)
        assert _e_result(m, DischargeOptions(oracle=True, bound=200)).status == "valid"
        if Z3:
            assert _e_result(m, DischargeOptions(solver="z3 {file}")).status == "valid"
        mutated = parse_model(ex1_text.replace("x != 15", "x != 11"))
        backends = [DischargeOptions(oracle=True, bound=200)]
        if Z3:
            backends.append(DischargeOptions(solver="z3 {file}"))
        for opts in backends:
            r = _e_result(mutated, opts)
            assert r.status == "invalid", \
                f"{r.solver or 'oracle'} reports {r.status} for the x != 11 mutation"
            assert r.counterexample["x"] == 1


# 4 --------------------------------------------------------------------------------

VOCAB = ("x", "y", "z")
atom = st.builds(lambda op, v, k: BinOp(op, Var(v), IntLit(k)),
                 st.sampled_from(["<", ">", "=", "!="]), st.sampled_from(VOCAB),
                 st.integers(-3, 3))
guard = st.lists(atom, min_size=0, max_size=2).map(
    lambda a: a[0] if len(a) == 1 else And(tuple(a)) if a else TRUE)
action = st.one_of(st.just(SKIP), st.builds(
    lambda v, k: Assign(v, BinOp("+", Var(v), IntLit(k))), st.sampled_from(VOCAB),
    st.integers(-3, 3)))
vtuple = st.builds(lambda s, g, a: VTuple(frozenset(s), g, a, ()),
                   st.sets(st.sampled_from("ABC"), max_size=2), guard, action)
tuple_sets = st.lists(st.lists(vtuple, min_size=1, max_size=3), min_size=1, max_size=4)

_c4 = {"cases": 0}


@given(tuple_sets)
@settings(max_examples=1000, deadline=None, database=None)
def _product_laws(tss):
    _c4["cases"] += 1
    out = par_prod(tss, dedup=False)
    expect = 1
    for s in tss:
        expect *= len(s)
    assert len(out) == expect
    for t, combo in zip(out, itertools.product(*tss)):
        want = [c for f in combo for c in conjuncts(f.guard)]
        assert frozenset(conjuncts(t.guard)) == frozenset(want)
        assert t.sources == frozenset().union(*(f.sources for f in combo))


def test_criterion_4_product_laws(capsys):
    with criterion(capsys, 4, "parProd cardinality and guard conjunction", 10.0):
        _c4["cases"] = 0
        _product_laws()
        assert _c4["cases"] >= 1000, _c4["cases"]


# 5 --------------------------------------------------------------------------------

@st.composite
def broadcast_graphs(draw, cyclic=False):
    n = draw(st.integers(2 if cyclic else 1, 5))
    events = [f"E{i}" for i in range(n)]
    order = draw(st.permutations(events))
    rank = {e: i for i, e in enumerate(order)}
    m = {}
    for e in events:
        ts = []
        for _ in range(draw(st.integers(0, 3))):
            later = [f for f in events if rank[f] > rank[e]]
            sent = draw(st.lists(st.sampled_from(later), max_size=2, unique=True)) if later else []
            ts.append(VTuple(frozenset(draw(st.sets(st.sampled_from("ABC"), max_size=1))),
                             BinOp(">", Var("x"), IntLit(draw(st.integers(-2, 2)))),
                             Par(tuple([Assign("x", IntLit(rank[e]))] + [Bcast(f) for f in sent])),
                             ()))
        m[e] = ts
    if cyclic:
        # a two-way broadcast between the first and last events closes a loop
        a, b = order[0], order[-1]
        m[a] = m[a] + [VTuple(frozenset(), BinOp(">", Var("x"), IntLit(0)), Bcast(b), ())]
        m[b] = m[b] + [VTuple(frozenset(), BinOp(">", Var("x"), IntLit(0)), Bcast(a), ())]
    return m


_c5 = {"cases": 0}


@given(broadcast_graphs())
@settings(max_examples=500, deadline=None, database=None)
def _broadcast_elimination(graph):
    _c5["cases"] += 1
    for _, ts in vseq_no_bcast(topo_sort_events(graph)):
        for t in ts:
            assert not any(isinstance(s, Bcast) for s in walk_stmt(t.action))


@given(broadcast_graphs(cyclic=True))
@settings(max_examples=200, deadline=None, database=None)
def _cyclic_rejected(graph):
    with pytest.raises(CyclicBroadcast):
        vseq_no_bcast(topo_sort_events(graph))


def test_criterion_5_broadcast_elimination(capsys):
    with criterion(capsys, 5, "vseqNoBcast removes broadcasts, cycles rejected", 10.0):
        _c5["cases"] = 0
        _broadcast_elimination()
        _cyclic_rejected()
        assert _c5["cases"] >= 500, _c5["cases"]


# 6 --------------------------------------------------------------------------------

def test_criterion_6_sai_ai_equivalence(capsys):
    with criterion(capsys, 6, "sai({s}) <=> ai(s) on 50 random models, B = 8", 30.0):
        checked = 0
        for seed in range(50):
            m = random_model(seed, max_depth=4, max_states=12, n_vars=1)
            inv = Invariants(m)
            for s in m.state_names:
                assert equivalent(inv.sai([s]), inv.ai(s), m.variables,
                                  inv.encoding.domains, 8), (seed, s)
                checked += 1
        assert checked > 50


# 7 --------------------------------------------------------------------------------

def _verdicts(model, tuples, opts):
    report = discharge_all(model, opts, tuples=tuples)
    firing = {}
    for r in report.results:
        if r.vc.tuple.action != SKIP or r.vc.tuple.targets:
            firing[(r.vc.event, canonical_tuple(r.vc.tuple))] = r.status
    return firing, sorted({r.status for r in report.results})


def test_criterion_7_cross_path_agreement(ex1, capsys):
    with criterion(capsys, 7, "semantics and event-code paths agree on ex1 + 25 models", 30.0):
        opts = DischargeOptions(oracle=True, bound=6)
        models = [ex1] + [random_model(1000 + s) for s in range(25)]
        for m in models:
            sem = expanded_tuples(m, "semantics")
            code = expanded_tuples(m, "event-code")
            assert canonical_firing(sem) == canonical_firing(code), m.name
            fs, all_s = _verdicts(m, sem, opts)
            fc, all_c = _verdicts(m, code, opts)
            assert fs == fc, m.name
            assert all_s == all_c, m.name


# 8 --------------------------------------------------------------------------------

def _random_term(rnd):
    v = Var(rnd.choice("xy"))
    kind = rnd.randrange(3)
    if kind == 0:
        return v
    if kind == 1:
        return BinOp(rnd.choice("+-"), v, IntLit(rnd.randint(-5, 5)))
    return BinOp("+", BinOp("*", IntLit(rnd.randint(-2, 2)), Var("x")), Var("y"))


def _random_atom(rnd):
    return BinOp(rnd.choice(["<", "<=", ">", ">=", "=", "!="]), _random_term(rnd),
                 IntLit(rnd.randint(-8, 8)))


def _random_body(rnd, depth=2):
    if depth == 0 or rnd.random() < 0.3:
        return _random_atom(rnd)
    k = rnd.randrange(3)
    if k == 0:
        return And(tuple(_random_body(rnd, depth - 1) for _ in range(2)))
    if k == 1:
        return Implies(_random_body(rnd, depth - 1), _random_body(rnd, depth - 1))
    return Not(_random_body(rnd, depth - 1))


def random_bounded_vc(seed):
    rnd = random.Random(seed)
    x, y = Var("x"), Var("y")
    box = And((BinOp(">=", x, IntLit(-8)), BinOp("<=", x, IntLit(8)),
               BinOp(">=", y, IntLit(-8)), BinOp("<=", y, IntLit(8))))
    return standalone_vc(Implies(box, _random_body(rnd)), ["x", "y"], id=f"r{seed}")


def test_criterion_8_oracle_solver_agreement(capsys):
    label = "z3 vs oracle B = 16" if Z3 else "oracle B = 16 vs B = 32 (no solver installed)"
    with criterion(capsys, 8, f"100 random bounded VCs, {label}", 60.0):
        statuses = []
        for seed in range(100):
            vc = random_bounded_vc(seed)
            o = bounded_oracle(vc, 16)
            if Z3:
                other = discharge_vc(vc, DischargeOptions(solver="z3 {file}"))
                if other.status == "unknown":
                    continue
                assert other.status == o.status, (seed, fmt(vc.formula))
                if other.status == "invalid":
                    assert falsifies(vc, other.counterexample)
            else:
                assert bounded_oracle(vc, 32).status == o.status, seed
            statuses.append(o.status)
        # both outcomes are represented
        assert {"valid", "invalid"} <= set(statuses)
