import logging

from hypothesis import given, settings, strategies as st

from helpers import equivalent, implies
from modelgen import random_model
from scvc import parse_model
from scvc.expr import TRUE, BinOp, ExactlyOne, InState, IntLit, Var, fmt
from scvc.invariants import Invariants, ai, ci, cl, encode_state_vars, sai, si, state_test


def text(e):
    return fmt(e)


def test_encoding_ex1(ex1):
    enc = encode_state_vars(ex1)
    assert enc.variables == {"root": "root", "R": "r", "A": "a", "B": "b"}
    assert enc.domains == {"root": ("R", "U"), "r": ("S",), "a": ("M",), "b": ("N",)}


def test_encoding_single_basic():
    m = parse_model("statechart t\ninit T\nstate T basic")
    assert encode_state_vars(m).variables == {"root": "root"}


def test_encoding_collision_warns(caplog):
    m = parse_model("statechart t\ninit Q\nstate Q xor { init A\n state A basic }\n"
                    "state q xor { init B\n state B basic }")
    with caplog.at_level(logging.WARNING):
        enc = encode_state_vars(m)
    assert enc.variables["Q"] == "q" and enc.variables["q"] == "q2"
    assert len(enc.warnings) == 1 and "q2" in caplog.text


def test_encoding_avoids_declared_variables():
    m = parse_model("statechart t\ninit R\nvar r : int\nstate R xor { init S\n state S basic }")
    assert encode_state_vars(m).variables["R"] == "r2"


def test_state_tests(ex1):
    assert text(state_test(ex1, "S")) == "r = S"
    assert text(state_test(ex1, "U")) == "root = U"
    assert state_test(ex1, "A") == TRUE


def test_si(ex1):
    assert text(si(ex1, "S")) == "r = S ∧ x ≤ 100"
    assert text(si(ex1, "U")) == "root = U ∧ x > 6"
    m = parse_model("statechart t\ninit Q\nstate Q xor { init T\n state T basic }")
    assert text(si(m, "T")) == "q = T"


def test_ci(ex1):
    assert text(ci(ex1, "U")) == "(root = U ∧ x > 6) ∧ ((a = M ∧ x < 111) ∧ (b = N ∧ x ≠ 15))"
    assert text(ci(ex1, "S")) == "r = S ∧ x ≤ 100"
    # a single-child exactly-one collapses to its argument
    assert text(ci(ex1, "R")) == "(root = R ∧ x > 1) ∧ (r = S ∧ x ≤ 100)"


def test_ci_of_xor_with_two_children(ex1):
    assert isinstance(ci(ex1, "root"), ExactlyOne)


def test_ai(ex1):
    assert text(ai(ex1, "S")) == "(root = R ∧ x > 1) ∧ (r = S ∧ x ≤ 100)"
    assert text(ai(ex1, "U")) == "(root = U ∧ x > 6) ∧ ((a = M ∧ x < 111) ∧ (b = N ∧ x ≠ 15))"
    m = parse_model("statechart t\ninit T\nstate T basic")
    assert text(ai(m, "T")) == "root = T"


def test_cl(ex1):
    assert cl(ex1, {"U", "M", "N"}) == {"U", "M", "N", "A", "B", "root"}
    assert cl(ex1, set()) == set()
    assert cl(ex1, {"S"}) == {"S", "R", "root"}


def test_sai_examples(ex1):
    inv = Invariants(ex1)
    sorts = inv.encoding.domains
    assert equivalent(sai(ex1, {"R", "S"}), ai(ex1, "S"), ["x"], sorts, 120)
    assert equivalent(sai(ex1, {"U", "M", "N"}), ai(ex1, "U"), ["x"], sorts, 120)
    assert sai(ex1, set()) == TRUE
    # the VC pre- and postcondition shapes come out verbatim
    assert text(sai(ex1, {"R", "S"})) == "(root = R ∧ x > 1) ∧ (r = S ∧ x ≤ 100)"
    assert text(sai(ex1, {"U", "M", "N"})) == \
        "(root = U ∧ x > 6) ∧ (a = M ∧ x < 111) ∧ (b = N ∧ x ≠ 15)"


def test_in_state_lowering(ex1):
    inv = Invariants(ex1)
    assert text(inv.lower(InState("M"))) == "root = U ∧ a = M"
    assert text(inv.lower(InState("S"))) == "root = R ∧ r = S"


@given(st.integers(0, 5000), st.data())
@settings(max_examples=80, deadline=None)
def test_cl_is_a_closure(seed, data):
    m = random_model(seed)
    names = m.state_names
    a = set(data.draw(st.lists(st.sampled_from(names), max_size=4)))
    b = a | set(data.draw(st.lists(st.sampled_from(names), max_size=3)))
    inv = Invariants(m)
    assert a <= inv.cl(a)
    assert inv.cl(inv.cl(a)) == inv.cl(a)
    assert inv.cl(a) <= inv.cl(b)


@given(st.integers(0, 5000))
@settings(max_examples=40, deadline=None)
def test_sai_singleton_matches_ai(seed):
    m = random_model(seed, n_vars=1)
    inv = Invariants(m)
    for s in m.state_names:
        assert equivalent(inv.sai([s]), inv.ai(s), m.variables, inv.encoding.domains, 3), s


@given(st.integers(0, 5000))
@settings(max_examples=40, deadline=None)
def test_si_implies_state_test(seed):
    m = random_model(seed, n_vars=1)
    inv = Invariants(m)
    for s in m.state_names:
        assert implies(inv.si(s), inv.state_test(s), m.variables, inv.encoding.domains, 3)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.randoms())
@settings(max_examples=100, deadline=None)
def test_exactly_one_laws(ks, rnd):
    args = [BinOp(">", Var("x"), IntLit(k)) for k in ks]
    shuffled = list(args)
    rnd.shuffle(shuffled)
    assert equivalent(ExactlyOne(tuple(args)), ExactlyOne(tuple(shuffled)), ["x"], {}, 6)
    assert equivalent(ExactlyOne((args[0],)), args[0], ["x"], {}, 6)
