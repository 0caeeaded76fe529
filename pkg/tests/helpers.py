"""Independent scalar checks used as oracles by the tests."""

import itertools

from scvc.expr import And, Implies, evaluate, free_vars


def valuations(int_vars, sorts, bound):
    names = list(int_vars) + list(sorts)
    doms = [range(-bound, bound + 1)] * len(int_vars) + [sorts[v] for v in sorts]
    for combo in itertools.product(*doms):
        yield dict(zip(names, combo))


def brute_force(formula, int_vars, sorts, bound):
    """First falsifying valuation in scan order, or None; plain Python loops."""
    used = free_vars(formula)
    ints = [v for v in int_vars if v in used]
    sorts = {v: d for v, d in sorts.items() if v in used and d}
    for env in valuations(ints, sorts, bound):
        if not evaluate(formula, env):
            return env
    return None


def equivalent(a, b, int_vars, sorts, bound):
    both = And((Implies(a, b), Implies(b, a)))
    return brute_force(both, int_vars, sorts, bound) is None


def implies(a, b, int_vars, sorts, bound):
    return brute_force(Implies(a, b), int_vars, sorts, bound) is None
