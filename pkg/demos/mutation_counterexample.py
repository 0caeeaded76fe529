"""Weaken an invariant of ex1 and watch the checker produce a counterexample.

Tightening N's invariant to ``x != 12`` breaks E: from S with x = 2 the
transition adds 10 and lands in N with x = 12.
"""

import sys
from importlib import resources

from scvc import DischargeOptions, discharge_all, parse_model


def main(solver=None):
    text = resources.files("scvc").joinpath("data", "ex1.sch").read_text()
    for inv in ("x != 15", "x != 12", "x != 11"):
        model = parse_model(text.replace("x != 15", inv))
        opts = DischargeOptions(solver=solver, oracle=True, bound=200)
        r = discharge_all(model, opts).results[0]
        cex = f" counterexample {r.counterexample}" if r.counterexample else ""
        print(f"N inv {inv!r}: {r.vc.id} {r.status}{cex}")


if __name__ == "__main__":
    # optional solver command, e.g. "z3 {file}"
    main(sys.argv[1] if len(sys.argv) > 1 else None)
