"""Walk the bundled ex1 model through every stage of the pipeline.

Run with ``python3 demos/walkthrough_ex1.py``.
"""

from scvc import DischargeOptions, Invariants, discharge_all, example, tuples_for
from scvc.discharge import emit_smt
from scvc.expr import fmt
from scvc.model import format_tuple
from scvc.pipeline import firing_tuples


def main():
    model = example("ex1")
    inv = Invariants(model)

    print("state variables:", inv.encoding.variables)
    for s in ("S", "U"):
        print(f"ai({s}) = {fmt(inv.ai(s))}")

    # tuples that actually change something
    for event, ts in firing_tuples(tuples_for(model)).items():
        for t in ts:
            print(f"{event}: {format_tuple(t, model, inv.state_var)}")

    report = discharge_all(model, DischargeOptions(oracle=True, bound=200))
    first = report.results[0]
    print("\nSMT-LIB for", first.vc.id)
    print(emit_smt(first.vc))
    print(report.to_text())


if __name__ == "__main__":
    main()
