"""Broadcast elimination on a two-region controller.

Pressing the button in region Panel broadcasts Start, which moves the
Motor region from Off to On in the same step.
"""

from scvc import DischargeOptions, Invariants, discharge_all, parse_model
from scvc.model import format_tuple
from scvc.pipeline import expanded_tuples, firing_tuples, raw_tuples

MODEL = """
statechart controller
init Sys
var speed : int
state Sys and inv "speed >= 0" {
  region Panel xor {
    init Idle
    state Idle basic
    state Busy basic inv "speed > 0"
    on Press from Idle to Busy do { broadcast Start }
  }
  region Motor xor {
    init Off
    state Off basic inv "speed = 0"
    state On basic inv "speed > 0"
    on Start from Off to On do { speed := speed + 5 }
  }
}
"""


def main():
    model = parse_model(MODEL)
    inv = Invariants(model)
    print("before expansion:")
    for e, ts in firing_tuples(raw_tuples(model)).items():
        for t in ts:
            print(f"  {e}: {format_tuple(t, model, inv.state_var)}")
    print("after expansion:")
    for e, ts in firing_tuples(expanded_tuples(model)).items():
        for t in ts:
            print(f"  {e}: {format_tuple(t, model, inv.state_var)}")
    print(discharge_all(model, DischargeOptions(oracle=True, bound=20)).to_text())


if __name__ == "__main__":
    main()
