"""Write the bundled case1/case2 scenario files.

The corridor parameters are fixed. The ring phase and occupancy are
chosen here:

* case1: the UAV enters the transit link at 2.8 s and meets an empty slot at
  31.44 s (t_in = 28.64 s); direct insertion, no hops.
* case2: entry at 2.8 s, insertion at 17.9 s (t_in = 15.1 s). Every slot in
  the window is occupied and the only empty slot sits two spacings ahead of
  the target, so two loitering UAVs hop.

Both choices are checked against the brute-force oracle before writing.
"""

import math
from pathlib import Path

from loiterlane import (CorridorConfig, ScenarioConfig, SlotRing, advance, classify_slots,
                        feasibility_window, oracle_plan, plan_insertion, save_scenario)

OUT = Path(__file__).resolve().parents[1] / "src" / "loiterlane" / "scenarios"

E_OFFSET, V_MAIN = 70.0, 25.0  # entry at 2.8 s


def phase_for(config, slot, t_target, t_entry):
    gamma = 2 * math.pi - t_target * config.v_loiter / config.r_loiter
    return (gamma - (slot - 1) * config.alpha - config.omega * t_entry) % (2 * math.pi)


def build(config, desired, t_in, occupied, tail):
    t_e = E_OFFSET / V_MAIN
    phase = phase_for(config, desired, t_in, t_e)
    sc = ScenarioConfig(config, tuple(occupied), phase, E_OFFSET, V_MAIN, 0.01, tail, 0)
    ring = advance(SlotRing.from_config(config, occupied, phase), t_e)
    timing = classify_slots(ring, feasibility_window(config), config)
    plan = plan_insertion(timing, feasibility_window(config), config)
    assert plan == oracle_plan(timing, feasibility_window(config), config)
    assert plan.desired_slot == desired and abs(plan.t_in - t_in) < 1e-9, plan
    print(plan.to_json())
    return sc


def main():
    case1 = CorridorConfig(8, 15.0, 35.0, 200.0, 80.0, 350.0, 58.5)
    sc1 = build(case1, desired=3, t_in=31.44 - 2.8, occupied=[1, 2, 4, 5, 6, 7], tail=13.56)
    case2 = CorridorConfig(6, 15.0, 35.0, 100.0, 80.0, 300.0, 50.0)
    sc2 = build(case2, desired=2, t_in=17.9 - 2.8, occupied=[1, 2, 3, 5, 6], tail=10.0)
    save_scenario(sc1, OUT / "case1.toml")
    save_scenario(sc2, OUT / "case2.toml")


if __name__ == "__main__":
    main()
