import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loiterlane import (CorridorConfig, HopTooSlow, InsertionPlan, NoFeasibleSlot, SlotRing,
                        classify_slots, feasibility_window, hop_time, load_scenario, oracle_plan,
                        plan_insertion, speed_commands, transit_distance)
from loiterlane.sweep import entry_timing
from conftest import CASE1, CASE2

TWO_PI = 2 * math.pi


def ring_with_slot_at(cfg, slot, t_arrival, occupied):
    """Ring whose ``slot`` reaches the insertion point after ``t_arrival`` seconds."""
    gamma = TWO_PI - t_arrival * cfg.v_loiter / cfg.r_loiter
    return SlotRing.from_config(cfg, occupied, gamma - (slot - 1) * cfg.alpha)


def solve(cfg, ring, fn=plan_insertion):
    w = feasibility_window(cfg)
    return fn(classify_slots(ring, w, cfg), w, cfg)


def test_direct_insertion_picks_earliest_empty_feasible():
    ring = ring_with_slot_at(CASE1, 3, 20.0, occupied=[1, 2])
    plan = solve(CASE1, ring)
    assert plan.desired_slot == 3 and plan.hop_slots == ()
    assert plan.t_in == pytest.approx(20.0, abs=1e-9)
    assert plan.v_in == pytest.approx(transit_distance(CASE1) / 20.0)
    assert CASE1.v_min <= plan.v_in <= CASE1.v_max


def test_case2_bundled_plan_hops_two():
    timing, w = entry_timing(load_scenario("case2"))
    plan = plan_insertion(timing, w, CASE2)
    assert plan.desired_slot == 2
    assert plan.hop_slots == (3, 2)
    assert plan.t_in == pytest.approx(15.1, abs=1e-9)
    assert plan.t_hop == pytest.approx(TWO_PI * 100 / (6 * 20), rel=1e-12)
    assert plan == oracle_plan(timing, w, CASE2)


def test_case1_bundled_plan_direct():
    timing, w = entry_timing(load_scenario("case1"))
    plan = plan_insertion(timing, w, CASE1)
    assert (plan.desired_slot, plan.hop_slots) == (3, ())
    assert plan.t_in == pytest.approx(28.64, abs=1e-9)


def test_full_ring_has_no_feasible_slot():
    ring = SlotRing.from_config(CASE2, range(1, 7), phase0=0.4)
    with pytest.raises(NoFeasibleSlot):
        solve(CASE2, ring)
    with pytest.raises(NoFeasibleSlot):
        solve(CASE2, ring, oracle_plan)


def test_hop_too_slow():
    cfg = CorridorConfig(6, 15.0, 16.0, 100.0, 80.0, 0.0, 50.0)
    w = feasibility_window(cfg)
    assert hop_time(cfg) >= w.t_min
    ring = ring_with_slot_at(cfg, 1, 0.5 * (w.t_min + w.t_max), occupied=[1])
    with pytest.raises(HopTooSlow):
        solve(cfg, ring)
    # the same corridor still plans a direct insertion when nothing needs to move
    assert solve(cfg, ring_with_slot_at(cfg, 1, 0.5 * (w.t_min + w.t_max), [])).hop_slots == ()


def test_hop_time_infinite_when_loiter_at_vmax():
    cfg = CorridorConfig(6, 15.0, 35.0, 100.0, 80.0, 300.0, 50.0, v_loiter=35.0)
    assert hop_time(cfg) == math.inf


def test_two_slot_ring():
    cfg = CorridorConfig.design(2, 50.0, 15.0, 35.0, 80.0)
    assert cfg.r_loiter == pytest.approx(25.0)
    w = feasibility_window(cfg)
    t_mid = 0.5 * (w.t_min + w.t_max)
    plan = solve(cfg, ring_with_slot_at(cfg, 1, t_mid, occupied=[1]))
    # slot 2 is half a revolution earlier than t_mid, outside the window here
    assert t_mid - math.pi * cfg.r_loiter / cfg.v_loiter < w.t_min
    assert (plan.desired_slot, plan.hop_slots) == (1, (1,))
    assert plan == solve(cfg, ring_with_slot_at(cfg, 1, t_mid, [1]), oracle_plan)
    with pytest.raises(NoFeasibleSlot):
        solve(cfg, SlotRing.from_config(cfg, [1, 2], 0.0))


def test_empty_window_raises_even_with_free_slots():
    cfg = CorridorConfig(6, 15.0, 20.0, 100.0, 80.0, 0.0, 50.0)
    w = feasibility_window(cfg)
    for phase in np.linspace(0, cfg.alpha, 361):
        timing = classify_slots(SlotRing.from_config(cfg, [], phase), w, cfg)
        if not timing.s_f:
            with pytest.raises(NoFeasibleSlot):
                plan_insertion(timing, w, cfg)
            return
    pytest.fail("no phase produced an empty feasible set")


def test_speed_commands_timer():
    plan = InsertionPlan(2, 15.1, transit_distance(CASE2) / 15.1, (3, 2), hop_time(CASE2))
    during = speed_commands(plan, 0.0, CASE2)
    assert during.v_incoming == pytest.approx(transit_distance(CASE2) / 15.1)
    assert list(during.v_loiter_each) == [15, 35, 35, 15, 15, 15]
    assert list(speed_commands(plan, plan.t_hop, CASE2).v_loiter_each) == [15, 35, 35, 15, 15, 15]
    after = speed_commands(plan, np.nextafter(plan.t_hop, math.inf), CASE2)
    assert list(after.v_loiter_each) == [15] * 6


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0, TWO_PI, exclude_max=True),
       st.lists(st.booleans(), min_size=6, max_size=6))
def test_speed_commands_touch_only_hop_slots(t_frac, phase, occ):
    ring = SlotRing(6, phase, CASE2.omega, tuple(occ))
    try:
        plan = solve(CASE2, ring)
    except NoFeasibleSlot:
        return
    t = t_frac * 2 * plan.t_hop
    v = speed_commands(plan, t, CASE2).v_loiter_each
    for i in range(1, 7):
        expect = CASE2.v_max if (i in plan.hop_slots and t <= plan.t_hop) else CASE2.v_min
        assert v[i - 1] == expect


@settings(max_examples=500, deadline=None)
@given(st.sampled_from([CASE1, CASE2]), st.floats(0, TWO_PI, exclude_max=True),
       st.lists(st.booleans(), min_size=8, max_size=8))
def test_hop_chain_frees_the_desired_slot(cfg, phase, occ):
    n = cfg.n_slots
    occ = tuple(occ[:n])
    ring = SlotRing(n, phase, cfg.omega, occ)
    w = feasibility_window(cfg)
    timing = classify_slots(ring, w, cfg)
    try:
        plan = plan_insertion(timing, w, cfg)
    except NoFeasibleSlot:
        with pytest.raises(NoFeasibleSlot):
            oracle_plan(timing, w, cfg)
        return
    assert plan == oracle_plan(timing, w, cfg)
    assert w.t_min < plan.t_in < w.t_max
    if not plan.hop_slots:
        assert not occ[plan.desired_slot - 1]
        return
    hops = plan.hop_slots
    assert all(occ[s - 1] for s in hops)
    assert hops[-1] == plan.desired_slot
    target = hops[0] % n + 1
    assert not occ[target - 1]
    # every hopper moves one slot ahead; the desired slot ends up free
    after = list(occ)
    for s in hops:
        after[s % n] = True
    after[plan.desired_slot - 1] = False
    assert sum(after) == sum(occ)
    assert not after[plan.desired_slot - 1]


def test_plan_json_round_trip():
    plan = InsertionPlan(2, 15.1, 34.8, (3, 2), 5.235987755982988)
    blob = json.dumps(plan.to_json())
    assert InsertionPlan.from_json(json.loads(blob)) == plan
    assert set(plan.to_json()) == {"desired_slot", "t_in_s", "v_in_mps", "hop_slots", "t_hop_s"}
