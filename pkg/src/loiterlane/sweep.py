"""Seeded randomized scenario sweeps: planner/oracle agreement and safety."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .geometry import feasibility_window, validate_design
from .planner import PlanningError, oracle_plan, plan_insertion
from .scenario import ScenarioConfig
from .sim import run_batch
from .slots import SlotRing, advance, classify_slots


def random_scenarios(base: ScenarioConfig, count: int, seed: int = 0,
                     max_occupied=None) -> list:
    """Random ring phase and occupancy on top of ``base``.

    The number of occupied slots is uniform on [0, max_occupied]
    (default: all N slots, so full rings appear).
    """
    n = base.corridor.n_slots
    top = n if max_occupied is None else max_occupied
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        k = int(rng.integers(0, top + 1))
        occ = tuple(sorted(int(s) for s in rng.choice(np.arange(1, n + 1), k, replace=False)))
        out.append(base.with_(initial_occupancy=occ,
                              initial_phase_offset=float(rng.uniform(0, 2 * math.pi)),
                              seed=seed + i))
    return out


def entry_timing(scenario: ScenarioConfig):
    c = scenario.corridor
    ring = SlotRing.from_config(c, scenario.initial_occupancy, scenario.initial_phase_offset)
    window = feasibility_window(c)
    return classify_slots(advance(ring, scenario.entry_time), window, c), window


def _solve(fn, timing, window, config):
    try:
        return fn(timing, window, config)
    except PlanningError as exc:
        return type(exc).__name__


def _key(result):
    if isinstance(result, str):
        return result
    return (result.desired_slot, result.hop_slots, result.t_in)


def compare_planners(scenario: ScenarioConfig):
    """(agree, plan-or-error-name, oracle-plan-or-error-name)."""
    timing, window = entry_timing(scenario)
    c = scenario.corridor
    got = _solve(plan_insertion, timing, window, c)
    ref = _solve(oracle_plan, timing, window, c)
    return _key(got) == _key(ref), got, ref


def run_sweep(base: ScenarioConfig, count: int, seed: int = 0, simulate: bool = True,
              max_occupied=None) -> dict:
    scenarios = random_scenarios(base, count, seed, max_occupied)
    hops, errors = Counter(), Counter()
    mismatches = []
    for sc in scenarios:
        agree, got, ref = compare_planners(sc)
        if not agree:
            mismatches.append({"scenario": sc.to_dict(),
                               "plan": got if isinstance(got, str) else got.to_json(),
                               "oracle": ref if isinstance(ref, str) else ref.to_json()})
        if isinstance(got, str):
            errors[got] += 1
        else:
            hops[got.hop_count] += 1
    report = {
        "count": count,
        "seed": seed,
        "design_violations": [v.name for v in validate_design(base.corridor)],
        "oracle_agreement": None if count == 0 else (count - len(mismatches)) / count,
        "oracle_mismatches": len(mismatches),
        "planning_errors": dict(errors),
        "hop_count_histogram": {str(k): hops[k] for k in sorted(hops)},
        "simulated": 0,
        "safety_violations": 0,
    }
    if simulate and count:
        results = [r for r in run_batch(scenarios, check_design=False) if r.metrics]
        report["simulated"] = len(results)
        report["safety_violations"] = sum(r.safety_violation for r in results)
        pm = [r.metrics["pairwise_min"] for r in results if r.metrics["pairwise_min"]]
        report["pairwise_min"] = min(pm) if pm else None
        report["max_insertion_error_m"] = max((r.insertion_error for r in results), default=None)
        report["max_cross_track_m"] = max((r.cross_track_max for r in results), default=None)
        report["hop_after_insertion"] = sum(r.hop_before_insertion is False for r in results)
    return {"report": report, "mismatches": mismatches}
