"""Slot selection, hop-set search and speed commands.

``plan_insertion`` first looks for an empty slot the incoming UAV can meet
inside its speed band. Failing that, it searches for the shallowest chain of
loitering UAVs which, by each advancing one slot, frees a reachable slot.
``oracle_plan`` solves the same problem by exhaustive enumeration and exists
to cross-check the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CorridorConfig, FeasibilityWindow, transit_distance
from .slots import SlotTiming


class PlanningError(RuntimeError):
    pass


class NoFeasibleSlot(PlanningError):
    pass


class HopTooSlow(PlanningError):
    pass


@dataclass(frozen=True)
class InsertionPlan:
    desired_slot: int
    t_in: float
    v_in: float
    hop_slots: tuple
    t_hop: float

    @property
    def hop_count(self) -> int:
        return len(self.hop_slots)

    def to_json(self) -> dict:
        return {
            "desired_slot": self.desired_slot,
            "t_in_s": self.t_in,
            "v_in_mps": self.v_in,
            "hop_slots": list(self.hop_slots),
            "t_hop_s": self.t_hop,
        }

    @classmethod
    def from_json(cls, d: dict) -> "InsertionPlan":
        return cls(int(d["desired_slot"]), float(d["t_in_s"]), float(d["v_in_mps"]),
                   tuple(int(i) for i in d["hop_slots"]), float(d["t_hop_s"]))


@dataclass(frozen=True)
class SpeedCommand:
    v_incoming: float
    v_loiter_each: np.ndarray   # one entry per slot, index i-1 for slot i


def hop_time(config: CorridorConfig) -> float:
    """Time for a UAV at v_max to gain one slot spacing on the ring."""
    dv = config.v_max - config.v_loiter
    if dv <= 0:
        return math.inf
    return 2 * math.pi * config.r_loiter / (config.n_slots * dv)


def _wrap(i: int, n: int) -> int:
    return (i - 1) % n + 1


def _finish(desired: int, t_in: float, hops: tuple, window: FeasibilityWindow,
            config: CorridorConfig) -> InsertionPlan:
    t_hop = hop_time(config)
    if hops and not t_hop < window.t_min:
        raise HopTooSlow(f"hop time {t_hop:.4g} s is not below t_min {window.t_min:.4g} s")
    return InsertionPlan(desired, t_in, transit_distance(config) / t_in, hops, t_hop)


def plan_insertion(timing: SlotTiming, window: FeasibilityWindow,
                   config: CorridorConfig) -> InsertionPlan:
    t_min, t_max = window.t_min, window.t_max
    for slot, t in zip(timing.s_uf, timing.t_uf):
        if t_min < t < t_max:
            return _finish(slot, t, (), window, config)

    n = timing.n_slots
    for k in range(1, n):
        for empty in timing.s_e:
            cand = _wrap(empty - k, n)
            t = timing.time_of(cand)
            if t_min < t < t_max:
                hops = tuple(_wrap(empty - m, n) for m in range(1, k + 1))
                return _finish(cand, t, hops, window, config)
    raise NoFeasibleSlot("no empty or freeable slot arrives inside the speed window")


def oracle_plan(timing: SlotTiming, window: FeasibilityWindow,
                config: CorridorConfig) -> InsertionPlan:
    """Brute force over every (slot, hop depth) pair. Test use only."""
    n = timing.n_slots
    empty = set(timing.s_e)
    best = None
    for c in range(1, n + 1):
        t = timing.time_of(c)
        if not window.t_min < t < window.t_max:
            continue
        for k in range(n):
            # slots c .. c+k-1 must hold UAVs and c+k must be free
            chain = [_wrap(c + m, n) for m in range(k)]
            if any(s in empty for s in chain) or _wrap(c + k, n) not in empty:
                continue
            key = (k, t)
            if best is None or key < best[0]:
                best = (key, c, tuple(reversed(chain)))
    if best is None:
        raise NoFeasibleSlot("oracle: no admissible (slot, depth) pair")
    (_, t), c, hops = best
    return _finish(c, t, hops, window, config)


def speed_commands(plan: InsertionPlan, t_count: float,
                   config: CorridorConfig) -> SpeedCommand:
    v = np.full(config.n_slots, config.v_min)
    if plan.hop_slots and t_count <= plan.t_hop:
        v[np.asarray(plan.hop_slots) - 1] = config.v_max
    return SpeedCommand(transit_distance(config) / plan.t_in, v)
