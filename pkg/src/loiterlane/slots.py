"""Rotating ring of equiangular virtual slots.

Slot angles are measured from the insertion point I along the direction of
slot motion and normalised into (0, 2*pi]; a slot at angle g reaches I after
sweeping 2*pi - g. Slot indices are 1-based at the interface, slot i+1 sits
one spacing ahead of slot i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import CorridorConfig, FeasibilityWindow

TWO_PI = 2 * math.pi


def normalize_angle(a):
    """Map angles into (0, 2*pi]; works on scalars and arrays."""
    g = np.mod(a, TWO_PI)
    g = np.where(g == 0.0, TWO_PI, g)
    return float(g) if np.ndim(g) == 0 else g


@dataclass(frozen=True)
class SlotRing:
    """Snapshot of the ring.

    Angles are not accumulated: ``gamma`` is recomputed from the slot-1 angle
    at the reference epoch plus ``omega * t``, so the spacing stays exact over
    arbitrarily long runs.
    """

    n_slots: int
    phase0: float
    omega: float
    occupied: tuple
    t: float = 0.0

    def __post_init__(self):
        if len(self.occupied) != self.n_slots:
            raise ValueError("occupancy length must equal n_slots")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        object.__setattr__(self, "occupied", tuple(bool(o) for o in self.occupied))

    @classmethod
    def from_config(cls, config: CorridorConfig, occupied_slots=(),
                    phase0: float = 0.0) -> "SlotRing":
        occ = [False] * config.n_slots
        for i in occupied_slots:
            if not 1 <= i <= config.n_slots:
                raise ValueError(f"slot index {i} outside [1, {config.n_slots}]")
            occ[i - 1] = True
        return cls(config.n_slots, phase0, config.omega, tuple(occ))

    @property
    def alpha(self) -> float:
        return TWO_PI / self.n_slots

    @property
    def gamma(self) -> np.ndarray:
        k = np.arange(self.n_slots)
        return normalize_angle(self.phase0 + k * self.alpha + self.omega * self.t)

    def gamma_of(self, index: int) -> float:
        return normalize_angle(self.phase0 + (index - 1) * self.alpha + self.omega * self.t)

    def with_occupancy(self, occupied) -> "SlotRing":
        return replace(self, occupied=tuple(occupied))

    def snapshot(self) -> list[dict]:
        return [{"index": i + 1, "gamma_rad": float(g), "occupied": o}
                for i, (g, o) in enumerate(zip(self.gamma, self.occupied))]

    @classmethod
    def from_snapshot(cls, slots: list[dict], omega: float, tol: float = 1e-9) -> "SlotRing":
        """Rebuild a ring from ``{index, gamma_rad, occupied}`` records."""
        slots = sorted(slots, key=lambda s: s["index"])
        n = len(slots)
        if [s["index"] for s in slots] != list(range(1, n + 1)):
            raise ValueError("snapshot indices must be 1..N")
        g = np.array([s["gamma_rad"] for s in slots], dtype=float)
        gaps = np.mod(np.diff(g) - TWO_PI / n + math.pi, TWO_PI) - math.pi
        if n < 2 or np.any(np.abs(gaps) > tol):
            raise ValueError("snapshot slots are not equiangular with ascending index")
        return cls(n, float(g[0]), omega, tuple(bool(s["occupied"]) for s in slots))


@dataclass(frozen=True)
class SlotTiming:
    t_arrival: np.ndarray   # by 0-based slot position
    feasible: np.ndarray
    s_f: tuple
    t_f: tuple
    s_uf: tuple
    t_uf: tuple
    s_of: tuple
    t_of: tuple
    s_e: tuple
    t_e: tuple

    @property
    def n_slots(self) -> int:
        return len(self.t_arrival)

    def time_of(self, index: int) -> float:
        return float(self.t_arrival[index - 1])

    def is_empty(self, index: int) -> bool:
        return index in self.s_e


def slot_arrival_time(gamma_i, config: CorridorConfig):
    """Time for a slot at angle gamma_i to reach the insertion point."""
    return (TWO_PI - gamma_i) * config.r_loiter / config.v_loiter


def _sorted_by_time(idx, t):
    order = sorted(idx, key=lambda i: (t[i - 1], i))
    return tuple(order), tuple(float(t[i - 1]) for i in order)


def classify_slots(ring: SlotRing, window: FeasibilityWindow, config: CorridorConfig,
                   tol: float = 1e-9) -> SlotTiming:
    """Arrival times and the feasible / empty partitions of the ring.

    Feasibility is the closed interval [t_min, t_max], widened by ``tol``
    seconds so that exact design boundaries survive rounding.
    """
    t = slot_arrival_time(ring.gamma, config)
    feasible = (t >= window.t_min - tol) & (t <= window.t_max + tol)
    idx = range(1, ring.n_slots + 1)
    occ = ring.occupied
    s_f, t_f = _sorted_by_time([i for i in idx if feasible[i - 1]], t)
    s_uf, t_uf = _sorted_by_time([i for i in s_f if not occ[i - 1]], t)
    s_of, t_of = _sorted_by_time([i for i in s_f if occ[i - 1]], t)
    s_e, t_e = _sorted_by_time([i for i in idx if not occ[i - 1]], t)
    return SlotTiming(t, feasible, s_f, t_f, s_uf, t_uf, s_of, t_of, s_e, t_e)


def advance(ring: SlotRing, dt: float) -> SlotRing:
    if dt < 0:
        raise ValueError("dt must be non-negative")
    return replace(ring, t=ring.t + dt)
