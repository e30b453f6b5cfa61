"""Corridor design quantities: loiter radius, lane separation, transit distance.

All lengths in metres, speeds in m/s, angles in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import NamedTuple, Optional

import mpmath


class DegenerateSpeedBand(ValueError):
    """Raised when v_min == v_max, so the speed ratio k_v is exactly one."""


@dataclass(frozen=True)
class CorridorConfig:
    n_slots: int
    v_min: float
    v_max: float
    r_loiter: float
    r_transit: float
    d_lane: float
    d_safe: float
    # None means "rotate the ring at v_min", the steady loiter speed commanded
    # to every non-hopping UAV.
    v_loiter: Optional[float] = field(default=None)

    def __post_init__(self):
        if self.v_loiter is None:
            object.__setattr__(self, "v_loiter", float(self.v_min))
        if int(self.n_slots) != self.n_slots or self.n_slots < 2:
            raise ValueError(f"n_slots must be an integer >= 2, got {self.n_slots}")
        if not 0 < self.v_min <= self.v_max:
            raise ValueError(f"need 0 < v_min <= v_max, got {self.v_min}, {self.v_max}")
        if not self.v_min <= self.v_loiter <= self.v_max:
            raise ValueError(f"v_loiter={self.v_loiter} outside [v_min, v_max]")
        for name in ("r_loiter", "r_transit", "d_safe"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.d_lane >= 0:
            raise ValueError("d_lane must be non-negative")

    @property
    def k_v(self) -> float:
        return self.v_max / self.v_min

    @property
    def alpha(self) -> float:
        """Angular spacing between neighbouring slots."""
        return 2 * math.pi / self.n_slots

    @property
    def omega(self) -> float:
        """Slot ring angular rate."""
        return self.v_loiter / self.r_loiter

    @classmethod
    def design(cls, n_slots: int, d_safe: float, v_min: float, v_max: float,
               r_transit: float, d_lane: Optional[float] = None,
               v_loiter: Optional[float] = None) -> "CorridorConfig":
        """Build a config with the minimal loiter radius and, unless given,
        the minimal lane separation."""
        r_loiter = required_loiter_radius(n_slots, d_safe)
        cfg = cls(n_slots, v_min, v_max, r_loiter, r_transit,
                  0.0 if d_lane is None else d_lane, d_safe, v_loiter)
        if d_lane is None:
            cfg = cls(n_slots, v_min, v_max, r_loiter, r_transit,
                      min_lane_separation(cfg), d_safe, v_loiter)
        return cfg

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class FeasibilityWindow:
    phi: float
    psi: float
    t_min: float
    t_max: float


class Violation(NamedTuple):
    name: str
    detail: str


def required_loiter_radius(n_slots: int, d_safe: float) -> float:
    """Smallest loiter radius keeping n equiangular slots d_safe apart.

    Evaluated at 30 significant digits and rounded once, so designs at
    special angles come out exact (n=6, d_safe=50 gives 100.0).
    """
    if n_slots < 2:
        raise ValueError("at least two slots are required")
    if d_safe <= 0:
        raise ValueError("d_safe must be positive")
    with mpmath.workdps(30):
        return float(mpmath.mpf(d_safe) / (2 * mpmath.sin(mpmath.pi / n_slots) ** 2))


def min_lane_separation(config: CorridorConfig) -> float:
    """Shortest straight-lane length for which every slot phase leaves at
    least one slot reachable inside the speed band."""
    k_v = config.k_v
    if k_v == 1:
        raise DegenerateSpeedBand("degenerate speed band: v_max == v_min")
    arc = (2 * math.pi * config.r_loiter / config.n_slots) * (k_v / (k_v - 1))
    return max(0.0, arc - math.pi * config.r_transit / 2 - config.r_loiter)


def transit_distance(config: CorridorConfig) -> float:
    """Path length from main-lane exit to the insertion point."""
    return math.pi * config.r_transit / 2 + config.d_lane + config.r_loiter


def feasibility_window(config: CorridorConfig) -> FeasibilityWindow:
    d = transit_distance(config)
    return FeasibilityWindow(
        phi=d / (config.r_loiter * config.k_v),
        psi=d / config.r_loiter,
        t_min=d / config.v_max,
        t_max=d / config.v_min,
    )


def validate_design(config: CorridorConfig, tol: float = 1e-9) -> list[Violation]:
    """Check the radius bound, the lane-separation bound and the angular
    window; an empty list means the design is sound."""
    out = []
    r_req = required_loiter_radius(config.n_slots, config.d_safe)
    if config.r_loiter < r_req - tol:
        out.append(Violation(
            "loiter_radius",
            f"loiter radius below minimum slot-spacing bound "
            f"({config.r_loiter:.6g} m < {r_req:.6g} m)"))
    try:
        d_min = min_lane_separation(config)
    except DegenerateSpeedBand as exc:
        out.append(Violation("lane_separation", str(exc)))
    else:
        if config.d_lane < d_min - tol:
            out.append(Violation(
                "lane_separation",
                f"lane separation below minimum ({config.d_lane:.6g} m < {d_min:.6g} m)"))
    w = feasibility_window(config)
    if w.psi - w.phi < config.alpha - tol:
        out.append(Violation(
            "slot_window",
            f"angular window {w.psi - w.phi:.6g} rad narrower than slot spacing "
            f"{config.alpha:.6g} rad"))
    return out
