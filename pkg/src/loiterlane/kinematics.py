"""Planar fixed-wing kinematics: x' = V cos(theta), y' = V sin(theta), theta' = a / V."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np


class Phase(IntEnum):
    MAIN_LANE = 0
    TRANSIT_LINK = 1
    TRANSIT_LANE = 2
    LOITER_CIRCLE = 3

    @property
    def label(self) -> str:
        return ("MainLane", "TransitLink", "TransitLane", "LoiterCircle")[self]


@dataclass(frozen=True)
class UavState:
    x: float
    y: float
    theta: float
    v: float
    a: float = 0.0
    phase: Phase = Phase.MAIN_LANE
    arclength: float = 0.0


def _rates(theta, v, a):
    return v * np.cos(theta), v * np.sin(theta), a / v


def rk4_step(x, y, theta, v, a, h):
    """One classical RK4 step with speed and lateral acceleration held fixed.

    Broadcasts over numpy arrays; elements with h == 0 are returned unchanged.
    """
    k1x, k1y, k1t = _rates(theta, v, a)
    k2x, k2y, k2t = _rates(theta + 0.5 * h * k1t, v, a)
    k3x, k3y, k3t = _rates(theta + 0.5 * h * k2t, v, a)
    k4x, k4y, k4t = _rates(theta + h * k3t, v, a)
    s = h / 6.0
    return (x + s * (k1x + 2 * k2x + 2 * k3x + k4x),
            y + s * (k1y + 2 * k2y + 2 * k3y + k4y),
            theta + s * (k1t + 2 * k2t + 2 * k3t + k4t))


def step_kinematics(state: UavState, dt: float) -> UavState:
    if state.v <= 0:
        raise ValueError("speed must be positive; the turn-rate term is singular at V = 0")
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return state
    x, y, th = rk4_step(state.x, state.y, state.theta, state.v, state.a, dt)
    return replace(state, x=float(x), y=float(y), theta=float(th),
                   arclength=state.arclength + state.v * dt)
