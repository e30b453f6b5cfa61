"""Loiter-lane insertion guidance for fixed-wing UAV corridors."""

from .geometry import (CorridorConfig, DegenerateSpeedBand, FeasibilityWindow, Violation,
                       feasibility_window, min_lane_separation, required_loiter_radius,
                       transit_distance, validate_design)
from .kinematics import Phase, UavState, step_kinematics
from .planner import (HopTooSlow, InsertionPlan, NoFeasibleSlot, SpeedCommand, hop_time,
                      oracle_plan, plan_insertion, speed_commands)
from .scenario import ScenarioConfig, load_scenario, save_scenario
from .sim import (CorridorPath, CrossTrackError, DesignError, SafetyViolation,
                  SimulationTrace, measure_separation, path_command, run_batch,
                  run_scenario)
from .slots import SlotRing, SlotTiming, advance, classify_slots, slot_arrival_time

__version__ = "0.1.0"
