"""Scenario description and its TOML form.

Keys carry their SI unit as a suffix (``_m``, ``_mps``, ``_s``, ``_rad``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .geometry import CorridorConfig

_CORRIDOR_KEYS = {
    "n_slots": "n_slots",
    "v_min_mps": "v_min",
    "v_max_mps": "v_max",
    "v_loiter_mps": "v_loiter",
    "r_loiter_m": "r_loiter",
    "r_transit_m": "r_transit",
    "d_lane_m": "d_lane",
    "d_safe_m": "d_safe",
}

BUNDLED = ("case1", "case2")


@dataclass(frozen=True)
class ScenarioConfig:
    corridor: CorridorConfig
    initial_occupancy: tuple = ()
    initial_phase_offset: float = 0.0
    e_offset: float = 70.0
    main_lane_speed: float = 25.0
    dt: float = 0.01
    run_duration_after_insertion: float = 10.0
    seed: int = 0
    loiter_ccw: bool = True
    name: str = field(default="", compare=False)

    def __post_init__(self):
        occ = tuple(int(i) for i in self.initial_occupancy)
        object.__setattr__(self, "initial_occupancy", occ)
        n = self.corridor.n_slots
        if len(set(occ)) != len(occ) or any(not 1 <= i <= n for i in occ):
            raise ValueError(f"occupancy must be unique slot indices in [1, {n}]")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.e_offset < 0:
            raise ValueError("e_offset must be non-negative")
        c = self.corridor
        if not c.v_min <= self.main_lane_speed <= c.v_max:
            raise ValueError("main-lane speed outside [v_min, v_max]")
        if self.run_duration_after_insertion < 0:
            raise ValueError("run duration must be non-negative")

    @property
    def entry_time(self) -> float:
        return self.e_offset / self.main_lane_speed

    def with_(self, **kw) -> "ScenarioConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        c = self.corridor
        return {
            "corridor": {k: getattr(c, attr) for k, attr in _CORRIDOR_KEYS.items()},
            "ring": {
                "occupied": list(self.initial_occupancy),
                "phase_offset_rad": self.initial_phase_offset,
            },
            "entry": {
                "e_offset_m": self.e_offset,
                "main_lane_speed_mps": self.main_lane_speed,
            },
            "run": {
                "dt_s": self.dt,
                "duration_after_insertion_s": self.run_duration_after_insertion,
                "seed": self.seed,
                "loiter_ccw": self.loiter_ccw,
            },
        }

    @classmethod
    def from_dict(cls, d: dict, name: str = "") -> "ScenarioConfig":
        unknown = set(d["corridor"]) - set(_CORRIDOR_KEYS)
        if unknown:
            raise ValueError(f"unknown corridor keys: {sorted(unknown)}")
        corridor = CorridorConfig(**{attr: d["corridor"][k]
                                     for k, attr in _CORRIDOR_KEYS.items()
                                     if k in d["corridor"]})
        ring, entry, run = d.get("ring", {}), d.get("entry", {}), d.get("run", {})
        return cls(
            corridor=corridor,
            initial_occupancy=tuple(ring.get("occupied", ())),
            initial_phase_offset=float(ring.get("phase_offset_rad", 0.0)),
            e_offset=float(entry.get("e_offset_m", 70.0)),
            main_lane_speed=float(entry.get("main_lane_speed_mps", 25.0)),
            dt=float(run.get("dt_s", 0.01)),
            run_duration_after_insertion=float(run.get("duration_after_insertion_s", 10.0)),
            seed=int(run.get("seed", 0)),
            loiter_ccw=bool(run.get("loiter_ccw", True)),
            name=name,
        )

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str, name: str = "") -> "ScenarioConfig":
        return cls.from_dict(tomllib.loads(text), name=name)


def load_scenario(path_or_name) -> ScenarioConfig:
    """Load a TOML scenario file, or a bundled one by name (``case1``, ``case2``)."""
    s = str(path_or_name)
    if s in BUNDLED:
        text = resources.files("loiterlane.scenarios").joinpath(f"{s}.toml").read_text()
        return ScenarioConfig.loads(text, name=s)
    p = Path(s)
    return ScenarioConfig.loads(p.read_text(), name=p.stem)


def save_scenario(scenario: ScenarioConfig, path) -> None:
    Path(path).write_text(scenario.dumps())
