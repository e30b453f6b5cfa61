"""Command-line front end.

Exit codes: 0 ok, 2 validation/usage, 3 no feasible slot, 4 hop too slow,
5 safety violation, 6 planner/oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .geometry import (CorridorConfig, DegenerateSpeedBand, feasibility_window,
                       min_lane_separation, required_loiter_radius, transit_distance,
                       validate_design)
from .planner import HopTooSlow, NoFeasibleSlot, oracle_plan, plan_insertion
from .scenario import _CORRIDOR_KEYS, load_scenario
from .sim import DesignError, SafetyViolation, run_scenario
from .slots import SlotRing, advance, classify_slots
from .sweep import run_sweep

EXIT_OK, EXIT_VALIDATION, EXIT_NO_SLOT, EXIT_HOP, EXIT_SAFETY, EXIT_ORACLE = 0, 2, 3, 4, 5, 6


def _emit(obj, as_json: bool, text: str = None):
    print(json.dumps(obj, indent=2) if as_json or text is None else text)


def cmd_design(args) -> int:
    if args.n < 2:
        args.parser.error("--n must be at least 2")
    r_req = required_loiter_radius(args.n, args.ds)
    try:
        cfg = CorridorConfig(args.n, args.vmin, args.vmax, args.rl or r_req, args.rt,
                             args.dl, args.ds, args.vs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        d_min = min_lane_separation(cfg)
    except DegenerateSpeedBand as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    w = feasibility_window(cfg)
    bad = validate_design(cfg)
    rep = {
        "required_loiter_radius_m": r_req,
        "r_loiter_m": cfg.r_loiter,
        "min_lane_separation_m": d_min,
        "transit_distance_m": transit_distance(cfg),
        "phi_rad": w.phi, "psi_rad": w.psi,
        "phi_deg": math.degrees(w.phi), "psi_deg": math.degrees(w.psi),
        "t_min_s": w.t_min, "t_max_s": w.t_max,
        "violations": [v._asdict() for v in bad],
        "verdict": "OK" if not bad else "FAIL",
    }
    text = "\n".join([
        f"R_L required   {r_req:.4f} m (using {cfg.r_loiter:.4f} m)",
        f"d_L minimum    {d_min:.4f} m (using {cfg.d_lane:.4f} m)",
        f"D_L            {rep['transit_distance_m']:.4f} m",
        f"phi, psi       {rep['phi_deg']:.3f} deg, {rep['psi_deg']:.3f} deg",
        f"t_min, t_max   {w.t_min:.3f} s, {w.t_max:.3f} s",
        "verdict        " + ("OK" if not bad else
                             "FAIL: " + "; ".join(v.detail for v in bad)),
    ])
    _emit(rep, args.json, text)
    return EXIT_OK if not bad else EXIT_VALIDATION


def load_snapshot(path):
    """Snapshot file: {"corridor": {<TOML corridor keys>}, "slots": [...]}."""
    d = json.loads(Path(path).read_text())
    cfg = CorridorConfig(**{attr: d["corridor"][k] for k, attr in _CORRIDOR_KEYS.items()
                            if k in d["corridor"]})
    return cfg, SlotRing.from_snapshot(d["slots"], cfg.omega)


def cmd_plan(args) -> int:
    try:
        cfg, ring = load_snapshot(args.snapshot)
    except (ValueError, KeyError) as exc:
        print(f"error: bad snapshot: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if ring.n_slots != cfg.n_slots:
        print("error: snapshot slot count differs from corridor n_slots", file=sys.stderr)
        return EXIT_VALIDATION
    window = feasibility_window(cfg)
    timing = classify_slots(ring, window, cfg)
    try:
        plan = plan_insertion(timing, window, cfg)
    except NoFeasibleSlot as exc:
        print(f"NoFeasibleSlot: {exc}", file=sys.stderr)
        return EXIT_NO_SLOT
    except HopTooSlow as exc:
        print(f"HopTooSlow: {exc}", file=sys.stderr)
        return EXIT_HOP
    out = plan.to_json()
    if args.check_oracle:
        ref = oracle_plan(timing, window, cfg)
        if (ref.desired_slot, ref.hop_slots, ref.t_in) != (plan.desired_slot, plan.hop_slots,
                                                            plan.t_in):
            print(json.dumps({"plan": out, "oracle": ref.to_json()}), file=sys.stderr)
            return EXIT_ORACLE
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        (Path(args.out_dir) / "plan.json").write_text(json.dumps(out, indent=2))
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _snapshot_json(scenario):
    c = scenario.corridor
    ring = SlotRing.from_config(c, scenario.initial_occupancy, scenario.initial_phase_offset)
    ring = advance(ring, scenario.entry_time)
    return {"corridor": scenario.to_dict()["corridor"], "t_s": scenario.entry_time,
            "slots": ring.snapshot()}


def cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
        if args.dt:
            sc = sc.with_(dt=args.dt)
        trace = run_scenario(sc)
    except NoFeasibleSlot as exc:
        print(f"NoFeasibleSlot: {exc}", file=sys.stderr)
        return EXIT_NO_SLOT
    except HopTooSlow as exc:
        print(f"HopTooSlow: {exc}", file=sys.stderr)
        return EXIT_HOP
    except SafetyViolation as exc:
        print(f"SafetyViolation: {exc}", file=sys.stderr)
        return EXIT_SAFETY
    except (DesignError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    out = Path(args.out_dir or "out") / (sc.name or "scenario")
    metrics = trace.write_outputs(out, plot_data=args.plot_data)
    (out / "snapshot.json").write_text(json.dumps(_snapshot_json(sc), indent=2))
    text = "\n".join([f"{k:14s} {v}" for k, v in metrics.items()] +
                     [f"{t:10.3f} s  {k}" for t, k in trace.events] + [f"outputs in {out}"])
    _emit(metrics, args.json, text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        base = load_scenario(args.scenario)
        if args.dt:
            base = base.with_(dt=args.dt)
        if args.d_lane is not None:
            c = base.corridor.to_dict()
            c["d_lane"] = args.d_lane
            base = base.with_(corridor=CorridorConfig(**c))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    res = run_sweep(base, args.count, args.seed, simulate=not args.plan_only)
    report = res["report"]
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        (Path(args.out_dir) / "sweep.json").write_text(json.dumps(report, indent=2))
    print(json.dumps(report, indent=2))
    if res["mismatches"]:
        dump = json.dumps(res["mismatches"][0], indent=2)
        if args.out_dir:
            (Path(args.out_dir) / "counterexample.json").write_text(dump)
        print(dump, file=sys.stderr)
        return EXIT_ORACLE
    if report["safety_violations"]:
        return EXIT_SAFETY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--out-dir", default=argparse.SUPPRESS)
    common.add_argument("--dt", type=float, default=argparse.SUPPRESS,
                        help="integration step override (s)")

    p = argparse.ArgumentParser(prog="loiterlane", parents=[common],
                                description="Loiter-lane corridor design, planning and simulation.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", parents=[common], help="evaluate a corridor design")
    d.add_argument("--n", type=int, required=True, help="number of slots")
    d.add_argument("--ds", type=float, required=True, help="safety separation (m)")
    d.add_argument("--vmin", type=float, required=True)
    d.add_argument("--vmax", type=float, required=True)
    d.add_argument("--rt", type=float, required=True, help="transit link radius (m)")
    d.add_argument("--dl", type=float, default=0.0, help="lane separation (m)")
    d.add_argument("--rl", type=float, default=None,
                   help="loiter radius (m); default is the minimal radius")
    d.add_argument("--vs", type=float, default=None, help="slot speed (m/s); default vmin")
    d.set_defaults(func=cmd_design, parser=d)

    pl = sub.add_parser("plan", parents=[common], help="plan an insertion from a ring snapshot")
    pl.add_argument("snapshot", help="JSON snapshot file")
    pl.add_argument("--check-oracle", action="store_true")
    pl.set_defaults(func=cmd_plan)

    r = sub.add_parser("run", parents=[common], help="simulate a scenario")
    r.add_argument("scenario", help="TOML file or bundled name (case1, case2)")
    r.add_argument("--plot-data", action="store_true")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", parents=[common], help="randomized planner/safety sweep")
    s.add_argument("--scenario", default="case2")
    s.add_argument("--count", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--d-lane", type=float, default=None, help="override lane separation (m)")
    s.add_argument("--plan-only", action="store_true", help="skip the flight simulations")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("json", False), ("out_dir", None), ("dt", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
