import json
import math

import pytest

from loiterlane import (CorridorConfig, ScenarioConfig, load_scenario, min_lane_separation,
                        save_scenario)
from loiterlane.cli import main


CONVERSE = CorridorConfig(6, 15.0, 20.0, 100.0, 80.0, 0.0, 50.0)


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", ["case1", "case2"])
def test_bundled_round_trip(name, tmp_path):
    sc = load_scenario(name)
    assert ScenarioConfig.loads(sc.dumps()) == sc
    save_scenario(sc, tmp_path / "s.toml")
    assert load_scenario(tmp_path / "s.toml") == sc


def test_toml_keys_carry_units():
    text = load_scenario("case2").dumps()
    for key in ("v_min_mps", "r_loiter_m", "d_safe_m", "dt_s", "phase_offset_rad"):
        assert key in text


@pytest.mark.parametrize("kw", [dict(initial_occupancy=(1, 1)), dict(initial_occupancy=(7,)),
                                dict(dt=0.0), dict(main_lane_speed=50.0)])
def test_scenario_invariants(kw):
    with pytest.raises(ValueError):
        ScenarioConfig(CorridorConfig(6, 15.0, 35.0, 100.0, 80.0, 300.0, 50.0), **kw)


def test_design_case2_json(capsys):
    code, out, _ = run_cli(capsys, "design", "--n", 6, "--ds", 50, "--vmin", 15, "--vmax", 35,
                           "--rt", 80, "--dl", 300, "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["required_loiter_radius_m"] == 100.0
    assert rep["min_lane_separation_m"] == 0.0
    assert rep["verdict"] == "OK"


def test_design_text_and_violation(capsys):
    code, out, _ = run_cli(capsys, "design", "--n", 8, "--ds", 58.5, "--vmin", 15, "--vmax", 35,
                           "--rt", 80, "--dl", 350, "--rl", 150)
    assert code == 2
    assert "FAIL" in out and "loiter radius" in out


def test_design_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["design", "--n", "1", "--ds", "50", "--vmin", "15", "--vmax", "35", "--rt", "80"])
    assert exc.value.code == 2
    code, _, err = run_cli(capsys, "design", "--n", 6, "--ds", 50, "--vmin", 20, "--vmax", 20,
                           "--rt", 80)
    assert code == 2 and "degenerate speed band" in err


def test_run_writes_outputs(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "run", "case2", "--json", "--plot-data",
                           "--out-dir", tmp_path)
    assert code == 0
    metrics = json.loads(out)
    assert metrics["hop_count"] == 2 and metrics["pairwise_min"] >= 50.0
    d = tmp_path / "case2"
    header = (d / "trace.csv").read_text().splitlines()[0]
    assert header == "t,vehicle_id,x,y,theta,v,a,phase"
    kinds = [e["kind"] for e in json.loads((d / "events.json").read_text())]
    assert kinds.index("HopComplete") < kinds.index("ReachInsertionPoint")
    assert json.loads((d / "plan.json").read_text())["hop_slots"] == [3, 2]
    assert (d / "d_sep.csv").exists() and (d / "track_0.csv").exists()

    # the snapshot taken at entry plans to the same result, oracle-checked
    code, out, _ = run_cli(capsys, "plan", d / "snapshot.json", "--check-oracle")
    assert code == 0 and json.loads(out)["hop_slots"] == [3, 2]


def _snapshot(tmp_path, occupied, phase0=0.3):
    from loiterlane import SlotRing
    from loiterlane.scenario import ScenarioConfig
    cfg = load_scenario("case2").corridor
    ring = SlotRing.from_config(cfg, occupied, phase0)
    blob = {"corridor": ScenarioConfig(cfg).to_dict()["corridor"], "slots": ring.snapshot()}
    p = tmp_path / "snap.json"
    p.write_text(json.dumps(blob))
    return p


def test_plan_exit_codes(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "plan", _snapshot(tmp_path, []))
    assert code == 0 and json.loads(out)["hop_slots"] == []
    code, _, err = run_cli(capsys, "plan", _snapshot(tmp_path, range(1, 7)))
    assert code == 3 and "NoFeasibleSlot" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run_cli(capsys, "plan", bad)[0] == 2


def test_plan_hop_too_slow_exit(capsys, tmp_path):
    from loiterlane import SlotRing, feasibility_window
    cfg = CorridorConfig(6, 15.0, 16.0, 100.0, 80.0, 0.0, 50.0)
    w = feasibility_window(cfg)
    gamma = 2 * math.pi - 0.5 * (w.t_min + w.t_max) * cfg.omega
    ring = SlotRing.from_config(cfg, [1], gamma)
    blob = {"corridor": ScenarioConfig(cfg, main_lane_speed=15.0).to_dict()["corridor"],
            "slots": ring.snapshot()}
    p = tmp_path / "slow.json"
    p.write_text(json.dumps(blob))
    code, _, err = run_cli(capsys, "plan", p)
    assert code == 4 and "HopTooSlow" in err


def test_run_rejects_unsound_design(capsys, tmp_path):
    sc = load_scenario("case2")
    c = sc.corridor.to_dict()
    c["r_loiter"] = 90.0
    save_scenario(sc.with_(corridor=CorridorConfig(**c)), tmp_path / "bad.toml")
    assert run_cli(capsys, "run", tmp_path / "bad.toml", "--out-dir", tmp_path)[0] == 2


def test_sweep_zero_count(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--count", 0)
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 0 and rep["oracle_mismatches"] == 0


def test_sweep_small_simulated(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "sweep", "--count", 40, "--seed", 3, "--out-dir", tmp_path)
    rep = json.loads(out)
    assert code == 0
    assert rep["oracle_agreement"] == 1.0 and rep["safety_violations"] == 0
    assert (tmp_path / "sweep.json").exists()


def test_sweep_converse_probe(capsys, tmp_path):
    d_min = min_lane_separation(CONVERSE)
    assert d_min > 0
    save_scenario(ScenarioConfig(CONVERSE, main_lane_speed=15.0), tmp_path / "probe.toml")
    code, out, _ = run_cli(capsys, "sweep", "--scenario", tmp_path / "probe.toml",
                           "--count", 2000, "--d-lane", 0.25 * d_min, "--plan-only")
    rep = json.loads(out)
    assert code == 0
    assert "lane_separation" in rep["design_violations"]
    assert rep["planning_errors"].get("NoFeasibleSlot", 0) > 0
    assert rep["oracle_agreement"] == 1.0
