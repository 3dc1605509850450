import json
import math

import pytest

from qmcrisk.gates import loads
from qmcrisk.harness import config as cfg
from qmcrisk.harness.cli import EXIT_BAD_INPUT, EXIT_REFUSED, main
from qmcrisk.harness.depth_scan import FAMILIES, depth_scan, linear_fit
from qmcrisk.harness.emit import CSV_HEADER, emit, from_csv, from_json, to_csv, to_json
from qmcrisk.harness.runner import RefusalError, RunRecord, build_scenario, check_budget, run, run_point
from qmcrisk.statevector import BUDGET_ENV


def record(n=3, **kw):
    base = dict(scenario="eq-max", n=n, z0=1, p_est=0.1, delta_p=0.2, p_oracle=0.12,
                abs_error=0.02, qubits=15, depth=100, seconds=0.0)
    base.update(kw)
    return RunRecord(**base)


# --- config -----------------------------------------------------------------------


def test_parse_range_forms():
    assert cfg.parse_range(5) == (5,)
    assert cfg.parse_range("5") == (5,)
    assert cfg.parse_range("1..4") == (1, 2, 3, 4)
    assert cfg.parse_range([2, 4]) == (2, 3, 4)
    for bad in ("4..1", "x", "1..b"):
        with pytest.raises((cfg.ConfigError, ValueError)):
            cfg.parse_range(bad)


def test_default_ranges():
    assert cfg.ExperimentConfig("eq-max").n == tuple(range(1, 10))
    assert cfg.ExperimentConfig("ir-mid").n == tuple(range(1, 6))
    assert cfg.ExperimentConfig("ir-mid", high_memory=True).n == tuple(range(1, 10))
    assert cfg.ExperimentConfig("credit-survival").q_def == 0.02


def test_config_rejects_bad_values():
    with pytest.raises(cfg.ConfigError):
        cfg.from_dict({"scenario": "eq-max", "colour": "red"})
    with pytest.raises(cfg.ConfigError):
        cfg.from_dict({"n": 3})
    with pytest.raises(cfg.ConfigError):
        cfg.ExperimentConfig("nope")
    with pytest.raises(cfg.ConfigError):
        cfg.ExperimentConfig("eq-max", sigma=-1.0)
    with pytest.raises(cfg.ConfigError):
        cfg.ExperimentConfig("ir-mid", a_dt="1/2")
    with pytest.raises(cfg.ConfigError):
        cfg.ExperimentConfig("eq-max", mode="fast")


def test_config_json_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"scenario": "credit-default", "n": "2..3", "j_set": [1, 0]}))
    c = cfg.load(path)
    assert c.n == (2, 3) and c.j_set == (0, 1)
    (tmp_path / "bad.json").write_text("[1, 2]")
    with pytest.raises(cfg.ConfigError):
        cfg.load(tmp_path / "bad.json")


# --- emit ------------------------------------------------------------------


def test_csv_shapes():
    assert to_csv([record()]).count("\n") == 2
    assert to_csv([record(n) for n in range(1, 10)]).count("\n") == 10
    assert to_csv([record()]).splitlines()[0] == ",".join(CSV_HEADER)


def test_json_and_csv_round_trip():
    recs = [record(n, p_est=math.sin(n) ** 2 / 3) for n in range(1, 6)]
    assert from_json(to_json(recs)) == recs
    assert from_csv(to_csv(recs)) == recs


def test_emit_writes_files(tmp_path):
    paths = emit([record()], tmp_path / "out", stem="x")
    assert sorted(p.name for p in paths) == ["x.csv", "x.json"]
    with pytest.raises(ValueError):
        emit([], tmp_path)


# --- runner ------------------------------------------------------------------


def test_refusal_names_shortfall(monkeypatch):
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    c = cfg.ExperimentConfig("ir-mid", n=9)
    with pytest.raises(RefusalError) as err:
        check_budget(c)
    payload = err.value.payload()
    assert payload["required_qubits"] == 27 and payload["budget_qubits"] == 26
    assert payload["shortfall"] == 1


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv(BUDGET_ENV, "14")
    with pytest.raises(RefusalError):
        run(cfg.ExperimentConfig("eq-max", n=3, engine="branch"))


def test_every_scenario_within_bound():
    for name in cfg.SCENARIOS:
        c = cfg.ExperimentConfig(name, engine="branch", deterministic=True)
        for n in c.n:
            sc = build_scenario(c, n)
            rec = run_point(c, n)
            assert rec.abs_error == abs(rec.p_est - rec.p_oracle)
            grid = (1 << n) * math.asin(math.sqrt(sc.p_oracle)) / math.pi
            if abs(grid - round(grid)) < 1e-9:
                assert rec.abs_error <= 1e-9, (name, n)
            else:
                assert rec.abs_error <= rec.delta_p, (name, n)


def test_deterministic_runs_are_byte_identical(tmp_path):
    c = cfg.ExperimentConfig("eq-min", n="1..4", engine="branch", deterministic=True, mode="shots", seed=3)
    a = emit(run(c), tmp_path / "a", stem="r")
    b = emit(run(c, workers=2), tmp_path / "b", stem="r")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_records_sorted():
    recs = run(cfg.ExperimentConfig("eq-max", n=[3, 1, 2], engine="branch"))
    assert [r.n for r in recs] == [1, 2, 3]


# --- depth scan ------------------------------------------------------------------


def test_linear_fit_exact_line():
    fit = linear_fit([1, 2, 3, 4], [5, 7, 9, 11])
    assert fit["slope"] == pytest.approx(2) and fit["intercept"] == pytest.approx(3) and fit["r2"] == pytest.approx(1)


@pytest.mark.parametrize("family", [f for f in FAMILIES if f != "full-eq-max"])
def test_depth_scan_families(family):
    scan = depth_scan(family, range(2, 6))
    assert [r.size for r in scan.rows] == [2, 3, 4, 5]
    assert all(r.depth > 0 for r in scan.rows)
    assert "extrapolated" in scan.summary()


def test_depth_scan_full_circuit_reports_extrapolation():
    scan = depth_scan("full-eq-max", range(2, 5))
    assert len(scan.fit["ratios"]) == 2
    text = scan.summary()
    assert "extrapolated depth at n=14" in text and "computed depth at n=14" in text


def test_depth_scan_rejects_unknown():
    with pytest.raises(ValueError):
        depth_scan("bogus", [1])


# --- command line -----------------------------------------------------------------


def test_cli_run_and_dump(tmp_path, capsys):
    rc = main(["run", "--scenario", "worked-example", "--deterministic", "--out", str(tmp_path), "--dump-circuit"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(CSV_HEADER)
    assert (tmp_path / "worked-example_exact.csv").exists()
    circ = loads((tmp_path / "circuit_worked-example_n3.txt").read_text())
    assert circ.num_qubits == 7 and circ.layout is not None


def test_cli_config_file(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"scenario": "credit-survival", "n": "1..2", "engine": "branch"}))
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "r"), "--deterministic"]) == 0
    lines = (tmp_path / "r" / "credit-survival_exact.csv").read_text().splitlines()
    assert len(lines) == 3


def test_cli_refusal(capsys, monkeypatch):
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    rc = main(["run", "--scenario", "ir-mid", "--n", "9"])
    assert rc == EXIT_REFUSED
    payload = json.loads(capsys.readouterr().err)
    assert payload["shortfall"] == 1 and payload["budget_env"] == BUDGET_ENV


def test_cli_bad_input(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"scenario": "eq-max", "sigma": 0}))
    assert main(["run", "--config", str(path)]) == EXIT_BAD_INPUT
    assert "invalid config" in capsys.readouterr().err
    assert main(["depth-scan", "--family", "m_max", "--range", "5..2"]) == EXIT_BAD_INPUT


def test_cli_oracle_and_depth(capsys):
    assert main(["oracle", "--scenario", "ir-mid"]) == 0
    assert "5/12" in capsys.readouterr().out
    assert main(["depth-scan", "--family", "m_max", "--range", "3..5"]) == 0
    assert "fit slope" in capsys.readouterr().out
