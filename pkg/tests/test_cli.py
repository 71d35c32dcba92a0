import csv
import json

import pytest

from stefanlv import cli
from stefanlv.config import echo, preset_spec


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_config(tmp_path, spec):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(echo(spec)))
    return path


def test_presets_listing(capsys):
    assert cli.main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ("thm1-vanish", "thm2-exclusion", "thm3-coexist", "thm5-fast-strong",
                 "thm6-slow-strong", "prop21-persistence"):
        assert name in out


def test_preset_json_parses(capsys):
    assert cli.main(["presets", "thm6-slow-strong"]) == 0
    assert json.loads(capsys.readouterr().out)["params"]["h"] == 2.0


def test_simulate_zero_end_time(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["simulate", "--preset", "thm3-coexist", "--t-end", "0", "--out", str(out)]) == 0
    rows = read_rows(out / "trajectory.csv")
    assert len(rows) == 1 and float(rows[0]["t"]) == 0.0
    doc = json.loads((out / "outcome.json").read_text())
    assert doc["status"] == "ok"
    assert set(doc) >= {"config", "thresholds", "outcome", "consistency", "speed_lower_bound"}
    assert (out / "fronts.svg").exists() and (out / "profiles.svg").exists()


def test_simulate_from_config_file(tmp_path):
    spec = preset_spec("thm1-vanish")
    cfg = write_config(tmp_path, spec)
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out), "--t-end", "60"]) == 0
    doc = json.loads((out / "outcome.json").read_text())
    assert doc["outcome"]["species1"]["label"] == "Vanishing"
    assert doc["outcome"]["species2"]["label"] == "Vanishing"


def test_solver_error_exit_code(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["simulate", "--preset", "debug-blowup", "--out", str(out)]) == 2
    doc = json.loads((out / "outcome.json").read_text())
    assert doc["status"] == "solver-error" and doc["error"]["type"] == "NegativityBreach"
    assert (out / "trajectory.csv").exists()


def test_strict_indeterminate_exit_code(tmp_path):
    args = ["simulate", "--preset", "debug-indeterminate", "--out", str(tmp_path / "o")]
    assert cli.main(args) == 0
    assert cli.main(args + ["--strict"]) == 3


def test_simulate_is_deterministic(tmp_path):
    for sub in ("a", "b"):
        cli.main(["simulate", "--preset", "debug-indeterminate", "--out", str(tmp_path / sub)])
    a = (tmp_path / "a" / "trajectory.csv").read_bytes()
    assert a == (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_single_species_and_persistence_models(tmp_path):
    assert cli.main(["simulate", "--preset", "single-spread", "--t-end", "30",
                     "--out", str(tmp_path / "s")]) == 0
    doc = json.loads((tmp_path / "s" / "outcome.json").read_text())
    assert doc["outcome"]["species1"]["label"] == "Spreading"
    assert doc["semiwave"]["c"] == pytest.approx(0.36437072, abs=1e-7)
    assert cli.main(["simulate", "--preset", "prop21-persistence", "--out", str(tmp_path / "p")]) == 0
    assert json.loads((tmp_path / "p" / "outcome.json").read_text())["passed"] is True


def test_semiwave_command(tmp_path, capsys):
    assert cli.main(["semiwave", "--mu", "1", "--out", str(tmp_path)]) == 0
    assert "0.3643707" in capsys.readouterr().out
    rows = read_rows(tmp_path / "semiwave.csv")
    assert float(rows[-1]["q"]) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "bogus"],
        ["frobnicate"],
        ["simulate"],
        ["simulate", "--preset", "nope"],
        ["sweep", "--preset", "thm1-vanish", "--axis", "zeta=1,2"],
        ["sweep", "--preset", "thm1-vanish"],
        ["semiwave", "--mu", "-1"],
    ],
)
def test_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code = None
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 64


def test_bad_config_reports_key_path(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"params": {"d2": 1}, "init": {"s1_0": 1, "s2_0": 1}}))
    assert cli.main(["simulate", "--config", str(cfg)]) == 64
    assert "params.d1" in capsys.readouterr().err


def test_sweep_rows_errors_and_order(tmp_path):
    out = tmp_path / "sw"
    argv = ["sweep", "--preset", "thm1-vanish", "--t-end", "2", "--out", str(out),
            "--axis", "mu1=0.05,0.1,1", "--axis", "k=0.5,1e6", "--jobs", "2"]
    assert cli.main(argv) == 0
    rows = read_rows(out / "sweep.csv")
    assert len(rows) == 6
    assert [(float(r["mu1"]), float(r["k"])) for r in rows] == [
        (0.05, 0.5), (0.05, 1e6), (0.1, 0.5), (0.1, 1e6), (1.0, 0.5), (1.0, 1e6)]
    errors = [r for r in rows if r["error"]]
    assert len(errors) == 3 and all("NegativityBreach" in r["error"] for r in errors)
    assert all(r["label_species1"] for r in rows if not r["error"])
    assert (out / "sweep.svg").exists()


def test_sweep_single_cell_matches_simulate(tmp_path):
    base = ["--preset", "thm2-exclusion", "--t-end", "20"]
    assert cli.main(["simulate", *base, "--out", str(tmp_path / "sim")]) == 0
    assert cli.main(["sweep", *base, "--out", str(tmp_path / "sw"), "--axis", "k=0.5"]) == 0
    sim = json.loads((tmp_path / "sim" / "outcome.json").read_text())["outcome"]
    row = read_rows(tmp_path / "sw" / "sweep.csv")[0]
    for sp in ("species1", "species2"):
        assert row[f"label_{sp}"] == sim[sp]["label"]
        assert float(row[f"slope_{sp}"]) == sim[sp]["slope"]


def test_sweep_cell_limit(tmp_path):
    values = ",".join(str(0.1 + i * 1e-3) for i in range(101))
    argv = ["sweep", "--preset", "thm1-vanish", "--out", str(tmp_path),
            "--axis", f"k={values}", "--axis", f"h={values}"]
    assert cli.main(argv) == 64


def test_verify_formulas_suite(capsys):
    assert cli.main(["verify", "formulas"]) == 0
    assert "AC-8" in capsys.readouterr().out


def test_verify_failure_exit_code(monkeypatch, capsys):
    from stefanlv import verify

    failing = verify.CriterionResult("AC-1", "forced failure", False, {"why": "test"})
    monkeypatch.setattr(verify, "run_suite", lambda name: [failing])
    assert cli.main(["verify", "semiwave"]) == 1
    assert "forced failure" in capsys.readouterr().out
