import csv
import io
import json

import pytest
from click.testing import CliRunner

from quantum_rsp.cli import main


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False) if "mix_stderr" in CliRunner.__init__.__code__.co_varnames else CliRunner()


def run(runner, *args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


@pytest.fixture
def uniform_file(tmp_path):
    path = tmp_path / "uniform.json"
    path.write_text(json.dumps({"amplitudes": [[1 / 3, 0.0]] * 9}))
    return path


def test_payoff_classical_mixed(runner):
    res = run(runner, "payoff", "--epsilon", -0.5, "--state", "classical",
              "--alice", "0.3333333,0.3333333", "--bob", "0.3333333,0.3333333", "--format", "json")
    assert res.exit_code == 0
    d = json.loads(res.stdout)
    assert d["P_A"] == pytest.approx(1 / 6, abs=1e-6)
    assert d["P_B"] == pytest.approx(1 / 6, abs=1e-6)


def test_payoff_entangled_identity(runner):
    d = json.loads(run(runner, "payoff", "--epsilon", -0.5, "--state", "entangled",
                       "--alice", "0,0", "--bob", "0,0", "--format", "json").stdout)
    assert d["P_A"] == 0.0 and d["P_B"] == 0.0


def test_payoff_zero_sum(runner):
    d = json.loads(run(runner, "payoff", "--epsilon", 0, "--state", "classical",
                       "--alice", "0.2,0.3", "--bob", "0.1,0.4", "--format", "json").stdout)
    assert d["P_A+P_B"] == pytest.approx(0.0, abs=1e-15)
    assert d["predicted_sum_classical"] == 0.0


def test_payoff_text_is_aligned(runner):
    out = run(runner, "payoff", "--epsilon", -0.5, "--alice", "0,0", "--bob", "1,0").stdout
    lines = out.splitlines()
    assert lines[0].startswith("epsilon")
    cols = {line.index(line.split()[1]) for line in lines}
    assert len(cols) == 1


def test_payoff_rejects_bad_strategy_without_output(runner):
    res = runner.invoke(main, ["payoff", "--epsilon", "-0.5", "--alice", "0.7,0.7", "--bob", "0,0"])
    assert res.exit_code != 0
    assert res.stdout == ""
    assert "--alice" in res.stderr


def test_payoff_from_game_file(runner, tmp_path):
    path = tmp_path / "game.json"
    path.write_text(json.dumps({"rsp": {"epsilon": -0.5}}))
    d = json.loads(run(runner, "payoff", "--game", path, "--alice", "0,0", "--bob", "1,0", "--format", "json").stdout)
    assert (d["P_A"], d["P_B"]) == (-1.0, 1.0)


def test_bimatrix_game_file(runner, tmp_path):
    path = tmp_path / "game.json"
    pairs = [[[i * 3 + j, j * 3 + i] for j in range(3)] for i in range(3)]
    path.write_text(json.dumps({"bimatrix": pairs}))
    d = json.loads(run(runner, "payoff", "--game", path, "--alice", "0,0", "--bob", "0,0", "--format", "json").stdout)
    assert (d["P_A"], d["P_B"]) == (0.0, 0.0)
    assert d["predicted_sum_classical"] is None


def test_bad_game_file_is_located(runner, tmp_path):
    path = tmp_path / "game.json"
    path.write_text(json.dumps({"bimatrix": [[[0, 0]] * 3, [[0, 0], [0, "x"], [0, 0]], [[0, 0]] * 3]}))
    res = runner.invoke(main, ["payoff", "--game", str(path), "--alice", "0,0", "--bob", "0,0"])
    assert res.exit_code != 0
    assert "bimatrix[1][1]" in res.stderr


def test_unnormalized_state_file(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"amplitudes": [[0.5, 0.0]] * 9}))
    res = runner.invoke(main, ["equilibrium", "--epsilon", "-0.5", "--state", f"file:{path}"])
    assert res.exit_code != 0
    assert "amplitudes" in res.stderr and "deficit" in res.stderr


@pytest.mark.parametrize("state, expected", [("classical", "NE_NOT_ESS"), ("entangled", "ESS")])
def test_equilibrium_command(runner, state, expected):
    d = json.loads(run(runner, "equilibrium", "--epsilon", -0.5, "--state", state, "--format", "json").stdout)
    assert d["classification"] == expected
    assert d["candidate"]["p"] == pytest.approx(1 / 3, abs=1e-10)
    assert d["candidate"]["p1"] == pytest.approx(1 / 3, abs=1e-10)


def test_equilibrium_degenerate_state_file(runner, uniform_file):
    res = run(runner, "equilibrium", "--epsilon", -0.5, "--state", f"file:{uniform_file}", "--format", "json")
    assert res.exit_code == 0
    assert json.loads(res.stdout)["classification"] == "DEGENERATE"


def _csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("state, expected", [("classical", "NE_NOT_ESS"), ("entangled", "ESS")])
def test_sweep(runner, state, expected):
    out = run(runner, "sweep", "--state", state, "--start", -0.9, "--stop", -0.1, "--count", 9, "--format", "csv").stdout
    rows = _csv_rows(out)
    assert len(rows) == 9
    eps = [float(r["epsilon"]) for r in rows]
    assert eps == sorted(eps)
    for r in rows:
        assert r["classification"] == expected
        assert float(r["p_star"]) == pytest.approx(1 / 3, abs=1e-10)
        assert float(r["p1_star"]) == pytest.approx(1 / 3, abs=1e-10)
        assert float(r["a"]) == pytest.approx(float(r["b"]), abs=1e-12)


def test_sweep_descending_input_still_ascending(runner):
    rows = _csv_rows(run(runner, "sweep", "--start", -0.1, "--stop", -0.9, "--count", 3, "--format", "csv").stdout)
    assert [float(r["epsilon"]) for r in rows] == pytest.approx([-0.9, -0.5, -0.1])


def test_single_point_sweep(runner):
    rows = _csv_rows(run(runner, "sweep", "--start", 0, "--stop", 0, "--count", 1, "--format", "csv").stdout)
    assert len(rows) == 1 and rows[0]["classification"] == "NE_NEUTRAL"


def test_sweep_invalid_range(runner):
    assert runner.invoke(main, ["sweep", "--start", "-0.9", "--stop", "-0.1", "--count", "0"]).exit_code != 0
    assert runner.invoke(main, ["sweep", "--start", "-0.9", "--stop", "-0.1", "--count", "1"]).exit_code != 0


def test_verify_passes_and_reports(runner):
    res = run(runner, "verify", "--format", "json")
    assert res.exit_code == 0
    d = json.loads(res.stdout)
    assert d["passed"] and d["seed"] == 42
    suites = {s["suite"]: s for s in d["suites"]}
    assert suites["classical_form"]["max_deviation"] <= 1e-12
    for ratio in suites["quantum_constant"]["constant_over_minus_epsilon"].values():
        assert ratio == pytest.approx(1.0, abs=1e-10)
    assert suites["payoff_sums"]["classical_formula_matches"] == {"|11>": True, "|12>": False}


def test_verify_text_is_deterministic(runner):
    a = run(runner, "verify", "--seed", 7).stdout
    b = run(runner, "verify", "--seed", 7).stdout
    assert a == b
    assert a.rstrip().endswith("ALL SUITES PASSED")


def test_invade_entangled_declines(runner):
    res = run(runner, "invade", "--epsilon", -0.5, "--state", "entangled", "--mutant", "0.43,0.43", "--mu0", 0.1, "--format", "csv")
    rows = _csv_rows(res.stdout)
    assert list(rows[0]) == ["step", "mu", "f_incumbent", "f_mutant"]
    assert float(rows[-1]["mu"]) < 0.1
    assert "outcome=" in res.stderr


def test_invade_classical_grows(runner):
    d = json.loads(run(runner, "invade", "--epsilon", -0.5, "--state", "classical",
                       "--mutant", "0.43,0.43", "--format", "json").stdout)
    assert d["final_mu"] > 0.1


def test_invade_identical_mutant_times_out(runner):
    d = json.loads(run(runner, "invade", "--epsilon", -0.5, "--state", "entangled",
                       "--incumbent", "0.25,0.25", "--mutant", "0.25,0.25", "--steps", 50, "--format", "json").stdout)
    assert d["outcome"] == "TIMEOUT"
    assert {r["mu"] for r in d["trace"]} == {0.1}


def test_out_file(runner, tmp_path):
    out = tmp_path / "report.json"
    res = run(runner, "equilibrium", "--epsilon", -0.5, "--state", "entangled", "--format", "json", "--out", out)
    assert res.stdout == ""
    assert json.loads(out.read_text())["classification"] == "ESS"
