import csv
import json

import pytest

from grover_suppress import cli


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_grover_single_target_n3(tmp_path):
    assert cli.main(["grover", "--n", "3", "--targets", "001", "--shots", "4096",
                     "--seed", "1", "--out", str(tmp_path)]) == 0
    rows = {r["label"]: r for r in read_csv(tmp_path / "histogram.csv")}
    assert float(rows["001"]["probability"]) == pytest.approx(0.9453125, abs=1e-9)
    assert sum(int(r["counts"]) for r in rows.values()) == 4096
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["k"] == 2
    assert summary["closed_form_probability"] == pytest.approx(summary["simulated_probability"])


def test_grover_exact_case(tmp_path):
    assert cli.main(["grover", "--n", "2", "--targets", "11", "--k", "1", "--out", str(tmp_path)]) == 0
    rows = {r["label"]: r for r in read_csv(tmp_path / "histogram.csv")}
    assert float(rows["11"]["probability"]) == pytest.approx(1.0, abs=1e-11)


def test_grover_missing_targets(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["grover", "--n", "3", "--out", str(tmp_path)])
    assert exc.value.code != 0
    assert "--targets" in capsys.readouterr().err
    assert not any(tmp_path.iterdir())


def test_grover_bad_token(tmp_path, capsys):
    with pytest.raises(SystemExit):
        cli.main(["grover", "--n", "3", "--targets", "001,01x", "--out", str(tmp_path)])
    assert "01x" in capsys.readouterr().err


def test_suppress_extremes_n3(tmp_path):
    assert cli.main(["suppress", "--n", "3", "--undesired", "000,111", "--k", "3",
                     "--out", str(tmp_path)]) == 0
    rows = {r["label"]: float(r["probability"]) for r in read_csv(tmp_path / "histogram.csv")}
    kept = [rows[l] for l in rows if l not in ("000", "111")]
    assert max(kept) - min(kept) < 1e-9
    assert rows["000"] + rows["111"] == pytest.approx(1 / 256, abs=1e-11)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["undesired_probability_before"] == 0.25
    assert [r["k"] for r in summary["sweep"]] == [1, 2, 3, 4]


def test_suppress_two_qubits_and_k0(tmp_path):
    assert cli.main(["suppress", "--n", "2", "--undesired", "00,11", "--out", str(tmp_path / "a")]) == 0
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["k"] == 1 and summary["undesired_probability_after"] == pytest.approx(0, abs=1e-12)
    assert cli.main(["suppress", "--n", "2", "--undesired", "00,11", "--k", "0",
                     "--out", str(tmp_path / "b")]) == 0
    rows = read_csv(tmp_path / "b" / "histogram.csv")
    assert all(float(r["probability"]) == pytest.approx(0.25) for r in rows)


def test_suppress_all_states_rejected(tmp_path):
    with pytest.raises(SystemExit):
        cli.main(["suppress", "--n", "1", "--undesired", "0,1", "--out", str(tmp_path)])


def test_depth_sweep(tmp_path, capsys):
    assert cli.main(["depth-sweep", "--out", str(tmp_path)]) == 0
    assert "crossover: n=3" in capsys.readouterr().out
    rows = read_csv(tmp_path / "depth_sweep.csv")
    assert len(rows) == 19
    assert rows[-1]["classical_formula"] == "3145724"
    assert rows[-1]["suppression_formula"] == "44"


def test_depth_sweep_bad_range(tmp_path):
    assert cli.main(["depth-sweep", "--n-min", "6", "--n-max", "4", "--out", str(tmp_path)]) == 1


def test_qaoa_compare_deterministic(tmp_path):
    args = ["qaoa-compare", "--p", "1", "--budget", "60", "--seed", "1"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("comparison.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rows = read_csv(tmp_path / "a" / "comparison.csv")
    modes = [r["mode"] for r in rows]
    assert modes.count("uniform") == modes.count("suppression") == 60
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["winner"] == "suppression"


def test_qaoa_compare_p0(tmp_path):
    assert cli.main(["qaoa-compare", "--p", "0", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["uniform"]["evaluations"] == 1
    assert summary["uniform"]["optimal_state_probability"] == 0.125


def test_qaoa_compare_malformed_instance(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"cities": 3, "dist": []}')
    assert cli.main(["qaoa-compare", "--instance", str(bad), "--out", str(tmp_path / "o")]) == 1
    assert "distances" in capsys.readouterr().err
    assert not (tmp_path / "o" / "summary.json").exists()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "targets": "11", "k": 0, "out": str(tmp_path / "c")}))
    assert cli.main(["grover", "--config", str(cfg), "--k", "1"]) == 0
    summary = json.loads((tmp_path / "c" / "summary.json").read_text())
    assert summary["k"] == 1 and summary["n"] == 2


def test_config_unknown_field(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "bogus": 1}))
    with pytest.raises(SystemExit):
        cli.main(["grover", "--config", str(cfg), "--targets", "11"])


def test_run_config_round_trip():
    rc = cli.RunConfig("suppress", {"n": 3, "undesired": "000,111", "k": None}, 5, "x")
    assert cli.RunConfig.from_json(rc.to_json()) == rc


def test_run_config_file_form(tmp_path):
    rc = cli.RunConfig("grover", {"n": 2, "targets": "11", "k": 1}, 0, str(tmp_path / "r"))
    path = tmp_path / "rc.json"
    path.write_text(rc.to_json())
    assert cli.main(["grover", "--config", str(path)]) == 0
    assert (tmp_path / "r" / "summary.json").exists()


def test_write_outputs_atomic(tmp_path, monkeypatch):
    class Boom(Exception):
        pass

    real = cli.os.fdopen
    calls = {"n": 0}

    def flaky(fd, *a, **k):
        calls["n"] += 1
        if calls["n"] == 2:
            cli.os.close(fd)
            raise Boom
        return real(fd, *a, **k)

    monkeypatch.setattr(cli.os, "fdopen", flaky)
    with pytest.raises(Boom):
        cli.write_outputs(tmp_path, {"a.csv": "x", "b.json": "y"})
    assert list(tmp_path.iterdir()) == []


def test_fmt_twelve_digits():
    assert cli.fmt(1 / 3) == "0.333333333333"
