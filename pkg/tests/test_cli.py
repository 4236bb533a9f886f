import csv
import io
import json
import subprocess
import sys

import pytest

from netforge.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--deterministic")
    return code, json.loads(out)


def test_enumerate_counts(capsys):
    assert run_json(capsys, "enumerate", "--order", "4")[1]["count"] == 576
    assert run_json(capsys, "enumerate", "--order", "5", "--reduced")[1]["count"] == 56
    code, out, _ = run(capsys, "enumerate", "--order", "3", "--format", "text")
    assert code == EXIT_OK and out == "12\n"


def test_enumerate_list_and_csv(capsys):
    _, data = run_json(capsys, "enumerate", "--order", "3", "--list")
    assert len(data["squares"]) == 12
    code, out, _ = run(capsys, "enumerate", "--order", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows == [{"k": "3", "reduced": "False", "count": "12"}]


def test_enumerate_guard(capsys):
    code, _, err = run(capsys, "enumerate", "--order", "7")
    assert code == EXIT_INPUT and "out of reach" in err


def test_mates(capsys):
    _, data = run_json(capsys, "mates", "cyclic:5", "--reduced")
    assert data["mate_count"] == 3 and data["transversals"] == 15
    assert data["parity"] == {"even": 20, "odd": 0}
    _, data = run_json(capsys, "mates", "cyclic:4")
    assert data["mate_count"] == 0 and data["transversals"] == 0
    # one decomposition into transversals, labelled in 3! ways
    code, out, _ = run(capsys, "mates", "123/231/312", "--format", "text")
    assert out.startswith("6 mates, 3 transversals, 1 decompositions")
    code, out, _ = run(capsys, "mates", "123/231/312", "--format", "text", "--reduced")
    assert out.splitlines() == ["1 mates, 3 transversals, 1 decompositions", "123/312/231"]


def test_mates_bad_square(capsys):
    code, _, err = run(capsys, "mates", "123/123/312")
    assert code == EXIT_INPUT and "cannot parse" in err


def test_classify(capsys):
    _, data = run_json(capsys, "classify", "--order", "3")
    assert len(data["classes"]) == 1 and data["classes"][0]["orbit_size"] == 72
    code, out, _ = run(capsys, "classify", "--order", "5", "--format", "text")
    assert code == EXIT_OK and "2 classes" in out and "different classes" in out


def test_classify_budget_exit(capsys):
    code, _, err = run(capsys, "classify", "--order", "4", "--method", "bfs", "--budget", "10")
    assert code == EXIT_BUDGET and "budget" in err


def test_budget_environment(monkeypatch, capsys):
    monkeypatch.setenv("NETFORGE_BUDGET", "10")
    code, _, _ = run(capsys, "classify", "--order", "4", "--method", "bfs")
    assert code == EXIT_BUDGET


def test_workers_do_not_change_output(capsys):
    one = run(capsys, "classify", "--order", "5", "--deterministic")[1]
    three = run(capsys, "classify", "--order", "5", "--deterministic", "--workers", "3")[1]
    assert one == three


def test_deterministic_flag(capsys):
    _, out, _ = run(capsys, "enumerate", "--order", "3")
    assert "generated_at" in json.loads(out)
    a = run(capsys, "realize", "--order", "3", "--deterministic")[1]
    b = run(capsys, "realize", "--order", "3", "--deterministic")[1]
    assert a == b


def test_realize(capsys):
    _, data = run_json(capsys, "realize", "--order", "3")
    (v,) = data["verdicts"]
    assert v["outcome"] == "Realizable" and v["certificate"]["modulus"].endswith("+ 1")
    _, data4 = run_json(capsys, "realize", "--order", "4")
    assert [v["outcome"] for v in data4["verdicts"]] == ["Empty"]
    _, data = run_json(capsys, "realize", "--order", "6")
    assert data["verdicts"][0]["outcome"] == "Empty"
    code, out, _ = run(capsys, "realize", "--order", "4", "--format", "text", "--trace")
    assert out.startswith(f"{data4['verdicts'][0]['class_id']}: Empty") and " dead " in out


def test_realize_trace_of_tau_pair(tmp_path, capsys):
    from netforge.combinat import OlsPair
    from netforge.equivalence import tau_squares

    path = tmp_path / "tau.json"
    path.write_text(json.dumps(OlsPair(*tau_squares()[:2]).to_json()))
    code, out, _ = run(capsys, "realize", "--pair", str(path), "--format", "text", "--trace")
    assert code == EXIT_OK and "gcd(s^3 - 5*s^2 + 3*s + 1, s^2 + 4*s - 1) = 1" in out


def test_realize_from_pair_file(tmp_path, capsys):
    from netforge.combinat import OlsPair, cyclic

    path = tmp_path / "pair.json"
    path.write_text(json.dumps(OlsPair(cyclic(3, 1), cyclic(3, 2)).to_json()))
    _, data = run_json(capsys, "realize", "--pair", str(path))
    assert data["verdicts"][0]["outcome"] == "Realizable"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "realize", "--pair", str(bad))[0] == EXIT_INPUT
    assert run(capsys, "realize")[0] == EXIT_INPUT
    assert run(capsys, "realize", "--order", "7")[0] == EXIT_INPUT


def test_realize_unknown_exit(capsys):
    code, out, _ = run(capsys, "realize", "--order", "4", "--max-branches", "1", "--deterministic")
    outcome = json.loads(out)["verdicts"][0]["outcome"]
    assert (code, outcome) in {(EXIT_BUDGET, "Unknown"), (EXIT_OK, "Empty")}


def test_export_and_verify(tmp_path, capsys):
    cert, inc = tmp_path / "cert.json", tmp_path / "inc.json"
    assert run(capsys, "export", "hessian", "--out", str(cert))[0] == EXIT_OK
    assert run(capsys, "export", "incidence", "--first", "cyclic:3", "--second", "cyclic:3:2", "--out", str(inc))[0] == EXIT_OK
    code, out, _ = run(capsys, "verify", "--cert", str(cert), "--incidence", str(inc), "--format", "text")
    assert code == EXIT_OK and out == "pass\n"
    # a verdict JSON is accepted as a certificate too
    verdict = tmp_path / "verdict.json"
    run(capsys, "realize", "--order", "3", "--out", str(verdict))
    assert run(capsys, "verify", "--cert", str(verdict), "--incidence", str(inc))[0] == EXIT_OK


def test_verify_failures(tmp_path, capsys):
    cert, inc = tmp_path / "cert.json", tmp_path / "inc.json"
    run(capsys, "export", "hessian", "--out", str(cert))
    run(capsys, "export", "incidence", "--first", "cyclic:3", "--second", "cyclic:3:2", "--out", str(inc))
    data = json.loads(cert.read_text())
    data["rows"][5] = data["rows"][4]
    cert.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--cert", str(cert), "--incidence", str(inc), "--deterministic")
    assert code == 1 and json.loads(out)["problem"] == "coincident lines"
    broken = json.loads(inc.read_text())
    broken["points"] = broken["points"][1:]
    inc.write_text(json.dumps(broken))
    code, _, err = run(capsys, "verify", "--cert", str(cert), "--incidence", str(inc))
    assert code == EXIT_INPUT and "axioms" in err


def test_export_incidence_text(capsys):
    code, out, _ = run(capsys, "export", "incidence", "--first", "cyclic:3", "--second", "cyclic:3:2", "--format", "text")
    assert code == EXIT_OK and out.splitlines()[0] == "1 1 1 1" and len(out.splitlines()) == 9


def test_selftest_single(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "5", "--format", "text")
    assert code == EXIT_OK and out.startswith("[PASS]  5.")
    assert run(capsys, "selftest", "--only", "99")[0] == EXIT_INPUT


def test_bad_arguments(capsys):
    assert run(capsys, "enumerate")[0] == EXIT_INPUT
    assert run(capsys, "enumerate", "--order", "3", "--workers", "0")[0] == EXIT_INPUT
    assert run(capsys, "nonsense")[0] == EXIT_INPUT
    assert main(["--version"]) == EXIT_OK


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("enumerate", order=0).validate()
    with pytest.raises(ValueError):
        RunConfig("enumerate", budget=0).validate()


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "netforge.cli", "enumerate", "--order", "4", "--reduced", "--format", "text"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "4\n"
