import io
import json
import subprocess
import sys

import pytest

from crnpersist.analysis import analyze
from crnpersist.cli import main
from crnpersist.fileformat import corpus_dir, corpus_names, load_example, parse_network
from crnpersist.report import SCHEMA_VERSION, dumps, network_from_dict, replay_report, report_to_dict, report_to_json
from expected import expected_mismatches


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def corpus(name):
    return str(corpus_dir() / f"{name}.crn")


@pytest.mark.parametrize("name", corpus_names())
def test_expected_report(name):
    assert expected_mismatches(name) == []


def test_reduce_wnt_steps():
    code, text = run("reduce", corpus("wnt"), "--steps")
    assert code == 0
    assert text.count("step ") == 4
    final = text.split("primitive reduction:\n")[1]
    assert parse_network(final.replace("  ", "")) == parse_network("0 <-> X <-> X_n -> 0")


def test_reduce_honours_declared_sets(tmp_path):
    path = tmp_path / "decl.crn"
    path.write_text("E + S0 <-> ES0 -> E + S1\nF + S1 <-> FS1 -> F + S0\n@intermediates ES0, FS1\n")
    code, text = run("reduce", str(path), "--steps")
    assert code == 0 and text.startswith("declared intermediates {ES0, FS1} removed")
    path.write_text("E + S0 <-> ES0 -> E + S1\n@intermediates S0\n")
    assert run("reduce", str(path))[0] == 2


def test_check_drainable_lotka_volterra():
    code, text = run("check", corpus("lotka_volterra"), "--property", "drainable")
    assert code == 1
    assert "drainable siphon {N}" in text


@pytest.mark.parametrize("prop,name,code", [
    ("conservative", "phosphorylation", 0),
    ("conservative", "lotka_volterra", 1),
    ("consistent", "phosphorylation", 0),
    ("consistent", "catalyst_inflow", 1),
    ("siphon-psemiflow", "phosphorylation", 0),
    ("siphon-psemiflow", "lotka_volterra", 1),
    ("drainable", "autocatalysis", 0),
])
def test_check_exit_codes(prop, name, code):
    assert run("check", corpus(name), "--property", prop)[0] == code


def test_analyze_empty_json():
    code, text = run("analyze", corpus("empty"), "--json")
    assert code == 0
    data = json.loads(text)
    assert data["properties"]["conservative"] and data["properties"]["consistent"]
    assert replay_report(data) == []


def test_analyze_text_and_directory():
    code, text = run("analyze", corpus("ubiquitination"))
    assert code == 0 and "verdict: persistent" in text
    code, text = run("analyze", str(corpus_dir()), "--json")
    data = json.loads(text)
    assert [entry["file"] for entry in data] == [f"{n}.crn" for n in corpus_names()]


def test_analyze_assume_dissipative_flag():
    _, text = run("analyze", corpus("wnt"), "--json", "--assume-dissipative")
    data = json.loads(text)
    assert data["assumptions"] == ["dissipative"]
    assert "persistent" in {v["verdict"] for v in data["verdicts"]}


def test_siphons_command():
    code, text = run("siphons", corpus("phosphorylation"))
    assert code == 0 and text.splitlines() == ["{E, ES0}", "{S0, ES0, S1, FS1}", "{F, FS1}"]
    code, text = run("siphons", corpus("lotka_volterra"), "--classify")
    assert "critical, drainable, self-replicable" in text and "drain (" in text


def test_ptm_command():
    code, text = run("ptm", corpus("double_cascade"))
    assert code == 0 and text.rstrip().endswith("verdict: persistent")
    code, text = run("ptm", corpus("one_way_ptm"))
    assert code == 0 and "verdict: not-persistent" in text
    assert run("ptm", corpus("lotka_volterra"))[0] == 2


def test_ptm_command_reports_invalid_partition(tmp_path):
    path = tmp_path / "bad.crn"
    path.write_text("E + S0 <-> ES0 -> E + S1\n@ptm enz=S0 sub=E,S1 int=ES0\n")
    code, text = run("ptm", str(path))
    assert code == 1 and "invalid: (M1)" in text


def test_simulate_command():
    code, text = run("simulate", corpus("lotka_volterra"), "--horizon", "5")
    assert code == 0 and text.startswith("t = 5")


def test_errors_exit_two(tmp_path, capsys):
    assert run("analyze", str(tmp_path / "missing.crn"))[0] == 2
    bad = tmp_path / "bad.crn"
    bad.write_text("A -> A\n")
    assert run("analyze", str(bad))[0] == 2
    assert "line 1" in capsys.readouterr().err


def test_explosion_cap_reported(monkeypatch, capsys):
    monkeypatch.setenv("CRN_NODE_BUDGET", "1")
    assert run("siphons", corpus("phosphorylation"))[0] == 2
    assert "explosion cap" in capsys.readouterr().err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "crnpersist.cli", "check", corpus("lotka_volterra"),
                           "--property", "drainable"], capture_output=True, text=True)
    assert proc.returncode == 1


# ---------------------------------------------------------------- reports


def test_report_schema():
    data = report_to_dict(analyze(load_example("phosphorylation").network), "phosphorylation")
    assert data["schema"] == SCHEMA_VERSION
    assert set(data) == {"schema", "network", "properties", "witnesses", "reduction_trace", "verdicts", "assumptions"}
    assert network_from_dict(data) == load_example("phosphorylation").network


@pytest.mark.parametrize("name", corpus_names())
def test_reports_replay_and_are_deterministic(name):
    doc = load_example(name)
    first = report_to_json(analyze(doc.network), name)
    second = report_to_json(analyze(load_example(name).network), name)
    assert first == second
    assert replay_report(json.loads(first)) == []


def test_replay_detects_tampering():
    data = report_to_dict(analyze(load_example("phosphorylation").network))
    data["witnesses"]["conservation_law"][0] = "7"
    assert "conservation_law" in replay_report(data)
    data = report_to_dict(analyze(load_example("lotka_volterra").network))
    data["witnesses"]["minimal_siphons"][0]["drainable"] = ["1", "0", "0", "0"]
    assert replay_report(data)


def test_dumps_is_stable():
    assert dumps({"b": 1, "a": [1]}) == '{\n  "a": [\n    1\n  ],\n  "b": 1\n}\n'
