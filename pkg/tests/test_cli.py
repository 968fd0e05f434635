import json
import math

import pytest

from freespace_rabi import __version__
from freespace_rabi.cli import PARAMS, UsageError, build_parser, main, parse_config
from freespace_rabi.records import read_records


def test_parse_scan_n_happy_path():
    cfg = parse_config(["scan-n", "--theta", "1.5707963", "--n-grid", "25,50,100,200,400"])
    assert cfg.command == "scan-n"
    assert cfg.params["n_grid"] == [25, 50, 100, 200, 400]
    assert cfg.params["theta"] == 1.5707963


def test_invariant_gate_names_key():
    with pytest.raises(UsageError, match="beta"):
        parse_config(["collision", "--beta", "10", "--gamma", "1", "--dt", "0.01"])


def test_missing_required_key():
    with pytest.raises(UsageError, match="gamma"):
        parse_config(["bloch"])


def test_precedence(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"gamma": 2.0, "omega": 300.0}))
    cfg = parse_config(["bloch", "--config", str(conf), "--omega", "400"])
    assert cfg.params == {"gamma": 2.0, "omega": 400.0, "theta": math.pi / 2}


def test_unknown_config_key(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"gamma": 1.0, "colour": "red"}))
    with pytest.raises(UsageError, match="colour"):
        parse_config(["bloch", "--config", str(conf)])


def test_unknown_flag_is_usage_error(capsys):
    assert main(["bloch", "--gama", "1"]) == 1


def test_mollow_check_default(capsys):
    assert main(["mollow-check"]) == 0
    out = capsys.readouterr().out
    d = float(out.split("trace_distance=")[1].split()[0])
    assert d <= 1e-8


def test_scan_n_writes_csv(tmp_path, capsys):
    path = tmp_path / "n.csv"
    assert main(["scan-n", "--output", str(path)]) == 0
    slope = float(capsys.readouterr().out.split("slope=")[1].split()[0])
    assert abs(slope + 1) < 0.1
    assert len(read_records(path)) == 5


def test_scan_n_default_output_in_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["scan-n"]) == 0
    assert (tmp_path / "scan-n.csv").exists()


def test_unwritable_output(tmp_path):
    assert main(["scan-n", "--output", str(tmp_path / "missing" / "x.csv")]) == 3


def test_numeric_failure_exit_code(tmp_path):
    assert main(["scan-n", "--theta", "0", "--output", str(tmp_path / "z.csv")]) == 2


def test_identical_invocations_identical_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["scan-area", "--areas", "1,2", "--output", str(a)]) == 0
    assert main(["scan-area", "--areas", "1,2", "--output", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["jc", "--n-mean", "9", "--samples", "2001"],
        ["bloch", "--gamma", "1"],
        ["collision", "--gamma", "1", "--beta=-2j", "--dt", "0.001", "--t", "0.5", "--n-anc", "4"],
        ["nprime", "--ratios", "50"],
        ["scan-gamma", "--gammas", "0.001,0.003"],
    ],
)
def test_commands_run(argv, tmp_path):
    assert main(argv + ["--output", str(tmp_path / "o.csv")]) == 0


@pytest.mark.parametrize("command", sorted(PARAMS))
def test_help_lists_every_key(command, capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([command, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for key in PARAMS[command]:
        assert f"--{key}" in text
    assert text.count("default:") + text.count("required") >= len(PARAMS[command])


def test_version(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--version"])
    assert __version__ in capsys.readouterr().out
