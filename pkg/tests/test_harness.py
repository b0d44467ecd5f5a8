import csv
import io
import json
import subprocess
import sys

import pytest

from deformed_pb.cli import main
from deformed_pb.core import DeformParams, Regime, _regime_holds
from deformed_pb.harness import (
    CSV_COLUMNS,
    GRIDS,
    Command,
    ConfigError,
    OutputFormat,
    RunConfig,
    replay,
    run,
)


def run_lines(cfg, timestamp="T"):
    out, summary = io.StringIO(), io.StringIO()
    code, s = run(cfg, out, summary, timestamp=timestamp)
    return code, s, out.getvalue(), summary.getvalue()


def small(command, selector, **kw):
    kw.setdefault("dims", (2, 3))
    kw.setdefault("trials", 20)
    return RunConfig(command, selector, **kw)


def test_case_iii_acceptance_example():
    cfg = RunConfig(Command.VerifyMain, "iii", dims=(2, 4), trials=1000, seed=42)
    code, s, _, text = run_lines(cfg)
    assert code == 0
    assert s.trials == 2000
    assert "PASS" in text


def test_zero_trials_is_config_error():
    with pytest.raises(ConfigError):
        RunConfig(Command.VerifyMain, "iii", trials=0).validate()
    assert main(["verify", "main", "--case", "iii", "--trials", "0"]) == 2


def test_outside_regime_names_table(capsys):
    code = main(["verify", "main", "--case", "ii", "--q", "1.5", "--r", "2"])
    assert code == 2
    assert "regime table" in capsys.readouterr().err


def test_bad_flag_exits_two():
    with pytest.raises(SystemExit) as info:
        main(["verify", "main", "--case", "vi"])
    assert info.value.code == 2


def test_print_grids(capsys):
    assert main(["--print-grids"]) == 0
    text = capsys.readouterr().out
    assert "main-iii:" in text and "regimes" in text


def test_jsonl_replay_is_byte_identical_apart_from_timestamp():
    cfg = small(Command.VerifyMain, "iv")
    _, _, a, _ = run_lines(cfg, timestamp="first")
    _, _, b, _ = run_lines(cfg, timestamp="second")
    la, lb = a.splitlines(), b.splitlines()
    assert la[0] != lb[0]
    assert la[1:] == lb[1:]
    head = json.loads(la[0])["header"]
    assert head["seed"] == 0 and head["timestamp"] == "first"


def test_parallel_output_in_trial_order():
    cfg = small(Command.VerifyMain, "ii")
    _, _, a, _ = run_lines(cfg)
    _, _, b, _ = run_lines(RunConfig(**{**cfg.__dict__, "jobs": 3}))
    assert a.splitlines()[1:] == b.splitlines()[1:]
    trials = [json.loads(l)["trial"] for l in b.splitlines()[1:]]
    assert trials == list(range(len(trials)))


def test_replay_single_trial_matches_run():
    cfg = small(Command.VerifyMain, "v")
    _, _, text, _ = run_lines(cfg)
    recs = [json.loads(l) for l in text.splitlines()[1:]]
    for rec in recs[::7]:
        assert replay(cfg, rec["trial"]) == rec


@pytest.mark.parametrize("case", ["i", "ii", "iii", "iv", "v"])
def test_report_lines_respect_case_regime(case):
    _, s, text, _ = run_lines(small(Command.VerifyMain, case))
    recs = [json.loads(l) for l in text.splitlines()[1:]]
    reg = next(r for r in Regime if r.value == case)
    assert all(_regime_holds(reg, r["q"], r["r"]) for r in recs)
    assert s.worst_slack == min(r["slack"] for r in recs)


def test_default_grids_inside_regimes():
    for case in ("i", "ii", "iii", "iv", "v"):
        reg = next(r for r in Regime if r.value == case)
        for q, r in GRIDS[f"main-{case}"]:
            DeformParams(q, r, reg)


def test_csv_columns():
    cfg = small(Command.VerifyVariant, "convex", format=OutputFormat.Csv, trials=5)
    _, _, text, _ = run_lines(cfg)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 11


@pytest.mark.parametrize(
    "command, selector",
    [
        (Command.VerifyVariant, "concave"),
        (Command.VerifyConvexity, "G"),
        (Command.VerifyConvexity, "F"),
        (Command.VerifyEntropy, "lemma"),
        (Command.VerifyEntropy, "bound"),
        (Command.VerifyEntropy, "limits"),
        (Command.FrechetCheck, "both"),
        (Command.FrechetCheck, "dd"),
    ],
)
def test_other_suites_pass(command, selector):
    code, s, _, _ = run_lines(small(command, selector, trials=10))
    assert code == 0, s


def test_violation_gives_exit_one_and_replay_hint(monkeypatch):
    import dataclasses

    from deformed_pb import harness

    real = harness.variant_pb_slack

    def broken(*args, **kw):
        rep = real(*args, **kw)
        return dataclasses.replace(rep, slack=rep.slack - 1.0)

    monkeypatch.setattr(harness, "variant_pb_slack", broken)
    cfg = small(Command.VerifyVariant, "convex", trials=3, dims=(2,))
    code, s, _, text = run_lines(cfg)
    assert code == 1
    assert s.violations == 3
    assert "--seed 0 --replay-trial 0" in text
    assert replay(cfg, 1)["slack"] == s.worst_slack or not replay(cfg, 1)["holds"]


def test_single_instance_cli(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(json.dumps({"dim": 2, "re": [[1, 0.2], [0.2, 2]]}))
    b.write_text(json.dumps({"dim": 2, "re": [[0.5, 0], [0, -0.3]], "im": [[0, 0.1], [-0.1, 0]]}))
    code = main(["verify", "main", "--case", "iii", "--q", "1.5", "--r", "2",
                 "--matrix-a", str(a), "--matrix-b", str(b)])
    assert code == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["holds"] and rec["dim"] == 2


def test_single_instance_rejects_non_hermitian(tmp_path, capsys):
    a = tmp_path / "a.json"
    a.write_text(json.dumps({"dim": 2, "re": [[1, 0.2], [0.3, 2]]}))
    code = main(["verify", "main", "--case", "iii", "--q", "1.5", "--r", "2",
                 "--matrix-a", str(a), "--matrix-b", str(a)])
    assert code == 2
    assert "(0,1)" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.jsonl"
    proc = subprocess.run(
        [sys.executable, "-m", "deformed_pb", "verify", "entropy", "--suite", "lemma",
         "--trials", "5", "--dims", "2", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(out.read_text().splitlines()) == 6
