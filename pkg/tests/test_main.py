import pytest
import argparse
import json
from pathlib import Path
import sys
import os

import pandas as pd

# Add src directory to path
src_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, src_path)

from main import _prefix_lengths, build_plan, main, parse_args

FIXTURES_DIR = Path(__file__).parent / 'fixtures'

DATA_ARGS = [
    "--features", str(FIXTURES_DIR / 'features_small.csv'),
    "--devices", str(FIXTURES_DIR / 'devices_small.csv'),
    "--costs", str(FIXTURES_DIR / 'costs_small.csv'),
    "--train-frac", "0.5",
]
FAST_CE = ["--eta", "20", "--tmax", "10"]


# --- argument parsing ---

def test_prefix_length_range_is_inclusive():
    assert _prefix_lengths("9:30:3") == [9, 12, 15, 18, 21, 24, 27, 30]
    assert _prefix_lengths("9,12") == [9, 12]
    with pytest.raises(argparse.ArgumentTypeError):
        _prefix_lengths("9:30")


def test_build_plan_for_sweep():
    args = parse_args(["sweep", *DATA_ARGS, "--selectors", "ce,vga", "--budgets", "1,2.5", "--seeds", "3,4"])
    plan = build_plan(args)
    assert plan.selectors == ("ce", "vga")
    assert plan.budgets == (1.0, 2.5)
    assert plan.seeds == (3, 4)
    assert plan.ce_config.seed == 3


def test_run_defaults_to_an_unlimited_budget():
    plan = build_plan(parse_args(["run", *DATA_ARGS]))
    assert plan.budgets == (float("inf"),)
    assert plan.selectors == ("ce",)


def test_config_file_supplies_defaults(tmp_path):
    config_file = tmp_path / "run.env"
    config_file.write_text("selector=cga\nbudget=3\nmax-depth=none\n")
    args = parse_args(["--config", str(config_file), "run", *DATA_ARGS])
    assert args.selector == "cga"
    assert args.budget == 3.0
    assert args.max_depth is None


def test_command_line_overrides_config_file(tmp_path):
    config_file = tmp_path / "run.env"
    config_file.write_text("selector=cga\n")
    args = parse_args(["--config", str(config_file), "run", *DATA_ARGS, "--selector", "vga"])
    assert args.selector == "vga"


def test_config_file_after_the_subcommand(tmp_path):
    config_file = tmp_path / "sweep.env"
    config_file.write_text("selectors=cga,rga\nbudgets=2,4\n")
    args = parse_args(["sweep", "--config", str(config_file), *DATA_ARGS])
    plan = build_plan(args)
    assert plan.selectors == ("cga", "rga")
    assert plan.budgets == (2.0, 4.0)


def test_missing_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


# --- commands ---

def test_run_writes_results_and_report(tmp_path):
    out, report = tmp_path / "run.csv", tmp_path / "report.json"
    status = main(["run", *DATA_ARGS, "--selector", "brute", "--budget", "2",
                   "--out", str(out), "--report-json", str(report)])
    assert status == 0
    row = pd.read_csv(out, dtype={"selected_mask": str}).iloc[0]
    assert row["selector"] == "brute"
    assert row["selected_mask"] == "100"
    assert row["risk"] == 0.0
    assert row["run_id"] == "m3-l2-brute-s0"
    payload = json.loads(report.read_text())
    assert payload["selected_mask"] == "100"
    assert payload["lambda"] == 2.0
    assert len(payload["confusion"]) == 3


def test_run_writes_ce_trace(tmp_path):
    trace = tmp_path / "trace.jsonl"
    status = main(["run", *DATA_ARGS, *FAST_CE, "--budget", "3", "--out", str(tmp_path / "run.csv"),
                   "--trace", str(trace)])
    assert status == 0
    first = json.loads(trace.read_text().splitlines()[0])
    assert first["iteration"] == 1
    assert len(first["probabilities"]) == 3


def test_run_to_stdout(capsys):
    assert main(["run", *DATA_ARGS, "--selector", "cga", "--budget", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("run_id,selector")
    assert len(lines) == 2


def test_missing_costs_file_exits_with_one(capsys):
    args = [arg if not arg.endswith("costs_small.csv") else "missing.csv" for arg in DATA_ARGS]
    assert main(["run", *args]) == 1
    assert "Error: Costs file not found: missing.csv" in capsys.readouterr().err


def test_invalid_train_fraction_exits_with_one(capsys):
    assert main(["run", *DATA_ARGS, "--train-frac", "1.5"]) == 1
    assert "Error:" in capsys.readouterr().err


def test_synth_then_run(tmp_path):
    instance = tmp_path / "instance"
    assert main(["synth", "--m-features", "5", "--rows-per-device", "8", "--seed", "7",
                 "--out-dir", str(instance)]) == 0
    out = tmp_path / "run.csv"
    assert main(["run", "--features", str(instance / "features.csv"), "--devices", str(instance / "devices.csv"),
                 "--costs", str(instance / "costs.csv"), "--selector", "vga", "--budget", "4",
                 "--out", str(out)]) == 0
    row = pd.read_csv(out).iloc[0]
    assert row["m"] == 5
    assert row["total_cost"] <= 4


def test_run_on_a_generated_instance(tmp_path):
    out = tmp_path / "run.csv"
    assert main(["run", "--synthetic", "--m-features", "4", "--rows-per-device", "8",
                 "--selector", "rga", "--budget", "3", "--out", str(out)]) == 0
    assert pd.read_csv(out).iloc[0]["selector"] == "rga"


def test_sweep_then_summarize(tmp_path):
    results, surface, summary = tmp_path / "results.csv", tmp_path / "surface.csv", tmp_path / "summary.csv"
    assert main(["sweep", *DATA_ARGS, *FAST_CE, "--selectors", "ce,vga", "--budgets", "2,3",
                 "--prefix-lengths", "2:3:1", "--out", str(results), "--surface", str(surface)]) == 0
    assert len(pd.read_csv(results)) == 2 * 2 * 2
    assert len(pd.read_csv(surface)) == 4
    assert main(["summarize", "--results", str(results), "--out", str(summary)]) == 0
    frame = pd.read_csv(summary)
    assert frame["selector"].tolist() == ["ce", "ce", "vga", "vga"]
    assert frame["runs"].tolist() == [2, 2, 2, 2]


def test_summarize_rejects_foreign_csv(tmp_path, capsys):
    foreign = tmp_path / "foreign.csv"
    foreign.write_text("a,b\n1,2\n")
    assert main(["summarize", "--results", str(foreign)]) == 1
    assert "lacks column" in capsys.readouterr().err


def test_rank_to_stdout(capsys):
    assert main(["rank", *DATA_ARGS]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "feature"
    assert lines[1] == "f_a"
    assert sorted(lines[1:]) == ["f_a", "f_b", "f_c"]


def test_rank_from_file(tmp_path):
    out = tmp_path / "ranking.csv"
    assert main(["rank", *DATA_ARGS, "--rank-scheme", "file",
                 "--ranking", str(FIXTURES_DIR / 'ranking_reversed.csv'), "--out", str(out)]) == 0
    assert out.read_text().splitlines() == ["feature", "f_c", "f_b", "f_a"]


def test_compare(tmp_path):
    out = tmp_path / "compare.csv"
    assert main(["compare", *DATA_ARGS, "--prefix-lengths", "1,3", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert frame["classifier"].tolist() == ["tree", "gnb", "tree", "gnb"]
    assert frame["m"].tolist() == [1, 1, 3, 3]
