"""Command-line entry point for the cost-aware feature selection toolkit.

Subcommands:
    run        one selector at one budget
    sweep      (prefix length x budget x selector x seed) grid to a long-format CSV
    synth      write a synthetic features/devices/costs instance
    rank       emit a feature ordering
    compare    decision tree vs Gaussian NB over feature prefixes
    summarize  mean/std risk per (selector, budget) from a results CSV

CSV goes to stdout unless --out is given; progress and errors go to stderr.
"""

import sys
import os
import argparse
import json
from typing import Any, Callable, Dict, List, Optional, Sequence

from dotenv import dotenv_values
import pandas as pd

# Add src directory to path if not already present
src_path = os.path.abspath(os.path.dirname(__file__))
if src_path not in sys.path:
    sys.path.insert(0, src_path)

import config
from ingest import stratified_split
from models import (
    RANK_SCHEMES,
    SELECTOR_NAMES,
    CEConfig,
    ClassifierConfig,
    ExperimentPlan,
    SynthSpec,
)
from ranking import rank_features, write_ranking
from synthgen import write_instance
from sweep import (
    open_source,
    compare_classifiers,
    difference_surface,
    load_problem,
    result_row,
    results_frame,
    run_single,
    run_sweep,
    summarize,
    write_frame,
)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _list_of(convert: Callable[[str], Any]) -> Callable[[str], List[Any]]:
    """argparse type for comma-separated lists."""
    def parse(text: str) -> List[Any]:
        items = [item.strip() for item in str(text).split(",") if item.strip()]
        try:
            return [convert(item) for item in items]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list '{text}'")
    return parse


def _prefix_lengths(text: str) -> List[int]:
    """'9,12,15' or an inclusive range 'start:stop:step' such as '9:30:3'."""
    if ":" in text:
        try:
            parts = [int(part) for part in text.split(":")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid prefix range '{text}'")
        if len(parts) != 3 or parts[2] < 1:
            raise argparse.ArgumentTypeError(f"prefix range must be start:stop:step with step >= 1, got '{text}'")
        return list(range(parts[0], parts[1] + 1, parts[2]))
    return _list_of(int)(text)


def _optional_depth(text: str) -> Optional[int]:
    return None if str(text).strip().lower() in ("none", "inf", "unbounded") else int(text)


# --- Parser ---

def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("data")
    group.add_argument("--features", help="features.csv ('-' for stdin)")
    group.add_argument("--devices", help="devices.csv (label,type,brand[,name])")
    group.add_argument("--costs", help="costs.csv (component levels or numeric)")
    group.add_argument("--loss", help="loss.csv; default is 2*[type differs] + [brand differs]")
    group.add_argument("--synthetic", action="store_true", help="generate a synthetic instance instead of loading CSVs")
    _add_synth_flags(group)
    group.add_argument("--synth-seed", type=int, default=0, help="seed of the generated instance (default: 0)")


def _add_synth_flags(group) -> None:
    group.add_argument("--n-devices", type=int, default=4)
    group.add_argument("--m-features", type=int, default=10)
    group.add_argument("--n-informative", type=int, default=2)
    group.add_argument("--rows-per-device", type=int, default=40)
    group.add_argument("--separation", type=float, default=10.0)
    group.add_argument("--noise", type=float, default=1.0)
    group.add_argument("--cost-cycle", type=_list_of(float), default=[1.0, 2.0, 3.0])


def _add_split_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    parser.add_argument("--train-frac", type=float, default=config.DEFAULT_TRAIN_FRACTION)


def _add_classifier_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("classifier")
    group.add_argument("--classifier", choices=["tree", "gnb"], default="tree")
    group.add_argument("--max-depth", type=_optional_depth, default=config.TREE_MAX_DEPTH,
                       help="tree depth limit, or 'none' (default: %(default)s)")
    group.add_argument("--min-split", type=int, default=config.TREE_MIN_SPLIT)


def _add_selector_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("selectors")
    group.add_argument("--eta", type=int, default=config.CE_ETA)
    group.add_argument("--tmax", type=int, default=config.CE_TMAX)
    group.add_argument("--rho", type=float, default=config.CE_RHO)
    group.add_argument("--alpha", type=float, default=config.CE_ALPHA)
    group.add_argument("--beta", type=float, default=config.CE_BETA)
    group.add_argument("--brute-limit", type=int, default=config.BRUTE_FORCE_M_LIMIT)


def _add_rank_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rank-scheme", choices=RANK_SCHEMES, default="single_risk")
    parser.add_argument("--ranking", help="ordering file for --rank-scheme file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskselect",
        description="Budget-constrained feature selection minimizing misclassification risk.",
    )
    parser.add_argument("--config", help="KEY=value file of flag defaults (keys are flag names)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="run one selector at one budget")
    _add_data_flags(run)
    _add_split_flags(run)
    _add_classifier_flags(run)
    _add_selector_flags(run)
    run.add_argument("--selector", choices=SELECTOR_NAMES, default="ce")
    run.add_argument("--budget", type=float, default=float("inf"))
    run.add_argument("--out", help="results CSV (default: stdout)")
    run.add_argument("--report-json", help="write the RiskReport as JSON")
    run.add_argument("--trace", help="write the CE trace as JSON lines")

    sweep = subparsers.add_parser("sweep", help="run a selector/budget/prefix/seed grid")
    _add_data_flags(sweep)
    _add_split_flags(sweep)
    _add_classifier_flags(sweep)
    _add_selector_flags(sweep)
    _add_rank_flags(sweep)
    sweep.add_argument("--selectors", type=_list_of(str), default=list(SELECTOR_NAMES))
    sweep.add_argument("--budgets", type=_list_of(float), required=False)
    sweep.add_argument("--budget", type=float, help="single budget (alternative to --budgets)")
    sweep.add_argument("--seeds", type=_list_of(int), help="seeds (default: --seed)")
    sweep.add_argument("--prefix-lengths", type=_prefix_lengths, default=[],
                       help="'9,12,15' or '9:30:3'; default: all features")
    sweep.add_argument("--workers", type=int, default=config.DEFAULT_WORKERS)
    sweep.add_argument("--out", help="results CSV (default: stdout)")
    sweep.add_argument("--surface", help="also write the CE minus VGA risk surface to this CSV")

    synth = subparsers.add_parser("synth", help="write a synthetic instance")
    synth_group = synth.add_argument_group("instance")
    _add_synth_flags(synth_group)
    synth.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    synth.add_argument("--out-dir", required=True, help="directory for features.csv, devices.csv, costs.csv")

    rank = subparsers.add_parser("rank", help="emit a feature ordering")
    _add_data_flags(rank)
    _add_split_flags(rank)
    _add_classifier_flags(rank)
    _add_rank_flags(rank)
    rank.add_argument("--out", help="ordering CSV (default: stdout)")

    compare = subparsers.add_parser("compare", help="compare classifiers over feature prefixes")
    _add_data_flags(compare)
    _add_split_flags(compare)
    _add_classifier_flags(compare)
    _add_rank_flags(compare)
    compare.add_argument("--prefix-lengths", type=_prefix_lengths, default=[])
    compare.add_argument("--out", help="comparison CSV (default: stdout)")

    summary = subparsers.add_parser("summarize", help="mean/std risk per selector and budget")
    summary.add_argument("--results", required=True, help="results CSV written by sweep")
    summary.add_argument("--out", help="summary CSV (default: stdout)")

    # parse_args reads --config before the subcommand is parsed, so it may sit on either side of it
    for subparser in subparsers.choices.values():
        subparser.add_argument("--config", help="KEY=value file of flag defaults (keys are flag names)")
    return parser


# --- Config file ---

def _config_defaults(path: str, subparser: argparse.ArgumentParser) -> Dict[str, Any]:
    """Maps a KEY=value file onto argparse defaults for one subcommand.

    String defaults pass through each flag's `type`, so values are converted
    like command-line input. Unknown keys are reported and ignored.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    actions = {action.dest: action for action in subparser._actions}
    defaults: Dict[str, Any] = {}
    for key, value in dotenv_values(path).items():
        dest = key.strip().lstrip("-").replace("-", "_").lower()
        action = actions.get(dest)
        if action is None or value is None:
            _log(f"Warning: ignoring unknown config key '{key}'")
            continue
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = value.strip().lower() in ("1", "true", "yes", "on")
        else:
            defaults[dest] = value
    return defaults


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if known.config:
        subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        command = next((token for token in rest if token in subparsers.choices), None)
        if command is not None:
            subparser = subparsers.choices[command]
            subparser.set_defaults(**_config_defaults(known.config, subparser))
    return parser.parse_args(argv)


# --- Plan construction ---

def _classifier_config(args: argparse.Namespace) -> ClassifierConfig:
    return ClassifierConfig(kind=args.classifier, max_depth=args.max_depth, min_split=args.min_split)


def _synth_spec(args: argparse.Namespace, seed: int) -> SynthSpec:
    return SynthSpec(
        n_devices=args.n_devices,
        m_features=args.m_features,
        n_informative=args.n_informative,
        rows_per_device=args.rows_per_device,
        class_separation=args.separation,
        noise_std=args.noise,
        seed=seed,
        cost_cycle=tuple(args.cost_cycle),
    )


def build_plan(args: argparse.Namespace) -> ExperimentPlan:
    """ExperimentPlan from parsed run/sweep/rank/compare arguments."""
    selectors = getattr(args, "selectors", None) or [getattr(args, "selector", "ce")]
    budgets = getattr(args, "budgets", None)
    if not budgets:
        budget = getattr(args, "budget", None)
        budgets = [budget if budget is not None else float("inf")]
    seeds = getattr(args, "seeds", None) or [args.seed]
    ce_config = CEConfig()
    if hasattr(args, "eta"):
        ce_config = CEConfig(eta=args.eta, t_max=args.tmax, rho=args.rho, alpha=args.alpha, beta=args.beta,
                             seed=seeds[0])
    return ExperimentPlan(
        selectors=tuple(selectors),
        budgets=tuple(budgets),
        seeds=tuple(seeds),
        prefix_lengths=tuple(getattr(args, "prefix_lengths", None) or ()),
        features_path=args.features,
        devices_path=args.devices,
        costs_path=args.costs,
        loss_path=args.loss,
        synth_spec=_synth_spec(args, args.synth_seed) if args.synthetic else None,
        classifier_config=_classifier_config(args),
        ce_config=ce_config,
        train_fraction=args.train_frac,
        rank_scheme=getattr(args, "rank_scheme", "single_risk"),
        ranking_path=getattr(args, "ranking", None),
        brute_m_limit=getattr(args, "brute_limit", config.BRUTE_FORCE_M_LIMIT),
        workers=getattr(args, "workers", 1),
        output_path=getattr(args, "out", None),
    )


# --- Commands ---

def cmd_run(args: argparse.Namespace) -> int:
    plan = build_plan(args)
    seed = plan.seeds[0]
    budget = plan.budgets[0]
    _log(f"--- Running '{plan.selectors[0]}' at budget {budget:g} ---")
    result = run_single(plan)

    row = result_row(result, plan.classifier_config.kind, len(result.selection), budget, seed)
    write_frame(results_frame([row]), plan.output_path)
    if args.report_json:
        payload = result.report.to_dict()
        payload.update(selector=result.selector_name, wall_time_ms=result.wall_time_ms)
        payload["lambda"] = budget
        with open(args.report_json, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
    if args.trace:
        if result.trace is None:
            _log("Warning: --trace only applies to the 'ce' selector; no trace written")
        else:
            result.trace.write_jsonl(args.trace)
    _log(f"Selected {result.report.selection.n_selected} feature(s): risk={result.report.risk:.6f} "
         f"cost={result.report.total_cost:g} macro_f1={result.report.macro_f1:.4f}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    plan = build_plan(args)
    cells = len(plan.seeds) * max(1, len(plan.prefix_lengths)) * len(plan.budgets) * len(plan.selectors)
    _log(f"--- Sweep: {cells} cells, {plan.workers} worker(s) ---")
    results = run_sweep(plan)
    write_frame(results, plan.output_path)
    if args.surface:
        write_frame(difference_surface(results), args.surface)
    skipped = int((results["status"] == "skipped").sum())
    _log(f"--- Sweep finished: {len(results)} rows ({skipped} skipped) ---")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    paths = write_instance(_synth_spec(args, args.seed), args.out_dir)
    for name, path in paths.items():
        _log(f"Wrote {name}: {path}")
    return 0


def _ranked(args: argparse.Namespace):
    plan = build_plan(args)
    problem = load_problem(plan)
    split = stratified_split(problem.dataset, plan.train_fraction, args.seed)
    ranking_source = open_source(plan.ranking_path, "Ranking") if plan.rank_scheme == "file" else None
    order = rank_features(
        problem.dataset, split, problem.costs, problem.loss, plan.classifier_config,
        scheme=plan.rank_scheme, ranking_source=ranking_source, seed=args.seed,
    )
    return plan, problem, split, order


def cmd_rank(args: argparse.Namespace) -> int:
    _, problem, _, order = _ranked(args)
    if args.out:
        write_ranking(order, problem.dataset.feature_names, args.out)
    else:
        pd.DataFrame({"feature": [problem.dataset.feature_names[k] for k in order]}).to_csv(sys.stdout, index=False)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    plan, problem, split, order = _ranked(args)
    lengths = list(plan.prefix_lengths) or [problem.dataset.m]
    configs = [
        ClassifierConfig(kind=kind, max_depth=args.max_depth, min_split=args.min_split)
        for kind in ("tree", "gnb")
    ]
    write_frame(compare_classifiers(problem, split, order, lengths, configs), args.out)
    return 0


def cmd_summarize(args: argparse.Namespace) -> int:
    results = pd.read_csv(open_source(args.results, "Results"), dtype={"selected_mask": str})
    missing = [column for column in ("selector", "lambda", "risk", "status") if column not in results.columns]
    if missing:
        raise ValueError(f"Results file lacks column(s) {missing}")
    write_frame(summarize(results), args.out)
    return 0


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "rank": cmd_rank,
    "compare": cmd_compare,
    "summarize": cmd_summarize,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Returns the process exit status: 0 ok, 1 input/validation error.
    Usage errors exit with status 2 from argparse."""
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except (FileNotFoundError, ValueError, OSError) as e:
        _log(f"Error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
