"""Experiment driver: expand an instance x algorithm x run matrix, execute
runs (optionally across a process pool), and emit deterministic CSV/JSON
artifacts.  Scheduling never changes the bytes written: results are merged
in (instance, algorithm, run) order."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor

from .core import RNG_ALGORITHM, TOOL_VERSION
from .featsel import FsProblem, load_dataset, make_split
from .ils import ENGINES, PERTURBATIONS, ConfigError, IlsConfig, run_ils
from .oracles import knapsack_dp
from .problems import KnapsackInstance, load_instance, nk_generate, knapsack_generate
from .core import make_rng
from .serialize import fmt_float, write_text

SUMMARY_COLUMNS = [
    "instance",
    "engine",
    "perturbation",
    "run",
    "master_seed",
    "tool_version",
    "rng_algorithm",
    "fit",
    "err",
    "pelo",
    "hdlo",
    "hdp",
    "fdp",
    "fhrp",
    "nils",
    "ni",
]


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    validate_config(cfg, base_dir=os.path.dirname(os.path.abspath(path)))
    return cfg


def validate_config(cfg, base_dir="."):
    """Collect every validation failure before any run starts."""
    errors = []
    if not isinstance(cfg.get("master_seed"), int):
        errors.append("master_seed must be an integer")
    if not isinstance(cfg.get("runs_per_cell"), int) or cfg.get("runs_per_cell", 0) < 1:
        errors.append("runs_per_cell must be an integer >= 1")
    stop = cfg.get("stop", {})
    if ("max_iterations" in stop) == ("max_seconds" in stop):
        errors.append("stop must set exactly one of max_iterations / max_seconds")
    if not cfg.get("instances"):
        errors.append("instances list is empty")
    if not cfg.get("algorithms"):
        errors.append("algorithms list is empty")
    for i, inst in enumerate(cfg.get("instances", [])):
        routes = [k for k in ("path", "generate", "dataset") if k in inst]
        if len(routes) != 1:
            errors.append(f"instance {i}: need exactly one of path/generate/dataset")
            continue
        if "path" in inst:
            p = _resolve(inst["path"], base_dir)
            if not os.path.exists(p):
                errors.append(f"instance {i}: no such file: {inst['path']}")
        if "dataset" in inst:
            p = _resolve(inst["dataset"].get("path", ""), base_dir)
            if not os.path.exists(p):
                errors.append(f"instance {i}: no such dataset: {inst['dataset'].get('path')}")
            if inst["dataset"].get("task") not in ("classification", "regression"):
                errors.append(f"instance {i}: dataset.task must be set")
    for i, alg in enumerate(cfg.get("algorithms", [])):
        if alg.get("engine") not in ENGINES:
            errors.append(f"algorithm {i}: unknown engine {alg.get('engine')!r}")
        if alg.get("perturbation") not in PERTURBATIONS:
            errors.append(f"algorithm {i}: unknown perturbation {alg.get('perturbation')!r}")
        if alg.get("perturbation") == "vigwbp" and alg.get("engine") != "lswll2":
            errors.append(f"algorithm {i}: vigwbp requires engine lswll2")
    if errors:
        raise ConfigError("; ".join(errors))


def _resolve(path, base_dir):
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def instance_name(inst, index):
    if "name" in inst:
        return inst["name"]
    if "path" in inst:
        return os.path.splitext(os.path.basename(inst["path"]))[0].split(".")[0]
    if "dataset" in inst:
        return os.path.splitext(os.path.basename(inst["dataset"]["path"]))[0]
    gen = inst["generate"]
    return f"{gen['kind']}-{index}"


def build_problem(inst, base_dir, run_seed_path):
    """Materialize the problem for one run.

    Feature-selection datasets are re-split per run (the split seed derives
    from the run's seed path); file-backed and generated instances are
    shared by all runs.
    """
    if "path" in inst:
        return load_instance(_resolve(inst["path"], base_dir))
    if "generate" in inst:
        gen = inst["generate"]
        rng = make_rng(gen["seed"])
        if gen["kind"] == "nk":
            p = nk_generate(gen["n"], gen["k"], gen["model"], rng)
            p.seed = gen["seed"]
            return p
        if gen["kind"] == "knapsack":
            p = knapsack_generate(gen["n"], rng)
            p.seed = gen["seed"]
            return p
        raise ConfigError(f"unknown generate.kind: {gen['kind']!r}")
    ds_spec = inst["dataset"]
    dataset = load_dataset(
        _resolve(ds_spec["path"], base_dir),
        ds_spec["task"],
        ds_spec.get("target_column"),
    )
    split = make_split(dataset, tuple(run_seed_path) + (1,))
    return FsProblem(split)


def _instance_optimum(inst, base_dir):
    if inst.get("optimum") is not None:
        return float(inst["optimum"])
    if inst.get("compute_optimum") == "knapsack-dp":
        problem = build_problem(inst, base_dir, (0,))
        if not isinstance(problem, KnapsackInstance):
            raise ConfigError("compute_optimum=knapsack-dp needs a knapsack instance")
        return float(knapsack_dp(problem))
    return None


def _run_task(args):
    """Executed in a worker process; must stay top-level picklable."""
    (inst, base_dir, alg, stop, master_seed, seed_path, optimum, revisit_inclusive) = args
    problem = build_problem(inst, base_dir, seed_path)
    cfg = IlsConfig(
        problem=problem,
        engine=alg["engine"],
        perturbation=alg["perturbation"],
        max_iterations=stop.get("max_iterations"),
        max_seconds=stop.get("max_seconds"),
        seed=seed_path,
        optimum_fitness=optimum,
        revisit_inclusive=revisit_inclusive,
        collect_series=False,
    )
    report = run_ils(cfg)
    graph_json = None
    if report.graph is not None:
        graph_json = report.graph.to_json(extra={"master_seed": master_seed})
    return {
        "fit": report.fit,
        "err": report.err,
        "metrics": report.metrics,
        "ni": report.ni,
        "elapsed": report.elapsed_seconds,
        "graph_json": graph_json,
    }


def run_experiment(cfg, base_dir=".", output_dir=None):
    """Execute the whole matrix; returns the list of summary row dicts.

    Writes summary.csv, timings.csv (wall clock lives there so summary.csv
    is byte-reproducible) and one *.vigw.json per linkage-learning run.
    """
    out_dir = output_dir or cfg.get("output_dir", ".")
    out_dir = _resolve(out_dir, base_dir)
    os.makedirs(out_dir, exist_ok=True)
    master_seed = cfg["master_seed"]
    runs = cfg["runs_per_cell"]
    stop = cfg["stop"]
    revisit_inclusive = cfg.get("revisit_inclusive", False)
    parallelism = cfg.get("parallelism", 1)

    optima = [_instance_optimum(inst, base_dir) for inst in cfg["instances"]]

    tasks = []
    keys = []
    for ii, inst in enumerate(cfg["instances"]):
        name = instance_name(inst, ii)
        for ai, alg in enumerate(cfg["algorithms"]):
            for r in range(runs):
                seed_path = (master_seed, ii, ai, r)
                tasks.append(
                    (inst, base_dir, alg, stop, master_seed, seed_path,
                     optima[ii], revisit_inclusive)
                )
                keys.append((name, alg["engine"], alg["perturbation"], r))

    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]

    rows = []
    for key, result in zip(keys, results):
        name, engine, perturbation, r = key
        m = result["metrics"]
        rows.append(
            {
                "instance": name,
                "engine": engine,
                "perturbation": perturbation,
                "run": r,
                "master_seed": master_seed,
                "tool_version": TOOL_VERSION,
                "rng_algorithm": RNG_ALGORITHM,
                "fit": result["fit"],
                "err": result["err"],
                "pelo": m.get("pelo"),
                "hdlo": m.get("hdlo"),
                "hdp": m.get("hdp"),
                "fdp": m.get("fdp"),
                "fhrp": m.get("fhrp"),
                "nils": m.get("nils"),
                "ni": result["ni"],
                "_elapsed": result["elapsed"],
                "_graph_json": result["graph_json"],
            }
        )
    rows.sort(key=lambda row: (row["instance"], row["engine"], row["perturbation"], row["run"]))

    summary_lines = [",".join(SUMMARY_COLUMNS)]
    timing_lines = ["instance,engine,perturbation,run,seconds"]
    for row in rows:
        cells = []
        for col in SUMMARY_COLUMNS:
            v = row[col]
            cells.append(fmt_float(v) if isinstance(v, float) else ("" if v is None else str(v)))
        summary_lines.append(",".join(cells))
        timing_lines.append(
            f"{row['instance']},{row['engine']},{row['perturbation']},{row['run']},"
            f"{row['_elapsed']:.3f}"
        )
        if row["_graph_json"] is not None:
            fname = (
                f"{row['instance']}_{row['engine']}-{row['perturbation']}"
                f"_run{row['run']}.vigw.json"
            )
            write_text(os.path.join(out_dir, fname), row["_graph_json"])

    write_text(os.path.join(out_dir, "summary.csv"), "\n".join(summary_lines) + "\n")
    write_text(os.path.join(out_dir, "timings.csv"), "\n".join(timing_lines) + "\n")
    return rows
