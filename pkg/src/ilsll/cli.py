"""Command line surface: gen, run, oracle, export-graph.

Exit codes: 0 success, 2 config validation, 3 runtime failure, 4 capability
(oracle size cap).
"""

from __future__ import annotations

import argparse
import os
import sys

from .core import CapabilityError, make_rng
from .experiment import load_config, run_experiment
from .featsel import friedman_samples, write_dataset_csv, FRIEDMAN_N_FEATURES
from .ils import ConfigError
from .oracles import (
    edges_to_json,
    exhaustive_optimum,
    knapsack_dp,
    true_vig,
    true_vigw,
    walsh_transform,
)
from .problems import KnapsackInstance, knapsack_generate, load_instance, nk_generate
from .serialize import canonical_dumps, write_text
from .vigw import EmpiricalVigw, export_graph
from .core import TOOL_VERSION, bits_to_str


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ilsll",
        description="Iterated local search with linkage learning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate instances and datasets")
    gen_sub = gen.add_subparsers(dest="kind", required=True)

    g_nk = gen_sub.add_parser("nk", help="NK landscape instance")
    g_nk.add_argument("--n", type=int, required=True)
    g_nk.add_argument("--k", type=int, required=True)
    g_nk.add_argument("--model", choices=["adjacent", "random"], required=True)
    g_nk.add_argument("--seed", type=int, required=True)
    g_nk.add_argument("--out", required=True)

    g_kp = gen_sub.add_parser("knapsack", help="0-1 knapsack instance")
    g_kp.add_argument("--n", type=int, required=True)
    g_kp.add_argument("--seed", type=int, required=True)
    g_kp.add_argument("--out", required=True)

    g_fr = gen_sub.add_parser("friedman", help="synthetic regression dataset")
    g_fr.add_argument("--nex", type=int, required=True)
    g_fr.add_argument("--seed", type=int, required=True)
    g_fr.add_argument("--out", required=True)

    run = sub.add_parser("run", help="execute an experiment config")
    run.add_argument("--config", required=True)

    oracle = sub.add_parser("oracle", help="ground-truth computations")
    oracle.add_argument("kind", choices=["vig", "vigw", "optimum", "knapsack-dp"])
    oracle.add_argument("--instance", required=True)
    oracle.add_argument("--out", required=True)

    export = sub.add_parser("export-graph", help="convert a vigw json file")
    export.add_argument("--in", dest="infile", required=True)
    export.add_argument("--format", choices=["dot", "graphml", "json"], required=True)
    export.add_argument("--top-edges", action="store_true")
    export.add_argument("--out", required=True)
    return parser


def cmd_gen(args):
    rng = make_rng(args.seed)
    if args.kind == "nk":
        inst = nk_generate(args.n, args.k, args.model, rng)
        inst.seed = args.seed
        write_text(args.out, inst.to_json())
    elif args.kind == "knapsack":
        inst = knapsack_generate(args.n, rng)
        inst.seed = args.seed
        write_text(args.out, inst.to_json())
    else:
        u, _, noisy, sigma = friedman_samples(args.nex, rng)
        names = [f"u{i}" for i in range(FRIEDMAN_N_FEATURES)]
        write_dataset_csv(args.out, u, noisy, names)
        meta = canonical_dumps(
            {
                "format": "friedman-meta",
                "version": 1,
                "tool_version": TOOL_VERSION,
                "seed": args.seed,
                "n_examples": args.nex,
                "noise_sigma": sigma,
            }
        )
        write_text(args.out + ".meta.json", meta)
    print(f"wrote {args.out}")


def cmd_run(args):
    cfg = load_config(args.config)
    base_dir = os.path.dirname(os.path.abspath(args.config))
    output_dir = os.environ.get("ILSLL_OUTPUT_DIR")
    rows = run_experiment(cfg, base_dir=base_dir, output_dir=output_dir)
    out_dir = output_dir or cfg.get("output_dir", ".")
    print(f"{len(rows)} runs -> {out_dir}/summary.csv")


def cmd_oracle(args):
    inst = load_instance(args.instance)
    if args.kind == "vig":
        spectrum = walsh_transform(inst)
        edges = true_vig(spectrum)
        write_text(args.out, edges_to_json(inst.n, edges))
    elif args.kind == "vigw":
        tv = true_vigw(inst)
        edges = tv.edge_set()
        write_text(args.out, edges_to_json(inst.n, edges, strengths=tv.strengths))
    elif args.kind == "optimum":
        bits, fitness = exhaustive_optimum(inst)
        write_text(
            args.out,
            canonical_dumps(
                {
                    "format": "optimum",
                    "version": 1,
                    "tool_version": TOOL_VERSION,
                    "bits": bits_to_str(bits),
                    "fitness": fitness,
                }
            ),
        )
    else:  # knapsack-dp
        if not isinstance(inst, KnapsackInstance):
            raise ConfigError("knapsack-dp oracle needs a knapsack instance")
        write_text(
            args.out,
            canonical_dumps(
                {
                    "format": "optimum",
                    "version": 1,
                    "tool_version": TOOL_VERSION,
                    "fitness": float(knapsack_dp(inst)),
                }
            ),
        )
    print(f"wrote {args.out}")


def cmd_export_graph(args):
    try:
        with open(args.infile, "r", encoding="utf-8") as fh:
            graph = EmpiricalVigw.from_json(fh.read())
    except FileNotFoundError:
        raise ConfigError(f"no such file: {args.infile}")
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed vigw file {args.infile}: {exc}")
    text = export_graph(graph, args.format, top_edges_only=args.top_edges)
    write_text(args.out, text)
    print(f"wrote {args.out}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            cmd_gen(args)
        elif args.command == "run":
            cmd_run(args)
        elif args.command == "oracle":
            cmd_oracle(args)
        elif args.command == "export-graph":
            cmd_export_graph(args)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # runtime failures map to a stable exit code
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
