"""Command-line interface.

Subcommands: extract, metrics, centrality, control, modules, predict,
report. Network inputs accept either a TSV edge list or a source tree.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import centrality as centrality_mod
from . import control as control_mod
from . import metrics as metrics_mod
from . import modules as modules_mod
from . import netio
from . import predict as predict_mod
from . import report as report_mod
from .extract import ExtractOptions, build_network, scan_sources
from .report import PipelineConfig, _jsonable, bundle_to_json


def _emit(payload, path):
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2, allow_nan=False)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _load_net(path: str, ext: str = ".java", fold_nested: bool = False):
    p = Path(path)
    if p.is_dir():
        options = ExtractOptions(ext=ext, fold_nested=fold_nested)
        entities = scan_sources(p, options)
        if not entities:
            raise SystemExit(f"error: no type declarations under {p}")
        return build_network(entities, options)
    return netio.load_edgelist(p)


def cmd_extract(args) -> int:
    options = ExtractOptions(ext=args.ext, fold_nested=args.fold_nested)
    diagnostics = []
    entities = scan_sources(args.root, options, diagnostics=diagnostics)
    if not entities:
        print(f"no type declarations under {args.root}", file=sys.stderr)
        return 1
    net = build_network(entities, options, diagnostics=diagnostics)
    netio.save_edgelist(net, args.output)
    for diag in diagnostics:
        print(f"note: {diag.path}: {diag.message}", file=sys.stderr)
    print(f"extracted {len(entities)} types -> n={net.n} m={net.m} ({args.output})")
    return 0


def cmd_metrics(args) -> int:
    net = _load_net(args.net)
    stats = metrics_mod.network_stats(
        net, degree=args.degree, er_samples=args.er_samples,
        seed=args.seed, jobs=args.jobs,
    )
    _emit(stats, args.json)
    hist_path = args.histogram
    if hist_path is None and args.json:
        hist_path = args.json + ".hist.tsv"
    if hist_path:
        deg = metrics_mod.degree_stats(net)
        degrees = sorted(set(deg.p_k) | set(deg.p_k_in) | set(deg.p_k_out))
        with open(hist_path, "w") as out:
            out.write("degree\tcount_total\tcount_in\tcount_out\n")
            for k in degrees:
                out.write(
                    f"{k}\t{deg.p_k.get(k, 0)}\t{deg.p_k_in.get(k, 0)}\t{deg.p_k_out.get(k, 0)}\n"
                )
    return 0


def cmd_centrality(args) -> int:
    net = _load_net(args.net)
    rows = centrality_mod.node_metrics(net, jobs=args.jobs)
    by_in, by_out = centrality_mod.rank_hubs(net, top=args.top)
    by_cc, by_bc = centrality_mod.rank_seeds(net, top=args.top, jobs=args.jobs)
    payload = {
        "nodes": rows,
        "hubs_by_k_in": [dict(zip(("name", "k_in", "k_out"), r)) for r in by_in],
        "hubs_by_k_out": [dict(zip(("name", "k_in", "k_out"), r)) for r in by_out],
        "seeds_by_cc": [dict(zip(("name", "cc", "bc"), r)) for r in by_cc],
        "seeds_by_bc": [dict(zip(("name", "cc", "bc"), r)) for r in by_bc],
    }
    if args.undirected:
        bc = centrality_mod.betweenness(net, undirected=True, jobs=args.jobs)
        payload["bc_undirected"] = {net.names[i]: float(b) for i, b in enumerate(bc)}
    _emit(payload, args.json)
    return 0


def cmd_control(args) -> int:
    net = _load_net(args.net)
    gamma = None
    try:
        gamma = metrics_mod.fit_power_law(
            (net.in_degrees() + net.out_degrees()).tolist()
        ).gamma
    except (ValueError, metrics_mod.DegenerateFitError):
        pass
    rep = control_mod.driver_nodes(net, gamma=gamma)
    payload = {
        "n_d": rep.n_d,
        "fraction": rep.fraction,
        "matching_size": rep.matching_size,
        "estimate": rep.estimate,
        "drivers": [net.names[v] for v in rep.drivers],
    }
    _emit(payload, args.json)
    return 0


def cmd_modules(args) -> int:
    net = _load_net(args.net)
    runs = {
        "cnm": lambda: modules_mod.detect_greedy_modularity(net),
        "lpa": lambda: modules_mod.detect_label_propagation(net, seed=args.seed),
        "gp": lambda: modules_mod.detect_structural_modules(net, seed=args.seed),
    }
    part = runs[args.algo]()
    payload = {
        "algo": args.algo,
        "module_count": part.module_count,
        "modularity": modules_mod.modularity(net, part),
        "assignment": {net.names[i]: m for i, m in enumerate(part.assignment)},
    }
    if net.packages is not None and all(p is not None for p in net.packages):
        payload["nmi_vs_packages"] = modules_mod.nmi(part, modules_mod.package_partition(net))
    if args.levels:
        tree = modules_mod.build_hierarchy(net, min_module=args.min_module, seed=args.seed)
        payload["hierarchy"] = [
            {"module_count": lvl.module_count, "assignment": list(lvl.assignment)}
            for lvl in tree.levels
        ]
    _emit(payload, args.json)
    if args.partition_tsv:
        with open(args.partition_tsv, "w") as out:
            for i, name in enumerate(net.names):
                out.write(f"{name}\t{part.assignment[i]}\n")
    if args.dot:
        netio.save_dot(net, args.dot, part)
    return 0


def cmd_predict(args) -> int:
    net = _load_net(args.net)
    runs = {
        "cnm": lambda: modules_mod.detect_greedy_modularity(net),
        "lpa": lambda: modules_mod.detect_label_propagation(net, seed=args.seed),
        "gp": lambda: modules_mod.detect_structural_modules(net, seed=args.seed),
    }
    part = runs[args.algo]()
    preds, rep = predict_mod.predict_packages(net, part)
    payload = {
        "algo": args.algo,
        "ca_bottom": rep.ca_bottom,
        "l_mean": rep.l_mean,
        "l_max": rep.l_max,
        "fallback_count": rep.fallback_count,
        "predicted": preds,
    }
    if args.all_levels:
        payload["ca_per_level"] = {str(k): v for k, v in rep.ca_per_level.items()}
    elif args.level is not None:
        # levels beyond the hierarchy depth have no defined accuracy
        payload["ca_per_level"] = {str(args.level): rep.ca_per_level.get(args.level)}
    _emit(payload, args.json)
    return 0


def cmd_report(args) -> int:
    config = report_mod.load_config(args.config) if args.config else PipelineConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.jobs is not None:
        config = dataclasses.replace(config, jobs=args.jobs)
    bundle = report_mod.run_pipeline(args.source, config)
    text = bundle_to_json(bundle)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    if args.export:
        net = report_mod.load_input(args.source, config)
        partition = None
        if bundle.get("partitions") and "gp" in bundle["partitions"]:
            from .network import Partition

            partition = Partition(tuple(bundle["partitions"]["gp"]["assignment"]))
        target = args.export_path or (str(args.output or "network") + "." + args.export)
        netio.export_network(net, args.export, target, partition)
    quality = bundle.get("quality")
    if quality and any(v["verdict"] == "fail" for v in quality["project"]):
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depnet",
        description="Class dependency network extraction and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="parse a source tree into an edge list")
    p.add_argument("root")
    p.add_argument("--fold-nested", action="store_true",
                   help="fold nested types into their top-level host")
    p.add_argument("--ext", default=".java", help="source file suffix")
    p.add_argument("-o", "--output", required=True, help="edge-list TSV to write")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("metrics", help="macroscopic statistics")
    p.add_argument("net")
    p.add_argument("--degree", choices=("total", "in", "out"), default="total")
    p.add_argument("--er-samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", help="write NetworkStats JSON here (default stdout)")
    p.add_argument("--histogram", help="degree histogram TSV for log-log plots")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("centrality", help="per-node centralities and rankings")
    p.add_argument("net")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--undirected", action="store_true",
                   help="also report betweenness over undirected paths")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json")
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("control", help="driver nodes via maximum matching")
    p.add_argument("net")
    p.add_argument("--json")
    p.set_defaults(func=cmd_control)

    p = sub.add_parser("modules", help="module detection")
    p.add_argument("net")
    p.add_argument("--algo", choices=("cnm", "lpa", "gp"), default="gp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--levels", action="store_true", help="also build the module hierarchy")
    p.add_argument("--min-module", type=int, default=5)
    p.add_argument("--json")
    p.add_argument("--partition-tsv", help="write fqname<TAB>module_id")
    p.add_argument("--dot", help="write DOT colored by module")
    p.set_defaults(func=cmd_modules)

    p = sub.add_parser("predict", help="package prediction from modules")
    p.add_argument("net")
    p.add_argument("--algo", choices=("cnm", "lpa", "gp"), default="gp")
    p.add_argument("--seed", type=int, default=0)
    level = p.add_mutually_exclusive_group()
    level.add_argument("--level", type=int)
    level.add_argument("--all-levels", action="store_true")
    p.add_argument("--json")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", help="full pipeline; exit 2 on any fail verdict")
    p.add_argument("source", help="source tree or edge-list TSV")
    p.add_argument("--config", help="key=value thresholds/config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("-o", "--output", help="bundle JSON path (default stdout)")
    p.add_argument("--export", choices=("edgelist", "graphml", "dot"))
    p.add_argument("--export-path")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
