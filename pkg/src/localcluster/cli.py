"""Command-line harness: generate inputs, run pipelines, score results,
and reproduce the benchmark suites.

Exit codes: 0 success, 2 usage or validation error, 3 numeric failure.
All stochastic commands take ``--seed`` and embed the resolved
configuration in their output; ``--no-meta`` suppresses timestamps and
wall-clock fields so identical commands produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np
import scipy.linalg as sla

from . import bench
from .datagen import general_sbm, inject_outliers, knn_affinity, symmetric_sbm, three_circles, three_lines, three_moons
from .graph import Graph
from .io import read_edge_list, read_features, read_json, read_labels, write_csv, write_edge_list, write_features, write_json, write_labels
from .lce import LceParams, lce
from .metrics import evaluate, sbm_snr
from .pipelines import SslcConfig, UslcConfig, sslc_multi, sslc_single, uslc
from .runner import resolve_threads

_GEOMETRIC_KINDS = {
    "three_lines": three_lines,
    "three_circles": three_circles,
    "three_moons": three_moons,
}


def _config_from(args, skip=("func", "command_path")) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    cfg["command"] = args.command_path
    return cfg


def _parse_ids(text: str) -> list:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None


def _parse_seed_groups(text: str) -> list:
    groups = [g for g in text.replace(" ", "").split(";") if g != ""]
    if not groups:
        raise ValueError(f"expected ';'-separated seed groups, got {text!r}")
    return [_parse_ids(g) for g in groups]


def _lce_params(args) -> LceParams:
    return LceParams(walk_depth=args.walk_depth, epsilon=args.epsilon,
                     gamma=args.gamma, rejection=args.rejection)


def _ints(arr) -> list:
    return [int(x) for x in arr]


# ---------------------------------------------------------------- generate

def _cmd_generate(args) -> int:
    rng = np.random.default_rng(args.seed)
    cfg = _config_from(args)
    prefix = args.output
    if args.kind == "sbm":
        if args.n1 < 1 or args.k < 1:
            raise ValueError(f"need --n1 >= 1 and --k >= 1, got n1={args.n1}, k={args.k}")
        g, labels = symmetric_sbm(args.n1, args.k, rng)
        write_edge_list(f"{prefix}.edges.tsv", g, config=cfg, no_meta=args.no_meta)
        write_labels(f"{prefix}.labels.csv", labels, config=cfg, no_meta=args.no_meta)
    elif args.kind == "sbm-general":
        g, labels = general_sbm(args.n1, rng)
        write_edge_list(f"{prefix}.edges.tsv", g, config=cfg, no_meta=args.no_meta)
        write_labels(f"{prefix}.labels.csv", labels, config=cfg, no_meta=args.no_meta)
    elif args.kind == "geometric":
        maker = _GEOMETRIC_KINDS[args.shape]
        f = maker(rng, noise_sigma=args.noise)
        write_features(f"{prefix}.features.csv", f, config=cfg, no_meta=args.no_meta)
    elif args.kind == "knn-graph":
        f = read_features(args.features)
        g = knn_affinity(f, k=args.k_neighbors, scale_rank=args.scale_rank,
                         symmetrization=args.symmetrization, truncate=not args.exact_product)
        write_edge_list(f"{prefix}.edges.tsv", g, config=cfg, no_meta=args.no_meta)
        if f.labels is not None:
            write_labels(f"{prefix}.labels.csv", f.labels, config=cfg, no_meta=args.no_meta)
    elif args.kind == "inject-outliers":
        f = read_features(args.features)
        out = inject_outliers(f, args.fraction, rng)
        write_features(f"{prefix}.features.csv", out, config=cfg, no_meta=args.no_meta)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown generator {args.kind!r}")
    return 0


# ----------------------------------------------------------------- cluster

def _cluster_payload(args, g: Graph) -> dict:
    params = _lce_params(args)
    rng = np.random.default_rng(args.seed)
    algo = args.algo
    if algo == "lce":
        if args.seeds is None:
            raise ValueError("--seeds is required for lce")
        out = lce(g, args.n_hat, _parse_ids(args.seeds), params)
        return {
            "clusters": [_ints(out.cluster)],
            "outliers": [],
            "diagnostics": {
                "residual_norm": out.residual_norm,
                "iterations": out.iterations,
                "removed": _ints(out.removed),
                "candidate_count": int(out.candidates.size),
                "degenerate": out.degenerate,
            },
        }
    if algo == "sslc":
        if args.seeds is None:
            raise ValueError("--seeds is required for sslc")
        cfg = SslcConfig(iterations=args.iters, params=params)
        res = sslc_single(g, args.n_hat, _parse_ids(args.seeds), cfg, rng)
        return {
            "clusters": [_ints(res.cluster)],
            "outliers": [],
            "diagnostics": {
                "seeds_final": _ints(res.seeds),
                "lce_calls": res.lce_calls,
                "accept_log": [
                    {"iteration": r.iteration, "node": r.node, "overlap": r.overlap,
                     "cluster_size": r.cluster_size, "accepted": r.accepted}
                    for r in res.accept_log
                ],
            },
        }
    if algo == "sslc-multi":
        if args.seeds is None:
            raise ValueError("--seeds is required for sslc-multi")
        if args.sizes is None:
            raise ValueError("--sizes is required for sslc-multi")
        seed_groups = _parse_seed_groups(args.seeds)
        sizes = _parse_ids(args.sizes)
        cfg = SslcConfig(iterations=args.iters, params=params)
        res = sslc_multi(g, sizes, seed_groups, cfg, rng)
        return {
            "clusters": [_ints(c) for c in res.assignment.clusters],
            "outliers": _ints(res.assignment.outliers),
            "diagnostics": {
                "seeds_final": [_ints(s) for s in res.seeds],
                "conflicts": _ints(res.conflicts),
                "lce_calls": res.lce_calls,
                "accept_log": [
                    {"iteration": r.iteration, "node": r.node, "overlap": r.overlap,
                     "cluster_size": r.cluster_size, "accepted": r.accepted,
                     "cluster_index": r.cluster_index}
                    for r in res.accept_log
                ],
            },
        }
    if algo == "uslc":
        cfg = UslcConfig(min_size=args.n_min, iterations=args.iters, delta=args.delta,
                         max_clusters=args.max_clusters, params=params)
        assignment, rounds = uslc(g, cfg, rng)
        return {
            "clusters": [_ints(c) for c in assignment.clusters],
            "outliers": _ints(assignment.outliers),
            "diagnostics": {
                "rounds": [
                    {"round_index": r.round_index, "active_before": r.active_before,
                     "delta": r.delta, "anchor": r.anchor,
                     "cluster_size": int(r.cluster.size),
                     "candidate_count": r.candidate_count, "m_nnz": r.m_nnz}
                    for r in rounds
                ],
            },
        }
    raise ValueError(f"unknown algorithm {algo!r}")  # pragma: no cover


def _cmd_cluster(args) -> int:
    g = read_edge_list(args.graph)
    t0 = time.perf_counter()
    payload = _cluster_payload(args, g)
    elapsed = time.perf_counter() - t0
    payload["config"] = _config_from(args)
    if not args.no_meta:
        payload["wall_clock_seconds"] = elapsed
    write_json(args.output, payload)
    return 0


# -------------------------------------------------------------------- eval

def _cmd_eval(args) -> int:
    result = read_json(args.result)
    labels = read_labels(args.labels)
    clusters = [np.asarray(c, dtype=np.int64) for c in result.get("clusters", [])]
    outliers = np.asarray(result.get("outliers", []), dtype=np.int64)
    referenced = [c for c in clusters if c.size] + ([outliers] if outliers.size else [])
    if referenced:
        allref = np.concatenate(referenced)
        if allref.size and (allref.min() < 0 or allref.max() >= labels.size):
            raise ValueError(
                f"result references node {int(allref.max())} outside the labeled universe [0, {labels.size})")
    snr = None
    if args.snr_a is not None or args.snr_b is not None:
        if args.snr_a is None or args.snr_b is None:
            raise ValueError("--snr-a and --snr-b must be given together")
        snr = sbm_snr(args.snr_a, args.snr_b, args.snr_k)
    graph = read_edge_list(args.graph) if args.graph else None
    report = evaluate(clusters, labels, mode=args.mode, graph=graph, snr=snr)
    payload = report.to_dict()
    payload["config"] = _config_from(args)
    if args.format == "json":
        write_json(args.output, payload)
    else:
        header = ["accuracy", "outlier_count", "delta_l_norm", "snr", "jaccard_per_cluster"]
        row = [report.accuracy, report.outlier_count,
               "" if report.delta_l_norm is None else report.delta_l_norm,
               "" if report.snr is None else report.snr,
               ";".join(f"{j:.6g}" for j in report.jaccard_per_cluster)]
        write_csv(args.output, header, [row], config=_config_from(args), no_meta=args.no_meta)
    return 0


# ------------------------------------------------------------------- bench

def _cmd_bench(args) -> int:
    threads = resolve_threads(args.threads)
    cfg = _config_from(args)
    cfg["threads"] = threads
    common = dict(trials=args.trials, seed=args.seed, threads=threads,
                  output_prefix=args.output, no_meta=args.no_meta,
                  plot=not args.no_plot, config=cfg)
    if args.suite == "delta-l-table":
        rows = bench.bench_delta_l_table(iters=args.iters, **common)
    elif args.suite == "sbm-sweep":
        rows = bench.bench_sbm_sweep(quick=args.quick, iters=args.iters, **common)
    elif args.suite == "geometric":
        rows = bench.bench_geometric(iters=args.iters, **common)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown suite {args.suite!r}")
    if args.format == "json":
        write_json(f"{args.output}.json", {"config": cfg, "rows": rows})
    return 0


# ------------------------------------------------------------------ parser

def _add_lce_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--walk-depth", type=int, default=3, help="diffusion steps (default 3)")
    p.add_argument("--epsilon", type=float, default=0.8, help="candidate inflation in (0,1) (default 0.8)")
    p.add_argument("--gamma", type=float, default=0.2, help="removal fraction in [0.1,0.5] (default 0.2)")
    p.add_argument("--rejection", type=float, default=0.1, help="indicator threshold in [0.1,0.9] (default 0.1)")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="localcluster",
                                  description="Local graph clustering by sparse indicator recovery")
    sub = top.add_subparsers(dest="group", required=True)

    gen = sub.add_parser("generate", help="write synthetic graphs, features, and labels")
    gsub = gen.add_subparsers(dest="kind", required=True)

    def gen_common(p, name):
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--output", default=name, help=f"output path prefix (default {name!r})")
        p.add_argument("--no-meta", action="store_true", help="omit timestamps for byte-stable output")
        p.set_defaults(func=_cmd_generate, command_path=f"generate {name}")

    p = gsub.add_parser("sbm", help="symmetric block model, k equal communities")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n1", type=int, required=True, help="community size")
    gen_common(p, "sbm")
    p = gsub.add_parser("sbm-general", help="three communities of sizes n1, 2n1, 5n1")
    p.add_argument("--n1", type=int, required=True)
    gen_common(p, "sbm-general")
    p = gsub.add_parser("geometric", help="planted point clouds in 100 dimensions")
    p.add_argument("--shape", choices=sorted(_GEOMETRIC_KINDS), required=True)
    p.add_argument("--noise", type=float, default=0.15, help="coordinate noise sigma (default 0.15)")
    gen_common(p, "geometric")
    p = gsub.add_parser("knn-graph", help="locally scaled Gaussian KNN affinity graph")
    p.add_argument("--features", required=True, help="feature CSV path")
    p.add_argument("--k-neighbors", type=int, default=15)
    p.add_argument("--scale-rank", type=int, default=10)
    p.add_argument("--symmetrization", choices=("product", "max", "average"), default="product")
    p.add_argument("--exact-product", action="store_true", help="skip per-row truncation in product mode")
    gen_common(p, "knn-graph")
    p = gsub.add_parser("inject-outliers", help="append standard-normal rows labeled -1")
    p.add_argument("--features", required=True)
    p.add_argument("--fraction", type=float, required=True)
    gen_common(p, "inject-outliers")

    clu = sub.add_parser("cluster", help="run a clustering pipeline on a graph file")
    csub = clu.add_subparsers(dest="algo", required=True)

    def clu_common(p, name):
        p.add_argument("--graph", required=True, help="edge-list file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default=f"{name}-result.json")
        p.add_argument("--no-meta", action="store_true")
        _add_lce_flags(p)
        p.set_defaults(func=_cmd_cluster, command_path=f"cluster {name}")

    p = csub.add_parser("lce", help="one extraction around labeled seeds")
    p.add_argument("--seeds", help="comma-separated seed nodes")
    p.add_argument("--n-hat", type=int, required=True, help="cluster size estimate")
    clu_common(p, "lce")
    p = csub.add_parser("sslc", help="grow one cluster by probing")
    p.add_argument("--seeds")
    p.add_argument("--n-hat", type=int, required=True)
    p.add_argument("--iters", type=int, default=60)
    clu_common(p, "sslc")
    p = csub.add_parser("sslc-multi", help="grow several labeled clusters")
    p.add_argument("--seeds", help="';'-separated groups of comma-separated nodes")
    p.add_argument("--sizes", help="comma-separated size estimates, one per cluster")
    p.add_argument("--iters", type=int, default=60)
    clu_common(p, "sslc-multi")
    p = csub.add_parser("uslc", help="unsupervised peeling by co-membership")
    p.add_argument("--n-min", type=int, required=True, help="smallest cluster size")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--delta", type=float, default=None, help="co-membership threshold (default: per-round rule)")
    p.add_argument("--max-clusters", type=int, default=None)
    clu_common(p, "uslc")

    ev = sub.add_parser("eval", help="score a result file against ground-truth labels")
    ev.add_argument("--result", required=True, help="cluster result JSON")
    ev.add_argument("--labels", required=True, help="node_id,label CSV")
    ev.add_argument("--graph", default=None, help="edge list; enables the Laplacian deviation score")
    ev.add_argument("--mode", choices=("optimal", "identity"), default="optimal")
    ev.add_argument("--snr-a", type=float, default=None)
    ev.add_argument("--snr-b", type=float, default=None)
    ev.add_argument("--snr-k", type=int, default=3)
    ev.add_argument("--output", default="eval-report.json")
    ev.add_argument("--format", choices=("json", "csv"), default="json")
    ev.add_argument("--no-meta", action="store_true")
    ev.set_defaults(func=_cmd_eval, command_path="eval")

    be = sub.add_parser("bench", help="reproduce the benchmark suites")
    bsub = be.add_subparsers(dest="suite", required=True)

    def bench_common(p, name, default_iters):
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=None,
                       help="worker processes (default: LOCALCLUSTER_THREADS or CPU count)")
        p.add_argument("--output", default=name)
        p.add_argument("--format", choices=("json", "csv"), default="csv",
                       help="csv always written; json adds a .json copy")
        p.add_argument("--no-meta", action="store_true")
        p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
        p.add_argument("--iters", type=int, default=default_iters, help="probe iterations per trial")
        p.set_defaults(func=_cmd_bench, command_path=f"bench {name}")

    p = bsub.add_parser("sbm-sweep", help="Jaccard and runtime across community sizes")
    p.add_argument("--quick", action="store_true", help="cut probe iterations for a fast pass")
    bench_common(p, "sbm-sweep", default_iters=None)
    p = bsub.add_parser("delta-l-table", help="SNR, deviation norm, and Jaccard per graph size")
    bench_common(p, "delta-l-table", default_iters=60)
    p = bsub.add_parser("geometric", help="accuracy on the three point-cloud shapes")
    bench_common(p, "geometric", default_iters=bench.GEOMETRIC_ITERS)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (sla.LinAlgError, np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
