"""Command-line surface tying generation, embedding, and evaluation into
reproducible runs.

Subcommands: generate, embed, validate, linkpred, route, infer-temp, stats.
Every flag can also come from a JSON config file (--config); explicit flags
win.  Each run writes a provenance JSON (effective config, seeds, package
versions, wall time) beside its outputs.  Errors are reported as one JSON
object on stderr with a nonzero exit status.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import LikelihoodContext, ModelParams
from .embed import (
    DEFAULT_CORRECTION_DEGREES,
    embed,
    estimate_params,
    infer_temperature,
    truth_embedding,
)
from .generate import MODEL_KINDS, grow
from .graph import AdjacencySnapshot
from .io import (
    read_coordinates,
    read_edge_list,
    write_coordinates,
    write_edge_list,
    write_provenance,
)
from .linkpred import BASELINES, auc, roc_curve, score_baseline, score_hyperbolic, split
from .metrics import connection_curve, logloss_report, topology_stats
from .routing import evaluate_routing, greedy_route

__all__ = ["cli_dispatch", "main"]


class _CliError(Exception):
    def __init__(self, message, code=2):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2) with plain text
        raise _CliError(message, code=2)


def _add_common(p):
    p.add_argument("--config", help="JSON file of defaults; explicit flags override")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--zeta", type=float)


def _add_model_flags(p):
    p.add_argument("--m", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--T", type=float)


def _add_embed_flags(p):
    p.add_argument("--theta1", type=float)
    p.add_argument("--no-corrections", action="store_true", default=None)
    p.add_argument("--correction-degrees", help="comma list, default 60,40,20,10")
    p.add_argument("--passes", type=int)


def build_parser() -> _Parser:
    top = _Parser(prog="hypergrowth", description=__doc__)
    sub = top.add_subparsers(dest="command")

    p = sub.add_parser("generate", parents=[], help="grow a synthetic network")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--model", choices=MODEL_KINDS)
    p.add_argument("--t", type=int)

    p = sub.add_parser("embed", help="infer hyperbolic coordinates for an edge list")
    _add_common(p)
    _add_model_flags(p)
    _add_embed_flags(p)
    p.add_argument("--edges")

    p = sub.add_parser("validate", help="connection-probability curve and log loss")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--edges")
    p.add_argument("--coords")
    p.add_argument("--bin-width", type=float)
    p.add_argument("--n-rand", type=int)
    p.add_argument("--exact-ll", action="store_true", default=None)

    p = sub.add_parser("linkpred", help="missing-link prediction experiment")
    _add_common(p)
    _add_model_flags(p)
    _add_embed_flags(p)
    p.add_argument("--edges")
    p.add_argument("--p", type=float)
    p.add_argument("--k-min", type=int, help="keep only nodes with degree > k-min")
    p.add_argument("--scorers", help="comma list from hyperbolic,cn,dp,isp,katz")
    p.add_argument("--strata", help="comma list from all,hard,low_degree")
    p.add_argument("--k-max", type=int)
    p.add_argument("--auc-mode", choices=("exact", "sampled"))
    p.add_argument("--n-samples", type=int)
    p.add_argument("--roc-max-points", type=int)

    p = sub.add_parser("route", help="greedy-routing evaluation")
    _add_common(p)
    p.add_argument("--edges")
    p.add_argument("--coords")
    p.add_argument("--pairs", choices=("sample", "all_pairs"))
    p.add_argument("--n", type=int)
    p.add_argument("--max-hops", type=int)
    p.add_argument("--traces", action="store_true", default=None)

    p = sub.add_parser("infer-temp", help="temperature sweep")
    _add_common(p)
    _add_model_flags(p)
    _add_embed_flags(p)
    p.add_argument("--edges")
    p.add_argument("--t-grid", help="comma list of temperatures in (0,1)")
    p.add_argument("--tail-lo", type=float)
    p.add_argument("--tail-hi", type=float)

    p = sub.add_parser("stats", help="structural statistics of an edge list")
    _add_common(p)
    p.add_argument("--edges")

    return top


_DEFAULTS = {
    "seed": 0,
    "threads": 1,
    "zeta": 1.0,
    "model": "epso",
    "theta1": 0.0,
    "passes": 4,
    "bin_width": 1.0,
    "n_rand": 10,
    "p": 0.1,
    "k_min": 0,
    "scorers": "hyperbolic,cn,dp,isp,katz",
    "strata": "all,hard",
    "k_max": 6,
    "auc_mode": "exact",
    "n_samples": 1_000_000,
    "roc_max_points": 10_000,
    "pairs": "sample",
    "n": 10_000,
    "t_grid": "0.1,0.3,0.5,0.7,0.9",
}


def _merge(args) -> dict:
    """Effective options: hard defaults < config file < explicit flags."""
    given = {k: v for k, v in vars(args).items() if v is not None and k != "command"}
    cfg = {}
    if given.get("config"):
        with open(given["config"], "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise _CliError("--config must contain a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    merged = dict(_DEFAULTS)
    merged.update(cfg)
    merged.update(given)
    return merged


def _require(opt: dict, *names):
    for name in names:
        if opt.get(name) is None:
            raise _CliError(f"missing required option --{name.replace('_', '-')}")


def _out_dir(opt) -> Path:
    _require(opt, "out")
    out = Path(opt["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _correction_schedule(opt):
    if opt.get("no_corrections"):
        return ()
    raw = opt.get("correction_degrees")
    if raw is None:
        return DEFAULT_CORRECTION_DEGREES
    return tuple(int(v) for v in str(raw).split(",") if v)


def _model_params(opt, net: AdjacencySnapshot):
    """Parameters for embedding-style commands; unknowns estimated from the
    snapshot per the standard rules (T has no such rule and is required)."""
    if opt.get("T") is None:
        raise _CliError(
            "missing required option --T (run the infer-temp subcommand to estimate it)"
        )
    params, notes = estimate_params(
        net,
        T=opt["T"],
        m=opt.get("m"),
        L=opt.get("L"),
        gamma=opt.get("gamma"),
        zeta=opt["zeta"],
    )
    return params, notes


def _write_table(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _provenance(out: Path, command: str, opt: dict, t0: float, outputs, extra=None):
    record = {
        "command": command,
        "config": {k: v for k, v in sorted(opt.items()) if k not in ("config",)},
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "hypergrowth": __version__,
        },
        "wall_time_s": time.perf_counter() - t0,
        "outputs": sorted(outputs),
    }
    if extra:
        record.update(extra)
    write_provenance(out / "provenance.json", record)


# ---------------------------------------------------------------------------
# commands


def _cmd_generate(opt):
    t0 = time.perf_counter()
    _require(opt, "t", "m", "L", "gamma", "T")
    out = _out_dir(opt)
    params = ModelParams(
        m=opt["m"], L=opt["L"], gamma=opt["gamma"], T=opt["T"], zeta=opt["zeta"], t=opt["t"]
    )
    grown = grow(params, model_kind=opt["model"], seed=opt["seed"])
    net = grown.to_snapshot()
    write_edge_list(net, out / "edges.txt")
    write_coordinates(truth_embedding(grown), out / "coords.txt")
    _provenance(out, "generate", opt, t0, ["edges.txt", "coords.txt"],
                extra={"edges": net.n_edges, "model": opt["model"]})
    return 0


def _cmd_embed(opt):
    t0 = time.perf_counter()
    _require(opt, "edges")
    out = _out_dir(opt)
    net = read_edge_list(opt["edges"])
    params, notes = _model_params(opt, net)
    emb = embed(
        net,
        params,
        correction_degrees=_correction_schedule(opt),
        passes=opt["passes"],
        theta1=opt["theta1"],
        workers=opt["threads"],
    )
    if notes:
        emb.provenance["estimated_params"] = notes
    write_coordinates(emb, out / "coords.txt")
    _provenance(out, "embed", opt, t0, ["coords.txt"], extra={"estimated_params": notes})
    return 0


def _cmd_validate(opt):
    t0 = time.perf_counter()
    _require(opt, "edges", "coords")
    out = _out_dir(opt)
    net = read_edge_list(opt["edges"])
    emb = read_coordinates(opt["coords"], net=net)
    base = emb.params
    params = ModelParams(
        m=base.m if opt.get("m") is None else opt["m"],
        L=base.L if opt.get("L") is None else opt["L"],
        gamma=base.gamma if opt.get("gamma") is None else opt["gamma"],
        T=base.T if opt.get("T") is None else opt["T"],
        zeta=base.zeta,
        t=base.t,
    )
    ctx = LikelihoodContext.from_params(params)
    curve = connection_curve(emb, net, ctx, bin_width=opt["bin_width"])
    report = logloss_report(
        emb, net, ctx, n_rand=opt["n_rand"], seed=opt["seed"],
        approx=not opt.get("exact_ll"),
    )
    centers = curve.centers()
    _write_table(
        out / "connection_curve.tsv",
        ["bin_lo", "bin_hi", "center", "pairs", "empirical", "theoretical"],
        [
            (curve.bin_edges[b], curve.bin_edges[b + 1], centers[b],
             int(curve.pair_counts[b]), curve.empirical[b], curve.theoretical[b])
            for b in range(len(centers))
        ],
    )
    with open(out / "logloss.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "ll_inf": report.ll_inf,
                "ll_rand": report.ll_rand,
                "r_ll_exponent": report.r_ll_exponent,
                "n_rand": report.n_rand,
                "seed": report.seed,
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    _provenance(out, "validate", opt, t0, ["connection_curve.tsv", "logloss.json"])
    return 0


def _cmd_linkpred(opt):
    t0 = time.perf_counter()
    _require(opt, "edges")
    out = _out_dir(opt)
    net = read_edge_list(opt["edges"])
    if opt["k_min"] > 0:
        keep = np.flatnonzero(net.degrees > opt["k_min"])
        net = net.subgraph(keep)
    sp = split(net, opt["p"], seed=opt["seed"])
    params, notes = _model_params(opt, sp.training)
    emb = embed(
        sp.training,
        params,
        correction_degrees=_correction_schedule(opt),
        passes=opt["passes"],
        theta1=opt["theta1"],
        workers=opt["threads"],
    )
    write_edge_list(sp.training, out / "training.txt")
    _write_table(
        out / "probe.txt", ["u", "v"],
        [(net.node_ids[int(u)], net.node_ids[int(v)]) for u, v in sp.probe],
    )
    scorer_names = [s.strip() for s in str(opt["scorers"]).split(",") if s.strip()]
    strata = [s.strip() for s in str(opt["strata"]).split(",") if s.strip()]
    outputs = ["training.txt", "probe.txt"]
    report = {"p": opt["p"], "seed": opt["seed"], "k_min": opt["k_min"], "auc": {}}
    for name in scorer_names:
        scored = (
            score_hyperbolic(sp, emb) if name == "hyperbolic" else score_baseline(sp, name)
        )
        probe_scores = scored.score_pairs(sp.probe)
        _write_table(
            out / f"scores_{name}.tsv", ["u", "v", "score"],
            [
                (net.node_ids[int(u)], net.node_ids[int(v)], s)
                for (u, v), s in zip(sp.probe, probe_scores)
            ],
        )
        outputs.append(f"scores_{name}.tsv")
        report["auc"][name] = {}
        for stratum in strata:
            val = auc(
                scored, sp, stratum=stratum, mode=opt["auc_mode"],
                n=opt["n_samples"], seed=opt["seed"], k_max=opt["k_max"],
            )
            report["auc"][name][stratum] = val
            pts = roc_curve(scored, sp, stratum=stratum, k_max=opt["k_max"])
            if pts is not None:
                if pts.shape[0] > opt["roc_max_points"]:
                    idx = np.unique(
                        np.linspace(0, pts.shape[0] - 1, opt["roc_max_points"]).astype(int)
                    )
                    pts = pts[idx]
                fname = f"roc_{name}_{stratum}.tsv"
                _write_table(out / fname, ["fpr", "tpr"], [tuple(row) for row in pts])
                outputs.append(fname)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs.append("report.json")
    _provenance(out, "linkpred", opt, t0, outputs, extra={"estimated_params": notes})
    return 0


def _cmd_route(opt):
    t0 = time.perf_counter()
    _require(opt, "edges", "coords")
    out = _out_dir(opt)
    net = read_edge_list(opt["edges"])
    emb = read_coordinates(opt["coords"], net=net)
    stats = evaluate_routing(
        net, emb, pairs=opt["pairs"], n=opt["n"], seed=opt["seed"],
        max_hops=opt.get("max_hops"),
    )
    outputs = ["routing.json"]
    with open(out / "routing.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "p_s": stats.p_s,
                "h_bar": stats.h_bar,
                "stretch": stats.stretch,
                "n_pairs": stats.n_pairs,
                "seed": stats.seed,
                "n_drops_local": stats.n_drops_local,
                "n_drops_guard": stats.n_drops_guard,
                "policy": stats.policy,
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    if opt.get("traces"):
        comp = net.giant_component()
        gen = np.random.Generator(np.random.Philox(np.random.SeedSequence((opt["seed"],))))
        rows = []
        done = 0
        while done < min(opt["n"], 1000):
            s = int(comp[gen.integers(0, comp.size)])
            d = int(comp[gen.integers(0, comp.size)])
            if s == d:
                continue
            outcome, path = greedy_route(s, d, net, emb, opt.get("max_hops"))
            rows.append(
                (net.node_ids[s], net.node_ids[d], outcome, len(path) - 1,
                 ",".join(str(net.node_ids[p]) for p in path))
            )
            done += 1
        _write_table(out / "traces.tsv", ["src", "dst", "outcome", "hops", "path"], rows)
        outputs.append("traces.tsv")
    _provenance(out, "route", opt, t0, outputs)
    return 0


def _cmd_infer_temp(opt):
    t0 = time.perf_counter()
    _require(opt, "edges")
    out = _out_dir(opt)
    net = read_edge_list(opt["edges"])
    grid = [float(v) for v in str(opt["t_grid"]).split(",") if v]
    base, notes = estimate_params(
        net, T=grid[0], m=opt.get("m"), L=opt.get("L"), gamma=opt.get("gamma"),
        zeta=opt["zeta"],
    )
    window = None
    if opt.get("tail_lo") is not None and opt.get("tail_hi") is not None:
        window = (opt["tail_lo"], opt["tail_hi"])
    est = infer_temperature(
        net, base, grid, tail_window=window,
        correction_degrees=_correction_schedule(opt),
        passes=opt["passes"], workers=opt["threads"],
    )
    with open(out / "temperature.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "estimate": est.estimate,
                "status": est.status,
                "converged": list(est.converged),
                "sse": {f"{k:g}": v for k, v in est.sse.items()},
                "grid": grid,
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    rows = []
    for Tg, curve in est.curves.items():
        centers = curve.centers()
        for b in range(len(centers)):
            rows.append(
                (Tg, centers[b], int(curve.pair_counts[b]), curve.empirical[b],
                 curve.theoretical[b])
            )
    _write_table(
        out / "curves.tsv", ["T", "center", "pairs", "empirical", "theoretical"], rows
    )
    _provenance(out, "infer-temp", opt, t0, ["temperature.json", "curves.tsv"],
                extra={"estimated_params": notes})
    return 0


def _cmd_stats(opt):
    t0 = time.perf_counter()
    _require(opt, "edges")
    out = _out_dir(opt)
    net = read_edge_list(opt["edges"])
    st = topology_stats(net)
    t = net.t
    _write_table(
        out / "degree_distribution.tsv", ["k", "count", "pk"],
        [
            (int(k), int(c), c / t)
            for k, c in zip(st.degree_values, st.degree_counts)
            if c > 0
        ],
    )
    for fname, col, vals in (
        ("clustering.tsv", "mean_clustering", st.clustering_by_degree),
        ("neighbor_degree.tsv", "mean_neighbor_degree", st.neighbor_degree_by_degree),
        ("betweenness.tsv", "mean_betweenness", st.betweenness_by_degree),
    ):
        _write_table(
            out / fname, ["k", col],
            [
                (int(k), vals[k])
                for k in st.degree_values
                if st.degree_counts[k] > 0
            ],
        )
    _write_table(
        out / "distance_distribution.tsv", ["l", "probability"],
        list(zip(st.distance_values.tolist(), st.distance_probs.tolist())),
    )
    _write_table(
        out / "mtilde.tsv", ["i", "mtilde"],
        [(i + 1, st.mtilde[i]) for i in range(1, t)],
    )
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(st.meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _provenance(
        out, "stats", opt, t0,
        ["degree_distribution.tsv", "clustering.tsv", "neighbor_degree.tsv",
         "betweenness.tsv", "distance_distribution.tsv", "mtilde.tsv", "summary.json"],
    )
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "embed": _cmd_embed,
    "validate": _cmd_validate,
    "linkpred": _cmd_linkpred,
    "route": _cmd_route,
    "infer-temp": _cmd_infer_temp,
    "stats": _cmd_stats,
}


def cli_dispatch(argv=None) -> int:
    """Parse argv, run the subcommand, return the exit status.

    Failures print one JSON object {"error": {"message": ...}} to stderr;
    usage errors exit 2, runtime errors exit 1.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _CliError("missing subcommand (see --help)")
        opt = _merge(args)
        if opt.get("threads", 1) < 1:
            raise _CliError("--threads must be >= 1")
        return _COMMANDS[args.command](opt)
    except _CliError as exc:
        print(json.dumps({"error": {"message": str(exc), "usage": True}}), file=sys.stderr)
        return exc.code
    except Exception as exc:  # runtime failure, still machine-readable
        print(
            json.dumps({"error": {"message": str(exc), "type": type(exc).__name__}}),
            file=sys.stderr,
        )
        return 1


def main():
    sys.exit(cli_dispatch())
