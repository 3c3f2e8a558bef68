"""Command line: ``qwnn train | eval | inspect-walk | import-data | compare``.

Exit status is 0 on success, 2 for configuration errors and 3 for data,
graph or checkpoint errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .config import ExperimentConfig
from .exceptions import CheckpointError, ConfigError, DataError, GraphError, TrainingDivergedError
from .experiment import load_data, make_split, run_trial, with_model
from .graph import build_shift, cycle_graph, lattice_graph, path_graph, read_edge_list, regularize_with_self_loops
from .nn import LossSpec
from .training import evaluate
from .walk import (
    CoinSet,
    classical_walk_distribution,
    diffusion_matrix,
    hadamard_coin,
    init_uniform_superposition,
    walk,
)

logger = logging.getLogger("qwnn")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3


def _summary(values):
    a = np.asarray([v for v in values if v is not None], dtype=float)
    if a.size == 0:
        return float("nan"), float("nan")
    return float(a.mean()), float(a.std(ddof=1)) if a.size > 1 else 0.0


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    exp = cfg.experiment
    if args.seed is not None:
        exp = dataclasses.replace(exp, seed=args.seed)
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("--trials", "must be >= 1")
        exp = dataclasses.replace(exp, trials=args.trials)
    return dataclasses.replace(cfg, experiment=exp)


def _run_trials(cfg, out_dir, tag=""):
    data = load_data(cfg)
    logger.info("data: %s", data.description)
    os.makedirs(out_dir, exist_ok=True)
    results = []
    for r in range(cfg.experiment.trials):
        res = run_trial(cfg, data, r)
        stem = os.path.join(out_dir, f"{tag}trial{r}")
        res.log.to_csv(stem + "_log.csv")
        save_checkpoint(
            stem + ".npz",
            res.model,
            extra={
                "config": cfg.to_dict(),
                "base_dir": cfg.base_dir,
                "seed": cfg.experiment.seed,
                "trial": r,
            },
        )
        metric = res.log.metric_name
        print(
            f"{tag.replace('_', ' ')}trial {r} seed {res.seed}"
            + (f" fold {res.fold}" if res.fold is not None else "")
            + f": best epoch {res.log.best_epoch}, test {metric} {_fmt(res.test_metric)}"
        )
        results.append(res)
    return results


def _fmt(v):
    return "n/a" if v is None else f"{v:.4f}"


def cmd_train(args) -> int:
    cfg = _load_config(args)
    results = _run_trials(cfg, args.out_dir)
    metric = results[0].log.metric_name
    mean, std = _summary(r.test_metric for r in results)
    line = f"test {metric} {mean:.4f} ± {std:.4f} over {len(results)} trials"
    print(line)
    with open(os.path.join(args.out_dir, "summary.json"), "w") as fh:
        json.dump(
            {
                "metric": metric,
                "mean": mean,
                "std": std,
                "trials": [
                    {"trial": r.trial, "seed": r.seed, "fold": r.fold, "test_metric": r.test_metric, "test_loss": r.test_loss}
                    for r in results
                ],
            },
            fh,
            indent=2,
        )
    return EXIT_OK


def cmd_eval(args) -> int:
    model, meta = load_checkpoint(args.checkpoint)
    extra = meta.get("extra", {})
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    elif "config" in extra:
        cfg = ExperimentConfig.from_dict(extra["config"], base_dir=extra.get("base_dir", "."))
    else:
        raise ConfigError("--config", "checkpoint carries no config; pass one explicitly")
    cfg = dataclasses.replace(cfg, experiment=dataclasses.replace(cfg.experiment, seed=extra.get("seed", cfg.experiment.seed)))
    data = load_data(cfg)
    width = data.samples[0].x.shape[1]
    if width != model.spec.n_features:
        raise DataError(f"checkpoint expects {model.spec.n_features} node features, data has {width}")
    if data.graph is not None and model.spec.task == "node":
        stored = getattr(model.graph_layer, "graph", None)
        if stored is not None and stored.n_nodes != data.graph.n_nodes:
            raise DataError(f"checkpoint was trained on {stored.n_nodes} nodes, data graph has {data.graph.n_nodes}")
    split, _ = make_split(cfg, data, extra.get("trial", 0))
    parts = dict(zip(("train", "validation", "test"), split.take(data.samples)))
    loss = LossSpec(cfg.training.loss)
    value, metric = evaluate(model, parts[args.split], loss)
    print(f"{args.split}: loss {_fmt(value)} {loss.metric_name} {_fmt(metric)} over {len(parts[args.split])} samples")
    return EXIT_OK


def _graph_from_arg(text):
    kind, _, arg = text.partition(":")
    if kind == "cycle":
        return cycle_graph(int(arg))
    if kind == "path":
        return path_graph(int(arg))
    if kind == "lattice":
        r, _, c = arg.partition("x")
        return lattice_graph(int(r), int(c or r))
    if kind == "file":
        return read_edge_list(arg)
    raise ConfigError("--graph", f"expected cycle:N, path:N, lattice:RxC or file:PATH, got {text!r}")


def cmd_inspect_walk(args) -> int:
    g = _graph_from_arg(args.graph)
    steps = args.steps
    if steps < 0:
        raise ConfigError("--steps", "must be >= 0")
    if not 0 <= args.start < g.n_nodes:
        raise ConfigError("--start", f"must be a node id in [0, {g.n_nodes})")
    if args.coin == "grover":
        coins = CoinSet.grover(g, "spatial")
    else:
        if g.d_max > 2:
            raise ConfigError("--coin", f"{args.coin} coin needs max degree <= 2, graph has {g.d_max}")
        g = regularize_with_self_loops(g, 2)
        mat = hadamard_coin(2) if args.coin == "hadamard" else np.array([[0.0, 1.0], [1.0, 0.0]])
        coins = CoinSet.temporal(np.repeat(mat[None], max(steps, 1), axis=0), mode="fixed-grover")
    s0 = init_uniform_superposition(g)[args.start : args.start + 1]
    if args.start_slot is not None:
        if not 0 <= args.start_slot < len(g.real_neighbors(args.start)):
            raise ConfigError("--start-slot", f"node {args.start} has no edge slot {args.start_slot}")
        s0 = np.zeros_like(s0)
        s0[0, args.start, args.start_slot] = 1.0
    states = walk(s0, coins, build_shift(g), steps, history=True)
    start_dist = np.zeros(g.n_nodes)
    start_dist[args.start] = 1.0

    os.makedirs(args.out_dir, exist_ok=True)
    marg = os.path.join(args.out_dir, "walk_marginals.csv")
    with open(marg, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "node", "classical", "quantum"])
        for t, s in enumerate(states):
            q = diffusion_matrix(s)[0]
            c = classical_walk_distribution(g, start_dist, t)
            for v in range(g.n_nodes):
                w.writerow([t, v, repr(float(c[v])), repr(float(q[v]))])
    full = walk(init_uniform_superposition(g), coins, build_shift(g), steps)
    np.savetxt(os.path.join(args.out_dir, "diffusion.csv"), diffusion_matrix(full), delimiter=",", fmt="%.17g")
    print(f"wrote {marg} and diffusion.csv ({steps} steps, {g.n_nodes} nodes, {args.coin} coin)")
    return EXIT_OK


def cmd_import_data(args) -> int:
    from .datasets import import_ghcn, import_qm7_mat, load_tu_dataset, write_tu_dataset

    if not os.path.exists(args.source):
        raise DataError(f"source not found: {args.source}")
    os.makedirs(args.out_dir, exist_ok=True)
    if args.kind == "qm7":
        n = import_qm7_mat(args.source, os.path.join(args.out_dir, "qm7.txt"), os.path.join(args.out_dir, "qm7_folds.txt"))
        print(f"wrote {n} molecules to {os.path.join(args.out_dir, 'qm7.txt')}")
    elif args.kind == "ghcn":
        if not args.stations:
            raise ConfigError("--stations", "is required for ghcn imports")
        data = import_ghcn(args.source, args.stations, args.out_dir, args.start, args.end)
        print(f"wrote {len(data.station_ids)} stations and {len(data.dates)} complete days to {args.out_dir}")
    else:
        ds = load_tu_dataset(args.source)
        write_tu_dataset(ds, args.out_dir)
        print(json.dumps(ds.summary()))
    return EXIT_OK


def cmd_compare(args) -> int:
    base = _load_config(args)
    rows = []
    for model in ("qwnn", "dcnn", "gcnn"):
        cfg = with_model(base, model)
        results = _run_trials(cfg, args.out_dir, tag=f"{model}_")
        mean, std = _summary(r.test_metric for r in results)
        rows.append((model, results[0].log.metric_name, mean, std, results[0].model.n_parameters(), sum(r.seconds for r in results)))
    path = os.path.join(args.out_dir, "comparison.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "metric", "mean", "std", "parameters", "seconds"])
        w.writerows(rows)
    print(f"{'model':<6} {'test metric':<24} {'params':>7} {'seconds':>8}")
    for model, metric, mean, std, n, sec in rows:
        print(f"{model:<6} {metric} {mean:.4f} ± {std:.4f}{'':<4} {n:>7} {sec:>8.1f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwnn", description="Graph neural networks built on learned quantum walks.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def experiment_flags(sp):
        sp.add_argument("--config", required=True, help="experiment TOML file")
        sp.add_argument("--seed", type=int, help="override experiment.seed")
        sp.add_argument("--trials", type=int, help="override experiment.trials")
        sp.add_argument("--out-dir", default="runs", help="where logs and checkpoints go")

    sp = sub.add_parser("train", help="train and report test metrics over trials")
    experiment_flags(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("eval", help="evaluate a checkpoint on one split")
    sp.add_argument("--checkpoint", required=True)
    sp.add_argument("--config", help="config to take data from (default: the one stored in the checkpoint)")
    sp.add_argument("--split", choices=("train", "validation", "test"), default="test")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("inspect-walk", help="dump classical vs quantum walk marginals per step")
    sp.add_argument("--graph", default="lattice:9x9", help="cycle:N, path:N, lattice:RxC or file:PATH")
    sp.add_argument("--steps", type=int, default=4)
    sp.add_argument("--coin", choices=("grover", "hadamard", "flip"), default="grover")
    sp.add_argument("--start", type=int, default=0, help="start node")
    sp.add_argument("--start-slot", type=int, help="put all amplitude on this edge slot of the start node")
    sp.add_argument("--out-dir", default="walk")
    sp.set_defaults(func=cmd_inspect_walk)

    sp = sub.add_parser("import-data", help="convert original dataset files into the text formats")
    sp.add_argument("kind", choices=("qm7", "ghcn", "tu"))
    sp.add_argument("--source", required=True, help="qm7.mat, GHCN .dly directory, or TU directory")
    sp.add_argument("--stations", help="GHCN station inventory (ghcnd-stations.txt)")
    sp.add_argument("--start", help="first day to keep (ISO date, ghcn only)")
    sp.add_argument("--end", help="last day to keep (ISO date, ghcn only)")
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_import_data)

    sp = sub.add_parser("compare", help="train QWNN, DCNN and GCNN with one config and tabulate")
    experiment_flags(sp)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, GraphError, CheckpointError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TrainingDivergedError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
