"""Config-driven command line: simulate, train, evaluate, sweep, backtest.

Every command reads one YAML config (defaults generated by ``init-config``),
applies flag overrides, writes its outputs under ``--out`` (or
``$HEDGELAB_OUTPUT_ROOT``), and finishes with a run manifest listing the
config hash, seeds, and every file produced.  Exit codes: 0 success, 2 config
or usage error, 3 numeric divergence, 4 missing data.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from . import experiments as xp
from . import jivr as jivr_mod
from .jivr import InitialStatePool, PathSet, default_params
from .market import CostSpec, InstrumentSpec, build_panels, run_episode
from .policy import DeltaGammaPolicy, GatedPolicy, LelandDeltaPolicy, RnnFnnPolicy
from .risk import PenaltyConfig, RiskMeasure
from .training import (EpisodeDataset, TrainConfig, TrainingDiverged,
                       train_policy, train_threshold)
from .volsurface import DomainError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_MISSING_DATA = 4

OUTPUT_ROOT_ENV = "HEDGELAB_OUTPUT_ROOT"


def default_config() -> dict:
    """Full default configuration; values follow the experimental settings."""
    return {
        "seed": 1234,
        "workers": 0,                    # 0 = library default threading
        "market": {
            "s0": 100.0,
            "rate": 0.0266,
            "dividend": 0.0177,
            "straddle_maturity_days": 63,
            "hedge_option_maturity_days": 84,
            "kappa1": 0.0005,
            "kappa2": 0.01,
        },
        "pool": {
            "source": "synthetic",       # or path to a CSV pool
            "n_chains": 64,
            "n_days": 4000,
            "burn_in": 3000,
            "seed": 7,
        },
        "simulation": {
            "n_paths": 100000,
            "horizon_days": 63,
            "chunk_size": 25000,
        },
        "policy": {
            "instruments": 2,
            "width": 56,
            "lstm_cells": 2,
            "ffnn_layers": 2,
            "dropout": 0.5,
            "excluded_features": [],
            "init_seed": 0,
        },
        "training": {
            "measure": "mse",
            "cvar_alpha": 0.95,
            "penalty_lambda": 1.0,
            "batch_size": 1000,
            "epochs": 10,
            "learning_rate": 0.0005,
            "threshold_learning_rate": 0.001,
            "gate_temperature_start": 0.1,
            "gate_temperature_end": 0.01,
            "n_train_paths": 50000,
            "n_valid_paths": 10000,
            "train_seed": 1000,
            "valid_seed": 2000,
        },
        "evaluate": {
            "n_paths": 100000,
            "test_seed": 9000,
            "thresholds": {"delta": 0.0, "delta_gamma": 0.0},
        },
        "sweep": {
            "kind": "threshold",         # threshold | lambda | ablation | costs
            "kappa2_grid": [0.005, 0.01, 0.015, 0.02],
            "lambda_grid": [0.0, 0.5, 1.0, 1.5],
            "epochs": 4,
        },
        "backtest": {
            "cadence_days": 21,
            "series_csv": None,
            "synthetic_days": 1300,
            "synthetic_seed": 5150,
        },
    }


def _deep_update(base: dict, extra: dict) -> dict:
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], val)
        else:
            base[key] = val
    return base


def load_config(path: str | None, overrides: argparse.Namespace) -> dict:
    config = default_config()
    if path is not None:
        raw = Path(path)
        if not raw.exists():
            raise FileNotFoundError(f"config file {path} not found")
        loaded = yaml.safe_load(raw.read_text()) or {}
        if not isinstance(loaded, dict):
            raise DomainError(f"config root must be a mapping, got {type(loaded).__name__}")
        _deep_update(config, loaded)
    if getattr(overrides, "seed", None) is not None:
        config["seed"] = overrides.seed
    if getattr(overrides, "kappa1", None) is not None:
        config["market"]["kappa1"] = overrides.kappa1
    if getattr(overrides, "kappa2", None) is not None:
        config["market"]["kappa2"] = overrides.kappa2
    if getattr(overrides, "measure", None) is not None:
        config["training"]["measure"] = overrides.measure
    if getattr(overrides, "workers", None) is not None:
        config["workers"] = overrides.workers
    return config


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


class RunContext:
    """Tracks output files and writes the manifest; cleans up on failure."""

    def __init__(self, out_dir: Path, config: dict, command: str):
        self.out_dir = out_dir
        self.config = config
        self.command = command
        self.outputs: list[str] = []
        self.started = time.time()
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        self.outputs.append(str(p))
        return p

    def write_manifest(self):
        manifest = {
            "command": self.command,
            "package_version": __version__,
            "config_hash": config_hash(self.config),
            "seed": self.config.get("seed"),
            "wall_seconds": round(time.time() - self.started, 3),
            "outputs": sorted(self.outputs),
            "config": self.config,
        }
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2, default=str))

    def cleanup_partial(self):
        for name in self.outputs:
            Path(name).unlink(missing_ok=True)


def _resolve_out(args) -> Path:
    if args.out:
        return Path(args.out)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root:
        return Path(root) / args.command
    return Path.cwd() / "hedgelab_out" / args.command


def _apply_workers(config: dict):
    workers = int(config.get("workers") or 0)
    if workers > 0:
        import torch

        torch.set_num_threads(workers)


def build_pool(config: dict) -> InitialStatePool:
    pool_cfg = config["pool"]
    params = model_params(config)
    if pool_cfg.get("source", "synthetic") != "synthetic":
        path = Path(pool_cfg["source"])
        if not path.exists():
            raise FileNotFoundError(f"pool CSV {path} not found")
        return InitialStatePool.from_csv(path)
    return jivr_mod.synthetic_pool(
        params, n_chains=int(pool_cfg["n_chains"]), n_days=int(pool_cfg["n_days"]),
        burn_in=int(pool_cfg["burn_in"]), seed=int(pool_cfg["seed"]),
        spot0=float(config["market"]["s0"]),
    )


def model_params(config: dict):
    market = config["market"]
    return default_params(rate=float(market["rate"]), dividend=float(market["dividend"]))


def instruments(config: dict):
    market = config["market"]
    hedged = InstrumentSpec("straddle", float(market["s0"]),
                            int(market["straddle_maturity_days"]))
    hedge_opt = InstrumentSpec("call", float(market["s0"]),
                               int(market["hedge_option_maturity_days"]))
    return hedged, hedge_opt


def costs_from(config: dict) -> CostSpec:
    return CostSpec(kappa1=float(config["market"]["kappa1"]),
                    kappa2=float(config["market"]["kappa2"]))


def _train_config(config: dict, **overrides) -> TrainConfig:
    tr = config["training"]
    kwargs = dict(
        penalty=PenaltyConfig(
            RiskMeasure(tr["measure"], float(tr.get("cvar_alpha", 0.95))),
            float(tr["penalty_lambda"])),
        costs=costs_from(config),
        batch_size=int(tr["batch_size"]),
        epochs=int(tr["epochs"]),
        learning_rate=float(tr["learning_rate"]),
        threshold_learning_rate=float(tr["threshold_learning_rate"]),
        dropout=float(config["policy"]["dropout"]),
        gate_temperature_start=float(tr["gate_temperature_start"]),
        gate_temperature_end=float(tr["gate_temperature_end"]),
        seed=int(config["seed"]),
    )
    kwargs.update(overrides)
    return TrainConfig(**kwargs)


def _feature_mask(config: dict) -> np.ndarray:
    from .policy import FEATURE_NAMES

    excluded = set(config["policy"].get("excluded_features") or [])
    unknown = excluded - set(FEATURE_NAMES)
    if unknown:
        raise DomainError(f"unknown excluded features: {sorted(unknown)}")
    return np.array([name not in excluded for name in FEATURE_NAMES], dtype=bool)


def _new_policy(config: dict) -> RnnFnnPolicy:
    pol = config["policy"]
    return RnnFnnPolicy(
        n_instruments=int(pol["instruments"]), width=int(pol["width"]),
        n_cells=int(pol["lstm_cells"]), n_ffnn=int(pol["ffnn_layers"]),
        dropout=float(pol["dropout"]), feature_mask=_feature_mask(config),
        seed=int(pol.get("init_seed", 0)),
    )


def _simulate_training_panels(config: dict, pool, n_paths: int, seed: int):
    params = model_params(config)
    hedged, hedge_opt = instruments(config)
    paths = jivr_mod.simulate(params, pool, n_paths,
                              int(config["market"]["straddle_maturity_days"]),
                              seed, spot0=float(config["market"]["s0"]))
    return build_panels(paths, hedged, hedge_opt, params.rate, params.dividend)


# ---------------------------------------------------------------------------
# commands


def cmd_init_config(args) -> int:
    out = Path(args.out or "hedgelab_config.yaml")
    out.write_text(yaml.safe_dump(default_config(), sort_keys=False))
    print(f"wrote default config to {out}")
    return EXIT_OK


def cmd_simulate(args, config: dict) -> int:
    ctx = RunContext(_resolve_out(args), config, "simulate")
    try:
        pool = build_pool(config)
        sim = config["simulation"]
        paths = jivr_mod.simulate(
            model_params(config), pool, int(args.paths or sim["n_paths"]),
            int(sim["horizon_days"]), int(config["seed"]),
            spot0=float(config["market"]["s0"]))
        out_path = ctx.path("paths.bin")
        paths.save_binary(out_path)
        if paths.n_paths * (paths.horizon_days + 1) <= 200000:
            paths.to_csv(ctx.path("paths.csv"))
        pool_csv = ctx.path("initial_pool.csv")
        pool.to_csv(pool_csv)
        ctx.write_manifest()
        print(f"simulated {paths.n_paths} paths x {paths.horizon_days} days -> {out_path}")
        return EXIT_OK
    except Exception:
        ctx.cleanup_partial()
        raise


def cmd_train(args, config: dict) -> int:
    ctx = RunContext(_resolve_out(args), config, "train")
    try:
        tr = config["training"]
        pool = build_pool(config)
        if args.paths:
            if not Path(args.paths).exists():
                raise FileNotFoundError(f"paths file {args.paths} not found")
            paths = PathSet.load_binary(args.paths)
            params = model_params(config)
            hedged, hedge_opt = instruments(config)
            split = max(int(0.8 * paths.n_paths), 1)
            train_panels = build_panels(
                PathSet(paths.spot[:split], paths.betas[:split],
                        paths.h_r[:split], paths.h[:split]),
                hedged, hedge_opt, params.rate, params.dividend)
            valid_panels = build_panels(
                PathSet(paths.spot[split:], paths.betas[split:],
                        paths.h_r[split:], paths.h[split:]),
                hedged, hedge_opt, params.rate, params.dividend)
        else:
            train_panels = _simulate_training_panels(
                config, pool, int(tr["n_train_paths"]), int(tr["train_seed"]))
            valid_panels = _simulate_training_panels(
                config, pool, int(tr["n_valid_paths"]), int(tr["valid_seed"]))

        policy = _new_policy(config)
        train_cfg = _train_config(config)
        dataset = EpisodeDataset(train_panels, dtype=train_cfg.torch_dtype())
        valid = EpisodeDataset(valid_panels, dtype=train_cfg.torch_dtype())
        report = train_policy(policy, dataset, valid, train_cfg, log_every=1)

        ckpt = Path(args.checkpoint) if args.checkpoint else ctx.path("policy.ckpt")
        if args.checkpoint:
            ctx.outputs.append(str(ckpt))
        policy.save_checkpoint(ckpt)
        ctx.outputs.append(str(ckpt) + ".json")
        report.to_csv(ctx.path("training_log.csv"))
        ctx.write_manifest()
        print(f"trained policy -> {ckpt} (final threshold {report.final_threshold:.4f})")
        return EXIT_OK
    except TrainingDiverged as exc:
        ctx.cleanup_partial()
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except Exception:
        ctx.cleanup_partial()
        raise


def _evaluation_policies(args, config: dict) -> dict:
    thresholds = config["evaluate"].get("thresholds", {})
    policies = {
        "delta": GatedPolicy(LelandDeltaPolicy(kappa=float(config["market"]["kappa1"])),
                             float(thresholds.get("delta", 0.0))),
        "delta_gamma": GatedPolicy(DeltaGammaPolicy(),
                                   float(thresholds.get("delta_gamma", 0.0))),
    }
    for spec in args.checkpoint or []:
        name, _, path = spec.rpartition("=") if "=" in spec else ("", "", spec)
        name = name or Path(path).stem
        if not Path(path).exists():
            raise FileNotFoundError(f"checkpoint {path} not found")
        policy = RnnFnnPolicy.load_checkpoint(path)
        policies[name] = GatedPolicy(policy, policy.threshold_l)
    return policies


def cmd_evaluate(args, config: dict) -> int:
    ctx = RunContext(_resolve_out(args), config, "evaluate")
    try:
        pool = build_pool(config)
        params = model_params(config)
        hedged, hedge_opt = instruments(config)
        ev = config["evaluate"]
        policies = _evaluation_policies(args, config)
        chunks = jivr_mod.simulate_chunked(
            params, pool, int(args.paths or ev["n_paths"]),
            int(config["market"]["straddle_maturity_days"]), int(ev["test_seed"]),
            spot0=float(config["market"]["s0"]),
            chunk_size=int(config["simulation"]["chunk_size"]))
        errors, rfs, hcs, trails = xp.evaluate_policies(
            chunks, policies, costs_from(config), hedged, hedge_opt,
            params.rate, params.dividend, keep_trails=True)
        table = xp.benchmark_table(errors, rfs, hcs)
        xp.write_csv(table, ctx.path("table2_metrics.csv"))
        xp.render_error_histogram(errors, ctx.path("fig_error_histogram.png"))
        curves = {name: xp.tracking_error_curves(trail) for name, trail in trails.items()}
        for name, frame in curves.items():
            xp.write_csv(frame, ctx.path(f"fig_tracking_error_{name}.csv"))
        xp.render_tracking_curves(curves, ctx.path("fig_tracking_error.png"))
        ctx.write_manifest()
        print(table.to_string(index=False))
        return EXIT_OK
    except Exception:
        ctx.cleanup_partial()
        raise


def cmd_sweep(args, config: dict) -> int:
    ctx = RunContext(_resolve_out(args), config, "sweep")
    try:
        kind = config["sweep"]["kind"]
        if kind == "threshold":
            frame = _sweep_threshold(config)
            xp.write_csv(frame, ctx.path("table3_thresholds.csv"))
        elif kind == "costs":
            frame = _sweep_costs(args, config)
            xp.write_csv(frame, ctx.path("table4_costs.csv"))
        elif kind == "lambda":
            frame = _sweep_lambda(config)
            xp.write_csv(frame, ctx.path("lambda_sweep.csv"))
        elif kind == "ablation":
            frame = _sweep_ablation(config)
            xp.write_csv(frame, ctx.path("state_ablation.csv"))
        else:
            raise DomainError(f"unknown sweep kind {kind!r}")
        ctx.write_manifest()
        print(frame.to_string(index=False))
        return EXIT_OK
    except TrainingDiverged as exc:
        ctx.cleanup_partial()
        print(f"error: sweep diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except Exception:
        ctx.cleanup_partial()
        raise


def _sweep_threshold(config: dict) -> "pd.DataFrame":
    import pandas as pd

    tr = config["training"]
    pool = build_pool(config)
    panels = _simulate_training_panels(config, pool, int(tr["n_train_paths"]),
                                       int(tr["train_seed"]))
    rows = []
    for kappa2 in config["sweep"]["kappa2_grid"]:
        cfg = copy.deepcopy(config)
        cfg["market"]["kappa2"] = float(kappa2)
        train_cfg = _train_config(cfg, epochs=int(config["sweep"]["epochs"]),
                                  threshold_learning_rate=0.01)
        threshold, _ = train_threshold(DeltaGammaPolicy(), panels, train_cfg)
        rows.append({"kappa1": cfg["market"]["kappa1"], "kappa2": float(kappa2),
                     "policy": "delta_gamma", "measure": train_cfg.penalty.measure.kind,
                     "threshold_l": threshold})
    return pd.DataFrame(rows)


def _sweep_costs(args, config: dict) -> "pd.DataFrame":
    import pandas as pd

    params = model_params(config)
    hedged, hedge_opt = instruments(config)
    pool = build_pool(config)
    ev = config["evaluate"]
    rows = []
    for kappa2 in config["sweep"]["kappa2_grid"]:
        costs = CostSpec(kappa1=float(config["market"]["kappa1"]), kappa2=float(kappa2))
        policies = _evaluation_policies(args, config)
        chunks = jivr_mod.simulate_chunked(
            params, pool, int(args.paths or ev["n_paths"]),
            int(config["market"]["straddle_maturity_days"]), int(ev["test_seed"]),
            spot0=float(config["market"]["s0"]),
            chunk_size=int(config["simulation"]["chunk_size"]))
        errors, rfs, hcs, _ = xp.evaluate_policies(
            chunks, policies, costs, hedged, hedge_opt, params.rate, params.dividend)
        table = xp.benchmark_table(errors, rfs, hcs)
        table.insert(0, "kappa2", float(kappa2))
        rows.append(table)
    return pd.concat(rows, ignore_index=True)


def _sweep_lambda(config: dict) -> "pd.DataFrame":
    tr = config["training"]
    pool = build_pool(config)
    train_panels = _simulate_training_panels(config, pool, int(tr["n_train_paths"]),
                                             int(tr["train_seed"]))
    valid_panels = _simulate_training_panels(config, pool, int(tr["n_valid_paths"]),
                                             int(tr["valid_seed"]))

    def cell(measure: str, lam: float):
        cfg = copy.deepcopy(config)
        cfg["training"]["measure"] = measure
        cfg["training"]["penalty_lambda"] = float(lam)
        train_cfg = _train_config(cfg, epochs=int(config["sweep"]["epochs"]))
        policy = _new_policy(cfg)
        dataset = EpisodeDataset(train_panels, dtype=train_cfg.torch_dtype())
        valid = EpisodeDataset(valid_panels, dtype=train_cfg.torch_dtype())
        report = train_policy(policy, dataset, valid, train_cfg)
        last = report.epochs[-1]
        return last["valid_risk"], last["valid_soft_constraint"]

    return xp.lambda_sweep(cell, [float(x) for x in config["sweep"]["lambda_grid"]],
                           [config["training"]["measure"]])


def _sweep_ablation(config: dict) -> "pd.DataFrame":
    tr = config["training"]
    pool = build_pool(config)
    train_panels = _simulate_training_panels(config, pool, int(tr["n_train_paths"]),
                                             int(tr["train_seed"]))
    valid_panels = _simulate_training_panels(config, pool, int(tr["n_valid_paths"]),
                                             int(tr["valid_seed"]))

    def cell(excluded):
        cfg = copy.deepcopy(config)
        cfg["policy"]["excluded_features"] = list(excluded)
        train_cfg = _train_config(cfg, epochs=int(config["sweep"]["epochs"]))
        policy = _new_policy(cfg)
        dataset = EpisodeDataset(train_panels, dtype=train_cfg.torch_dtype())
        valid = EpisodeDataset(valid_panels, dtype=train_cfg.torch_dtype())
        report = train_policy(policy, dataset, valid, train_cfg)
        return report.epochs[-1]["valid_risk"]

    return xp.ablation_table(cell)


def cmd_backtest(args, config: dict) -> int:
    ctx = RunContext(_resolve_out(args), config, "backtest")
    try:
        params = model_params(config)
        bt = config["backtest"]
        series_path = args.series or bt.get("series_csv")
        if series_path:
            if not Path(series_path).exists():
                print(f"error: series CSV {series_path} not found", file=sys.stderr)
                return EXIT_MISSING_DATA
            series = xp.BacktestSeries.from_csv(series_path)
        else:
            pool = build_pool(config)
            series = xp.synthetic_backtest_series(
                params, pool, int(bt["synthetic_days"]), int(bt["synthetic_seed"]))
        policies = _evaluation_policies(args, config)
        per_hedge, cumulative = xp.backtest(
            series, policies, params, costs_from(config),
            cadence=int(bt["cadence_days"]),
            maturity_days=int(config["market"]["straddle_maturity_days"]),
            hedge_maturity_days=int(config["market"]["hedge_option_maturity_days"]),
            spot0=float(config["market"]["s0"]))
        xp.write_csv(per_hedge, ctx.path("backtest_hedges.csv"))
        xp.write_csv(cumulative, ctx.path("backtest_cumulative_pnl.csv"))
        xp.render_cumulative_pnl(cumulative, ctx.path("fig_cumulative_pnl.png"))
        error_cols = {c.removeprefix("error_"): per_hedge[c].to_numpy()
                      for c in per_hedge.columns if c.startswith("error_")}
        xp.render_error_histogram(error_cols, ctx.path("fig_backtest_errors.png"),
                                  bins=40, clip=None)
        ctx.write_manifest()
        print(f"backtested {len(per_hedge)} hedges over {len(series)} days")
        return EXIT_OK
    except Exception:
        ctx.cleanup_partial()
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedgelab",
        description="deep-hedging laboratory: simulate, train, evaluate, sweep, backtest",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML config file (defaults from init-config)")
        p.add_argument("--seed", type=int, help="override top-level seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int, help="torch thread count")
        p.add_argument("--kappa1", type=float, help="override underlying cost rate")
        p.add_argument("--kappa2", type=float, help="override option cost rate")
        p.add_argument("--measure", choices=["mse", "smse", "cvar"],
                       help="override training risk measure")

    p = sub.add_parser("init-config", help="write the full default config")
    p.add_argument("--out", help="target YAML path")

    p = sub.add_parser("simulate", help="simulate paths and export them")
    common(p)
    p.add_argument("--paths", type=int, help="number of paths to simulate")

    p = sub.add_parser("train", help="train the neural policy")
    common(p)
    p.add_argument("--paths", help="PathSet binary to train on (else inline simulation)")
    p.add_argument("--checkpoint", help="checkpoint output path")

    p = sub.add_parser("evaluate", help="evaluate benchmark and trained policies")
    common(p)
    p.add_argument("--paths", type=int, help="number of test paths")
    p.add_argument("--checkpoint", action="append",
                   help="policy checkpoint, repeatable; NAME=path to set the label")

    p = sub.add_parser("sweep", help="threshold / lambda / ablation / cost sweeps")
    common(p)
    p.add_argument("--paths", type=int, help="number of evaluation paths (costs sweep)")
    p.add_argument("--checkpoint", action="append",
                   help="policy checkpoint, repeatable; NAME=path to set the label")

    p = sub.add_parser("backtest", help="run rolling hedges on a (R, beta) series")
    common(p)
    p.add_argument("--series", help="historical series CSV (date, R, beta1..beta5)")
    p.add_argument("--checkpoint", action="append",
                   help="policy checkpoint, repeatable; NAME=path to set the label")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "init-config":
        return cmd_init_config(args)
    try:
        config = load_config(args.config, args)
        _apply_workers(config)
    except (FileNotFoundError, DomainError, yaml.YAMLError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handlers = {
        "simulate": cmd_simulate,
        "train": cmd_train,
        "evaluate": cmd_evaluate,
        "sweep": cmd_sweep,
        "backtest": cmd_backtest,
    }
    try:
        return handlers[args.command](args, config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_DATA
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
