"""Command-line pipeline: ingest, train, forecast, evaluate, r0."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from gcnsir import config as cfgmod
from gcnsir.config import ConfigError, RunConfig
from gcnsir.errors import SchemaError, UnknownRegionError
from gcnsir.estimator import (
    Split,
    forecast,
    forecast_batch,
    load_checkpoint,
    rates_at,
    save_checkpoint,
    train,
)
from gcnsir.evaluation import evaluate, plot_rows
from gcnsir.ingest import (
    RegionSet,
    ingest,
    read_epi_csv,
    read_matrix_csv,
    read_populations,
    write_epi_csv,
    write_matrix_csv,
    write_regions_csv,
)
from gcnsir.reproduction import r0_track, write_r0_csv
from gcnsir.sir import ParamTrack

log = logging.getLogger("gcnsir")

SERIES_FILE = "series.csv"
REGIONS_FILE = "regions.csv"
DISTANCES_FILE = "distances.csv"
CHECKPOINT_FILE = "checkpoint.json"
HISTORY_FILE = "loss_history.csv"


class UsageError(Exception):
    pass


def _echo(config: RunConfig) -> dict:
    echo = config.echo()
    echo["paths"].pop("workdir", None)  # outputs must not depend on where they are written
    return echo


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _write_provenance(config: RunConfig, output: Path, checkpoint: Path, seed: int) -> None:
    """Config echo, seed and checkpoint digest beside a fixed-schema CSV."""
    digest = hashlib.sha256(checkpoint.read_bytes()).hexdigest()
    _write_json(output.with_suffix(".provenance.json"), {
        "output": output.name,
        "config": _echo(config),
        "seed": seed,
        "checkpoint_sha256": digest,
    })


def _load_workdir(config: RunConfig):
    wd = config.workdir
    needed = [wd / SERIES_FILE, wd / REGIONS_FILE, wd / DISTANCES_FILE]
    missing = [str(p) for p in needed if not p.is_file()]
    if missing:
        raise ConfigError(f"missing ingest outputs {missing}; run 'gcnsir ingest' first")
    series, names = read_epi_csv(wd / SERIES_FILE)
    pops = read_populations(wd / REGIONS_FILE)
    dist_names, dist = read_matrix_csv(wd / DISTANCES_FILE)
    if list(dist_names) != list(names) or list(pops) != list(names):
        raise SchemaError(f"{wd}: region order differs between ingest outputs")
    regions = RegionSet(tuple(names), np.array([pops[n] for n in names]), dist)
    return series, regions


def _checkpoint_path(config: RunConfig, args) -> Path:
    path = Path(args.checkpoint) if getattr(args, "checkpoint", None) else config.workdir / CHECKPOINT_FILE
    if not path.is_file():
        raise ConfigError(f"checkpoint not found: {path}; run 'gcnsir train' first")
    return path


def cmd_ingest(config: RunConfig, args) -> int:
    cfgmod.require_inputs(config)
    result = ingest(config.paths.cases, config.paths.populations, config.paths.distances,
                    config.ingest)
    wd = config.workdir
    wd.mkdir(parents=True, exist_ok=True)
    write_epi_csv(wd / SERIES_FILE, result.series, result.regions.names)
    write_regions_csv(wd / REGIONS_FILE, result.regions)
    write_matrix_csv(wd / DISTANCES_FILE, result.regions.distances, result.regions.names)
    summary = dict(result.summary, config=_echo(config))
    _write_json(wd / "ingest_summary.json", summary)
    print(f"regions: {summary['regions']}")
    print(f"days: {summary['days']} ({summary['first_date']} .. {summary['last_date']})")
    print(f"clamped negative increments: {summary['clamped_negatives']}")
    return 0


def cmd_train(config: RunConfig, args) -> int:
    series, regions = _load_workdir(config)
    model, history = train(series, regions, config.train, config.mobility,
                           callback=lambda e, t, v: log.info("epoch %d train %.6g val %.6g", e, t, v))
    best = int(np.argmin(history.val_mae))
    extra = {
        "run_config": _echo(config),
        "best_epoch": best,
        "train_mae": history.train_mae[best],
        "val_mae": history.val_mae[best],
    }
    digest = save_checkpoint(config.workdir / CHECKPOINT_FILE, model, extra)
    history.write_csv(config.workdir / HISTORY_FILE)
    print(f"final train MAE: {history.train_mae[-1]:.6g}")
    print(f"final val MAE: {history.val_mae[-1]:.6g}")
    print(f"best epoch {best}: train MAE {history.train_mae[best]:.6g}, "
          f"val MAE {history.val_mae[best]:.6g}")
    print(f"checkpoint sha256: {digest}")
    return 0


def cmd_forecast(config: RunConfig, args) -> int:
    series, regions = _load_workdir(config)
    ckpt = _checkpoint_path(config, args)
    model = load_checkpoint(ckpt)
    h = args.horizon
    window = series.window(series.n_days - model.config.window_length, series.n_days)
    pred, track = forecast(model, window, regions, h)
    out = config.workdir / f"forecast_h{h}.csv"
    last = int(series.dates[-1])
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["region", "day", "predicted_new_cases", "beta", "gamma"])
        for j, name in enumerate(regions.names):
            for k in range(h):
                w.writerow([name, last + k + 1, f"{pred[k, j]:.15g}",
                            f"{track.beta_t[k, j]:.15g}", f"{track.gamma_t[k, j]:.15g}"])
    _write_provenance(config, out, ckpt, model.seed)
    print(f"wrote {out}")
    return 0


def cmd_r0(config: RunConfig, args) -> int:
    """R0/Rt for every day a full input window is available, dated by the forecast day."""
    series, regions = _load_workdir(config)
    ckpt = _checkpoint_path(config, args)
    model = load_checkpoint(ckpt)
    T = model.config.window_length
    origins = np.arange(T - 1, series.n_days)
    beta, gamma = rates_at(model, series, regions, origins)
    track = r0_track(
        ParamTrack(beta, gamma),
        model.interaction_matrix(regions),
        regions,
        susceptible=series.susceptible[origins],
        days=series.dates[origins] + 1,
        smooth=args.smooth or config.r0.smooth,
    )
    out = config.workdir / "r0.csv"
    write_r0_csv(out, track)
    _write_provenance(config, out, ckpt, model.seed)
    print(f"wrote {out}")
    return 0


def cmd_evaluate(config: RunConfig, args) -> int:
    series, regions = _load_workdir(config)
    model = load_checkpoint(_checkpoint_path(config, args))
    horizons = tuple(config.evaluate.horizons)
    report = evaluate(model, series, regions, horizons)
    report.header["config"] = _echo(config)
    report.header["forecast_hold"] = "rates from one forward pass held over the horizon"
    wd = config.workdir
    (wd / "report.json").write_text(report.to_json(), encoding="utf-8")
    report.write_csv(wd / "report.csv")
    split = Split.chronological(series.n_days, model.config.train_fraction,
                                model.config.val_fraction)

    def predict(origins, h):
        return forecast_batch(model, series, regions, origins, h)[0]

    for h in horizons:
        with (wd / f"plot_h{h}.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["region", "day", "predicted", "observed"])
            for name, day, p, o in plot_rows(predict, series, regions, split,
                                             model.config.window_length, h):
                w.writerow([name, day, f"{p:.15g}", f"{o:.15g}"])
    for n in report.national:
        print(f"horizon {n.horizon}: model MAE {n.model_mae:.6g}, "
              f"baseline MAE {n.baseline_mae:.6g}")
    for h, c in sorted(report.correlation.items()):
        good = [r for r in report.per_region
                if r.horizon == h and r.r_squared is not None and r.r_squared > 0.6]
        print(f"horizon {h}: {len(good)}/{len(regions)} regions with R^2 > 0.6, "
              f"R^2 vs log10 population r = {c}")
    return 0


def cmd_validate_config(config: RunConfig, args) -> int:
    print(json.dumps(config.echo(), indent=1, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="override a config value")
    common.add_argument("--workdir", help="output directory (overrides config and environment)")
    common.add_argument("--seed", type=int, help="training seed")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gcnsir", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="build daily S/I/R series")
    p = sub.add_parser("train", parents=[common], help="train the network")
    p.add_argument("--epochs", type=int)
    p = sub.add_parser("forecast", parents=[common], help="forecast from the latest window")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--checkpoint")
    p = sub.add_parser("evaluate", parents=[common], help="rolling-origin evaluation")
    p.add_argument("--checkpoint")
    p = sub.add_parser("r0", parents=[common], help="reproduction-number track")
    p.add_argument("--checkpoint")
    p.add_argument("--smooth", action="store_true", help="7-day centered moving average")
    sub.add_parser("validate-config", parents=[common], help="print the resolved configuration")
    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "train": cmd_train,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "r0": cmd_r0,
    "validate-config": cmd_validate_config,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = list(args.overrides)
    if args.workdir:
        overrides.append(f"paths.workdir={json.dumps(args.workdir)}")
    if args.seed is not None:
        overrides.append(f"train.seed={args.seed}")
    if getattr(args, "epochs", None) is not None:
        overrides.append(f"train.epochs={args.epochs}")
    try:
        if getattr(args, "horizon", 1) is not None and not 1 <= getattr(args, "horizon", 1) <= 28:
            raise UsageError(f"--horizon must be in 1..28, got {args.horizon}")
        config = cfgmod.load_config(args.config, overrides)
        return COMMANDS[args.command](config, args)
    except (UsageError, ConfigError, SchemaError, UnknownRegionError, ValueError,
            FileNotFoundError) as exc:
        print(f"gcnsir {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"gcnsir {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
