"""Forecast scoring: per-region R^2, population correlation, baseline comparison."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from gcnsir.estimator import ModelState, Split, forecast_batch
from gcnsir.ingest import EpiSeries, RegionSet
from gcnsir.sir import _standard_step, fit_standard_sir

DEFAULT_BETA_GRID = tuple(np.round(np.arange(0.02, 1.001, 0.02), 10))
DEFAULT_GAMMA_GRID = tuple(np.round(np.arange(0.02, 0.501, 0.02), 10))
BASELINE_FIT_HORIZON = 7


def r_squared(predicted, observed) -> float:
    p = np.asarray(predicted, dtype=float)
    o = np.asarray(observed, dtype=float)
    if p.shape != o.shape or o.ndim != 1 or len(o) < 2:
        raise ValueError("need two equal-length series of at least 2 points")
    ss_tot = float(np.sum((o - o.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValueError("observed series is constant; R^2 is undefined")
    return 1.0 - float(np.sum((o - p) ** 2)) / ss_tot


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 3:
        raise ValueError("need at least 3 paired values")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = math.sqrt(float(dx @ dx)), math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("degenerate variance")
    return float(np.clip((dx @ dy) / (sx * sy), -1.0, 1.0))


@dataclass
class RegionFit:
    region: str
    horizon: int
    r_squared: float | None
    population: float


@dataclass
class NationalFit:
    horizon: int
    model_mae: float
    baseline_mae: float
    n_points: int


@dataclass
class EvalReport:
    per_region: list[RegionFit]
    national: list[NationalFit]
    correlation: dict[int, float | None]
    baseline: dict = field(default_factory=dict)
    header: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "baseline": self.baseline,
            "correlation": {str(k): v for k, v in self.correlation.items()},
            "national": [asdict(n) for n in self.national],
            "per_region": [asdict(r) for r in self.per_region],
        }

    @classmethod
    def from_dict(cls, data: dict) -> EvalReport:
        return cls(
            [RegionFit(**r) for r in data["per_region"]],
            [NationalFit(**n) for n in data["national"]],
            {int(k): v for k, v in data["correlation"].items()},
            data.get("baseline", {}),
            data.get("header", {}),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> EvalReport:
        return cls.from_dict(json.loads(text))

    def write_csv(self, path) -> None:
        """Flat table: one row per (kind, horizon, region)."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["kind", "horizon", "region", "r_squared", "population",
                        "model_mae", "baseline_mae"])
            for n in self.national:
                w.writerow(["national", n.horizon, "", "", "", repr(n.model_mae),
                            repr(n.baseline_mae)])
            for h, c in sorted(self.correlation.items()):
                w.writerow(["correlation", h, "", "" if c is None else repr(c), "", "", ""])
            for r in self.per_region:
                w.writerow(["region", r.horizon, r.region,
                            "" if r.r_squared is None else repr(r.r_squared),
                            repr(r.population), "", ""])


def population_correlation(rows) -> float:
    """Pearson r between R^2 and log10 population over rows with a defined R^2."""
    rows = [r for r in rows if r.r_squared is not None]
    return pearson([r.r_squared for r in rows], np.log10([r.population for r in rows]))


def rolling_origins(split: Split, window_length: int, horizon: int) -> np.ndarray:
    """Forecast origins whose forecast span lies in the test period."""
    first = max(split.test_start - 1, window_length - 1)
    last = split.n_days - 1 - horizon
    return np.arange(first, last + 1) if last >= first else np.arange(0)


def baseline_forecast(national: EpiSeries, beta: float, gamma: float, origins, horizon: int):
    """Standard SIR restarted from the observed national state at each origin."""
    S = national.susceptible[origins, 0]
    I = national.infected[origins, 0]
    R = national.removed[origins, 0]
    P = S + I + R
    for _ in range(horizon):
        S, I, R, new = _standard_step(S, I, R, beta, gamma, P)
    return new


def evaluate_forecaster(
    predict,
    dataset: EpiSeries,
    regions: RegionSet,
    window_length: int,
    horizons=(1, 7),
    split: Split | None = None,
    beta_grid=DEFAULT_BETA_GRID,
    gamma_grid=DEFAULT_GAMMA_GRID,
) -> EvalReport:
    """Rolling-origin evaluation of ``predict(origins, horizon) -> [batch, horizon, region]``."""
    split = split or Split.chronological(dataset.n_days)
    national = dataset.aggregate()
    fit_days = national.window(0, split.val_start)
    beta, gamma, fit_loss = fit_standard_sir(
        fit_days, beta_grid, gamma_grid, horizon=BASELINE_FIT_HORIZON
    )
    per_region, nat, corr = [], [], {}
    for h in horizons:
        origins = rolling_origins(split, window_length, h)
        if origins.size == 0:
            raise ValueError(f"test period too short for horizon {h}")
        pred = np.asarray(predict(origins, h))[:, h - 1, :]
        obs = dataset.new_cases[origins + h]
        rows = []
        for j, name in enumerate(regions.names):
            try:
                r2 = r_squared(pred[:, j], obs[:, j])
            except ValueError:
                r2 = None
            rows.append(RegionFit(name, h, r2, float(regions.populations[j])))
        per_region.extend(rows)
        try:
            corr[h] = population_correlation(rows)
        except ValueError:
            corr[h] = None
        base = baseline_forecast(national, beta, gamma, origins, h)
        nat.append(NationalFit(
            h,
            float(np.mean(np.abs(pred.sum(axis=1) - obs.sum(axis=1)))),
            float(np.mean(np.abs(base - obs.sum(axis=1)))),
            int(origins.size),
        ))
    baseline = {"beta": beta, "gamma": gamma, "fit_mae": fit_loss,
                "fit_horizon": BASELINE_FIT_HORIZON, "method": "grid search, rolling restarts"}
    header = {"n_days": split.n_days, "val_start": split.val_start,
              "test_start": split.test_start, "horizons": list(horizons)}
    return EvalReport(per_region, nat, corr, baseline, header)


def evaluate(model: ModelState, dataset: EpiSeries, regions: RegionSet, horizons=(1, 7),
             **kwargs) -> EvalReport:
    cfg = model.config
    split = Split.chronological(dataset.n_days, cfg.train_fraction, cfg.val_fraction)

    def predict(origins, h):
        return forecast_batch(model, dataset, regions, origins, h)[0]

    report = evaluate_forecaster(predict, dataset, regions, cfg.window_length, horizons,
                                 split, **kwargs)
    report.header["seed"] = model.seed
    report.header["split"] = {"train_fraction": cfg.train_fraction,
                              "val_fraction": cfg.val_fraction,
                              "test_fraction": round(1.0 - cfg.train_fraction - cfg.val_fraction, 12)}
    return report


def plot_rows(predict, dataset: EpiSeries, regions: RegionSet, split: Split, window_length: int,
              horizon: int):
    """(region, day, predicted, observed) rows for one horizon."""
    origins = rolling_origins(split, window_length, horizon)
    pred = np.asarray(predict(origins, horizon))[:, horizon - 1, :]
    obs = dataset.new_cases[origins + horizon]
    days = dataset.dates[origins + horizon]
    for j, name in enumerate(regions.names):
        for k, day in enumerate(days):
            yield name, int(day), float(pred[k, j]), float(obs[k, j])
