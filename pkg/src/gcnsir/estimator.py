"""Spatio-temporal graph network that emits per-region SIR rates.

The network reads a window of observed compartments, mixes it along time
(gated temporal convolutions) and across regions (graph convolutions over a
learned mobility graph), and maps each region to a (beta, gamma) pair. The
pair is held over the forecast horizon and pushed through the differentiable
metapopulation rollout; training minimises the MAE of the resulting daily
new infections.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from gcnsir.ingest import EpiSeries, RegionSet
from gcnsir.mobility import InteractionMatrix, MobilityConfig, mobility_matrix
from gcnsir.sir import MetapopState, ParamTrack, euler_update, metapop_simulate

CHECKPOINT_FORMAT = "gcnsir-checkpoint/1"
N_FEATURES = 3
# sigmoid saturates to exactly 0 or 1 in float64; squeeze into the open interval
RATE_FLOOR = 1e-12
DTYPE = torch.float64


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 2.5e-5
    epochs: int = 319
    window_length: int = 28
    horizon: int = 7
    hidden_width: int = 32
    st_layers: int = 2
    kernel_width: int = 3
    beta_max: float = 2.0
    adam_b1: float = 0.9
    adam_b2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int = 0  # 0 = full batch
    train_fraction: float = 0.7
    val_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("learning_rate", "beta_max", "adam_eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("epochs", "window_length", "hidden_width", "st_layers", "kernel_width"):
            value = getattr(self, name)
            if not (isinstance(value, int) and value > 0):
                raise ValueError(f"{name} must be a positive integer")
        if not (isinstance(self.horizon, int) and 1 <= self.horizon <= 28):
            raise ValueError(f"horizon must be an integer in 1..28, got {self.horizon}")
        if not (0 < self.adam_b1 < 1 and 0 < self.adam_b2 < 1):
            raise ValueError("adam_b1 and adam_b2 must lie in (0, 1)")
        if self.batch_size < 0 or self.seed < 0:
            raise ValueError("batch_size and seed must be nonnegative")
        if not (0 < self.train_fraction and 0 < self.val_fraction
                and self.train_fraction + self.val_fraction < 1):
            raise ValueError("train/val fractions must be positive and sum below 1")
        if self.reduced_length < 1:
            raise ValueError(
                f"window_length {self.window_length} too short for {self.st_layers} layers "
                f"of kernel width {self.kernel_width}"
            )

    @property
    def reduced_length(self) -> int:
        """Time steps left after all temporal convolutions."""
        return self.window_length - self.st_layers * (self.kernel_width - 1)


# ---------------------------------------------------------------- building blocks


def _tensor(x):
    if isinstance(x, torch.Tensor):
        return x
    return torch.as_tensor(np.asarray(x, dtype=float), dtype=DTYPE)


def normalize_interaction(alpha_mn):
    """Row-stochastic version of the interaction matrix for graph mixing."""
    A = _tensor(alpha_mn)
    return A / A.sum(dim=-1, keepdim=True)


def graph_conv(features, alpha_norm, weights):
    """ReLU(alpha_norm @ features @ weights) over the region axis (second to last)."""
    X, A, W = _tensor(features), _tensor(alpha_norm), _tensor(weights)
    n = X.shape[-2]
    if A.shape != (n, n):
        raise ValueError(f"alpha_norm {tuple(A.shape)} does not match {n} regions")
    if W.shape[0] != X.shape[-1]:
        raise ValueError(f"weights {tuple(W.shape)} do not match {X.shape[-1]} channels")
    return torch.relu(torch.matmul(A, X) @ W)


def gated_temporal_conv(sequence, filter_u, filter_v, bias_u=None, bias_v=None):
    """tanh(U) * sigmoid(V) with U, V valid causal convolutions along time.

    ``sequence`` is ``[..., time, region, channel]``; filters are
    ``[kernel, in_channel, out_channel]``. The output is shorter by
    ``kernel - 1`` steps.
    """
    X, Wu, Wv = _tensor(sequence), _tensor(filter_u), _tensor(filter_v)
    k = Wu.shape[0]
    if Wv.shape != Wu.shape:
        raise ValueError("filter sets must have the same shape")
    T = X.shape[-3]
    if T < k:
        raise ValueError(f"sequence length {T} shorter than kernel width {k}")
    if Wu.shape[1] != X.shape[-1]:
        raise ValueError(f"filters expect {Wu.shape[1]} channels, sequence has {X.shape[-1]}")
    out_len = T - k + 1
    U = sum(X[..., j:j + out_len, :, :] @ Wu[j] for j in range(k))
    V = sum(X[..., j:j + out_len, :, :] @ Wv[j] for j in range(k))
    if bias_u is not None:
        U = U + _tensor(bias_u)
    if bias_v is not None:
        V = V + _tensor(bias_v)
    return torch.tanh(U) * torch.sigmoid(V)


def loss_mae(predicted, observed):
    p, o = _tensor(predicted), _tensor(observed)
    if p.shape != o.shape:
        raise ValueError(f"shape mismatch: {tuple(p.shape)} vs {tuple(o.shape)}")
    return torch.mean(torch.abs(p - o))


# ---------------------------------------------------------------- model state


def _pair_index(n: int):
    return np.triu_indices(n)


def parameter_shapes(n_regions: int, config: TrainConfig) -> dict[str, tuple[int, ...]]:
    """Declared parameter order and shapes."""
    H, k = config.hidden_width, config.kernel_width
    shapes: dict[str, tuple[int, ...]] = {}
    c_in = N_FEATURES
    for layer in range(config.st_layers):
        shapes[f"st{layer}.filter_u"] = (k, c_in, H)
        shapes[f"st{layer}.bias_u"] = (H,)
        shapes[f"st{layer}.filter_v"] = (k, c_in, H)
        shapes[f"st{layer}.bias_v"] = (H,)
        shapes[f"st{layer}.graph"] = (H, H)
        c_in = H
    shapes["head1.weight"] = (config.reduced_length * H, H)
    shapes["head1.bias"] = (H,)
    shapes["head2.weight"] = (H, 2)
    shapes["head2.bias"] = (2,)
    shapes["log_mobility"] = (n_regions * (n_regions + 1) // 2,)
    return shapes


def parameter_count(n_regions: int, config: TrainConfig) -> int:
    return sum(math.prod(s) for s in parameter_shapes(n_regions, config).values())


@dataclass
class ModelState:
    config: TrainConfig
    mobility: MobilityConfig
    region_names: tuple[str, ...]
    params: dict[str, torch.Tensor]
    moments_m: dict[str, torch.Tensor]
    moments_v: dict[str, torch.Tensor]
    step: int = 0

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def n_regions(self) -> int:
        return len(self.region_names)

    def h_matrix(self, params=None):
        p = self.params if params is None else params
        n = self.n_regions
        iu = _pair_index(n)
        values = torch.exp(p["log_mobility"])
        h = torch.zeros((n, n), dtype=DTYPE)
        h = h.index_put((torch.as_tensor(iu[0]), torch.as_tensor(iu[1])), values)
        return h + torch.triu(h, diagonal=1).T

    def interaction(self, regions: RegionSet, params=None):
        h = self.h_matrix(params)
        P = _tensor(regions.populations)
        return h / P[:, None] + h.T / P[None, :]

    def interaction_matrix(self, regions: RegionSet) -> InteractionMatrix:
        with torch.no_grad():
            return InteractionMatrix(
                self.interaction(regions).numpy().copy(), self.h_matrix().numpy().copy()
            )

    def copy(self) -> ModelState:
        clone = lambda d: {k: v.detach().clone() for k, v in d.items()}  # noqa: E731
        return dataclasses.replace(
            self, params=clone(self.params), moments_m=clone(self.moments_m),
            moments_v=clone(self.moments_v),
        )


def init_model(
    regions: RegionSet, config: TrainConfig = TrainConfig(), mobility: MobilityConfig = MobilityConfig()
) -> ModelState:
    """Glorot-uniform weights, zero biases, log-mobility from the gravity formula."""
    rng = np.random.default_rng(config.seed)
    params = {}
    for name, shape in parameter_shapes(len(regions), config).items():
        if name == "log_mobility":
            h = mobility_matrix(regions, mobility)
            values = np.log(h[_pair_index(len(regions))])
        elif len(shape) == 1:
            values = np.zeros(shape)
        else:
            fan_in = math.prod(shape[:-1])
            fan_out = shape[-1] * (shape[0] if len(shape) == 3 else 1)
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            values = rng.uniform(-limit, limit, size=shape)
        params[name] = torch.as_tensor(values, dtype=DTYPE).clone()
    zeros = lambda: {k: torch.zeros_like(v) for k, v in params.items()}  # noqa: E731
    return ModelState(config, mobility, tuple(regions.names), params, zeros(), zeros())


def _check_regions(model: ModelState, regions: RegionSet):
    if tuple(regions.names) != model.region_names:
        raise ValueError("region set does not match the model's regions")


# ---------------------------------------------------------------- forward pass


def window_features(S, I, R, new, populations):
    """Scale-free input channels, ``[..., time, region, 3]``."""
    P = _tensor(populations)
    logP = torch.log1p(P)
    return torch.stack(
        [torch.log1p(_tensor(new)) / logP, torch.log1p(_tensor(I)) / logP, _tensor(R) / P],
        dim=-1,
    )


def _rates(params, config: TrainConfig, features, alpha_norm):
    """Network body: ``[batch, time, region, channel]`` -> beta, gamma ``[batch, region]``."""
    Z = features
    for layer in range(config.st_layers):
        Z = gated_temporal_conv(
            Z,
            params[f"st{layer}.filter_u"],
            params[f"st{layer}.filter_v"],
            params[f"st{layer}.bias_u"],
            params[f"st{layer}.bias_v"],
        )
        Z = graph_conv(Z, alpha_norm, params[f"st{layer}.graph"])
    # [batch, time, region, hidden] -> [batch, region, time * hidden]
    flat = Z.permute(0, 2, 1, 3).reshape(Z.shape[0], Z.shape[2], -1)
    hidden = torch.relu(flat @ params["head1.weight"] + params["head1.bias"])
    out = RATE_FLOOR + (1.0 - 2.0 * RATE_FLOOR) * torch.sigmoid(
        hidden @ params["head2.weight"] + params["head2.bias"]
    )
    return config.beta_max * out[..., 0], out[..., 1]


def _rollout(S, I, R, beta, gamma, alpha_mn, horizon: int):
    """Daily new infections ``[batch, horizon, region]`` with rates held fixed."""
    out = []
    for _ in range(horizon):
        S, I, R, new = euler_update(S, I, R, beta, gamma, alpha_mn, 1.0)
        out.append(new)
    return torch.stack(out, dim=1)


def _check_window(window: EpiSeries, model: ModelState):
    T = model.config.window_length
    if window.n_days != T:
        raise ValueError(f"window has {window.n_days} days, model expects {T}")
    if window.n_regions != model.n_regions:
        raise ValueError(f"window has {window.n_regions} regions, model expects {model.n_regions}")
    if window.n_days > 1 and np.any(np.diff(window.dates) != 1):
        raise ValueError("window has a gap in its dates")
    for name in ("susceptible", "infected", "removed", "new_cases"):
        if not np.all(np.isfinite(getattr(window, name))):
            raise ValueError(f"window {name} has missing values")


def forward(window: EpiSeries, model: ModelState, regions: RegionSet, horizon: int | None = None):
    """Rates for each forecast day; one forward pass held over the horizon."""
    _check_regions(model, regions)
    _check_window(window, model)
    horizon = model.config.horizon if horizon is None else horizon
    with torch.no_grad():
        feats = window_features(
            window.susceptible, window.infected, window.removed, window.new_cases,
            regions.populations,
        )[None]
        alpha = model.interaction(regions)
        beta, gamma = _rates(model.params, model.config, feats, normalize_interaction(alpha))
    return ParamTrack.constant(beta[0].numpy(), gamma[0].numpy(), horizon)


# ---------------------------------------------------------------- samples and loss


@dataclass(frozen=True)
class SampleSet:
    """Windows ending at ``origins`` with targets on the following ``horizon`` days."""

    origins: np.ndarray
    features: torch.Tensor  # [batch, time, region, channel]
    state: tuple[torch.Tensor, torch.Tensor, torch.Tensor]  # S, I, R at origin
    targets: torch.Tensor  # [batch, horizon, region]

    def __len__(self):
        return len(self.origins)

    def take(self, idx) -> SampleSet:
        idx = torch.as_tensor(np.asarray(idx))
        return SampleSet(
            self.origins[idx.numpy()], self.features[idx],
            tuple(x[idx] for x in self.state), self.targets[idx],
        )


def make_samples(series: EpiSeries, regions: RegionSet, window_length: int, horizon: int, origins):
    origins = np.asarray(origins, dtype=np.int64)
    feats_all = window_features(
        series.susceptible, series.infected, series.removed, series.new_cases, regions.populations
    )
    lags = np.arange(window_length - 1, -1, -1)
    tidx = origins[:, None] - lags[None, :]
    fidx = origins[:, None] + np.arange(1, horizon + 1)[None, :]
    if origins.size and (tidx.min() < 0 or fidx.max() >= series.n_days):
        raise ValueError("sample windows fall outside the series")
    state = tuple(
        _tensor(a[origins]) for a in (series.susceptible, series.infected, series.removed)
    )
    return SampleSet(
        origins, feats_all[torch.as_tensor(tidx)], state, _tensor(series.new_cases[fidx])
    )


@dataclass(frozen=True)
class Split:
    """Day boundaries: train targets < val_start <= val targets < test_start <= test targets."""

    n_days: int
    val_start: int
    test_start: int

    @classmethod
    def chronological(cls, n_days: int, train_fraction=0.7, val_fraction=0.1) -> Split:
        val_start = int(round(train_fraction * n_days))
        test_start = int(round((train_fraction + val_fraction) * n_days))
        return cls(n_days, val_start, test_start)

    def origins(self, part: str, window_length: int, horizon: int) -> np.ndarray:
        """Origins whose whole target span lies inside ``part``."""
        lo, hi = {
            "train": (0, self.val_start),
            "val": (self.val_start, self.test_start),
            "test": (self.test_start, self.n_days),
        }[part]
        first = max(window_length - 1, lo - 1)
        last = hi - 1 - horizon
        return np.arange(first, last + 1) if last >= first else np.arange(0)


def batch_loss(params, model: ModelState, regions: RegionSet, samples: SampleSet, horizon=None):
    horizon = model.config.horizon if horizon is None else horizon
    alpha = model.interaction(regions, params)
    beta, gamma = _rates(params, model.config, samples.features, normalize_interaction(alpha))
    pred = _rollout(*samples.state, beta, gamma, alpha, horizon)
    return loss_mae(pred, samples.targets[:, :horizon])


def backward(model: ModelState, window: EpiSeries, observed, regions: RegionSet) -> dict[str, np.ndarray]:
    """Exact gradients of the rollout MAE for one window.

    ``observed`` holds the new cases on the days after the window,
    ``[horizon, region]``.
    """
    _check_regions(model, regions)
    _check_window(window, model)
    observed = np.asarray(observed, dtype=float)
    samples = SampleSet(
        np.array([window.n_days - 1]),
        window_features(window.susceptible, window.infected, window.removed, window.new_cases,
                        regions.populations)[None],
        tuple(_tensor(a[-1])[None] for a in (window.susceptible, window.infected, window.removed)),
        _tensor(observed)[None],
    )
    grads = _gradients(model, regions, samples, model.params, horizon=observed.shape[0])[1]
    return {k: g.numpy() for k, g in grads.items()}


def _gradients(model, regions, samples, params, horizon=None):
    leaves = {k: v.detach().clone().requires_grad_(True) for k, v in params.items()}
    loss = batch_loss(leaves, model, regions, samples, horizon)
    names = list(leaves)
    grads = torch.autograd.grad(loss, [leaves[k] for k in names], allow_unused=True)
    out = {
        k: (torch.zeros_like(leaves[k]) if g is None else g.detach()) for k, g in zip(names, grads)
    }
    return float(loss.detach()), out


def loss_value(model, regions, samples, params=None, horizon=None) -> float:
    with torch.no_grad():
        return float(batch_loss(model.params if params is None else params, model, regions,
                                samples, horizon))


# ---------------------------------------------------------------- training


def adam_update(model: ModelState, grads: dict[str, torch.Tensor]) -> None:
    cfg = model.config
    model.step += 1
    b1, b2 = cfg.adam_b1, cfg.adam_b2
    c1 = 1.0 - b1**model.step
    c2 = 1.0 - b2**model.step
    for name, g in grads.items():
        m = model.moments_m[name].mul_(b1).add_(g, alpha=1.0 - b1)
        v = model.moments_v[name].mul_(b2).addcmul_(g, g, value=1.0 - b2)
        step = cfg.learning_rate * (m / c1) / (torch.sqrt(v / c2) + cfg.adam_eps)
        model.params[name] = model.params[name] - step


@dataclass
class LossHistory:
    epochs: list[int] = dataclasses.field(default_factory=list)
    train_mae: list[float] = dataclasses.field(default_factory=list)
    val_mae: list[float] = dataclasses.field(default_factory=list)

    def append(self, epoch, train, val):
        self.epochs.append(epoch)
        self.train_mae.append(train)
        self.val_mae.append(val)

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "train_mae", "val_mae"])
            for row in zip(self.epochs, self.train_mae, self.val_mae):
                w.writerow([row[0], repr(row[1]), repr(row[2])])

    @classmethod
    def read_csv(cls, path) -> LossHistory:
        out = cls()
        with Path(path).open(newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                out.append(int(row["epoch"]), float(row["train_mae"]), float(row["val_mae"]))
        return out


def split_samples(dataset: EpiSeries, regions: RegionSet, config: TrainConfig):
    split = Split.chronological(dataset.n_days, config.train_fraction, config.val_fraction)
    parts = {}
    for part in ("train", "val", "test"):
        origins = split.origins(part, config.window_length, config.horizon)
        parts[part] = make_samples(dataset, regions, config.window_length, config.horizon, origins)
    return split, parts


def train(
    dataset: EpiSeries,
    regions: RegionSet,
    config: TrainConfig = TrainConfig(),
    mobility: MobilityConfig = MobilityConfig(),
    callback=None,
) -> tuple[ModelState, LossHistory]:
    """Adam on the rollout MAE; returns the best-validation model and the loss trajectory.

    History row 0 is the untrained model; row e follows epoch e.
    """
    if dataset.n_regions != len(regions):
        raise ValueError("dataset and region set disagree on the number of regions")
    if dataset.n_days <= config.window_length + config.horizon:
        raise ValueError(
            f"dataset has {dataset.n_days} days; need more than window_length + horizon = "
            f"{config.window_length + config.horizon}"
        )
    _, parts = split_samples(dataset, regions, config)
    train_set, val_set = parts["train"], parts["val"]
    if len(train_set) == 0 or len(val_set) == 0:
        raise ValueError(
            f"dataset of {dataset.n_days} days leaves {len(train_set)} training and "
            f"{len(val_set)} validation windows; use a longer series or a shorter "
            f"window_length/horizon"
        )

    model = init_model(regions, config, mobility)
    history = LossHistory()
    history.append(0, loss_value(model, regions, train_set), loss_value(model, regions, val_set))
    best, best_val = model.copy(), history.val_mae[0]
    rng = np.random.default_rng(config.seed)
    batch = config.batch_size or len(train_set)

    for epoch in range(1, config.epochs + 1):
        if batch >= len(train_set):
            batches = [np.arange(len(train_set))]
        else:
            order = rng.permutation(len(train_set))
            batches = [order[i:i + batch] for i in range(0, len(order), batch)]
        for idx in batches:
            _, grads = _gradients(model, regions, train_set.take(idx), model.params)
            adam_update(model, grads)
        train_mae = loss_value(model, regions, train_set)
        val_mae = loss_value(model, regions, val_set)
        history.append(epoch, train_mae, val_mae)
        if val_mae < best_val:
            best, best_val = model.copy(), val_mae
        if callback is not None:
            callback(epoch, train_mae, val_mae)
    return best, history


# ---------------------------------------------------------------- forecasting


def forecast(model: ModelState, latest_window: EpiSeries, regions: RegionSet, horizon: int):
    """Predicted daily new infections ``[horizon, region]`` and the rate track used."""
    if not (isinstance(horizon, (int, np.integer)) and 1 <= horizon <= 28):
        raise ValueError(f"horizon must be an integer in 1..28, got {horizon}")
    track = forward(latest_window, model, regions, int(horizon))
    initial = MetapopState.from_series(latest_window)
    sim = metapop_simulate(initial, track, model.interaction_matrix(regions), int(horizon))
    return sim.new_cases, track


def forecast_batch(model: ModelState, series: EpiSeries, regions: RegionSet, origins, horizon: int):
    """Vectorised rolling forecasts from each origin: new cases, beta, gamma."""
    samples = make_samples(series, regions, model.config.window_length, horizon, origins)
    with torch.no_grad():
        alpha = model.interaction(regions)
        beta, gamma = _rates(model.params, model.config, samples.features,
                             normalize_interaction(alpha))
        pred = _rollout(*samples.state, beta, gamma, alpha, horizon)
    return pred.numpy(), beta.numpy(), gamma.numpy()


def rates_at(model: ModelState, series: EpiSeries, regions: RegionSet, origins):
    """Network (beta, gamma), ``[origin, region]``, from windows ending at ``origins``."""
    _check_regions(model, regions)
    origins = np.asarray(origins, dtype=np.int64)
    T = model.config.window_length
    if origins.size and (origins.min() < T - 1 or origins.max() >= series.n_days):
        raise ValueError("origins need a full window inside the series")
    tidx = origins[:, None] - np.arange(T - 1, -1, -1)[None, :]
    feats = window_features(series.susceptible, series.infected, series.removed,
                            series.new_cases, regions.populations)
    with torch.no_grad():
        alpha = model.interaction(regions)
        beta, gamma = _rates(model.params, model.config, feats[torch.as_tensor(tidx)],
                             normalize_interaction(alpha))
    return beta.numpy(), gamma.numpy()


# ---------------------------------------------------------------- checkpoints


def _array_record(name, tensor):
    arr = tensor.detach().numpy()
    return {"name": name, "shape": list(arr.shape), "values": [float(v) for v in arr.ravel()]}


def checkpoint_dict(model: ModelState, extra: dict | None = None) -> dict:
    return {
        "format": CHECKPOINT_FORMAT,
        "seed": model.seed,
        "config": dataclasses.asdict(model.config),
        "mobility": dataclasses.asdict(model.mobility),
        "regions": list(model.region_names),
        "adam_step": model.step,
        "parameters": [_array_record(k, v) for k, v in model.params.items()],
        "moments_m": [_array_record(k, v) for k, v in model.moments_m.items()],
        "moments_v": [_array_record(k, v) for k, v in model.moments_v.items()],
        "extra": extra or {},
    }


def save_checkpoint(path, model: ModelState, extra: dict | None = None) -> str:
    """Write a JSON checkpoint; returns its SHA-256 digest."""
    text = json.dumps(checkpoint_dict(model, extra), indent=1, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="utf-8")
    return hashlib.sha256(text.encode()).hexdigest()


def load_checkpoint(path) -> ModelState:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: unsupported checkpoint format {data.get('format')!r}")
    config = TrainConfig(**data["config"])
    mobility = MobilityConfig(**data["mobility"])
    names = tuple(data["regions"])
    expected = parameter_shapes(len(names), config)

    def arrays(records):
        out = {}
        for rec in records:
            out[rec["name"]] = torch.as_tensor(
                np.array(rec["values"], dtype=float).reshape(rec["shape"]), dtype=DTYPE
            )
        if list(out) != list(expected) or any(
            tuple(out[k].shape) != expected[k] for k in expected
        ):
            raise ValueError(f"{path}: parameter layout does not match the configuration")
        return out

    return ModelState(
        config, mobility, names, arrays(data["parameters"]), arrays(data["moments_m"]),
        arrays(data["moments_v"]), int(data["adam_step"]),
    )
