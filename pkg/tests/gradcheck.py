"""Central-difference check of the rollout-loss gradients."""
import numpy as np
import torch

from gcnsir.estimator import (
    SampleSet,
    TrainConfig,
    _tensor,
    backward,
    batch_loss,
    init_model,
    window_features,
)
from gcnsir.ingest import EpiSeries
from gcnsir.synthetic import random_regions


def random_window(regions, T, seed=0, infected_frac=1e-3):
    rng = np.random.default_rng(seed)
    P = regions.populations
    n = len(P)
    I = rng.uniform(0.2, 1.0, (T, n)) * infected_frac * P
    R = rng.uniform(0.0, 1.0, (T, n)) * 2 * infected_frac * P
    new = rng.uniform(0.0, 0.3, (T, n)) * I
    return EpiSeries(np.arange(T), P - I - R, I, R, new)


def _loss(model, regions, samples, horizon, name, flat_index, value):
    params = {k: v.clone() for k, v in model.params.items()}
    params[name].view(-1)[flat_index] = value
    with torch.no_grad():
        return float(batch_loss(params, model, regions, samples, horizon))


def finite_difference_check(seed, max_entries=None, step=1e-4):
    """Worst relative gap between autograd and a five-point central difference.

    The instance has N <= 4 regions and T_in <= 8 days; targets are jittered
    away from the predictions so MAE kinks are not straddled. The relative gap
    uses a floor of 1e-6 times the largest gradient entry, so entries that are
    zero up to rounding are compared absolutely. Entries whose two central
    differences (steps h and 2h) disagree sit on a kink and are skipped.
    Returns ``(worst, checked, skipped)``.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    T = int(rng.integers(4, 9))
    regions = random_regions(n, seed=seed, pop_range=(1e4, 1e5))
    cfg = TrainConfig(window_length=T, horizon=int(rng.integers(1, 4)), hidden_width=3,
                      kernel_width=2, st_layers=int(rng.integers(1, 3)) if T >= 5 else 1,
                      seed=seed)
    model = init_model(regions, cfg)
    # zero biases put every ReLU of a dead layer exactly on its kink
    for name, value in model.params.items():
        if "bias" in name:
            model.params[name] = torch.as_tensor(rng.uniform(-0.1, 0.1, value.shape))
    window = random_window(regions, T, seed, infected_frac=0.05)
    observed = rng.uniform(0.5, 2.0, (cfg.horizon, n)) * window.new_cases[-1].mean()
    grads = backward(model, window, observed, regions)
    samples = SampleSet(
        np.array([T - 1]),
        window_features(window.susceptible, window.infected, window.removed, window.new_cases,
                        regions.populations)[None],
        tuple(_tensor(a[-1])[None] for a in (window.susceptible, window.infected, window.removed)),
        _tensor(observed)[None],
    )
    entries = [(k, i) for k, v in model.params.items() for i in range(v.numel())]
    if max_entries is not None and len(entries) > max_entries:
        pick = rng.choice(len(entries), max_entries, replace=False)
        entries = [entries[i] for i in sorted(pick)]
    floor = 1e-6 * max(float(np.abs(g).max()) for g in grads.values())
    worst, kinks = 0.0, 0
    for name, idx in entries:
        x0 = float(model.params[name].view(-1)[idx])
        h = step * max(1.0, abs(x0))
        f = [_loss(model, regions, samples, cfg.horizon, name, idx, x0 + k * h)
             for k in (-2, -1, 1, 2)]
        d1 = (f[2] - f[1]) / (2 * h)
        d2 = (f[3] - f[0]) / (4 * h)
        if abs(d1 - d2) > 1e-2 * max(abs(d1), abs(d2), floor):
            kinks += 1  # stencil straddles a ReLU/MAE/cap kink: not differentiable here
            continue
        fd = (4 * d1 - d2) / 3  # Richardson: the five-point stencil
        g = float(grads[name].ravel()[idx])
        worst = max(worst, abs(fd - g) / max(abs(fd), abs(g), floor))
    return worst, len(entries) - kinks, kinks
