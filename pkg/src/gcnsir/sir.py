"""Explicit-Euler integrators for metapopulation and single-population SIR."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from gcnsir.ingest import EpiSeries
from gcnsir.mobility import InteractionMatrix


@dataclass(frozen=True)
class MetapopState:
    S: np.ndarray
    I: np.ndarray
    R: np.ndarray
    # inflow to I during the step that produced this state
    new_infections: np.ndarray | None = None

    @classmethod
    def from_series(cls, series: EpiSeries, day: int = -1) -> MetapopState:
        return cls(series.susceptible[day], series.infected[day], series.removed[day])

    @property
    def total(self):
        return self.S + self.I + self.R


@dataclass(frozen=True)
class RateSet:
    beta: np.ndarray
    gamma: np.ndarray


@dataclass(frozen=True)
class ParamTrack:
    """Per-day, per-region rates; arrays are ``[day, region]``."""

    beta_t: np.ndarray
    gamma_t: np.ndarray

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.beta_t, dtype=float))
        g = np.atleast_2d(np.asarray(self.gamma_t, dtype=float))
        if b.shape != g.shape:
            raise ValueError(f"beta_t {b.shape} and gamma_t {g.shape} differ")
        object.__setattr__(self, "beta_t", b)
        object.__setattr__(self, "gamma_t", g)

    def __len__(self):
        return self.beta_t.shape[0]

    def at(self, day: int) -> RateSet:
        """Rates for ``day``; past the end the last values are held."""
        k = min(day, len(self) - 1)
        return RateSet(self.beta_t[k], self.gamma_t[k])

    @classmethod
    def constant(cls, beta, gamma, days: int = 1) -> ParamTrack:
        beta, gamma = np.broadcast_arrays(np.asarray(beta, float), np.asarray(gamma, float))
        return cls(np.tile(beta, (days, 1)), np.tile(gamma, (days, 1)))


def _minimum(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray) or np.isscalar(a):
        return np.minimum(a, b)
    import torch

    return torch.minimum(a, b)


def euler_update(S, I, R, beta, gamma, alpha_mn, dt=1.0):
    """One Euler step of the metapopulation system.

    Works on numpy arrays or torch tensors with arbitrary leading batch
    dimensions; the trailing axis is the region axis. Returns
    ``(S, I, R, new_infections)``. Infections are capped at S and removals
    at I, so every compartment stays nonnegative; flows are moved between
    compartments rather than S being re-derived from the total, which would
    cost S its relative precision once it is small next to P.
    """
    force = I @ alpha_mn  # sum_m I_m alpha_mn
    new = _minimum(S * beta * force * dt, S)
    removal = _minimum(gamma * I * dt, I)
    return S - new, I + new - removal, R + removal, new


def _check_state(state: MetapopState):
    for name in ("S", "I", "R"):
        arr = np.asarray(getattr(state, name), dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} contains non-finite values")
        if np.any(arr < 0):
            raise ValueError(f"{name} contains negative values")


def metapop_step(
    state: MetapopState, rates: RateSet, alpha_mn: InteractionMatrix, dt: float = 1.0
) -> MetapopState:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    _check_state(state)
    beta = np.asarray(rates.beta, dtype=float)
    gamma = np.asarray(rates.gamma, dtype=float)
    if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(gamma))):
        raise ValueError("rates contain non-finite values")
    if np.any(beta < 0) or np.any(gamma < 0):
        raise ValueError("rates must be nonnegative")
    A = alpha_mn.alpha_mn if isinstance(alpha_mn, InteractionMatrix) else np.asarray(alpha_mn)
    n = np.shape(state.S)[-1]
    if A.shape != (n, n):
        raise ValueError(f"interaction matrix {A.shape} does not match {n} regions")
    S, I, R = (np.asarray(x, dtype=float) for x in (state.S, state.I, state.R))
    S, I, R, new = euler_update(S, I, R, beta, gamma, A, dt)
    return MetapopState(S, I, R, new)


def metapop_simulate(
    initial: MetapopState, rate_track: ParamTrack, alpha_mn: InteractionMatrix, horizon: int
) -> EpiSeries:
    """Roll forward ``horizon`` days; row k holds day k+1 after ``initial``."""
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    rows = []
    state = initial
    for k in range(horizon):
        state = metapop_step(state, rate_track.at(k), alpha_mn, 1.0)
        rows.append((state.S, state.I, state.R, state.new_infections))
    S, I, R, new = (np.stack(x) for x in zip(*rows))
    return EpiSeries(np.arange(1, horizon + 1), S, I, R, new)


def _standard_step(S, I, R, beta, gamma, P, dt=1.0):
    new = np.minimum(beta * S * I / P * dt, S)
    removal = np.minimum(gamma * I * dt, I)
    return S - new, I + new - removal, R + removal, new


def standard_sir_simulate(S0, I0, R0, beta, gamma, P, horizon: int) -> EpiSeries:
    """Single-population SIR, one-day Euler steps; broadcasts over array inputs."""
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    S, I, R = (np.asarray(x, dtype=float) for x in (S0, I0, R0))
    if not np.allclose(S + I + R, P, rtol=1e-9, atol=0):
        raise ValueError("P must equal S0 + I0 + R0")
    rows = []
    for _ in range(horizon):
        S, I, R, new = _standard_step(S, I, R, beta, gamma, P)
        rows.append((S, I, R, new))
    S, I, R, new = (np.stack(x).reshape(horizon, -1) for x in zip(*rows))
    return EpiSeries(np.arange(1, horizon + 1), S, I, R, new)


def _grid_losses(observed: EpiSeries, betas, gammas, horizon: int | None):
    """MAE for every (beta, gamma) pair, shape (len(betas), len(gammas))."""
    b, g = np.meshgrid(np.asarray(betas, float), np.asarray(gammas, float), indexing="ij")
    S = observed.susceptible[:, 0]
    I = observed.infected[:, 0]
    R = observed.removed[:, 0]
    new = observed.new_cases[:, 0]
    P = S[0] + I[0] + R[0]
    T = len(new)
    if horizon is None:
        # free run from the first observed day
        s, i, r = (np.full(b.shape, x[0]) for x in (S, I, R))
        err = np.zeros(b.shape)
        for t in range(1, T):
            s, i, r, pred = _standard_step(s, i, r, b, g, P)
            err += np.abs(pred - new[t])
        return err / max(T - 1, 1)
    # restart from the observed state at every origin
    origins = np.arange(0, T - horizon)
    if origins.size == 0:
        raise ValueError("series too short for the requested horizon")
    shape = (len(origins),) + b.shape
    s = np.broadcast_to(S[origins][:, None, None], shape).copy()
    i = np.broadcast_to(I[origins][:, None, None], shape).copy()
    r = np.broadcast_to(R[origins][:, None, None], shape).copy()
    Pt = (S + I + R)[origins][:, None, None]
    err = np.zeros(b.shape)
    for k in range(1, horizon + 1):
        s, i, r, pred = _standard_step(s, i, r, b, g, Pt)
        err += np.abs(pred - new[origins + k][:, None, None]).sum(axis=0)
    return err / (len(origins) * horizon)


def fit_standard_sir(observed: EpiSeries, betas, gammas, horizon: int | None = None):
    """Exhaustive grid search for the single-population (beta, gamma).

    ``horizon=None`` scores one free run from the first day; an integer scores
    rolling restarts from every observed state over that many days. Ties go
    to the smallest beta, then the smallest gamma.
    """
    if observed.n_regions != 1:
        raise ValueError("observed must be aggregated to a single region")
    betas = sorted(float(x) for x in betas)
    gammas = sorted(float(x) for x in gammas)
    if not betas or not gammas:
        raise ValueError("grid must be non-empty")
    losses = _grid_losses(observed, betas, gammas, horizon)
    best = None
    for (ib, b), (ig, g) in itertools.product(enumerate(betas), enumerate(gammas)):
        loss = losses[ib, ig]
        if best is None or loss < best[2]:
            best = (b, g, float(loss))
    return best
