"""Reproduction numbers as Perron roots of the scaled interaction matrix."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gcnsir.errors import ConvergenceError
from gcnsir.ingest import RegionSet, moving_average
from gcnsir.mobility import InteractionMatrix
from gcnsir.sir import ParamTrack, RateSet


@dataclass(frozen=True)
class R0Track:
    days: np.ndarray
    r0: np.ndarray
    rt: np.ndarray

    def smoothed(self, width: int = 7) -> R0Track:
        return R0Track(self.days, moving_average(self.r0, width), moving_average(self.rt, width))


def _collatz_bracket(B, x):
    """Bounds ``min(Bx/x) <= rho(B) <= max(Bx/x)``; ``x`` is floored to stay positive."""
    x = np.maximum(x, 1e-12 * x.max())
    ratios = (B @ x) / x
    return float(ratios.min()), float(ratios.max())


def _polish(B, x, y, estimate, rtol, steps):
    """Inverse iteration shifted to the current Collatz-Wielandt upper bound.

    No eigenvalue is closer to that bound than the Perron root, so the
    iteration cannot lock onto a subdominant one. The result is clipped to
    the tightest bracket seen. Returns ``(estimate, converged)``.
    """
    lo, hi = _collatz_bracket(B, x)
    converged = False
    eye = np.eye(len(B))
    for _ in range(steps):
        # re-shift to the tightened bound each step
        M = B - hi * (1 + 1e-13) * eye
        try:
            x_new = np.linalg.solve(M, x)
            y_new = np.linalg.solve(M.T, y)
        except np.linalg.LinAlgError:
            break
        if not (np.all(np.isfinite(x_new)) and np.all(np.isfinite(y_new))):
            break
        x = np.abs(x_new) / np.linalg.norm(x_new)
        y = np.abs(y_new) / np.linalg.norm(y_new)
        b_lo, b_hi = _collatz_bracket(B, x)
        lo, hi = max(lo, b_lo), min(hi, b_hi)
        yx = float(y @ x)
        new_estimate = float(y @ B @ x) / yx if yx > 1e-12 else float(x @ B @ x)
        change = abs(new_estimate - estimate)
        estimate = new_estimate
        if change <= 1e-3 * rtol * abs(estimate) or hi - lo <= 1e-2 * rtol * abs(estimate):
            converged = True
            break
    return min(max(estimate, lo), hi), converged


def spectral_radius(matrix, rtol: float = 1e-10, max_iter: int = 10_000) -> float:
    """Perron root of a nonnegative matrix by shifted power iteration.

    Iterates on ``A + s*I`` (``s`` half the smallest row sum of the scaled
    matrix, at least 0.1), which makes the Perron root strictly
    dominant even for periodic matrices such as permutations. Left and right
    iterates run together and the estimate is their two-sided Rayleigh
    quotient; iteration stops when successive estimates agree to ``rtol``.

    Power iteration alone stalls, or stops early on a slowly drifting
    estimate, when the subdominant eigenvalue is close to the Perron root.
    The result is therefore finished by inverse iteration shifted to a
    Collatz-Wielandt upper bound and clipped to the bracket.
    """
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    if np.any(A < 0):
        raise ValueError("matrix must be nonnegative")
    if not np.any(A):
        return 0.0
    scale = A.max()
    A = A / scale
    shift = max(0.5 * A.sum(axis=1).min(), 0.1)
    B = A + shift * np.eye(len(A))
    x = np.ones(len(A)) / np.sqrt(len(A))
    y = x.copy()
    estimate = np.inf
    converged = False
    for _ in range(max_iter):
        Bx = B @ x
        yx = y @ x
        new_estimate = float(y @ Bx) / yx if yx > 1e-12 else float(x @ Bx)
        converged = abs(new_estimate - estimate) <= rtol * abs(new_estimate)
        estimate = new_estimate
        if converged:
            break
        x = Bx / np.linalg.norm(Bx)
        By = B.T @ y
        y = By / np.linalg.norm(By)
    if np.any(x > 0):
        estimate, polished = _polish(B, x, y, estimate, rtol, min(max_iter, 100))
        converged = converged or polished
    if not converged:
        raise ConvergenceError("power iteration did not converge", (estimate - shift) * scale)
    return max(estimate - shift, 0.0) * scale


def next_generation(rates: RateSet, alpha_mn: InteractionMatrix, weights) -> np.ndarray:
    beta = np.asarray(rates.beta, dtype=float)
    gamma = np.asarray(rates.gamma, dtype=float)
    if np.any(gamma <= 0):
        raise ValueError("all gamma must be positive")
    A = alpha_mn.alpha_mn if isinstance(alpha_mn, InteractionMatrix) else np.asarray(alpha_mn)
    return (np.asarray(weights, dtype=float) * beta / gamma)[:, None] * A


def r0_at(rates: RateSet, alpha_mn: InteractionMatrix, regions: RegionSet) -> float:
    """rho(D A) with D = diag(P_n beta_n / gamma_n)."""
    return spectral_radius(next_generation(rates, alpha_mn, regions.populations))


def rt_at(rates: RateSet, alpha_mn: InteractionMatrix, susceptible) -> float:
    """Effective number: susceptible counts replace populations in D."""
    return spectral_radius(next_generation(rates, alpha_mn, susceptible))


def r0_track(
    track: ParamTrack,
    alpha_series,
    regions: RegionSet,
    susceptible=None,
    days=None,
    smooth: bool = False,
) -> R0Track:
    """Per-day R0 and Rt.

    ``alpha_series`` is one interaction matrix or a sequence with one per
    day. ``susceptible`` is ``[day, region]``; when omitted every region is
    taken as fully susceptible, so Rt equals R0.
    """
    n = len(track)
    if n == 0:
        raise ValueError("empty parameter track")
    if isinstance(alpha_series, (InteractionMatrix, np.ndarray)):
        alphas = [alpha_series] * n
    else:
        alphas = list(alpha_series)
        if len(alphas) != n:
            raise ValueError("need one interaction matrix per day")
    if susceptible is None:
        susceptible = np.tile(regions.populations, (n, 1))
    susceptible = np.asarray(susceptible, dtype=float)
    r0 = np.empty(n)
    rt = np.empty(n)
    for t in range(n):
        rates = track.at(t)
        r0[t] = r0_at(rates, alphas[t], regions)
        rt[t] = rt_at(rates, alphas[t], susceptible[t])
    days = np.arange(n) if days is None else np.asarray(days, dtype=np.int64)
    out = R0Track(days, r0, rt)
    return out.smoothed() if smooth else out


def write_r0_csv(path, track: R0Track) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["day", "r0", "rt"])
        for d, a, b in zip(track.days, track.r0, track.rt):
            w.writerow([int(d), f"{a:.15g}", f"{b:.15g}"])


def read_r0_csv(path) -> R0Track:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return R0Track(
        np.array([int(r["day"]) for r in rows]),
        np.array([float(r["r0"]) for r in rows]),
        np.array([float(r["rt"]) for r in rows]),
    )
