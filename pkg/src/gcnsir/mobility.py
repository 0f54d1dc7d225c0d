"""Gravity-plus-flight mobility and the interaction coefficients built from it."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gcnsir.ingest import RegionSet

# Calibrated on 48-state US data.
US_ALPHA = 1.12e-6
US_DECAY = 1.73


@dataclass(frozen=True)
class MobilityConfig:
    alpha: float = US_ALPHA
    d: float = US_DECAY
    flight_coefficient: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.d > 0:
            raise ValueError(f"d must be positive, got {self.d}")
        if not self.flight_coefficient >= 0:
            raise ValueError(f"flight_coefficient must be >= 0, got {self.flight_coefficient}")

    def epsilon(self, total_population: float) -> float:
        return epsilon_from_consistency(self.alpha, total_population)


@dataclass(frozen=True)
class InteractionMatrix:
    alpha_mn: np.ndarray
    h: np.ndarray

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.alpha_mn, self.alpha_mn.T))


@dataclass(frozen=True)
class LimitingCaseReport:
    alpha_nn: float
    total_population: float
    residual: float
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance


def epsilon_from_consistency(alpha: float, total_population: float) -> float:
    """Regularizer that makes a single aggregate region reduce to plain SIR."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not total_population > 0:
        raise ValueError(f"total_population must be positive, got {total_population}")
    return 2.0 * alpha * total_population**2


def mobility_matrix(regions: RegionSet, config: MobilityConfig, epsilon: float | None = None):
    """h[m, n] from populations and distances.

    ``epsilon`` defaults to the consistency value for the region set's total
    population; an explicit value exists only for diagnostics.
    """
    if epsilon is None:
        epsilon = config.epsilon(regions.total_population)
    pops = regions.populations
    gravity = config.alpha * np.outer(pops, pops) / (regions.distances**config.d + epsilon)
    flight = config.flight_coefficient * np.maximum.outer(pops, pops)
    np.fill_diagonal(flight, 0.0)
    return gravity + flight


def interaction_matrix(h, regions: RegionSet) -> InteractionMatrix:
    h = np.asarray(h, dtype=float)
    n = len(regions)
    if h.shape != (n, n):
        raise ValueError(f"h must be {n}x{n}, got {h.shape}")
    if np.any(h < 0) or not np.all(np.isfinite(h)):
        raise ValueError("h must be finite and nonnegative")
    pops = regions.populations
    alpha_mn = h / pops[:, None] + h.T / pops[None, :]
    return InteractionMatrix(alpha_mn, h)


def collapse(regions: RegionSet) -> RegionSet:
    return RegionSet(("total",), np.array([regions.total_population]), np.zeros((1, 1)))


def validate_limiting_case(
    config: MobilityConfig, regions: RegionSet, epsilon: float | None = None
) -> LimitingCaseReport:
    """Collapse to one region and report |alpha_nn * P - 1|."""
    single = collapse(regions)
    inter = interaction_matrix(mobility_matrix(single, config, epsilon), single)
    a = float(inter.alpha_mn[0, 0])
    p = single.total_population
    return LimitingCaseReport(a, p, abs(a * p - 1.0))
