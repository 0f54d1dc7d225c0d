"""Synthetic region sets and epidemics with known parameters."""
from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

from gcnsir.ingest import EpiSeries, RegionSet, write_matrix_csv
from gcnsir.mobility import MobilityConfig, interaction_matrix, mobility_matrix
from gcnsir.sir import MetapopState, ParamTrack, metapop_simulate


def random_regions(n: int, seed: int = 0, pop_range=(5e5, 2e7), extent_km: float = 3000.0):
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0, extent_km, size=(n, 2))
    dist = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(-1))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    pops = np.round(np.exp(rng.uniform(np.log(pop_range[0]), np.log(pop_range[1]), size=n)))
    return RegionSet(tuple(f"region_{i:02d}" for i in range(n)), pops, dist)


def simulate_epidemic(
    regions: RegionSet,
    beta,
    gamma,
    days: int,
    seed_infected=10.0,
    mobility: MobilityConfig = MobilityConfig(),
) -> EpiSeries:
    """Metapopulation outbreak with constant rates; day 0 is the seeding day."""
    inter = interaction_matrix(mobility_matrix(regions, mobility), regions)
    n = len(regions)
    I0 = np.broadcast_to(np.asarray(seed_infected, dtype=float), (n,)).copy()
    initial = MetapopState(regions.populations - I0, I0, np.zeros(n))
    beta = np.broadcast_to(np.asarray(beta, float), (n,))
    gamma = np.broadcast_to(np.asarray(gamma, float), (n,))
    sim = metapop_simulate(initial, ParamTrack.constant(beta, gamma), inter, days - 1)
    return EpiSeries(
        np.arange(days),
        np.vstack([initial.S, sim.susceptible]),
        np.vstack([initial.I, sim.infected]),
        np.vstack([initial.R, sim.removed]),
        np.vstack([I0, sim.new_cases]),
    )


def write_case_fixture(directory, regions: RegionSet, cumulative, start=dt.date(2020, 1, 22),
                       subregions: int = 2, extra_rows=()):
    """JHU-shaped files: cases.csv (split across sub-regions), populations.csv, distances.csv.

    ``cumulative`` is ``[day, region]``; each region's counts are split
    across ``subregions`` county rows. ``extra_rows`` are (county, state,
    counts) rows appended verbatim.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    cumulative = np.asarray(cumulative)
    days = cumulative.shape[0]
    dates = [start + dt.timedelta(days=k) for k in range(days)]
    header = ["UID", "Admin2", "Province_State", "Country_Region"] + [
        f"{d.month}/{d.day}/{d.strftime('%y')}" for d in dates
    ]
    with (directory / "cases.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        uid = 0
        for j, name in enumerate(regions.names):
            col = cumulative[:, j].astype(np.int64)
            share = col // subregions
            parts = [share] * (subregions - 1) + [col - share * (subregions - 1)]
            for c, part in enumerate(parts):
                uid += 1
                w.writerow([uid, f"County {c}", name, "US", *(int(v) for v in part)])
        for county, state, counts in extra_rows:
            uid += 1
            w.writerow([uid, county, state, "US", *(int(v) for v in counts)])
    with (directory / "populations.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "population"])
        for name, pop in zip(regions.names, regions.populations):
            w.writerow([name, int(pop)])
    write_matrix_csv(directory / "distances.csv", regions.distances, regions.names)
    return directory
