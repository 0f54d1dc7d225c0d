"""Case-count ingestion: cumulative CSVs to per-region S/I/R daily series."""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from gcnsir.errors import CellError, SchemaError, UnknownRegionError

# Territories, cruise ships, DC and the two non-contiguous states.
DEFAULT_EXCLUSIONS = (
    "American Samoa",
    "Guam",
    "Northern Mariana Islands",
    "Puerto Rico",
    "Virgin Islands",
    "Diamond Princess",
    "Grand Princess",
    "District of Columbia",
    "Alaska",
    "Hawaii",
)


@dataclass(frozen=True)
class IngestConfig:
    region_column: str = "Province_State"
    subregion_column: str | None = "Admin2"
    # None: the first column whose header parses as m/d/yy.
    first_date_column: str | None = None
    exclusions: tuple[str, ...] = DEFAULT_EXCLUSIONS
    gamma0: float = 0.1
    smooth: bool = False


@dataclass(frozen=True)
class RegionSet:
    names: tuple[str, ...]
    populations: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        pops = np.asarray(self.populations, dtype=float)
        dist = np.asarray(self.distances, dtype=float)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "populations", pops)
        object.__setattr__(self, "distances", dist)
        n = len(self.names)
        if len(set(self.names)) != n:
            raise ValueError("duplicate region names")
        if pops.shape != (n,):
            raise ValueError(f"expected {n} populations, got shape {pops.shape}")
        if dist.shape != (n, n):
            raise ValueError(f"expected {n}x{n} distances, got shape {dist.shape}")
        if not np.all(pops > 0):
            raise ValueError("populations must be strictly positive")
        if not np.all(np.isfinite(dist)) or np.any(dist < 0):
            raise ValueError("distances must be finite and nonnegative")
        if np.any(np.diag(dist) != 0):
            raise ValueError("distance diagonal must be zero")
        off = ~np.eye(n, dtype=bool)
        if np.any(dist[off] == 0):
            raise ValueError("distinct regions must have positive distance")
        if not np.array_equal(dist, dist.T):
            raise ValueError("distance matrix must be symmetric")

    def __len__(self):
        return len(self.names)

    @property
    def total_population(self) -> float:
        return float(np.sum(self.populations))

    def index(self, name: str) -> int:
        return self.names.index(name)

    def subset(self, names) -> RegionSet:
        idx = [self.index(n) for n in names]
        return RegionSet(tuple(names), self.populations[idx], self.distances[np.ix_(idx, idx)])


@dataclass(frozen=True)
class RawCaseTable:
    subregions: tuple[str, ...]
    regions: tuple[str, ...]
    dates: tuple[dt.date, ...]
    offsets: np.ndarray
    counts: np.ndarray  # rows x dates, cumulative


@dataclass(frozen=True)
class EpiSeries:
    """Daily compartments; every matrix is indexed ``[day, region]``."""

    dates: np.ndarray
    susceptible: np.ndarray
    infected: np.ndarray
    removed: np.ndarray
    new_cases: np.ndarray

    def __post_init__(self):
        days = np.asarray(self.dates, dtype=np.int64)
        object.__setattr__(self, "dates", days)
        shape = None
        for name in ("susceptible", "infected", "removed", "new_cases"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.ndim != 2:
                raise ValueError(f"{name} must be 2-d (day, region)")
            if shape is None:
                shape = arr.shape
            elif arr.shape != shape:
                raise ValueError(f"{name} shape {arr.shape} != {shape}")
        if days.shape != (shape[0],):
            raise ValueError("dates length must match the day axis")
        if days.size > 1 and np.any(np.diff(days) != 1):
            raise ValueError("dates must increase in unit steps")

    @property
    def n_days(self) -> int:
        return self.new_cases.shape[0]

    @property
    def n_regions(self) -> int:
        return self.new_cases.shape[1]

    def window(self, start: int, stop: int) -> EpiSeries:
        sl = slice(start, stop)
        return EpiSeries(
            self.dates[sl],
            self.susceptible[sl],
            self.infected[sl],
            self.removed[sl],
            self.new_cases[sl],
        )

    def select(self, idx) -> EpiSeries:
        """Restrict (and reorder) the region axis."""
        idx = list(idx)
        return EpiSeries(
            self.dates,
            self.susceptible[:, idx],
            self.infected[:, idx],
            self.removed[:, idx],
            self.new_cases[:, idx],
        )

    def aggregate(self) -> EpiSeries:
        """Collapse all regions into one."""
        return EpiSeries(
            self.dates,
            self.susceptible.sum(axis=1, keepdims=True),
            self.infected.sum(axis=1, keepdims=True),
            self.removed.sum(axis=1, keepdims=True),
            self.new_cases.sum(axis=1, keepdims=True),
        )


def _parse_date(text: str) -> dt.date | None:
    try:
        return dt.datetime.strptime(text.strip(), "%m/%d/%y").date()
    except ValueError:
        return None


def _parse_count(cell: str, row: int, column: str) -> float:
    text = cell.strip()
    try:
        value = float(text)
    except ValueError:
        raise CellError(f"unparseable count {cell!r} at row {row}, column {column!r}", row, column)
    if not np.isfinite(value):
        raise CellError(f"non-finite count {cell!r} at row {row}, column {column!r}", row, column)
    return value


def parse_confirmed_csv(path, config: IngestConfig = IngestConfig()) -> RawCaseTable:
    """Read a cumulative confirmed-case CSV (one row per sub-region).

    Rows are returned unfiltered. Row numbers in errors are 1-based file
    lines, so the header is line 1.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        header = [h.strip() for h in header]

        if config.region_column not in header:
            raise SchemaError(f"{path}: missing required column {config.region_column!r}")
        if config.subregion_column is not None and config.subregion_column not in header:
            raise SchemaError(f"{path}: missing required column {config.subregion_column!r}")
        if config.first_date_column is not None:
            if config.first_date_column not in header:
                raise SchemaError(f"{path}: missing required column {config.first_date_column!r}")
            first = header.index(config.first_date_column)
        else:
            first = next((i for i, h in enumerate(header) if _parse_date(h)), None)
            if first is None:
                raise SchemaError(f"{path}: no date columns found")

        date_cols = header[first:]
        dates = []
        for name in date_cols:
            d = _parse_date(name)
            if d is None:
                raise SchemaError(f"{path}: column {name!r} is not a m/d/yy date")
            dates.append(d)
        steps = [(b - a).days for a, b in zip(dates, dates[1:])]
        if any(s != 1 for s in steps):
            raise SchemaError(f"{path}: date columns are not contiguous daily steps")

        region_i = header.index(config.region_column)
        sub_i = header.index(config.subregion_column) if config.subregion_column else None
        subregions, regions, rows = [], [], []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise SchemaError(
                    f"{path}: row {lineno} has {len(record)} fields, header has {len(header)}"
                )
            regions.append(record[region_i].strip())
            subregions.append(record[sub_i].strip() if sub_i is not None else "")
            rows.append([
                _parse_count(record[first + j], lineno, date_cols[j]) for j in range(len(date_cols))
            ])

    counts = np.array(rows, dtype=float).reshape(len(rows), len(dates))
    offsets = np.array([(d - dates[0]).days for d in dates], dtype=np.int64)
    return RawCaseTable(tuple(subregions), tuple(regions), tuple(dates), offsets, counts)


def aggregate_to_regions(raw: RawCaseTable, regions: RegionSet, exclusions=DEFAULT_EXCLUSIONS):
    """Sum sub-region cumulative counts per region; returns ``[day, region]``."""
    excluded = set(exclusions)
    out = np.zeros((len(raw.dates), len(regions)))
    lookup = {name: i for i, name in enumerate(regions.names)}
    for name, row in zip(raw.regions, raw.counts):
        if name in excluded:
            continue
        if name not in lookup:
            raise UnknownRegionError(f"region {name!r} is not in the region set")
        out[:, lookup[name]] += row
    return out


def cumulative_to_daily(cumulative) -> np.ndarray:
    """Difference along axis 0; negative corrections clamp to zero."""
    c = np.asarray(cumulative, dtype=float)
    daily = np.diff(c, axis=0, prepend=np.zeros_like(c[:1]))
    return np.maximum(daily, 0.0)


def count_negative_increments(cumulative) -> int:
    c = np.asarray(cumulative, dtype=float)
    return int(np.sum(np.diff(c, axis=0) < 0))


def moving_average(values, width: int = 7) -> np.ndarray:
    """Centered moving average along axis 0, window shrinking at the edges."""
    x = np.asarray(values, dtype=float)
    if width < 1 or width % 2 == 0:
        raise ValueError("width must be a positive odd integer")
    half = width // 2
    csum = np.cumsum(np.concatenate([np.zeros_like(x[:1]), x]), axis=0)
    n = x.shape[0]
    lo = np.clip(np.arange(n) - half, 0, n)
    hi = np.clip(np.arange(n) + half + 1, 0, n)
    shape = (n,) + (1,) * (x.ndim - 1)
    return (csum[hi] - csum[lo]) / (hi - lo).reshape(shape)


def synthesize_sir_series(new_cases, regions: RegionSet, gamma0: float = 0.1) -> EpiSeries:
    """Reconstruct S/I/R from daily cases with a fixed removal rate (Euler, one-day steps)."""
    if not 0.0 < gamma0 < 1.0:
        raise ValueError(f"gamma0 must lie in (0, 1), got {gamma0}")
    new = np.asarray(new_cases, dtype=float)
    if new.ndim != 2 or new.shape[1] != len(regions):
        raise ValueError(f"new_cases must be (days, {len(regions)})")
    if np.any(new < 0) or not np.all(np.isfinite(new)):
        raise ValueError("new_cases must be finite and nonnegative")
    pops = regions.populations
    n_days = new.shape[0]
    infected = np.zeros_like(new)
    removed = np.zeros_like(new)
    infected[0] = np.minimum(new[0], pops)
    for t in range(n_days - 1):
        recovered = gamma0 * infected[t]
        removed[t + 1] = removed[t] + recovered
        inf = infected[t] + new[t + 1] - recovered
        infected[t + 1] = np.clip(inf, 0.0, pops - removed[t + 1])
    susceptible = np.maximum(pops - infected - removed, 0.0)
    return EpiSeries(np.arange(n_days), susceptible, infected, removed, new)


# ---------------------------------------------------------------- file formats


def read_populations(path) -> dict[str, float]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise SchemaError(f"{path}: expected header 'name,population'")
        out = {}
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            out[record[0].strip()] = _parse_count(record[1], lineno, header[1].strip())
    return out


def read_matrix_csv(path) -> tuple[list[str], np.ndarray]:
    """Square matrix with a header row of names and an optional leading label column."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    labelled = len(header) == len(body) + 1
    names = header[1:] if labelled else header
    if len(body) != len(names):
        raise SchemaError(f"{path}: matrix is not square ({len(body)} rows, {len(names)} columns)")
    values = np.zeros((len(names), len(names)))
    for i, record in enumerate(body):
        cells = record[1:] if labelled else record
        if labelled and record[0].strip() != names[i]:
            raise SchemaError(f"{path}: row {i + 2} label {record[0]!r} != column {names[i]!r}")
        if len(cells) != len(names):
            raise SchemaError(f"{path}: row {i + 2} has {len(cells)} values, expected {len(names)}")
        for j, cell in enumerate(cells):
            values[i, j] = _parse_count(cell, i + 2, names[j])
    return names, values


def write_matrix_csv(path, matrix, names) -> None:
    m = np.asarray(matrix, dtype=float)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["region", *names])
        for name, row in zip(names, m):
            w.writerow([name, *(f"{v:.15g}" for v in row)])


def load_regions(populations_path, distances_path, exclusions=DEFAULT_EXCLUSIONS) -> RegionSet:
    """Region order follows the population file, minus exclusions."""
    pops = read_populations(populations_path)
    excluded = set(exclusions)
    names = [n for n in pops if n not in excluded]
    dist_names, dist = read_matrix_csv(distances_path)
    lookup = {n: i for i, n in enumerate(dist_names)}
    missing = [n for n in names if n not in lookup]
    if missing:
        raise UnknownRegionError(f"{distances_path}: no distances for {missing}")
    idx = [lookup[n] for n in names]
    return RegionSet(tuple(names), np.array([pops[n] for n in names]), dist[np.ix_(idx, idx)])


def write_regions_csv(path, regions: RegionSet) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "population"])
        for name, pop in zip(regions.names, regions.populations):
            w.writerow([name, f"{pop:.15g}"])


SERIES_COLUMNS = ["region", "day", "S", "I", "R", "new_cases"]


def write_epi_csv(path, series: EpiSeries, names) -> None:
    if len(names) != series.n_regions:
        raise ValueError("names must match the region axis")
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_COLUMNS)
        for j, name in enumerate(names):
            for t, day in enumerate(series.dates):
                w.writerow([
                    name,
                    int(day),
                    f"{series.susceptible[t, j]:.15g}",
                    f"{series.infected[t, j]:.15g}",
                    f"{series.removed[t, j]:.15g}",
                    f"{series.new_cases[t, j]:.15g}",
                ])


def read_epi_csv(path) -> tuple[EpiSeries, list[str]]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in SERIES_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        names: list[str] = []
        cells: dict[tuple[str, int], list[float]] = {}
        for lineno, row in enumerate(reader, start=2):
            name = row["region"]
            if name not in names:
                names.append(name)
            cells[name, int(row["day"])] = [
                _parse_count(row[c], lineno, c) for c in ("S", "I", "R", "new_cases")
            ]
    days = sorted({d for _, d in cells})
    data = np.zeros((4, len(days), len(names)))
    for j, name in enumerate(names):
        for t, day in enumerate(days):
            try:
                data[:, t, j] = cells[name, day]
            except KeyError:
                raise SchemaError(f"{path}: no row for region {name!r}, day {day}") from None
    return EpiSeries(np.array(days), *data), names


@dataclass
class IngestResult:
    regions: RegionSet
    series: EpiSeries
    first_date: dt.date
    clamped_negatives: int
    summary: dict = field(default_factory=dict)


def ingest(cases_path, populations_path, distances_path, config: IngestConfig = IngestConfig()):
    """Run the full ingestion chain and return regions, series and a summary."""
    regions = load_regions(populations_path, distances_path, config.exclusions)
    raw = parse_confirmed_csv(cases_path, config)
    cumulative = aggregate_to_regions(raw, regions, config.exclusions)
    clamped = count_negative_increments(cumulative)
    daily = cumulative_to_daily(cumulative)
    if config.smooth:
        daily = moving_average(daily, 7)
    series = synthesize_sir_series(daily, regions, config.gamma0)
    summary = {
        "regions": len(regions),
        "days": series.n_days,
        "first_date": raw.dates[0].isoformat(),
        "last_date": raw.dates[-1].isoformat(),
        "clamped_negatives": clamped,
        "gamma0": config.gamma0,
        "smooth": config.smooth,
    }
    return IngestResult(regions, series, raw.dates[0], clamped, summary)
