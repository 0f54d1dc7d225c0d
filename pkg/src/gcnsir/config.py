"""Run configuration: one TOML file, environment and flag overrides on top."""
from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from gcnsir.estimator import TrainConfig
from gcnsir.ingest import IngestConfig
from gcnsir.mobility import MobilityConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

WORKDIR_ENV = "GCNSIR_WORKDIR"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Paths:
    cases: str = "cases.csv"
    populations: str = "populations.csv"
    distances: str = "distances.csv"
    workdir: str = "work"


@dataclass(frozen=True)
class EvalConfig:
    horizons: tuple[int, ...] = (1, 7)


@dataclass(frozen=True)
class R0Config:
    smooth: bool = False


@dataclass(frozen=True)
class RunConfig:
    paths: Paths = field(default_factory=Paths)
    ingest: IngestConfig = field(default_factory=IngestConfig)
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    evaluate: EvalConfig = field(default_factory=EvalConfig)
    r0: R0Config = field(default_factory=R0Config)

    @property
    def workdir(self) -> Path:
        return Path(self.paths.workdir)

    def echo(self) -> dict:
        """Plain-dict copy for embedding in outputs."""
        return _to_plain(dataclasses.asdict(self))


def _to_plain(value):
    if isinstance(value, dict):
        return {k: _to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_plain(v) for v in value]
    return value


_SECTIONS = {
    "paths": Paths,
    "ingest": IngestConfig,
    "mobility": MobilityConfig,
    "train": TrainConfig,
    "evaluate": EvalConfig,
    "r0": R0Config,
}


def _coerce(cls, key, value):
    ftype = {f.name: f.type for f in dataclasses.fields(cls)}[key]
    ftype = str(ftype)
    if "tuple" in ftype:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{cls.__name__}.{key} must be a list")
        return tuple(value)
    if ftype.startswith("float") and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if ftype.startswith("int") and isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def from_mapping(data: dict) -> RunConfig:
    sections = {}
    for name, cls in _SECTIONS.items():
        raw = dict(data.get(name, {}))
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
        try:
            sections[name] = cls(**{k: _coerce(cls, k, v) for k, v in raw.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{name}]: {exc}") from exc
    extra = set(data) - set(_SECTIONS)
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")
    return RunConfig(**sections)


def parse_override(text: str) -> tuple[str, str, object]:
    """``section.key=value`` with a TOML literal value (bare words become strings)."""
    if "=" not in text or "." not in text.split("=", 1)[0]:
        raise ConfigError(f"override {text!r} is not of the form section.key=value")
    lhs, rhs = text.split("=", 1)
    section, key = lhs.strip().split(".", 1)
    try:
        value = tomllib.loads(f"v = {rhs}")["v"]
    except tomllib.TOMLDecodeError:
        value = rhs
    return section, key, value


def load_config(path=None, overrides=(), env=None) -> RunConfig:
    """File, then the workdir environment variable, then flag overrides."""
    env = os.environ if env is None else env
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        # relative paths in a config file resolve against the file's directory
        for key, value in data.get("paths", {}).items():
            if isinstance(value, str) and not Path(value).is_absolute():
                data["paths"][key] = str(path.parent / value)
    if env.get(WORKDIR_ENV):
        data.setdefault("paths", {})["workdir"] = env[WORKDIR_ENV]
    for text in overrides:
        section, key, value = parse_override(text)
        data.setdefault(section, {})[key] = value
    return from_mapping(data)


def require_inputs(config: RunConfig) -> None:
    for key in ("cases", "populations", "distances"):
        p = Path(getattr(config.paths, key))
        if not p.is_file():
            raise ConfigError(f"{key} file not found: {p}")
