"""Experiment configuration: flat ``key = value`` files plus CLI overrides.

Recognised keys (all optional)::

    n, k, offsets        circulant graph, e.g. ``offsets = 1,2,3``
    graph                path to an edge-list file
    builtin              fig3-counterexample | d1 | d2
    adversaries          comma-separated agent labels
    index_base           1 (1-indexed labels, default) or 0 (library ids)
    model                malicious | byzantine
    scope                f_local | f_total
    f                    adversary bound F (defaults to f_filter)
    signal               e.g. sinusoid:50:20, constant:10, ramp:0.5, random, per-edge
    f_filter             W-MSR trimming parameter
    alpha                weight lower bound (default 1/(2k))
    horizon, tol, seed
    init_low, init_high  range of the uniform initial states
    trajectory           trajectory CSV path
    expect_consensus     true | false

``#`` and ``;`` start comments.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields
from pathlib import Path

__all__ = ["ConfigError", "ExperimentConfig", "load_config"]

_SECTION = "experiment"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    n: int | None = None
    k: int | None = None
    offsets: str | None = None
    graph: str | None = None
    builtin: str | None = None
    adversaries: str = ""
    index_base: int = 1
    model: str = "malicious"
    scope: str = "f_local"
    f: int | None = None
    signal: str = "sinusoid:50:20"
    f_filter: int = 0
    alpha: float | None = None
    horizon: int = 500
    tol: float = 1e-6
    seed: int = 0
    init_low: float = -50.0
    init_high: float = 50.0
    trajectory: str | None = None
    expect_consensus: bool = False

    def merged(self, overrides: dict) -> ExperimentConfig:
        known = {f.name for f in fields(self)}
        updates = {k: v for k, v in overrides.items() if k in known and v is not None}
        return ExperimentConfig(**{**asdict(self), **updates})

    def adversary_ids(self) -> list[int]:
        """Adversaries as 0-based library ids."""
        if self.index_base not in (0, 1):
            raise ConfigError(f"index_base must be 0 or 1, got {self.index_base}")
        ids = []
        for part in self.adversaries.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                label = int(part)
            except ValueError:
                raise ConfigError(f"adversary label {part!r} is not an integer") from None
            if label < self.index_base:
                raise ConfigError(f"adversary label {label} is below index base {self.index_base}")
            ids.append(label - self.index_base)
        return sorted(set(ids))

    def offset_list(self) -> list[int] | None:
        if self.offsets is None:
            return None
        try:
            return [int(p) for p in str(self.offsets).split(",") if p.strip()]
        except ValueError:
            raise ConfigError(f"offsets {self.offsets!r} must be comma-separated integers") from None

    def effective_f(self) -> int:
        return self.f_filter if self.f is None else self.f


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in fields(ExperimentConfig)}[name]
    raw = raw.strip()
    try:
        if "bool" in kind:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {name}") from None
    return raw


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(f"[{_SECTION}]\n" + path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for key, raw in parser[_SECTION].items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r} in {path}")
        values[key] = _coerce(key, raw)
    return ExperimentConfig(**values)
