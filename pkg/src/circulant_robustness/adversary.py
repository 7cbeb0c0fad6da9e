"""Misbehaving-agent models: signals, adversary sets and placement checks.

A malicious agent sends one value per step to all out-neighbors. A Byzantine
agent may send a different value on every out-edge. Both ignore the update
rule; their state is whatever their signal says.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .graph import Digraph

__all__ = [
    "AdversarySpec",
    "Constant",
    "PerEdgeDistinct",
    "PlacementCheck",
    "Ramp",
    "RandomInRange",
    "Signal",
    "Sinusoid",
    "format_signal",
    "parse_signal",
    "validate_adversary_placement",
]

MODELS = ("malicious", "byzantine")
SCOPES = ("f_local", "f_total")


class Signal:
    """Deterministic value generator for one misbehaving agent."""

    name = "signal"

    def state(self, agent: int, t: int, x0: float) -> float:
        raise NotImplementedError

    def send(self, agent: int, dst: int, t: int, x0: float) -> float:
        return self.state(agent, t, x0)


@dataclass(frozen=True)
class Constant(Signal):
    """Holds ``value`` forever; ``None`` holds the agent's initial state."""

    value: float | None = None
    name = "constant"

    def state(self, agent, t, x0):
        return x0 if self.value is None else self.value


@dataclass(frozen=True)
class Ramp(Signal):
    slope: float = 1.0
    start: float | None = None
    name = "ramp"

    def state(self, agent, t, x0):
        return (x0 if self.start is None else self.start) + self.slope * t


@dataclass(frozen=True)
class Sinusoid(Signal):
    """``center + amplitude * sin(2 pi t / period + agent * agent_phase)``."""

    amplitude: float = 50.0
    period: float = 20.0
    center: float = 0.0
    agent_phase: float = 1.0
    name = "sinusoid"

    def state(self, agent, t, x0):
        return self.center + self.amplitude * math.sin(
            2 * math.pi * t / self.period + agent * self.agent_phase
        )


def _draw(seed: int, *key: int) -> float:
    # keyed draws: independent of call order, so simulations stay deterministic
    return float(np.random.default_rng([seed, *key]).random())


@dataclass(frozen=True)
class RandomInRange(Signal):
    low: float = -50.0
    high: float = 50.0
    seed: int = 0
    name = "random"

    def state(self, agent, t, x0):
        return self.low + (self.high - self.low) * _draw(self.seed, agent, t)


@dataclass(frozen=True)
class PerEdgeDistinct(Signal):
    """Byzantine signal: an independent uniform draw on every out-edge each step.

    The agent's own recorded state is the midpoint of the range.
    """

    low: float = -50.0
    high: float = 50.0
    seed: int = 0
    name = "per-edge"

    def state(self, agent, t, x0):
        return (self.low + self.high) / 2

    def send(self, agent, dst, t, x0):
        return self.low + (self.high - self.low) * _draw(self.seed, agent, t, dst + 1)


_SIGNALS: dict[str, type] = {
    cls.name: cls for cls in (Constant, Ramp, Sinusoid, RandomInRange, PerEdgeDistinct)
}


def parse_signal(text: str, seed: int = 0) -> Signal:
    """Parse ``name[:p1[:p2...]]``, e.g. ``sinusoid:50:20`` or ``constant:3.5``.

    Positional parameters follow the dataclass field order. Seeded signals
    take ``seed`` unless it is given explicitly.
    """
    name, *params = text.strip().split(":")
    try:
        cls = _SIGNALS[name]
    except KeyError:
        raise ValueError(f"unknown signal {name!r}; choose from {sorted(_SIGNALS)}") from None
    names = [f.name for f in fields(cls)]
    if len(params) > len(names):
        raise ValueError(f"signal {name!r} takes at most {len(names)} parameters")
    kwargs: dict[str, object] = {}
    if "seed" in names:
        kwargs["seed"] = seed
    for key, raw in zip(names, params):
        kwargs[key] = int(raw) if key == "seed" else float(raw)
    return cls(**kwargs)


def format_signal(signal: Signal) -> str:
    """Inverse of :func:`parse_signal`."""
    parts = [signal.name]
    for f in fields(signal):
        value = getattr(signal, f.name)
        if value is None:
            break
        parts.append(repr(value))
    return ":".join(parts)


@dataclass(frozen=True)
class AdversarySpec:
    members: frozenset[int]
    f: int
    model: str = "malicious"
    scope: str = "f_local"
    signal: Signal = field(default_factory=Sinusoid)

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", frozenset(self.members))
        if self.f < 0:
            raise ValueError(f"F must be non-negative, got {self.f}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {self.scope!r}")

    @classmethod
    def none(cls) -> AdversarySpec:
        return cls(frozenset(), 0)

    def normals(self, n: int) -> list[int]:
        return [v for v in range(n) if v not in self.members]

    def role(self, v: int) -> str:
        return self.model if v in self.members else "normal"


@dataclass(frozen=True)
class PlacementCheck:
    """Outcome of a scope check; ``violations`` maps node -> adversarial in-neighbor count."""

    valid: bool
    violations: dict[int, int]
    message: str = ""

    def __bool__(self) -> bool:
        return self.valid


def validate_adversary_placement(g: Digraph, spec: AdversarySpec) -> PlacementCheck:
    bad = [v for v in spec.members if not 0 <= v < g.n]
    if bad:
        raise ValueError(f"adversary ids {sorted(bad)} outside [0, {g.n})")
    if spec.scope == "f_total":
        if len(spec.members) <= spec.f:
            return PlacementCheck(True, {})
        return PlacementCheck(
            False, {}, f"{len(spec.members)} adversaries exceed the F-total bound F={spec.f}"
        )
    mask = sum(1 << v for v in spec.members)
    violations = {}
    for v in spec.normals(g.n):
        count = (g.in_masks[v] & mask).bit_count()
        if count > spec.f:
            violations[v] = count
    if not violations:
        return PlacementCheck(True, {})
    detail = ", ".join(f"node {v}: {c}" for v, c in sorted(violations.items()))
    return PlacementCheck(False, violations, f"adversarial in-neighbors exceed F={spec.f} at {detail}")
