"""Synchronous W-MSR simulation and trajectory CSV output."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .adversary import AdversarySpec, validate_adversary_placement
from .graph import Digraph
from .wmsr import WeightScheme, wmsr_filter, wmsr_update

__all__ = [
    "AgentTrajectory",
    "NonFiniteStateError",
    "PlacementError",
    "SimulationResult",
    "StepRecord",
    "initial_states",
    "simulate",
    "write_plot_csv",
    "write_sends_csv",
    "write_trajectory_csv",
]


class PlacementError(ValueError):
    def __init__(self, message: str, violations: dict[int, int]):
        self.violations = violations
        super().__init__(message)


class NonFiniteStateError(ArithmeticError):
    def __init__(self, agent: int, step: int, value: float):
        self.agent = agent
        self.step = step
        super().__init__(f"agent {agent} produced non-finite value {value!r} at step {step}")


@dataclass(frozen=True)
class StepRecord:
    """What one normal agent received, kept, and computed at step ``t``."""

    t: int
    agent: int
    received: tuple[tuple[int, float], ...]
    retained: tuple[tuple[int, float], ...]
    weight: float
    new_value: float


@dataclass(frozen=True)
class AgentTrajectory:
    agent: int
    role: str
    values: tuple[float, ...]
    # Byzantine only: sends[t] maps out-neighbor -> value sent at step t
    sends: tuple[dict[int, float], ...] | None = None


@dataclass
class SimulationResult:
    trajectories: list[AgentTrajectory]
    spread_series: list[float]
    safety_interval: tuple[float, float]
    tol: float
    converged_at: int | None
    consensus_value: float | None
    log: list[StepRecord] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.converged_at is not None

    @property
    def horizon(self) -> int:
        return len(self.spread_series) - 1

    @property
    def normal_agents(self) -> list[int]:
        return [tr.agent for tr in self.trajectories if tr.role == "normal"]

    @property
    def safe(self) -> bool:
        """Final normal states all lie in the hull of normal initial states."""
        lo, hi = self.safety_interval
        return all(lo <= self.trajectories[i].values[-1] <= hi for i in self.normal_agents)

    def states(self) -> np.ndarray:
        """``(horizon + 1, n)`` array of every agent's state."""
        return np.array([tr.values for tr in self.trajectories]).T


def initial_states(n: int, seed: int, low: float = -50.0, high: float = 50.0) -> list[float]:
    return np.random.default_rng(seed).uniform(low, high, size=n).tolist()


def simulate(
    g: Digraph,
    adversary: AdversarySpec | None = None,
    scheme: WeightScheme | None = None,
    init: Sequence[float] | None = None,
    f_filter: int = 0,
    horizon: int = 500,
    tol: float = 1e-6,
    seed: int = 0,
    init_range: tuple[float, float] = (-50.0, 50.0),
    record: bool = False,
) -> SimulationResult:
    """Run ``horizon`` synchronous rounds of W-MSR.

    Every normal agent reads the previous round's sent values, filters with
    ``f_filter`` and applies the weight scheme. ``init=None`` draws initial
    states uniformly from ``init_range`` with ``seed``. All rounds run to the
    horizon; ``converged_at`` is the first step whose normal spread is within
    ``tol``. With ``record=True`` each normal update is logged.
    """
    adversary = adversary or AdversarySpec.none()
    scheme = scheme or WeightScheme.for_in_degree(max(g.in_degree(v) for v in range(g.n)))
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    check = validate_adversary_placement(g, adversary)
    if not check:
        raise PlacementError(check.message, check.violations)
    normals = adversary.normals(g.n)
    if not normals:
        raise ValueError("every agent is adversarial; nothing to simulate")

    if init is None:
        x0 = initial_states(g.n, seed, *init_range)
    else:
        x0 = [float(v) for v in init]
        if len(x0) != g.n:
            raise ValueError(f"expected {g.n} initial states, got {len(x0)}")
    for v, value in enumerate(x0):
        if not math.isfinite(value):
            raise NonFiniteStateError(v, 0, value)

    members = sorted(adversary.members)
    byzantine = adversary.model == "byzantine"
    signal = adversary.signal
    out_of = {a: list(g.out_neighbors(a)) for a in members}
    in_of = [list(g.in_neighbors(v)) for v in range(g.n)]

    def adversary_state(a: int, t: int) -> float:
        value = signal.state(a, t, x0[a])
        if not math.isfinite(value):
            raise NonFiniteStateError(a, t, value)
        return value

    x = list(x0)
    for a in members:
        x[a] = adversary_state(a, 0)
    history = [list(x)]
    sends: dict[int, list[dict[int, float]]] = {a: [] for a in members}
    log: list[StepRecord] = []

    for t in range(horizon):
        sent: dict[int, dict[int, float]] = {}
        for a in members:
            if byzantine:
                per_edge = {}
                for dst in out_of[a]:
                    value = signal.send(a, dst, t, x0[a])
                    if not math.isfinite(value):
                        raise NonFiniteStateError(a, t, value)
                    per_edge[dst] = value
            else:
                per_edge = {dst: x[a] for dst in out_of[a]}
            sent[a] = per_edge
            if byzantine:
                sends[a].append(per_edge)

        nxt = list(x)
        for i in normals:
            received = [(j, sent[j][i] if j in sent else x[j]) for j in in_of[i]]
            retained = wmsr_filter(x[i], received, f_filter)
            value = wmsr_update(x[i], retained, scheme)
            if not math.isfinite(value):
                raise NonFiniteStateError(i, t + 1, value)
            nxt[i] = value
            if record:
                log.append(
                    StepRecord(
                        t, i, tuple(received), tuple(retained), scheme.weight(len(retained)), value
                    )
                )
        for a in members:
            nxt[a] = adversary_state(a, t + 1)
        x = nxt
        history.append(list(x))

    spreads = []
    converged_at = None
    for t, row in enumerate(history):
        vals = [row[i] for i in normals]
        spread = max(vals) - min(vals)
        spreads.append(spread)
        if converged_at is None and spread <= tol:
            converged_at = t

    final = [history[-1][i] for i in normals]
    consensus = (min(final) + max(final)) / 2 if converged_at is not None else None
    normal_init = [x0[i] for i in normals]

    trajectories = []
    for v in range(g.n):
        role = adversary.role(v)
        trajectories.append(
            AgentTrajectory(
                v,
                role,
                tuple(row[v] for row in history),
                tuple(sends[v]) if byzantine and v in sends else None,
            )
        )
    return SimulationResult(
        trajectories,
        spreads,
        (min(normal_init), max(normal_init)),
        tol,
        converged_at,
        consensus,
        log,
    )


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _open(target: str | Path | TextIO):
    if isinstance(target, (str, Path)):
        return open(target, "w", newline="")
    return None


def _write_rows(target, header, rows) -> None:
    handle = _open(target)
    stream = handle if handle is not None else target
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if handle is not None:
            handle.close()


def write_trajectory_csv(result: SimulationResult, target: str | Path | TextIO) -> None:
    """Long format ``t,agent,role,value``; agents are 0-indexed."""
    rows = (
        (t, tr.agent, tr.role, _fmt(tr.values[t]))
        for t in range(result.horizon + 1)
        for tr in result.trajectories
    )
    _write_rows(target, ("t", "agent", "role", "value"), rows)


def write_sends_csv(result: SimulationResult, target: str | Path | TextIO) -> None:
    """Byzantine per-edge sends, ``t,src,dst,value``."""
    rows = []
    for tr in result.trajectories:
        if tr.sends is None:
            continue
        for t, per_edge in enumerate(tr.sends):
            rows.extend((t, tr.agent, dst, _fmt(v)) for dst, v in sorted(per_edge.items()))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    _write_rows(target, ("t", "src", "dst", "value"), rows)


def write_plot_csv(result: SimulationResult, target: str | Path | TextIO) -> None:
    """Wide format for plotting: one row per step, one ``agent<id>_<role>`` column per agent."""
    header = ["t"] + [f"agent{tr.agent}_{tr.role}" for tr in result.trajectories]
    rows = (
        [t] + [_fmt(tr.values[t]) for tr in result.trajectories]
        for t in range(result.horizon + 1)
    )
    _write_rows(target, header, rows)


def trajectory_csv_text(result: SimulationResult) -> str:
    buf = io.StringIO()
    write_trajectory_csv(result, buf)
    return buf.getvalue()
