"""Seeded run loop for all three history kinds, logging, and metrics.

``run_history`` executes the configured number of successor transitions
and produces a replayable JSONL log plus a metrics report.  The run is a
pure function of the config: the lottery and each strategy draw from
independent derived streams, records carry no timestamps, and encoding is
canonical, so identical configs yield byte-identical logs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import ConfigError
from .golden import (
    CarrierRoster,
    GoldenState,
    bootstrap_exercise,
    golden_step,
    reciprocity_audit,
    validate_golden_state,
)
from .good import GoodState, bootstrap_force as good_bootstrap_force, good_step, validate_good_state
from .logio import FORMAT_VERSION, HistoryLog, dumps_canonical
from .primitive import (
    PrimitiveState,
    bootstrap_force as primitive_bootstrap_force,
    primitive_step,
    validate_primitive_state,
)
from .rng import derive_seed, derive_stream
from .society import Society
from .strategies import make_strategy


@dataclass
class MetricsReport:
    """Per-step summary of a finished run.

    ``ownership[t]`` counts goods owned per person in state t (rows sum to
    the estate size); ``total_power[t]`` is the conserved total for
    primitive and good runs and the constant total carrier intensity for
    golden runs; ``gini[t]`` measures concentration of cumulative
    goods-owned through state t.
    """

    model: str
    steps: int
    ownership: list[list[int]]
    total_power: list[float]
    gini: list[float]
    reciprocity: dict | None = None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "steps": self.steps,
            "ownership": self.ownership,
            "total_power": self.total_power,
            "gini": self.gini,
            "reciprocity": self.reciprocity,
        }


def gini_coefficient(values: np.ndarray) -> float:
    """Gini index of a non-negative vector, 0 when everything is 0."""
    values = np.sort(np.asarray(values, dtype=float))
    total = values.sum()
    if total <= 0.0:
        return 0.0
    n = len(values)
    ranks = np.arange(1, n + 1)
    return float(((2 * ranks - n - 1) * values).sum() / (n * total))


def resolve_society(config: RunConfig) -> Society:
    source = config.society
    if "generate" in source:
        gen = source["generate"]
        seed = gen.get("seed", derive_seed(config.seed, "society"))
        return Society.generated(gen["persons"], gen["goods"], seed, gen.get("eps", 0.05))
    if "inline" in source:
        return Society.from_dict(source["inline"])
    return Society.load(source["file"])


def _vector(spec, count: int, what: str, dtype=float) -> np.ndarray:
    if isinstance(spec, (int, float)):
        return np.full(count, spec, dtype=dtype)
    arr = np.asarray(spec, dtype=dtype)
    if arr.shape != (count,):
        raise ConfigError([f"{what}: expected {count} entries, got shape {arr.shape}"])
    return arr


def build_roster(config: RunConfig) -> CarrierRoster:
    spec = config.initial["carriers"]
    count = spec["count"]
    intensity = _vector(spec.get("intensity", 1.0), count, "initial.carriers.intensity")
    max_idle = _vector(spec.get("max_idle", 1), count, "initial.carriers.max_idle", dtype=np.int64)
    return CarrierRoster(intensity, max_idle)


def _assignment(spec, society: Society) -> np.ndarray:
    if spec == "round-robin" or spec is None:
        return np.arange(society.estate, dtype=np.int64) % society.persons
    arr = np.asarray(spec, dtype=np.int64)
    if arr.shape != (society.estate,):
        raise ConfigError([f"initial.assignment: expected {society.estate} entries"])
    return arr


def _round_robin_locations(society: Society, count: int) -> np.ndarray:
    cells = society.persons * society.estate * society.persons
    idx = np.arange(count, dtype=np.int64) % cells
    x = idx // (society.estate * society.persons)
    a = (idx // society.persons) % society.estate
    y = idx % society.persons
    return np.stack([x, a, y], axis=1)


def build_initial_state(config: RunConfig, society: Society, roster, strategy):
    """Initial state from the config: explicit tables where given,
    otherwise uniform power, round-robin assignment, and a force
    bootstrapped from the strategy."""
    init = config.initial
    assignment = _assignment(init.get("assignment"), society)
    if config.model == "primitive":
        power = _vector(init.get("power", 1.0), society.persons, "initial.power")
        force_spec = init.get("force", "strategy")
        if isinstance(force_spec, str):
            force = primitive_bootstrap_force(society, strategy, assignment, power)
        else:
            force = np.asarray(force_spec, dtype=float)
        state = PrimitiveState(assignment, power, force)
        validate_primitive_state(society, state)
        return state
    if config.model == "good":
        shape = (society.persons, society.estate, society.persons)
        power_spec = init.get("power", 1.0)
        power = np.full(shape, power_spec) if isinstance(power_spec, (int, float)) else np.asarray(power_spec, dtype=float)
        force_spec = init.get("force", "strategy")
        if isinstance(force_spec, str):
            force = good_bootstrap_force(society, strategy, assignment, power)
        else:
            force = np.asarray(force_spec, dtype=float)
        state = GoodState(assignment, power, force)
        validate_good_state(society, state)
        return state
    # golden
    spec = init.get("locations", "round-robin")
    if isinstance(spec, str):
        location = _round_robin_locations(society, roster.count)
    else:
        location = np.asarray(spec, dtype=np.int64)
    idle = _vector(config.initial.get("idle", 0), roster.count, "initial.idle", dtype=np.int64)
    exercised_spec = init.get("exercised", "strategy")
    if isinstance(exercised_spec, str):
        exercised = bootstrap_exercise(society, roster, strategy, assignment, location, idle)
    else:
        exercised = np.asarray(exercised_spec, dtype=bool)
    state = GoldenState(assignment, location, idle, exercised)
    validate_golden_state(society, roster, state)
    return state


def _golden_extras(prev: GoldenState, curr: GoldenState) -> dict:
    moved_ids = np.nonzero(np.any(prev.location != curr.location, axis=1))[0]
    return {
        "moved": [
            [int(c), prev.location[c].tolist(), curr.location[c].tolist()] for c in moved_ids
        ],
        "exercised": np.nonzero(curr.exercised)[0].tolist(),
        "idle_reset": np.nonzero(curr.idle == 0)[0].tolist(),
    }


def run_history(config: RunConfig) -> tuple[HistoryLog, MetricsReport]:
    """Run the configured history and return its log and metrics.

    The log satisfies the replay contract: every adjacent pair of
    snapshots is related by the engine's deterministic laws given the
    logged winners, re-checkable with
    :func:`everwill.invariants.check_invariants`.
    """
    society = resolve_society(config)
    kind = config.model
    roster = build_roster(config) if kind == "golden" else None
    name = config.strategy["name"]
    strategy = make_strategy(
        kind, name, config.strategy.get("params", {}), rng=derive_stream(config.seed, f"strategy:{name}")
    )
    lottery = derive_stream(config.seed, "lottery")
    state = build_initial_state(config, society, roster, strategy)

    header = {
        "kind": "header",
        "format_version": FORMAT_VERSION,
        "package_version": __version__,
        "model": kind,
        "seed": config.seed,
        "config": config.to_dict(),
        "society": society.to_dict(),
    }
    if roster is not None:
        header["carriers"] = roster.to_dicts()

    interval = config.log.get("snapshot_interval", 1)
    records: list[dict] = [{"kind": "init", "state": state.to_dict()}]

    states = [state]
    for t in range(config.steps):
        if kind == "primitive":
            state_next, battle = primitive_step(society, state, strategy, lottery, t=t)
        elif kind == "good":
            state_next, battle = good_step(society, state, strategy, lottery, t=t)
        else:
            state_next, battle = golden_step(society, roster, state, strategy, lottery, t=t)
        record = {"kind": "step", "t": t, "battle": battle.to_dict()}
        if kind == "golden":
            record.update(_golden_extras(state, state_next))
        if interval > 0 and (((t + 1) % interval == 0) or t == config.steps - 1):
            record["state"] = state_next.to_dict()
        records.append(record)
        states.append(state_next)
        state = state_next

    metrics = compute_metrics(kind, society, roster, states)
    footer = {"kind": "footer", "metrics": metrics.to_dict()}
    return HistoryLog(header=header, records=records, footer=footer), metrics


def compute_metrics(kind: str, society: Society, roster, states) -> MetricsReport:
    ownership: list[list[int]] = []
    total_power: list[float] = []
    gini: list[float] = []
    cumulative = np.zeros(society.persons)
    for state in states:
        counts = np.bincount(state.assignment, minlength=society.persons)
        ownership.append(counts.tolist())
        cumulative += counts
        gini.append(gini_coefficient(cumulative))
        if kind == "primitive":
            total_power.append(float(state.power.sum()))
        elif kind == "good":
            total_power.append(float(state.power.sum()))
        else:
            total_power.append(float(roster.intensity.sum()))
    reciprocity = None
    if kind == "golden" and len(states) > 1:
        audit = reciprocity_audit(society, roster, states, validate_history=False)
        reciprocity = audit.summary()
    return MetricsReport(
        model=kind,
        steps=len(states) - 1,
        ownership=ownership,
        total_power=total_power,
        gini=gini,
        reciprocity=reciprocity,
    )


def write_run_outputs(log: HistoryLog, metrics: MetricsReport, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log_path = log.write(out / "history.jsonl")
    metrics_path = out / "metrics.json"
    metrics_path.write_text(dumps_canonical(metrics.to_dict()) + "\n", encoding="utf-8")
    return log_path, metrics_path
