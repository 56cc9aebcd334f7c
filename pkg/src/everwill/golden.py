"""Golden-history engine.

Power is carried by indivisible tokens.  A force carrier sits at exactly
one cell (x, a, y), meaning x holds the ability to desire that good a be
owned by y.  Exercising the carrier adds its intensity to that desire and
relocates it to the mirrored cell (y, a, x); a carrier left idle for its
maximum idle period must be exercised.  Those two rules together make
reciprocity a law: every exercised desire from x toward y over a good is
exercised back from y toward x within max_idle + 1 steps, which
:func:`reciprocity_audit` machine-checks over finite histories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .battle import BattleRecord, run_lotteries
from .errors import AuditInputError, StrategyViolation, StructuralError
from .rng import derive_seed
from .society import Society
from .strategies import GoldenStrategy, StrategyContext


@dataclass(frozen=True)
class ForceCarrier:
    """One token: identity, intensity, and maximum idle period."""

    id: int
    intensity: float
    max_idle: int


@dataclass(frozen=True, eq=False)
class CarrierRoster:
    """The fixed carrier population of a golden history."""

    intensity: np.ndarray       # (carriers,) strictly positive
    max_idle: np.ndarray        # (carriers,) integers >= 1

    def __post_init__(self):
        intensity = np.asarray(self.intensity, dtype=float).copy()
        max_idle = np.asarray(self.max_idle, dtype=np.int64).copy()
        if intensity.ndim != 1 or intensity.shape != max_idle.shape or len(intensity) == 0:
            raise StructuralError("roster needs matching, non-empty intensity and max_idle vectors")
        if not np.all(np.isfinite(intensity)) or np.any(intensity <= 0.0):
            raise StructuralError("carrier intensity must be finite and > 0")
        if np.any(max_idle < 1):
            raise StructuralError("carrier max_idle must be >= 1")
        intensity.setflags(write=False)
        max_idle.setflags(write=False)
        object.__setattr__(self, "intensity", intensity)
        object.__setattr__(self, "max_idle", max_idle)

    @property
    def count(self) -> int:
        return len(self.intensity)

    def carrier(self, c: int) -> ForceCarrier:
        return ForceCarrier(c, float(self.intensity[c]), int(self.max_idle[c]))

    def to_dicts(self) -> list[dict]:
        return [
            {"id": c, "mu": float(self.intensity[c]), "theta": int(self.max_idle[c])}
            for c in range(self.count)
        ]

    @classmethod
    def from_dicts(cls, rows: Iterable[dict]) -> "CarrierRoster":
        rows = sorted(rows, key=lambda r: r["id"])
        ids = [r["id"] for r in rows]
        if ids != list(range(len(ids))):
            raise StructuralError(f"carrier ids must be dense 0..{len(ids) - 1}, got {ids}")
        return cls([r["mu"] for r in rows], [r["theta"] for r in rows])


@dataclass(frozen=True, eq=False)
class GoldenState:
    """One step of a golden history.

    ``location[c]`` is the unique cell (x, a, y) holding carrier c, which
    makes the cover and disjointness conditions of the power partition
    structural.  ``exercised[c]`` says whether c contributes force this
    step; a carrier can only ever be exercised at its own location.
    """

    assignment: np.ndarray      # (goods,) owner per good
    location: np.ndarray        # (carriers, 3) cell per carrier
    idle: np.ndarray            # (carriers,) consecutive unexercised steps
    exercised: np.ndarray       # (carriers,) bool

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=np.int64).copy()
        location = np.asarray(self.location, dtype=np.int64).copy()
        idle = np.asarray(self.idle, dtype=np.int64).copy()
        exercised = np.asarray(self.exercised, dtype=bool).copy()
        for arr, field in (
            (assignment, "assignment"),
            (location, "location"),
            (idle, "idle"),
            (exercised, "exercised"),
        ):
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)

    def carriers_at(self, x: int, a: int, y: int) -> np.ndarray:
        """Ids of carriers located at cell (x, a, y)."""
        hit = (self.location[:, 0] == x) & (self.location[:, 1] == a) & (self.location[:, 2] == y)
        return np.nonzero(hit)[0]

    def to_dict(self) -> dict:
        return {
            "assignment": self.assignment.tolist(),
            "location": self.location.tolist(),
            "idle": self.idle.tolist(),
            "exercised": np.nonzero(self.exercised)[0].tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GoldenState":
        location = np.asarray(data["location"], dtype=np.int64)
        exercised = np.zeros(len(location), dtype=bool)
        exercised[np.asarray(data["exercised"], dtype=np.int64)] = True
        return cls(data["assignment"], location, data["idle"], exercised)


def golden_state_problems(society: Society, roster: CarrierRoster, state: GoldenState) -> list[str]:
    """All ways the state fails the golden validity conditions."""
    n, m, carriers = society.persons, society.estate, roster.count
    if state.assignment.shape != (m,):
        return [f"assignment shape {state.assignment.shape} != ({m},)"]
    if state.location.shape != (carriers, 3):
        return [f"location shape {state.location.shape} != ({carriers}, 3)"]
    if state.idle.shape != (carriers,) or state.exercised.shape != (carriers,):
        return ["idle/exercised length does not match the roster"]
    problems: list[str] = []
    if not np.all((state.assignment >= 0) & (state.assignment < n)):
        problems.append("assignment maps a good to a non-person")
    ok_loc = (
        (state.location[:, 0] >= 0) & (state.location[:, 0] < n)
        & (state.location[:, 1] >= 0) & (state.location[:, 1] < m)
        & (state.location[:, 2] >= 0) & (state.location[:, 2] < n)
    )
    for c in np.nonzero(~ok_loc)[0]:
        problems.append(f"carrier {c} located outside the society at {state.location[c].tolist()}")
    for c in np.nonzero(state.idle < 0)[0]:
        problems.append(f"carrier {c} has negative idle count {state.idle[c]}")
    for c in np.nonzero(state.idle > roster.max_idle)[0]:
        problems.append(
            f"carrier {c} idle for {state.idle[c]} > max_idle {roster.max_idle[c]}"
        )
    mandatory = (state.idle == roster.max_idle) & ~state.exercised
    for c in np.nonzero(mandatory)[0]:
        problems.append(
            f"carrier {c} reached max_idle {roster.max_idle[c]} but is not exercised"
        )
    return problems


def validate_golden_state(society: Society, roster: CarrierRoster, state: GoldenState) -> None:
    problems = golden_state_problems(society, roster, state)
    if problems:
        raise StructuralError("; ".join(problems))


def effectiveness_mass(society: Society, roster: CarrierRoster, state: GoldenState) -> np.ndarray:
    """(goods, persons) table: total discounted intensity backing each
    candidate owner of each good."""
    mass = np.zeros((society.estate, society.persons))
    active = np.nonzero(state.exercised)[0]
    if len(active):
        rel = society.relationships
        xs, goods, ys = state.location[active].T
        owners = state.assignment[goods]
        contrib = roster.intensity[active] * rel[xs, owners] * rel[owners, ys]
        np.add.at(mass, (goods, ys), contrib)
    return mass


def golden_effectiveness(
    society: Society, roster: CarrierRoster, state: GoldenState, x: int, a: int, y: int
) -> float:
    n, m = society.persons, society.estate
    if not (0 <= x < n and 0 <= a < m and 0 <= y < n):
        raise ValueError(f"index out of range: ({x}, {a}, {y})")
    cell = state.carriers_at(x, a, y)
    active = cell[state.exercised[cell]]
    owner = int(state.assignment[a])
    return float(
        roster.intensity[active].sum() * society.relationships[x, owner] * society.relationships[owner, y]
    )


def extended_tables(
    society: Society,
    roster: CarrierRoster,
    state: GoldenState,
    persons_from: Iterable[int],
    a: int,
    persons_to: Iterable[int],
) -> tuple[frozenset[int], frozenset[int], float]:
    """Rectangle aggregates over (persons_from x {a} x persons_to):
    carriers held there, carriers exercised there, and the total
    effectiveness."""
    if not 0 <= a < society.estate:
        raise ValueError(f"good {a} out of range")
    sources = frozenset(int(x) for x in persons_from)
    targets = frozenset(int(y) for y in persons_to)
    for p in sources | targets:
        if not 0 <= p < society.persons:
            raise ValueError(f"person {p} out of range")
    if not sources or not targets:
        return frozenset(), frozenset(), 0.0

    loc = state.location
    inside = (
        np.isin(loc[:, 0], sorted(sources))
        & (loc[:, 1] == a)
        & np.isin(loc[:, 2], sorted(targets))
    )
    held = frozenset(np.nonzero(inside)[0].tolist())
    active = frozenset(np.nonzero(inside & state.exercised)[0].tolist())
    owner = int(state.assignment[a])
    rel = society.relationships
    total = 0.0
    for c in sorted(active):
        x, _, y = state.location[c]
        total += float(roster.intensity[c] * rel[x, owner] * rel[owner, y])
    return held, active, total


def _win_table(
    society: Society, roster: CarrierRoster, state: GoldenState
) -> tuple[np.ndarray, np.ndarray]:
    mass = effectiveness_mass(society, roster, state)
    goods = society.estate
    dists = np.empty((goods, society.persons))
    deterministic = np.zeros(goods, dtype=bool)
    for a in range(goods):
        total = mass[a].sum()
        if total > 0.0:
            dists[a] = mass[a] / total
        else:
            dists[a] = 0.0
            dists[a, state.assignment[a]] = 1.0
            deterministic[a] = True
    return dists, deterministic


def golden_win_distribution(
    society: Society, roster: CarrierRoster, state: GoldenState, a: int
) -> np.ndarray:
    """Win probability per person for good ``a``; when no carrier on the
    good is exercised, the incumbent retains it with probability 1."""
    if not 0 <= a < society.estate:
        raise ValueError(f"good {a} out of range")
    dists, _ = _win_table(society, roster, state)
    return dists[a]


def golden_deterministic_update(state: GoldenState) -> tuple[np.ndarray, np.ndarray]:
    """Carrier relocation and idle law: every exercised carrier moves to
    the mirrored cell and resets its idle count; the rest stay and age."""
    location = state.location.copy()
    active = state.exercised
    location[active] = state.location[active][:, [2, 1, 0]]
    idle = np.where(active, 0, state.idle + 1)
    return location, idle


def _propose_exercise(
    society: Society,
    roster: CarrierRoster,
    strategy: GoldenStrategy,
    assignment: np.ndarray,
    location: np.ndarray,
    idle: np.ndarray,
    prev_exercised: np.ndarray | None,
    step: int,
) -> np.ndarray:
    ctx = StrategyContext(
        society=society,
        assignment=assignment,
        power=location,
        step=step,
        rng=strategy.rng,
        idle=idle,
        roster=roster,
        prev_exercised=prev_exercised,
    )
    exercised = np.asarray(strategy.propose_exercise(ctx))
    if exercised.shape != (roster.count,):
        raise StrategyViolation(
            f"strategy '{strategy.name}' returned exercise flags of shape {exercised.shape}, "
            f"expected ({roster.count},)"
        )
    exercised = exercised.astype(bool)
    omitted = np.nonzero((idle == roster.max_idle) & ~exercised)[0]
    if len(omitted):
        c = int(omitted[0])
        raise StrategyViolation(
            f"strategy '{strategy.name}' did not exercise mandatory carrier {c} "
            f"(idle {idle[c]} = max_idle {roster.max_idle[c]})",
            carrier=c,
        )
    return exercised


def bootstrap_exercise(
    society: Society,
    roster: CarrierRoster,
    strategy: GoldenStrategy,
    assignment: np.ndarray,
    location: np.ndarray,
    idle: np.ndarray,
) -> np.ndarray:
    """Ask the strategy for the initial exercise flags, validated."""
    return _propose_exercise(society, roster, strategy, assignment, location, idle, None, 0)


def golden_step(
    society: Society,
    roster: CarrierRoster,
    state: GoldenState,
    strategy: GoldenStrategy,
    rng: np.random.Generator,
    *,
    t: int = 0,
) -> tuple[GoldenState, BattleRecord]:
    """One successor transition: battles, carrier relocation and idle
    update, then the strategy's exercise choice, validated against the
    mandatory rule."""
    dists, deterministic = _win_table(society, roster, state)
    winners, uniforms = run_lotteries(dists, deterministic, state.assignment, rng)
    location, idle = golden_deterministic_update(state)
    exercised = _propose_exercise(
        society, roster, strategy, winners, location, idle, state.exercised, t + 1
    )
    record = BattleRecord(winners=winners, uniforms=uniforms, distributions=dists)
    return GoldenState(winners, location, idle, exercised), record


def golden_transition_problems(
    society: Society,
    roster: CarrierRoster,
    prev: GoldenState,
    curr: GoldenState,
) -> list[str]:
    """All ways ``curr`` fails to be a lawful successor of ``prev``.

    Checks the relocation law, the idle law, and that each new owner was
    a possible lottery outcome (the incumbent when nothing on the good
    was exercised, otherwise someone with positive effectiveness).
    """
    problems: list[str] = []
    expected_location, expected_idle = golden_deterministic_update(prev)
    moved_wrong = np.nonzero(np.any(curr.location != expected_location, axis=1))[0]
    for c in moved_wrong[:5]:
        problems.append(
            f"carrier {c} at {curr.location[c].tolist()}, successor law puts it at "
            f"{expected_location[c].tolist()}"
        )
    idle_wrong = np.nonzero(curr.idle != expected_idle)[0]
    for c in idle_wrong[:5]:
        problems.append(
            f"carrier {c} idle {curr.idle[c]}, successor law gives {expected_idle[c]}"
        )
    mass = effectiveness_mass(society, roster, prev)
    for a in range(society.estate):
        w = int(curr.assignment[a])
        if mass[a].sum() == 0.0:
            if w != int(prev.assignment[a]):
                problems.append(
                    f"good {a} changed owner {prev.assignment[a]} -> {w} although nothing "
                    "on it was exercised"
                )
        elif mass[a, w] <= 0.0:
            problems.append(f"good {a} won by person {w} who had zero effectiveness")
    return problems


# ---------------------------------------------------------------------------
# Reciprocity audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExerciseEvent:
    """Carrier c exercised at step t while located at (source, good, target)."""

    carrier: int
    step: int
    source: int
    good: int
    target: int

    def to_dict(self) -> dict:
        return {
            "carrier": self.carrier,
            "t": self.step,
            "cell": [self.source, self.good, self.target],
        }


@dataclass(frozen=True)
class ReciprocityReport:
    """Outcome of auditing every exercise event for its mirrored reply.

    Every event must be answered at the mirrored cell within
    ``max_idle + 1`` steps; events whose deadline falls beyond the
    audited horizon are reported as pending, not failed.
    """

    horizon: int
    events: int
    matched: int
    pending: tuple[dict, ...]
    violations: tuple[dict, ...]
    latencies: dict[int, dict[int, int]]        # carrier -> latency -> count
    rectangle_samples: int
    rectangle_violations: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.rectangle_violations

    def summary(self) -> dict:
        flat = [lat for hist in self.latencies.values() for lat, k in hist.items() for _ in range(k)]
        return {
            "events": self.events,
            "matched": self.matched,
            "pending": len(self.pending),
            "violations": len(self.violations),
            "latency_min": min(flat) if flat else None,
            "latency_max": max(flat) if flat else None,
            "latency_mean": (sum(flat) / len(flat)) if flat else None,
        }

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "summary": self.summary(),
            "pending": list(self.pending),
            "violations": list(self.violations),
            "latency_histograms": {
                str(c): {str(lat): k for lat, k in sorted(hist.items())}
                for c, hist in sorted(self.latencies.items())
            },
            "rectangle_samples": self.rectangle_samples,
            "rectangle_violations": list(self.rectangle_violations),
        }


def _collect_events(states: Sequence[GoldenState]) -> dict[int, list[ExerciseEvent]]:
    per_carrier: dict[int, list[ExerciseEvent]] = {}
    for t, state in enumerate(states):
        for c in np.nonzero(state.exercised)[0]:
            x, a, y = (int(v) for v in state.location[c])
            per_carrier.setdefault(int(c), []).append(ExerciseEvent(int(c), t, x, a, y))
    return per_carrier


def _sample_rectangles(
    persons: int, goods: int, samples: int, seed: int
) -> list[tuple[frozenset[int], int, frozenset[int]]]:
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "rectangles")))
    out = []
    for _ in range(samples):
        a = int(rng.integers(goods))
        x_mask = rng.random(persons) < 0.5
        y_mask = rng.random(persons) < 0.5
        if not x_mask.any():
            x_mask[int(rng.integers(persons))] = True
        if not y_mask.any():
            y_mask[int(rng.integers(persons))] = True
        out.append(
            (frozenset(np.nonzero(x_mask)[0].tolist()), a, frozenset(np.nonzero(y_mask)[0].tolist()))
        )
    return out


def reciprocity_audit(
    society: Society,
    roster: CarrierRoster,
    states: Sequence[GoldenState],
    horizon: int | None = None,
    *,
    validate_history: bool = True,
    rectangle_samples: int = 32,
    rectangle_seed: int = 0,
) -> ReciprocityReport:
    """Audit a golden history for the reciprocity guarantees.

    For every exercise of carrier c at cell (x, a, y) at step t1 the audit
    finds the earliest t2 > t1 with c exercised at (y, a, x) and checks
    t2 - t1 <= max_idle(c) + 1.  Events whose reply would only be forced
    beyond the horizon are classified pending.  The set form is spot
    checked on sampled person rectangles: an exercise inside (X, a, Y)
    must be answered inside (Y, a, X).
    """
    if len(states) == 0:
        raise AuditInputError("history is empty")
    if horizon is None:
        horizon = len(states) - 1
    if not 0 <= horizon < len(states):
        raise AuditInputError(f"horizon {horizon} outside history of {len(states)} states")
    states = states[: horizon + 1]

    if validate_history:
        for t, state in enumerate(states):
            problems = golden_state_problems(society, roster, state)
            if problems:
                raise AuditInputError(f"state {t} is invalid: {problems[0]}")
        for t in range(len(states) - 1):
            problems = golden_transition_problems(society, roster, states[t], states[t + 1])
            if problems:
                raise AuditInputError(f"states {t} -> {t + 1} are not successors: {problems[0]}")

    per_carrier = _collect_events(states)
    matched = 0
    total_events = 0
    pending: list[dict] = []
    violations: list[dict] = []
    latencies: dict[int, dict[int, int]] = {}

    for c, events in sorted(per_carrier.items()):
        deadline_slack = int(roster.max_idle[c]) + 1
        for i, event in enumerate(events):
            total_events += 1
            deadline = event.step + deadline_slack
            follow = events[i + 1] if i + 1 < len(events) else None
            entry = event.to_dict() | {"deadline": deadline}
            if follow is None:
                if deadline > horizon:
                    pending.append(entry)
                else:
                    violations.append(entry | {"reason": "never reciprocated before deadline"})
                continue
            mirrored = (event.target, event.good, event.source)
            actual = (follow.source, follow.good, follow.target)
            if actual != mirrored:
                violations.append(
                    entry | {"reason": f"next exercise at {list(actual)}, expected {list(mirrored)}"}
                )
                continue
            latency = follow.step - event.step
            if latency > deadline_slack:
                violations.append(
                    entry | {"reason": f"reciprocated after {latency} steps, bound is {deadline_slack}"}
                )
                continue
            matched += 1
            hist = latencies.setdefault(c, {})
            hist[latency] = hist.get(latency, 0) + 1

    rectangle_violations: list[dict] = []
    rectangles = _sample_rectangles(society.persons, society.estate, rectangle_samples, rectangle_seed)
    for sources, a, targets in rectangles:
        for c, events in sorted(per_carrier.items()):
            deadline_slack = int(roster.max_idle[c]) + 1
            for i, event in enumerate(events):
                if event.good != a or event.source not in sources or event.target not in targets:
                    continue
                answered = any(
                    later.good == a and later.source in targets and later.target in sources
                    for later in events[i + 1 :]
                )
                if answered:
                    continue
                if event.step + deadline_slack > horizon:
                    continue        # pending at horizon
                rectangle_violations.append(
                    event.to_dict()
                    | {"rect_from": sorted(sources), "rect_to": sorted(targets), "good": a}
                )

    return ReciprocityReport(
        horizon=horizon,
        events=total_events,
        matched=matched,
        pending=tuple(pending),
        violations=tuple(violations),
        latencies=latencies,
        rectangle_samples=len(rectangles),
        rectangle_violations=tuple(rectangle_violations),
    )
