"""Log-level invariant audit.

Re-checks a finished history log against everything the engines promise:
every logged win distribution and winner is recomputed from the previous
snapshot, the deterministic update laws are replayed and compared exactly,
per-state validity conditions are re-verified, conservation is tracked,
and golden logs additionally run the full reciprocity audit.  The audit
needs a snapshot at every step (snapshot_interval 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AuditInputError, StructuralError
from .golden import (
    CarrierRoster,
    GoldenState,
    golden_deterministic_update,
    golden_state_problems,
    reciprocity_audit,
)
from .golden import _win_table as golden_win_table
from .good import GoodState, good_power_update, good_state_problems
from .good import _win_table as good_win_table
from .logio import HistoryLog
from .primitive import PrimitiveState, primitive_power_update, primitive_state_problems
from .primitive import _win_table as primitive_win_table
from .rng import weighted_index
from .society import Society

CONSERVATION_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Violation:
    step: int           # index of the state where the problem shows
    check: str
    detail: str

    def to_dict(self) -> dict:
        return {"step": self.step, "check": self.check, "detail": self.detail}


@dataclass
class InvariantReport:
    model: str
    states_checked: int
    transitions_checked: int
    violations: list[Violation] = field(default_factory=list)
    reciprocity: dict | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "ok": self.ok,
            "states_checked": self.states_checked,
            "transitions_checked": self.transitions_checked,
            "violations": [v.to_dict() for v in self.violations],
            "reciprocity": self.reciprocity,
        }


def _load_history(log: HistoryLog):
    header = log.header
    model = header.get("model")
    if model not in ("primitive", "good", "golden"):
        raise AuditInputError(f"header has unknown model {model!r}")
    try:
        society = Society.from_dict(header["society"])
    except (KeyError, StructuralError) as exc:
        raise AuditInputError(f"header society is unusable: {exc}") from exc
    roster = None
    if model == "golden":
        if "carriers" not in header:
            raise AuditInputError("golden log header has no carrier roster")
        roster = CarrierRoster.from_dicts(header["carriers"])

    if not log.records or log.records[0].get("kind") != "init":
        raise AuditInputError("log has no init record")

    def parse_state(data: dict):
        if model == "primitive":
            return PrimitiveState.from_dict(data)
        if model == "good":
            return GoodState.from_dict(data, society.persons, society.estate)
        return GoldenState.from_dict(data)

    states = [parse_state(log.records[0]["state"])]
    battles: list[dict] = []
    for i, record in enumerate(log.records[1:]):
        if record.get("kind") != "step" or record.get("t") != i:
            raise AuditInputError(f"step records are not contiguous at index {i}")
        if "state" not in record:
            raise AuditInputError(
                f"step {i} has no state snapshot; the invariant audit needs "
                "log.snapshot_interval = 1 (re-run with audit enabled)"
            )
        battles.append(record["battle"])
        states.append(parse_state(record["state"]))
    return model, society, roster, states, battles


def _check_battle(
    battle: dict,
    dists: np.ndarray,
    deterministic: np.ndarray,
    prev_assignment: np.ndarray,
    curr_assignment: np.ndarray,
    step: int,
    violations: list[Violation],
) -> None:
    logged_dist = np.asarray(battle["dist"], dtype=float)
    if logged_dist.shape != dists.shape or not np.array_equal(logged_dist, dists):
        violations.append(
            Violation(step, "battle-distribution", "logged win distribution differs from recomputation")
        )
    winners = np.asarray(battle["winners"], dtype=np.int64)
    if not np.array_equal(winners, curr_assignment):
        violations.append(
            Violation(step, "assignment", "snapshot assignment differs from logged winners")
        )
    for a, u in enumerate(battle["u"]):
        if u is None:
            if not deterministic[a]:
                violations.append(
                    Violation(step, "battle-variate", f"good {a}: no variate drawn on a contested battle")
                )
            elif winners[a] != prev_assignment[a]:
                violations.append(
                    Violation(
                        step, "degenerate-owner", f"good {a}: owner changed although nothing contested it"
                    )
                )
        else:
            if deterministic[a]:
                violations.append(
                    Violation(step, "battle-variate", f"good {a}: variate drawn on a degenerate battle")
                )
            elif weighted_index(dists[a], u) != winners[a]:
                violations.append(
                    Violation(
                        step, "battle-winner", f"good {a}: logged winner {winners[a]} does not match variate"
                    )
                )


def check_invariants(log: HistoryLog) -> InvariantReport:
    """Audit a full-snapshot history log; returns every violation found,
    ordered by the state index where it shows."""
    model, society, roster, states, battles = _load_history(log)
    violations: list[Violation] = []

    def state_problems(state):
        if model == "primitive":
            return primitive_state_problems(society, state)
        if model == "good":
            return good_state_problems(society, state)
        return golden_state_problems(society, roster, state)

    for problem in state_problems(states[0]):
        violations.append(Violation(0, "state", problem))

    for t, battle in enumerate(battles):
        prev, curr = states[t], states[t + 1]
        step = t + 1
        if model == "primitive":
            dists, deterministic = primitive_win_table(society, prev)
        elif model == "good":
            dists = good_win_table(society, prev)
            deterministic = np.zeros(society.estate, dtype=bool)
        else:
            dists, deterministic = golden_win_table(society, roster, prev)
        _check_battle(battle, dists, deterministic, prev.assignment, curr.assignment, step, violations)

        if model == "primitive":
            expected = primitive_power_update(society, prev, curr.assignment)
            if not np.array_equal(expected, curr.power):
                worst = int(np.argmax(np.abs(expected - curr.power)))
                violations.append(
                    Violation(
                        step,
                        "successor-power",
                        f"power of person {worst} is {curr.power[worst]!r}, law gives {expected[worst]!r}",
                    )
                )
            drift = abs(curr.power.sum() - prev.power.sum())
            if drift > CONSERVATION_TOLERANCE:
                violations.append(Violation(step, "conservation", f"total power drifted by {drift!r}"))
        elif model == "good":
            delta = prev.force.transpose(2, 1, 0) - prev.force
            if not np.array_equal(delta, -delta.transpose(2, 1, 0)):
                violations.append(Violation(step, "exchange-antisymmetry", "exchange deltas are not antisymmetric"))
            expected = good_power_update(prev)
            if not np.array_equal(expected, curr.power):
                violations.append(
                    Violation(step, "successor-power", "power table differs from the pairwise exchange law")
                )
            drift = abs(curr.power.sum() - prev.power.sum())
            if drift > CONSERVATION_TOLERANCE:
                violations.append(Violation(step, "conservation", f"total power drifted by {drift!r}"))
        else:
            location, idle = golden_deterministic_update(prev)
            moved_wrong = np.nonzero(np.any(curr.location != location, axis=1))[0]
            if len(moved_wrong):
                c = int(moved_wrong[0])
                violations.append(
                    Violation(
                        step,
                        "successor-partition",
                        f"carrier {c} at {curr.location[c].tolist()}, law puts it at {location[c].tolist()}",
                    )
                )
            idle_wrong = np.nonzero(curr.idle != idle)[0]
            if len(idle_wrong):
                c = int(idle_wrong[0])
                violations.append(
                    Violation(
                        step,
                        "successor-idle",
                        f"carrier {c} idle {curr.idle[c]}, law gives {idle[c]}",
                    )
                )

        for problem in state_problems(curr):
            violations.append(Violation(step, "state", problem))

    reciprocity = None
    if model == "golden" and len(states) > 1:
        audit = reciprocity_audit(society, roster, states, validate_history=False)
        reciprocity = audit.to_dict()
        for entry in list(audit.violations) + list(audit.rectangle_violations):
            violations.append(Violation(int(entry["t"]), "reciprocity", str(entry)))

    return InvariantReport(
        model=model,
        states_checked=len(states),
        transitions_checked=len(battles),
        violations=violations,
        reciprocity=reciprocity,
    )
