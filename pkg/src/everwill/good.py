"""Good-history engine.

Desire is triple-indexed: person x may desire that good a be owned by
person y.  Effectiveness discounts force by the two-hop tie through the
current owner; the per-good lottery weighs each candidate owner by the
column sum of effectiveness directed at it.  Power moves by a pairwise
exchange only: x gives y what x desired on y and receives what y desired
on x, so the exchanged amounts are exactly antisymmetric and the total is
conserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .battle import BattleRecord, run_lotteries
from .errors import StrategyViolation, StructuralError
from .society import Society
from .strategies import GoodStrategy, StrategyContext

CONSERVATION_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class GoodState:
    """One step of a good history: assignment plus triple-indexed tables."""

    assignment: np.ndarray      # (goods,) owner per good
    power: np.ndarray           # (persons, goods, persons) strictly positive
    force: np.ndarray           # (persons, goods, persons) in (0, min(power, 1))

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=np.int64).copy()
        power = np.asarray(self.power, dtype=float).copy()
        force = np.asarray(self.force, dtype=float).copy()
        for arr, field in ((assignment, "assignment"), (power, "power"), (force, "force")):
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)

    def to_dict(self) -> dict:
        return {
            "assignment": self.assignment.tolist(),
            "power": table_to_quadruples(self.power),
            "force": table_to_quadruples(self.force),
        }

    @classmethod
    def from_dict(cls, data: dict, persons: int, goods: int) -> "GoodState":
        return cls(
            data["assignment"],
            quadruples_to_table(data["power"], persons, goods),
            quadruples_to_table(data["force"], persons, goods),
        )


def table_to_quadruples(table: np.ndarray) -> list[list]:
    """Wire form for triple-indexed tables: [x, a, y, value] rows."""
    n, m, _ = table.shape
    out = []
    for x in range(n):
        for a in range(m):
            for y in range(n):
                v = table[x, a, y]
                if v != 0.0:
                    out.append([x, a, y, float(v)])
    return out


def quadruples_to_table(rows: list, persons: int, goods: int) -> np.ndarray:
    table = np.zeros((persons, goods, persons))
    for x, a, y, v in rows:
        table[x, a, y] = v
    return table


def good_state_problems(society: Society, state: GoodState) -> list[str]:
    """All ways the state fails the good validity conditions."""
    n, m = society.persons, society.estate
    shape = (n, m, n)
    if state.assignment.shape != (m,):
        return [f"assignment shape {state.assignment.shape} != ({m},)"]
    if state.power.shape != shape:
        return [f"power shape {state.power.shape} != {shape}"]
    if state.force.shape != shape:
        return [f"force shape {state.force.shape} != {shape}"]
    problems: list[str] = []
    if not np.all((state.assignment >= 0) & (state.assignment < n)):
        problems.append("assignment maps a good to a non-person")
    if not np.all(np.isfinite(state.power)) or not np.all(np.isfinite(state.force)):
        problems.append("non-finite power or force entries")
        return problems
    for x, a, y in np.argwhere(state.power <= 0.0)[:5]:
        problems.append(f"power[{x}][{a}][{y}] = {state.power[x, a, y]!r}, must be > 0")
    bad = (state.force <= 0.0) | (state.force >= 1.0) | (state.force >= state.power)
    for x, a, y in np.argwhere(bad)[:5]:
        problems.append(
            f"force[{x}][{a}][{y}] = {state.force[x, a, y]!r} outside "
            f"(0, min(power={state.power[x, a, y]!r}, 1))"
        )
    return problems


def validate_good_state(society: Society, state: GoodState) -> None:
    problems = good_state_problems(society, state)
    if problems:
        raise StructuralError("; ".join(problems))


def effectiveness_cube(society: Society, state: GoodState) -> np.ndarray:
    """(persons, goods, persons) two-hop discounted force."""
    rel = society.relationships
    owner = state.assignment
    return state.force * rel[:, owner][:, :, None] * rel[owner, :][None, :, :]


def good_effectiveness(society: Society, state: GoodState, x: int, a: int, y: int) -> float:
    n, m = society.persons, society.estate
    if not (0 <= x < n and 0 <= a < m and 0 <= y < n):
        raise ValueError(f"index out of range: ({x}, {a}, {y})")
    owner = int(state.assignment[a])
    return float(state.force[x, a, y] * society.relationships[x, owner] * society.relationships[owner, y])


def _win_table(society: Society, state: GoodState) -> np.ndarray:
    """Per-good win distributions; the denominator is positive for every
    valid state (all force and all ties are strictly positive)."""
    psi = effectiveness_cube(society, state)
    mass = psi.sum(axis=0)                       # (goods, persons): support toward each candidate
    totals = mass.sum(axis=1)
    if np.any(totals <= 0.0):
        raise StructuralError("zero total effectiveness on a good; state violates positivity")
    return mass / totals[:, None]


def good_win_distribution(society: Society, state: GoodState, a: int) -> np.ndarray:
    """Win probability per person for good ``a``: its share of the total
    effectiveness directed at it."""
    if not 0 <= a < society.estate:
        raise ValueError(f"good {a} out of range")
    psi = effectiveness_cube(society, state)
    mass = psi[:, a, :].sum(axis=0)
    total = mass.sum()
    if total <= 0.0:
        raise StructuralError("zero total effectiveness on a good; state violates positivity")
    return mass / total


def good_power_update(state: GoodState) -> np.ndarray:
    """Pairwise exchange: each (x, a, y) pair swaps its mutual desires.

    Computed as power + (force^T - force) so the exchanged amounts are
    exactly antisymmetric; the update never references the lottery
    outcome.
    """
    delta = state.force.transpose(2, 1, 0) - state.force
    return state.power + delta


def _propose_force(
    society: Society,
    strategy: GoodStrategy,
    assignment: np.ndarray,
    power: np.ndarray,
    prev_force: np.ndarray | None,
    step: int,
) -> np.ndarray:
    ctx = StrategyContext(
        society=society,
        assignment=assignment,
        power=power,
        step=step,
        rng=strategy.rng,
        prev_force=prev_force,
    )
    force = np.asarray(strategy.propose_force(ctx), dtype=float)
    shape = (society.persons, society.estate, society.persons)
    if force.shape != shape:
        raise StrategyViolation(
            f"strategy '{strategy.name}' returned force shape {force.shape}, expected {shape}"
        )
    if not np.all(np.isfinite(force)):
        raise StrategyViolation(f"strategy '{strategy.name}' returned non-finite force")
    bad = (force <= 0.0) | (force >= 1.0) | (force >= power)
    offenders = np.argwhere(bad)
    if len(offenders):
        x, a, y = offenders[0]
        raise StrategyViolation(
            f"strategy '{strategy.name}' proposed force[{x}][{a}][{y}] = {force[x, a, y]!r} "
            f"outside (0, min(power={power[x, a, y]!r}, 1))",
            person=int(x),
        )
    return force


def bootstrap_force(
    society: Society,
    strategy: GoodStrategy,
    assignment: np.ndarray,
    power: np.ndarray,
) -> np.ndarray:
    """Ask the strategy for the initial force table, validated."""
    return _propose_force(society, strategy, assignment, power, None, 0)


def good_step(
    society: Society,
    state: GoodState,
    strategy: GoodStrategy,
    rng: np.random.Generator,
    *,
    t: int = 0,
) -> tuple[GoodState, BattleRecord]:
    """One successor transition: battles, pairwise power exchange, then
    the strategy's next force, validated entrywise."""
    dists = _win_table(society, state)
    deterministic = np.zeros(society.estate, dtype=bool)
    winners, uniforms = run_lotteries(dists, deterministic, state.assignment, rng)
    power = good_power_update(state)
    force = _propose_force(society, strategy, winners, power, state.force, t + 1)
    record = BattleRecord(winners=winners, uniforms=uniforms, distributions=dists)
    return GoodState(winners, power, force), record
