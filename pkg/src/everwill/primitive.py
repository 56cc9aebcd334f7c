"""Primitive-history engine.

Each step runs one lottery per good, weighted by effectiveness (committed
force discounted by the tie to the current owner).  The winner of a good
pays the force it committed to that good; every loser receives a share of
that payment proportional to its own effectiveness.  Total power is
conserved by every step, including the degenerate fallbacks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .battle import BattleRecord, run_lotteries
from .errors import StrategyViolation, StructuralError
from .society import Society
from .strategies import PrimitiveStrategy, StrategyContext

CONSERVATION_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class PrimitiveState:
    """One step of a primitive history: assignment, power, committed force."""

    assignment: np.ndarray      # (goods,) owner per good
    power: np.ndarray           # (persons,) strictly positive budgets
    force: np.ndarray           # (persons, goods) non-negative commitments

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
            "power": self.power.tolist(),
            "force": self.force.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PrimitiveState":
        return cls(data["assignment"], data["power"], data["force"])


def primitive_state_problems(society: Society, state: PrimitiveState) -> list[str]:
    """All ways the state fails the primitive validity conditions."""
    problems: list[str] = []
    n, m = society.persons, society.estate
    if state.assignment.shape != (m,):
        return [f"assignment shape {state.assignment.shape} != ({m},)"]
    if state.power.shape != (n,):
        return [f"power shape {state.power.shape} != ({n},)"]
    if state.force.shape != (n, m):
        return [f"force shape {state.force.shape} != ({n}, {m})"]
    if not np.all((state.assignment >= 0) & (state.assignment < n)):
        problems.append("assignment maps a good to a non-person")
    if not np.all(np.isfinite(state.power)) or not np.all(np.isfinite(state.force)):
        problems.append("non-finite power or force entries")
        return problems
    for x in np.nonzero(state.power <= 0.0)[0]:
        problems.append(f"power of person {x} is {state.power[x]!r}, must be > 0")
    for x, a in np.argwhere(state.force < 0.0):
        problems.append(f"force[{x}][{a}] = {state.force[x, a]!r} is negative")
    committed = state.force.sum(axis=1)
    for x in np.nonzero(committed >= state.power)[0]:
        problems.append(
            f"person {x} commits total force {committed[x]!r} >= power {state.power[x]!r}"
        )
    return problems


def validate_primitive_state(society: Society, state: PrimitiveState) -> None:
    problems = primitive_state_problems(society, state)
    if problems:
        raise StructuralError("; ".join(problems))


def effectiveness_matrix(society: Society, state: PrimitiveState) -> np.ndarray:
    """(persons, goods) table: force discounted by the tie to each owner."""
    return state.force * society.relationships[:, state.assignment]


def primitive_effectiveness(society: Society, state: PrimitiveState, x: int, a: int) -> float:
    if not (0 <= x < society.persons and 0 <= a < society.estate):
        raise ValueError(f"index out of range: person {x}, good {a}")
    owner = int(state.assignment[a])
    return float(state.force[x, a] * society.relationships[x, owner])


def _win_table(society: Society, state: PrimitiveState) -> tuple[np.ndarray, np.ndarray]:
    """Per-good win distributions plus flags for the deterministic branch."""
    psi = effectiveness_matrix(society, state)
    goods = society.estate
    dists = np.empty((goods, society.persons))
    deterministic = np.zeros(goods, dtype=bool)
    for a in range(goods):
        total = psi[:, a].sum()
        if total > 0.0:
            dists[a] = psi[:, a] / total
        else:
            dists[a] = 0.0
            dists[a, state.assignment[a]] = 1.0
            deterministic[a] = True
    return dists, deterministic


def primitive_win_distribution(society: Society, state: PrimitiveState, a: int) -> np.ndarray:
    """Win probability per person for good ``a``.

    When nobody has positive effectiveness on the good, the incumbent
    owner retains it with probability 1.
    """
    if not 0 <= a < society.estate:
        raise ValueError(f"good {a} out of range")
    psi = effectiveness_matrix(society, state)
    column = psi[:, a]
    total = column.sum()
    if total > 0.0:
        return column / total
    dist = np.zeros(society.persons)
    dist[state.assignment[a]] = 1.0
    return dist


def primitive_power_update(society: Society, state: PrimitiveState, winners: np.ndarray) -> np.ndarray:
    """Deterministic power law: winners pay their committed force, losers
    split each payment in proportion to effectiveness.

    Fallbacks: if the winner was the only person with positive
    effectiveness on a good, its payment is split uniformly among the
    other persons; a lone person pays nothing.
    """
    psi = effectiveness_matrix(society, state)
    n = society.persons
    pay = np.zeros(n)
    gain = np.zeros(n)
    for a in range(society.estate):
        if n == 1:
            continue
        w = int(winners[a])
        payment = state.force[w, a]
        pay[w] += payment
        rest = psi[:, a].sum() - psi[w, a]
        others = np.ones(n, dtype=bool)
        others[w] = False
        if rest > 0.0:
            gain[others] += payment * psi[others, a] / rest
        else:
            gain[others] += payment / (n - 1)
    return state.power - pay + gain


def _propose_force(
    society: Society,
    strategy: PrimitiveStrategy,
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
    if force.shape != (society.persons, society.estate):
        raise StrategyViolation(
            f"strategy '{strategy.name}' returned force shape {force.shape}, "
            f"expected {(society.persons, society.estate)}"
        )
    if not np.all(np.isfinite(force)):
        raise StrategyViolation(f"strategy '{strategy.name}' returned non-finite force")
    negative = np.argwhere(force < 0.0)
    if len(negative):
        x, a = negative[0]
        raise StrategyViolation(
            f"strategy '{strategy.name}' proposed negative force for person {x} on good {a}",
            person=int(x),
        )
    committed = force.sum(axis=1)
    over = np.nonzero(committed >= power)[0]
    if len(over):
        x = int(over[0])
        raise StrategyViolation(
            f"strategy '{strategy.name}' proposed total force {committed[x]!r} "
            f">= power {power[x]!r} for person {x}",
            person=x,
        )
    return force


def bootstrap_force(
    society: Society,
    strategy: PrimitiveStrategy,
    assignment: np.ndarray,
    power: np.ndarray,
) -> np.ndarray:
    """Ask the strategy for the initial force table, validated."""
    return _propose_force(society, strategy, assignment, power, None, 0)


def primitive_step(
    society: Society,
    state: PrimitiveState,
    strategy: PrimitiveStrategy,
    rng: np.random.Generator,
    *,
    t: int = 0,
) -> tuple[PrimitiveState, BattleRecord]:
    """One successor transition: battles, power law, then the strategy's
    next force, validated against the new budgets."""
    dists, deterministic = _win_table(society, state)
    winners, uniforms = run_lotteries(dists, deterministic, state.assignment, rng)
    power = primitive_power_update(society, state, winners)
    force = _propose_force(society, strategy, winners, power, state.force, t + 1)
    record = BattleRecord(winners=winners, uniforms=uniforms, distributions=dists)
    return PrimitiveState(winners, power, force), record


def primitive_step_single(
    society: Society,
    state: PrimitiveState,
    strategy: PrimitiveStrategy,
    rng: np.random.Generator,
    *,
    t: int = 0,
) -> tuple[PrimitiveState, BattleRecord]:
    """Single-good successor law, kept as a separate entry point to
    cross-check the general update on singleton estates."""
    if society.estate != 1:
        raise ValueError(f"single-good step requires exactly one good, estate has {society.estate}")
    psi = effectiveness_matrix(society, state)[:, 0]
    n = society.persons
    total = psi.sum()
    dist = np.zeros(n)
    if total > 0.0:
        dist = psi / total
        deterministic = np.zeros(1, dtype=bool)
    else:
        dist[state.assignment[0]] = 1.0
        deterministic = np.ones(1, dtype=bool)
    winners, uniforms = run_lotteries(dist[None, :], deterministic, state.assignment, rng)
    w = int(winners[0])

    power = state.power.copy()
    if n > 1:
        payment = state.force[w, 0]
        power[w] = state.power[w] - payment
        rest = psi.sum() - psi[w]
        others = np.ones(n, dtype=bool)
        others[w] = False
        if rest > 0.0:
            power[others] = state.power[others] + payment * psi[others] / rest
        else:
            power[others] = state.power[others] + payment / (n - 1)

    force = _propose_force(society, strategy, winners, power, state.force, t + 1)
    record = BattleRecord(winners=winners, uniforms=uniforms, distributions=dist[None, :])
    return PrimitiveState(winners, power, force), record
