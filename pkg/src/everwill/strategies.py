"""Will strategies: pluggable policies that emit the next force function.

The successor laws determine everything about the next state except the
force function itself.  Strategies fill that gap: after the deterministic
update, the engine hands the strategy the observable new state (never a
future lottery outcome) and the strategy returns a force proposal, which
the engine validates against the model's feasibility rules and rejects
loudly if infeasible.

Random strategies own a dedicated RNG stream (see :mod:`everwill.rng`),
so their draws never perturb the engine's lottery stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable, ClassVar

import numpy as np

from .society import Society

if TYPE_CHECKING:  # pragma: no cover
    from .golden import CarrierRoster


@dataclass(frozen=True, eq=False)
class StrategyContext:
    """Observable state a strategy may base its proposal on.

    ``power`` is model-specific: the per-person budget vector for
    primitive runs, the triple-indexed budget table for good runs, and the
    carrier location table for golden runs.  ``prev_force`` /
    ``prev_exercised`` carry the force component of the previous state
    (``None`` when bootstrapping the initial state).
    """

    society: Society
    assignment: np.ndarray
    power: Any
    step: int
    rng: np.random.Generator | None = None
    prev_force: np.ndarray | None = None
    idle: np.ndarray | None = None                  # golden only
    roster: "CarrierRoster | None" = None           # golden only
    prev_exercised: np.ndarray | None = None        # golden only


class WillStrategy:
    """Base contract: a named, parameterized policy for one model kind."""

    kind: ClassVar[str] = ""
    name: ClassVar[str] = ""

    def __init__(self, rng: np.random.Generator | None = None):
        self.rng = rng

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"kind": self.kind, "name": self.name, "params": self.params()}

    def _stream(self) -> np.random.Generator:
        if self.rng is None:
            raise RuntimeError(f"strategy '{self.name}' needs an RNG stream but none was bound")
        return self.rng


# ---------------------------------------------------------------------------
# Primitive strategies: propose a (persons, goods) force table with
# sum over goods strictly below each person's power.
# ---------------------------------------------------------------------------


class PrimitiveStrategy(WillStrategy):
    kind = "primitive"

    def propose_force(self, ctx: StrategyContext) -> np.ndarray:
        raise NotImplementedError


class UniformSelfish(PrimitiveStrategy):
    """Spread a fraction beta of each person's power evenly over all goods."""

    name = "uniform-selfish"

    def __init__(self, beta: float = 0.5, rng: np.random.Generator | None = None):
        super().__init__(rng)
        if not 0.0 < beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {beta}")
        self.beta = beta

    def params(self) -> dict:
        return {"beta": self.beta}

    def propose_force(self, ctx: StrategyContext) -> np.ndarray:
        goods = ctx.society.estate
        return np.broadcast_to(self.beta * ctx.power[:, None] / goods, (len(ctx.power), goods)).copy()


class ProportionalGreedy(PrimitiveStrategy):
    """Weight goods by the tie strength to each good's current owner."""

    name = "proportional-greedy"

    def __init__(self, beta: float = 0.5, rng: np.random.Generator | None = None):
        super().__init__(rng)
        if not 0.0 < beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {beta}")
        self.beta = beta

    def params(self) -> dict:
        return {"beta": self.beta}

    def propose_force(self, ctx: StrategyContext) -> np.ndarray:
        weights = ctx.society.relationships[:, ctx.assignment]    # (persons, goods)
        shares = weights / weights.sum(axis=1, keepdims=True)
        return self.beta * ctx.power[:, None] * shares


class ZeroForce(PrimitiveStrategy):
    """Desire nothing; exercises every degenerate fallback in the engine."""

    name = "zero-force"

    def propose_force(self, ctx: StrategyContext) -> np.ndarray:
        return np.zeros((ctx.society.persons, ctx.society.estate))


# ---------------------------------------------------------------------------
# Good strategies: propose a (persons, goods, persons) force table with
# every entry strictly inside (0, min(power, 1)).
# ---------------------------------------------------------------------------


class GoodStrategy(WillStrategy):
    kind = "good"

    def __init__(self, gamma: float = 0.9, floor: float = 1e-9, rng: np.random.Generator | None = None):
        super().__init__(rng)
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {gamma}")
        if not 0.0 < floor < 1.0:
            raise ValueError(f"floor must be in (0, 1), got {floor}")
        self.gamma = gamma
        self.floor = floor

    def params(self) -> dict:
        return {"gamma": self.gamma, "floor": self.floor}

    def _cap(self, ctx: StrategyContext) -> np.ndarray:
        # strict upper bound for every entry is min(power, 1)
        return np.minimum(ctx.power, 1.0)

    def _trace(self, cap: np.ndarray) -> np.ndarray:
        # smallest expressible desire: strictly positive, strictly below cap
        return np.minimum(self.floor, 0.5 * self.gamma * cap)

    def propose_force(self, ctx: StrategyContext) -> np.ndarray:
        raise NotImplementedError


class SelfishGood(GoodStrategy):
    """Concentrate desire on self-ownership; trace amounts elsewhere."""

    name = "selfish"

    def propose_force(self, ctx: StrategyContext) -> np.ndarray:
        cap = self._cap(ctx)
        force = self._trace(cap)
        idx = np.arange(ctx.society.persons)
        strong = self.gamma * cap
        for a in range(ctx.society.estate):
            force[idx, a, idx] = strong[idx, a, idx]
        return force


class AltruistGood(GoodStrategy):
    """Desire that goods be owned by others; trace amounts on self."""

    name = "altruist"

    def propose_force(self, ctx: StrategyContext) -> np.ndarray:
        cap = self._cap(ctx)
        force = self.gamma * cap
        trace = self._trace(cap)
        idx = np.arange(ctx.society.persons)
        for a in range(ctx.society.estate):
            force[idx, a, idx] = trace[idx, a, idx]
        return force


class MirrorGood(GoodStrategy):
    """Desire toward y what y desired toward you last step; uniform bootstrap."""

    name = "mirror"

    def propose_force(self, ctx: StrategyContext) -> np.ndarray:
        cap = self._cap(ctx)
        if ctx.prev_force is None:
            return 0.5 * self.gamma * cap
        mirrored = ctx.prev_force.transpose(2, 1, 0)
        return np.minimum(np.maximum(mirrored, self._trace(cap)), self.gamma * cap)


# ---------------------------------------------------------------------------
# Golden strategies: propose a per-carrier exercised flag; carriers whose
# idle counter has reached its maximum must be exercised.
# ---------------------------------------------------------------------------


class GoldenStrategy(WillStrategy):
    kind = "golden"

    def _mandatory(self, ctx: StrategyContext) -> np.ndarray:
        return ctx.idle == ctx.roster.max_idle

    def propose_exercise(self, ctx: StrategyContext) -> np.ndarray:
        raise NotImplementedError


class MinimalCompliance(GoldenStrategy):
    """Exercise only carriers the mandatory rule forces."""

    name = "minimal-compliance"

    def propose_exercise(self, ctx: StrategyContext) -> np.ndarray:
        return self._mandatory(ctx)


class GreedyExercise(GoldenStrategy):
    """Exercise every held carrier every step."""

    name = "greedy"

    def propose_exercise(self, ctx: StrategyContext) -> np.ndarray:
        return np.ones(ctx.roster.count, dtype=bool)


class BernoulliExercise(GoldenStrategy):
    """Exercise each non-mandatory carrier independently with probability p."""

    name = "bernoulli"

    def __init__(self, p: float = 0.5, rng: np.random.Generator | None = None):
        super().__init__(rng)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {p}")
        self.p = p

    def params(self) -> dict:
        return {"p": self.p}

    def propose_exercise(self, ctx: StrategyContext) -> np.ndarray:
        draws = self._stream().random(ctx.roster.count) < self.p
        return self._mandatory(ctx) | draws


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_BUILTINS: tuple[type[WillStrategy], ...] = (
    UniformSelfish,
    ProportionalGreedy,
    ZeroForce,
    SelfishGood,
    AltruistGood,
    MirrorGood,
    MinimalCompliance,
    GreedyExercise,
    BernoulliExercise,
)

_REGISTRY: dict[str, dict[str, Callable[..., WillStrategy]]] = {}
for _cls in _BUILTINS:
    _REGISTRY.setdefault(_cls.kind, {})[_cls.name] = _cls


def strategy_names(kind: str) -> list[str]:
    return sorted(_REGISTRY.get(kind, {}))


def make_strategy(
    kind: str,
    name: str,
    params: dict | None = None,
    rng: np.random.Generator | None = None,
) -> WillStrategy:
    """Instantiate a registered strategy by kind and name.

    Raises ValueError for unknown names or invalid parameters, so config
    loading can reject bad selections up front.
    """
    try:
        factory = _REGISTRY[kind][name]
    except KeyError:
        known = ", ".join(strategy_names(kind)) or "none"
        raise ValueError(f"unknown {kind} strategy '{name}' (known: {known})") from None
    try:
        return factory(**(params or {}), rng=rng)
    except TypeError as exc:
        raise ValueError(f"bad parameters for strategy '{name}': {exc}") from None
