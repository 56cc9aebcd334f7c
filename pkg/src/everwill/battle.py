"""Per-good lottery resolution shared by the three history engines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import weighted_index


@dataclass(frozen=True, eq=False)
class BattleRecord:
    """Outcome of one step's battles: winners, variates, and the odds used.

    ``uniforms[a]`` is ``None`` when the battle for good ``a`` took the
    deterministic branch (no effectiveness anywhere, incumbent retained):
    no randomness is consumed on that path.
    """

    winners: np.ndarray                     # (goods,) new owner per good
    uniforms: tuple[float | None, ...]      # per good; None on the deterministic branch
    distributions: np.ndarray               # (goods, persons) win probabilities

    def __post_init__(self):
        winners = np.asarray(self.winners, dtype=np.int64).copy()
        winners.setflags(write=False)
        object.__setattr__(self, "winners", winners)
        dists = np.asarray(self.distributions, dtype=float).copy()
        dists.setflags(write=False)
        object.__setattr__(self, "distributions", dists)

    def to_dict(self) -> dict:
        return {
            "winners": self.winners.tolist(),
            "u": list(self.uniforms),
            "dist": self.distributions.tolist(),
        }


def run_lotteries(
    distributions: np.ndarray,
    deterministic: np.ndarray,
    incumbents: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, tuple[float | None, ...]]:
    """Sample one winner per good, in ascending good order, from one stream.

    Goods flagged ``deterministic`` keep their incumbent without drawing a
    variate; all others consume exactly one uniform each.
    """
    goods = distributions.shape[0]
    winners = np.empty(goods, dtype=np.int64)
    uniforms: list[float | None] = []
    for a in range(goods):
        if deterministic[a]:
            winners[a] = incumbents[a]
            uniforms.append(None)
        else:
            u = float(rng.random())
            winners[a] = weighted_index(distributions[a], u)
            uniforms.append(u)
    return winners, tuple(uniforms)
