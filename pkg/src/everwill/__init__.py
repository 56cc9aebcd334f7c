"""Simulator for everlasting societies.

A fixed set of persons and indestructible goods evolves through per-good
lottery battles driven by expressed desire.  Three models are provided:

* **primitive**: persons desire goods for themselves; winners pay their
  committed force and losers share the payment.
* **good**: desire is triple-indexed (x wants a owned by y); power moves
  by exactly antisymmetric pairwise exchanges.
* **golden**: desire is carried by tokens whose exercise is reciprocated
  by law within a bounded number of steps, which the audit machine-checks.

Each model's successor law fixes everything except the next force
function; pluggable will strategies fill that gap.
"""

__version__ = "0.1.0"

from .battle import BattleRecord
from .config import RunConfig, load_config
from .errors import (
    AuditInputError,
    ConfigError,
    EverwillError,
    StrategyViolation,
    StructuralError,
)
from .golden import (
    CarrierRoster,
    ForceCarrier,
    GoldenState,
    ReciprocityReport,
    extended_tables,
    golden_effectiveness,
    golden_step,
    golden_win_distribution,
    reciprocity_audit,
)
from .good import (
    GoodState,
    good_effectiveness,
    good_step,
    good_win_distribution,
)
from .harness import MetricsReport, gini_coefficient, run_history
from .invariants import InvariantReport, check_invariants
from .logio import HistoryLog, read_log
from .primitive import (
    PrimitiveState,
    primitive_effectiveness,
    primitive_step,
    primitive_step_single,
    primitive_win_distribution,
)
from .rng import derive_seed, derive_stream, weighted_index
from .society import (
    RelationshipReport,
    Society,
    generate_relationships,
    validate_relationships,
)
from .strategies import StrategyContext, WillStrategy, make_strategy, strategy_names

__all__ = [
    "__version__",
    "AuditInputError",
    "BattleRecord",
    "CarrierRoster",
    "ConfigError",
    "EverwillError",
    "ForceCarrier",
    "GoldenState",
    "GoodState",
    "HistoryLog",
    "InvariantReport",
    "MetricsReport",
    "PrimitiveState",
    "ReciprocityReport",
    "RelationshipReport",
    "RunConfig",
    "Society",
    "StrategyContext",
    "StrategyViolation",
    "StructuralError",
    "WillStrategy",
    "check_invariants",
    "derive_seed",
    "derive_stream",
    "extended_tables",
    "generate_relationships",
    "gini_coefficient",
    "golden_effectiveness",
    "golden_step",
    "golden_win_distribution",
    "good_effectiveness",
    "good_step",
    "good_win_distribution",
    "load_config",
    "make_strategy",
    "primitive_effectiveness",
    "primitive_step",
    "primitive_step_single",
    "primitive_win_distribution",
    "read_log",
    "reciprocity_audit",
    "run_history",
    "strategy_names",
    "validate_relationships",
    "weighted_index",
]
