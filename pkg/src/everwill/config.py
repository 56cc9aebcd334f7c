"""Run configuration: JSON schema, validation, round-trip serialization.

A config selects a model kind, a society source, an initial state, a
strategy, a step count, and a seed.  Loading validates everything it can
up front and reports every problem found, not just the first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .strategies import strategy_names

FORMAT_VERSION = 1

MODELS = ("primitive", "good", "golden")

_TOP_KEYS = {"format_version", "model", "society", "initial", "strategy", "steps", "seed", "log", "audit"}
_SOCIETY_KEYS = {"generate", "inline", "file"}


@dataclass(frozen=True)
class RunConfig:
    """Fully-resolved run description; serializes losslessly to JSON."""

    model: str
    society: dict
    initial: dict
    strategy: dict
    steps: int
    seed: int
    log: dict = field(default_factory=lambda: {"snapshot_interval": 1, "dir": None})
    audit: bool = False

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "model": self.model,
            "society": self.society,
            "initial": self.initial,
            "strategy": self.strategy,
            "steps": self.steps,
            "seed": self.seed,
            "log": self.log,
            "audit": self.audit,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _check_society(source, errors: list[str]) -> None:
    if not isinstance(source, dict):
        errors.append("society: must be an object with one of " + ", ".join(sorted(_SOCIETY_KEYS)))
        return
    keys = set(source) & _SOCIETY_KEYS
    if len(keys) != 1 or set(source) - _SOCIETY_KEYS:
        errors.append(f"society: exactly one of {sorted(_SOCIETY_KEYS)} required, got {sorted(source)}")
        return
    if "generate" in source:
        gen = source["generate"]
        if not isinstance(gen, dict):
            errors.append("society.generate: must be an object")
            return
        persons, goods = gen.get("persons"), gen.get("goods")
        if not isinstance(persons, int) or persons < 1:
            errors.append(f"society.generate.persons: must be an integer >= 1, got {persons!r}")
        if not isinstance(goods, int) or goods < 1:
            errors.append(f"society.generate.goods: must be an integer >= 1, got {goods!r}")
        eps = gen.get("eps", 0.05)
        if not isinstance(eps, (int, float)) or not 0.0 < eps <= 0.3:
            errors.append(f"society.generate.eps: must be in (0, 0.3], got {eps!r}")
    elif "inline" in source:
        doc = source["inline"]
        if not isinstance(doc, dict) or {"persons", "estate", "relationships"} - set(doc):
            errors.append("society.inline: needs persons, estate, and relationships")
    else:
        path = source["file"]
        if not isinstance(path, str):
            errors.append("society.file: must be a path string")
        elif not Path(path).is_file():
            errors.append(f"society.file: no such file: {path}")


def _check_strategy(model: str, strategy, errors: list[str]) -> None:
    if not isinstance(strategy, dict) or "name" not in strategy:
        errors.append("strategy: must be an object with a name")
        return
    name = strategy["name"]
    params = strategy.get("params", {})
    if not isinstance(params, dict):
        errors.append("strategy.params: must be an object")
        return
    if model in MODELS:
        from .strategies import make_strategy

        try:
            make_strategy(model, name, params)
        except ValueError as exc:
            errors.append(f"strategy: {exc}")


def _check_initial(model: str, initial, errors: list[str]) -> None:
    if not isinstance(initial, dict):
        errors.append("initial: must be an object")
        return
    if model == "golden":
        carriers = initial.get("carriers")
        if not isinstance(carriers, dict):
            errors.append("initial.carriers: golden runs must describe the carrier roster")
            return
        count = carriers.get("count")
        if not isinstance(count, int) or count < 1:
            errors.append(f"initial.carriers.count: must be an integer >= 1, got {count!r}")


def _normalize(raw: dict) -> tuple[dict, list[str]]:
    errors: list[str] = []
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        errors.append(f"unknown top-level keys: {sorted(unknown)}")

    version = raw.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        errors.append(f"format_version: expected {FORMAT_VERSION}, got {version!r}")

    model = raw.get("model")
    if model not in MODELS:
        errors.append(f"model: must be one of {', '.join(MODELS)}, got {model!r}")

    steps = raw.get("steps")
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
        errors.append(f"steps: must be an integer >= 1, got {steps!r}")

    seed = raw.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool):
        errors.append(f"seed: must be an integer, got {seed!r}")

    _check_society(raw.get("society"), errors)

    strategy = raw.get("strategy")
    if model in MODELS:
        _check_strategy(model, strategy, errors)
    elif not isinstance(strategy, dict):
        errors.append("strategy: must be an object with a name")

    initial = raw.get("initial", {})
    _check_initial(model, initial, errors)

    audit = raw.get("audit", False)
    if not isinstance(audit, bool):
        errors.append(f"audit: must be a boolean, got {audit!r}")
        audit = False

    log = raw.get("log", {})
    if not isinstance(log, dict):
        errors.append("log: must be an object")
        log = {}
    interval = log.get("snapshot_interval", 1)
    if not isinstance(interval, int) or interval < 0:
        errors.append(f"log.snapshot_interval: must be an integer >= 0, got {interval!r}")
        interval = 1
    out_dir = log.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        errors.append(f"log.dir: must be a path string or null, got {out_dir!r}")
        out_dir = None
    if audit:
        interval = 1    # the invariant audit needs a snapshot at every step

    normalized = {
        "model": model,
        "society": raw.get("society"),
        "initial": initial,
        "strategy": strategy if isinstance(strategy, dict) else {"name": None, "params": {}},
        "steps": steps,
        "seed": seed,
        "log": {"snapshot_interval": interval, "dir": out_dir},
        "audit": audit,
    }
    return normalized, errors


def load_config(source: str | Path | dict) -> RunConfig:
    """Load and validate a run config from a dict, JSON text, or a file path.

    Raises :class:`ConfigError` carrying every validation error found;
    unreadable files and malformed JSON raise their usual exceptions.
    """
    if isinstance(source, dict):
        raw = source
    else:
        text = str(source)
        if isinstance(source, Path) or not text.lstrip().startswith("{"):
            text = Path(source).read_text(encoding="utf-8")
        raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ConfigError(["config document must be a JSON object"])

    normalized, errors = _normalize(raw)
    if errors:
        raise ConfigError(errors)
    strategy = dict(normalized["strategy"])
    strategy.setdefault("params", {})
    return RunConfig(
        model=normalized["model"],
        society=normalized["society"],
        initial=normalized["initial"],
        strategy=strategy,
        steps=normalized["steps"],
        seed=normalized["seed"],
        log=normalized["log"],
        audit=normalized["audit"],
    )


__all__ = ["FORMAT_VERSION", "MODELS", "RunConfig", "load_config", "strategy_names"]
