"""Static society model: persons, goods, and the relationship table.

Persons and goods are dense integer indices (``0..persons-1`` and
``0..estate-1``).  A society couples a person count, a good count, and a
symmetric relationship table whose entries measure tie strength:

* every person relates to itself with strength exactly 1;
* distinct persons relate with strength strictly between 0 and 1;
* the table is symmetric;
* ``r(x, z) + r(z, y) <= 1 + r(x, y)`` for every triple, which is the
  triangle inequality for the distance ``1 - r``.

Societies are immutable after construction and are shared read-only by
all three history engines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import StructuralError
from .rng import derive_seed

#: Closed-form axiom checks (diagonal, symmetry, triangle) tolerate this
#: much rounding before a violation is reported.  The strict open-interval
#: bound is checked exactly.
AXIOM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AxiomViolation:
    """One violated relationship axiom with its witnessing indices."""

    axiom: str                  # "diagonal" | "interval" | "symmetry" | "triangle"
    indices: tuple[int, ...]    # (x,), (x, y), or (x, y, z)
    detail: str


@dataclass(frozen=True)
class RelationshipReport:
    ok: bool
    violations: tuple[AxiomViolation, ...]


def validate_relationships(table, tolerance: float = AXIOM_TOLERANCE) -> RelationshipReport:
    """Check every relationship axiom, reporting all violations found.

    Structural problems (non-square table, non-finite entries) raise
    :class:`StructuralError`; axiom violations are collected in the report
    with the witnessing indices.
    """
    values = np.asarray(table, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] == 0:
        raise StructuralError(f"relationship table must be square and non-empty, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise StructuralError(f"relationship table has non-finite entry at ({bad[0]}, {bad[1]})")

    n = values.shape[0]
    violations: list[AxiomViolation] = []

    diag = np.diagonal(values)
    for x in np.nonzero(np.abs(diag - 1.0) > tolerance)[0]:
        violations.append(AxiomViolation("diagonal", (int(x),), f"r({x},{x}) = {diag[x]!r} != 1"))

    off = ~np.eye(n, dtype=bool)
    bad_interval = off & ((values <= 0.0) | (values >= 1.0))
    for x, y in np.argwhere(bad_interval):
        violations.append(
            AxiomViolation("interval", (int(x), int(y)), f"r({x},{y}) = {values[x, y]!r} outside (0, 1)")
        )

    asym = np.abs(values - values.T) > tolerance
    for x, y in np.argwhere(np.triu(asym, k=1)):
        violations.append(
            AxiomViolation(
                "symmetry", (int(x), int(y)), f"r({x},{y}) = {values[x, y]!r} != r({y},{x}) = {values[y, x]!r}"
            )
        )

    # excess[x, y, z] = r(x, z) + r(z, y) - 1 - r(x, y)
    excess = values[:, None, :] + values.T[None, :, :] - 1.0 - values[:, :, None]
    for x, y, z in np.argwhere(excess > tolerance):
        violations.append(
            AxiomViolation(
                "triangle",
                (int(x), int(y), int(z)),
                f"r({x},{z}) + r({z},{y}) = {values[x, z] + values[z, y]!r} > 1 + r({x},{y}) = {1.0 + values[x, y]!r}",
            )
        )

    return RelationshipReport(ok=not violations, violations=tuple(violations))


def generate_relationships(count: int, seed: int, eps: float = 0.05) -> np.ndarray:
    """Generate a valid relationship table, deterministic in (count, seed, eps).

    Persons are embedded as random points in the plane and tie strength is
    ``1 - distance`` after the pairwise distances are remapped into a band
    strictly inside ``(eps, 1 - eps)``.  The remap is an affine
    ``a * d + b`` with ``a > 0`` and ``b >= 0``, both of which preserve the
    triangle inequality, so the returned table satisfies every axiom by
    construction.  ``eps`` controls how far values stay from 0 and 1.
    """
    if count < 1:
        raise ValueError(f"person count must be >= 1, got {count}")
    if not 0.0 < eps <= 0.3:
        raise ValueError(f"eps must be in (0, 0.3], got {eps}")
    if count == 1:
        return np.array([[1.0]])

    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, f"relationships:{count}")))
    points = rng.random((count, 2))
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diffs**2).sum(axis=2))

    upper = np.triu_indices(count, k=1)
    off = dist[upper]
    lo = eps + eps / 4.0
    hi = 1.0 - eps - eps / 4.0
    dmin, dmax = float(off.min()), float(off.max())
    if dmax - dmin < 1e-12:
        scaled = np.full_like(off, (lo + hi) / 2.0)
    elif dmin * hi <= lo * dmax:
        a = (hi - lo) / (dmax - dmin)
        b = max(lo - a * dmin, 0.0)
        scaled = a * off + b
    else:
        # Nearly-equidistant points: pure scaling already lands above lo.
        scaled = (hi / dmax) * off

    table = np.ones((count, count))
    table[upper] = 1.0 - scaled
    table[(upper[1], upper[0])] = 1.0 - scaled
    return table


@dataclass(frozen=True, eq=False)
class Society:
    """A fixed set of persons and goods with an immutable relationship table."""

    persons: int
    estate: int
    relationships: np.ndarray

    def __post_init__(self):
        if self.persons < 1:
            raise ValueError(f"society needs at least one person, got {self.persons}")
        if self.estate < 1:
            raise ValueError(f"society needs at least one good, got {self.estate}")
        table = np.array(self.relationships, dtype=float)
        if table.shape != (self.persons, self.persons):
            raise StructuralError(
                f"relationship table shape {table.shape} does not match person count {self.persons}"
            )
        table.setflags(write=False)
        object.__setattr__(self, "relationships", table)

    @classmethod
    def generated(cls, persons: int, estate: int, seed: int, eps: float = 0.05) -> "Society":
        return cls(persons, estate, generate_relationships(persons, seed, eps))

    def relationship(self, x: int, y: int) -> float:
        """Tie strength between persons x and y (symmetric, 1 on the diagonal)."""
        if not (0 <= x < self.persons and 0 <= y < self.persons):
            raise ValueError(f"person id out of range: ({x}, {y}) with {self.persons} persons")
        return float(self.relationships[x, y])

    def to_dict(self) -> dict:
        return {
            "persons": self.persons,
            "estate": self.estate,
            "relationships": self.relationships.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Society":
        """Build a society from its JSON form, rejecting invalid tables."""
        if not isinstance(data, dict):
            raise StructuralError("society document must be a JSON object")
        missing = {"persons", "estate", "relationships"} - set(data)
        if missing:
            raise StructuralError(f"society document missing keys: {sorted(missing)}")
        persons, estate = data["persons"], data["estate"]
        if not isinstance(persons, int) or not isinstance(estate, int):
            raise StructuralError("persons and estate must be integers")
        report = validate_relationships(data["relationships"])
        if not report.ok:
            first = ", ".join(
                f"{v.axiom}{v.indices}" for v in report.violations[:5]
            )
            raise StructuralError(
                f"relationship table violates {len(report.violations)} axiom check(s): {first}"
            )
        return cls(persons, estate, np.asarray(data["relationships"], dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Society":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "Society":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")
