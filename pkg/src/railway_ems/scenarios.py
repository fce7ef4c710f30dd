"""Scenarios: one day's exogenous profiles plus a probability.

A ScenarioSet is a plain ordered collection; cross-scenario invariants
(probability mass, shared grid) are checked by `validate_scenario_set`,
which reports violations as data rather than raising, so the CLI can
list every problem in one pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError
from .profiles import Profile, ingest_profile
from .timegrid import TimeGrid

PROB_SUM_TOL = 1e-9

# canonical file names inside a scenario directory
SCENARIO_FILES = {
    "train_demand": ("train_demand.csv", "demand"),
    "rb_available": ("rb_available.csv", "rb"),
    "radiation": ("radiation.csv", "radiation"),
    "buy_price": ("price.csv", "price"),
}
SELL_PRICE_FILE = "sell_price.csv"
META_FILE = "scenario.meta"


@dataclass(frozen=True)
class Scenario:
    """One daily realization of demand, braking power, radiation, and prices."""

    id: str
    probability: float
    train_demand: Profile
    rb_available: Profile
    radiation: Profile
    buy_price: Profile
    sell_price: Profile

    def __post_init__(self):
        if not (0.0 < self.probability <= 1.0):
            raise DataError(
                f"scenario {self.id!r}: probability must be in (0, 1], got {self.probability}"
            )
        grid = self.train_demand.grid
        for name in ("rb_available", "radiation", "buy_price", "sell_price"):
            if getattr(self, name).grid != grid:
                raise DataError(f"scenario {self.id!r}: profile {name} is on a different grid")

    @property
    def grid(self) -> TimeGrid:
        return self.train_demand.grid


@dataclass(frozen=True)
class ScenarioSet:
    """Ordered, immutable collection of scenarios."""

    scenarios: tuple[Scenario, ...]

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))

    def __iter__(self):
        return iter(self.scenarios)

    def __len__(self) -> int:
        return len(self.scenarios)

    def __getitem__(self, i) -> Scenario:
        return self.scenarios[i]

    @property
    def grid(self) -> TimeGrid:
        if not self.scenarios:
            raise DataError("empty scenario set has no grid")
        return self.scenarios[0].grid

    def peak_train_demand_kw(self) -> float:
        return max(float(s.train_demand.values.max()) for s in self.scenarios)


@dataclass(frozen=True)
class Violation:
    """One validation finding; `where` names the scenario or set-level scope."""

    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


def validate_scenario_set(scenario_set: ScenarioSet) -> list[Violation]:
    """Check cross-scenario invariants. Empty list means the set is valid."""
    violations: list[Violation] = []
    scenarios = scenario_set.scenarios
    if not scenarios:
        return [Violation("set", "scenario set is empty")]

    total = sum(s.probability for s in scenarios)
    if abs(total - 1.0) > PROB_SUM_TOL:
        violations.append(
            Violation("set", f"scenario probabilities sum to {total!r}, expected 1.0")
        )

    seen: set[str] = set()
    for s in scenarios:
        if s.id in seen:
            violations.append(Violation(s.id, "duplicate scenario id"))
        seen.add(s.id)

    grid = scenarios[0].grid
    for s in scenarios[1:]:
        if s.grid != grid:
            violations.append(
                Violation(s.id, f"grid differs from {scenarios[0].id!r} "
                                f"({s.grid.steps}x{s.grid.dt_hours}h vs {grid.steps}x{grid.dt_hours}h)")
            )
    return violations


def _read_meta(directory: Path) -> dict:
    meta_path = directory / META_FILE
    if not meta_path.exists():
        return {}
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{meta_path}: invalid JSON ({exc})") from exc
    if not isinstance(meta, dict):
        raise DataError(f"{meta_path}: expected a JSON object")
    return meta


def load_scenario_dir(directory: str | Path, grid: TimeGrid,
                      probability: float | None = None) -> Scenario:
    """Load one scenario directory (four profile CSVs plus scenario.meta)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"scenario directory not found: {directory}")
    meta = _read_meta(directory)
    scenario_id = str(meta.get("id", directory.name))
    if probability is None:
        probability = meta.get("probability")
    if probability is None:
        raise DataError(f"{directory}: no probability given and none in {META_FILE}")

    profiles = {}
    for key, (filename, kind) in SCENARIO_FILES.items():
        profiles[key] = ingest_profile(directory / filename, kind, grid)
    sell_path = directory / SELL_PRICE_FILE
    if sell_path.exists():
        sell = ingest_profile(sell_path, "price", grid)
    else:
        sell = profiles["buy_price"]

    return Scenario(
        id=scenario_id,
        probability=float(probability),
        train_demand=profiles["train_demand"],
        rb_available=profiles["rb_available"],
        radiation=profiles["radiation"],
        buy_price=profiles["buy_price"],
        sell_price=sell,
    )


def load_scenario_set(root: str | Path, grid: TimeGrid) -> ScenarioSet:
    """Load every scenario subdirectory under `root`, in name order.

    Probabilities come from each scenario.meta; scenarios without one
    share the remaining probability mass equally.
    """
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"scenario root not found: {root}")
    subdirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not subdirs:
        raise DataError(f"{root}: contains no scenario subdirectories")

    metas = [_read_meta(d) for d in subdirs]
    given = [m.get("probability") for m in metas]
    specified_mass = sum(p for p in given if p is not None)
    n_missing = sum(1 for p in given if p is None)
    if n_missing:
        remaining = 1.0 - specified_mass
        if remaining <= 0:
            raise DataError(
                f"{root}: specified probabilities already sum to {specified_mass}; "
                f"nothing left for {n_missing} scenario(s) without one"
            )
        fill = remaining / n_missing
        given = [fill if p is None else p for p in given]

    scenarios = [
        load_scenario_dir(d, grid, probability=p) for d, p in zip(subdirs, given)
    ]
    return ScenarioSet(scenarios=tuple(scenarios))
