"""A minimal linear-model container: variables, constraints, objective.

This is the solver-agnostic description produced by the MILP builder and
consumed by any registered backend. It also serializes to the standard
CPLEX-style LP text format for external debugging.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import SolverError

INF = math.inf

LESS_EQUAL = "<="
GREATER_EQUAL = ">="
EQUAL = "=="
SENSES = (LESS_EQUAL, GREATER_EQUAL, EQUAL)

_NAME_RE = re.compile(r"[^A-Za-z0-9_.]")


@dataclass(frozen=True)
class Variable:
    index: int
    name: str
    lb: float
    ub: float
    integer: bool


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[int, float], ...]  # (variable index, coefficient)
    sense: str
    rhs: float


class LinearModel:
    """Mutable while building; treat as frozen once handed to a solver."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective: tuple[tuple[int, float], ...] = ()
        self.minimize = True

    def add_var(self, name: str, lb: float = 0.0, ub: float = INF,
                integer: bool = False) -> int:
        if lb > ub:
            raise SolverError(f"variable {name}: lb {lb} > ub {ub}")
        index = len(self.variables)
        self.variables.append(Variable(index, name, float(lb), float(ub), integer))
        return index

    def add_constr(self, name: str, terms, sense: str, rhs: float) -> None:
        if sense not in SENSES:
            raise SolverError(f"constraint {name}: bad sense {sense!r}")
        cleaned = tuple((int(i), float(c)) for i, c in terms if c != 0.0)
        self.constraints.append(Constraint(name, cleaned, sense, float(rhs)))

    def set_objective(self, terms, minimize: bool = True) -> None:
        self.objective = tuple((int(i), float(c)) for i, c in terms if c != 0.0)
        self.minimize = minimize

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_integer(self) -> int:
        return sum(1 for v in self.variables if v.integer)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def evaluate_objective(self, x) -> float:
        return sum(c * x[i] for i, c in self.objective)

    def merge(self, other: "LinearModel", prefix: str) -> list[int]:
        """Append another model's variables/constraints; returns the index map."""
        offset = self.num_vars
        mapping = []
        for v in other.variables:
            mapping.append(self.add_var(f"{prefix}{v.name}", v.lb, v.ub, v.integer))
        for con in other.constraints:
            self.add_constr(
                f"{prefix}{con.name}",
                [(mapping[i], c) for i, c in con.terms],
                con.sense, con.rhs,
            )
        return mapping

    # -- LP text serialization -------------------------------------------

    def _safe_names(self) -> list[str]:
        seen: set[str] = set()
        names = []
        for v in self.variables:
            base = _NAME_RE.sub("_", v.name) or f"x{v.index}"
            if base[0].isdigit():
                base = "x" + base
            name = base
            k = 1
            while name in seen:
                name = f"{base}_{k}"
                k += 1
            seen.add(name)
            names.append(name)
        return names

    @staticmethod
    def _lp_terms(terms, names: list[str]) -> str:
        if not terms:
            return "0"
        parts = []
        for i, c in terms:
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {abs(c):.17g} {names[i]}")
        joined = " ".join(parts)
        return joined[2:] if joined.startswith("+ ") else joined

    def to_lp_string(self) -> str:
        """Serialize in CPLEX LP format."""
        names = self._safe_names()
        lines = [f"\\ {self.name}", "Minimize" if self.minimize else "Maximize",
                 f" obj: {self._lp_terms(self.objective, names)}", "Subject To"]
        for k, con in enumerate(self.constraints):
            op = {LESS_EQUAL: "<=", GREATER_EQUAL: ">=", EQUAL: "="}[con.sense]
            cname = _NAME_RE.sub("_", con.name) or f"c{k}"
            lines.append(f" {cname}: {self._lp_terms(con.terms, names)} {op} {con.rhs:.17g}")
        lines.append("Bounds")
        for v, name in zip(self.variables, names):
            lo = "-inf" if v.lb == -INF else f"{v.lb:.17g}"
            hi = "+inf" if v.ub == INF else f"{v.ub:.17g}"
            lines.append(f" {lo} <= {name} <= {hi}")
        binaries = [n for v, n in zip(self.variables, names)
                    if v.integer and v.lb == 0.0 and v.ub == 1.0]
        generals = [n for v, n in zip(self.variables, names)
                    if v.integer and not (v.lb == 0.0 and v.ub == 1.0)]
        if binaries:
            lines.append("Binary")
            lines.append(" " + " ".join(binaries))
        if generals:
            lines.append("General")
            lines.append(" " + " ".join(generals))
        lines.append("End")
        return "\n".join(lines) + "\n"
