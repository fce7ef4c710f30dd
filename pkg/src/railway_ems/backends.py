"""Pluggable LP/MILP solver backends.

A backend is a build-and-solve object: add variables and constraints,
set the objective, optimize, then query values. `solve_model` replays a
LinearModel into a fresh backend instance, so any engine implementing
the interface plugs in. Backends are selected by name through the
registry; the EMS_SOLVER environment variable overrides the default.
Backend instances are single-use and not thread-safe; concurrent solves
must use separate instances.
"""

from __future__ import annotations

import enum
import math
import os
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .errors import SolverError
from .linmodel import EQUAL, GREATER_EQUAL, INF, LESS_EQUAL, LinearModel

DEFAULT_BACKEND = "scipy-highs"
ENV_VAR = "EMS_SOLVER"


class Status(enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE_GAP = "feasible-gap"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ERROR = "error"


@dataclass
class SolveResult:
    status: Status
    x: np.ndarray | None
    objective: float | None
    gap: float
    message: str = ""


class SolverBackend(ABC):
    """Incremental model construction plus optimize/query."""

    name = "abstract"

    @abstractmethod
    def add_variable(self, lb: float = 0.0, ub: float = INF,
                     integer: bool = False, name: str = "") -> int:
        ...

    @abstractmethod
    def add_constraint(self, terms, sense: str, rhs: float, name: str = "") -> None:
        ...

    @abstractmethod
    def set_objective(self, terms, minimize: bool = True) -> None:
        ...

    @abstractmethod
    def optimize(self, gap_tol: float = 1e-6, time_limit_s: float = 60.0) -> Status:
        ...

    @abstractmethod
    def variable_value(self, index: int) -> float:
        ...

    @abstractmethod
    def objective_value(self) -> float:
        ...

    def mip_gap(self) -> float:
        return 0.0

    def solution_vector(self, n: int) -> np.ndarray:
        return np.array([self.variable_value(i) for i in range(n)])


class _ArrayBackend(SolverBackend):
    """Shared accumulation of bounds/constraints into array form."""

    def __init__(self):
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._integer: list[bool] = []
        self._rows: list[tuple[tuple[int, float], ...]] = []
        self._row_lb: list[float] = []
        self._row_ub: list[float] = []
        self._obj: dict[int, float] = {}
        self._minimize = True
        self._x: np.ndarray | None = None
        self._objective: float | None = None
        self._gap = 0.0

    def add_variable(self, lb=0.0, ub=INF, integer=False, name="") -> int:
        self._lb.append(float(lb))
        self._ub.append(float(ub))
        self._integer.append(bool(integer))
        return len(self._lb) - 1

    def add_constraint(self, terms, sense, rhs, name="") -> None:
        rhs = float(rhs)
        if sense == LESS_EQUAL:
            lo, hi = -INF, rhs
        elif sense == GREATER_EQUAL:
            lo, hi = rhs, INF
        elif sense == EQUAL:
            lo, hi = rhs, rhs
        else:
            raise SolverError(f"bad constraint sense {sense!r}")
        self._rows.append(tuple((int(i), float(c)) for i, c in terms))
        self._row_lb.append(lo)
        self._row_ub.append(hi)

    def set_objective(self, terms, minimize=True) -> None:
        self._obj = {int(i): float(c) for i, c in terms}
        self._minimize = minimize

    def variable_value(self, index: int) -> float:
        if self._x is None:
            raise SolverError("no solution available")
        return float(self._x[index])

    def objective_value(self) -> float:
        if self._objective is None:
            raise SolverError("no solution available")
        return self._objective

    def mip_gap(self) -> float:
        return self._gap

    def _arrays(self):
        n = len(self._lb)
        c = np.zeros(n)
        for i, coef in self._obj.items():
            c[i] = coef
        if not self._minimize:
            c = -c
        data, rows, cols = [], [], []
        for r, terms in enumerate(self._rows):
            for i, coef in terms:
                rows.append(r)
                cols.append(i)
                data.append(coef)
        a = sp.csr_matrix((data, (rows, cols)), shape=(len(self._rows), n))
        return c, a, np.array(self._row_lb), np.array(self._row_ub)


class ScipyHighsBackend(_ArrayBackend):
    """HiGHS via scipy.optimize.milp (LPs are MILPs with no integers)."""

    name = "scipy-highs"

    def optimize(self, gap_tol=1e-6, time_limit_s=60.0) -> Status:
        c, a, row_lb, row_ub = self._arrays()
        n = len(self._lb)
        constraints = [LinearConstraint(a, row_lb, row_ub)] if a.shape[0] else []
        res = milp(
            c=c,
            integrality=np.array(self._integer, dtype=int),
            bounds=Bounds(np.array(self._lb), np.array(self._ub)),
            constraints=constraints,
            options={"presolve": True, "mip_rel_gap": gap_tol,
                     "time_limit": time_limit_s},
        )
        if res.status == 0:
            self._x = np.asarray(res.x)
            self._objective = float(res.fun) * (1 if self._minimize else -1)
            self._gap = float(getattr(res, "mip_gap", 0.0) or 0.0)
            return Status.OPTIMAL
        if res.status == 1 and res.x is not None:
            self._x = np.asarray(res.x)
            self._objective = float(res.fun) * (1 if self._minimize else -1)
            self._gap = float(getattr(res, "mip_gap", math.inf) or math.inf)
            return Status.FEASIBLE_GAP
        if res.status == 2:
            return Status.INFEASIBLE
        if res.status == 3:
            return Status.UNBOUNDED
        raise SolverError(f"HiGHS failed: {res.message}")


class BranchBoundBackend(_ArrayBackend):
    """Reference MILP solver: depth-first branch and bound over HiGHS LPs.

    Intended for small models (cross-checks, backend-interface tests);
    refuses more than 24 integer variables.
    """

    name = "reference-bb"
    max_integers = 24

    def optimize(self, gap_tol=1e-6, time_limit_s=60.0) -> Status:
        c, a, row_lb, row_ub = self._arrays()
        n = len(self._lb)
        int_idx = np.flatnonzero(np.array(self._integer, dtype=bool))
        if len(int_idx) > self.max_integers:
            raise SolverError(
                f"{self.name} handles at most {self.max_integers} integer variables, "
                f"got {len(int_idx)}"
            )
        finite_rows = np.isfinite(row_ub)
        a_ub = sp.vstack([a[finite_rows], -a[np.isfinite(row_lb)]]) if a.shape[0] else None
        b_ub = (np.concatenate([row_ub[finite_rows], -row_lb[np.isfinite(row_lb)]])
                if a.shape[0] else None)

        deadline = time.monotonic() + time_limit_s
        best_x: np.ndarray | None = None
        best_obj = math.inf
        timed_out = False
        unbounded = False
        stack = [(np.array(self._lb), np.array(self._ub))]

        while stack:
            if time.monotonic() > deadline:
                timed_out = True
                break
            lb, ub = stack.pop()
            if np.any(lb > ub):
                continue
            res = linprog(c, A_ub=a_ub, b_ub=b_ub,
                          bounds=np.column_stack([lb, ub]), method="highs")
            if res.status == 2:
                continue
            if res.status == 3:
                unbounded = True
                break
            if res.status != 0:
                raise SolverError(f"LP relaxation failed: {res.message}")
            if res.fun >= best_obj - abs(best_obj) * gap_tol - 1e-12:
                continue
            frac = np.abs(res.x[int_idx] - np.round(res.x[int_idx]))
            worst = int(np.argmax(frac)) if len(int_idx) else 0
            if len(int_idx) == 0 or frac[worst] <= 1e-7:
                x = res.x.copy()
                x[int_idx] = np.round(x[int_idx])
                if res.fun < best_obj:
                    best_obj = float(res.fun)
                    best_x = x
                continue
            j = int_idx[worst]
            down_ub = ub.copy()
            down_ub[j] = math.floor(res.x[j])
            up_lb = lb.copy()
            up_lb[j] = math.ceil(res.x[j])
            stack.append((lb, down_ub))
            stack.append((up_lb, ub))

        if best_x is not None:
            self._x = best_x
            self._objective = best_obj * (1 if self._minimize else -1)
            self._gap = math.inf if timed_out else 0.0
            return Status.FEASIBLE_GAP if timed_out else Status.OPTIMAL
        if unbounded:
            return Status.UNBOUNDED
        if timed_out:
            # no incumbent to report, so neither optimality nor a gap is certified
            return Status.ERROR
        return Status.INFEASIBLE


BACKENDS: dict[str, type[SolverBackend]] = {
    ScipyHighsBackend.name: ScipyHighsBackend,
    BranchBoundBackend.name: BranchBoundBackend,
}


def resolve_backend_name(name: str | None = None) -> str:
    """EMS_SOLVER (when set) wins over the configured name, then the default."""
    resolved = os.environ.get(ENV_VAR) or name or DEFAULT_BACKEND
    if resolved not in BACKENDS:
        raise SolverError(
            f"unknown solver backend {resolved!r}; available: {sorted(BACKENDS)}"
        )
    return resolved


def make_backend(name: str | None = None) -> SolverBackend:
    return BACKENDS[resolve_backend_name(name)]()


def load_model(backend: SolverBackend, model: LinearModel) -> None:
    """Replay a LinearModel into a backend instance."""
    for v in model.variables:
        backend.add_variable(v.lb, v.ub, v.integer, v.name)
    for con in model.constraints:
        backend.add_constraint(con.terms, con.sense, con.rhs, con.name)
    backend.set_objective(model.objective, model.minimize)


def solve_model(model: LinearModel, backend_name: str | None = None,
                gap_tol: float = 1e-6, time_limit_s: float = 60.0) -> SolveResult:
    """Solve a LinearModel on a fresh backend and collect the result."""
    backend = make_backend(backend_name)
    load_model(backend, model)
    status = backend.optimize(gap_tol=gap_tol, time_limit_s=time_limit_s)
    if status in (Status.OPTIMAL, Status.FEASIBLE_GAP):
        x = backend.solution_vector(model.num_vars)
        return SolveResult(status=status, x=x, objective=backend.objective_value(),
                           gap=backend.mip_gap())
    return SolveResult(status=status, x=None, objective=None, gap=math.inf,
                       message=f"solver returned {status.value}")
