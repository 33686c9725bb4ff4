"""A small exact solver for bounded integer linear programs.

Depth-first branch and bound over variable domains. Every node runs interval
bound propagation to a fixpoint; a node is pruned when some constraint has no
completion inside the remaining box or when the objective cannot strictly beat
the incumbent. Pure integer arithmetic throughout, no LP relaxation.

Example
-------
>>> prog = IntegerProgram()
>>> x = prog.add_var("x", 0, 2)
>>> y = prog.add_var("y", 0, 2)
>>> prog.add_constraint({x: 1, y: 2}, "<=", 4)
>>> prog.maximize({x: 1, y: 1})
>>> solve(prog).objective_value
3
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .errors import InternalConsistencyError, InvalidProgramError

RELATIONS = ("<=", "=", ">=")


@dataclass(frozen=True)
class Variable:
    name: str
    lower: int
    upper: int


@dataclass(frozen=True)
class Constraint:
    coefficients: Mapping[str, int]
    relation: str
    rhs: int


@dataclass
class IntegerProgram:
    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)  # maximized

    def add_var(self, name: str, lower: int, upper: int) -> str:
        self.variables.append(Variable(name, lower, upper))
        return name

    def add_constraint(self, coefficients: Mapping[str, int], relation: str, rhs: int) -> None:
        self.constraints.append(Constraint(dict(coefficients), relation, rhs))

    def maximize(self, objective: Mapping[str, int]) -> None:
        self.objective = dict(objective)


class IpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class IpSolution:
    status: IpStatus
    assignment: dict | None = None
    objective_value: int | None = None

    @property
    def optimal(self) -> bool:
        return self.status is IpStatus.OPTIMAL


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _compile(prog: IntegerProgram):
    index = {}
    for var in prog.variables:
        if var.name in index:
            raise InvalidProgramError(f"duplicate variable {var.name!r}")
        if not (_is_int(var.lower) and _is_int(var.upper)):
            raise InvalidProgramError(f"variable {var.name!r} needs finite integer bounds")
        if var.lower > var.upper:
            raise InvalidProgramError(f"variable {var.name!r} has lower > upper")
        index[var.name] = len(index)

    def linear(coeffs, what):
        idxs, coefs = [], []
        for name, a in coeffs.items():
            if name not in index:
                raise InvalidProgramError(f"{what} references unknown variable {name!r}")
            if not _is_int(a):
                raise InvalidProgramError(f"{what} has non-integer coefficient for {name!r}")
            if a:
                idxs.append(index[name])
                coefs.append(a)
        return idxs, coefs

    rows = []
    for n, con in enumerate(prog.constraints):
        if con.relation not in RELATIONS:
            raise InvalidProgramError(f"constraint {n} has unknown relation {con.relation!r}")
        if not _is_int(con.rhs):
            raise InvalidProgramError(f"constraint {n} has a non-integer right-hand side")
        idxs, coefs = linear(con.coefficients, f"constraint {n}")
        if con.relation in ("<=", "="):
            rows.append([tuple(idxs), tuple(coefs), con.rhs])
        if con.relation in (">=", "="):
            rows.append([tuple(idxs), tuple(-a for a in coefs), -con.rhs])
    obj_idxs, obj_coefs = linear(prog.objective, "objective")
    return index, rows, obj_idxs, obj_coefs


def _propagate(rows, watch, lo, hi, queue) -> bool:
    queued = set(queue)
    queue = deque(queue)
    while queue:
        ri = queue.popleft()
        queued.discard(ri)
        idxs, coefs, rhs = rows[ri]
        minact = 0
        for j, a in zip(idxs, coefs):
            minact += a * lo[j] if a > 0 else a * hi[j]
        slack = rhs - minact
        if slack < 0:
            return False
        for j, a in zip(idxs, coefs):
            if a > 0:
                if a * (hi[j] - lo[j]) <= slack:
                    continue
                hi[j] = lo[j] + slack // a
            else:
                if -a * (hi[j] - lo[j]) <= slack:
                    continue
                lo[j] = hi[j] - slack // -a
            for other in watch[j]:
                if other != ri and other not in queued:
                    queued.add(other)
                    queue.append(other)
    return True


def solve(prog: IntegerProgram) -> IpSolution:
    """Maximize ``prog.objective`` exactly.

    Branching is deterministic: variables in declaration order; values ascending,
    except for variables with a positive objective coefficient, which are tried
    from the top of their domain. A new incumbent is kept only if strictly better.
    """
    index, rows, obj_idxs, obj_coefs = _compile(prog)
    n = len(index)
    # The objective cut "objective >= incumbent + 1" lives in the last row.
    cut = len(rows)
    inert = 1 + sum(abs(a) * max(abs(prog.variables[j].lower), abs(prog.variables[j].upper))
                    for j, a in zip(obj_idxs, obj_coefs))
    rows.append([tuple(obj_idxs), tuple(-a for a in obj_coefs), inert])
    watch = [[] for _ in range(n)]
    for ri, (idxs, _, _) in enumerate(rows):
        for j in idxs:
            watch[j].append(ri)
    obj_coef = [0] * n
    for j, a in zip(obj_idxs, obj_coefs):
        obj_coef[j] = a

    lo = [v.lower for v in prog.variables]
    hi = [v.upper for v in prog.variables]
    best: list | None = None
    best_val = 0

    def upper_bound(lo, hi):
        return sum(a * (hi[j] if a > 0 else lo[j]) for j, a in zip(obj_idxs, obj_coefs))

    def search(lo, hi, queue):
        nonlocal best, best_val
        if best is not None:
            queue = list(queue) + [cut]
        if not _propagate(rows, watch, lo, hi, queue):
            return
        if best is not None and upper_bound(lo, hi) <= best_val:
            return
        for j in range(n):
            if lo[j] < hi[j]:
                break
        else:
            value = sum(a * lo[j] for j, a in zip(obj_idxs, obj_coefs))
            if best is None or value > best_val:
                best, best_val = list(lo), value
                rows[cut][2] = -(best_val + 1)
            return
        values = range(lo[j], hi[j] + 1)
        if obj_coef[j] > 0:
            values = reversed(values)
        for v in values:
            clo, chi = list(lo), list(hi)
            clo[j] = chi[j] = v
            search(clo, chi, watch[j])

    search(lo, hi, list(range(cut)))
    if best is None:
        return IpSolution(IpStatus.INFEASIBLE)

    assignment = {v.name: best[i] for i, v in enumerate(prog.variables)}
    _verify(prog, assignment)
    return IpSolution(IpStatus.OPTIMAL, assignment, best_val)


def _verify(prog: IntegerProgram, assignment: Mapping[str, int]) -> None:
    for var in prog.variables:
        if not var.lower <= assignment[var.name] <= var.upper:
            raise InternalConsistencyError(f"variable {var.name} violates its bounds")
    for n, con in enumerate(prog.constraints):
        lhs = sum(a * assignment[name] for name, a in con.coefficients.items())
        ok = {"<=": lhs <= con.rhs, "=": lhs == con.rhs, ">=": lhs >= con.rhs}[con.relation]
        if not ok:
            raise InternalConsistencyError(f"constraint {n} violated by the returned assignment")


def check_assignment(prog: IntegerProgram, assignment: Mapping[str, int]) -> bool:
    try:
        _verify(prog, assignment)
    except InternalConsistencyError:
        return False
    return True
