"""Tie-breaking rules that complete the confirmed candidates to a k-egroup.

Three families are supported: a fixed lexicographic order, and optimistic or
pessimistic completion with respect to an evaluation variant. Utilitarian and
candidate-wise egalitarian completions are reduced to a lexicographic order
computed from the contracted utility row. Egalitarian completion gets dedicated
solvers: a per-manipulator greedy for the pessimistic case and a type-count
integer program for the optimistic case.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from . import ilp
from .errors import InternalConsistencyError, InvalidParameterError
from .utility import EGAL, EvalVariant, UtilityProfile, contract, evaluate


class Behavior(enum.Enum):
    OPTIMISTIC = "opt"
    PESSIMISTIC = "pess"


@dataclass(frozen=True)
class Lexicographic:
    order: tuple  # earlier = preferred

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))


@dataclass(frozen=True)
class Optimistic:
    variant: EvalVariant
    behavior = Behavior.OPTIMISTIC


@dataclass(frozen=True)
class Pessimistic:
    variant: EvalVariant
    behavior = Behavior.PESSIMISTIC


TieRule = Lexicographic | Optimistic | Pessimistic


def rule_for(behavior: Behavior, variant: EvalVariant):
    return Optimistic(variant) if behavior is Behavior.OPTIMISTIC else Pessimistic(variant)


@dataclass(frozen=True)
class TiePerspective:
    confirmed: frozenset
    pending: frozenset
    k: int
    profile: UtilityProfile | None = None

    def __post_init__(self):
        object.__setattr__(self, "confirmed", frozenset(self.confirmed))
        object.__setattr__(self, "pending", frozenset(self.pending))
        if self.confirmed & self.pending:
            raise InvalidParameterError("confirmed and pending candidates overlap")
        if len(self.confirmed) >= self.k:
            raise InvalidParameterError("a perspective needs |confirmed| < k")
        if len(self.confirmed) + len(self.pending) < self.k:
            raise InvalidParameterError("too few pending candidates to complete a k-egroup")

    @property
    def open_slots(self) -> int:
        return self.k - len(self.confirmed)

    def _need_profile(self) -> UtilityProfile:
        if self.profile is None:
            raise InvalidParameterError("this tie-breaking rule needs manipulator utilities")
        return self.profile


def check_order(order: Sequence[int], m: int) -> tuple:
    order = tuple(order)
    if sorted(order) != list(range(m)):
        raise InvalidParameterError(f"lexicographic order must be a permutation of 0..{m - 1}")
    return order


def apply_lex(p: TiePerspective, order: Sequence[int]) -> frozenset:
    chosen = [c for c in order if c in p.pending][: p.open_slots]
    if len(chosen) < p.open_slots:
        raise InvalidParameterError("lexicographic order does not cover the pending candidates")
    return p.confirmed | frozenset(chosen)


def simulate_lex(profile: UtilityProfile, variant: EvalVariant, behavior: Behavior) -> tuple:
    """A lexicographic order that reproduces optimistic/pessimistic tie-breaking.

    Candidates are sorted by contracted utility (descending when optimistic,
    ascending when pessimistic); equal utilities keep index order.
    """
    row = contract(profile, variant)
    sign = -1 if behavior is Behavior.OPTIMISTIC else 1
    return tuple(sorted(range(len(row)), key=lambda c: (sign * row[c], c)))


def tie_break(p: TiePerspective, rule, variant: EvalVariant | None = None):
    """Complete ``p`` to a k-egroup under ``rule``; returns ``(egroup, value)``.

    For optimistic and pessimistic rules the value is the rule's own evaluation.
    A lexicographic rule has no intrinsic evaluation: its value is ``variant``'s
    evaluation when one is given, else 0.
    """
    if isinstance(rule, Lexicographic):
        egroup = apply_lex(p, rule.order)
        if variant is None:
            return egroup, 0
        return egroup, evaluate(p._need_profile(), egroup, variant)
    if not isinstance(rule, (Optimistic, Pessimistic)):
        raise InvalidParameterError(f"unknown tie-breaking rule {rule!r}")
    profile = p._need_profile()
    if rule.variant is EGAL:
        if rule.behavior is Behavior.PESSIMISTIC:
            return pess_egal(p)
        return opt_egal_exact(p)
    order = simulate_lex(profile, rule.variant, rule.behavior)
    egroup = apply_lex(p, order)
    return egroup, evaluate(profile, egroup, rule.variant)


def _sorted_key(egroup) -> tuple:
    return tuple(sorted(egroup))


def pess_egal(p: TiePerspective):
    """Worst egalitarian completion.

    Guess the least satisfied manipulator: for each one, fill the open slots with
    the pending candidates it values least, and keep the completion whose
    egalitarian value is smallest.
    """
    profile = p._need_profile()
    pending = sorted(p.pending)
    best = None
    for row in profile.rows:
        cheapest = sorted(pending, key=lambda c: (row[c], c))[: p.open_slots]
        egroup = p.confirmed | frozenset(cheapest)
        value = evaluate(profile, egroup, EGAL)
        if best is None or (value, _sorted_key(egroup)) < (best[1], _sorted_key(best[0])):
            best = (egroup, value)
    return best


def candidate_types(profile: UtilityProfile, candidates) -> list:
    """Group candidates by utility column; types ordered by their lowest member."""
    groups: dict = {}
    for c in sorted(candidates):
        groups.setdefault(profile.column(c), []).append(c)
    return list(groups.items())


def opt_egal_exact(p: TiePerspective):
    """Best egalitarian completion via an integer program over candidate types.

    One count variable per type of pending candidate, plus the egalitarian level
    ``s``. Confirmed candidates enter as fixed per-manipulator base utility.
    Within a type the lowest-index candidates are selected.
    """
    profile = p._need_profile()
    types = candidate_types(profile, p.pending)
    base = [sum(row[c] for c in p.confirmed) for row in profile.rows]
    slots = p.open_slots

    prog = ilp.IntegerProgram()
    names = [prog.add_var(f"x{i}", 0, len(members)) for i, (_, members) in enumerate(types)]
    s_ub = min(b + sum(sorted((row[c] for c in p.pending), reverse=True)[:slots])
               for b, row in zip(base, profile.rows))
    s = prog.add_var("s", 0, s_ub)
    prog.add_constraint({x: 1 for x in names}, "=", slots)
    for q in range(profile.r):
        coeffs = {x: t[q] for x, (t, _) in zip(names, types)}
        coeffs[s] = -1
        prog.add_constraint(coeffs, ">=", -base[q])
    prog.maximize({s: 1})
    sol = ilp.solve(prog)
    if not sol.optimal:  # pragma: no cover - the program always has a feasible point
        raise InternalConsistencyError("type program for optimistic egalitarian tie-breaking is infeasible")

    chosen = []
    for x, (_, members) in zip(names, types):
        chosen.extend(members[: sol.assignment[x]])
    egroup = p.confirmed | frozenset(chosen)
    value = evaluate(profile, egroup, EGAL)
    if value != sol.objective_value:
        raise InternalConsistencyError("materialized egroup disagrees with the type program")
    return egroup, value
