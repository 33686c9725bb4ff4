"""Brute-force reference solvers and instance generators.

Nothing here is clever on purpose: the oracles enumerate definitions directly
and are the yardstick for the fast solvers.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .election import Election, ballots_from_approvals, partition, score
from .errors import InternalConsistencyError, InvalidParameterError, TooLargeError
from .manipulation import CmInstance
from .tiebreak import Behavior, Lexicographic, TiePerspective, apply_lex
from .utility import EGAL, EvalVariant, UtilityProfile, evaluate

ENUMERATION_LIMIT = 10**6


def brute_tie(p: TiePerspective, rule, variant: EvalVariant | None = None):
    """Enumerate every completion of ``p``; returns ``(egroup, value)``.

    Optimistic rules take the maximum, pessimistic the minimum; equal values go
    to the smallest sorted member sequence. Lexicographic rules take the order
    prefix and are valued with ``variant`` (0 without one).
    """
    if isinstance(rule, Lexicographic):
        egroup = apply_lex(p, rule.order)
        return egroup, (0 if variant is None else evaluate(p.profile, egroup, variant))
    pending = sorted(p.pending)
    if math.comb(len(pending), p.open_slots) > ENUMERATION_LIMIT:
        raise TooLargeError("too many completions to enumerate")
    variant = rule.variant
    sign = 1 if rule.behavior is Behavior.OPTIMISTIC else -1
    best = None
    for extra in itertools.combinations(pending, p.open_slots):
        egroup = p.confirmed | frozenset(extra)
        key = (-sign * evaluate(p.profile, egroup, variant), tuple(sorted(egroup)))
        if best is None or key < best[0]:
            best = (key, egroup)
    return best[1], -sign * best[0][0]


def _outcome_value(inst: CmInstance, scores, cache: dict) -> int:
    part = partition(scores, inst.k)
    key = (part.confirmed, part.pending)
    if key not in cache:
        if not part.pending:
            egroup = part.confirmed
        else:
            persp = TiePerspective(part.confirmed, part.pending, inst.k, inst.profile)
            egroup, _ = brute_tie(persp, inst.rule, inst.variant)
        cache[key] = evaluate(inst.profile, egroup, inst.variant)
    return cache[key]


def _witness(sets, m: int) -> list:
    """Full ballots for the given approval sets (approved by index, then the rest)."""
    return [tuple(sorted(s)) + tuple(c for c in range(m) if c not in s) for s in sets]


def brute_cm(inst: CmInstance):
    """Best value over every manipulative profile; returns ``(value, witness ballots)``.

    Only each ballot's top-``ell`` set matters, and ballots are interchangeable,
    so the profiles enumerated are multisets of ``ell``-subsets.
    """
    m, ell, r = inst.m, inst.ell, inst.r
    if math.comb(m, ell) ** r > ENUMERATION_LIMIT:
        raise TooLargeError(f"C({m},{ell})^{r} approval profiles exceed the enumeration limit")
    base = score(inst.election, ell)
    subsets = list(itertools.combinations(range(m), ell))
    cache: dict = {}
    best = None
    for profile in itertools.combinations_with_replacement(subsets, r):
        scores = list(base)
        for s in profile:
            for c in s:
                scores[c] += 1
        value = _outcome_value(inst, scores, cache)
        if best is None or value > best[0]:
            best = (value, profile)
    return best[0], _witness(best[1], m)


def brute_cm_consistent(inst: CmInstance):
    """Best value when all manipulators approve the same ``ell`` candidates."""
    m, ell, r = inst.m, inst.ell, inst.r
    if math.comb(m, ell) > ENUMERATION_LIMIT:
        raise TooLargeError("too many approval sets to enumerate")
    base = score(inst.election, ell)
    cache: dict = {}
    best = None
    for s in itertools.combinations(range(m), ell):
        scores = [base[c] + (r if c in s else 0) for c in range(m)]
        value = _outcome_value(inst, scores, cache)
        if best is None or value > best[0]:
            best = (value, s)
    return best[0], _witness([best[1]] * r, m)


# --------------------------------------------------------------------- generators

@dataclass(frozen=True)
class RandomSpec:
    m: int
    n: int
    r: int
    ell: int
    k: int
    max_utility: int
    seed: int

    def __post_init__(self):
        if not 1 <= self.ell < self.m:
            raise InvalidParameterError("need 1 <= ell < m")
        if not 1 <= self.k < self.m:
            raise InvalidParameterError("need 1 <= k < m")
        if self.r < 1 or self.n < 0 or self.max_utility < 0:
            raise InvalidParameterError("need r >= 1, n >= 0 and max_utility >= 0")


def gen_random(spec: RandomSpec):
    """Uniform random ballots and utilities, fully determined by ``spec.seed``."""
    rng = random.Random(spec.seed)
    ballots = []
    for _ in range(spec.n):
        order = list(range(spec.m))
        rng.shuffle(order)
        ballots.append(tuple(order))
    rows = [[rng.randint(0, spec.max_utility) for _ in range(spec.m)] for _ in range(spec.r)]
    return Election.build(ballots, num_candidates=spec.m), UtilityProfile(rows)


def random_perspective(rng: random.Random, max_pending: int = 8, max_r: int = 3,
                       max_utility: int = 3, max_m: int | None = None) -> TiePerspective:
    """A random tie perspective; candidates not confirmed or pending are rejected."""
    pending_n = rng.randint(1, max_pending)
    confirmed_n = rng.randint(0, 3)
    rejected_n = rng.randint(0, 2)
    m = confirmed_n + pending_n + rejected_n
    if max_m is not None and m > max_m:
        rejected_n = max(0, max_m - confirmed_n - pending_n)
        m = confirmed_n + pending_n + rejected_n
    cands = list(range(m))
    rng.shuffle(cands)
    confirmed = frozenset(cands[:confirmed_n])
    pending = frozenset(cands[confirmed_n:confirmed_n + pending_n])
    k = confirmed_n + rng.randint(1, pending_n)
    r = rng.randint(1, max_r)
    rows = [[rng.randint(0, max_utility) for _ in range(m)] for _ in range(r)]
    return TiePerspective(confirmed, pending, k, UtilityProfile(rows))


@dataclass(frozen=True)
class SetCoverInstance:
    universe_size: int
    sets: tuple  # of frozensets over range(universe_size)
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        if self.universe_size < 1:
            raise InvalidParameterError("the universe needs at least one element")
        for i, s in enumerate(self.sets):
            if not all(0 <= x < self.universe_size for x in s):
                raise InvalidParameterError(f"set {i} leaves the universe")
        if not 1 <= self.budget <= len(self.sets):
            raise InvalidParameterError("budget must lie between 1 and the number of sets")

    def has_cover(self) -> bool:
        universe = set(range(self.universe_size))
        return any(set().union(*pick) >= universe
                   for pick in itertools.combinations(self.sets, self.budget))


@dataclass(frozen=True)
class TieInstance:
    perspective: TiePerspective
    threshold: int


def reduce_setcover_to_tie(sc: SetCoverInstance) -> TieInstance:
    """One pending candidate per set, one manipulator per element, k = budget.

    A manipulator values a candidate at 1 iff the candidate's set holds its
    element, so some completion has egalitarian value >= 1 iff a cover exists.
    """
    rows = [[1 if x in s else 0 for s in sc.sets] for x in range(sc.universe_size)]
    # a perspective needs k < m, so keep one spare candidate when every set is chosen
    if sc.budget == len(sc.sets):
        rows = [row + [0] for row in rows]
    persp = TiePerspective(frozenset(), frozenset(range(len(sc.sets))), sc.budget,
                           UtilityProfile(rows))
    return TieInstance(persp, 1)


def reduce_tie_to_cm(p: TiePerspective, ell: int, rule=None, pump_utility: int | None = None
                     ) -> CmInstance:
    """Embed a tie perspective into a manipulation instance with egalitarian evaluation.

    Manipulators with constant utility rows are added until they hold at least
    ``k - |confirmed|`` approvals. Non-manipulative ballots then fix the scores:
    pending ``r+2``, confirmed ``2r+3``, filler dummies 1, and ``ell*r - slots``
    zero-score dummies that absorb spare approvals. No one outside the pending
    set can reach a pending candidate, and the confirmed stay out of reach, so the
    manipulators decide exactly which pending candidates complete the egroup.
    """
    profile = p.profile
    m0 = profile.m
    slots = p.open_slots
    if pump_utility is None:
        pump_utility = max(sum(row) for row in profile.rows)
    rows = [list(row) for row in profile.rows]
    while ell * len(rows) < slots:
        rows.append([pump_utility] * m0)
    r = len(rows)

    target = [0] * m0
    for c in p.pending:
        target[c] = r + 2
    for c in p.confirmed:
        target[c] = 2 * r + 3
    total = sum(target)
    voters = max(max(target), -(-total // ell))
    fillers = voters * ell - total
    spare = ell * r - slots
    m = m0 + fillers + spare
    if max(ell, p.k) >= m:  # need ell < m and k < m: pad with zero-score dummies
        spare += max(ell, p.k) - m + 1
        m = m0 + fillers + spare
    demands = target + [1] * fillers + [0] * spare
    ballots = ballots_from_approvals(demands, voters, ell) if voters else []
    election = Election.build(ballots, num_candidates=m)

    got = score(election, ell)
    if list(got) != demands:
        raise InternalConsistencyError(f"scaffolding scores {got} differ from the target {demands}")

    extra_cols = m - m0
    full_rows = []
    for i, row in enumerate(rows):
        pad = pump_utility if i >= profile.r else 0
        full_rows.append(row + [pad] * extra_cols)
    if rule is None:
        rule = Lexicographic(tuple(range(m)))
    return CmInstance(election, ell, p.k, UtilityProfile(full_rows), EGAL, rule)
