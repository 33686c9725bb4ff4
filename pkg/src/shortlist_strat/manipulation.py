"""Coalitional manipulation solvers for l-Bloc with tie-breaking.

Every solver enumerates a small set of "states" describing the shape of the
manipulated outcome, optimizes each state independently, and keeps the best.
The returned :class:`Manipulation` is always re-simulated through
:func:`winners` before it leaves this module.

State shapes:

* ``LexState(z, c_hat)``: ``z`` is the lowest final score inside the winning
  egroup and ``c_hat`` its least preferred member at that score (lexicographic
  rules, or optimistic/pessimistic rules replaced by their simulating order).
* ``CmState(z, p, b)``: lowest egroup score ``z``, ``p`` candidates pushed above
  ``z`` from at or below it, ``b`` candidates finishing exactly at ``z``
  (egalitarian optimistic/pessimistic tie-breaking).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import ilp
from .election import Election, ballots_from_approvals, score, winners
from .errors import InternalConsistencyError, InvalidParameterError, UnsupportedVariantError
from .tiebreak import (Behavior, Lexicographic, Optimistic, Pessimistic, candidate_types,
                       check_order, simulate_lex)
from .utility import EGAL, EvalVariant, UtilityProfile, contract, evaluate


@dataclass(frozen=True)
class CmInstance:
    election: Election
    ell: int
    k: int
    profile: UtilityProfile
    variant: EvalVariant
    rule: object
    threshold: int | None = None

    def __post_init__(self):
        m = self.election.num_candidates
        if not 1 <= self.ell < m:
            raise InvalidParameterError(f"ell must satisfy 1 <= ell < m={m}, got {self.ell}")
        if not 1 <= self.k < m:
            raise InvalidParameterError(f"k must satisfy 1 <= k < m={m}, got {self.k}")
        if self.profile.m != m:
            raise InvalidParameterError(
                f"utility profile covers {self.profile.m} candidates, election has {m}")
        if self.threshold is not None and self.threshold < 0:
            raise InvalidParameterError("threshold must be nonnegative")
        if isinstance(self.rule, Lexicographic):
            check_order(self.rule.order, m)
        elif isinstance(self.rule, (Optimistic, Pessimistic)):
            if self.rule.variant is not self.variant:
                raise UnsupportedVariantError(
                    "tie-breaking must evaluate egroups the same way the manipulators do")
        else:
            raise InvalidParameterError(f"unknown tie-breaking rule {self.rule!r}")

    @property
    def r(self) -> int:
        return self.profile.r

    @property
    def m(self) -> int:
        return self.election.num_candidates

    def base_scores(self) -> tuple:
        return score(self.election, self.ell)

    def lex_order(self) -> tuple:
        """The fixed order equivalent to this instance's rule (not for egalitarian opt/pess)."""
        if isinstance(self.rule, Lexicographic):
            return self.rule.order
        return simulate_lex(self.profile, self.variant, self.rule.behavior)


@dataclass(frozen=True)
class LexState:
    z: int
    c_hat: int


@dataclass(frozen=True)
class CmState:
    z: int
    p: int
    b: int


@dataclass(frozen=True)
class Manipulation:
    ballots: tuple
    resulting_egroup: frozenset
    value: int
    state: object = field(default=None, compare=False)

    def meets(self, threshold: int | None) -> bool:
        return threshold is None or self.value >= threshold


def outcome(inst: CmInstance, ballots: Sequence, state=None) -> Manipulation:
    """Run the election with the manipulative ``ballots`` appended."""
    after = inst.election.with_ballots(ballots)
    egroup = winners(after, inst.ell, inst.k, inst.rule, inst.profile)
    return Manipulation(tuple(tuple(b) for b in ballots), egroup,
                        evaluate(inst.profile, egroup, inst.variant), state)


def _certify(inst: CmInstance, demands, value: int, state) -> Manipulation:
    result = outcome(inst, ballots_from_approvals(demands, inst.r, inst.ell), state)
    if result.value != value:
        raise InternalConsistencyError(
            f"state {state}: predicted value {value}, re-simulation gives {result.value}")
    return result


def _spread(demands: list, caps: list, budget: int) -> None:
    """Hand out ``budget`` extra approvals by candidate index, up to each cap."""
    for c in range(len(demands)):
        if budget == 0:
            break
        extra = min(budget, caps[c] - demands[c])
        demands[c] += extra
        budget -= extra
    if budget:
        raise InternalConsistencyError("approvals left over after filling every candidate")


# --------------------------------------------------------------------------- knapsack

def knapsack_exact_k(items: Sequence[tuple], count: int, capacity: int):
    """Best total value of exactly ``count`` items with total weight <= ``capacity``.

    ``items`` are ``(weight, value)`` pairs. Returns ``(value, indices)`` or None
    when no such subset exists. Among optimal subsets the one preferring lower
    indices is returned.

    >>> knapsack_exact_k([(2, 3), (2, 3), (3, 10)], 2, 4)
    (6, (0, 1))
    """
    if count < 0 or capacity < 0:
        return None
    n = len(items)
    if count > n:
        return None
    # best[i][j][w]: max value picking j items from items[i:] with weight <= w
    none = None
    best = [[[none] * (capacity + 1) for _ in range(count + 1)] for _ in range(n + 1)]
    for w in range(capacity + 1):
        best[n][0][w] = 0
    for i in range(n - 1, -1, -1):
        wt, val = items[i]
        here, nxt = best[i], best[i + 1]
        for j in range(count + 1):
            row, skip_row = here[j], nxt[j]
            take_row = nxt[j - 1] if j else None
            for w in range(capacity + 1):
                v = skip_row[w]
                if take_row is not None and wt <= w and take_row[w - wt] is not None:
                    cand = take_row[w - wt] + val
                    if v is None or cand > v:
                        v = cand
                row[w] = v
    total = best[0][count][capacity]
    if total is None:
        return None
    chosen, j, w = [], count, capacity
    for i in range(n):
        if j == 0:
            break
        wt, val = items[i]
        target = best[i][j][w]
        if wt <= w and best[i + 1][j - 1][w - wt] is not None \
                and best[i + 1][j - 1][w - wt] + val == target:
            chosen.append(i)
            j -= 1
            w -= wt
    return total, tuple(chosen)


# ------------------------------------------------------------- lexicographic states

@dataclass
class _LexLayout:
    """Candidate roles once ``(z, c_hat)`` is fixed under a lexicographic order.

    ``eligible`` lists ``(c, need, side, j)``: candidates that can join the egroup
    with ``need`` extra approvals and must stay at or below ``need - 1`` otherwise.
    ``side`` is ``+`` when ``c`` precedes ``c_hat`` in the order, else ``-``.
    """
    confirmed: list
    c_hat: int
    shat: int
    slots: int
    eligible: list
    low: list


def _lex_layout(base, pos, r, k, z, ch) -> _LexLayout | None:
    if not z - r <= base[ch] <= z:
        return None
    confirmed, eligible, low = [], [], []
    for c in range(len(base)):
        if c == ch:
            continue
        before = pos[c] < pos[ch]
        if base[c] > z or (base[c] == z and before):
            confirmed.append(c)
            continue
        j = z - base[c]
        need = j if before else j + 1
        if need <= r:
            eligible.append((c, need, "+" if before else "-", j))
        else:
            low.append(c)
    if len(confirmed) >= k:
        return None
    return _LexLayout(confirmed, ch, z - base[ch], k - len(confirmed) - 1, eligible, low)


def _lex_demands(layout: _LexLayout, chosen: set, m: int, r: int, ell: int) -> list:
    demands, caps = [0] * m, [r] * m
    demands[layout.c_hat] = caps[layout.c_hat] = layout.shat
    for c, need, _, _ in layout.eligible:
        if c in chosen:
            demands[c] = need
        else:
            caps[c] = need - 1
    _spread(demands, caps, r * ell - sum(demands))
    return demands


def _lex_states(inst: CmInstance, order) -> Iterator[tuple]:
    base = inst.base_scores()
    pos = {c: i for i, c in enumerate(order)}
    for z in range(inst.election.num_voters + inst.r + 1):
        for ch in range(inst.m):
            layout = _lex_layout(base, pos, inst.r, inst.k, z, ch)
            if layout is not None:
                yield LexState(z, ch), layout


def general_states(inst: CmInstance) -> Iterator[tuple]:
    """Per-state optima of the knapsack formulation: yields ``(state, value, demands)``.

    ``value`` is None for states that admit no manipulation.
    """
    if inst.variant is EGAL:
        raise UnsupportedVariantError("the knapsack formulation needs a contractible variant")
    r, ell = inst.r, inst.ell
    worth = contract(inst.profile, inst.variant)
    for state, lay in _lex_states(inst, inst.lex_order()):
        budget = r * ell - lay.shat
        others = len(lay.confirmed) + len(lay.low)
        need = budget - r * others - sum(nd - 1 for _, nd, _, _ in lay.eligible)
        capacity = min(budget, lay.slots * (r + 1) - need)
        picked = knapsack_exact_k([(nd, worth[c]) for c, nd, _, _ in lay.eligible],
                                  lay.slots, capacity) if capacity >= 0 else None
        if picked is None:
            yield state, None, None
            continue
        gain, idxs = picked
        chosen = {lay.eligible[i][0] for i in idxs}
        value = sum(worth[c] for c in lay.confirmed) + worth[lay.c_hat] + gain
        yield state, value, _lex_demands(lay, chosen, inst.m, r, ell)


def _best(inst: CmInstance, states) -> Manipulation | None:
    best = None
    for state, value, demands in states:
        if value is not None and (best is None or value > best[1]):
            best = (state, value, demands)
    if best is None:
        return None
    state, value, demands = best
    return _certify(inst, demands, value, state)


def cm_general(inst: CmInstance) -> Manipulation | None:
    """Optimal manipulation for utilitarian / candidate-wise egalitarian evaluation.

    For every ``(z, c_hat)`` the remaining egroup slots are filled by an exact
    k-item knapsack over the candidates able to overtake ``c_hat``: an item's
    weight is the number of approvals it needs, its value the contracted utility.
    The capacity also guarantees that every leftover approval can be parked
    without promoting anyone else.
    """
    return _best(inst, general_states(inst))


# ----------------------------------------------------------------- consistent votes

def strength_order(election: Election, ell: int, order: Sequence[int]) -> tuple:
    """Candidates by descending score, ties by position in ``order``."""
    base = score(election, ell)
    pos = {c: i for i, c in enumerate(order)}
    return tuple(sorted(range(election.num_candidates), key=lambda c: (-base[c], pos[c])))


def consistent_states(inst: CmInstance) -> Iterator[tuple]:
    """Supported sets per number ``t`` of kept candidates: yields ``(t, supported)``."""
    if inst.variant is EGAL:
        raise UnsupportedVariantError("consistent manipulation needs a contractible variant")
    r, ell, k = inst.r, inst.ell, inst.k
    order = inst.lex_order()
    pos = {c: i for i, c in enumerate(order)}
    base = inst.base_scores()
    worth = contract(inst.profile, inst.variant)
    strength = strength_order(inst.election, ell, order)
    rank = {c: i for i, c in enumerate(strength)}

    def valuable(pool, count):
        return sorted(pool, key=lambda c: (-worth[c], rank[c]))[:count]

    def weakest(pool, count):
        return sorted(pool, key=lambda c: -rank[c])[:count] if count > 0 else []

    for t in range(max(0, k - ell), k + 1):
        kept, dropped = strength[:t], strength[t]
        distinguished = [c for c in strength[t + 1:]
                         if base[c] + r > base[dropped]
                         or (base[c] + r == base[dropped] and pos[c] < pos[dropped])]
        if len(distinguished) < k - t:
            continue
        supported = valuable(distinguished, k - t)
        supported += list(kept[:min(t, ell - len(supported))])
        if len(supported) != ell:
            rest = [c for c in strength if c not in supported]
            trial = weakest(rest, ell - len(supported))
            top = sorted(supported + trial, key=rank.__getitem__)[:k]
            p = len(set(top) - set(supported))
            supported += weakest(rest, ell - len(supported) - p)
            supported += valuable([c for c in distinguished if c not in supported], p)
            if len(supported) < ell:  # too few distinguished left: park on the weakest
                supported += weakest([c for c in strength if c not in supported],
                                     ell - len(supported))
        yield t, frozenset(supported)


def cm_consistent(inst: CmInstance) -> Manipulation | None:
    """Best manipulation in which all manipulators cast the same ballot."""
    best = None
    for t, supported in consistent_states(inst):
        demands = [inst.r if c in supported else 0 for c in range(inst.m)]
        result = outcome(inst, ballots_from_approvals(demands, inst.r, inst.ell), t)
        if best is None or result.value > best.value:
            best = result
    return best


def cm_bloc(inst: CmInstance) -> Manipulation | None:
    """Bloc (ell = k): identical ballots are optimal, so the consistent solver suffices."""
    if inst.ell != inst.k:
        raise InvalidParameterError("the Bloc solver needs ell == k")
    return cm_consistent(inst)


# ------------------------------------------------------- egalitarian: opt / pess

def _type_index(profile: UtilityProfile) -> tuple:
    types = candidate_types(profile, range(profile.m))
    of = [0] * profile.m
    for i, (_, members) in enumerate(types):
        for c in members:
            of[c] = i
    return [t for t, _ in types], of


def _egal_cap(profile: UtilityProfile, k: int) -> int:
    return min(sum(sorted(row, reverse=True)[:k]) for row in profile.rows)


def _cm_state_program(inst, base, vectors, type_of, z, p, b):
    """The integer program for one ``CmState``; None when the state is invalid."""
    r, ell, k, m = inst.r, inst.ell, inst.k, inst.m
    confirmed = [c for c in range(m) if base[c] > z]
    if len(confirmed) >= k or p > k - len(confirmed) - 1 or b < k - len(confirmed) - p:
        return None
    rejected = [c for c in range(m) if base[c] < z - r]
    groups: dict = {}
    for c in range(m):
        if z - r <= base[c] <= z:
            groups.setdefault((type_of[c], z - base[c]), []).append(c)
    at_z = sum(len(g) for (_, j), g in groups.items() if j == 0)
    in_groups = sum(len(g) for g in groups.values())
    if at_z > p + b or p + b > in_groups or at_z == 0 and b == 0:
        return None

    prog = ilp.IntegerProgram()
    xp, xb = {}, {}
    for key in sorted(groups):
        i, j = key
        size = len(groups[key])
        xp[key] = prog.add_var(f"xp_{i}_{j}", 0, size if j < r else 0)
        xb[key] = prog.add_var(f"xb_{i}_{j}", 0, size)
        prog.add_constraint({xp[key]: 1, xb[key]: 1}, "=" if j == 0 else "<=", size)
    prog.add_constraint({v: 1 for v in xp.values()}, "=", p)
    prog.add_constraint({v: 1 for v in xb.values()}, "=", b)

    # o: approvals that shape the state; the rest (ell*r - o) must be parked
    used = {}
    for (i, j), v in xp.items():
        used[v] = j + 1
    for (i, j), v in xb.items():
        used[v] = j
    prog.add_constraint(used, "<=", ell * r)
    park = r * (len(confirmed) + len(rejected))
    parked = {}
    for (i, j), g in groups.items():
        if j >= 1:
            park += len(g) * (j - 1)
            parked[xb[(i, j)]] = parked.get(xb[(i, j)], 0) - (j - 1)
            parked[xp[(i, j)]] = parked.get(xp[(i, j)], 0) - (j - 1)
        if j <= r - 1:
            parked[xp[(i, j)]] = parked.get(xp[(i, j)], 0) + (r - j - 1)
    # ell*r - o <= park + sum(parked)
    row = {v: used[v] + parked.get(v, 0) for v in used}
    prog.add_constraint(row, ">=", ell * r - park)

    open_slots = k - len(confirmed) - p
    fixed = [sum(row_u[c] for c in confirmed) for row_u in inst.profile.rows]
    s = prog.add_var("s", 0, _egal_cap(inst.profile, k))
    if inst.rule.behavior is Behavior.OPTIMISTIC:
        xf = {}
        for key in sorted(groups):
            xf[key] = prog.add_var(f"xf_{key[0]}_{key[1]}", 0, len(groups[key]))
            prog.add_constraint({xf[key]: 1, xb[key]: -1}, "<=", 0)
        prog.add_constraint({v: 1 for v in xf.values()}, "=", open_slots)
        for q in range(r):
            coeffs = {s: -1}
            for (i, j) in groups:
                u = vectors[i][q]
                if u:
                    coeffs[xp[(i, j)]] = u
                    coeffs[xf[(i, j)]] = u
            prog.add_constraint(coeffs, ">=", -fixed[q])
    else:
        kinds = sorted({i for i, _ in groups})
        size_of = {i: sum(len(g) for (t, _), g in groups.items() if t == i) for i in kinds}
        big = m
        d, usd, full = {}, {}, {}
        for i in kinds:
            border = {xb[key]: 1 for key in groups if key[0] == i}
            for q in range(r):
                d[i, q] = prog.add_var(f"d_{i}_{q}", 0, size_of[i])
                usd[i, q] = prog.add_var(f"used_{i}_{q}", 0, 1)
                full[i, q] = prog.add_var(f"fused_{i}_{q}", 0, 1)
                prog.add_constraint({**border, d[i, q]: -1}, ">=", 0)
                prog.add_constraint({usd[i, q]: 1, d[i, q]: -1}, "<=", 0)
                prog.add_constraint({usd[i, q]: big, d[i, q]: -1}, ">=", 0)
                prog.add_constraint({**border, d[i, q]: -1, full[i, q]: 1}, ">=", 1)
                prog.add_constraint({**border, d[i, q]: -1, full[i, q]: big}, "<=", big)
        for q in range(r):
            prog.add_constraint({d[i, q]: 1 for i in kinds}, "=", open_slots)
            for i, i2 in itertools.permutations(kinds, 2):
                if vectors[i][q] > vectors[i2][q]:
                    prog.add_constraint({usd[i, q]: 1, full[i2, q]: -1}, "<=", 0)
            coeffs = {s: -1}
            for i in kinds:
                if vectors[i][q]:
                    coeffs[d[i, q]] = vectors[i][q]
            for (i, j) in groups:
                if vectors[i][q]:
                    coeffs[xp[(i, j)]] = coeffs.get(xp[(i, j)], 0) + vectors[i][q]
            prog.add_constraint(coeffs, ">=", -fixed[q])
    prog.maximize({s: 1})
    return prog, groups, xp, xb, confirmed, rejected


def egal_states(inst: CmInstance) -> Iterator[tuple]:
    """Per-state optima for egalitarian opt/pess tie-breaking: ``(state, value, demands)``."""
    if inst.variant is not EGAL or not isinstance(inst.rule, (Optimistic, Pessimistic)):
        raise UnsupportedVariantError("needs egalitarian evaluation with opt/pess tie-breaking")
    r, ell, k, m = inst.r, inst.ell, inst.k, inst.m
    base = inst.base_scores()
    vectors, type_of = _type_index(inst.profile)
    for z in range(inst.election.num_voters + r + 1):
        above = sum(1 for c in range(m) if base[c] > z)
        if above >= k:
            continue
        for p in range(k - above):
            for b in range(k - above - p, m - above - p + 1):
                built = _cm_state_program(inst, base, vectors, type_of, z, p, b)
                if built is None:
                    continue
                prog, groups, xp, xb, confirmed, rejected = built
                sol = ilp.solve(prog)
                state = CmState(z, p, b)
                if not sol.optimal:
                    yield state, None, None
                    continue
                demands, caps = [0] * m, [r] * m
                for key, members in groups.items():
                    j = key[1]
                    np_, nb = sol.assignment[xp[key]], sol.assignment[xb[key]]
                    for n, c in enumerate(members):
                        if n < np_:
                            demands[c] = j + 1
                        elif n < np_ + nb:
                            demands[c] = caps[c] = j
                        else:
                            caps[c] = j - 1 if j >= 1 else 0
                _spread(demands, caps, r * ell - sum(demands))
                yield state, sol.objective_value, demands


def cm_egal(inst: CmInstance) -> Manipulation | None:
    """Optimal manipulation for egalitarian evaluation with egalitarian opt/pess ties.

    One integer program per ``(z, p, b)`` over candidate types and score offsets.
    """
    return _best(inst, egal_states(inst))


# ---------------------------------------------------- egalitarian: lexicographic

def egal_lex_states(inst: CmInstance) -> Iterator[tuple]:
    """Per-state optima for egalitarian evaluation, lexicographic ties."""
    if inst.variant is not EGAL or not isinstance(inst.rule, Lexicographic):
        raise UnsupportedVariantError("needs egalitarian evaluation with lexicographic ties")
    r, ell, m = inst.r, inst.ell, inst.m
    vectors, type_of = _type_index(inst.profile)
    cap_s = _egal_cap(inst.profile, inst.k)
    for state, lay in _lex_states(inst, inst.rule.order):
        budget = r * ell - lay.shat
        groups: dict = {}
        for c, need, side, j in lay.eligible:
            groups.setdefault((type_of[c], j, side), []).append(c)
        prog = ilp.IntegerProgram()
        x = {}
        for key in sorted(groups):
            i, j, side = key
            x[key] = prog.add_var(f"x_{i}_{j}{side}", 0, len(groups[key]))
        # approvals spent pushing the chosen candidates in (mful)
        need_of = {x[key]: (key[1] if key[2] == "+" else key[1] + 1) for key in groups}
        prog.add_constraint(need_of, "<=", budget)
        # the rest must fit where it changes nothing: budget <= (m-1)r - fbid
        forbidden = {x[key]: (r - key[1] + 1 if key[2] == "+" else r - key[1]) for key in groups}
        blocked = sum(forbidden[x[key]] * len(g) for key, g in groups.items())
        prog.add_constraint(forbidden, ">=", budget - (m - 1) * r + blocked)
        prog.add_constraint({v: 1 for v in x.values()}, "=", lay.slots)
        s = prog.add_var("s", 0, cap_s)
        for q, row in enumerate(inst.profile.rows):
            fixed = sum(row[c] for c in lay.confirmed) + row[lay.c_hat]
            coeffs = {s: -1}
            for key in groups:
                if vectors[key[0]][q]:
                    coeffs[x[key]] = vectors[key[0]][q]
            prog.add_constraint(coeffs, ">=", -fixed)
        prog.maximize({s: 1})
        sol = ilp.solve(prog)
        if not sol.optimal:
            yield state, None, None
            continue
        chosen = set()
        for key, members in groups.items():
            chosen.update(members[: sol.assignment[x[key]]])
        yield state, sol.objective_value, _lex_demands(lay, chosen, m, r, ell)


def cm_egal_lex(inst: CmInstance) -> Manipulation | None:
    """Optimal manipulation for egalitarian evaluation with a fixed lexicographic order."""
    return _best(inst, egal_lex_states(inst))


# ------------------------------------------------------------------------ dispatch

def applicable_solvers(inst: CmInstance) -> list:
    """Names of the fast solvers that handle ``inst``."""
    if inst.variant is EGAL:
        return ["cm_egal_lex"] if isinstance(inst.rule, Lexicographic) else ["cm_egal"]
    names = ["cm_general"]
    if inst.ell == inst.k:
        names.append("cm_bloc")
    return names


SOLVERS = {
    "cm_general": cm_general,
    "cm_bloc": cm_bloc,
    "cm_egal": cm_egal,
    "cm_egal_lex": cm_egal_lex,
}


def solve_fast(inst: CmInstance) -> Manipulation | None:
    return SOLVERS[applicable_solvers(inst)[0]](inst)
