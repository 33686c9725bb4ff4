"""Elections under l-Bloc scoring and the confirmed/pending/rejected split.

Candidates are identified by position ``0..m-1``; names are display-only.
Egroups (the winning size-k sets) are plain ``frozenset`` objects of indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import InfeasibleDemandError, InvalidParameterError

Ballot = tuple  # permutation of candidate indices, most preferred first
Egroup = frozenset


@dataclass(frozen=True)
class Election:
    num_candidates: int
    candidate_names: tuple
    ballots: tuple  # of (order, count)

    def __post_init__(self):
        m = self.num_candidates
        if m < 1:
            raise InvalidParameterError("an election needs at least one candidate")
        if len(self.candidate_names) != m:
            raise InvalidParameterError(
                f"expected {m} candidate names, got {len(self.candidate_names)}")
        full = set(range(m))
        for idx, (order, count) in enumerate(self.ballots):
            if len(order) != m or set(order) != full:
                raise InvalidParameterError(f"ballot {idx} is not a permutation of all {m} candidates")
            if count < 1:
                raise InvalidParameterError(f"ballot {idx} has non-positive count {count}")

    @classmethod
    def build(cls, ballots: Sequence, names: Sequence[str] | None = None,
              num_candidates: int | None = None) -> "Election":
        """Convenience constructor.

        ``ballots`` may hold bare orders (count 1) or ``(order, count)`` pairs.
        """
        norm = []
        for b in ballots:
            if len(b) == 2 and not isinstance(b[0], int):
                order, count = b
            else:
                order, count = b, 1
            norm.append((tuple(int(c) for c in order), int(count)))
        if num_candidates is None:
            if names is not None:
                num_candidates = len(names)
            elif norm:
                num_candidates = len(norm[0][0])
            else:
                raise InvalidParameterError("cannot infer the number of candidates")
        if names is None:
            names = [f"c{i}" for i in range(num_candidates)]
        return cls(num_candidates, tuple(names), tuple(norm))

    @property
    def num_voters(self) -> int:
        return sum(count for _, count in self.ballots)

    def with_ballots(self, extra: Sequence[Ballot]) -> "Election":
        """Return a new election with ``extra`` ballots (count 1 each) appended."""
        added = tuple((tuple(b), 1) for b in extra)
        return Election(self.num_candidates, self.candidate_names, self.ballots + added)


@dataclass(frozen=True)
class CandidatePartition:
    confirmed: frozenset
    pending: frozenset
    rejected: frozenset = field(default_factory=frozenset)


def _check_ell(m: int, ell: int) -> None:
    if not 1 <= ell < m:
        raise InvalidParameterError(f"ell must satisfy 1 <= ell < m={m}, got {ell}")


def score(election: Election, ell: int) -> tuple:
    """Per-candidate l-Bloc scores: each ballot gives one point to its top ``ell``."""
    m = election.num_candidates
    _check_ell(m, ell)
    scores = [0] * m
    for order, count in election.ballots:
        for c in order[:ell]:
            scores[c] += count
    return tuple(scores)


def partition(scores: Sequence[int], k: int) -> CandidatePartition:
    """Split candidates into those in all, some, or no co-winning k-egroups."""
    m = len(scores)
    if not 1 <= k < m:
        raise InvalidParameterError(f"k must satisfy 1 <= k < m={m}, got {k}")
    threshold = sorted(scores, reverse=True)[k - 1]
    above = frozenset(c for c in range(m) if scores[c] > threshold)
    at = frozenset(c for c in range(m) if scores[c] == threshold)
    rest = frozenset(c for c in range(m) if scores[c] < threshold)
    if len(above) + len(at) == k:
        return CandidatePartition(above | at, frozenset(), rest)
    return CandidatePartition(above, at, rest)


def winners_from_scores(scores: Sequence[int], k: int, rule, utilities=None) -> Egroup:
    from .tiebreak import TiePerspective, tie_break

    part = partition(scores, k)
    if not part.pending:
        return part.confirmed
    egroup, _ = tie_break(TiePerspective(part.confirmed, part.pending, k, utilities), rule)
    return egroup


def winners(election: Election, ell: int, k: int, rule, utilities=None) -> Egroup:
    """The winning k-egroup: confirmed candidates completed by the tie-breaking rule.

    ``utilities`` is only consulted by optimistic/pessimistic rules.
    """
    return winners_from_scores(score(election, ell), k, rule, utilities)


def ballots_from_approvals(demands: Sequence[int], r: int, ell: int) -> list:
    """Build ``r`` full ballots whose top-``ell`` sets realize per-candidate ``demands``.

    Each ballot greedily approves the ``ell`` candidates with the largest remaining
    demand (smaller index first on ties). Approved candidates are listed by index,
    followed by the rest by index.
    """
    m = len(demands)
    remaining = [int(d) for d in demands]
    if r < 1 or not 1 <= ell < m:
        raise InfeasibleDemandError(f"need r >= 1 and 1 <= ell < m (r={r}, ell={ell}, m={m})")
    if any(d < 0 for d in remaining) or max(remaining) > r or sum(remaining) != r * ell:
        raise InfeasibleDemandError(
            f"demands {list(demands)} are not realizable by {r} ballots of {ell} approvals")
    ballots = []
    for _ in range(r):
        chosen = sorted(range(m), key=lambda c: (-remaining[c], c))[:ell]
        if remaining[chosen[-1]] == 0:
            raise InfeasibleDemandError("greedy construction ran out of demand")  # pragma: no cover
        for c in chosen:
            remaining[c] -= 1
        approved = sorted(chosen)
        chosen_set = set(chosen)
        ballots.append(tuple(approved + [c for c in range(m) if c not in chosen_set]))
    return ballots


def approval_sets(ballots: Sequence[Ballot], ell: int) -> list:
    return [frozenset(b[:ell]) for b in ballots]
