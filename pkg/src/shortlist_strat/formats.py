"""JSON file formats for elections and manipulator utilities.

Election::

    {"candidates": ["a", "b", ...],
     "votes": [{"order": ["b", "a", ...], "count": 2}, ...]}

Utilities::

    {"manipulators": [{"id": "u1", "utilities": {"a": 3, "b": 0, ...}}, ...]}

Candidates are referred to by name in files and by their position in the
``candidates`` array everywhere else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .election import Election
from .errors import InvalidParameterError
from .utility import UtilityProfile


def _is_count(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def parse_election(doc) -> Election:
    if not isinstance(doc, dict) or "candidates" not in doc or "votes" not in doc:
        raise InvalidParameterError('election file needs "candidates" and "votes"')
    names = doc["candidates"]
    if not isinstance(names, list) or not all(isinstance(x, str) for x in names):
        raise InvalidParameterError('"candidates" must be a list of names')
    if len(set(names)) != len(names):
        raise InvalidParameterError("candidate names must be unique")
    index = {name: i for i, name in enumerate(names)}
    ballots = []
    for i, vote in enumerate(doc["votes"]):
        if not isinstance(vote, dict) or not isinstance(vote.get("order"), list):
            raise InvalidParameterError(f'ballot {i} needs an "order" list')
        count = vote.get("count", 1)
        if not _is_count(count) or count < 1:
            raise InvalidParameterError(f"ballot {i} has invalid count {count!r}")
        unknown = [x for x in vote["order"] if x not in index]
        if unknown:
            raise InvalidParameterError(f"ballot {i} names unknown candidate {unknown[0]!r}")
        order = tuple(index[x] for x in vote["order"])
        if len(order) != len(names) or len(set(order)) != len(names):
            raise InvalidParameterError(f"ballot {i} is not a permutation of all {len(names)} candidates")
        ballots.append((order, count))
    return Election(len(names), tuple(names), tuple(ballots))


def serialize_election(election: Election) -> dict:
    names = election.candidate_names
    return {
        "candidates": list(names),
        "votes": [{"order": [names[c] for c in order], "count": count}
                  for order, count in election.ballots],
    }


@dataclass(frozen=True)
class Utilities:
    ids: tuple
    profile: UtilityProfile


def parse_utilities(doc, candidate_names) -> Utilities:
    if not isinstance(doc, dict) or not isinstance(doc.get("manipulators"), list):
        raise InvalidParameterError('utility file needs a "manipulators" list')
    if not doc["manipulators"]:
        raise InvalidParameterError("at least one manipulator is required")
    ids, rows = [], []
    for i, man in enumerate(doc["manipulators"]):
        if not isinstance(man, dict) or not isinstance(man.get("utilities"), dict):
            raise InvalidParameterError(f'manipulator {i} needs a "utilities" mapping')
        table = man["utilities"]
        extra = set(table) - set(candidate_names)
        if extra:
            raise InvalidParameterError(f"manipulator {i} rates unknown candidate {sorted(extra)[0]!r}")
        row = []
        for name in candidate_names:
            if name not in table:
                raise InvalidParameterError(f"manipulator {i} has no utility for {name!r}")
            u = table[name]
            if not _is_count(u) or u < 0:
                raise InvalidParameterError(f"manipulator {i} has invalid utility {u!r} for {name!r}")
            row.append(u)
        ids.append(str(man.get("id", f"u{i + 1}")))
        rows.append(row)
    return Utilities(tuple(ids), UtilityProfile(rows))


def serialize_utilities(utilities: Utilities, candidate_names) -> dict:
    return {"manipulators": [
        {"id": mid, "utilities": dict(zip(candidate_names, row))}
        for mid, row in zip(utilities.ids, utilities.profile.rows)]}


def default_ids(r: int) -> tuple:
    return tuple(f"u{i + 1}" for i in range(r))


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidParameterError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"{path} is not valid JSON: {exc}") from exc


def parse_order(text: str, candidate_names) -> tuple:
    """Comma-separated candidate names -> index permutation."""
    index = {name: i for i, name in enumerate(candidate_names)}
    names = [x.strip() for x in text.split(",") if x.strip()]
    unknown = [x for x in names if x not in index]
    if unknown:
        raise InvalidParameterError(f"lexicographic order names unknown candidate {unknown[0]!r}")
    order = tuple(index[x] for x in names)
    if sorted(order) != list(range(len(candidate_names))):
        raise InvalidParameterError("lexicographic order must list every candidate exactly once")
    return order
