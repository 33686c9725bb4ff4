"""Manipulator utility profiles and the three egroup evaluation functions."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidParameterError, UnsupportedVariantError


class EvalVariant(enum.Enum):
    UTILITARIAN = "util"
    EGALITARIAN = "egal"
    CANDIDATE_WISE_EGALITARIAN = "candegal"

    @classmethod
    def parse(cls, text: str) -> "EvalVariant":
        for v in cls:
            if v.value == text:
                return v
        raise InvalidParameterError(f"unknown evaluation variant {text!r}")


UTIL = EvalVariant.UTILITARIAN
EGAL = EvalVariant.EGALITARIAN
CANDEGAL = EvalVariant.CANDIDATE_WISE_EGALITARIAN


@dataclass(frozen=True)
class UtilityProfile:
    """``rows[i][c]`` is manipulator ``i``'s utility for candidate ``c``."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(u) for u in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise InvalidParameterError("a utility profile needs at least one manipulator")
        width = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != width:
                raise InvalidParameterError(f"utility row {i} has length {len(row)}, expected {width}")
            if any(u < 0 for u in row):
                raise InvalidParameterError(f"utility row {i} has a negative entry")

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0])

    def column(self, c: int) -> tuple:
        """Type vector of candidate ``c``: its utility for every manipulator."""
        return tuple(row[c] for row in self.rows)

    def u_diff(self) -> int:
        return len({u for row in self.rows for u in row})


def evaluate(profile: UtilityProfile, egroup: Iterable[int], variant: EvalVariant) -> int:
    members = list(egroup)
    for c in members:
        if not 0 <= c < profile.m:
            raise InvalidParameterError(f"candidate {c} outside profile width {profile.m}")
    if variant is UTIL:
        return sum(row[c] for row in profile.rows for c in members)
    if variant is EGAL:
        return min(sum(row[c] for c in members) for row in profile.rows)
    if variant is CANDEGAL:
        return sum(min(row[c] for row in profile.rows) for c in members)
    raise UnsupportedVariantError(f"unknown variant {variant!r}")


def contract(profile: UtilityProfile, variant: EvalVariant) -> tuple:
    """Collapse the profile into one row whose egroup sums reproduce ``variant``.

    Column sums for the utilitarian variant, column minima for the candidate-wise
    egalitarian one. The egalitarian variant has no such row.
    """
    if variant is UTIL:
        return tuple(sum(col) for col in zip(*profile.rows))
    if variant is CANDEGAL:
        return tuple(min(col) for col in zip(*profile.rows))
    raise UnsupportedVariantError("the egalitarian evaluation cannot be contracted to one row")
