"""Exact coalitional manipulation for l-Bloc shortlisting elections."""

from .election import (CandidatePartition, Election, approval_sets, ballots_from_approvals,
                       partition, score, winners)
from .errors import (InfeasibleDemandError, InternalConsistencyError, InvalidParameterError,
                     InvalidProgramError, ShortlistError, TooLargeError, UnsupportedVariantError)
from .tiebreak import (Behavior, Lexicographic, Optimistic, Pessimistic, TiePerspective,
                       apply_lex, simulate_lex, tie_break)
from .utility import CANDEGAL, EGAL, UTIL, EvalVariant, UtilityProfile, contract, evaluate

__version__ = "0.1.0"
