"""Command-line front end: ``shortlist-strat {winners,manipulate,check,gen}``.

Results go to stdout as JSON; diagnostics go to stderr.

Exit codes: 0 success (or threshold met), 1 threshold unmet, 2 bad input,
3 solver/oracle mismatch found by ``check``.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import manipulation, oracle
from .election import Election, partition, score, winners
from .errors import InternalConsistencyError, InvalidParameterError, ShortlistError
from .formats import (Utilities, default_ids, load_json, parse_election, parse_order,
                      parse_utilities, serialize_election, serialize_utilities)
from .manipulation import CmInstance, applicable_solvers, outcome
from .tiebreak import Lexicographic, Optimistic, Pessimistic
from .utility import CANDEGAL, EGAL, UTIL, EvalVariant, evaluate

log = logging.getLogger("shortlist_strat")

EXIT_OK, EXIT_UNMET, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2, 3
THREADS_ENV = "SHORTLIST_STRAT_THREADS"


class InputError(Exception):
    pass


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _names(election: Election, members) -> list:
    return [election.candidate_names[c] for c in sorted(members)]


def _rule(args, election: Election):
    if args.tie == "lex":
        if args.lex_order:
            return Lexicographic(parse_order(args.lex_order, election.candidate_names))
        return Lexicographic(tuple(range(election.num_candidates)))
    if args.eval is None:
        raise InputError(f"--tie {args.tie} needs --eval")
    variant = EvalVariant.parse(args.eval)
    return Optimistic(variant) if args.tie == "opt" else Pessimistic(variant)


def _utilities(args, election: Election, required: bool) -> Utilities | None:
    if args.utilities is None:
        if required:
            raise InputError("--utilities is required here")
        return None
    return parse_utilities(load_json(args.utilities), election.candidate_names)


# ------------------------------------------------------------------------ commands

def cmd_winners(args) -> int:
    election = parse_election(load_json(args.election))
    rule = _rule(args, election)
    utils = _utilities(args, election, required=args.tie != "lex")
    profile = utils.profile if utils else None
    scores = score(election, args.ell)
    part = partition(scores, args.k)
    egroup = winners(election, args.ell, args.k, rule, profile)
    value = None
    if args.eval is not None and profile is not None:
        value = evaluate(profile, egroup, EvalVariant.parse(args.eval))
    _emit({
        "winners": _names(election, egroup),
        "scores": dict(zip(election.candidate_names, scores)),
        "partition": {"confirmed": _names(election, part.confirmed),
                      "pending": _names(election, part.pending),
                      "rejected": _names(election, part.rejected)},
        "value": value,
    })
    return EXIT_OK


def cmd_manipulate(args) -> int:
    election = parse_election(load_json(args.election))
    utils = _utilities(args, election, required=True)
    rule = _rule(args, election)
    inst = CmInstance(election, args.ell, args.k, utils.profile, EvalVariant.parse(args.eval),
                      rule, args.threshold)
    if args.solver == "oracle":
        _, ballots = oracle.brute_cm(inst)
        result = outcome(inst, ballots)
        solver = "oracle"
    else:
        solver = applicable_solvers(inst)[0]
        result = manipulation.SOLVERS[solver](inst)
        if result is None:  # pragma: no cover - some state is always feasible
            raise ShortlistError("no manipulation found")
    met = result.meets(args.threshold)
    _emit({
        "value": result.value,
        "ballots": [[election.candidate_names[c] for c in b] for b in result.ballots],
        "winners": _names(election, result.resulting_egroup),
        "meets_threshold": met,
        "solver": solver,
    })
    return EXIT_OK if met else EXIT_UNMET


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _trial_instance(seed: int, trial: int, bounds: dict):
    rng = random.Random(f"{seed}:{trial}")
    m = rng.randint(2, bounds["max_m"])
    ell = rng.randint(1, min(bounds["max_ell"], m - 1))
    k = rng.randint(1, min(bounds["max_k"], m - 1))
    spec = oracle.RandomSpec(m, rng.randint(0, bounds["max_n"]), rng.randint(1, bounds["max_r"]),
                             ell, k, bounds["max_util"], rng.getrandbits(63))
    election, profile = oracle.gen_random(spec)
    order = list(range(m))
    rng.shuffle(order)
    return spec, election, profile, tuple(order)


def _rule_name(rule) -> str:
    if isinstance(rule, Lexicographic):
        return "lex"
    return "opt" if isinstance(rule, Optimistic) else "pess"


def check_trial(seed: int, trial: int, bounds: dict) -> dict:
    """Compare every applicable fast solver with the oracle on one random instance."""
    spec, election, profile, order = _trial_instance(seed, trial, bounds)
    mismatches, comparisons = [], 0
    for variant in (UTIL, CANDEGAL, EGAL):
        for rule in (Lexicographic(order), Optimistic(variant), Pessimistic(variant)):
            inst = CmInstance(election, spec.ell, spec.k, profile, variant, rule)
            expected, _ = oracle.brute_cm(inst)
            for name in applicable_solvers(inst):
                comparisons += 1
                try:
                    got = manipulation.SOLVERS[name](inst)
                    value = None if got is None else got.value
                except ShortlistError as exc:
                    value = f"error: {exc}"
                if value != expected:
                    names = election.candidate_names
                    mismatches.append({
                        "trial": trial, "solver": name, "expected": expected, "got": value,
                        "ell": spec.ell, "k": spec.k, "eval": variant.value,
                        "tie": _rule_name(rule),
                        "lex_order": [names[c] for c in order],
                        "election": serialize_election(election),
                        "utilities": serialize_utilities(Utilities(default_ids(profile.r), profile), names),
                    })
    return {"comparisons": comparisons, "mismatches": mismatches}


def cmd_check(args) -> int:
    bounds = {"max_m": args.max_m, "max_n": args.max_n, "max_r": args.max_r,
              "max_util": args.max_util, "max_ell": args.max_ell, "max_k": args.max_k}
    if args.trials < 0 or args.max_m < 2 or args.max_r < 1 or args.max_n < 0 \
            or args.max_util < 0 or args.max_ell < 1 or args.max_k < 1:
        raise InputError("check bounds need trials >= 0, max-m >= 2, max-r >= 1, "
                         "max-ell >= 1, max-k >= 1, max-n >= 0, max-util >= 0")
    worst = max(math.comb(args.max_m, ell) for ell in range(1, min(args.max_ell, args.max_m - 1) + 1))
    if worst ** args.max_r > oracle.ENUMERATION_LIMIT:
        raise InputError("bounds exceed the oracle enumeration limit")
    workers = min(_threads(), max(1, args.trials))
    if workers == 1:
        results = [check_trial(args.seed, t, bounds) for t in range(args.trials)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(check_trial, [args.seed] * args.trials,
                                    range(args.trials), [bounds] * args.trials))
    mismatches = [mm for res in results for mm in res["mismatches"]]
    summary = {"trials": args.trials,
               "comparisons": sum(res["comparisons"] for res in results),
               "mismatches": len(mismatches)}
    if mismatches:
        summary["first_mismatch"] = mismatches[0]
        log.error("solver disagrees with the oracle (trial %d, %s)",
                  mismatches[0]["trial"], mismatches[0]["solver"])
    _emit(summary)
    return EXIT_MISMATCH if mismatches else EXIT_OK


def _parse_sets(text: str, universe: int) -> list:
    sets = []
    for i, chunk in enumerate(text.split(";")):
        items = [x.strip() for x in chunk.split(",") if x.strip()]
        try:
            elems = {int(x) for x in items}
        except ValueError as exc:
            raise InputError(f"set {i + 1}: elements must be integers") from exc
        if any(not 1 <= x <= universe for x in elems):
            raise InputError(f"set {i + 1} has an element outside 1..{universe}")
        sets.append(frozenset(x - 1 for x in elems))
    return sets


def cmd_gen(args) -> int:
    if args.kind == "random":
        spec = oracle.RandomSpec(args.m, args.n, args.r, 1, 1, args.max_util, args.seed)
        election, profile = oracle.gen_random(spec)
        names = election.candidate_names
        doc = {"election": serialize_election(election),
               "utilities": serialize_utilities(Utilities(default_ids(profile.r), profile), names)}
        for key, path in (("election", args.election_out), ("utilities", args.utilities_out)):
            if path:
                with open(path, "w") as fh:
                    json.dump(doc[key], fh, indent=2)
                    fh.write("\n")
        _emit(doc)
        return EXIT_OK

    sc = oracle.SetCoverInstance(args.universe, _parse_sets(args.sets, args.universe), args.budget)
    tie = oracle.reduce_setcover_to_tie(sc)
    persp = tie.perspective
    m0 = persp.profile.m
    names = [f"S{j + 1}" for j in range(len(sc.sets))] + ["spare"] * (m0 - len(sc.sets))
    inst = oracle.reduce_tie_to_cm(persp, args.ell)
    cm_names = names + [f"d{j + 1}" for j in range(inst.m - m0)]
    cm_election = Election(inst.m, tuple(cm_names), inst.election.ballots)
    _emit({
        "perspective": {
            "candidates": names,
            "confirmed": [names[c] for c in sorted(persp.confirmed)],
            "pending": [names[c] for c in sorted(persp.pending)],
            "k": persp.k,
            "threshold": tie.threshold,
            "utilities": serialize_utilities(
                Utilities(tuple(f"x{i + 1}" for i in range(persp.profile.r)), persp.profile), names),
        },
        "manipulation": {
            "election": serialize_election(cm_election),
            "utilities": serialize_utilities(
                Utilities(default_ids(inst.r), inst.profile), cm_names),
            "ell": inst.ell, "k": inst.k, "eval": "egal", "threshold": tie.threshold,
        },
    })
    return EXIT_OK


# -------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shortlist-strat",
        description="Winners, tie-breaking and coalitional manipulation for l-Bloc elections.")
    sub = parser.add_subparsers(dest="command", required=True)

    def election_flags(p, manipulate=False):
        p.add_argument("--election", required=True, help="election JSON file")
        p.add_argument("--ell", type=int, required=True, help="approvals per ballot")
        p.add_argument("--k", type=int, required=True, help="egroup size")
        p.add_argument("--tie", choices=["lex", "opt", "pess"], required=True)
        p.add_argument("--eval", choices=[v.value for v in EvalVariant], required=manipulate)
        p.add_argument("--lex-order", help="comma-separated names; default: candidate file order")
        p.add_argument("--utilities", required=manipulate, help="utility JSON file")

    w = sub.add_parser("winners", help="winning egroup of an election")
    election_flags(w)
    w.set_defaults(func=cmd_winners)

    mp = sub.add_parser("manipulate", help="best coalitional manipulation")
    election_flags(mp, manipulate=True)
    mp.add_argument("--threshold", type=int, help="exit 1 unless the value reaches this")
    mp.add_argument("--solver", choices=["fast", "oracle"], default="fast")
    mp.set_defaults(func=cmd_manipulate)

    ck = sub.add_parser("check", help="cross-check fast solvers against brute force")
    ck.add_argument("--trials", type=int, default=100)
    ck.add_argument("--seed", type=int, default=0)
    ck.add_argument("--max-m", type=int, default=6)
    ck.add_argument("--max-n", type=int, default=5)
    ck.add_argument("--max-r", type=int, default=3)
    ck.add_argument("--max-util", type=int, default=3)
    ck.add_argument("--max-ell", type=int, default=3)
    ck.add_argument("--max-k", type=int, default=4)
    ck.set_defaults(func=cmd_check)

    gen = sub.add_parser("gen", help="generate instances")
    gsub = gen.add_subparsers(dest="kind", required=True)
    gr = gsub.add_parser("random", help="random election and utilities")
    gr.add_argument("--m", type=int, required=True)
    gr.add_argument("--n", type=int, required=True)
    gr.add_argument("--r", type=int, required=True)
    gr.add_argument("--max-util", type=int, default=3)
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("--election-out", help="also write the election file here")
    gr.add_argument("--utilities-out", help="also write the utility file here")
    gs = gsub.add_parser("setcover", help="tie-breaking instance from a set cover instance")
    gs.add_argument("--universe", type=int, required=True)
    gs.add_argument("--sets", required=True, help='1-based elements, e.g. "1,2;2,3"')
    gs.add_argument("--budget", type=int, required=True)
    gs.add_argument("--ell", type=int, default=1, help="ell for the embedded manipulation instance")
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="shortlist-strat: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalConsistencyError:
        raise
    except (InputError, InvalidParameterError, ShortlistError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
