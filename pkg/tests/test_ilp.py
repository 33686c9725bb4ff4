import itertools
import random

import pytest

from shortlist_strat import InvalidProgramError
from shortlist_strat.ilp import IntegerProgram, IpStatus, check_assignment, solve


def random_program(rng):
    prog = IntegerProgram()
    n = rng.randint(1, 4)
    names = []
    for i in range(n):
        lo = rng.randint(-2, 2)
        names.append(prog.add_var(f"v{i}", lo, lo + rng.randint(0, 5)))
    for _ in range(rng.randint(0, 4)):
        coeffs = {v: rng.randint(-3, 3) for v in names if rng.random() < 0.7}
        prog.add_constraint(coeffs, rng.choice(["<=", "=", ">="]), rng.randint(-6, 6))
    prog.maximize({v: rng.randint(-3, 3) for v in names})
    return prog


def grid_optimum(prog):
    best = None
    ranges = [range(v.lower, v.upper + 1) for v in prog.variables]
    for point in itertools.product(*ranges):
        a = {v.name: x for v, x in zip(prog.variables, point)}
        if check_assignment(prog, a):
            val = sum(c * a[name] for name, c in prog.objective.items())
            best = val if best is None else max(best, val)
    return best


def test_clipped_maximum():
    prog = IntegerProgram()
    x = prog.add_var("x", 0, 5)
    prog.add_constraint({x: 1}, "<=", 3)
    prog.maximize({x: 1})
    sol = solve(prog)
    assert sol.optimal and sol.assignment == {"x": 3} and sol.objective_value == 3


def test_infeasible():
    prog = IntegerProgram()
    x = prog.add_var("x", 0, 5)
    prog.add_constraint({x: 1}, ">=", 2)
    prog.add_constraint({x: 1}, "<=", 1)
    assert solve(prog).status is IpStatus.INFEASIBLE


def test_two_variable_grid():
    prog = IntegerProgram()
    x, y = prog.add_var("x", 0, 2), prog.add_var("y", 0, 2)
    prog.add_constraint({x: 1, y: 2}, "<=", 4)
    prog.maximize({x: 1, y: 1})
    sol = solve(prog)
    assert sol.objective_value == 3 and check_assignment(prog, sol.assignment)


def test_negative_optimum_found():
    prog = IntegerProgram()
    x = prog.add_var("x", 1, 4)
    prog.maximize({x: -2})
    assert solve(prog).objective_value == -2


@pytest.mark.parametrize("build", [
    lambda p: p.add_var("x", 0, None),
    lambda p: p.add_var("x", 3, 1),
    lambda p: (p.add_var("x", 0, 1), p.add_var("x", 0, 1)),
    lambda p: (p.add_var("x", 0, 1), p.add_constraint({"y": 1}, "<=", 1)),
    lambda p: (p.add_var("x", 0, 1), p.add_constraint({"x": 1}, "<", 1)),
    lambda p: (p.add_var("x", 0, 1), p.add_constraint({"x": 0.5}, "<=", 1)),
    lambda p: (p.add_var("x", 0, 1), p.maximize({"z": 1})),
])
def test_invalid_programs(build):
    prog = IntegerProgram()
    build(prog)
    with pytest.raises(InvalidProgramError):
        solve(prog)


def test_random_programs_match_grid():
    rng = random.Random(2024)
    for _ in range(300):
        prog = random_program(rng)
        sol = solve(prog)
        expected = grid_optimum(prog)
        if expected is None:
            assert sol.status is IpStatus.INFEASIBLE
        else:
            assert sol.objective_value == expected
            assert check_assignment(prog, sol.assignment)


def test_deterministic():
    rng = random.Random(7)
    for _ in range(50):
        prog = random_program(rng)
        assert solve(prog) == solve(prog)
