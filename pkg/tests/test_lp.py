import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import enumerate_vertices, random_bounded_lp

from tegsgrid.lp import (
    EQ,
    GE,
    INFEASIBLE,
    ITERATION_LIMIT,
    LE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    LpConstructionError,
    MpsError,
    SolveOptions,
    export_standard_form,
    from_dense,
    read_mps,
    solve,
)

BACKENDS = ("highs", "simplex")


@pytest.mark.parametrize("backend", BACKENDS)
def test_free_slack_goes_to_zero(backend):
    lp = LinearProgram()
    lp.add_var(0, 10, 1.0)
    sol = solve(lp, SolveOptions(backend=backend))
    assert sol.status == OPTIMAL
    assert sol.primal[0] == pytest.approx(0.0, abs=1e-9)


def test_empty_program_is_optimal_with_zero_objective():
    sol = solve(LinearProgram())
    assert sol.status == OPTIMAL and sol.objective_value == 0.0


def test_duplicate_entries_are_summed():
    lp = LinearProgram()
    x = lp.add_var(0, 10)
    r = lp.add_constraint("<=", 4.0, [(x, 2.0), (x, 3.0)])
    assert lp.coefficient(r, x) == 5.0
    rows, cols, vals = lp.triplets()
    assert len(vals) == 1


def test_out_of_range_column_is_rejected():
    lp = LinearProgram()
    lp.add_var()
    with pytest.raises(LpConstructionError):
        lp.add_constraint("<=", 1.0, [(3, 1.0)])


def test_inverted_bounds_are_rejected():
    with pytest.raises(LpConstructionError):
        LinearProgram().add_var(2.0, 1.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_bound_attaining_optimum(backend):
    sol = solve(from_dense([-1.0], lower=[0.0], upper=[1.0]), SolveOptions(backend=backend))
    assert sol.status == OPTIMAL
    assert sol.primal[0] == pytest.approx(1.0)
    assert sol.objective_value == pytest.approx(-1.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_contradictory_rows_are_infeasible(backend):
    lp = from_dense([1.0, 1.0], [[1, 1], [1, 1]], [">=", "<="], [2.0, 1.0], lower=[0, 0], upper=[1, 1])
    assert solve(lp, SolveOptions(backend=backend)).status == INFEASIBLE


@pytest.mark.parametrize("backend", BACKENDS)
def test_unbounded_direction_is_reported(backend):
    lp = from_dense([-1.0, 0.0], [[1, -1]], ["<="], [1.0])
    assert solve(lp, SolveOptions(backend=backend)).status == UNBOUNDED


def test_iteration_limit_is_not_infeasible():
    rng = np.random.default_rng(3)
    c, A, senses, b, lo, up = random_bounded_lp(rng)
    while len(b) < 4:
        c, A, senses, b, lo, up = random_bounded_lp(rng)
    lp = from_dense(c, A, senses, b, lo, up)
    sol = solve(lp, SolveOptions(backend="simplex", iteration_limit=1))
    assert sol.status in (ITERATION_LIMIT, OPTIMAL, INFEASIBLE)
    if sol.status == ITERATION_LIMIT:
        assert sol.status != INFEASIBLE


def test_sense_aliases_normalize():
    lp = LinearProgram()
    x = lp.add_var(0, 5)
    lp.add_constraint("le", 3, [(x, 1)])
    lp.add_constraint(">=", 1, [(x, 1)])
    lp.add_constraint("==", 2, [(x, 1)])
    assert list(lp.row_sense) == [LE, GE, EQ]


@pytest.mark.parametrize("backend", BACKENDS)
def test_random_lps_match_vertex_enumeration(backend):
    rng = np.random.default_rng(20240611)
    for _ in range(60):
        c, A, senses, b, lo, up = random_bounded_lp(rng)
        best, _ = enumerate_vertices(c, A, senses, b, lo, up)
        sol = solve(from_dense(c, A, senses, b, lo, up), SolveOptions(backend=backend))
        if best is None:
            assert sol.status == INFEASIBLE
        else:
            assert sol.status == OPTIMAL
            assert abs(sol.objective_value - best) <= 1e-6


@pytest.mark.parametrize("backend", BACKENDS)
def test_solutions_are_primal_feasible(backend):
    rng = np.random.default_rng(5)
    for _ in range(40):
        lp = from_dense(*random_bounded_lp(rng))
        sol = solve(lp, SolveOptions(backend=backend))
        if sol.status == OPTIMAL:
            assert lp.max_violation(sol.primal) <= 1e-7 * 100


def _normalized_dual_bound(lp, sol):
    """Dual objective with bound multipliers recovered from reduced costs."""
    y = sol.duals
    reduced = lp.objective - lp.matrix().T @ y
    bound_part = np.where(reduced > 0, reduced * lp.lower, reduced * lp.upper)
    return float(y @ lp.rhs + bound_part.sum())


@pytest.mark.parametrize("backend", BACKENDS)
def test_weak_duality(backend):
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(60):
        lp = from_dense(*random_bounded_lp(rng))
        sol = solve(lp, SolveOptions(backend=backend))
        if sol.status != OPTIMAL or sol.duals is None:
            continue
        assert _normalized_dual_bound(lp, sol) <= sol.objective_value + 1e-6
        checked += 1
    assert checked > 10


@settings(max_examples=60)
@given(seed=st.integers(0, 2**32 - 1), factor=st.floats(0.01, 100.0))
def test_argmin_invariant_to_positive_objective_scaling(seed, factor):
    rng = np.random.default_rng(seed)
    c, A, senses, b, lo, up = random_bounded_lp(rng)
    c = c + rng.random(c.size)  # generic costs: a unique optimum almost surely
    lp = from_dense(c, A, senses, b, lo, up)
    a = solve(lp)
    s = solve(lp.scaled_objective(factor))
    assert a.status == s.status
    if a.status == OPTIMAL:
        np.testing.assert_allclose(a.primal, s.primal, atol=1e-6)


@pytest.mark.parametrize("backend", BACKENDS)
def test_repeat_solves_are_bitwise_identical(backend):
    rng = np.random.default_rng(99)
    for _ in range(10):
        lp = from_dense(*random_bounded_lp(rng))
        a = solve(lp, SolveOptions(backend=backend))
        b = solve(lp, SolveOptions(backend=backend))
        assert a.status == b.status
        if a.status == OPTIMAL:
            assert a.objective_value == b.objective_value
            assert np.array_equal(a.primal, b.primal)


def test_simplex_survives_degenerate_cycling_example():
    # Beale's classic cycling instance under the largest-coefficient rule
    c = [-0.75, 150.0, -0.02, 6.0]
    A = [[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]]
    lp = from_dense(c, A, ["<=", "<=", "<="], [0.0, 0.0, 1.0])
    sol = solve(lp, SolveOptions(backend="simplex", stall_threshold=5))
    assert sol.status == OPTIMAL
    assert sol.objective_value == pytest.approx(-0.05)


# --------------------------------------------------------------------------
# MPS


def test_mps_smallest_case():
    lp = LinearProgram()
    lp.add_var(0, 1, 1.0, name="x")
    text = export_standard_form(lp)
    assert text.count(" N ") == 1
    bounds = text.split("BOUNDS")[1]
    assert " UP " in bounds
    assert "ROWS" in text and "COLUMNS" in text and "RHS" in text and text.rstrip().endswith("ENDATA")


def test_mps_empty_program():
    text = export_standard_form(LinearProgram())
    cols = text.split("COLUMNS")[1].split("RHS")[0]
    assert cols.strip() == ""
    assert read_mps(text).num_vars == 0


def test_mps_name_collision_is_an_error():
    lp = LinearProgram()
    lp.add_var(name="x")
    lp.add_var(name="x")
    with pytest.raises(MpsError):
        export_standard_form(lp)


@settings(max_examples=40)
@given(seed=st.integers(0, 2**32 - 1))
def test_mps_round_trip_preserves_program(seed):
    rng = np.random.default_rng(seed)
    c, A, senses, b, lo, up = random_bounded_lp(rng)
    lo = np.where(rng.random(lo.size) < 0.2, -math.inf, lo)
    up = np.where(rng.random(up.size) < 0.2, math.inf, up)
    lp = from_dense(c, A, senses, b, lo, up)
    back = read_mps(export_standard_form(lp))
    assert back.num_vars == lp.num_vars and back.num_rows == lp.num_rows
    np.testing.assert_array_equal(back.objective, lp.objective)
    np.testing.assert_array_equal(back.lower, lp.lower)
    np.testing.assert_array_equal(back.upper, lp.upper)
    np.testing.assert_array_equal(back.rhs, lp.rhs)
    assert list(back.row_sense) == list(lp.row_sense)
    assert (back.matrix() != lp.matrix()).nnz == 0
