import itertools

import numpy as np
import pytest

from sqzdecomp.fields import Polynomial, gf
from sqzdecomp.matrices import Matrix, companion, direct_sum, is_diagonalizable, is_square_zero
from sqzdecomp.oracle import (
    InfeasibleError,
    SearchBudget,
    census,
    count_decompositions,
    count_square_zero,
    enumerate_square_zero,
    feasibility,
    matrix_from_index,
    matrix_index,
    oracle_decompose,
    small_order_budget,
    square_zero_count_formula,
    square_zero_set,
)

P3 = Polynomial(gf(3), [2, 2, 2, 1])

# counts frozen from full scans of all q^(n^2) matrices
SQUARE_ZERO_COUNTS = {(1, 3): 1, (2, 3): 9, (3, 3): 105, (2, 5): 25, (2, 9): 81, (4, 3): 7281, (3, 5): 745}


def _pure_python_count(n, q):
    F = gf(q)
    c = 0
    for vals in itertools.product(range(q), repeat=n * n):
        if is_square_zero(Matrix(F, [vals[i * n : (i + 1) * n] for i in range(n)])):
            c += 1
    return c


@pytest.mark.parametrize("n,q", [(1, 3), (2, 3), (2, 5), (2, 9)])
def test_counts_against_pure_python(n, q):
    assert _pure_python_count(n, q) == SQUARE_ZERO_COUNTS[(n, q)]


@pytest.mark.parametrize("nq,count", sorted(SQUARE_ZERO_COUNTS.items()))
def test_count_formula_and_enumerators(nq, count):
    n, q = nq
    assert square_zero_count_formula(n, q) == count
    assert count_square_zero(n, gf(q)) == count


@pytest.mark.parametrize("n,q", [(2, 3), (3, 3), (2, 5), (2, 9)])
def test_enumerators_agree_as_sets(n, q):
    F = gf(q)
    a = square_zero_set(n, F, "exhaustive")
    b = square_zero_set(n, F, "rank_parameterized")
    assert a == b and len(b) == SQUARE_ZERO_COUNTS[(n, q)]


def test_rank_parameterized_has_no_duplicates():
    F = gf(5)
    mats = list(enumerate_square_zero(3, F, SearchBudget("rank_parameterized")))
    assert len(mats) == len(set(mats)) == 745


def test_randomized_samples_are_square_zero():
    for q, n in [(3, 6), (9, 5), (5, 4), (7, 3)]:
        F = gf(q)
        ms = list(enumerate_square_zero(n, F, SearchBudget("randomized", 500, 4)))
        assert len(ms) == 500
        assert all(is_square_zero(m) and not m.is_zero() for m in ms)


def test_randomized_is_seeded():
    F = gf(5)
    a = list(enumerate_square_zero(4, F, SearchBudget("randomized", 300, 9)))
    b = list(enumerate_square_zero(4, F, SearchBudget("randomized", 300, 9)))
    c = list(enumerate_square_zero(4, F, SearchBudget("randomized", 300, 10)))
    assert a == b and a != c


def test_randomized_reaches_every_nonzero_square_zero():
    F = gf(3)
    full = square_zero_set(3, F)
    got = set()
    for m in enumerate_square_zero(3, F, SearchBudget("randomized", 20000, 3)):
        got.add(np.array(m.rows, dtype=np.int8).tobytes())
    assert got == full - {np.zeros((3, 3), dtype=np.int8).tobytes()}


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget("bogus")
    with pytest.raises(ValueError):
        SearchBudget(max_candidates=0)


def test_infeasible_modes():
    with pytest.raises(InfeasibleError):
        list(enumerate_square_zero(4, gf(5), SearchBudget("exhaustive")))
    with pytest.raises(InfeasibleError):
        list(enumerate_square_zero(6, gf(5), SearchBudget("rank_parameterized")))


def test_oracle_obstructed_companion_not_found_is_proof():
    res = oracle_decompose(companion(P3), SearchBudget("exhaustive", 3**9))
    assert res.found is None and res.proves_impossible and res.candidates == 105


def test_oracle_finds_x5():
    F = gf(3)
    A = companion(Polynomial(F, [0, 0, 0, 0, 0, 1]))
    res = oracle_decompose(A, SearchBudget("randomized", 10**5, 1))
    D, M = res.found
    assert D + M == A and is_square_zero(M) and is_diagonalizable(D)
    assert not res.proves_impossible


def test_count_decompositions_x2():
    F = gf(3)
    A = companion(Polynomial(F, [0, 0, 1]))
    res, hits = count_decompositions(A, SearchBudget("exhaustive", 81))
    # D = A - M must square to the identity or be 0/idempotent; checked by scan
    brute = sum(1 for M in enumerate_square_zero(2, F, SearchBudget("exhaustive", 81)) if is_diagonalizable(A - M))
    assert hits == brute and hits > 0 and res.candidates == 9


def test_oracle_six_obstructed_companions():
    from sqzdecomp.obstruction import obstructed_cubics

    for p in obstructed_cubics(gf(3)):
        assert oracle_decompose(companion(p), SearchBudget("rank_parameterized")).proves_impossible


def test_matrix_index_roundtrip():
    F = gf(5)
    A = Matrix(F, [[1, 2], [3, 4]])
    assert matrix_from_index(matrix_index(A), 2, F) == A


def test_census_order2_gf3():
    rep = census(2, gf(3))
    assert (rep.decomposable, rep.non_decomposable, rep.total) == (81, 0, 81)
    assert rep.to_kv().splitlines()[2] == "decomposable=81"


def test_census_threads_agree():
    a = census(2, gf(5), threads=1)
    b = census(2, gf(5), threads=3)
    assert a.decomposable == b.decomposable == 625


def test_census_infeasible():
    with pytest.raises(InfeasibleError):
        census(5, gf(5))


def test_small_order_budget_choice():
    assert small_order_budget(4, gf(3)).mode == "rank_parameterized"
    assert small_order_budget(4, gf(9)).mode == "randomized"
    assert feasibility(2, gf(3))["square_zero"] == 9


def test_obstructed_sum_randomized_zero_hits():
    A = direct_sum([companion(P3)] * 2)
    res, hits = count_decompositions(A, SearchBudget("randomized", 20000, 2))
    assert hits == 0 and res.candidates == 20000
