import itertools
import random

import pytest
from hypothesis import given

from conftest import matrices, monic_polys, random_invertible, random_matrix
from sqzdecomp.fields import Polynomial, gf, is_squarefree, splits_distinct_linear
from sqzdecomp.matrices import (
    CompanionSpec,
    Matrix,
    SingularMatrixError,
    char_poly,
    companion,
    conjugate,
    direct_sum,
    eval_poly,
    format_matrix,
    hessenberg,
    inverse,
    is_diagonalizable,
    is_diagonalizable_minpoly,
    is_invertible,
    is_nonderogatory,
    is_square_zero,
    mat_trace,
    min_poly,
    parse_matrix,
    rank,
    rank_kernel,
    solve_or_invert,
    vector_annihilator,
)


def _laplace_charpoly(A):
    """det(xI - A) by cofactor expansion over polynomial entries."""
    F = A.spec
    n = A.n
    x = Polynomial.x(F)
    ent = [
        [(x if i == j else Polynomial(F)) - Polynomial(F, [A.rows[i][j]]) for j in range(n)] for i in range(n)
    ]

    def det(m):
        if len(m) == 1:
            return m[0][0]
        total = Polynomial(F)
        for j in range(len(m)):
            minor = [row[:j] + row[j + 1 :] for row in m[1:]]
            term = m[0][j] * det(minor)
            total = total + term if j % 2 == 0 else total - term
        return total

    return det(ent)


def _naive_rank_prime(A):
    p = A.spec.p
    m = [list(r) for r in A.rows]
    r = 0
    for c in range(A.n):
        piv = next((i for i in range(r, A.n) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(A.n):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        r += 1
    return r


@given(matrices(n_max=4))
def test_char_poly_matches_cofactor_expansion(A):
    assert char_poly(A) == _laplace_charpoly(A)


@given(matrices(n_max=6))
def test_cayley_hamilton_and_min_poly(A):
    f = char_poly(A)
    mu = min_poly(A)
    assert eval_poly(f, A).is_zero()
    assert eval_poly(mu, A).is_zero()
    assert (f % mu).is_zero()
    assert mu.is_monic()


@given(matrices(qs=(3, 5, 7), n_max=6))
def test_rank_matches_naive(A):
    r, ker = rank_kernel(A)
    assert r == _naive_rank_prime(A) == rank(A)
    assert len(ker) == A.n - r
    for v in ker:
        assert all(not x for x in A.apply(v))


@given(matrices(n_max=5))
def test_inverse_or_witness(A):
    inv, w = solve_or_invert(A)
    if inv is not None:
        assert inv * A == Matrix.identity(A.spec, A.n) == A * inv
    else:
        assert any(w) and all(not x for x in A.apply(w))
        with pytest.raises(SingularMatrixError) as e:
            inverse(A)
        assert e.value.witness is not None


@given(matrices(n_max=5))
def test_hessenberg_is_similar(A):
    H = hessenberg(A)
    assert char_poly(H) == char_poly(A)
    assert all(H.rows[i][j] == 0 for i in range(A.n) for j in range(A.n) if i > j + 1)


@given(monic_polys(d_max=7))
def test_companion_polys(f):
    C = companion(f)
    assert char_poly(C) == f == min_poly(C)
    assert is_nonderogatory(C)
    assert CompanionSpec.from_poly(f).polynomial() == f
    assert mat_trace(C) == CompanionSpec.from_poly(f).trace


def test_companion_layout():
    F = gf(5)
    C = companion(CompanionSpec.of(F, [1, 2, 3]))
    assert C.tolist() == [[0, 0, 1], [1, 0, 2], [0, 1, 3]]


def test_vector_annihilator_of_e1_is_min_poly_for_companion():
    F = gf(7)
    f = Polynomial(F, [1, 0, 3, 1])
    assert vector_annihilator(companion(f), [1, 0, 0]) == f


@given(matrices(n_max=3))
def test_diagonalizable_criteria_agree(A):
    assert is_diagonalizable(A) == is_diagonalizable_minpoly(A)


def test_diagonalizable_exhaustive_order2_gf3():
    F = gf(3)
    count = 0
    for vals in itertools.product(range(3), repeat=4):
        A = Matrix(F, [vals[:2], vals[2:]])
        mu = min_poly(A)
        assert is_diagonalizable(A) == (is_squarefree(mu) and splits_distinct_linear(mu))
        count += is_diagonalizable(A)
    # similarity classes of diagonalizable 2x2 over GF(3): 3 scalars + 3 classes of size 12
    assert count == 39


def test_conjugation_convention():
    rng = random.Random(3)
    F = gf(5)
    A = random_matrix(F, 4, rng)
    P = random_invertible(F, 4, rng)
    assert conjugate(A, P) == inverse(P) * A * P


def test_direct_sum_and_square_zero():
    F = gf(3)
    N = Matrix(F, [[0, 1], [0, 0]])
    S = direct_sum([N, Matrix(F, [[0]]), N])
    assert S.n == 5 and is_square_zero(S)
    assert not is_square_zero(direct_sum([N, Matrix(F, [[2]])]))


def test_matrix_text_roundtrip():
    F = gf(9)
    A = Matrix(F, [[0, 8], [3, 1]])
    text = format_matrix(A)
    assert text == "n 2 field 3^2:1,0,1\n0 8\n3 1\n"
    assert parse_matrix(text) == A


@pytest.mark.parametrize(
    "text,msg",
    [
        ("", "empty"),
        ("m 2 field 3\n0 0\n0 0\n", "header"),
        ("n 2 field 3\n0 0\n", "rows"),
        ("n 2 field 3\n0 0\n0 x\n", "row 2"),
        ("n 2 field 3\n0 0 0\n0 0\n", "row 1"),
        ("n 1 field 3\n5\n", "range"),
        ("n 1 field 4\n0\n", "prime"),
    ],
)
def test_parse_errors(text, msg):
    with pytest.raises(ValueError, match=msg):
        parse_matrix(text)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        Matrix(gf(3), [[0, 1], [1]])


def test_is_invertible_identity():
    assert is_invertible(Matrix.identity(gf(7), 3))
