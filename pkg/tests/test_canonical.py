import random

from hypothesis import given
from hypothesis import strategies as st

from conftest import matrices, random_invertible, random_matrix
from sqzdecomp.canonical import (
    RationalForm,
    first_invariant_factor,
    invariant_factors,
    rational_form,
    verify_rational_form,
)
from sqzdecomp.fields import Polynomial, format_poly, gf
from sqzdecomp.matrices import Matrix, companion, direct_sum, inverse


@given(matrices(n_max=6))
def test_rational_form_sound(A):
    R = rational_form(A)
    rep = verify_rational_form(A, R)
    assert rep.ok, str(rep)
    assert [name for name, _ in rep.checks] == ["monic", "divisibility", "product", "conjugation"]


@given(st.sampled_from([3, 5, 7]), st.integers(0, 10**6))
def test_recovers_planted_chain(q, seed):
    rng = random.Random(seed)
    F = gf(q)
    # f1 | f2 | f3 built from random monic pieces
    f1 = Polynomial(F, [rng.randrange(q), 1])
    g2 = Polynomial(F, [rng.randrange(q) for _ in range(rng.randint(0, 2))] + [1])
    g3 = Polynomial(F, [rng.randrange(q) for _ in range(rng.randint(0, 2))] + [1])
    chain = [f1, f1 * g2, f1 * g2 * g3]
    B = direct_sum([companion(f) for f in chain])
    P = random_invertible(F, B.n, rng)
    A = inverse(P) * B * P
    assert invariant_factors(A) == tuple(chain)


def test_similarity_invariance():
    rng = random.Random(11)
    F = gf(5)
    for _ in range(30):
        n = rng.randint(1, 6)
        A = random_matrix(F, n, rng)
        P = random_invertible(F, n, rng)
        assert invariant_factors(inverse(P) * A * P) == invariant_factors(A)


def test_identity_factors():
    F = gf(3)
    assert [format_poly(f) for f in invariant_factors(Matrix.identity(F, 2))] == ["x+2", "x+2"]


def test_companion_single_factor():
    F = gf(7)
    f = Polynomial(F, [1, 2, 3, 4, 1])
    assert invariant_factors(companion(f)) == (f,)


def test_repeated_obstructed_block():
    F = gf(3)
    p = Polynomial(F, [2, 2, 2, 1])
    A = direct_sum([companion(p), companion(p)])
    assert invariant_factors(A) == (p, p)
    assert first_invariant_factor(A) == p


def test_zero_matrix():
    F = gf(5)
    x = Polynomial.x(F)
    assert invariant_factors(Matrix.zeros(F, 3)) == (x, x, x)


def test_deterministic():
    rng = random.Random(5)
    A = random_matrix(gf(3), 6, rng)
    assert rational_form(A) == rational_form(A)


def test_verify_flags_wrong_transform():
    F = gf(5)
    A = Matrix(F, [[1, 1], [0, 1]])
    R = rational_form(A)
    bad = RationalForm(R.factors, Matrix.identity(F, 2))
    rep = verify_rational_form(A, bad)
    assert not rep["conjugation"] and rep["product"]


def test_verify_order_mismatch():
    F = gf(5)
    R = rational_form(Matrix.identity(F, 2))
    assert not verify_rational_form(Matrix.identity(F, 3), R).ok
