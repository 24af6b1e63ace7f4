"""Invariant factors and the rational canonical form with its transform.

The form is built by cyclic splitting: take a vector whose annihilator is
the full minimal polynomial, split off its Krylov subspace together with an
invariant complement cut out by a dual functional, and recurse on the
complement.  Factors come out smallest first, ``f_1 | f_2 | ... | f_k``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .checks import CheckReport
from .fields import FieldSpec, Polynomial
from .matrices import (
    Matrix,
    _inverse_rows,
    _matmul,
    _matvec,
    _nullspace,
    _rref,
    _vector_annihilator,
    char_poly,
    companion,
    direct_sum,
    min_poly,
)

# Seed for the vector scan once the standard basis is exhausted.
VECTOR_SEED = 0x5A17


@dataclass(frozen=True)
class RationalForm:
    """``transform^-1 @ A @ transform == direct_sum(companion(f) for f in factors)``."""

    factors: tuple[Polynomial, ...]
    transform: Matrix

    @property
    def n(self) -> int:
        return self.transform.n

    def block_matrix(self) -> Matrix:
        return direct_sum([companion(f) for f in self.factors])


def _maximal_vector(F: FieldSpec, rows, degree: int):
    n = len(rows)
    for j in range(n):
        e = [0] * n
        e[j] = 1
        if _vector_annihilator(F, rows, e).degree == degree:
            return e
    rng = random.Random(VECTOR_SEED)
    while True:
        v = [rng.randrange(F.q) for _ in range(n)]
        if any(v) and _vector_annihilator(F, rows, v).degree == degree:
            return v


def _split(F: FieldSpec, rows):
    """(factors smallest-first, transform columns as rows-of-matrix)."""
    n = len(rows)
    if n == 0:
        return [], []
    mu = min_poly(Matrix._raw(F, rows))
    d = mu.degree
    v = _maximal_vector(F, rows, d)
    krylov = [v]
    for _ in range(d - 1):
        krylov.append(_matvec(F, rows, krylov[-1]))
    if d == n:
        return [mu], [list(r) for r in zip(*krylov)]

    # Complete the Krylov basis with standard vectors, then read off the
    # functional that picks the coefficient of A^{d-1} v.
    _, pivots = _rref(F, krylov, n)
    extra = []
    for c in range(n):
        if c not in pivots:
            e = [0] * n
            e[c] = 1
            extra.append(e)
    basis_cols = krylov + extra
    inv = _inverse_rows(F, [list(r) for r in zip(*basis_cols)])
    lam = inv[d - 1]

    at = [list(r) for r in zip(*rows)]
    dual = [lam]
    for _ in range(d - 1):
        dual.append(_matvec(F, at, dual[-1]))
    comp = _nullspace(F, dual, n)
    if len(comp) != n - d:
        raise ArithmeticError("invariant complement has the wrong dimension")

    q_cols = comp + krylov
    q_rows = [list(r) for r in zip(*q_cols)]
    q_inv = _inverse_rows(F, q_rows)
    conj = _matmul(F, _matmul(F, q_inv, rows), q_rows)
    m = n - d
    sub = [r[:m] for r in conj[:m]]
    sub_factors, sub_p = _split(F, sub)
    comp_rows = [list(r) for r in zip(*comp)]  # n x m
    lifted = _matmul(F, comp_rows, sub_p)  # n x m
    p_rows = [lifted[i] + [krylov[j][i] for j in range(d)] for i in range(n)]
    return sub_factors + [mu], p_rows


def rational_form(A: Matrix) -> RationalForm:
    """Invariant factors (smallest first) and a transform ``P``.

    Deterministic: the cyclic vector scan tries ``e_1, ..., e_n`` first and
    then a fixed-seed stream of random vectors.
    """
    factors, p_rows = _split(A.spec, [list(r) for r in A.rows])
    return RationalForm(tuple(factors), Matrix._raw(A.spec, p_rows))


def invariant_factors(A: Matrix) -> tuple[Polynomial, ...]:
    return rational_form(A).factors


def first_invariant_factor(A: Matrix) -> Polynomial:
    return rational_form(A).factors[0]


def verify_rational_form(A: Matrix, R: RationalForm) -> CheckReport:
    rep = CheckReport()
    if R.transform.n != A.n or R.transform.spec != A.spec:
        rep.add("orders", False)
        return rep
    fs = R.factors
    rep.add("monic", all(f.is_monic() for f in fs))
    rep.add("divisibility", all((fs[i + 1] % fs[i]).is_zero() for i in range(len(fs) - 1)))
    prod = Polynomial(A.spec, (1,))
    for f in fs:
        prod = prod * f
    rep.add("product", prod == char_poly(A))
    inv = _inverse_rows(A.spec, R.transform.rows)
    if inv is None:
        rep.add("conjugation", False)
    else:
        lhs = Matrix._raw(A.spec, inv) * A * R.transform
        rep.add("conjugation", sum(f.degree for f in fs) == A.n and lhs == R.block_matrix())
    return rep
