"""Certificates for the GF(3) cubic obstruction.

Over GF(3) a matrix whose invariant factors all equal one irreducible cubic
with nonzero trace has no decomposition ``A = D + M``.  Only the algebraic
premises used in the argument are machine-checkable on a concrete ``A``:
``B^3 = B^2 + B + I`` for the member ``B`` of the affine family with factor
``x^3 - x^2 - x - 1``, and invertibility of ``B^2 + I``.  Non-existence itself
is backed by an exhaustive scan at order 3 and by randomized search above.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .canonical import invariant_factors
from .checks import CheckReport
from .fields import FieldSpec, Polynomial, format_field, format_poly, is_obstructed, monic_polynomials
from .matrices import Matrix, format_matrix, is_diagonalizable, is_invertible, is_square_zero
from .oracle import SearchBudget, oracle_decompose

# x^3 - x^2 - x - 1 over GF(3), lowest coefficient first
BASE_CUBIC = (2, 2, 2, 1)
DEFAULT_SEED = 0x5A17

# (a, b) pairs for a*A + b*I, in the order A, A+I, A-I, 2A, 2A+I, 2A-I
AFFINE_MAPS = ((1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2))


class PreconditionError(ValueError):
    """Input does not meet the obstruction hypothesis."""


@dataclass
class ObstructionCertificate:
    polynomial: Polynomial
    n: int
    checks: CheckReport
    exhaustive: bool
    candidates: int
    hits: int
    seed: int | None
    affine: tuple[int, int] = (1, 0)
    notes: list[str] = field(default_factory=list)

    @property
    def evidence(self) -> str:
        if self.exhaustive:
            return "exhaustive"
        return f"randomized seed={self.seed} candidates={self.candidates} hits={self.hits}"

    def to_text(self) -> str:
        a, b = self.affine
        lines = [
            f"polynomial = {format_poly(self.polynomial)}",
            f"order = {self.n}",
            f"affine = {a}A+{b}I",
        ]
        lines += [f"{name} = {'pass' if ok else 'fail'}" for name, ok in self.checks.checks]
        lines.append(f"evidence = {self.evidence}")
        if self.exhaustive:
            lines.append(f"candidates = {self.candidates}")
        lines += [f"note = {s}" for s in self.notes]
        return "\n".join(lines) + "\n"


def _require_f3(spec: FieldSpec):
    if spec.q != 3:
        raise PreconditionError(f"obstruction needs GF(3), got {format_field(spec)}")


def obstructed_cubics(spec: FieldSpec) -> list[Polynomial]:
    _require_f3(spec)
    found = [f for f in monic_polynomials(spec, 3) if is_obstructed(f, spec)]
    return sorted(found, key=lambda f: f.encoding())


def _affine(A: Matrix, a: int, b: int) -> Matrix:
    return A.scale(A.spec(a)) + Matrix.identity(A.spec, A.n).scale(A.spec(b))


def _common_cubic(A: Matrix) -> Polynomial:
    """The single obstructed cubic behind ``A``, or a precondition error."""
    _require_f3(A.spec)
    if A.n % 3:
        raise PreconditionError(f"order {A.n} is not a multiple of 3")
    facs = invariant_factors(A)
    p = facs[0]
    if any(f != p for f in facs) or not is_obstructed(p, A.spec):
        raise PreconditionError(
            "invariant factors are not all one obstructed cubic: " + ", ".join(format_poly(f) for f in facs)
        )
    return p


def obstructed_family(A: Matrix) -> list[tuple[Matrix, Polynomial]]:
    """``A, A+I, A-I, 2A, 2A+I, 2A-I`` with the cubic each is built from."""
    _common_cubic(A)
    out = []
    for a, b in AFFINE_MAPS:
        B = _affine(A, a, b)
        out.append((B, _common_cubic(B)))
    return out


def verify_identity_chain(A: Matrix, samples=()) -> CheckReport:
    """Check ``A^3 = A^2 + A + I`` and invertibility of ``A^2 + I``; probe ``samples``.

    Each sample ``M`` that is square-zero with ``(A+M)^3 = A+M`` would refute
    the obstruction; such a sample fails the ``probe`` check.
    """
    F = A.spec
    _require_f3(F)
    I = Matrix.identity(F, A.n)
    A2 = A * A
    if A2 * A != A2 + A + I:
        raise PreconditionError("A^3 != A^2 + A + I")
    rep = CheckReport()
    rep.add("cubic_identity", True)
    rep.add("square_plus_identity_invertible", is_invertible(A2 + I))
    offenders = 0
    probed = 0
    for M in samples:
        probed += 1
        D = A + M
        if is_square_zero(M) and D * D * D == D:
            offenders += 1
    if probed:
        rep.add("probe", offenders == 0)
    return rep


def _to_base(A: Matrix) -> tuple[tuple[int, int], Matrix]:
    base = Polynomial(A.spec, BASE_CUBIC)
    for a, b in AFFINE_MAPS:
        B = _affine(A, a, b)
        if _common_cubic(B) == base:
            return (a, b), B
    raise AssertionError("affine family misses the base cubic")


def certify_impossible(A: Matrix, budget: SearchBudget | None = None) -> ObstructionCertificate:
    """Certificate that no square-zero ``M`` makes ``A - M`` diagonalizable.

    Order 3 always gets an exhaustive scan.  Larger orders run a randomized
    search (``budget`` or a default of 10^6 seeded candidates).
    """
    p = _common_cubic(A)
    affine, B = _to_base(A)
    checks = verify_identity_chain(B)
    checks.add("obstructed_family", any(q == p for _, q in obstructed_family(B)))
    if A.n == 3:
        res = oracle_decompose(A, SearchBudget("exhaustive", 3**9))
        exhaustive = True
    else:
        budget = budget or SearchBudget("randomized", 10**6, DEFAULT_SEED)
        if budget.mode != "randomized":
            budget = SearchBudget("randomized", budget.max_candidates, budget.seed)
        res = oracle_decompose(A, budget)
        exhaustive = False
    cert = ObstructionCertificate(
        polynomial=p,
        n=A.n,
        checks=checks,
        exhaustive=exhaustive and res.complete,
        candidates=res.candidates,
        hits=0 if res.found is None else 1,
        seed=None if exhaustive else res.seed,
        affine=affine,
    )
    if res.found is not None:
        D, M = res.found
        if is_square_zero(M) and is_diagonalizable(D):
            cert.notes.append("COUNTEREXAMPLE FOUND; the obstruction is refuted")
            cert.notes.append("M =\n" + format_matrix(M).rstrip("\n"))
    return cert
