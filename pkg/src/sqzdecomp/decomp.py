"""Diagonalizable + square-zero decompositions.

The block constructions produce a square-zero ``N`` with ``A + N``
diagonalizable for a companion matrix ``A``.  The public result is
reported as ``A = D + M`` with ``D = A + N`` and ``M = -N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .canonical import rational_form
from .checks import CheckReport
from .fields import (
    FieldElement,
    FieldSpec,
    Polynomial,
    enumerate_field,
    format_field,
    format_poly,
    is_obstructed,
    is_squarefree,
    poly_lcm,
    splits_distinct_linear,
)
from .matrices import (
    CompanionSpec,
    Matrix,
    companion,
    direct_sum,
    eval_poly,
    format_matrix,
    inverse,
    is_diagonalizable,
    is_square_zero,
    min_poly,
)
from .obstruction import certify_impossible
from .oracle import FULL_SCAN_LIMIT, SearchBudget, oracle_decompose, small_order_budget, square_zero_count_formula


class Case(str, Enum):
    NZT_ODD = "NZT_ODD"
    NZT_EVEN = "NZT_EVEN"
    ZT_ODD = "ZT_ODD"
    ZT_EVEN_Q5 = "ZT_EVEN_Q5"
    F3_EVEN_SHIFT = "F3_EVEN_SHIFT"
    F3_6K = "F3_6K"
    SMALL_ORDER_SEARCH = "SMALL_ORDER_SEARCH"


EXPLICIT_CASES = (Case.NZT_ODD, Case.NZT_EVEN, Case.ZT_ODD, Case.ZT_EVEN_Q5, Case.F3_6K)


@dataclass(frozen=True)
class Recipe:
    """How one companion block was decomposed."""

    case: Case
    u: tuple[FieldElement, ...]
    n: int
    annihilator: Polynomial
    alpha: FieldElement | None = None
    shift: FieldElement | None = None

    def __post_init__(self):
        if (self.alpha is not None) != (self.case is Case.ZT_EVEN_Q5):
            raise ValueError("alpha is required exactly for ZT_EVEN_Q5")
        if self.alpha is not None and (not self.alpha or self.alpha * self.alpha == 1):
            raise ValueError("alpha must avoid 0, 1, -1")


@dataclass(frozen=True)
class Decomposition:
    D: Matrix
    M: Matrix
    annihilator: Polynomial
    recipes: tuple[Recipe, ...] = ()


@dataclass(frozen=True)
class Decomposed:
    decomposition: Decomposition
    checks: CheckReport | None = None
    kind = "decomposed"


@dataclass(frozen=True)
class Impossible:
    certificate: object  # obstruction.ObstructionCertificate
    kind = "impossible"


@dataclass(frozen=True)
class Unknown:
    reason: str
    kind = "unknown"


Outcome = Decomposed | Impossible | Unknown


@dataclass(frozen=True)
class BasisWitness:
    """Columns of ``transition`` are the adapted basis; ``blocks`` the expected diagonal blocks."""

    transition: Matrix
    blocks: tuple[Matrix, ...]

    def expected(self) -> Matrix:
        return direct_sum(list(self.blocks))

    def check(self, target: Matrix) -> bool:
        """``transition^-1 @ target @ transition`` equals the block pattern."""
        return inverse(self.transition) * target * self.transition == self.expected()


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


class _Grid:
    """Zero matrix filled through 1-based ``set(i, j, value)``."""

    def __init__(self, F: FieldSpec, n: int):
        self.F = F
        self.rows = [[0] * n for _ in range(n)]

    def set(self, i: int, j: int, value: FieldElement):
        self.rows[i - 1][j - 1] = value.value

    def matrix(self) -> Matrix:
        return Matrix._raw(self.F, self.rows)


def _three_root_annihilator(u: FieldElement) -> Polynomial:
    """``x (x - u) (x + u)``."""
    F = u.spec
    return Polynomial.from_roots(F, [F.zero, u, -u])


def _require(cond: bool, message: str):
    if not cond:
        raise ValueError(message)


# ---------------------------------------------------------------------------
# Block constructions (each returns N with A + N diagonalizable)
# ---------------------------------------------------------------------------


def build_M_nzt_odd(spec: CompanionSpec) -> tuple[Matrix, Polynomial]:
    """Odd ``n >= 5``, nonzero trace ``t``; ``A + N`` is annihilated by ``x(x-t)(x+t)``."""
    n, u = spec.n, spec.u
    _require(n >= 5 and n % 2 == 1, f"NZT_ODD needs odd n >= 5, got {n}")
    t = u[n - 1]
    _require(bool(t), "NZT_ODD needs nonzero trace")
    g = _Grid(spec.spec, n)
    for k in range(3, n - 1, 2):
        g.set(k + 1, k, -spec.spec.one)
        g.set(k - 1, k, t * t)
    g.set(1, n, -u[0])
    for k in range(2, n - 2, 2):
        g.set(k, n, -u[k - 1] - t * u[k])
    g.set(n - 1, n, -u[n - 2])
    return g.matrix(), _three_root_annihilator(t)


def build_M_nzt_even(spec: CompanionSpec) -> tuple[Matrix, Polynomial]:
    """Even ``n >= 6``, nonzero trace ``t``; annihilator ``x(x-t)(x+t)``."""
    n, u = spec.n, spec.u
    _require(n >= 6 and n % 2 == 0, f"NZT_EVEN needs even n >= 6, got {n}")
    t = u[n - 1]
    _require(bool(t), "NZT_EVEN needs nonzero trace")
    g = _Grid(spec.spec, n)
    for k in range(2, n - 1, 2):
        g.set(k + 1, k, -spec.spec.one)
        g.set(k - 1, k, t * t)
    for k in range(1, n - 2, 2):
        g.set(k, n, -u[k - 1] - t * u[k])
    g.set(n - 1, n, -u[n - 2])
    return g.matrix(), _three_root_annihilator(t)


def build_M_zt_odd(spec: CompanionSpec) -> tuple[Matrix, Polynomial]:
    """Odd ``n >= 5``, zero trace; annihilator ``x^3 - x``."""
    n, u, F = spec.n, spec.u, spec.spec
    _require(n >= 5 and n % 2 == 1, f"ZT_ODD needs odd n >= 5, got {n}")
    _require(not u[n - 1], "ZT_ODD needs zero trace")
    g = _Grid(F, n)
    for k in range(2, n, 2):
        g.set(k + 1, k, -F.one)
        g.set(k - 1, k, F.one)
    return g.matrix(), Polynomial.from_roots(F, [0, 1, -1])


def choose_alpha(spec: FieldSpec) -> FieldElement:
    """Least-encoded element outside ``{0, 1, -1}``."""
    if spec.q < 5:
        raise ValueError("no admissible alpha in GF(3)")
    for a in enumerate_field(spec):
        if a and a * a != 1:
            return a
    raise AssertionError("unreachable for q >= 5")


def build_M_zt_even_q5(spec: CompanionSpec, alpha: FieldElement) -> tuple[Matrix, Polynomial]:
    """Even ``n >= 6``, zero trace, ``q >= 5``; annihilator ``(x^2-1)(x^2-alpha^2)``."""
    n, u, F = spec.n, spec.u, spec.spec
    _require(F.q >= 5, "ZT_EVEN_Q5 is unavailable over GF(3)")
    _require(n >= 6 and n % 2 == 0, f"ZT_EVEN_Q5 needs even n >= 6, got {n}")
    _require(not u[n - 1], "ZT_EVEN_Q5 needs zero trace")
    _require(alpha.spec == F and bool(alpha) and alpha * alpha != 1, "alpha must avoid 0, 1, -1")
    g = _Grid(F, n)
    for k in range(2, n - 1, 2):
        g.set(k + 1, k, -F.one)
        g.set(k - 1, k, F.one)
    for k in range(1, n - 2, 2):
        g.set(k, n, -u[k - 1])
    g.set(n - 1, n, alpha * alpha - u[n - 2])
    return g.matrix(), Polynomial.from_roots(F, [1, -1, alpha, -alpha])


def _krylov_transform(A: Matrix) -> Matrix:
    """Columns ``e_1, A e_1, ..., A^{n-1} e_1``."""
    n = A.n
    cols = [[1 if i == 0 else 0 for i in range(n)]]
    for _ in range(n - 1):
        cols.append([x.value for x in A.apply(cols[-1])])
    return Matrix._raw(A.spec, [list(r) for r in zip(*cols)])


def _build_f3_6k(spec: CompanionSpec) -> tuple[Matrix, Polynomial]:
    n, u, F = spec.n, spec.u, spec.spec
    one = F.one
    g = _Grid(F, n)
    for k in range(2, n - 3, 2):
        g.set(k + 1, k, -one)
        g.set(k - 1, k, one)
    g.set(n - 1, n - 1, one)
    g.set(n - 2, n - 1, one)
    g.set(n - 1, n - 2, -one)
    g.set(n - 2, n - 2, -one)
    for k in range(1, n - 4, 2):
        g.set(k, n, -u[k - 1] - u[k])
    g.set(n - 3, n, -u[n - 4])
    g.set(n - 2, n, -u[n - 2])
    g.set(n - 1, n, -u[n - 2])
    return g.matrix(), Polynomial.from_roots(F, [0, 1, -1])


def build_M_f3_even(spec: CompanionSpec) -> tuple[Matrix, Polynomial, FieldElement]:
    """GF(3), even ``n >= 6``, zero trace.

    For ``3 | n`` the dedicated construction is used (shift 0).  Otherwise
    ``A - I`` has trace ``-n != 0``; the nonzero-trace construction for the
    companion of ``A - I`` is carried back through the Krylov basis of
    ``A - I`` and the returned shift is 1.
    """
    n, u, F = spec.n, spec.u, spec.spec
    _require(F.q == 3, "F3 construction needs GF(3)")
    _require(n >= 6 and n % 2 == 0, f"F3 construction needs even n >= 6, got {n}")
    _require(not u[n - 1], "F3 construction needs zero trace")
    if n % 3 == 0:
        M, ann = _build_f3_6k(spec)
        return M, ann, F.zero
    A = companion(spec)
    shifted = A - Matrix.identity(F, n)
    P = _krylov_transform(shifted)
    g_spec = CompanionSpec.from_poly(spec.polynomial().shift(1))
    N, h = build_M_nzt_even(g_spec)
    M = P * N * inverse(P)
    return M, h.shift(-1), F.one


def build_block(spec: CompanionSpec) -> tuple[Matrix, Recipe]:
    """Pick and run the explicit construction for ``n >= 5``."""
    n, F = spec.n, spec.spec
    if n < 5:
        raise ValueError("explicit constructions start at order 5")
    t = spec.trace
    if t:
        builder, case = (build_M_nzt_odd, Case.NZT_ODD) if n % 2 else (build_M_nzt_even, Case.NZT_EVEN)
        M, ann = builder(spec)
        return M, Recipe(case, spec.u, n, ann)
    if n % 2:
        M, ann = build_M_zt_odd(spec)
        return M, Recipe(Case.ZT_ODD, spec.u, n, ann)
    if F.q >= 5:
        alpha = choose_alpha(F)
        M, ann = build_M_zt_even_q5(spec, alpha)
        return M, Recipe(Case.ZT_EVEN_Q5, spec.u, n, ann, alpha=alpha)
    M, ann, shift = build_M_f3_even(spec)
    case = Case.F3_6K if n % 3 == 0 else Case.F3_EVEN_SHIFT
    return M, Recipe(case, spec.u, n, ann, shift=shift)


# ---------------------------------------------------------------------------
# Adapted bases
# ---------------------------------------------------------------------------


def _swap_block(F: FieldSpec, c: FieldElement) -> Matrix:
    """``[[0, c], [1, 0]]``, annihilated by ``x^2 - c``."""
    return Matrix(F, [[0, c], [1, 0]])


def basis_witness(recipe: Recipe) -> BasisWitness:
    """Adapted basis in which ``A + N`` splits into small blocks."""
    case, n, u = recipe.case, recipe.n, recipe.u
    if case not in EXPLICIT_CASES:
        raise ValueError(f"no adapted basis for {case.value}")
    F = u[0].spec
    zero, one = F.zero, F.one
    t = u[n - 1]
    cols = []
    for j in range(n - 2):
        cols.append([one if i == j else zero for i in range(n)])
    a = [zero] * n  # b_{n-1}, 0-based coordinates
    b = [zero] * n  # b_n

    if case is Case.NZT_ODD:
        a[n - 2], b[n - 1] = t, t
        for i in range(1, (n - 3) // 2 + 1):
            a[2 * i - 1] += u[2 * i]
            b[2 * i] += u[2 * i]
        blocks = [Matrix(F, [[0, 0, 0], [1, 0, t * t], [0, 1, 0]])]
        blocks += [_swap_block(F, t * t)] * ((n - 5) // 2)
        blocks.append(Matrix(F, [[0, 0], [1, t]]))
    elif case is Case.NZT_EVEN:
        a[n - 2], b[n - 1] = t, t
        for i in range(1, (n - 2) // 2 + 1):
            a[2 * i - 2] += u[2 * i - 1]
            b[2 * i - 1] += u[2 * i - 1]
        blocks = [_swap_block(F, t * t)] * ((n - 2) // 2)
        blocks.append(Matrix(F, [[0, 0], [1, t]]))
    elif case is Case.ZT_ODD:
        # only the last vector changes: e_n - sum u_{2i-2} e_{2i} - sum u_{2i-1} e_{2i-1}
        a[n - 2] = one
        b[n - 1] = one
        for i in range(1, (n - 1) // 2 + 1):
            b[2 * i - 1] -= u[2 * i - 2]
            b[2 * i - 2] -= u[2 * i - 1]
        blocks = [_swap_block(F, one)] * ((n - 1) // 2)
        blocks.append(Matrix(F, [[0]]))
    elif case is Case.ZT_EVEN_Q5:
        al = recipe.alpha
        a[n - 2], b[n - 1] = one, one
        s = (al * al - 1).inverse()
        # coefficient u_{2i-1}/(alpha^2-1) sits on e_{2i} in b_{n-1} and on e_{2i-1} in b_n
        for i in range(1, (n - 2) // 2 + 1):
            c = u[2 * i - 1] * s
            a[2 * i - 1] += c
            b[2 * i - 2] += c
        blocks = [_swap_block(F, one)] * ((n - 2) // 2)
        blocks.append(_swap_block(F, al * al))
    else:  # F3_6K
        a[n - 2], b[n - 1] = one, one
        half = FieldElement(F, F.inv(F.from_int(2)))
        for i in range(1, (n - 4) // 2 + 1):
            a[2 * i - 1] -= u[2 * i - 1]
            b[2 * i - 1] += u[2 * i - 1]
            b[2 * i - 2] -= u[2 * i - 1]
        a[n - 4] += u[n - 3] - u[n - 2]
        a[n - 3] += (u[n - 3] - u[n - 2] + 1) * half
        b[n - 4] += u[n - 2] - u[n - 3]
        blocks = [_swap_block(F, one)] * ((n - 4) // 2)
        blocks.append(Matrix(F, [[0, 0], [1, -one]]))
        blocks.append(Matrix(F, [[1, 0], [1, 0]]))
    cols += [a, b]
    return BasisWitness(Matrix.from_columns(F, cols), tuple(blocks))


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

# Candidate budget for searches that are not exhaustive.
DEFAULT_SEARCH_CANDIDATES = 10**6
DEFAULT_SEED = 0x5A17


def _require_odd(F: FieldSpec):
    if F.p == 2:
        raise ValueError("even characteristic is not supported")


@lru_cache(maxsize=4096)
def _small_block(f: Polynomial, max_candidates: int, seed: int, sampled: bool):
    A = companion(f)
    if sampled:
        budget = SearchBudget("randomized", max_candidates, seed)
    else:
        budget = small_order_budget(A.n, f.spec, max_candidates, seed)
    res = oracle_decompose(A, budget)
    if res.found is None and not res.complete:
        # sampling missed; settle it with the complete enumeration
        total = square_zero_count_formula(A.n, f.spec.q)
        if total <= FULL_SCAN_LIMIT:
            res = oracle_decompose(A, SearchBudget("rank_parameterized", total, seed))
    return res


def decompose_block(f: Polynomial, budget: SearchBudget | None = None) -> Outcome:
    """Decompose ``companion(f)``.

    Orders up to 4 go to the search oracle: a complete scan when the
    square-zero count fits ``budget.max_candidates``, seeded sampling
    otherwise or when ``budget.mode`` is ``"randomized"``.  A sampled search
    that misses falls back to the complete enumeration, so a small block
    only ends in ``Unknown`` if that is infeasible.  Order 5 and up use the explicit constructions.
    """
    F = f.spec
    _require_odd(F)
    if f.degree is None or f.degree < 1 or not f.is_monic():
        raise ValueError("block polynomial must be monic of degree >= 1")
    A = companion(f)
    if F.q == 3 and is_obstructed(f, F):
        return Impossible(certify_impossible(A, budget))
    n = f.degree
    if n <= 4:
        cand = budget.max_candidates if budget else DEFAULT_SEARCH_CANDIDATES
        seed = budget.seed if budget else DEFAULT_SEED
        sampled = budget is not None and budget.mode == "randomized"
        res = _small_block(f, cand, seed, sampled)
        if res.found is None:
            how = "complete scan" if res.complete else f"seed={res.seed} candidates={res.candidates}"
            return Unknown(f"no decomposition found for {format_poly(f)} ({how})")
        D, M = res.found
        recipe = Recipe(Case.SMALL_ORDER_SEARCH, CompanionSpec.from_poly(f).u, n, min_poly(D))
        d = Decomposition(D, M, recipe.annihilator, (recipe,))
    else:
        N, recipe = build_block(CompanionSpec.from_poly(f))
        d = Decomposition(A + N, -N, recipe.annihilator, (recipe,))
    return Decomposed(d, verify_decomposition(A, d))


def _all_same_obstructed(factors) -> bool:
    p = factors[0]
    return all(g == p for g in factors) and is_obstructed(p, p.spec)


def decompose(A: Matrix, budget: SearchBudget | None = None) -> Outcome:
    """``A = D + M`` with ``D`` diagonalizable and ``M^2 = 0``, or a reason why not.

    ``budget`` drives the small-block searches and the randomized attempt
    in the mixed GF(3) case (first invariant factor obstructed, others not
    all equal to it), which ends in ``Unknown`` when nothing is found.
    """
    F = A.spec
    _require_odd(F)
    R = rational_form(A)
    fs = R.factors
    if not fs:
        raise ValueError("empty matrix")
    if F.q == 3 and _all_same_obstructed(fs):
        return Impossible(certify_impossible(A, budget))
    if F.q == 3 and is_obstructed(fs[0], F):
        b = budget or SearchBudget("randomized", DEFAULT_SEARCH_CANDIDATES, DEFAULT_SEED)
        if b.mode != "randomized":
            b = SearchBudget("randomized", b.max_candidates, b.seed)
        res = oracle_decompose(A, b)
        if res.found is not None:
            D, M = res.found
            d = Decomposition(D, M, min_poly(D), ())
            rep = verify_decomposition(A, d)
            if rep.ok:
                return Decomposed(d, rep)
        return Unknown(
            "first invariant factor "
            + format_poly(fs[0])
            + " is obstructed but the factors differ; "
            + f"randomized search seed={b.seed} candidates={res.candidates} found nothing"
        )

    Ds, Ms, recipes = [], [], []
    ann = Polynomial(F, (1,))
    for f in fs:
        out = decompose_block(f, budget)
        if not isinstance(out, Decomposed):
            return out
        d = out.decomposition
        Ds.append(d.D)
        Ms.append(d.M)
        recipes.extend(d.recipes)
        ann = poly_lcm(ann, d.annihilator)
    P = R.transform
    Pi = inverse(P)
    d = Decomposition(P * direct_sum(Ds) * Pi, P * direct_sum(Ms) * Pi, ann, tuple(recipes))
    rep = verify_decomposition(A, d)
    if not rep.ok:
        raise ArithmeticError("assembled decomposition failed verification:\n" + str(rep))
    return Decomposed(d, rep)


def verify_decomposition(A: Matrix, d: Decomposition) -> CheckReport:
    rep = CheckReport()
    if (d.D.n, d.M.n) != (A.n, A.n) or d.D.spec != A.spec or d.M.spec != A.spec:
        rep.add("shapes", False)
        return rep
    rep.add("sum", d.D + d.M == A)
    rep.add("square_zero", is_square_zero(d.M))
    rep.add("q_potent", is_diagonalizable(d.D))
    g = d.annihilator
    rep.add(
        "annihilator",
        g.spec == A.spec
        and g.degree is not None
        and g.degree >= 1
        and is_squarefree(g)
        and splits_distinct_linear(g)
        and eval_poly(g, d.D).is_zero(),
    )
    return rep


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def format_decomposition(d: Decomposition, checks: CheckReport | None = None) -> str:
    lines = ["D =", format_matrix(d.D).rstrip("\n"), "M =", format_matrix(d.M).rstrip("\n")]
    lines.append(f"annihilator = {format_poly(d.annihilator)}")
    if d.recipes:
        lines.append("recipes = " + ", ".join(f"{r.case.value}:{r.n}" for r in d.recipes))
    if checks is not None:
        lines += [f"check.{name} = {'pass' if ok else 'fail'}" for name, ok in checks.checks]
        lines.append(f"checks = {'pass' if checks.ok else 'fail'}")
    return "\n".join(lines) + "\n"


def decomposition_kv(d: Decomposition, checks: CheckReport | None = None) -> list[tuple[str, str]]:
    kv = [
        ("n", str(d.D.n)),
        ("field", format_field(d.D.spec)),
        ("D", ";".join(",".join(str(x) for x in r) for r in d.D.rows)),
        ("M", ";".join(",".join(str(x) for x in r) for r in d.M.rows)),
        ("annihilator", format_poly(d.annihilator)),
        ("recipes", ",".join(f"{r.case.value}:{r.n}" for r in d.recipes)),
    ]
    if checks is not None:
        kv += [(f"check.{name}", "pass" if ok else "fail") for name, ok in checks.checks]
        kv.append(("checks", "pass" if checks.ok else "fail"))
    return kv
