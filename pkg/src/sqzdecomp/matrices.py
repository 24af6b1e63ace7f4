"""Dense exact square matrices over GF(q).

Python indexing is 0-based; ``A[i - 1, j - 1]`` is the entry written
``a_{ij}`` in the usual 1-based notation, and error messages use the
1-based form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .fields import (
    FieldElement,
    FieldMismatchError,
    FieldSpec,
    Polynomial,
    format_field,
    is_squarefree,
    parse_field,
    poly_lcm,
    splits_distinct_linear,
)


class SingularMatrixError(ValueError):
    """Raised when inverting a singular matrix; ``witness`` is a kernel vector."""

    def __init__(self, message: str, witness: tuple[FieldElement, ...] = ()):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# Row-level kernels on encodings. Shared with canonical/oracle.
# ---------------------------------------------------------------------------


def _matmul(F: FieldSpec, a, b):
    """Product of rectangular encoding grids."""
    if not a or not b:
        return [[] for _ in a]
    bt = list(zip(*b))
    if F.k == 1:
        p = F.p
        return [[sum(x * y for x, y in zip(r, c)) % p for c in bt] for r in a]
    add, mul = F.add, F.mul
    out = []
    for r in a:
        row = []
        for c in bt:
            s = 0
            for x, y in zip(r, c):
                if x and y:
                    s = add(s, mul(x, y))
            row.append(s)
        out.append(row)
    return out


def _matvec(F: FieldSpec, a, v):
    if F.k == 1:
        p = F.p
        return [sum(x * y for x, y in zip(r, v)) % p for r in a]
    add, mul = F.add, F.mul
    out = []
    for r in a:
        s = 0
        for x, y in zip(r, v):
            if x and y:
                s = add(s, mul(x, y))
        out.append(s)
    return out


def _rref(F: FieldSpec, rows, ncols: int | None = None):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][c])
        if inv != 1:
            m[r] = [F.mul(inv, x) for x in m[r]]
        pr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                t = m[i][c]
                m[i] = [F.sub(x, F.mul(t, y)) for x, y in zip(m[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def _nullspace(F: FieldSpec, rows, ncols: int):
    """Basis of ``{v : rows . v = 0}`` as lists of encodings."""
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    m, pivots = _rref(F, rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(m[i][f])
        basis.append(v)
    return basis


def _inverse_rows(F: FieldSpec, rows):
    """Inverse of a square encoding grid, or ``None`` if singular."""
    n = len(rows)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    m, pivots = _rref(F, aug, n)
    if len(pivots) < n:
        return None
    return [r[n:] for r in m]


# ---------------------------------------------------------------------------


class Matrix:
    """Immutable n x n matrix over ``spec``; ``rows`` holds encodings."""

    __slots__ = ("spec", "n", "rows")

    def __init__(self, spec: FieldSpec, rows: Iterable[Iterable]):
        grid = []
        for row in rows:
            out = []
            for x in row:
                if isinstance(x, FieldElement):
                    if x.spec != spec:
                        raise FieldMismatchError(f"{x.spec} vs {spec}")
                    out.append(x.value)
                else:
                    x = int(x)
                    if not 0 <= x < spec.q:
                        raise ValueError(f"entry encoding {x} out of range for GF({spec.q})")
                    out.append(x)
            grid.append(tuple(out))
        n = len(grid)
        for i, r in enumerate(grid, 1):
            if len(r) != n:
                raise ValueError(f"row {i} has {len(r)} entries, expected {n} (matrix must be square)")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", tuple(grid))

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def _raw(cls, spec: FieldSpec, rows) -> "Matrix":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "spec", spec)
        object.__setattr__(obj, "n", len(rows))
        object.__setattr__(obj, "rows", tuple(tuple(r) for r in rows))
        return obj

    @classmethod
    def zeros(cls, spec: FieldSpec, n: int) -> "Matrix":
        return cls._raw(spec, [[0] * n for _ in range(n)])

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "Matrix":
        return cls._raw(spec, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, spec: FieldSpec, values: Sequence) -> "Matrix":
        n = len(values)
        vals = [v.value if isinstance(v, FieldElement) else spec.from_int(v) for v in values]
        return cls._raw(spec, [[vals[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, spec: FieldSpec, columns: Sequence[Sequence]) -> "Matrix":
        return cls(spec, zip(*columns))

    # -- access --------------------------------------------------------------

    def __getitem__(self, ij) -> FieldElement:
        i, j = ij
        return FieldElement(self.spec, self.rows[i][j])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.spec == other.spec and self.rows == other.rows

    def __hash__(self):
        return hash((self.spec, self.rows))

    def __repr__(self):
        return f"Matrix(GF({self.spec.q}), {self.tolist()})"

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in r) for r in self.rows)

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.spec != self.spec:
            raise FieldMismatchError(f"{self.spec} vs {other.spec}")
        if other.n != self.n:
            raise ValueError(f"order mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        add = self.spec.add
        return Matrix._raw(self.spec, [[add(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        sub = self.spec.sub
        return Matrix._raw(self.spec, [[sub(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        neg = self.spec.neg
        return Matrix._raw(self.spec, [[neg(x) for x in r] for r in self.rows])

    def scale(self, c) -> "Matrix":
        F = self.spec
        if isinstance(c, FieldElement):
            if c.spec != F:
                raise FieldMismatchError(f"{c.spec} vs {F}")
            c = c.value
        else:
            c = F.from_int(c)
        return Matrix._raw(F, [[F.mul(c, x) for x in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        self._check(other)
        return Matrix._raw(self.spec, _matmul(self.spec, self.rows, other.rows))

    def __rmul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        return NotImplemented

    __matmul__ = __mul__

    def __pow__(self, e: int) -> "Matrix":
        if e < 0:
            return inverse(self) ** (-e)
        result = Matrix.identity(self.spec, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def transpose(self) -> "Matrix":
        return Matrix._raw(self.spec, list(zip(*self.rows)))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def apply(self, v: Sequence) -> tuple[FieldElement, ...]:
        vals = [x.value if isinstance(x, FieldElement) else int(x) for x in v]
        return tuple(FieldElement(self.spec, x) for x in _matvec(self.spec, self.rows, vals))


def mat_arith(A: Matrix, B, op: str) -> Matrix:
    """``op`` in {add, sub, mul, scalar_mul, pow}; ``B`` is a scalar/int for the last two."""
    if op == "add":
        return A + B
    if op == "sub":
        return A - B
    if op == "mul":
        A._check(B)
        return A * B
    if op == "scalar_mul":
        return A.scale(B)
    if op == "pow":
        if B < 0:
            raise ValueError("exponent must be nonnegative")
        return A**B
    raise ValueError(f"unknown op {op!r}")


def mat_trace(A: Matrix) -> FieldElement:
    F = A.spec
    s = 0
    for i in range(A.n):
        s = F.add(s, A.rows[i][i])
    return FieldElement(F, s)


def eval_poly(f: Polynomial, A: Matrix) -> Matrix:
    """``f(A)`` by Horner's rule."""
    if f.spec != A.spec:
        raise FieldMismatchError(f"{f.spec} vs {A.spec}")
    F = A.spec
    acc = Matrix.zeros(F, A.n)
    for c in reversed(f.coeffs):
        acc = acc * A
        if c:
            rows = [list(r) for r in acc.rows]
            for i in range(A.n):
                rows[i][i] = F.add(rows[i][i], c)
            acc = Matrix._raw(F, rows)
    return acc


# ---------------------------------------------------------------------------
# Companion matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompanionSpec:
    """Last column ``(u_0, ..., u_{n-1})`` of a companion matrix."""

    n: int
    u: tuple[FieldElement, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("companion order must be >= 1")
        if len(self.u) != self.n:
            raise ValueError(f"u has length {len(self.u)}, expected {self.n}")
        if len({x.spec for x in self.u}) > 1:
            raise FieldMismatchError("u entries from different fields")

    @property
    def spec(self) -> FieldSpec:
        return self.u[0].spec

    @property
    def trace(self) -> FieldElement:
        return self.u[-1]

    @classmethod
    def of(cls, spec: FieldSpec, u: Sequence) -> "CompanionSpec":
        return cls(len(u), tuple(spec(x) if not isinstance(x, FieldElement) else x for x in u))

    @classmethod
    def from_poly(cls, f: Polynomial) -> "CompanionSpec":
        if not f.is_monic() or f.degree < 1:
            raise ValueError("companion needs a monic polynomial of degree >= 1")
        F = f.spec
        return cls(f.degree, tuple(FieldElement(F, F.neg(c)) for c in f.coeffs[:-1]) if f.degree else ())

    def polynomial(self) -> Polynomial:
        """``x^n - u_{n-1} x^{n-1} - ... - u_0``."""
        F = self.spec
        return Polynomial(F, [F.neg(x.value) for x in self.u] + [1])


def companion(spec) -> Matrix:
    """Companion matrix from a :class:`CompanionSpec` or a monic polynomial."""
    if isinstance(spec, Polynomial):
        spec = CompanionSpec.from_poly(spec)
    n, F = spec.n, spec.spec
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i, x in enumerate(spec.u):
        rows[i][n - 1] = x.value
    return Matrix._raw(F, rows)


def direct_sum(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise ValueError("direct_sum of an empty list")
    F = blocks[0].spec
    for b in blocks:
        if b.spec != F:
            raise FieldMismatchError(f"{b.spec} vs {F}")
    n = sum(b.n for b in blocks)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, r in enumerate(b.rows):
            rows[off + i][off : off + b.n] = r
        off += b.n
    return Matrix._raw(F, rows)


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------


def rank_kernel(A: Matrix) -> tuple[int, list[tuple[FieldElement, ...]]]:
    """Rank and a null-space basis of ``A``."""
    F = A.spec
    basis = _nullspace(F, A.rows, A.n)
    return A.n - len(basis), [tuple(FieldElement(F, x) for x in v) for v in basis]


def rank(A: Matrix) -> int:
    return len(_rref(A.spec, A.rows, A.n)[1])


def inverse(A: Matrix) -> Matrix:
    inv = _inverse_rows(A.spec, A.rows)
    if inv is None:
        witness = rank_kernel(A)[1][0]
        raise SingularMatrixError(f"matrix of order {A.n} is singular", witness)
    return Matrix._raw(A.spec, inv)


def solve_or_invert(A: Matrix) -> tuple[Matrix | None, tuple[FieldElement, ...] | None]:
    """``(A^-1, None)`` when invertible, else ``(None, kernel vector)``."""
    try:
        return inverse(A), None
    except SingularMatrixError as exc:
        return None, exc.witness


def is_invertible(A: Matrix) -> bool:
    return rank(A) == A.n


def conjugate(A: Matrix, P: Matrix) -> Matrix:
    """``P^-1 A P``; raises :class:`SingularMatrixError` for singular ``P``."""
    A._check(P)
    return inverse(P) * A * P


# ---------------------------------------------------------------------------
# Characteristic and minimal polynomials
# ---------------------------------------------------------------------------


def hessenberg(A: Matrix) -> Matrix:
    """Upper Hessenberg matrix similar to ``A`` (elimination with field division)."""
    F = A.spec
    n = A.n
    H = [list(r) for r in A.rows]
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if H[i][m - 1]), None)
        if piv is None:
            continue
        if piv != m:
            H[piv], H[m] = H[m], H[piv]
            for r in H:
                r[piv], r[m] = r[m], r[piv]
        t_inv = F.inv(H[m][m - 1])
        for i in range(m + 1, n):
            if not H[i][m - 1]:
                continue
            u = F.mul(H[i][m - 1], t_inv)
            # row_i -= u * row_m ; col_m += u * col_i
            H[i] = [F.sub(x, F.mul(u, y)) for x, y in zip(H[i], H[m])]
            for r in H:
                r[m] = F.add(r[m], F.mul(u, r[i]))
    return Matrix._raw(F, H)


def char_poly(A: Matrix) -> Polynomial:
    """Monic characteristic polynomial ``det(xI - A)``.

    Reduces to Hessenberg form and runs the principal-minor recurrence, so
    it never needs more field points than the field has.
    """
    F = A.spec
    n = A.n
    H = hessenberg(A).rows
    polys = [Polynomial(F, (1,))]
    for m in range(1, n + 1):
        # 1-based recurrence on the leading m x m minor
        p = polys[m - 1] * Polynomial(F, (F.neg(H[m - 1][m - 1]), 1))
        t = 1
        for i in range(m - 1, 0, -1):
            t = F.mul(t, H[i][i - 1])
            c = F.mul(t, H[i - 1][m - 1])
            if c:
                p = p - polys[i - 1] * FieldElement(F, c)
        polys.append(p)
    return polys[n]


def _vector_annihilator(F: FieldSpec, rows, v) -> Polynomial:
    """Monic least-degree ``g`` with ``g(A) v = 0``."""
    n = len(rows)
    # Incremental echelon basis of Krylov vectors, each tagged with its
    # coefficient combination in terms of v, Av, A^2 v, ...
    basis: list[tuple[list[int], list[int], int]] = []  # (reduced vec, combo, pivot)
    w = list(v)
    k = 0
    while True:
        vec = list(w)
        combo = [0] * (k + 1)
        combo[k] = 1
        for bvec, bcombo, piv in basis:
            c = vec[piv]
            if c:
                vec = [F.sub(x, F.mul(c, y)) for x, y in zip(vec, bvec)]
                for i, y in enumerate(bcombo):
                    combo[i] = F.sub(combo[i], F.mul(c, y))
        piv = next((i for i in range(n) if vec[i]), None)
        if piv is None:
            return Polynomial(F, combo)
        inv = F.inv(vec[piv])
        basis.append(([F.mul(inv, x) for x in vec], [F.mul(inv, x) for x in combo], piv))
        w = _matvec(F, rows, w)
        k += 1


def vector_annihilator(A: Matrix, v: Sequence) -> Polynomial:
    vals = [x.value if isinstance(x, FieldElement) else int(x) for x in v]
    return _vector_annihilator(A.spec, A.rows, vals)


def min_poly(A: Matrix) -> Polynomial:
    """Minimal polynomial as the lcm of the Krylov annihilators of e_1..e_n."""
    F = A.spec
    n = A.n
    f = Polynomial(F, (1,))
    for j in range(n):
        e = [0] * n
        e[j] = 1
        g = _vector_annihilator(F, A.rows, e)
        if (f % g).is_zero():
            continue
        f = poly_lcm(f, g)
        if f.degree == n:
            break
    return f


def is_diagonalizable(A: Matrix) -> bool:
    """``A^q == A``."""
    return A ** A.spec.q == A


def is_diagonalizable_minpoly(A: Matrix) -> bool:
    """Minimal polynomial squarefree and split into distinct linear factors."""
    mp = min_poly(A)
    return is_squarefree(mp) and splits_distinct_linear(mp)


def is_square_zero(M: Matrix) -> bool:
    return (M * M).is_zero()


def is_nonderogatory(A: Matrix) -> bool:
    return min_poly(A).degree == A.n


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def format_matrix(A: Matrix) -> str:
    """Header ``n <order> field <fieldspec>`` then one row of encodings per line."""
    lines = [f"n {A.n} field {format_field(A.spec)}"]
    lines += [" ".join(str(x) for x in r) for r in A.rows]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> Matrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "n" or head[2] != "field":
        raise ValueError(f"bad header line {lines[0]!r}; expected 'n <order> field <fieldspec>'")
    try:
        n = int(head[1])
    except ValueError:
        raise ValueError(f"bad order {head[1]!r}") from None
    spec = parse_field(head[3])
    body = lines[1:]
    if len(body) != n:
        raise ValueError(f"expected {n} rows, found {len(body)}")
    rows = []
    for i, ln in enumerate(body, 1):
        try:
            vals = [int(t) for t in ln.split()]
        except ValueError:
            raise ValueError(f"row {i}: non-integer entry") from None
        if len(vals) != n:
            raise ValueError(f"row {i}: expected {n} entries, found {len(vals)}")
        rows.append(vals)
    return Matrix(spec, rows)
