"""Brute-force ground truth over small matrix spaces.

Everything here works on numpy batches of encodings, shape ``(N, n, n)``,
and is independent of the explicit constructions in :mod:`decomp`.

Three square-zero enumerators are provided:

* ``exhaustive``: scan all ``q^(n^2)`` matrices and keep ``M @ M == 0``;
* ``rank_parameterized``: ``M = B @ G @ K`` where the columns of ``B`` are
  the reduced echelon basis of the image ``W``, the rows of ``K`` span the
  annihilator of ``W`` and ``G`` runs over full-rank ``r x (n - r)``
  matrices.  ``(W, G)`` determines ``M`` uniquely, so no duplicates arise;
* ``randomized``: seeded samples ``M = B @ C`` with ``C`` full rank and the
  columns of ``B`` in the kernel of ``C`` (rank ``r`` drawn from ``1..n//2``).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .fields import FieldSpec, Polynomial, format_field, format_poly
from .matrices import Matrix

FULL_SCAN_LIMIT = 2**26
CENSUS_LIMIT = 2**20
BATCH = 1 << 15
MODES = ("exhaustive", "rank_parameterized", "randomized")


class InfeasibleError(ValueError):
    """Requested enumeration exceeds the configured size limits."""


@dataclass(frozen=True)
class SearchBudget:
    mode: str = "rank_parameterized"
    max_candidates: int = 10**6
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")


# ---------------------------------------------------------------------------
# Batched field kernels
# ---------------------------------------------------------------------------


class _Ops:
    """Vectorized arithmetic on encoding arrays."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p, self.q = spec.p, spec.q
        self.prime = spec.k == 1
        q = self.q
        self.inv_t = np.array([0] + [spec.inv(a) for a in range(1, q)], dtype=np.int64)
        if not self.prime:
            self.add_t = np.array([[spec.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
            self.mul_t = np.array([[spec.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
            self.neg_t = np.array([spec.neg(a) for a in range(q)], dtype=np.int64)

    def add(self, a, b):
        if self.prime:
            return (a + b) % self.p
        return self.add_t[a, b]

    def sub(self, a, b):
        if self.prime:
            return (a - b) % self.p
        return self.add_t[a, self.neg_t[b]]

    def mul(self, a, b):
        if self.prime:
            return (a * b) % self.p
        return self.mul_t[a, b]

    def matmul(self, a, b):
        if self.prime:
            return np.matmul(a, b) % self.p
        a, b = np.broadcast_arrays(a[..., :, :, None], b[..., None, :, :])
        acc = self.mul_t[a[..., 0, :], b[..., 0, :]]
        for k in range(1, a.shape[-2]):
            acc = self.add_t[acc, self.mul_t[a[..., k, :], b[..., k, :]]]
        return acc

    def power(self, a, e: int):
        result = None
        base = a
        while e:
            if e & 1:
                result = base if result is None else self.matmul(result, base)
            e >>= 1
            if e:
                base = self.matmul(base, base)
        return result

    def is_potent(self, d) -> np.ndarray:
        """``D^q == D`` per batch element."""
        return np.all(self.power(d, self.q) == d, axis=(-2, -1))

    def is_zero_square(self, m) -> np.ndarray:
        return ~np.any(self.matmul(m, m), axis=(-2, -1))

    def rref(self, x):
        """Batched reduced row echelon form; returns ``(R, pivot mask, rank)``."""
        R = np.array(x, dtype=np.int64, copy=True)
        N, m, ncols = R.shape
        row = np.zeros(N, dtype=np.int64)
        pivmask = np.zeros((N, ncols), dtype=bool)
        ar = np.arange(m)
        for j in range(ncols):
            cand = (R[:, :, j] != 0) & (ar[None, :] >= row[:, None])
            idx = np.nonzero(cand.any(axis=1))[0]
            if idx.size == 0:
                continue
            r = row[idx]
            pr = cand[idx].argmax(axis=1)
            top = R[idx, r]
            R[idx, r] = R[idx, pr]
            R[idx, pr] = top
            scale = self.inv_t[R[idx, r, j]]
            pivot_row = self.mul(scale[:, None], R[idx, r])
            R[idx, r] = pivot_row
            factors = R[idx, :, j]
            factors[np.arange(idx.size), r] = 0
            R[idx] = self.sub(R[idx], self.mul(factors[:, :, None], pivot_row[:, None, :]))
            pivmask[idx, j] = True
            row[idx] += 1
        return R, pivmask, row


@lru_cache(maxsize=None)
def _ops(spec: FieldSpec) -> _Ops:
    return _Ops(spec)


def _as_array(A: Matrix) -> np.ndarray:
    return np.array(A.rows, dtype=np.int64).reshape(A.n, A.n)


def _from_array(spec: FieldSpec, a: np.ndarray) -> Matrix:
    return Matrix._raw(spec, a.astype(int).tolist())


def _digits(indices: np.ndarray, q: int, count: int) -> np.ndarray:
    out = np.empty((indices.size, count), dtype=np.int64)
    rest = indices.astype(np.int64).copy()
    for t in range(count):
        out[:, t] = rest % q
        rest //= q
    return out


def matrix_index(A: Matrix) -> int:
    """Row-major base-q index of ``A`` (entry ``t`` is digit ``t``)."""
    q = A.spec.q
    v = 0
    for x in reversed([x for r in A.rows for x in r]):
        v = v * q + x
    return v


def matrix_from_index(index: int, n: int, spec: FieldSpec) -> Matrix:
    d = _digits(np.array([index]), spec.q, n * n)[0]
    return _from_array(spec, d.reshape(n, n))


def _full_rank_count(q: int, rows: int, cols: int) -> int:
    c = 1
    for i in range(rows):
        c *= q**cols - q**i
    return c


def _gaussian_binomial(n: int, r: int, q: int) -> int:
    num = den = 1
    for i in range(r):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def square_zero_count_formula(n: int, q: int) -> int:
    """Closed-form count; a third route besides the two enumerators."""
    return sum(_gaussian_binomial(n, r, q) * _full_rank_count(q, r, n - r) for r in range(n // 2 + 1))


# ---------------------------------------------------------------------------
# Enumerators (batched)
# ---------------------------------------------------------------------------


def _full_scan_batches(n: int, spec: FieldSpec, limit: int) -> Iterator[np.ndarray]:
    q = spec.q
    total = q ** (n * n)
    if total > min(FULL_SCAN_LIMIT, limit):
        raise InfeasibleError(f"full scan of {q}^{n * n} matrices exceeds the limit")
    return _full_scan_gen(n, spec, total)


def _full_scan_gen(n: int, spec: FieldSpec, total: int) -> Iterator[np.ndarray]:
    q = spec.q
    ops = _ops(spec)
    cells = n * n
    # low digits vary inside a batch and are tabulated once; high digits are constant per batch
    low = min(cells, max(1, int(math.log(BATCH * 4, q))))
    low_digits = _digits(np.arange(q**low, dtype=np.int64), q, low)
    small = ops.prime and n * (q - 1) ** 2 < 2**15
    for hi in range(q ** (cells - low)):
        mats = np.empty((low_digits.shape[0], cells), dtype=np.int64)
        mats[:, :low] = low_digits
        mats[:, low:] = _digits(np.array([hi]), q, cells - low)
        mats = mats.reshape(-1, n, n)
        if small:
            m16 = mats.astype(np.int16)
            keep = ~np.any(np.matmul(m16, m16) % q, axis=(-2, -1))
        else:
            keep = ops.is_zero_square(mats)
        yield mats[keep]


def _rref_subspaces(n: int, r: int, q: int) -> Iterator[np.ndarray]:
    """All r x n reduced echelon matrices of rank r (one per r-dim subspace)."""
    for pivots in itertools.combinations(range(n), r):
        free_slots = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        base = np.zeros((r, n), dtype=np.int64)
        for i, pc in enumerate(pivots):
            base[i, pc] = 1
        for vals in itertools.product(range(q), repeat=len(free_slots)):
            Y = base.copy()
            for (i, c), v in zip(free_slots, vals):
                Y[i, c] = v
            yield Y


def _full_rank_G(ops: _Ops, r: int, c: int) -> np.ndarray:
    q = ops.q
    total = q ** (r * c)
    idx = np.arange(total, dtype=np.int64)
    G = _digits(idx, q, r * c).reshape(-1, r, c)
    if r == 0 or c == 0:
        return G
    _, _, rk = ops.rref(G)
    return G[rk == r]


def _rank_parameterized_batches(n: int, spec: FieldSpec, ranks=None) -> Iterator[np.ndarray]:
    from .matrices import _nullspace

    ops = _ops(spec)
    q = spec.q
    if ranks is None:
        ranks = range(n // 2 + 1)
    for r in ranks:
        if r == 0:
            yield np.zeros((1, n, n), dtype=np.int64)
            continue
        G = _full_rank_G(ops, r, n - r)
        for Y in _rref_subspaces(n, r, q):
            K = np.array(_nullspace(spec, Y.tolist(), n), dtype=np.int64)  # (n-r) x n
            BG = ops.matmul(Y.T[None], G)  # (g, n, n-r)
            for s in range(0, BG.shape[0], BATCH):
                yield ops.matmul(BG[s : s + BATCH], K[None])


def _random_batches(n: int, spec: FieldSpec, total: int, seed: int) -> Iterator[np.ndarray]:
    """Seeded random square-zero matrices of rank 1..n//2 (repeats possible)."""
    ops = _ops(spec)
    rng = np.random.default_rng(seed)
    emitted = 0
    if n // 2 == 0:
        while emitted < total:
            k = min(BATCH, total - emitted)
            emitted += k
            yield np.zeros((k, n, n), dtype=np.int64)
        return
    size = 256  # grow geometrically so early hits stay cheap
    while emitted < total:
        want = min(size, total - emitted)
        size = min(BATCH, size * 2)
        rs = rng.integers(1, n // 2 + 1, size=want)
        chunks = []
        for r in range(1, n // 2 + 1):
            cnt = int(np.count_nonzero(rs == r))
            if cnt:
                chunks.append(_random_rank_r(ops, rng, n, r, cnt))
        batch = np.concatenate(chunks)
        batch = batch[rng.permutation(batch.shape[0])]
        emitted += batch.shape[0]
        yield batch


def _random_rank_r(ops: _Ops, rng, n: int, r: int, count: int) -> np.ndarray:
    """Rank-r square-zero samples ``M = B @ C``.

    ``C = [I_r | X]`` with columns shuffled by a random permutation, so its
    kernel is spanned by the shuffled columns of ``[[-X], [I]]`` and no
    elimination is needed.  ``B = K @ H`` with ``H`` of full rank ``r``.
    """
    q = ops.q
    out = []
    have = 0
    while have < count:
        k = count - have
        X = rng.integers(0, q, size=(k, r, n - r))
        H = rng.integers(0, q, size=(k, n - r, r))
        _, _, rk = ops.rref(np.swapaxes(H, 1, 2))
        ok = rk == r
        X, H = X[ok], H[ok]
        k = X.shape[0]
        if k == 0:
            continue
        C = np.concatenate([np.broadcast_to(np.eye(r, dtype=np.int64), (k, r, r)), X], axis=2)
        negX = ops.sub(np.zeros_like(X), X)
        K = np.concatenate([negX, np.broadcast_to(np.eye(n - r, dtype=np.int64), (k, n - r, n - r))], axis=1)
        M = ops.matmul(ops.matmul(K, H), C)
        perm = np.argsort(rng.random((k, n)), axis=1)
        ar = np.arange(k)[:, None, None]
        M = M[ar, perm[:, :, None], perm[:, None, :]]
        out.append(M)
        have += k
    return np.concatenate(out)[:count]


def square_zero_batches(n: int, spec: FieldSpec, budget: SearchBudget) -> Iterator[np.ndarray]:
    if budget.mode == "exhaustive":
        return _full_scan_batches(n, spec, budget.max_candidates)
    if budget.mode == "rank_parameterized":
        count = square_zero_count_formula(n, spec.q)
        if count > budget.max_candidates:
            raise InfeasibleError(f"{count} square-zero matrices exceed the budget of {budget.max_candidates}")
        return _rank_parameterized_batches(n, spec)
    return _random_batches(n, spec, budget.max_candidates, budget.seed)


def enumerate_square_zero(n: int, spec: FieldSpec, budget: SearchBudget = SearchBudget()) -> Iterator[Matrix]:
    """Stream square-zero matrices; see the module docstring for the modes."""
    for batch in square_zero_batches(n, spec, budget):
        for m in batch:
            yield _from_array(spec, m)


@lru_cache(maxsize=64)
def _square_zero_array(n: int, spec: FieldSpec) -> np.ndarray:
    parts = list(_rank_parameterized_batches(n, spec))
    return np.concatenate(parts)


def square_zero_set(n: int, spec: FieldSpec, mode: str = "rank_parameterized") -> set[bytes]:
    budget = SearchBudget(mode, FULL_SCAN_LIMIT)
    out = set()
    for batch in square_zero_batches(n, spec, budget):
        out.update(m.astype(np.int8).tobytes() for m in batch)
    return out


def count_square_zero(n: int, spec: FieldSpec) -> int:
    """Exact count; both enumerators are run and must agree where both are feasible."""
    count = square_zero_count_formula(n, spec.q)
    if count > FULL_SCAN_LIMIT:
        raise InfeasibleError(f"too many square-zero matrices ({count})")
    ranked = sum(b.shape[0] for b in _rank_parameterized_batches(n, spec))
    if spec.q ** (n * n) <= FULL_SCAN_LIMIT:
        scanned = sum(b.shape[0] for b in _full_scan_batches(n, spec, FULL_SCAN_LIMIT))
        if scanned != ranked:
            raise ArithmeticError(f"enumerators disagree: scan {scanned}, ranked {ranked}")
    return ranked


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    """``found`` is ``(D, M)`` or ``None``; ``complete`` means every square-zero matrix was tried."""

    found: tuple[Matrix, Matrix] | None
    complete: bool
    candidates: int
    mode: str
    seed: int | None = None

    @property
    def proves_impossible(self) -> bool:
        return self.found is None and self.complete


def oracle_decompose(A: Matrix, budget: SearchBudget = SearchBudget()) -> SearchResult:
    """Search square-zero ``M`` with ``A - M`` diagonalizable (``D^q = D``)."""
    spec = A.spec
    ops = _ops(spec)
    a = _as_array(A)
    tried = 0
    complete = budget.mode != "randomized"
    for batch in square_zero_batches(A.n, spec, budget):
        if batch.shape[0] == 0:
            continue
        d = ops.sub(a[None], batch)
        hits = np.nonzero(ops.is_potent(d))[0]
        if hits.size:
            i = int(hits[0])
            tried += i + 1
            return SearchResult(
                (_from_array(spec, d[i]), _from_array(spec, batch[i])), complete, tried, budget.mode, budget.seed
            )
        tried += batch.shape[0]
    return SearchResult(None, complete, tried, budget.mode, budget.seed if not complete else None)


def count_decompositions(A: Matrix, budget: SearchBudget) -> tuple[SearchResult, int]:
    """Scan the whole budget; returns the search summary and the number of hits."""
    spec = A.spec
    ops = _ops(spec)
    a = _as_array(A)
    tried = hits = 0
    for batch in square_zero_batches(A.n, spec, budget):
        d = ops.sub(a[None], batch)
        hits += int(np.count_nonzero(ops.is_potent(d)))
        tried += batch.shape[0]
    return SearchResult(None, budget.mode != "randomized", tried, budget.mode, budget.seed), hits


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------


@dataclass
class CensusReport:
    spec: FieldSpec
    n: int
    decomposable: int
    non_decomposable: int
    total: int
    representatives: list[tuple[Polynomial, ...]] = field(default_factory=list)
    class_sizes: list[int] = field(default_factory=list)
    non_decomposable_indices: np.ndarray | None = field(default=None, repr=False)

    def to_text(self) -> str:
        lines = [
            f"census n={self.n} field={format_field(self.spec)}",
            f"{'decomposable':<18}{self.decomposable:>10}",
            f"{'non_decomposable':<18}{self.non_decomposable:>10}",
            f"{'total':<18}{self.total:>10}",
        ]
        for facs, size in zip(self.representatives, self.class_sizes):
            lines.append(f"  {size:>8}  [{', '.join(format_poly(f) for f in facs)}]")
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        lines = [
            f"n={self.n}",
            f"field={format_field(self.spec)}",
            f"decomposable={self.decomposable}",
            f"non_decomposable={self.non_decomposable}",
            f"total={self.total}",
            f"classes={len(self.representatives)}",
        ]
        for i, (facs, size) in enumerate(zip(self.representatives, self.class_sizes)):
            lines.append(f"class.{i}.factors={';'.join(format_poly(f) for f in facs)}")
            lines.append(f"class.{i}.size={size}")
        return "\n".join(lines) + "\n"


def _classify_chunk(ops: _Ops, sz: np.ndarray, n: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    mats = _digits(idx, ops.q, n * n).reshape(-1, n, n)
    ok = np.zeros(mats.shape[0], dtype=bool)
    step = max(1, BATCH // max(1, sz.shape[0]))
    for s in range(0, mats.shape[0], step):
        a = mats[s : s + step]
        d = ops.sub(a[:, None], sz[None])
        ok[s : s + step] = ops.is_potent(d).any(axis=1)
    return ok


def decomposable_mask(n: int, spec: FieldSpec, threads: int = 1) -> np.ndarray:
    """Boolean per matrix index: does some square-zero ``M`` make ``A - M`` diagonalizable."""
    total = spec.q ** (n * n)
    if total > CENSUS_LIMIT:
        raise InfeasibleError(f"census over {spec.q}^{n * n} matrices exceeds the limit {CENSUS_LIMIT}")
    ops = _ops(spec)
    sz = _square_zero_array(n, spec)
    parts = max(1, threads) * 4
    bounds = [total * i // parts for i in range(parts + 1)]
    jobs = list(zip(bounds[:-1], bounds[1:]))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            chunks = list(pool.map(lambda se: _classify_chunk(ops, sz, n, *se), jobs))
    else:
        chunks = [_classify_chunk(ops, sz, n, s, e) for s, e in jobs]
    return np.concatenate(chunks)


def census(n: int, spec: FieldSpec, budget: SearchBudget = SearchBudget(), threads: int = 1) -> CensusReport:
    """Classify every n x n matrix; non-decomposable ones are grouped by invariant factors."""
    from .canonical import invariant_factors

    total = spec.q ** (n * n)
    if total > min(CENSUS_LIMIT, max(budget.max_candidates, 1)):
        raise InfeasibleError(f"census over {spec.q}^{n * n} = {total} matrices is infeasible")
    mask = decomposable_mask(n, spec, threads)
    bad = np.nonzero(~mask)[0]
    classes: dict[tuple, int] = {}
    reps: dict[tuple, tuple[Polynomial, ...]] = {}
    for i in bad:
        facs = invariant_factors(matrix_from_index(int(i), n, spec))
        key = tuple(f.coeffs for f in facs)
        classes[key] = classes.get(key, 0) + 1
        reps.setdefault(key, facs)
    keys = sorted(classes)
    return CensusReport(
        spec,
        n,
        decomposable=int(mask.sum()),
        non_decomposable=int(bad.size),
        total=total,
        representatives=[reps[k] for k in keys],
        class_sizes=[classes[k] for k in keys],
        non_decomposable_indices=bad,
    )


def small_order_budget(n: int, spec: FieldSpec, max_candidates: int = 10**6, seed: int = 0) -> SearchBudget:
    """Complete rank-parameterized search when it fits the budget, randomized otherwise."""
    if square_zero_count_formula(n, spec.q) <= max_candidates:
        return SearchBudget("rank_parameterized", max_candidates, seed)
    return SearchBudget("randomized", max_candidates, seed)


def feasibility(n: int, spec: FieldSpec) -> dict[str, int]:
    return {
        "matrices": spec.q ** (n * n),
        "square_zero": square_zero_count_formula(n, spec.q),
        "log2_matrices": int(math.log2(spec.q) * n * n),
    }
