"""Dense exact linear algebra over GF(q).

Matrices are immutable, row-major tuples of tuples of ints reduced mod q.
Everything is computed exactly with integer arithmetic; no floats anywhere.
Structured constructions used by the protocol live here too: Cauchy blocks,
generalized Reed-Solomon (GRS) generators, pinned-column MDS completion, and
generator-from-parity via null spaces.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Sequence

from .errors import (
    BadGrsParameters,
    CompletionFailed,
    DegenerateCauchy,
    InconsistentSystem,
    RankError,
    ShapeError,
)


class FqMatrix:
    """Immutable dense matrix over GF(q); entries are ints in [0, q)."""

    __slots__ = ("q", "rows", "cols", "data")

    def __init__(self, q: int, data: Iterable[Iterable[int]], cols: int | None = None):
        rows_t = tuple(tuple(int(v) for v in row) for row in data)
        if rows_t:
            width = len(rows_t[0])
            for row in rows_t:
                if len(row) != width:
                    raise ShapeError("rows have unequal lengths")
            if cols is not None and cols != width:
                raise ShapeError(f"declared cols={cols} but rows have {width}")
        else:
            width = 0 if cols is None else cols
        for row in rows_t:
            for v in row:
                if not 0 <= v < q:
                    raise ValueError(f"entry {v} not reduced mod {q}")
        self.q = q
        self.rows = len(rows_t)
        self.cols = width
        self.data = rows_t

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, q: int, rows: int, cols: int) -> "FqMatrix":
        return cls(q, [[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, q: int, n: int) -> "FqMatrix":
        return cls(q, [[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def random(cls, q: int, rows: int, cols: int, rng: random.Random) -> "FqMatrix":
        return cls(q, [[rng.randrange(q) for _ in range(cols)] for _ in range(rows)], cols=cols)

    # -- access --------------------------------------------------------------

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def to_rows(self) -> list[list[int]]:
        """Mutable copy of the entries."""
        return [list(row) for row in self.data]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.data)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FqMatrix)
            and other.q == self.q
            and other.cols == self.cols
            and other.data == self.data
        )

    def __hash__(self) -> int:
        return hash((self.q, self.cols, self.data))

    def __repr__(self) -> str:
        return f"FqMatrix(q={self.q}, {self.rows}x{self.cols})"

    # -- arithmetic ----------------------------------------------------------

    def _check_same_field(self, other: "FqMatrix") -> None:
        if self.q != other.q:
            raise ShapeError(f"field mismatch: GF({self.q}) vs GF({other.q})")

    def add(self, other: "FqMatrix") -> "FqMatrix":
        self._check_same_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("addition shape mismatch")
        q = self.q
        return FqMatrix(
            q,
            [[(a + b) % q for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
            cols=self.cols,
        )

    def sub(self, other: "FqMatrix") -> "FqMatrix":
        self._check_same_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("subtraction shape mismatch")
        q = self.q
        return FqMatrix(
            q,
            [[(a - b) % q for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
            cols=self.cols,
        )

    def scale(self, s: int) -> "FqMatrix":
        q = self.q
        s %= q
        return FqMatrix(q, [[(s * v) % q for v in row] for row in self.data], cols=self.cols)

    def mul(self, other: "FqMatrix") -> "FqMatrix":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        q = self.q
        bt = other.transpose().data
        out = [[sum(a * b for a, b in zip(row, col)) % q for col in bt] for row in self.data]
        return FqMatrix(q, out if self.rows else [], cols=other.cols)

    def transpose(self) -> "FqMatrix":
        return FqMatrix(
            self.q,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    # -- selection -----------------------------------------------------------

    def take_rows(self, idx: Sequence[int]) -> "FqMatrix":
        return FqMatrix(self.q, [self.data[i] for i in idx], cols=self.cols)

    def take_cols(self, idx: Sequence[int]) -> "FqMatrix":
        return FqMatrix(self.q, [[row[j] for j in idx] for row in self.data], cols=len(idx))


def vstack(mats: Sequence[FqMatrix]) -> FqMatrix:
    """Stack matrices vertically; all must share q and column count."""
    if not mats:
        raise ShapeError("vstack of nothing")
    q, cols = mats[0].q, mats[0].cols
    rows: list[tuple[int, ...]] = []
    for m in mats:
        if m.q != q or m.cols != cols:
            raise ShapeError("vstack mismatch")
        rows.extend(m.data)
    return FqMatrix(q, rows, cols=cols)


def hstack(mats: Sequence[FqMatrix]) -> FqMatrix:
    """Stack matrices horizontally; all must share q and row count."""
    if not mats:
        raise ShapeError("hstack of nothing")
    q, nrows = mats[0].q, mats[0].rows
    for m in mats:
        if m.q != q or m.rows != nrows:
            raise ShapeError("hstack mismatch")
    rows = [sum((m.data[i] for m in mats), ()) for i in range(nrows)]
    return FqMatrix(q, rows, cols=sum(m.cols for m in mats))


def puncture(m: FqMatrix, cols: Iterable[int]) -> FqMatrix:
    """Delete the given columns; survivors keep their relative order."""
    drop = set(cols)
    for c in drop:
        if not 0 <= c < m.cols:
            raise IndexError(f"column {c} out of range for {m.cols} columns")
    keep = [j for j in range(m.cols) if j not in drop]
    return m.take_cols(keep)


# -- elimination -----------------------------------------------------------


def _rref(rows: list[list[int]], q: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form in place; returns (rows, pivot columns)."""
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    pivots: list[int] = []
    pr = 0
    for c in range(ncols):
        if pr == m:
            break
        pv = next((r for r in range(pr, m) if rows[r][c]), None)
        if pv is None:
            continue
        rows[pr], rows[pv] = rows[pv], rows[pr]
        inv = pow(rows[pr][c], q - 2, q)
        rows[pr] = [(v * inv) % q for v in rows[pr]]
        lead = rows[pr]
        for r in range(m):
            if r != pr and rows[r][c]:
                f = rows[r][c]
                rows[r] = [(v - f * w) % q for v, w in zip(rows[r], lead)]
        pivots.append(c)
        pr += 1
    return rows, pivots


def rref(m: FqMatrix) -> FqMatrix:
    """Reduced row echelon form (zero rows kept at the bottom)."""
    rows, _ = _rref(m.to_rows(), m.q)
    return FqMatrix(m.q, rows, cols=m.cols)


def rank(m: FqMatrix) -> int:
    """Rank by exact Gaussian elimination."""
    _, pivots = _rref(m.to_rows(), m.q)
    return len(pivots)


def right_null_space(m: FqMatrix) -> FqMatrix:
    """Basis for {x : m @ x^T = 0}, as rows, canonicalized by RREF.

    Returns a (cols - rank) x cols matrix; zero rows count means the null
    space is trivial.
    """
    q = m.q
    red, piv = _rref(m.to_rows(), q)
    pivset = set(piv)
    free = [c for c in range(m.cols) if c not in pivset]
    basis: list[list[int]] = []
    for f in free:
        v = [0] * m.cols
        v[f] = 1
        for r, pc in enumerate(piv):
            v[pc] = (-red[r][f]) % q
        basis.append(v)
    if not basis:
        return FqMatrix(q, [], cols=m.cols)
    canon, cpiv = _rref(basis, q)
    return FqMatrix(q, canon[: len(cpiv)], cols=m.cols)


def solve(a: FqMatrix, b: FqMatrix) -> FqMatrix:
    """One solution X of a @ X = b; raises InconsistentSystem if none exists.

    Free variables are set to zero, so the result is deterministic.
    """
    if a.q != b.q:
        raise ShapeError("field mismatch in solve")
    if a.rows != b.rows:
        raise ShapeError(f"solve shape mismatch: {a.rows} vs {b.rows} rows")
    n = a.cols
    aug = [list(ra) + list(rb) for ra, rb in zip(a.data, b.data)]
    if not aug:
        return FqMatrix.zeros(a.q, n, b.cols)
    red, piv = _rref(aug, a.q)
    x = [[0] * b.cols for _ in range(n)]
    for r, pc in enumerate(piv):
        if pc >= n:
            raise InconsistentSystem("no solution: pivot in the constant block")
        x[pc] = list(red[r][n:])
    return FqMatrix(a.q, x, cols=b.cols)


def _invertible(square: list[list[int]], q: int) -> bool:
    """Exact invertibility test by elimination with early exit."""
    n = len(square)
    rows = [row[:] for row in square]
    for c in range(n):
        pv = next((r for r in range(c, n) if rows[r][c]), None)
        if pv is None:
            return False
        rows[c], rows[pv] = rows[pv], rows[c]
        inv = pow(rows[c][c], q - 2, q)
        lead = [(v * inv) % q for v in rows[c]]
        rows[c] = lead
        for r in range(c + 1, n):
            if rows[r][c]:
                f = rows[r][c]
                rows[r] = [(v - f * w) % q for v, w in zip(rows[r], lead)]
    return True


# -- MDS machinery ----------------------------------------------------------


def is_mds(m: FqMatrix) -> bool:
    """True iff every maximal (rows x rows) minor of m is invertible.

    A matrix with more rows than columns has no maximal minors and the call
    is a usage error (ShapeError).  A 0-row matrix is vacuously MDS.
    """
    r, n = m.rows, m.cols
    if r > n:
        raise ShapeError(f"is_mds needs rows <= cols, got {r}x{n}")
    if r == 0:
        return True
    colv = [m.column(j) for j in range(n)]
    for sub in itertools.combinations(range(n), r):
        sq = [[colv[j][i] for j in sub] for i in range(r)]
        if not _invertible(sq, m.q):
            return False
    return True


def cauchy(q: int, x: Sequence[int], y: Sequence[int]) -> FqMatrix:
    """Cauchy matrix w[i][j] = 1 / (x[i] - y[j]) over GF(q).

    All of x and y together must be distinct mod q, otherwise some entry
    would divide by zero (DegenerateCauchy).
    """
    xs = [v % q for v in x]
    ys = [v % q for v in y]
    if len(set(xs + ys)) != len(xs) + len(ys):
        raise DegenerateCauchy("cauchy parameters collide mod q")
    return FqMatrix(
        q,
        [[pow((xi - yj) % q, q - 2, q) for yj in ys] for xi in xs],
        cols=len(ys),
    )


def grs_generator(
    q: int,
    k: int,
    n: int,
    points: Sequence[int],
    multipliers: Sequence[int],
) -> FqMatrix:
    """Generator of a generalized Reed-Solomon code: entry[i][j] = m_j * p_j^i.

    Requires 0 <= k <= n <= q, n distinct evaluation points, and n nonzero
    column multipliers; every maximal minor is then a scaled Vandermonde
    determinant, hence invertible, so the result is MDS by construction.
    """
    if not 0 <= k <= n:
        raise BadGrsParameters(f"need 0 <= k <= n, got k={k} n={n}")
    if n > q:
        raise BadGrsParameters(f"need n <= q for distinct points, got n={n} q={q}")
    pts = [p % q for p in points]
    mults = [m % q for m in multipliers]
    if len(pts) != n or len(set(pts)) != n:
        raise BadGrsParameters("points must be n distinct field elements")
    if len(mults) != n or any(m == 0 for m in mults):
        raise BadGrsParameters("multipliers must be n nonzero field elements")
    return FqMatrix(
        q,
        [[(mults[j] * pow(pts[j], i, q)) % q for j in range(n)] for i in range(k)],
        cols=n,
    )


def random_grs(q: int, k: int, n: int, rng: random.Random) -> FqMatrix:
    """Random GRS generator: uniform distinct points, uniform nonzero multipliers."""
    if n > q:
        raise BadGrsParameters(f"need n <= q, got n={n} q={q}")
    points = rng.sample(range(q), n)
    multipliers = [rng.randrange(1, q) for _ in range(n)]
    return grs_generator(q, k, n, points, multipliers)


_COLUMN_TRIES = 64


def _column_extends(placed: list[tuple[int, ...]], cand: tuple[int, ...], q: int) -> bool:
    """True iff cand keeps the placed columns completable to an MDS matrix.

    With at least rows-1 columns placed, checks every maximal minor the
    candidate completes; with fewer, checks plain linear independence.
    """
    r = len(cand)
    k = len(placed)
    if k >= r - 1:
        for sub in itertools.combinations(placed, r - 1):
            sq = [[col[i] for col in sub] + [cand[i]] for i in range(r)]
            if not _invertible(sq, q):
                return False
        return True
    mat = [list(col) for col in placed] + [list(cand)]
    red, piv = _rref(mat, q)
    return len(piv) == k + 1


def _hyperplane_normal(cols: Sequence[tuple[int, ...]], q: int) -> tuple[int, ...]:
    """Normal vector of the hyperplane spanned by r-1 independent r-vectors.

    A candidate column lies on the hyperplane (completes a singular maximal
    minor with these columns) iff its dot product with the normal is zero.
    """
    r = len(cols[0])
    red, piv = _rref([list(c) for c in cols], q)
    if len(piv) != r - 1:
        raise CompletionFailed(
            "fixed columns contain a dependent subset; no MDS completion exists"
        )
    pivset = set(piv)
    f = next(c for c in range(r) if c not in pivset)
    v = [0] * r
    v[f] = 1
    for i, pc in enumerate(piv):
        v[pc] = (-red[i][f]) % q
    return tuple(v)


def mds_complete(
    template: FqMatrix,
    free_cols: Iterable[int],
    rng: random.Random,
    retry_cap: int = 100_000,
) -> FqMatrix:
    """Fill the free columns of template so the whole matrix is MDS.

    The fixed columns (all others) are kept bit-identical and must be
    mutually MDS already.  Free columns are filled one at a time by
    rejection sampling against the hyperplanes spanned by the (rows-1)
    column subsets placed so far: a candidate is acceptable iff no such
    hyperplane contains it, tested by one dot product with each precomputed
    hyperplane normal.  The per-column try budget scales with the expected
    acceptance density, and exhausting a column's budget restarts the whole
    fill to escape genuinely dead-ended earlier placements.  The retry cap
    counts candidate draws across restarts; exhausting it raises
    CompletionFailed.
    """
    q, r, n = template.q, template.rows, template.cols
    free = sorted(set(free_cols))
    for c in free:
        if not 0 <= c < n:
            raise ShapeError(f"free column {c} out of range for {n} columns")
    if r == 0 or not free:
        return template
    freeset = set(free)
    fixed = [template.column(j) for j in range(n) if j not in freeset]
    draws = 0

    def spend() -> None:
        nonlocal draws
        draws += 1
        if draws > retry_cap:
            raise CompletionFailed(
                f"no MDS completion found within {retry_cap} column draws"
            )

    if r == 1:
        filled = {j: template.column(j) for j in range(n) if j not in freeset}
        for f in free:
            spend()
            filled[f] = (rng.randrange(1, q),)
        return FqMatrix(q, [[filled[j][0] for j in range(n)]], cols=n)

    base_normals = (
        [_hyperplane_normal(sub, q) for sub in itertools.combinations(fixed, r - 1)]
        if len(fixed) >= r - 1
        else []
    )
    while True:
        placed = list(fixed)
        normals = list(base_normals)
        dead_end = False
        for f in free:
            use_normals = len(placed) >= r - 1
            if use_normals:
                density = (1.0 - 1.0 / q) ** len(normals)
                tries = max(_COLUMN_TRIES, int(8.0 / max(density, 1e-15)))
            else:
                tries = _COLUMN_TRIES
            tries = min(tries, max(1, retry_cap - draws))
            chosen: tuple[int, ...] | None = None
            for _ in range(tries):
                spend()
                cand = tuple(rng.randrange(q) for _ in range(r))
                if use_normals:
                    good = all(
                        sum(a * b for a, b in zip(nv, cand)) % q for nv in normals
                    )
                else:
                    good = _column_extends(placed, cand, q)
                if good:
                    chosen = cand
                    break
            if chosen is None:
                dead_end = True
                break
            if len(placed) >= r - 2:
                for sub in itertools.combinations(placed, r - 2):
                    normals.append(_hyperplane_normal(list(sub) + [chosen], q))
            placed.append(chosen)
        if not dead_end:
            filled = {j: template.column(j) for j in range(n) if j not in freeset}
            for f, col in zip(free, placed[len(fixed) :]):
                filled[f] = col
            return FqMatrix(
                q,
                [[filled[j][i] for j in range(n)] for i in range(r)],
                cols=n,
            )


def generator_from_parity(h: FqMatrix, n: int) -> FqMatrix:
    """Generator matrix of the code with parity-check matrix h.

    h must be (n-k) x n with full row rank; the result G is k x n with full
    row rank and G @ h^T = 0.  A 0-row h yields the identity.
    """
    if h.cols != n:
        raise ShapeError(f"parity check has {h.cols} columns, expected {n}")
    if h.rows == 0:
        return FqMatrix.identity(h.q, n)
    if rank(h) != h.rows:
        raise RankError("parity-check matrix must have full row rank")
    return right_null_space(h)
