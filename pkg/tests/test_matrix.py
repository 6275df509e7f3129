"""Exact linear algebra against Leibniz/minor oracles and structural laws."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from iplt import (
    BadGrsParameters,
    CompletionFailed,
    DegenerateCauchy,
    FqMatrix,
    InconsistentSystem,
    RankError,
    ShapeError,
    cauchy,
    generator_from_parity,
    grs_generator,
    hstack,
    is_mds,
    mds_complete,
    puncture,
    random_grs,
    rank,
    right_null_space,
    rref,
    solve,
    vstack,
)

from oracles import leibniz_det, naive_is_mds, naive_matmul, naive_rank

Q = 17


def mat(rows, q=Q):
    return FqMatrix(q, rows)


def rand_mat(rng, rows, cols, q=Q):
    return FqMatrix.random(q, rows, cols, rng)


# -- construction ------------------------------------------------------------


def test_constructor_validates_entries_and_shape():
    """Unreduced entries raise ValueError; ragged rows raise ShapeError."""
    with pytest.raises(ValueError):
        mat([[0, 17]])
    with pytest.raises(ValueError):
        mat([[-1]])
    with pytest.raises(ShapeError):
        mat([[1, 2], [3]])
    with pytest.raises(ShapeError):
        FqMatrix(Q, [[1, 2]], cols=3)


def test_empty_matrix_needs_cols():
    """A 0-row matrix takes its width from the cols argument."""
    m = FqMatrix(Q, [], cols=4)
    assert (m.rows, m.cols) == (0, 4)
    assert right_null_space(m).rows == 4


def test_identity_zeros_random():
    """Basic constructors have the right shape and entries."""
    assert FqMatrix.identity(Q, 3).data == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert FqMatrix.zeros(Q, 2, 3).data == ((0, 0, 0), (0, 0, 0))
    rng = random.Random(3)
    m = rand_mat(rng, 4, 5)
    assert all(0 <= v < Q for row in m.data for v in row)
    assert rand_mat(random.Random(3), 4, 5) == m


def test_access_equality_hash():
    """Indexing, column extraction, equality, and hashing are consistent."""
    m = mat([[1, 2, 3], [4, 5, 6]])
    assert m[1] == (4, 5, 6)
    assert m.column(2) == (3, 6)
    assert m == mat([[1, 2, 3], [4, 5, 6]])
    assert m != mat([[1, 2, 3], [4, 5, 7]])
    assert hash(m) == hash(mat([[1, 2, 3], [4, 5, 6]]))
    assert m != FqMatrix(19, [[1, 2, 3], [4, 5, 6]])
    assert "2x3" in repr(m)
    assert m.to_rows() == [[1, 2, 3], [4, 5, 6]]


# -- arithmetic against oracles ----------------------------------------------


def test_mul_matches_schoolbook_oracle():
    """Products agree with the naive oracle over random shapes."""
    rng = random.Random(11)
    for _ in range(20):
        r, k, c = rng.randint(1, 5), rng.randint(1, 5), rng.randint(1, 5)
        a, b = rand_mat(rng, r, k), rand_mat(rng, k, c)
        assert a.mul(b).to_rows() == naive_matmul(a.to_rows(), b.to_rows(), Q)


def test_add_sub_scale():
    """Entrywise operations reduce mod q."""
    a = mat([[16, 2], [3, 4]])
    b = mat([[5, 16], [7, 8]])
    assert a.add(b) == mat([[4, 1], [10, 12]])
    assert a.sub(b) == mat([[11, 3], [13, 13]])
    assert a.scale(2) == mat([[15, 4], [6, 8]])
    assert a.add(b).sub(b) == a
    with pytest.raises(ShapeError):
        a.add(mat([[1, 2, 3]]))
    with pytest.raises(ShapeError):
        a.mul(mat([[1, 2, 3]]))
    with pytest.raises(ShapeError):
        a.add(FqMatrix(19, [[1, 2], [3, 4]]))


def test_transpose_and_take():
    """Transpose and row/column selection rearrange entries exactly."""
    m = mat([[1, 2, 3], [4, 5, 6]])
    assert m.transpose() == mat([[1, 4], [2, 5], [3, 6]])
    assert m.transpose().transpose() == m
    assert m.take_rows([1]) == mat([[4, 5, 6]])
    assert m.take_cols([2, 0]) == mat([[3, 1], [6, 4]])


def test_stack_and_puncture():
    """vstack/hstack concatenate; puncture deletes columns in order."""
    a, b = mat([[1, 2]]), mat([[3, 4]])
    assert vstack([a, b]) == mat([[1, 2], [3, 4]])
    assert hstack([a, b]) == mat([[1, 2, 3, 4]])
    assert puncture(mat([[1, 2, 3], [4, 5, 6]]), [1]) == mat([[1, 3], [4, 6]])
    with pytest.raises(IndexError):
        puncture(a, [5])
    with pytest.raises(ShapeError):
        vstack([])
    with pytest.raises(ShapeError):
        hstack([a, mat([[1], [2]])])
    with pytest.raises(ShapeError):
        vstack([a, mat([[1], [2]])])


# -- elimination -------------------------------------------------------------


def test_rank_matches_minor_oracle():
    """Gaussian rank equals the largest invertible-minor size."""
    rng = random.Random(23)
    for _ in range(25):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        m = rand_mat(rng, r, c)
        assert rank(m) == naive_rank(m.to_rows(), Q)
    assert rank(FqMatrix.zeros(Q, 3, 3)) == 0
    assert rank(FqMatrix.identity(Q, 4)) == 4


def test_rref_properties():
    """RREF has unit leading entries, clean pivot columns, same row space."""
    rng = random.Random(5)
    for _ in range(15):
        m = rand_mat(rng, rng.randint(1, 4), rng.randint(1, 5))
        r = rref(m)
        assert rank(r) == rank(m)
        assert rank(vstack([m, r])) == rank(m)
        seen_pivots = []
        for row in r.data:
            nz = [j for j, v in enumerate(row) if v]
            if not nz:
                continue
            lead = nz[0]
            assert row[lead] == 1
            assert all(r.data[i][lead] == 0 for i in range(r.rows) if r.data[i] != row)
            assert seen_pivots == [] or lead > seen_pivots[-1]
            seen_pivots.append(lead)


def test_null_space_annihilates():
    """Null-space rows satisfy m @ x = 0 and have full count cols - rank."""
    rng = random.Random(9)
    for _ in range(20):
        m = rand_mat(rng, rng.randint(1, 4), rng.randint(1, 6))
        ns = right_null_space(m)
        assert ns.rows == m.cols - rank(m)
        if ns.rows:
            prod = m.mul(ns.transpose())
            assert all(v == 0 for row in prod.data for v in row)
            assert rank(ns) == ns.rows


def test_solve_consistent_and_inconsistent():
    """solve returns an exact solution or raises InconsistentSystem."""
    a = mat([[1, 2], [3, 4]])
    x = mat([[5], [6]])
    b = a.mul(x)
    assert a.mul(solve(a, b)) == b
    singular = mat([[1, 2], [2, 4]])
    with pytest.raises(InconsistentSystem):
        solve(singular, mat([[1], [1]]))
    with pytest.raises(ShapeError):
        solve(a, mat([[1]]))
    with pytest.raises(ShapeError):
        solve(a, FqMatrix(19, [[1], [2]]))
    empty = solve(FqMatrix(Q, [], cols=2), FqMatrix(Q, [], cols=1))
    assert (empty.rows, empty.cols) == (2, 1)


def test_solve_underdetermined_sets_free_to_zero():
    """Free variables are pinned to zero so results are deterministic."""
    a = mat([[1, 2, 3]])
    b = mat([[4]])
    sol = solve(a, b)
    assert a.mul(sol) == b
    assert sol == solve(a, b)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_solve_roundtrip_property(seed):
    """a @ solve(a, a @ x) == a @ x for random square systems."""
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    a = rand_mat(rng, n, n)
    x = rand_mat(rng, n, 2)
    b = a.mul(x)
    assert a.mul(solve(a, b)) == b


# -- MDS machinery -----------------------------------------------------------


def test_is_mds_matches_leibniz_oracle():
    """is_mds agrees with determinant-by-permutations on random matrices."""
    rng = random.Random(31)
    for _ in range(30):
        r = rng.randint(1, 3)
        c = rng.randint(r, 5)
        m = rand_mat(rng, r, c)
        assert is_mds(m) == naive_is_mds(m.to_rows(), Q)


def test_is_mds_edges():
    """Zero-row matrices are vacuously MDS; tall matrices are an error."""
    assert is_mds(FqMatrix(Q, [], cols=3)) is True
    assert is_mds(mat([[1, 0], [0, 1]])) is True
    assert is_mds(mat([[1, 0, 0], [0, 1, 0]])) is False
    with pytest.raises(ShapeError):
        is_mds(mat([[1], [2]]))


def test_cauchy_values_and_degeneracy():
    """Cauchy entries invert coordinate differences; collisions raise."""
    w = cauchy(Q, (1, 5, 7), (11, 16))
    assert w == mat([[5, 9], [14, 3], [4, 15]])
    for i, xi in enumerate((1, 5, 7)):
        for j, yj in enumerate((11, 16)):
            assert (w.data[i][j] * (xi - yj)) % Q == 1
    with pytest.raises(DegenerateCauchy):
        cauchy(Q, (1, 5), (5,))
    with pytest.raises(DegenerateCauchy):
        cauchy(Q, (1, 18), ())


def test_cauchy_is_mds():
    """Every square submatrix of a Cauchy matrix is invertible."""
    w = cauchy(Q, (0, 1, 2), (3, 4, 5, 6))
    assert is_mds(w)
    assert is_mds(w.transpose().take_rows([0, 1, 2]))


def test_grs_generator_structure():
    """GRS entries are multiplier times point power; result is MDS."""
    g = grs_generator(Q, 3, 5, (1, 2, 3, 4, 5), (1, 1, 2, 1, 3))
    for i in range(3):
        for j, (p, m_) in enumerate(zip((1, 2, 3, 4, 5), (1, 1, 2, 1, 3))):
            assert g.data[i][j] == (m_ * pow(p, i, Q)) % Q
    assert is_mds(g)


def test_grs_generator_rejections():
    """Bad sizes, repeated points, or zero multipliers raise."""
    with pytest.raises(BadGrsParameters):
        grs_generator(Q, 4, 3, (1, 2, 3), (1, 1, 1))
    with pytest.raises(BadGrsParameters):
        grs_generator(Q, 2, 18, range(18), [1] * 18)
    with pytest.raises(BadGrsParameters):
        grs_generator(Q, 2, 3, (1, 2, 2), (1, 1, 1))
    with pytest.raises(BadGrsParameters):
        grs_generator(Q, 2, 3, (1, 2, 3), (1, 0, 1))
    with pytest.raises(BadGrsParameters):
        random_grs(Q, 2, 18, random.Random(0))


def test_random_grs_deterministic_and_mds():
    """Same seed gives the same matrix; every draw is MDS."""
    assert random_grs(Q, 2, 7, random.Random(42)) == random_grs(
        Q, 2, 7, random.Random(42)
    )
    for seed in range(10):
        assert is_mds(random_grs(Q, 3, 6, random.Random(seed)))


# -- pinned-column completion -------------------------------------------------


def test_mds_complete_preserves_fixed_and_is_mds():
    """Fixed columns survive bit-identical and the result is MDS."""
    rng = random.Random(1)
    base = random_grs(Q, 2, 4, rng)
    template = hstack([base, FqMatrix.zeros(Q, 2, 3)])
    done = mds_complete(template, [4, 5, 6], rng)
    assert done.take_cols(range(4)) == base
    assert is_mds(done)


def test_mds_complete_no_free_columns_is_identity_op():
    """An empty free set returns the template unchanged."""
    m = mat([[1, 2], [3, 4]])
    assert mds_complete(m, [], random.Random(0)) is m


def test_mds_complete_all_free():
    """With every column free the result is simply a random MDS matrix."""
    template = FqMatrix.zeros(Q, 3, 6)
    done = mds_complete(template, range(6), random.Random(4))
    assert is_mds(done)


def test_mds_complete_single_row():
    """A 1-row completion just avoids zeros."""
    template = FqMatrix(Q, [[5, 0, 0]])
    done = mds_complete(template, [1, 2], random.Random(0))
    assert done.data[0][0] == 5
    assert all(v != 0 for v in done.data[0])


def test_mds_complete_rejects_bad_columns():
    """Out-of-range free columns raise ShapeError."""
    with pytest.raises(ShapeError):
        mds_complete(mat([[1, 2]]), [2], random.Random(0))


def test_mds_complete_budget_exhaustion():
    """An impossible template exhausts its draw budget with CompletionFailed."""
    template = FqMatrix(2, [[1, 0, 0, 0], [0, 1, 0, 0]])
    with pytest.raises(CompletionFailed):
        mds_complete(template, [2, 3], random.Random(0), retry_cap=50)


def test_mds_complete_dependent_fixed_columns():
    """A dependent pinned column pair is reported, not retried forever."""
    template = mat([[1, 2, 0], [2, 4, 0], [3, 6, 0]])
    with pytest.raises(CompletionFailed):
        mds_complete(template, [2], random.Random(0), retry_cap=500)


def test_mds_complete_success_rate_on_wide_template():
    """At least 990 of 1000 seeded fills succeed on a 2 x 15 template."""
    base = grs_generator(Q, 2, 9, range(1, 10), [1] * 9)
    template = hstack([base, FqMatrix.zeros(Q, 2, 6)])
    free = list(range(9, 15))
    ok = 0
    for seed in range(1000):
        try:
            done = mds_complete(template, free, random.Random(seed))
        except CompletionFailed:
            continue
        assert done.take_cols(range(9)) == base
        ok += 1
    assert ok >= 990
    for seed in (0, 1, 2):
        assert is_mds(mds_complete(template, free, random.Random(seed)))


def test_mds_complete_value_pinned_null_space_shape():
    """The embedding-case shape (5 rows, 7 pinned of 10) completes and stays MDS."""
    rng = random.Random(20)
    lam = random_grs(Q, 5, 7, rng)
    cols = [0, 2, 3, 5, 6, 7, 9]
    rows = [[0] * 10 for _ in range(5)]
    for j, col in enumerate(cols):
        for i in range(5):
            rows[i][col] = lam.data[i][j]
    template = FqMatrix(Q, rows)
    done = mds_complete(template, [1, 4, 8], rng, retry_cap=200_000)
    assert done.take_cols(cols) == lam
    assert is_mds(done)


# -- generator from parity -----------------------------------------------------


def test_generator_from_parity_orthogonal_full_rank():
    """G @ H^T = 0 with complementary full ranks."""
    rng = random.Random(8)
    h = random_grs(Q, 3, 7, rng)
    g = generator_from_parity(h, 7)
    assert (g.rows, g.cols) == (4, 7)
    assert rank(g) == 4
    prod = g.mul(h.transpose())
    assert all(v == 0 for row in prod.data for v in row)


def test_generator_from_parity_edges():
    """A 0-row parity yields the identity; rank deficiency raises."""
    assert generator_from_parity(FqMatrix(Q, [], cols=4), 4) == FqMatrix.identity(Q, 4)
    with pytest.raises(RankError):
        generator_from_parity(mat([[1, 2, 3], [2, 4, 6]]), 3)
    with pytest.raises(ShapeError):
        generator_from_parity(mat([[1, 2]]), 3)


def test_leibniz_det_oracle_sanity():
    """The oracle itself gets a known determinant right."""
    assert leibniz_det([[1, 2], [3, 4]], Q) == (1 * 4 - 2 * 3) % Q
    assert leibniz_det([[2, 0, 0], [0, 3, 0], [0, 0, 5]], Q) == 30 % Q
