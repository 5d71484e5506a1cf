"""Sparse exact linear algebra against a dense Fraction Gaussian elimination."""

import random
from fractions import Fraction

import pytest

from gcx.exactla import DimensionError, SparseRationalMatrix, kernel_basis, rank, solve


def dense_rank(rows):
    rows = [list(r) for r in rows]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def random_matrix(rng, m, n, density=0.4):
    return [
        [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) if rng.random() < density else Fraction(0) for _ in range(n)]
        for _ in range(m)
    ]


def test_rank_against_dense():
    rng = random.Random(1)
    for _ in range(80):
        m, n = rng.randint(1, 7), rng.randint(1, 7)
        A = random_matrix(rng, m, n)
        assert rank(SparseRationalMatrix.from_dense(A)) == dense_rank(A)


def test_rank_of_product_is_bounded():
    rng = random.Random(2)
    A = SparseRationalMatrix.from_dense(random_matrix(rng, 5, 2, 1.0))
    B = SparseRationalMatrix.from_dense(random_matrix(rng, 2, 6, 1.0))
    assert rank(A @ B) <= 2


def test_kernel_and_solve():
    rng = random.Random(3)
    for _ in range(50):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = random_matrix(rng, m, n)
        M = SparseRationalMatrix.from_dense(A)
        ker = kernel_basis(M)
        assert len(ker) == n - dense_rank(A)
        for v in ker:
            assert all(x == 0 for x in M.matvec(v))
        x0 = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
        b = M.matvec(x0)
        x = solve(M, b)
        assert x is not None and M.matvec(x) == b


def test_inconsistent_system():
    M = SparseRationalMatrix.from_dense([[1, 1], [2, 2]])
    assert solve(M, [1, 3]) is None
    with pytest.raises(DimensionError):
        solve(M, [1])


def test_serialization_roundtrip():
    M = SparseRationalMatrix.from_dense([[Fraction(1, 2), 0], [0, Fraction(-3, 7)]])
    assert SparseRationalMatrix.loads(M.dumps()) == M


def test_empty_matrices():
    assert rank(SparseRationalMatrix(0, 3)) == 0
    assert len(kernel_basis(SparseRationalMatrix(0, 3))) == 3
