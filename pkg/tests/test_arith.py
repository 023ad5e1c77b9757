from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from gl1hom.arith import (
    PrimeFieldElement,
    SparseIntMatrix,
    bareiss_rank,
    check_prime,
    crt_symmetric,
    inverse_modp,
    matmul_modp,
    primes_below,
    rank_modp,
    rank_rational,
    solve_integral,
    solve_rational,
)
from gl1hom.errors import NonIntegral, NotPrime, Singular


def M(rows):
    return SparseIntMatrix.from_dense(rows)


@pytest.mark.parametrize(
    "rows,rank",
    [([[2]], 1), ([[0] * 4] * 3, 0), ([[1, 2], [2, 4]], 1)],
)
def test_rank_rational_examples(rows, rank):
    assert rank_rational(M(rows)) == rank


@pytest.mark.parametrize(
    "rows,p,rank",
    [([[2]], 2, 0), ([[1, 2], [2, 4]], 3, 1), ([[1, 1], [1, 2]], 5, 2)],
)
def test_rank_modp_examples(rows, p, rank):
    assert rank_modp(M(rows), p) == rank


def test_rank_modp_rejects_composite():
    with pytest.raises(NotPrime):
        rank_modp(M([[1]]), 4)


@pytest.mark.parametrize("p", [0, 1, 4, 9, -3, 2.0])
def test_check_prime_rejects(p):
    with pytest.raises(NotPrime):
        check_prime(p)


def test_solve_integral_examples():
    assert solve_integral(M([[0, -1], [-1, 0]]), [-1, 0]) == [0, 1]
    eye = M([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert solve_integral(eye, [4, -1, 0]) == [4, -1, 0]
    with pytest.raises(NonIntegral):
        solve_integral(M([[2]]), [1])


def test_solve_rational_singular():
    assert solve_rational(M([[2]]), [1]) == [Fraction(1, 2)]
    with pytest.raises(Singular):
        solve_rational(M([[1, 2], [2, 4]]), [1, 0])


def test_sparse_matrix_basics():
    m = SparseIntMatrix.from_triples(2, 3, [(0, 1, 5), (1, 2, -1)])
    assert m.to_dense() == [[0, 5, 0], [0, 0, -1]]
    assert m.nnz == 2
    assert m.transpose().to_dense() == [[0, 0], [5, 0], [0, -1]]
    with pytest.raises(ValueError):
        SparseIntMatrix.from_triples(1, 1, [(0, 0, 1), (0, 0, 2)])
    prod = M([[1, 2]]) @ M([[3], [4]])
    assert prod.to_dense() == [[11]]


def test_prime_field_element():
    a = PrimeFieldElement(3, 7)
    assert int(a * a.inverse()) == 1
    assert int(a - 5) == 5
    assert int(-a) == 4
    assert a / a == PrimeFieldElement(1, 7)


def test_primes_below_descending():
    ps = primes_below(100, 4)
    assert ps == [97, 89, 83, 79]
    assert primes_below(100, 2, skip=2) == [83, 79]


def test_modular_helpers():
    a = np.array([[2, 1], [1, 1]], dtype=np.int64)
    inv = inverse_modp(a, 101)
    assert np.array_equal(matmul_modp(a, inv, 101), np.eye(2, dtype=np.int64))
    assert inverse_modp(np.array([[1, 2], [2, 4]], dtype=np.int64), 101) is None


def test_crt_symmetric_recovers_signed_values():
    vals = np.array([-123456789, 0, 987654321, -1], dtype=object)
    primes = primes_below(2**21, 3)
    residues = [np.array([int(v) % p for v in vals], dtype=np.int64) for p in primes]
    assert [int(x) for x in crt_symmetric(residues, primes)] == [int(v) for v in vals]


def test_crt_symmetric_beyond_int64():
    primes = primes_below(2**21, 5)
    big = 2**90 + 12345
    residues = [np.array([big % p, (-big) % p], dtype=np.int64) for p in primes]
    assert [int(x) for x in crt_symmetric(residues, primes)] == [big, -big]


small_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=150, deadline=None)
@given(small_matrices)
def test_rank_rational_matches_sympy(rows):
    want = sympy.Matrix(rows).rank()
    assert rank_rational(M(rows)) == want
    assert rank_rational(M(rows), dense_threshold=0) == want
    assert bareiss_rank(rows) == want


@settings(max_examples=150, deadline=None)
@given(small_matrices, st.sampled_from([2, 3, 5, 7]))
def test_rank_modp_matches_sympy(rows, p):
    want = sympy.Matrix(rows).applyfunc(lambda x: x % p)
    # rank over F_p: row reduce with modular arithmetic
    from sympy.polys.matrices import DomainMatrix
    from sympy import GF

    dm = DomainMatrix.from_Matrix(want).convert_to(GF(p))
    assert rank_modp(M(rows), p) == dm.rank()
    assert rank_modp(M(rows), p) <= rank_rational(M(rows))
