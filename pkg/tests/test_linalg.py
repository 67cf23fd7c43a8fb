import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from kwald import linalg as la
from oracles import determinantal_invariants


def small_matrix(max_dim=4, bound=6):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_known_smith_form():
    snf = la.smith_normal_form(((2, 4), (6, 8)))
    assert snf.factors == (2, 4)
    assert la.matmul(la.matmul(snf.left, ((2, 4), (6, 8))), snf.right) == snf.diagonal


@settings(max_examples=60, deadline=None)
@given(small_matrix())
def test_smith_transforms_and_divisibility(rows):
    m = la.as_matrix(rows)
    snf = la.smith_normal_form(m)
    assert la.matmul(la.matmul(snf.left, m), snf.right) == snf.diagonal
    assert abs(la.determinant(snf.left)) == 1
    assert abs(la.determinant(snf.right)) == 1
    for a, b in zip(snf.factors, snf.factors[1:]):
        assert b % a == 0
    assert all(d > 0 for d in snf.factors)


@settings(max_examples=60, deadline=None)
@given(small_matrix(max_dim=3, bound=9))
def test_smith_matches_independent_oracles(rows):
    ours = la.smith_normal_form(rows).factors
    assert ours == determinantal_invariants(rows, len(rows[0]))
    theirs = tuple(int(abs(d)) for d in invariant_factors(Matrix(rows), domain=ZZ) if d != 0)
    assert ours == theirs


def test_empty_shapes():
    snf = la.smith_normal_form((), ncols=3)
    assert snf.rank == 0 and snf.right == la.identity(3)
    assert la.int_kernel((), ncols=2) == [(1, 0), (0, 1)]


@settings(max_examples=40, deadline=None)
@given(small_matrix(), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_int_solve_and_kernel(rows, x):
    m = la.as_matrix(rows)
    n = len(rows[0])
    x = tuple(x[:n])
    b = la.matvec(m, x)
    sol = la.int_solve(m, b, ncols=n)
    assert sol is not None and la.matvec(m, sol) == b
    for k in la.int_kernel(m, ncols=n):
        assert not any(la.matvec(m, k))


def test_int_solve_detects_unsolvable():
    assert la.int_solve(((2,),), (1,)) is None
    assert la.int_solve(((1, 0), (0, 0)), (0, 1)) is None


def test_hermite_basis_is_canonical():
    a = la.hermite_basis([(2, 0), (0, 3)], 2)
    b = la.hermite_basis([(2, 3), (2, 0), (4, 6)], 2)
    assert a == b
    assert la.lattice_contains([(2, 0), (0, 3)], (4, -3), 2)
    assert not la.lattice_contains([(2, 0), (0, 3)], (1, 0), 2)


def test_invert_unimodular():
    u = ((2, 1), (1, 1))
    assert la.matmul(u, la.invert_unimodular(u)) == la.identity(2)
    with pytest.raises(ValueError):
        la.invert_unimodular(((2, 0), (0, 1)))


@settings(max_examples=40, deadline=None)
@given(small_matrix(bound=4), st.sampled_from([2, 3, 5]))
def test_mod_p_rank_nullspace_solve(rows, p):
    m = la.as_matrix(rows)
    n = len(rows[0])
    r = la.rank_mod(m, p, n)
    null = la.nullspace_mod(m, p, n)
    assert r + len(null) == n
    for v in null:
        assert all(x % p == 0 for x in la.matvec(m, v))
    b = tuple(x % p for x in la.matvec(m, [1] * n))
    sol = la.solve_mod(m, b, p, n)
    assert sol is not None
    assert tuple(x % p for x in la.matvec(m, sol)) == b


def test_determinant():
    assert la.determinant(((1, 2), (3, 4))) == -2
    assert la.determinant(((0, 1), (1, 0))) == -1
    assert la.determinant(()) == 1
