"""Exact linear algebra: frozen small oracles plus seeded-random invariants."""
from __future__ import annotations

import random
from fractions import Fraction

from koszul.linalg import (
    Coefficients,
    IntegerLattice,
    Matrix,
    VectorSpan,
    cokernel_invariants,
    integer_kernel_basis,
    kernel_basis,
    lattice_quotient_invariants,
    nullity,
    rank_over_field,
    rational_rank,
    smith_normal_form,
    smith_with_transforms,
)

F2 = Coefficients.prime_field(2)
F3 = Coefficients.prime_field(3)
Q = Coefficients.rationals()
Z = Coefficients.integers()


def test_rank_frozen_example():
    # hand oracle: [[1,1],[1,1]] has equal rows, rank 1 over any field
    m = Matrix.from_rows([[1, 1], [1, 1]])
    assert rank_over_field(m, F2) == 1
    assert rank_over_field(m, Q) == 1


def test_rank_rejects_integers():
    m = Matrix.from_rows([[2]])
    try:
        rank_over_field(m, Z)
    except ValueError:
        pass
    else:
        raise AssertionError("rank over Z must be rejected")


def test_smith_frozen_examples():
    # hand oracle: diag(2,3) ~ diag(1,6); zero matrix has no invariant factors
    assert smith_normal_form(Matrix.from_rows([[2, 0], [0, 3]])) == (1, 6)
    assert smith_normal_form(Matrix(3, 2)) == ()
    assert smith_normal_form(Matrix.from_rows([[2, 4], [6, 8]])) == (2, 4)
    assert smith_normal_form(Matrix.identity(3)) == (1, 1, 1)


def _random_matrix(rng, rows, cols, lo=-4, hi=4):
    m = Matrix(rows, cols)
    for i in range(rows):
        for j in range(cols):
            if rng.random() < 0.6:
                m.set(i, j, rng.randint(lo, hi))
    return m


def test_rank_equals_transpose_rank():
    rng = random.Random(7)
    for _ in range(30):
        m = _random_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
        for c in (F2, F3, Q):
            mm = m if c is not Q else Matrix(m.rows, m.cols, {k: Fraction(v) for k, v in m.entries.items()})
            assert rank_over_field(mm, c) == rank_over_field(mm.transpose(), c)


def test_rank_plus_nullity():
    # nullity comes from the column-reduction kernel routine, not from rank
    rng = random.Random(11)
    for _ in range(30):
        m = _random_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
        for c in (F2, F3):
            assert rank_over_field(m, c) + nullity(m, c) == m.cols


def test_kernel_vectors_are_killed():
    rng = random.Random(13)
    for _ in range(20):
        m = _random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        for c in (F3, Q):
            for vec in kernel_basis(m, c):
                out = {}
                for (i, j), v in m.entries.items():
                    if j in vec:
                        out[i] = c.normalize(out.get(i, 0) + v * vec[j])
                assert all(not x for x in out.values())


def test_smith_length_equals_rational_rank():
    rng = random.Random(17)
    for _ in range(25):
        m = _random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        assert len(smith_normal_form(m)) == rational_rank(m)


def test_smith_divisibility_chain():
    rng = random.Random(19)
    for _ in range(25):
        m = _random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5), lo=-9, hi=9)
        d = smith_normal_form(m)
        for a, b in zip(d, d[1:]):
            assert b % a == 0


def test_smith_transforms_diagonalize():
    rng = random.Random(23)
    for _ in range(20):
        m = _random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        raw, s, t = smith_with_transforms(m)
        prod = s.compose(m, Z).compose(t, Z)
        for (i, j), v in prod.entries.items():
            assert i == j and i < len(raw) and v == raw[i]
        assert len(raw) == rational_rank(m)
        # unimodularity
        assert abs(_det(s.to_rows())) == 1
        assert abs(_det(t.to_rows())) == 1


def _det(a):
    a = [row[:] for row in a]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            f = Fraction(a[i][k], a[k][k])
            for j in range(k, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return det


def test_integer_kernel_basis():
    rng = random.Random(29)
    for _ in range(20):
        m = _random_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
        kers = integer_kernel_basis(m)
        assert len(kers) == m.cols - rational_rank(m)
        for vec in kers:
            out = {}
            for (i, j), v in m.entries.items():
                if j in vec:
                    out[i] = out.get(i, 0) + v * vec[j]
            assert all(x == 0 for x in out.values())


def test_lattice_membership():
    # lattice spanned by (2,0) and (0,4): membership is componentwise parity
    lat = IntegerLattice(Matrix.from_rows([[2, 0], [0, 4]]))
    assert lat.contains({0: 2, 1: 8})
    assert lat.contains({})
    assert not lat.contains({0: 1})
    assert not lat.contains({1: 2})


def test_lattice_membership_random():
    rng = random.Random(31)
    for _ in range(20):
        m = _random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
        lat = IntegerLattice(m)
        # random integer combinations of the columns must be members
        cols = m.columns()
        for _ in range(5):
            v: dict[int, int] = {}
            for col in cols:
                c = rng.randint(-3, 3)
                for i, x in col.items():
                    v[i] = v.get(i, 0) + c * x
            assert lat.contains(v)


def test_cokernel_invariants():
    # Z^2 / <(2,0),(0,3)> = Z/2 + Z/3 = Z/6
    free, tors = cokernel_invariants(Matrix.from_rows([[2, 0], [0, 3]]))
    assert free == 0 and sorted(tors) == [6]
    free, tors = cokernel_invariants(Matrix(2, 0))
    assert free == 2 and tors == ()
    free, tors = cokernel_invariants(Matrix.from_rows([[9]]))
    assert (free, tors) == (0, (9,))


def test_lattice_quotient_invariants():
    # (3^s)/(3^{s+1}) inside Z: cyclic of order 3
    a = Matrix.from_rows([[9]])
    b = Matrix.from_rows([[27]])
    assert lattice_quotient_invariants(a, b) == (0, (3,))
    # 2Z^2 / 4Z^2
    a = Matrix.from_rows([[2, 0], [0, 2]])
    b = Matrix.from_rows([[4, 0], [0, 4]])
    free, tors = lattice_quotient_invariants(a, b)
    assert free == 0 and sorted(tors) == [2, 2]


def test_vector_span_coordinates():
    span = VectorSpan(Q)
    v1 = {0: Fraction(1), 1: Fraction(2)}
    v2 = {1: Fraction(1)}
    assert span.insert(v1)
    assert span.insert(v2)
    # reduce v1 + 3*v2 and recover the combination
    target = {0: Fraction(1), 1: Fraction(5)}
    residual, combo = span.reduce(target)
    assert not residual
    assert combo == {0: Fraction(1), 1: Fraction(3)}


def test_vector_span_dependent_insert():
    span = VectorSpan(F3)
    assert span.insert({0: 1, 1: 1})
    assert not span.insert({0: 2, 1: 2})
    assert span.rank == 1
    assert span.contains({0: 1, 1: 1})
    assert not span.contains({0: 1})


def test_compose_shapes():
    a = Matrix.from_rows([[1, 2], [3, 4]])
    b = Matrix.from_rows([[1], [1]])
    assert a.compose(b, Z).to_rows() == [[3], [7]]
