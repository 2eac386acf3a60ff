from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from weaksdp import (
    Matrix,
    SymBuilder,
    SymMatrix,
    congruence,
    inner,
    inner_general,
    inverse,
    random_unimodular,
    rational,
)

small_ints = st.integers(-30, 30)
small_fractions = st.fractions(min_value=-30, max_value=30, max_denominator=12)


def sym(rows):
    return SymMatrix.from_rows(rows)


class TestRational:
    @given(st.integers(), st.integers(min_value=1), st.integers(), st.integers(min_value=1))
    def test_addition_matches_bigint_oracle(self, a, b, c, d):
        # cross-multiplication with explicit gcd reduction, independent of Fraction
        got = Fraction(a, b) + Fraction(c, d)
        num, den = a * d + c * b, b * d
        g = gcd(num, den)
        if g:
            num, den = num // g, den // g
        assert (got.numerator, got.denominator) == (num, den)

    def test_lowest_terms_and_positive_denominator(self):
        q = Fraction(6, -4)
        assert q.numerator == -3 and q.denominator == 2
        assert rational("-6/4") == q

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            rational(0.5)


class TestInner:
    def test_offdiagonal_probe_vanishes(self):
        a1 = sym([[1, 0], [0, 0]])
        for x22 in (0, 5, Fraction(-7, 3)):
            x = sym([[0, 1], [1, x22]])
            assert inner(a1, x) == 0

    def test_identity_gives_order(self):
        for n in (1, 2, 5):
            assert inner(SymMatrix.identity(n), SymMatrix.identity(n)) == n

    def test_swap_pair_doubles(self):
        a2 = sym([[0, 1], [1, 0]])
        x2 = sym([[0, 1], [1, 0]])
        assert inner(a2, x2) == 2

    def test_order_mismatch_raises(self):
        with pytest.raises(ValueError):
            inner(SymMatrix.identity(2), SymMatrix.identity(3))

    @given(st.lists(small_fractions, min_size=6, max_size=6),
           st.lists(small_fractions, min_size=6, max_size=6))
    def test_symmetry(self, ua, ub):
        a = SymMatrix(3, tuple(ua))
        b = SymMatrix(3, tuple(ub))
        assert inner(a, b) == inner(b, a)


class TestCongruence:
    def test_identity_transform(self):
        a = sym([[2, 1], [1, -5]])
        assert congruence(a, Matrix.identity(2)) == a

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            congruence(SymMatrix.identity(2), Matrix.identity(3))

    @given(st.lists(small_ints, min_size=6, max_size=6), st.integers(0, 2**32), st.integers(2, 12))
    @settings(max_examples=60)
    def test_roundtrip_through_exact_inverse(self, upper, seed, budget):
        a = SymMatrix(3, tuple(Fraction(v) for v in upper))
        t = random_unimodular(3, seed, budget, 3)
        assert congruence(congruence(a, t), inverse(t)) == a

    @given(st.lists(small_ints, min_size=6, max_size=6),
           st.lists(small_ints, min_size=6, max_size=6),
           st.integers(0, 2**32))
    @settings(max_examples=60)
    def test_adjoint_identity(self, ua, ux, seed):
        # T^T A T . X == A . T X T^T, exactly
        a = SymMatrix(3, tuple(Fraction(v) for v in ua))
        x = SymMatrix(3, tuple(Fraction(v) for v in ux))
        t = random_unimodular(3, seed, 8, 2)
        assert inner(congruence(a, t), x) == inner(a, congruence(x, t.transpose()))


class TestMatrixBasics:
    def test_from_rows_rejects_asymmetry(self):
        with pytest.raises(ValueError):
            sym([[0, 1], [2, 0]])

    def test_one_based_access(self):
        m = Matrix.from_rows([[1, 2], [3, 4]])
        assert m.at(1, 2) == 2 and m.at(2, 1) == 3
        with pytest.raises(IndexError):
            m.at(0, 1)

    def test_matmul_int_and_fraction_paths_agree(self):
        a = Matrix.from_rows([[1, 2], [3, 4]])
        b = Matrix.from_rows([[5, 6], [7, 8]])
        c = Matrix.from_rows([[Fraction(1, 2), 2], [3, 4]])
        assert (a @ b).to_rows() == [[19, 22], [43, 50]]
        assert (c @ b).at(1, 1) == Fraction(5, 2) + 14

    def test_inner_general_is_trace_of_product(self):
        m = Matrix.from_rows([[1, 2, 0], [0, 1, -1]])
        y = Matrix.from_rows([[2, 0, 1], [1, 1, 1]])
        trace = sum((m.transpose() @ y).at(i, i) for i in (1, 2, 3))
        assert inner_general(m, y) == trace

    def test_unit_matrix(self):
        e = SymMatrix.unit(3, 1, 3)
        assert e.at(1, 3) == 1 and e.at(3, 1) == 1 and e.at(1, 1) == 0

    def test_builder_inner_matches_frozen(self):
        b1 = SymBuilder(3)
        b1.set(1, 2, 3)
        b1.set(3, 3, Fraction(1, 2))
        b2 = SymBuilder(3)
        b2.set(1, 2, -1)
        b2.set(3, 3, 4)
        assert b1.inner(b2) == inner(b1.freeze(), b2.freeze())

    def test_principal_submatrix(self):
        a = sym([[1, 2, 3], [2, 4, 5], [3, 5, 6]])
        p = a.principal([1, 3])
        assert p.to_rows() == [[1, 3], [3, 6]]
