import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from octospec import algebra
from octospec.algebra import CDNumber, LevelError, sign_kappa
from octospec.linear import (AVMatrix, AVVector, adjoint, apply, compose, graded_component, graded_decompose,
                             inner, is_normal, is_projection, is_unitary, left_mult_operator, op_norm,
                             picture_from_json, picture_to_json, real_picture)


def L(level, j):
    return algebra.left_matrix(CDNumber.basis(level, j))


class TestApplyInner:
    def test_identity_and_zero(self):
        x = AVVector.random(3, 3, np.random.default_rng(0))
        assert np.array_equal(apply(AVMatrix.identity(3, 3), x).data, x.data)
        assert not apply(AVMatrix.zeros(3, 3), x).data.any()

    def test_diag_example(self):
        M = AVMatrix.diag([CDNumber.basis(2, 1)])
        x = AVVector.from_entries([CDNumber.basis(2, 2)])
        assert apply(M, x).entry(0) == CDNumber.basis(2, 3)

    def test_mismatch(self):
        with pytest.raises(LevelError):
            apply(AVMatrix.identity(2, 2), AVVector.random(3, 2, np.random.default_rng(0)))
        with pytest.raises(ValueError):
            apply(AVMatrix.identity(3, 2), AVVector.random(3, 3, np.random.default_rng(0)))

    def test_inner_examples(self):
        e1 = AVVector.from_entries([CDNumber.real(3, 1.0)])
        assert inner(e1, e1) == CDNumber.real(3, 1.0)
        x = AVVector.from_entries([CDNumber.basis(3, 1)])
        assert inner(x, e1) == CDNumber.basis(3, 1) * -1.0

    @pytest.mark.parametrize("v", [1, 2, 3])
    def test_inner_conjugate_symmetric_and_positive(self, v):
        rng = np.random.default_rng(v)
        for _ in range(20):
            x, y = AVVector.random(v, 3, rng), AVVector.random(v, 3, rng)
            assert inner(x, y).allclose(inner(y, x).conj(), atol=1e-12)
            xx = inner(x, x)
            assert xx.re == pytest.approx(x.norm() ** 2)
            assert xx.imag().norm() < 1e-12


class TestAdjoint:
    def test_examples(self):
        assert np.array_equal(adjoint(AVMatrix.identity(3, 2)).data, AVMatrix.identity(3, 2).data)
        assert np.array_equal(adjoint(AVMatrix.diag([CDNumber.basis(3, 1)])).data,
                              AVMatrix.diag([CDNumber.basis(3, 1) * -1.0]).data)

    @pytest.mark.parametrize("v", [0, 1, 2])
    def test_full_equality_up_to_quaternions(self, v):
        rng = np.random.default_rng(10 + v)
        for _ in range(30):
            M = AVMatrix.random(v, 3, rng)
            x, y = AVVector.random(v, 3, rng), AVVector.random(v, 3, rng)
            assert inner(apply(M, x), y).allclose(inner(x, apply(adjoint(M), y)), atol=1e-11)

    def test_real_part_equality_for_octonions(self):
        rng = np.random.default_rng(99)
        worst_full = 0.0
        for _ in range(100):
            M = AVMatrix.random(3, 3, rng)
            x, y = AVVector.random(3, 3, rng), AVVector.random(3, 3, rng)
            lhs, rhs = inner(apply(M, x), y), inner(x, apply(adjoint(M), y))
            assert abs(lhs.re - rhs.re) <= 1e-12 * (1 + abs(lhs.re))
            worst_full = max(worst_full, (lhs - rhs).norm())
        # the imaginary parts genuinely disagree at this level
        assert worst_full > 1e-3

    def test_picture_of_adjoint_is_transpose(self):
        M = AVMatrix.random(3, 3, np.random.default_rng(5))
        assert np.allclose(real_picture(adjoint(M)), real_picture(M).T)


class TestRealPicture:
    def test_examples(self):
        assert np.array_equal(real_picture(AVMatrix.identity(3, 2)), np.eye(16))
        Li = real_picture(AVMatrix.diag([CDNumber.basis(1, 1)]))
        assert np.array_equal(Li, [[0, -1], [1, 0]])
        assert np.array_equal(compose(Li, Li), -np.eye(2))

    @pytest.mark.parametrize("v", [0, 1, 2, 3])
    def test_matches_apply(self, v):
        rng = np.random.default_rng(v)
        M, x = AVMatrix.random(v, 4, rng), AVVector.random(v, 4, rng)
        assert np.allclose(real_picture(M) @ x.flat(), apply(M, x).flat(), atol=1e-13)

    def test_compose_size_mismatch(self):
        with pytest.raises(ValueError):
            compose(np.eye(4), np.eye(8))

    @pytest.mark.parametrize("v", [1, 2, 3])
    def test_left_multiplication_anticommutation(self, v):
        n = 1 << v
        for j, k in itertools.product(range(n), repeat=2):
            lhs = compose(L(v, j), L(v, k))
            assert np.array_equal(lhs, (-1) ** sign_kappa(j, k, v) * compose(L(v, k), L(v, j)))

    def test_octonion_entrywise_product_is_not_composition(self):
        rng = np.random.default_rng(8)
        S, T = AVMatrix.random(3, 2, rng), AVMatrix.random(3, 2, rng)
        entrywise = np.einsum("pqj,qrk,jkl->prl", S.data, T.data, algebra.structure_constants(3))
        assert op_norm(real_picture(AVMatrix(3, entrywise)) - real_picture(S) @ real_picture(T)) > 1e-3

    def test_json_round_trip(self):
        M = AVMatrix.random(2, 2, np.random.default_rng(1))
        assert np.array_equal(AVMatrix.from_json(M.to_json()).data, M.data)
        x = AVVector.random(2, 2, np.random.default_rng(2))
        assert np.array_equal(AVVector.from_json(x.to_json()).data, x.data)
        T = real_picture(M)
        obj = picture_to_json(T)
        assert obj["n"] == 8
        assert np.array_equal(picture_from_json(obj), T)
        with pytest.raises(ValueError):
            picture_from_json({"n": 3, "rows": [[1.0]]})


class TestGraded:
    def test_single_unit(self):
        T = np.kron(np.eye(2), L(3, 1))
        g = graded_decompose(T, 3)
        assert np.allclose(graded_component(T, 1, 3), T)
        assert all(not g.component(j).any() for j in range(8) if j != 1)

    def test_real_matrix(self):
        R = np.random.default_rng(0).standard_normal((3, 3))
        T = real_picture(AVMatrix.from_real(3, R))
        assert np.allclose(graded_component(T, 0, 3), T)

    def test_coefficient_split(self):
        P = np.diag([1.0, 0.0])
        z = CDNumber(2, [2, 0, 3, 0])
        T = np.kron(P, algebra.left_matrix(z))
        assert np.allclose(graded_component(T, 0, 2), np.kron(2 * P, np.eye(4)))
        assert np.allclose(graded_component(T, 2, 2), 3 * np.kron(P, L(2, 2)))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([1, 2, 3]))
    def test_reconstruction(self, seed, v):
        M = AVMatrix.random(v, 3, np.random.default_rng(seed))
        g = graded_decompose(M)
        assert g.residual < 1e-12
        assert op_norm(sum(g.components()) - real_picture(M)) < 1e-12

    def test_remainder_for_non_representable(self):
        T = np.zeros((8, 8))
        T[0, 1] = 1.0  # not a left multiplication
        assert graded_decompose(T, 2).residual > 0.1

    def test_bad_index_and_shape(self):
        with pytest.raises(IndexError):
            graded_component(np.eye(8), 8, 3)
        with pytest.raises(ValueError):
            graded_decompose(np.eye(6), 2)


class TestPredicates:
    def test_normal(self):
        D = real_picture(AVMatrix.diag([CDNumber.basis(3, 1), CDNumber.basis(3, 2)]))
        assert is_normal(D)[0]
        ok, r = is_normal(AVMatrix.from_real(3, [[0.0, 1.0], [0.0, 0.0]]))
        assert not ok and r == pytest.approx(1.0)

    def test_unitary_and_projection(self):
        c = np.random.default_rng(3).standard_normal(8)
        q = CDNumber(3, c / np.linalg.norm(c))
        assert is_unitary(left_mult_operator(q, 2))[0]
        assert not is_unitary(2 * np.eye(4))[0]
        P = np.kron(np.diag([1.0, 0.0]), np.eye(8))
        assert is_projection(P)[0]
        assert not is_projection(np.kron(np.ones((2, 2)), np.eye(8)))[0]
