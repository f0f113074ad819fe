import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from octospec import algebra
from octospec.algebra import (CDNumber, LevelError, basis_table, cd_conj, cd_inv, cd_mul, cd_norm, exp_pure,
                              polar_scalar, sign_eta, sign_kappa, sign_psi, sign_xi)


def hamilton(p, q):
    # textbook quaternion product, i = i_1, j = i_2, k = i_3
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def qconj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def octonion_pairs(x, y):
    # (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)) over Hamilton quaternions
    a, b, c, d = x[:4], x[4:], y[:4], y[4:]
    return np.concatenate([hamilton(a, c) - hamilton(qconj(d), b), hamilton(d, a) + hamilton(b, qconj(c))])


def series_exp(mu: CDNumber, theta: float, terms: int = 40) -> CDNumber:
    out = CDNumber.real(mu.level, 0.0)
    term = CDNumber.real(mu.level, 1.0)
    for n in range(terms):
        out = out + term
        term = cd_mul(term, mu) * (theta / (n + 1))
    return out


coeffs8 = arrays(np.float64, 8, elements=st.floats(-10, 10, allow_nan=False))


class TestTable:
    @pytest.mark.parametrize("v", range(5))
    def test_identity_row_and_column(self, v):
        t = basis_table(v)
        for k in range(1 << v):
            assert t.entry(0, k) == (1, k)
            assert t.entry(k, 0) == (1, k)

    @pytest.mark.parametrize("v", range(1, 5))
    def test_units_square_to_minus_one(self, v):
        t = basis_table(v)
        assert all(t.entry(j, j) == (-1, 0) for j in range(1, 1 << v))

    @pytest.mark.parametrize("v", range(5))
    def test_index_is_xor(self, v):
        t = basis_table(v)
        n = 1 << v
        assert np.array_equal(t.index, np.bitwise_xor.outer(np.arange(n), np.arange(n)))

    @pytest.mark.parametrize("v", range(4))
    def test_rows_are_signed_permutations(self, v):
        t = basis_table(v)
        for j in range(1 << v):
            assert sorted(t.index[j]) == list(range(1 << v))

    def test_quaternion_table_matches_hamilton(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            p, q = rng.standard_normal(4), rng.standard_normal(4)
            assert np.allclose(cd_mul(CDNumber(2, p), CDNumber(2, q)).coeffs, hamilton(p, q), atol=1e-13)

    def test_octonion_table_matches_pair_construction(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            x, y = rng.standard_normal(8), rng.standard_normal(8)
            assert np.allclose(cd_mul(CDNumber(3, x), CDNumber(3, y)).coeffs, octonion_pairs(x, y), atol=1e-12)

    @pytest.mark.parametrize("v", range(5))
    def test_table_matches_recursive_doubling(self, v):
        n = 1 << v
        eye = np.eye(n)
        t = basis_table(v)
        for j, k in itertools.product(range(n), repeat=2):
            prod = algebra.doubling_mul(eye[j], eye[k])
            assert prod[t.index[j, k]] == t.sign[j, k]

    def test_table_json_shape(self):
        obj = basis_table(2).to_json()
        assert obj["v"] == 2
        assert obj["table"][1][2] == {"s": 1, "l": 3}

    def test_baez_doubling_switch(self):
        try:
            algebra.set_doubling(algebra.BAEZ)
            t = basis_table(3)
            assert all(t.entry(j, j) == (-1, 0) for j in range(1, 8))
            x = CDNumber.random(3, np.random.default_rng(0))
            y = CDNumber.random(3, np.random.default_rng(1))
            assert cd_mul(x, y).norm() == pytest.approx(x.norm() * y.norm(), rel=1e-12)
        finally:
            algebra.set_doubling(algebra.STANDARD)
        with pytest.raises(ValueError):
            algebra.set_doubling("nope")


class TestArithmetic:
    def test_spec_products(self):
        z = CDNumber(3, np.arange(8.0))
        assert cd_mul(CDNumber.basis(3, 0), z) == z
        assert cd_mul(CDNumber.basis(3, 1), CDNumber.basis(3, 1)) == CDNumber.real(3, -1.0)
        assert cd_mul(CDNumber.basis(2, 1), CDNumber.basis(2, 2)) == CDNumber.basis(2, 3)

    def test_level_mismatch(self):
        with pytest.raises(LevelError):
            cd_mul(CDNumber.basis(2, 1), CDNumber.basis(3, 1))

    def test_bad_level_or_length(self):
        with pytest.raises(LevelError):
            CDNumber(5, np.zeros(32))
        with pytest.raises(LevelError):
            CDNumber(2, np.zeros(3))

    def test_conj_norm_inv(self):
        assert cd_conj(CDNumber.basis(3, 0)) == CDNumber.basis(3, 0)
        assert cd_norm(CDNumber(2, [0, 3, 4, 0])) == 5.0
        assert cd_inv(CDNumber.basis(3, 5)) == CDNumber.basis(3, 5) * -1.0
        assert cd_mul(CDNumber.basis(3, 5), cd_inv(CDNumber.basis(3, 5))) == CDNumber.real(3, 1.0)
        with pytest.raises(ZeroDivisionError):
            cd_inv(CDNumber(3, np.zeros(8)))

    def test_json_round_trip(self):
        z = CDNumber(3, np.linspace(-1, 1, 8))
        assert z.to_json() == {"v": 3, "c": list(np.linspace(-1, 1, 8))}
        assert CDNumber.from_json(z.to_json()) == z

    def test_exp_pure_examples(self):
        assert exp_pure(CDNumber.basis(3, 2), 0.0).allclose(CDNumber.real(3, 1.0))
        assert exp_pure(CDNumber.basis(3, 2), math.pi).allclose(CDNumber.real(3, -1.0))
        assert exp_pure(CDNumber.basis(3, 5), math.pi / 2).allclose(CDNumber.basis(3, 5))
        assert series_exp(CDNumber.basis(3, 5), math.pi / 2).allclose(CDNumber.basis(3, 5), atol=1e-13)

    def test_exp_pure_matches_series_on_random_direction(self):
        rng = np.random.default_rng(11)
        c = rng.standard_normal(8)
        c[0] = 0
        mu = CDNumber(3, c / np.linalg.norm(c))
        for theta in (0.3, -1.7, 4.0):
            assert exp_pure(mu, theta).allclose(series_exp(mu, theta), atol=1e-11)

    def test_exp_pure_rejects_non_unit(self):
        with pytest.raises(ValueError):
            exp_pure(CDNumber(3, [1, 1, 0, 0, 0, 0, 0, 0]), 1.0)
        with pytest.raises(ValueError):
            exp_pure(CDNumber.basis(3, 1) * 2.0, 1.0)

    def test_polar_scalar(self):
        assert polar_scalar(CDNumber(3, np.zeros(8))) == (0.0, CDNumber.real(3, 1.0))
        r, u = polar_scalar(CDNumber.basis(3, 1) * 3.0)
        assert r == 3.0 and u.allclose(CDNumber.basis(3, 1))
        r, u = polar_scalar(CDNumber(1, [1.0, 1.0]))
        assert r == pytest.approx(math.sqrt(2))
        assert u.allclose(CDNumber(1, [1, 1]) / math.sqrt(2))
        assert (u * r).allclose(CDNumber(1, [1.0, 1.0]))

    @settings(max_examples=200, deadline=None)
    @given(coeffs8, coeffs8)
    def test_norm_multiplicative_octonions(self, x, y):
        p = cd_mul(CDNumber(3, x), CDNumber(3, y)).norm()
        assert p == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y), rel=1e-12, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(coeffs8, coeffs8)
    def test_moufang_and_alternativity(self, x, y):
        X, Y = CDNumber(3, x), CDNumber(3, y)
        scale = 1 + X.norm() ** 3 * Y.norm()
        xx = cd_mul(X, X)
        assert (cd_mul(X, cd_mul(X, Y)) - cd_mul(xx, Y)).norm() <= 1e-12 * scale
        assert (cd_mul(cd_mul(Y, X), X) - cd_mul(Y, xx)).norm() <= 1e-12 * scale
        # flexible identity x(yx) = (xy)x
        assert (cd_mul(X, cd_mul(Y, X)) - cd_mul(cd_mul(X, Y), X)).norm() <= 1e-12 * scale

    @settings(max_examples=100, deadline=None)
    @given(coeffs8)
    def test_inverse(self, x):
        X = CDNumber(3, x)
        if X.norm() < 1e-3:
            return
        assert cd_mul(X, cd_inv(X)).allclose(CDNumber.real(3, 1.0), atol=1e-12)
        assert cd_mul(cd_inv(X), X).allclose(CDNumber.real(3, 1.0), atol=1e-12)

    def test_mul_arrays_broadcasts(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((5, 8))
        y = rng.standard_normal((5, 8))
        out = algebra.mul_arrays(x, y, 3)
        for r in range(5):
            assert np.allclose(out[r], octonion_pairs(x[r], y[r]))

    def test_left_matrix(self):
        rng = np.random.default_rng(1)
        x, y = rng.standard_normal(8), rng.standard_normal(8)
        assert np.allclose(algebra.left_matrix(CDNumber(3, x)) @ y, octonion_pairs(x, y))


class TestSigns:
    def test_kappa_eta_examples(self):
        assert sign_kappa(0, 5) == 0
        assert sign_kappa(2, 5) == 1
        assert sign_eta(7) == 1
        assert sign_eta(0) == 0

    def test_kappa_closed_form(self):
        for j, k in itertools.product(range(8), repeat=2):
            assert sign_kappa(j, k) == int(not (j == k or j == 0 or k == 0))

    def test_xi_psi_examples(self):
        assert all(sign_xi(0, k, s) == 0 for k in range(8) for s in range(8))
        assert sign_xi(1, 2, 3, level=2) == 1
        assert sign_psi(1, 2, 4, level=3) == 1

    def test_xi_psi_defining_relations(self):
        t = basis_table(3)
        eye = np.eye(8)

        def prod(a, b):
            return algebra.mul_arrays(a, b, 3)

        for j, k, s in itertools.product(range(8), repeat=3):
            lhs = prod(eye[j], prod(eye[k], eye[s]))
            rhs = prod(eye[k], prod(eye[j], eye[s]))
            assert np.array_equal(lhs, (-1) ** sign_xi(j, k, s) * rhs)
            lhs = prod(eye[s], prod(eye[j], eye[k]))
            rhs = prod(prod(eye[s], eye[j]), eye[k])
            assert np.array_equal(lhs, (-1) ** sign_psi(s, j, k) * rhs)
        assert t.size == 8

    def test_out_of_range_and_level_four(self):
        with pytest.raises(IndexError):
            sign_kappa(8, 1, level=3)
        with pytest.raises(LevelError):
            sign_xi(1, 2, 3, level=4)
        with pytest.raises(LevelError):
            sign_psi(1, 2, 3, level=4)
