import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosserat.tensors import (
    EPS,
    ID3,
    anti,
    axl,
    ddot,
    dev,
    eps,
    exp_so3,
    is_rotation,
    log_so3,
    mat_cross_vec,
    mat_times_eps,
    eps_times_mat,
    norm_sq,
    polar_rotation,
    right_jacobian_so3,
    rotation_defect,
    skew,
    sym,
    ten3_cross_vec,
    ten3_transpose,
    trace,
)

from conftest import random_rotation

finite = st.floats(-10.0, 10.0, allow_nan=False)
mat3s = st.lists(finite, min_size=9, max_size=9).map(lambda v: np.array(v).reshape(3, 3))
vec3s = st.lists(finite, min_size=3, max_size=3).map(np.array)


class TestDecomposition:
    def test_dev_of_identity_is_zero(self):
        assert np.abs(dev(ID3)).max() == 0.0

    def test_dev_of_zero_is_zero(self):
        assert np.abs(dev(np.zeros((3, 3)))).max() == 0.0

    def test_dev_diag_example(self):
        assert np.allclose(dev(np.diag([1.0, 2.0, 3.0])), np.diag([-1.0, 0.0, 1.0]))

    def test_dev_is_traceless(self, rng):
        for _ in range(50):
            assert abs(trace(dev(rng.standard_normal((3, 3))))) < 1e-14

    def test_skew_of_identity_is_zero(self):
        assert np.abs(skew(ID3)).max() == 0.0

    def test_sym_skew_split(self):
        m = np.outer([1, 0, 0], [0, 1, 0]).astype(float)
        expected_sym = 0.5 * (m + m.T)
        assert np.allclose(sym(m), expected_sym)
        assert np.allclose(skew(m), 0.5 * (m - m.T))
        assert np.allclose(sym(m) + skew(m), m)

    def test_norm_split_diag_example(self):
        m = np.diag([1.0, 2.0, 3.0])
        parts = norm_sq(dev(sym(m))) + norm_sq(skew(m)) + trace(m) ** 2 / 3.0
        assert parts == pytest.approx(14.0, abs=1e-12)
        assert norm_sq(m) == pytest.approx(14.0)

    @given(mat3s)
    @settings(max_examples=200, deadline=None)
    def test_orthogonal_split_identity(self, m):
        total = norm_sq(dev(sym(m))) + norm_sq(skew(m)) + trace(m) ** 2 / 3.0
        assert total == pytest.approx(norm_sq(m), rel=1e-12, abs=1e-12)

    def test_split_terms_mutually_orthogonal(self, rng):
        for _ in range(100):
            m = rng.standard_normal((3, 3))
            a, b = dev(sym(m)), skew(m)
            c = (trace(m) / 3.0) * ID3
            assert abs(np.sum(a * b)) < 1e-13
            assert abs(np.sum(a * c)) < 1e-13
            assert abs(np.sum(b * c)) < 1e-13

    def test_orthogonal_split_thousand_samples(self, rng):
        m = rng.standard_normal((1000, 3, 3))
        total = (
            np.sum(dev(sym(m)) ** 2, axis=(-2, -1))
            + np.sum(skew(m) ** 2, axis=(-2, -1))
            + np.trace(m, axis1=-2, axis2=-1) ** 2 / 3.0
        )
        assert np.abs(total - np.sum(m * m, axis=(-2, -1))).max() < 1e-12


class TestAxial:
    def test_axl_zero(self):
        assert np.allclose(axl(np.zeros((3, 3))), 0.0)

    def test_axl_example(self):
        s = np.zeros((3, 3))
        s[2, 1], s[0, 2], s[1, 0] = 1.0, 2.0, 3.0
        s[1, 2], s[2, 0], s[0, 1] = -1.0, -2.0, -3.0
        assert np.allclose(axl(s), [1.0, 2.0, 3.0])
        # solve s @ v = w x v for random v as an independent oracle
        rng = np.random.default_rng(0)
        w = axl(s)
        for _ in range(10):
            v = rng.standard_normal(3)
            assert np.allclose(s @ v, np.cross(w, v))

    def test_axl_norm_halving(self):
        s = np.zeros((3, 3))
        s[2, 1], s[0, 2], s[1, 0] = 1.0, 2.0, 3.0
        s[1, 2], s[2, 0], s[0, 1] = -1.0, -2.0, -3.0
        assert norm_sq(s) == pytest.approx(28.0)
        assert norm_sq(axl(s)) == pytest.approx(14.0)

    def test_axl_rejects_non_skew(self):
        with pytest.raises(ValueError):
            axl(np.eye(3))

    def test_anti_examples(self):
        assert np.abs(anti(np.zeros(3))).max() == 0.0
        a = anti(np.array([1.0, 0.0, 0.0]))
        assert a[2, 1] == 1.0 and a[1, 2] == -1.0
        assert np.abs(a + a.T).max() == 0.0

    def test_anti_cross_product_oracle(self, rng):
        for _ in range(50):
            w, v = rng.standard_normal(3), rng.standard_normal(3)
            assert np.allclose(anti(w) @ v, np.cross(w, v), atol=1e-14)

    @given(vec3s)
    @settings(max_examples=100, deadline=None)
    def test_axl_anti_round_trip(self, w):
        assert np.array_equal(axl(anti(w)), w)


class TestProducts:
    def test_ddot_zero(self, rng):
        b = rng.standard_normal((3, 3, 3))
        assert np.abs(ddot(np.zeros((3, 3, 3)), b)).max() == 0.0

    def test_ddot_matches_index_loop(self, rng):
        for _ in range(20):
            a = rng.standard_normal((3, 3, 3))
            b = rng.standard_normal((3, 3, 3))
            ref = np.zeros((3, 3))
            for i in range(3):
                for j in range(3):
                    for r in range(3):
                        for s in range(3):
                            ref[i, j] += a[i, r, s] * b[r, s, j]
            assert np.abs(ddot(a, b) - ref).max() < 1e-14

    def test_ddot_bilinear(self, rng):
        a, b, c = (rng.standard_normal((3, 3, 3)) for _ in range(3))
        assert np.allclose(ddot(2.0 * a + b, c), 2.0 * ddot(a, c) + ddot(b, c), atol=1e-13)

    def test_eps_entries(self):
        e = eps()
        assert e[0, 1, 2] == 1.0
        assert e[1, 0, 2] == -1.0
        assert e[0, 0, 1] == 0.0

    def test_mat_cross_vec_parallel(self):
        m = np.outer([1, 0, 0], [0, 1, 0]).astype(float)
        assert np.abs(mat_cross_vec(m, np.array([0.0, 1.0, 0.0]))).max() == 0.0

    def test_mat_cross_vec_example(self):
        # (e1 (x) e2) x e1 = e1 (x) (e2 x e1) = -e1 (x) e3
        m = np.outer([1, 0, 0], [0, 1, 0]).astype(float)
        expected = -np.outer([1, 0, 0], [0, 0, 1]).astype(float)
        assert np.allclose(mat_cross_vec(m, np.array([1.0, 0.0, 0.0])), expected)

    def test_cross_products_match_index_oracle(self, rng):
        for _ in range(20):
            m = rng.standard_normal((3, 3))
            t = rng.standard_normal((3, 3, 3))
            v = rng.standard_normal(3)
            ref_m = np.zeros((3, 3))
            for i in range(3):
                acc = np.zeros(3)
                for j in range(3):
                    acc += m[i, j] * np.cross(np.eye(3)[j], v)
                ref_m[i] = acc
            assert np.abs(mat_cross_vec(m, v) - ref_m).max() < 1e-14
            ref_t = np.zeros((3, 3, 3))
            for i in range(3):
                for j in range(3):
                    for l in range(3):
                        ref_t[i, j] += t[i, j, l] * np.cross(np.eye(3)[l], v)
            assert np.abs(ten3_cross_vec(t, v) - ref_t).max() < 1e-14

    def test_cross_contraction_bound(self, rng):
        # |M x e_k| <= |M|
        for _ in range(50):
            m = rng.standard_normal((3, 3))
            for k in range(3):
                prod = mat_cross_vec(m, np.eye(3)[k])
                assert norm_sq(prod) <= norm_sq(m) + 1e-12

    def test_eps_products_match_index_oracle(self, rng):
        g = rng.standard_normal((3, 3))
        ref = np.zeros((3, 3, 3))
        for i in range(3):
            for j in range(3):
                for n in range(3):
                    ref[i, j, n] = sum(EPS[i, j, k] * g[k, n] for k in range(3))
        assert np.abs(eps_times_mat(g) - ref).max() < 1e-14
        ref2 = np.zeros((3, 3, 3))
        for i in range(3):
            for m_ in range(3):
                for n in range(3):
                    ref2[i, m_, n] = sum(g[i, k] * EPS[k, m_, n] for k in range(3))
        assert np.abs(mat_times_eps(g) - ref2).max() < 1e-14


class TestTranspose:
    def test_symmetric_fixed_point(self, rng):
        t = rng.standard_normal((3, 3, 3))
        t_sym = 0.5 * (t + t.transpose(0, 2, 1))
        assert np.array_equal(ten3_transpose(t_sym, "2.3"), t_sym)

    def test_single_entry(self):
        t = np.zeros((3, 3, 3))
        t[0, 1, 2] = 1.0
        out = ten3_transpose(t, "2.3")
        assert out[0, 2, 1] == 1.0 and out[0, 1, 2] == 0.0

    def test_involutive(self, rng):
        t = rng.standard_normal((3, 3, 3))
        for pair in ("2.3", "1.3", "1.2"):
            assert np.array_equal(ten3_transpose(ten3_transpose(t, pair), pair), t)

    def test_unknown_pair_rejected(self):
        with pytest.raises(ValueError):
            ten3_transpose(np.zeros((3, 3, 3)), "3.1")


class TestExpLog:
    def test_exp_zero(self):
        assert np.array_equal(exp_so3(np.zeros(3)), ID3)

    def test_exp_quarter_turn(self):
        r = exp_so3(np.array([0.0, 0.0, np.pi / 2]))
        assert np.allclose(r @ np.array([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0], atol=1e-15)
        expected = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        assert np.allclose(r, expected, atol=1e-15)

    def test_exp_output_is_rotation(self, rng):
        for _ in range(100):
            w = rng.uniform(-3.0, 3.0, size=3)
            assert rotation_defect(exp_so3(w)) < 1e-14

    def test_log_round_trip(self, rng):
        for _ in range(100):
            w = rng.standard_normal(3)
            w *= rng.uniform(0.0, 2.999) / max(np.linalg.norm(w), 1e-12)
            assert np.abs(log_so3(exp_so3(w)) - w).max() < 1e-10

    def test_log_norm_is_angle(self, rng):
        for angle in (1e-9, 1e-5, 0.5, 2.0, 3.0, np.pi - 1e-5):
            axis = np.array([1.0, 2.0, -1.0])
            axis /= np.linalg.norm(axis)
            w = log_so3(exp_so3(angle * axis))
            assert np.linalg.norm(w) == pytest.approx(angle, rel=1e-9, abs=1e-12)

    def test_log_round_trip_near_domain_edge(self, rng):
        # arccos alone loses 1/sin(theta) digits near pi; the angle must
        # stay accurate right up to the branch cutoff
        for theta in (2.8, np.pi - 1e-4, np.pi - 2e-6, np.pi - 1.01e-6):
            for _ in range(30):
                n = rng.standard_normal(3)
                n /= np.linalg.norm(n)
                w = theta * n
                assert np.abs(log_so3(exp_so3(w)) - w).max() < 1e-10

    def test_log_rejects_near_pi(self):
        axis = np.array([0.0, 0.0, 1.0])
        with pytest.raises(ValueError):
            log_so3(exp_so3((np.pi - 1e-8) * axis))
        with pytest.raises(ValueError):
            log_so3(np.diag([-1.0, -1.0, 1.0]))

    def test_exp_of_log_identity(self, rng):
        for _ in range(50):
            r = random_rotation(rng)
            assert np.abs(exp_so3(log_so3(r)) - r).max() < 1e-10

    def test_right_jacobian_convention(self, rng):
        h = 1e-6
        for _ in range(20):
            w = rng.uniform(-1.5, 1.5, size=3)
            d = rng.standard_normal(3)
            num = (exp_so3(w + h * d) - exp_so3(w - h * d)) / (2.0 * h)
            ana = exp_so3(w).T @ num
            assert np.abs(ana - anti(right_jacobian_so3(w) @ d)).max() < 1e-8


class TestPolar:
    def test_identity(self):
        assert np.allclose(polar_rotation(ID3), ID3, atol=1e-15)

    def test_pure_stretch(self):
        assert np.allclose(polar_rotation(2.0 * ID3), ID3, atol=1e-12)

    def test_construct_then_recover(self, rng):
        for _ in range(50):
            q = random_rotation(rng)
            f = q @ np.diag([2.0, 1.0, 1.0])
            assert np.abs(polar_rotation(f) - q).max() < 1e-10

    def test_random_spd_factor(self, rng):
        for _ in range(50):
            a = rng.standard_normal((3, 3))
            f = a if np.linalg.det(a) > 0.1 else a + 2.0 * np.sign(np.linalg.det(a)) * ID3
            if np.linalg.det(f) <= 0.0:
                continue
            r = polar_rotation(f)
            assert rotation_defect(r) < 1e-10
            u = r.T @ f
            assert np.abs(u - u.T).max() < 1e-10
            assert np.all(np.linalg.eigvalsh(0.5 * (u + u.T)) > 0.0)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            polar_rotation(np.diag([1.0, 1.0, 0.0]))
        with pytest.raises(ValueError):
            polar_rotation(np.diag([-1.0, 1.0, 1.0]))

    def test_is_rotation_helper(self, rng):
        assert is_rotation(ID3)
        assert not is_rotation(2.0 * ID3)
        assert is_rotation(random_rotation(rng), tol=1e-12)
