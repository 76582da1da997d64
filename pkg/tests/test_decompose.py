import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mwca.decompose import (
    RankError,
    hooi,
    hosvd,
    mode_ranks,
    resolve_ranks,
    sign_fix,
    st_hosvd,
    svd,
)
from mwca.tensor import ttm, unfold


def assert_orthonormal(u, atol=1e-10):
    np.testing.assert_allclose(u.T @ u, np.eye(u.shape[1]), atol=atol)


def rel_err(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class TestSvd:
    def test_diagonal(self):
        res = svd(np.diag([3.0, 2.0, 1.0]))
        np.testing.assert_allclose(res.sigma, [3, 2, 1])
        for m in (res.u, res.v):
            assert np.allclose(np.abs(m), np.eye(3))

    def test_rank_one(self, rng):
        x, y = rng.standard_normal(4), rng.standard_normal(3)
        res = svd(np.outer(x, y))
        assert res.sigma[0] == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y), rel=1e-12)
        assert np.all(res.sigma[1:] < 1e-12 * res.sigma[0])

    def test_eckart_young(self, rng):
        m = rng.standard_normal((5, 4))
        full = svd(m)
        r2 = svd(m, 2)
        err = np.linalg.norm(m - r2.reconstruct())
        assert err == pytest.approx(np.hypot(full.sigma[2], full.sigma[3]), abs=1e-10)

    def test_invariants(self, rng):
        m = rng.standard_normal((6, 4))
        res = svd(m)
        assert_orthonormal(res.u)
        assert_orthonormal(res.v)
        assert np.all(np.diff(res.sigma) <= 0) and np.all(res.sigma >= 0)
        assert rel_err(res.reconstruct(), m) <= 1e-10

    def test_psd_matches_eigenvalues(self, rng):
        a = rng.standard_normal((5, 5))
        s = a @ a.T
        np.testing.assert_allclose(svd(s).sigma, np.sort(np.linalg.eigvalsh(s))[::-1], atol=1e-10)

    def test_rank_too_large(self):
        with pytest.raises(RankError):
            svd(np.ones((2, 3)), 3)


class TestSignFix:
    def test_majority_positive_unchanged(self):
        u = np.array([[0.8], [0.5], [-0.3]])
        v = np.array([[1.0], [2.0]])
        u2, v2 = sign_fix(u, v)
        np.testing.assert_array_equal(u2, u)
        np.testing.assert_array_equal(v2, v)

    def test_all_negative_flips_both(self):
        u = -np.ones((3, 1))
        v = np.array([[2.0]])
        u2, v2 = sign_fix(u, v)
        np.testing.assert_array_equal(u2, np.ones((3, 1)))
        np.testing.assert_array_equal(v2, [[-2.0]])

    def test_weighted_by_magnitude(self):
        # two small positives lose against one large negative
        u, _ = sign_fix(np.array([[0.1], [0.1], [-0.9]]), np.ones((1, 1)))
        assert u[2, 0] > 0

    def test_mismatch(self):
        with pytest.raises(ValueError):
            sign_fix(np.ones((3, 2)), np.ones((3, 1)))

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (4, 3), elements=st.floats(-10, 10)),
           arrays(np.float64, (5, 3), elements=st.floats(-10, 10)))
    def test_idempotent(self, u, v):
        once = sign_fix(u, v)
        twice = sign_fix(*once)
        np.testing.assert_array_equal(once[0], twice[0])
        np.testing.assert_array_equal(once[1], twice[1])


def elementary(rng, shape):
    vecs = [rng.standard_normal(n) for n in shape]
    t = vecs[0]
    for v in vecs[1:]:
        t = np.multiply.outer(t, v)
    return t, vecs


class TestHosvd:
    def test_rank_one(self, rng):
        t, vecs = elementary(rng, (3, 4, 2))
        dec = hosvd(t, (1, 1, 1))
        assert dec.core.shape == (1, 1, 1)
        assert abs(dec.core[0, 0, 0]) == pytest.approx(np.prod([np.linalg.norm(v) for v in vecs]))
        for u, v in zip(dec.factors, vecs):
            assert abs(abs(u[:, 0] @ v) - np.linalg.norm(v)) < 1e-10

    def test_full_rank_reconstruction_and_sigma(self, rng):
        t = rng.standard_normal((3, 4, 5))
        dec = hosvd(t)
        assert dec.ranks == (3, 4, 5)
        assert rel_err(dec.reconstruct(), t) <= 1e-10
        for k in range(3):
            direct = np.linalg.svd(np.moveaxis(t, k, 0).reshape(t.shape[k], -1), compute_uv=False)
            np.testing.assert_allclose(dec.mode_sigma[k], direct, atol=1e-10)
            assert_orthonormal(dec.factors[k])

    def test_diagonal_tensor(self):
        t = np.zeros((3, 3, 3))
        for i, v in enumerate((3.0, 2.0, 1.0)):
            t[i, i, i] = v
        dec = hosvd(t, (3, 3, 3))
        for s in dec.mode_sigma:
            np.testing.assert_allclose(s, [3, 2, 1], atol=1e-12)

    def test_norm_identity_and_core_spectrum(self, rng):
        t = rng.standard_normal((4, 3, 5))
        dec = hosvd(t)
        assert abs(np.linalg.norm(dec.core) - np.linalg.norm(dec.reconstruct())) <= 1e-10
        for k in range(3):
            core_sigma = np.linalg.svd(unfold(dec.core, k + 1), compute_uv=False)
            np.testing.assert_allclose(core_sigma, dec.mode_sigma[k], atol=1e-10)

    def test_rank_above_mode_rank(self, rng):
        t, _ = elementary(rng, (3, 3, 3))
        with pytest.raises(RankError) as info:
            hosvd(t, (1, 2, 1))
        assert info.value.mode == 2

    def test_deterministic(self, rng):
        t = rng.standard_normal((4, 4, 3))
        a, b = hosvd(t), hosvd(t.copy())
        for u, v in zip(a.factors, b.factors):
            assert np.array_equal(u, v)
        assert np.array_equal(a.core, b.core)

    def test_mode_rank_of_thin_unfolding(self, rng):
        t = rng.standard_normal((8, 2, 2))
        assert mode_ranks(t) == (4, 2, 2)
        assert resolve_ranks(t, "full") == (4, 2, 2)
        assert resolve_ranks(t, [2, "full", 1]) == (2, 2, 1)


class TestStHosvd:
    def test_full_rank_matches_hosvd(self, rng):
        t = rng.standard_normal((3, 4, 5))
        np.testing.assert_allclose(st_hosvd(t).reconstruct(), hosvd(t).reconstruct(), atol=1e-10)

    def test_rank_one(self, rng):
        t, _ = elementary(rng, (3, 2, 4))
        np.testing.assert_allclose(st_hosvd(t, 1).reconstruct(), hosvd(t, 1).reconstruct(), atol=1e-12)

    def test_truncated_error_close_to_hosvd(self, rng):
        t = rng.standard_normal((4, 4, 4))
        e_h = np.linalg.norm(t - hosvd(t, 2).reconstruct())
        dec = st_hosvd(t, 2)
        e_s = np.linalg.norm(t - dec.reconstruct())
        assert np.isfinite(e_s) and abs(e_s - e_h) <= 0.1 * e_h
        for u in dec.factors:
            assert_orthonormal(u)


class TestHooi:
    def test_exact_rank_converges_immediately(self, rng):
        core = rng.standard_normal((2, 2, 2))
        us = [np.linalg.qr(rng.standard_normal((n, 2)))[0] for n in (4, 5, 3)]
        t = ttm(core, us)
        dec = hooi(t, (2, 2, 2))
        assert dec.info["iterations"] == 1
        np.testing.assert_allclose(dec.reconstruct(), hosvd(t, 2).reconstruct(), atol=1e-10)

    def test_improves_on_hosvd(self, rng):
        t = rng.standard_normal((4, 4, 4))
        e_h = np.linalg.norm(t - hosvd(t, 2).reconstruct())
        dec = hooi(t, (2, 2, 2))
        assert np.linalg.norm(t - dec.reconstruct()) <= e_h + 1e-12
        for u in dec.factors:
            assert_orthonormal(u)

    def test_fit_monotone(self, rng):
        for _ in range(20):
            t = rng.standard_normal((4, 5, 3))
            fits = np.array(hooi(t, (2, 2, 2), max_iters=30, tol=0).info["fit_history"])
            assert np.all(np.diff(fits) >= -1e-12 * fits[0])

    def test_sigma_from_reconstruction(self, rng):
        t = rng.standard_normal((4, 4, 4))
        dec = hooi(t, (2, 3, 2))
        rec = dec.reconstruct()
        for k in range(3):
            direct = np.linalg.svd(unfold(rec, k + 1), compute_uv=False)[: dec.ranks[k]]
            np.testing.assert_allclose(dec.mode_sigma[k], direct, atol=1e-10)
