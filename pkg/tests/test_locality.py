"""Block-norm decay envelopes, quasi-projection defects, and Schatten
norms / singular-value profiles."""

import numpy as np
import pytest

from topoindex import (
    OperatorMatrix,
    build_qwz,
    bulk_geometry,
    decay_profile,
    eig_hermitian,
    fermi_projection,
    nc_derivative,
    quasi_projection_defect,
    schatten_norm,
    singular_value_profile,
)
from topoindex.locality import site_block_norms


class TestSiteBlockNorms:
    def test_scalar_internal_dim_is_abs(self):
        g = bulk_geometry(3, 1)
        M = np.arange(81, dtype=float).reshape(9, 9) * (1 + 0j)
        A = OperatorMatrix(M, g)
        assert np.array_equal(site_block_norms(A), np.abs(M))

    def test_block_spectral_norm(self):
        g = bulk_geometry(2, 2)
        M = np.zeros((8, 8), dtype=complex)
        M[0:2, 2:4] = np.diag([3.0, 4.0])
        A = OperatorMatrix(M, g)
        norms = site_block_norms(A)
        assert norms[0, 1] == pytest.approx(4.0)
        assert norms[1, 0] == 0.0


class TestDecayProfile:
    def test_identity_has_empty_offdiag_envelope(self):
        g = bulk_geometry(4, 2)
        A = OperatorMatrix(np.eye(g.dim, dtype=complex), g)
        env = decay_profile(A)
        assert np.all(env.max_norms == 0.0)

    def test_nearest_neighbor_support(self):
        g = bulk_geometry(8, 2, bc="open")
        H = build_qwz(g, a=1.0)
        env = decay_profile(H)
        assert env.max_norms[env.distances <= 1.0].max() > 0.1
        assert env.max_norms[env.distances > 1.0].max() == 0.0

    def test_localized_projection_decays(self, qwz12_localized):
        _, spec = qwz12_localized
        P = fermi_projection(spec, mu=0.0)
        env = decay_profile(P)
        assert env.slope < 0
        assert env.residual < abs(env.slope)

    def test_profile_invariant_under_adjoint(self, qwz12_clean):
        _, spec = qwz12_clean
        P = fermi_projection(spec, mu=0.0)
        M = OperatorMatrix(1j * P.data @ np.diag(np.arange(P.data.shape[0], dtype=complex)), P.geometry)
        Md = OperatorMatrix(M.data.conj().T, M.geometry)
        e1, e2 = decay_profile(M), decay_profile(Md)
        assert np.allclose(e1.max_norms, e2.max_norms)

    def test_confined_mode_bins_by_axis(self):
        g = bulk_geometry(6, 1, bc="open")
        xy = g.coords().astype(float)
        diag = np.where(np.abs(xy[:, 1]) < 0.5, 1.0, 0.0)
        A = OperatorMatrix(np.diag(diag).astype(complex), g)
        env = decay_profile(A, mode="confined", axis=2)
        assert env.max_norms[env.distances == 0.0][0] == pytest.approx(1.0)
        assert env.summary == 0.0

    def test_unknown_mode_rejected(self):
        g = bulk_geometry(3, 1)
        A = OperatorMatrix(np.eye(9, dtype=complex), g)
        with pytest.raises(ValueError):
            decay_profile(A, mode="sideways")


class TestQuasiProjectionDefect:
    def test_exact_projection_has_zero_defect(self, qwz12_clean):
        _, spec = qwz12_clean
        P = fermi_projection(spec, mu=0.0)
        env = quasi_projection_defect(P)
        assert env.summary < 1e-10

    def test_half_lambda_flagged(self):
        g = bulk_geometry(8, 1, bc="open")
        ys = g.coords()[:, 1].astype(float)
        half = OperatorMatrix(np.diag(np.where(ys >= 0, 0.5, 0.0)).astype(complex), g)
        env = quasi_projection_defect(half, axis=2)
        assert env.summary == pytest.approx(0.25)

    def test_rejects_non_hermitian(self):
        g = bulk_geometry(3, 1)
        M = np.zeros((9, 9), dtype=complex)
        M[0, 1] = 1.0
        with pytest.raises(ValueError):
            quasi_projection_defect(OperatorMatrix(M, g))

    def test_derivative_of_gapped_projection_is_confined(self, qwz12_clean):
        _, spec = qwz12_clean
        P = fermi_projection(spec, mu=0.0)
        D = nc_derivative(P, axis=1)
        env = decay_profile(D, mode="confined", axis=1)
        # the commutator with a half-space switch concentrates near the cut
        assert env.max_norms[0] > 0.1
        assert env.max_norms[-1] < 0.15 * env.max_norms[0]
        assert env.slope < 0


class TestSchattenNorm:
    def test_identity(self):
        assert schatten_norm(np.eye(5), 1.0) == pytest.approx(5.0)
        assert schatten_norm(np.eye(5), 2.0) == pytest.approx(np.sqrt(5.0))

    def test_matches_frobenius_at_p2(self, rng):
        A = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        assert schatten_norm(A, 2.0) == pytest.approx(np.linalg.norm(A, "fro"))

    def test_large_p_approaches_operator_norm(self, rng):
        A = rng.normal(size=(6, 6))
        assert schatten_norm(A, 200.0) == pytest.approx(np.linalg.norm(A, 2), rel=1e-2)

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError):
            schatten_norm(np.eye(2), 0.5)

    def test_unitary_invariance(self, rng):
        A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        A = A + A.conj().T
        B = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        w, V = np.linalg.eigh(B + B.conj().T)
        for p in (1.0, 3.0):
            assert schatten_norm(V @ A @ V.conj().T, p) == pytest.approx(schatten_norm(A, p))


class TestSingularValueProfile:
    def test_diagonal(self):
        s = singular_value_profile(np.diag([1.0, -3.0, 2.0]))
        assert np.allclose(s, [3.0, 2.0, 1.0])

    def test_top_k(self):
        s = singular_value_profile(np.diag([1.0, 4.0, 2.0, 3.0]), k=2)
        assert np.allclose(s, [4.0, 3.0])

    def test_k_too_large_rejected(self):
        with pytest.raises(ValueError):
            singular_value_profile(np.eye(3), k=4)


class TestIdealProperty:
    def test_product_with_decaying_factor_decays(self, rng):
        # product of a short-range operator with a power-law-decaying one
        # decays at least as fast as the decaying factor (two-sided ideal)
        g = bulk_geometry(10, 1, bc="open")
        xy = g.coords().astype(float)
        dist = np.linalg.norm(xy[:, None, :] - xy[None, :, :], axis=2)
        for trial in range(20):
            r = np.random.default_rng(trial)
            K = (r.normal(size=dist.shape) + 1j * r.normal(size=dist.shape)) / (1.0 + dist) ** 4
            B = r.normal(size=dist.shape) * (dist <= 1.0)
            prod = OperatorMatrix(B @ K, g)
            envK = decay_profile(OperatorMatrix(K, g))
            envP = decay_profile(prod)
            # compare fitted decay exponents: the product must not decay
            # materially slower than the decaying factor
            assert envP.mu_hat > envK.mu_hat - 0.5
