"""Hamiltonian builders: hermiticity, locality, time reversal, disorder,
sector structure, edge truncation, and the momentum-space Chern oracle."""

import numpy as np
import pytest

from topoindex import (
    BhzParams,
    OperatorMatrix,
    apply_flux_twist,
    bulk_geometry,
    build_bhz,
    build_qwz,
    build_tr,
    check_tri,
    chern_oracle_clean,
    disorder_field,
    truncate_to_edge,
)
from topoindex.lattice import site_index
from topoindex.locality import site_block_norms
from topoindex.models import KRAMERS_PERMUTATION


class TestBuildQwz:
    def test_hermitian(self):
        g = bulk_geometry(8, 2, bc="periodic")
        H = build_qwz(g, a=1.3, W=2.0, seed=3)
        assert np.max(np.abs(H.data - H.data.conj().T)) < 1e-12

    def test_nearest_neighbor_range(self):
        g = bulk_geometry(8, 2, bc="open")
        H = build_qwz(g, a=1.0, W=1.0, seed=1)
        norms = site_block_norms(H)
        xy = g.coords()[::2].astype(float)
        dist = np.linalg.norm(xy[:, None, :] - xy[None, :, :], axis=2)
        assert np.max(norms[dist > 1.0]) == 0.0

    def test_clean_gap_open_at_a1(self):
        g = bulk_geometry(12, 2, bc="periodic")
        H = build_qwz(g, a=1.0)
        w = np.linalg.eigvalsh(H.data)
        assert np.min(np.abs(w)) > 0.5

    def test_seed_determinism(self):
        g = bulk_geometry(6, 2, bc="open")
        H1 = build_qwz(g, a=1.0, W=3.0, seed=11)
        H2 = build_qwz(g, a=1.0, W=3.0, seed=11)
        H3 = build_qwz(g, a=1.0, W=3.0, seed=12)
        assert np.array_equal(H1.data, H2.data)
        assert not np.array_equal(H1.data, H3.data)


class TestChernOracle:
    def test_trivial_masses(self):
        assert chern_oracle_clean(3.0) == 0
        assert chern_oracle_clean(4.0) == 0
        assert chern_oracle_clean(-3.0) == 0

    def test_nontrivial_masses(self):
        assert chern_oracle_clean(1.0) == 1
        assert chern_oracle_clean(-1.0) == -1

    def test_opposite_masses_give_opposite_values(self):
        assert chern_oracle_clean(-1.0) == -chern_oracle_clean(1.0)


class TestBuildBhz:
    def test_clean_gap_at_a1(self):
        g = bulk_geometry(12, 4, bc="periodic")
        H = build_bhz(g, BhzParams(a=1.0))
        w = np.linalg.eigvalsh(H.data)
        assert np.min(np.abs(w)) > 0.5

    def test_gap_closes_at_a0(self):
        g = bulk_geometry(12, 4, bc="periodic")
        H = build_bhz(g, BhzParams(a=0.0))
        assert np.min(np.abs(np.linalg.eigvalsh(H.data))) < 1e-10

    def test_tri_all_parameters(self):
        g = bulk_geometry(8, 4, bc="open")
        theta = build_tr(g)
        for p in (
            BhzParams(a=1.0),
            BhzParams(a=1.0, W=2.0, seed=3),
            BhzParams(a=-1.0, W=1.0, lambda_mix=0.5, seed=9),
        ):
            assert check_tri(build_bhz(g, p), theta) < 1e-12

    def test_sector_decoupling_without_mixing(self):
        g4 = bulk_geometry(8, 4, bc="open")
        g2 = bulk_geometry(8, 2, bc="open")
        H4 = build_bhz(g4, BhzParams(a=1.0, W=1.0, seed=4))
        w4 = np.sort(np.linalg.eigvalsh(H4.data))
        H2 = build_qwz(g2, a=1.0, W=1.0, seed=4)
        w2 = np.linalg.eigvalsh(H2.data)
        # time reversal maps one sector onto the conjugate of the other, so
        # the four-band spectrum is the two-band one doubled
        w_expected = np.sort(np.concatenate([w2, w2]))
        assert np.max(np.abs(w4 - w_expected)) < 1e-10

    def test_sector_permutation_block_diagonalizes(self):
        g = bulk_geometry(6, 4, bc="open")
        H = build_bhz(g, BhzParams(a=1.0, W=1.0, seed=2))
        perm = KRAMERS_PERMUTATION(g)
        M = H.data[np.ix_(perm, perm)]
        n = M.shape[0] // 2
        assert np.max(np.abs(M[:n, n:])) < 1e-14
        assert np.max(np.abs(M[n:, :n])) < 1e-14

    def test_mixing_couples_sectors_but_keeps_tri(self):
        g = bulk_geometry(6, 4, bc="open")
        H = build_bhz(g, BhzParams(a=1.0, lambda_mix=0.4))
        perm = KRAMERS_PERMUTATION(g)
        M = H.data[np.ix_(perm, perm)]
        n = M.shape[0] // 2
        assert np.max(np.abs(M[:n, n:])) > 0.1
        assert check_tri(H, build_tr(g)) < 1e-12


class TestTimeReversal:
    def test_squares_to_minus_one(self, bhz12_clean):
        _, _, theta = bhz12_clean
        J = theta.J.data
        assert np.max(np.abs(J @ J.conj() + np.eye(J.shape[0]))) < 1e-14

    def test_antilinearity_flips_i(self, bhz12_clean):
        H, _, theta = bhz12_clean
        J = theta.J.data
        conj = J @ (1j * H.data).conj() @ J.conj().T
        assert np.max(np.abs(conj + 1j * H.data)) < 1e-10

    def test_detects_breaking_term(self):
        g = bulk_geometry(6, 4, bc="open")
        H = build_bhz(g, BhzParams(a=1.0))
        theta = build_tr(g)
        sz_s2 = np.kron(np.diag([1.0, -1.0]), np.array([[0, -1j], [1j, 0]]))
        B = np.kron(np.eye(g.Lx * g.Ly), sz_s2)
        Hb = OperatorMatrix(H.data + 0.3 * B, g, hermitian_hint=True)
        assert check_tri(Hb, theta) > 0.1

    def test_zero_hamiltonian(self):
        g = bulk_geometry(4, 4)
        theta = build_tr(g)
        H0 = OperatorMatrix(np.zeros((g.dim, g.dim)), g, hermitian_hint=True)
        assert check_tri(H0, theta) == 0.0


class TestDisorderField:
    def test_pure_function_of_seed_and_site(self):
        g_full = bulk_geometry(8, 2, bc="open")
        from topoindex.lattice import LatticeGeometry

        g_half = LatticeGeometry(8, 4, 2, "open", "open", origin=(-4, 0))
        full = disorder_field(g_full, 3.0, seed=5)
        half = disorder_field(g_half, 3.0, seed=5)
        xy_full = [tuple(p) for p in g_full.coords()[::2]]
        xy_half = [tuple(p) for p in g_half.coords()[::2]]
        lookup = dict(zip(xy_full, full))
        for p, v in zip(xy_half, half):
            assert lookup[p] == v

    def test_bounded(self):
        g = bulk_geometry(10, 2)
        omega = disorder_field(g, 4.0, seed=0)
        assert np.all(np.abs(omega) <= 2.0)

    def test_zero_strength(self):
        g = bulk_geometry(6, 2)
        assert np.all(disorder_field(g, 0.0, seed=3) == 0.0)


class TestTruncateToEdge:
    def test_diagonal_restriction(self):
        g = bulk_geometry(6, 1, bc="open")
        D = OperatorMatrix(np.diag(np.arange(g.dim, dtype=complex)), g, hermitian_hint=True)
        He, ge = truncate_to_edge(D)
        vals = np.diag(He.data).real
        ys = g.coords()[:, 1]
        assert np.array_equal(vals, np.arange(g.dim)[ys >= 0])

    def test_edge_states_fill_bulk_gap(self):
        g = bulk_geometry(16, 4, bc="periodic")
        H = build_bhz(g, BhzParams(a=1.0))
        bulk_gap = np.min(np.abs(np.linalg.eigvalsh(H.data)))
        He, _ = truncate_to_edge(H)
        edge_min = np.min(np.abs(np.linalg.eigvalsh(He.data)))
        assert bulk_gap > 0.5
        assert edge_min < 0.3

    def test_boundary_term_depth_enforced(self):
        g = bulk_geometry(6, 1, bc="open")
        H = OperatorMatrix(np.zeros((g.dim, g.dim)), g, hermitian_hint=True)
        He, ge = truncate_to_edge(H)
        bad = np.zeros((ge.dim, ge.dim), dtype=complex)
        far = site_index(ge, 0, ge.Ly - 1)
        bad[far, far] = 1.0
        with pytest.raises(ValueError):
            truncate_to_edge(H, OperatorMatrix(bad, ge, hermitian_hint=True), boundary_depth=2)


class TestFluxTwist:
    def test_hermitian_and_reduces_to_h_at_zero(self):
        g = bulk_geometry(8, 4, bc="periodic")
        H = build_bhz(g, BhzParams(a=1.0, W=1.0, seed=3))
        H0 = apply_flux_twist(H, 0.0, spin_resolved=True)
        assert np.max(np.abs(H0.data - H.data)) < 1e-14
        Ht = apply_flux_twist(H, 0.7, spin_resolved=True)
        assert np.max(np.abs(Ht.data - Ht.data.conj().T)) < 1e-12

    def test_spin_resolved_twist_keeps_tri_along_path(self):
        g = bulk_geometry(8, 4, bc="periodic")
        H = build_bhz(g, BhzParams(a=1.0, W=1.0, lambda_mix=0.3, seed=3))
        theta = build_tr(g)
        for t in (0.0, 0.4, 1.1, np.pi):
            Ht = apply_flux_twist(H, t, spin_resolved=True)
            assert check_tri(Ht, theta) < 1e-12

    def test_scalar_twist_breaks_tri_mid_path(self):
        g = bulk_geometry(8, 4, bc="periodic")
        H = build_bhz(g, BhzParams(a=1.0))
        theta = build_tr(g)
        assert check_tri(apply_flux_twist(H, 1.0), theta) > 1e-3

    def test_requires_periodic_x(self):
        g = bulk_geometry(8, 4, bc="open")
        H = build_bhz(g, BhzParams(a=1.0))
        with pytest.raises(ValueError):
            apply_flux_twist(H, 0.5)
