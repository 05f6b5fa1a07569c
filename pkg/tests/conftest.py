"""Shared fixtures: small models and their spectral data, computed once."""

import numpy as np
import pytest

from topoindex import (
    BhzParams,
    bulk_geometry,
    build_bhz,
    build_qwz,
    build_tr,
    eig_hermitian,
)


@pytest.fixture(scope="session")
def qwz12_clean():
    g = bulk_geometry(12, 2, bc="open")
    H = build_qwz(g, a=1.0)
    return H, eig_hermitian(H)


@pytest.fixture(scope="session")
def qwz12_trivial():
    g = bulk_geometry(12, 2, bc="open")
    H = build_qwz(g, a=3.0)
    return H, eig_hermitian(H)


@pytest.fixture(scope="session")
def qwz12_localized():
    g = bulk_geometry(12, 2, bc="open")
    H = build_qwz(g, a=4.0, W=8.0, seed=7)
    return H, eig_hermitian(H)


@pytest.fixture(scope="session")
def bhz12_clean():
    g = bulk_geometry(12, 4, bc="open")
    H = build_bhz(g, BhzParams(a=1.0, lambda_mix=0.3))
    return H, eig_hermitian(H), build_tr(g)


@pytest.fixture(scope="session")
def bhz12_trivial():
    g = bulk_geometry(12, 4, bc="open")
    H = build_bhz(g, BhzParams(a=3.0, lambda_mix=0.3))
    return H, eig_hermitian(H), build_tr(g)


@pytest.fixture(scope="session")
def bhz12_disordered():
    g = bulk_geometry(12, 4, bc="open")
    H = build_bhz(g, BhzParams(a=1.0, W=1.0, lambda_mix=0.3, seed=5))
    return H, eig_hermitian(H), build_tr(g)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


def random_hermitian(rng, n):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (M + M.conj().T) / 2
