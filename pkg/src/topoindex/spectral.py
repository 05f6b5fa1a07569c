"""Dense Hermitian diagonalization and functional calculus: Fermi and
spectral projections, smooth switch functions."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeometry, OperatorMatrix

__all__ = [
    "SpectralData",
    "SwitchFunction",
    "eig_hermitian",
    "fermi_projection",
    "spectral_projection",
    "apply_switch",
    "make_switch",
]


@dataclass
class SpectralData:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    geometry: LatticeGeometry


@dataclass(frozen=True)
class SwitchFunction:
    """Smooth monotone ramp from 1 (below lo) to 0 (above hi).

    The default quintic shape is C^2 at the endpoints and exactly 0/1
    outside [lo, hi], so supp(g^2 - g) is contained in [lo, hi].
    """

    lo: float
    hi: float
    shape: str = "smoothstep"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        s = np.clip((t - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        if self.shape == "smoothstep":
            ramp = s * s * s * (s * (6 * s - 15) + 10)
        elif self.shape == "linear":
            ramp = s
        else:
            raise ValueError(f"unknown switch shape {self.shape!r}")
        return 1.0 - ramp


def make_switch(c: float, d: float, shape: str = "smoothstep") -> SwitchFunction:
    if not c < d:
        raise ValueError(f"switch interval needs c < d, got [{c}, {d}]")
    return SwitchFunction(c, d, shape)


def eig_hermitian(H: OperatorMatrix) -> SpectralData:
    """Full spectral decomposition; requires a Hermitian-tagged operator."""
    defect = np.max(np.abs(H.data - H.data.conj().T))
    if not H.hermitian_hint or defect >= 1e-10:
        raise ValueError(f"eig_hermitian needs a Hermitian input (defect {defect:.3e})")
    w, v = np.linalg.eigh(H.data)
    return SpectralData(w, v, H.geometry)


def _projection_from_mask(spec: SpectralData, mask: np.ndarray) -> OperatorMatrix:
    V = spec.eigenvectors[:, mask]
    P = V @ V.conj().T
    P = (P + P.conj().T) / 2
    return OperatorMatrix(P, spec.geometry, hermitian_hint=True)


def fermi_projection(spec: SpectralData, mu: float) -> OperatorMatrix:
    """Projection onto eigenvalues strictly below the Fermi energy."""
    dist = np.min(np.abs(spec.eigenvalues - mu))
    if dist < 1e-12:
        warnings.warn(
            f"Fermi energy {mu} within 1e-12 of an eigenvalue; "
            "rank tie broken by strict lambda < mu",
            stacklevel=2,
        )
    return _projection_from_mask(spec, spec.eigenvalues < mu)


def spectral_projection(spec: SpectralData, delta: tuple[float, float]) -> OperatorMatrix:
    """Projection onto eigenvalues in [a, b)."""
    a, b = delta
    if not a < b:
        raise ValueError(f"interval needs a < b, got [{a}, {b})")
    for endpoint in (a, b):
        if np.min(np.abs(spec.eigenvalues - endpoint)) < 1e-12:
            warnings.warn(
                f"interval endpoint {endpoint} within 1e-12 of an eigenvalue",
                stacklevel=2,
            )
            break
    mask = (spec.eigenvalues >= a) & (spec.eigenvalues < b)
    return _projection_from_mask(spec, mask)


def apply_switch(spec: SpectralData, g: SwitchFunction) -> OperatorMatrix:
    """g(H) via the spectral decomposition; Hermitian with spectrum in [0, 1]."""
    vals = g(spec.eigenvalues)
    V = spec.eigenvectors
    M = (V * vals) @ V.conj().T
    M = (M + M.conj().T) / 2
    return OperatorMatrix(M, spec.geometry, hermitian_hint=True)
