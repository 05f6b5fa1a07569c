"""Finite 2D lattice geometry, half-space projectors, flux phases and the
non-commutative derivative.

Sites carry integer coordinates (x, y) that may be negative: bulk samples are
centered so that x, y run over [-L/2, L/2), while edge samples use y in
[0, Ly).  Every operator in this package is a dense complex matrix tagged
with its geometry (see :class:`OperatorMatrix`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LatticeGeometry",
    "OperatorMatrix",
    "bulk_geometry",
    "edge_geometry",
    "site_index",
    "site_of_index",
    "half_space_projector",
    "flux_phase",
    "cone_flux_function",
    "nc_derivative",
    "plateau_window",
]

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class LatticeGeometry:
    """Rectangular lattice extents plus the internal (orbital) dimension.

    ``origin`` offsets the site coordinates: x runs over
    [origin[0], origin[0] + Lx) and y over [origin[1], origin[1] + Ly).
    """

    Lx: int
    Ly: int
    internal_dim: int = 1
    bc_x: str = "open"
    bc_y: str = "open"
    origin: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.Lx < 1 or self.Ly < 1 or self.internal_dim < 1:
            raise ValueError("lattice extents and internal_dim must be >= 1")
        for bc in (self.bc_x, self.bc_y):
            if bc not in ("open", "periodic"):
                raise ValueError(f"unknown boundary condition {bc!r}")

    @property
    def dim(self) -> int:
        return self.Lx * self.Ly * self.internal_dim

    @property
    def x_range(self) -> range:
        return range(self.origin[0], self.origin[0] + self.Lx)

    @property
    def y_range(self) -> range:
        return range(self.origin[1], self.origin[1] + self.Ly)

    def coords(self) -> np.ndarray:
        """(dim, 2) integer array: the (x, y) of every flat index."""
        ox, oy = self.origin
        ys, xs = np.meshgrid(np.arange(self.Ly), np.arange(self.Lx), indexing="ij")
        pairs = np.stack([xs.ravel() + ox, ys.ravel() + oy], axis=1)
        return np.repeat(pairs, self.internal_dim, axis=0)


def bulk_geometry(L: int, internal_dim: int = 1, bc: str = "open") -> LatticeGeometry:
    """Square bulk sample centered at the origin: x, y in [-L/2, L/2)."""
    return LatticeGeometry(L, L, internal_dim, bc, bc, origin=(-(L // 2), -(L // 2)))


def edge_geometry(Lx: int, Ly: int, internal_dim: int = 1, bc_x: str = "open") -> LatticeGeometry:
    """Half-space sample: x centered, y in [0, Ly)."""
    return LatticeGeometry(Lx, Ly, internal_dim, bc_x, "open", origin=(-(Lx // 2), 0))


@dataclass
class OperatorMatrix:
    """Dense complex matrix tagged with its lattice geometry."""

    data: np.ndarray
    geometry: LatticeGeometry
    hermitian_hint: bool = False

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise ValueError("operator matrix must be square")
        if self.data.shape[0] != self.geometry.dim:
            raise ValueError(
                f"matrix dimension {self.data.shape[0]} does not match geometry "
                f"dimension {self.geometry.dim}"
            )
        if self.hermitian_hint:
            defect = np.max(np.abs(self.data - self.data.conj().T))
            if defect >= HERMITIAN_TOL:
                raise ValueError(f"hermitian_hint set but max defect is {defect:.3e}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]


def _check_same_geometry(a: LatticeGeometry, b: LatticeGeometry):
    if a != b:
        raise ValueError(f"geometry mismatch: {a} vs {b}")


def site_index(g: LatticeGeometry, x: int, y: int, orbital: int = 0) -> int:
    """Flat index of (x, y, orbital): row-major over (y, x), orbital fastest."""
    ox, oy = g.origin
    if not ox <= x < ox + g.Lx:
        raise ValueError(f"x={x} outside [{ox}, {ox + g.Lx})")
    if not oy <= y < oy + g.Ly:
        raise ValueError(f"y={y} outside [{oy}, {oy + g.Ly})")
    if not 0 <= orbital < g.internal_dim:
        raise ValueError(f"orbital={orbital} outside [0, {g.internal_dim})")
    return ((y - oy) * g.Lx + (x - ox)) * g.internal_dim + orbital


def site_of_index(g: LatticeGeometry, idx: int) -> tuple[int, int, int]:
    """Inverse of :func:`site_index`."""
    if not 0 <= idx < g.dim:
        raise ValueError(f"index {idx} outside [0, {g.dim})")
    orbital = idx % g.internal_dim
    site = idx // g.internal_dim
    x = site % g.Lx + g.origin[0]
    y = site // g.Lx + g.origin[1]
    return x, y, orbital


def half_space_projector(g: LatticeGeometry, axis: int) -> OperatorMatrix:
    """Lambda_1 (x >= 0) or Lambda_2 (y >= 0): exact 0/1 diagonal projector."""
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    coords = g.coords()
    diag = (coords[:, axis - 1] >= 0).astype(complex)
    return OperatorMatrix(np.diag(diag), g, hermitian_hint=True)


def flux_center(g: LatticeGeometry) -> tuple[float, float]:
    """Default flux-insertion point: the plaquette center nearest the sample
    middle, at a (half-integer, half-integer) position."""
    cx = g.origin[0] + g.Lx // 2 - 0.5
    cy = g.origin[1] + g.Ly // 2 - 0.5
    return cx, cy


def flux_phase(g: LatticeGeometry, center: tuple[float, float] | None = None) -> OperatorMatrix:
    """Diagonal unitary exp(i arg((x - a1) + i (y - a2))).

    The center must sit at a plaquette center (both coordinates
    half-integers) so that the phase is defined at every site.
    """
    if center is None:
        center = flux_center(g)
    a1, a2 = center
    for c in (a1, a2):
        if abs(c - np.floor(c) - 0.5) > 1e-9:
            raise ValueError(f"flux center {center} must have half-integer coordinates")
    coords = g.coords()
    theta = np.arctan2(coords[:, 1] - a2, coords[:, 0] - a1)
    return OperatorMatrix(np.diag(np.exp(1j * theta)), g)


def _cone_values(coords, a1, a2, nu, side):
    """Angle-of-site relative to the cone axis, as a fraction in [0, 1].

    The cone with vertex (a1, a2) opens to the right (axis angle 0) or the
    left (axis angle pi) with full opening ``nu``.  Returns (inside, frac)
    where frac in [0, 1] runs from the lower to the upper cone boundary.
    """
    dx = coords[:, 0] - a1
    dy = coords[:, 1] - a2
    theta = np.arctan2(dy, dx)
    if side == "left":
        # angle relative to the negative x-axis, still in (-pi, pi]
        theta = np.arctan2(dy, -dx)
    inside = np.abs(theta) <= nu / 2
    frac = (theta + nu / 2) / nu
    return inside, np.clip(frac, 0.0, 1.0)


def cone_flux_function(
    g: LatticeGeometry,
    vertex: tuple[float, float],
    opening: float,
    side: str = "right",
    mode: str = "cone",
) -> np.ndarray:
    """Real multiplication function for cone-restricted flux insertion.

    mode="cone": phase that winds from 0 to 2*pi across the single cone with
    the given vertex and opening, and is constant (0 below, 2*pi above)
    outside it.

    mode="double": the two-cone interpolation with vertices at ``vertex`` and
    its mirror image ``-vertex``: value 2*pi on the upper half plane outside
    the cones, 0 on the lower half plane outside the cones, linear in angle
    inside each cone.  (The "right" cone opens rightward from +|a|, the
    "left" cone opens leftward from -|a|.)

    Returns one value per flat index (constant across orbitals of a site).
    """
    if not 0 < opening < np.pi:
        raise ValueError(f"opening angle {opening} outside (0, pi)")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    coords = g.coords()
    a1, a2 = vertex
    if mode == "cone":
        inside, frac = _cone_values(coords, a1, a2, opening, side)
        above = coords[:, 1] > a2
        if side == "left":
            # plateau values swapped so the ramp meets them continuously
            xi = np.where(above, 0.0, 2 * np.pi)
            xi[inside] = 2 * np.pi * (1 - frac[inside])
        else:
            xi = np.where(above, 2 * np.pi, 0.0)
            xi[inside] = 2 * np.pi * frac[inside]
        return xi
    if mode == "double":
        ar = (abs(a1), a2)
        al = (-abs(a1), a2)
        in_r, frac_r = _cone_values(coords, ar[0], ar[1], opening, "right")
        in_l, frac_l = _cone_values(coords, al[0], al[1], opening, "left")
        xi = np.where(coords[:, 1] > a2, 2 * np.pi, 0.0)
        xi[in_r] = 2 * np.pi * frac_r[in_r]
        xi[in_l] = 2 * np.pi * frac_l[in_l]
        return xi
    raise ValueError(f"unknown mode {mode!r}")


def nc_derivative(A: OperatorMatrix, axis: int) -> OperatorMatrix:
    """Non-commutative derivative -i [Lambda_axis, A]."""
    lam = half_space_projector(A.geometry, axis)
    data = -1j * (lam.data @ A.data - A.data @ lam.data)
    hint = A.hermitian_hint
    return OperatorMatrix(data, A.geometry, hermitian_hint=hint)


def plateau_window(
    g: LatticeGeometry,
    center: tuple[float, float],
    half_width: tuple[float, float],
    ramp: float = 4.0,
) -> np.ndarray:
    """Per-site cutoff: 1 on a rectangle around ``center``, cosine ramp of
    width ``ramp`` down to 0, product over the two axes.

    Used to localize winding traces around one crossing of the fiducial
    line; returns one weight per flat index.
    """
    if ramp < 4.0:
        raise ValueError("ramp width must be >= 4 sites")
    coords = g.coords()

    def axis_profile(u, c, hw):
        d = np.abs(u - c)
        w = np.ones_like(d, dtype=float)
        on_ramp = (d > hw) & (d < hw + ramp)
        w[d >= hw + ramp] = 0.0
        w[on_ramp] = 0.5 * (1 + np.cos(np.pi * (d[on_ramp] - hw) / ramp))
        return w

    wx = axis_profile(coords[:, 0].astype(float), center[0], half_width[0])
    wy = axis_profile(coords[:, 1].astype(float), center[1], half_width[1])
    return wx * wy
