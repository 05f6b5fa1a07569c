"""Tight-binding model builders: the four-band quantum spin Hall model
(two conjugate Chern sectors coupled to spin), its two-band Chern block,
on-site disorder, the fermionic time-reversal operator, and edge truncation.

Internal basis per site: (orbital, spin) flattened orbital-major, so a
4-orbital site carries internal operators kron(orbital_2x2, spin_2x2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeometry, OperatorMatrix, edge_geometry

__all__ = [
    "BhzParams",
    "TimeReversal",
    "build_bhz",
    "build_qwz",
    "build_tr",
    "check_tri",
    "truncate_to_edge",
    "apply_flux_twist",
    "chern_oracle_clean",
    "disorder_field",
    "KRAMERS_PERMUTATION",
]

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

# coordinate offset so SeedSequence keys stay non-negative
_COORD_OFFSET = 1 << 20


@dataclass(frozen=True)
class BhzParams:
    """Mass parameter, disorder strength, optional Kramers-sector mixing."""

    a: float
    W: float = 0.0
    lambda_mix: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.W < 0:
            raise ValueError("disorder strength W must be >= 0")


@dataclass
class TimeReversal:
    """Antiunitary Theta = J . conj with Theta^2 = -1.

    J is position-diagonal, so Theta commutes with both position operators.
    """

    J: OperatorMatrix
    applies_conjugation: bool = True

    def __post_init__(self):
        Jd = self.J.data
        sq = Jd @ Jd.conj()
        if np.max(np.abs(sq + np.eye(Jd.shape[0]))) > 1e-12:
            raise ValueError("J . conj(J) != -1: not a fermionic time reversal")

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.J.data @ psi.conj()

    def conjugate_operator(self, M: np.ndarray) -> np.ndarray:
        """Theta M Theta^{-1} for a linear operator M."""
        Jd = self.J.data
        return Jd @ M.conj() @ Jd.conj().T


def _shift(g: LatticeGeometry, axis: int) -> np.ndarray:
    """Right-shift R_axis on the site lattice: (R psi)(x) = psi(x - e_axis)."""
    ns = g.Lx * g.Ly
    R = np.zeros((ns, ns))
    wrap = (g.bc_x if axis == 1 else g.bc_y) == "periodic"
    for sy in range(g.Ly):
        for sx in range(g.Lx):
            tx, ty = (sx + 1, sy) if axis == 1 else (sx, sy + 1)
            if axis == 1 and tx == g.Lx:
                if not wrap:
                    continue
                tx = 0
            if axis == 2 and ty == g.Ly:
                if not wrap:
                    continue
                ty = 0
            R[ty * g.Lx + tx, sy * g.Lx + sx] = 1.0
    return R


def disorder_field(g: LatticeGeometry, W: float, seed: int) -> np.ndarray:
    """Per-site i.i.d. uniform draws on [-W/2, W/2].

    Each value is a pure function of (seed, x, y), so overlapping samples
    (e.g. a bulk square and its upper-half truncation) see identical
    disorder on shared sites.
    """
    ns = g.Lx * g.Ly
    omega = np.zeros(ns)
    if W == 0:
        return omega
    coords = g.coords()[:: g.internal_dim]
    for i, (x, y) in enumerate(coords):
        rng = np.random.default_rng([seed, int(x) + _COORD_OFFSET, int(y) + _COORD_OFFSET])
        omega[i] = rng.uniform(-W / 2, W / 2)
    return omega


def build_qwz(g: LatticeGeometry, a: float, W: float = 0.0, seed: int = 0) -> OperatorMatrix:
    """Two-band Chern-insulator block: (a + Re R1 + Re R2 + omega) sz
    + Im R2 sy + Im R1 sx."""
    if g.internal_dim != 2:
        raise ValueError("two-band model needs internal_dim = 2")
    R1, R2 = _shift(g, 1), _shift(g, 2)
    re1, re2 = (R1 + R1.T) / 2, (R2 + R2.T) / 2
    im1, im2 = (R1 - R1.T) / (2j), (R2 - R2.T) / (2j)
    ns = g.Lx * g.Ly
    mass = a * np.eye(ns) + re1 + re2 + np.diag(disorder_field(g, W, seed))
    H = np.kron(mass, SZ) + np.kron(im2, SY) + np.kron(im1, SX)
    return OperatorMatrix(H, g, hermitian_hint=True)


def build_bhz(g: LatticeGeometry, p: BhzParams) -> OperatorMatrix:
    """Four-band time-reversal-invariant model.

    Clean part: (a + Re R1 + Re R2) sz x 1 + Im R2 sy x 1 + Im R1 sx x sz.
    Disorder enters as omega(x) sz x 1 (preserves time reversal).  A nonzero
    lambda_mix adds Im R1 sx x sx, a nearest-neighbor hopping that couples
    the two Kramers sectors while staying Hermitian and TRI.
    """
    if g.internal_dim != 4:
        raise ValueError("four-band model needs internal_dim = 4")
    R1, R2 = _shift(g, 1), _shift(g, 2)
    re1, re2 = (R1 + R1.T) / 2, (R2 + R2.T) / 2
    im1, im2 = (R1 - R1.T) / (2j), (R2 - R2.T) / (2j)
    ns = g.Lx * g.Ly
    mass = p.a * np.eye(ns) + re1 + re2 + np.diag(disorder_field(g, p.W, p.seed))
    H = (
        np.kron(mass, np.kron(SZ, I2))
        + np.kron(im2, np.kron(SY, I2))
        + np.kron(im1, np.kron(SX, SZ))
    )
    if p.lambda_mix != 0.0:
        H = H + p.lambda_mix * np.kron(im1, np.kron(SX, SX))
    return OperatorMatrix(H, g, hermitian_hint=True)


def kramers_sector_permutation(g: LatticeGeometry) -> np.ndarray:
    """Permutation taking the 4-band basis (site, orbital, spin) to the
    spin-major order ((site, orbital) of sector up, then sector down).

    With it, the lambda_mix = 0 four-band matrix block-diagonalizes into the
    two-band model and its complex conjugate.
    """
    if g.internal_dim != 4:
        raise ValueError("needs internal_dim = 4")
    ns = g.Lx * g.Ly
    perm = np.zeros(4 * ns, dtype=int)
    for site in range(ns):
        for orb in range(2):
            for spin in range(2):
                src = site * 4 + orb * 2 + spin
                dst = spin * 2 * ns + site * 2 + orb
                perm[dst] = src
    return perm


KRAMERS_PERMUTATION = kramers_sector_permutation


def build_tr(g: LatticeGeometry) -> TimeReversal:
    """Theta = C . (1 x (-i sy)) acting on the spin factor of each site."""
    if g.internal_dim == 4:
        Jint = np.kron(I2, -1j * SY)
    elif g.internal_dim == 2:
        # a bare spin-1/2 site: the whole internal space is the Kramers pair
        Jint = -1j * SY
    else:
        raise ValueError(
            f"no Kramers structure for internal_dim = {g.internal_dim}; need 2 or 4"
        )
    ns = g.Lx * g.Ly
    J = np.kron(np.eye(ns), Jint)
    return TimeReversal(OperatorMatrix(J, g))


def check_tri(H: OperatorMatrix, theta: TimeReversal) -> float:
    """Operator-norm defect || H - Theta H Theta^{-1} ||; zero iff TRI."""
    if H.geometry != theta.J.geometry:
        raise ValueError("Hamiltonian and time reversal live on different geometries")
    diff = H.data - theta.conjugate_operator(H.data)
    return float(np.linalg.norm(diff, ord=2))


def truncate_to_edge(
    H_bulk: OperatorMatrix,
    boundary_term: OperatorMatrix | None = None,
    boundary_depth: int | None = None,
) -> tuple[OperatorMatrix, LatticeGeometry]:
    """Dirichlet restriction iota* H iota to the half space y >= 0.

    An optional boundary perturbation (an operator on the edge geometry,
    supported within y < boundary_depth) may be added.
    """
    g = H_bulk.geometry
    oy = g.origin[1]
    if oy > 0 or oy + g.Ly <= 0:
        raise ValueError("bulk geometry does not contain the half space y >= 0")
    g_edge = LatticeGeometry(
        g.Lx, oy + g.Ly, g.internal_dim, g.bc_x, "open", origin=(g.origin[0], 0)
    )
    sel = np.flatnonzero(g.coords()[:, 1] >= 0)
    H_edge = H_bulk.data[np.ix_(sel, sel)]
    if boundary_term is not None:
        if boundary_term.geometry != g_edge:
            raise ValueError("boundary term must live on the edge geometry")
        if boundary_depth is None:
            raise ValueError("boundary term requires a declared depth")
        ys = g_edge.coords()[:, 1]
        outside = ys >= boundary_depth
        support = np.abs(boundary_term.data)
        if support[np.ix_(outside, outside)].max(initial=0.0) > 0 or (
            support[outside, :].max(initial=0.0) > 0
        ):
            raise ValueError(
                f"boundary term has support beyond declared depth {boundary_depth}"
            )
        H_edge = H_edge + boundary_term.data
    hint = H_bulk.hermitian_hint and (
        boundary_term is None or boundary_term.hermitian_hint
    )
    return OperatorMatrix(H_edge, g_edge, hermitian_hint=hint), g_edge


def apply_flux_twist(H: OperatorMatrix, theta: float, spin_resolved: bool = False) -> OperatorMatrix:
    """Twist the bonds wrapping around the periodic x direction.

    spin_resolved=False multiplies every wrap bond by exp(i theta); such a
    scalar twist commutes with an on-site time reversal only at theta in
    {0, pi} (mod 2 pi), where the phase is real.

    spin_resolved=True multiplies wrap bonds by exp(i theta S_z) acting on
    the internal spin (the fast internal index, +1/-1): because time
    reversal flips the spin and conjugates, the twisted Hamiltonian stays
    time-reversal invariant at every theta, so Kramers degeneracy protects
    level crossings along the whole twist path.
    """
    g = H.geometry
    if g.bc_x != "periodic":
        raise ValueError("flux twist needs a geometry periodic in x")
    x = g.coords()[:, 0].astype(float)
    dx = x[:, None] - x[None, :]
    fwd = dx > g.Lx / 2   # wrap from low x to high x
    bwd = dx < -g.Lx / 2
    phase = np.ones_like(dx, dtype=complex)
    if spin_resolved:
        if g.internal_dim % 2:
            raise ValueError("spin-resolved twist needs an even internal dimension")
        sz = np.tile(np.tile([1.0, -1.0], g.internal_dim // 2), g.dim // g.internal_dim)
        # forward bonds pick up the row spin phase, backward the conjugate
        # column spin phase, so the result stays Hermitian
        phase[fwd] = np.exp(1j * theta * sz[np.nonzero(fwd)[0]])
        phase[bwd] = np.exp(-1j * theta * sz[np.nonzero(bwd)[1]])
    else:
        phase[fwd] = np.exp(1j * theta)
        phase[bwd] = np.exp(-1j * theta)
    return OperatorMatrix(H.data * phase, g, hermitian_hint=True)


def _bloch_qwz(a: float, k1: float, k2: float) -> np.ndarray:
    return (
        np.sin(k1) * SX
        + np.sin(k2) * SY
        + (a + np.cos(k1) + np.cos(k2)) * SZ
    )


def chern_oracle_clean(a: float, nk: int = 48) -> int:
    """Chern number of the lower band of the clean two-band Bloch matrix,
    via plaquette Berry-curvature summation over the Brillouin zone.

    This is the sign-pinning oracle for every Z-valued index in the package.
    """
    if a in (0.0, 2.0, -2.0) or min(abs(a), abs(abs(a) - 2)) < 1e-12:
        raise ValueError(f"gapless parameter a = {a}")
    ks = 2 * np.pi * np.arange(nk) / nk
    # lower-band eigenvector on the grid
    vecs = np.empty((nk, nk, 2), dtype=complex)
    for i, k1 in enumerate(ks):
        for j, k2 in enumerate(ks):
            w, v = np.linalg.eigh(_bloch_qwz(a, k1, k2))
            vecs[i, j] = v[:, 0]
    total = 0.0
    for i in range(nk):
        for j in range(nk):
            u00 = vecs[i, j]
            u10 = vecs[(i + 1) % nk, j]
            u11 = vecs[(i + 1) % nk, (j + 1) % nk]
            u01 = vecs[i, (j + 1) % nk]
            prod = (
                np.vdot(u00, u10)
                * np.vdot(u10, u11)
                * np.vdot(u11, u01)
                * np.vdot(u01, u00)
            )
            total += np.angle(prod)
    c = total / (2 * np.pi)
    ci = int(np.rint(c))
    if abs(c - ci) > 1e-6:
        raise RuntimeError(f"Berry-curvature sum {c} not close to an integer")
    return ci
