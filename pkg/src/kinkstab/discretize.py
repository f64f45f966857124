"""Symmetric tridiagonal discretizations of the linearized operators.

Flux-form (conservative) second-order differencing of
-d/ds a(s) d/ds + V(s) against a positive diagonal weight, with three
boundary styles:

* ``dirichlet-ghost``: the end node stays an unknown and the ghost value
  one spacing outside is pinned to zero (the truncated-endpoint rule).
* ``neumann-fold``: mirror ghost across the endpoint (ghost value equals
  the first interior value, flux coefficient reflected evenly); the end
  row and its weight are halved, which keeps the stored pencil symmetric
  while leaving every generalized eigenpair of the folded scheme intact.
* ``dirichlet``: classic interior-node truncation, boundary values zero
  and the end nodes dropped from the unknowns.

A piecewise potential or weight is sampled pointwise except on the single
dual cell containing the transition point, where the exact measure-weighted
average of the two branches is used; this keeps the lowest eigenvalue
second-order accurate in h (pointwise branch assignment at the junction
node degrades it to first order).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .profiles import CUBIC_QUINTIC, KinkProfile, NonlinearityParams, PotentialSet, cubic_quintic_profile, z_of_x

__all__ = [
    "GridSpec",
    "TridiagonalOperator",
    "assemble_LR_z",
    "assemble_Lminus_weighted",
    "assemble_Lpm_x",
    "build_flux_operator",
    "PAPER_Z_GRID",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid: N intervals, N+1 nodes, tagged by its variable (x or z)."""

    left: float
    right: float
    n: int
    var: str = "x"

    def __post_init__(self):
        if self.var not in ("x", "z"):
            raise ValidationError(f"grid variable must be 'x' or 'z', got {self.var!r}")
        if self.n < 16:
            raise ValidationError(f"need at least 16 intervals, got {self.n}")
        if not self.right > self.left:
            raise ValidationError("grid needs right > left")
        if abs(self.h * self.n - (self.right - self.left)) > 1e-12 * max(1.0, abs(self.right - self.left)):
            raise ValidationError("h * N does not reproduce the grid extent")

    @property
    def h(self) -> float:
        return (self.right - self.left) / self.n

    @property
    def node_count(self) -> int:
        return self.n + 1

    def nodes(self) -> np.ndarray:
        return self.left + self.h * np.arange(self.n + 1)


# paper-resolution z-grid for the spectral scans: [-10, 0], h = 5e-4
PAPER_Z_GRID = GridSpec(-10.0, 0.0, 20000, var="z")


@dataclass
class TridiagonalOperator:
    """Symmetric tridiagonal pencil A v = lambda W v on its active nodes.

    Symmetry is structural (one off-diagonal array); `weight` holds the
    positive diagonal of W.  `bc_left`/`bc_right` record the boundary
    treatment so right-hand sides can be collocated consistently.
    """

    diag: np.ndarray
    off: np.ndarray
    weight: np.ndarray
    grid: GridSpec
    nodes: np.ndarray = field(repr=False)
    bc_left: str = "dirichlet-ghost"
    bc_right: str = "neumann-fold"

    def __post_init__(self):
        if self.off.shape[0] != self.diag.shape[0] - 1:
            raise ValidationError("off-diagonal length must be node count - 1")
        if self.weight.shape != self.diag.shape:
            raise ValidationError("weight length must match the diagonal")
        if np.any(self.weight <= 0.0):
            raise ValidationError("weight entries must be positive")

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Matrix action A v (boundary conditions baked into the rows)."""
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def apply_weight(self, v: np.ndarray) -> np.ndarray:
        return self.weight * v

    def collocation_rhs(self, values: np.ndarray) -> np.ndarray:
        """Right-hand side vector for (A - lambda W) v = f sampled at nodes.

        The folded Neumann row is stored halved, so the sample there is
        halved too.
        """
        rhs = np.asarray(values, dtype=float).copy()
        if rhs.shape != self.diag.shape:
            raise ValidationError("collocation values must live on the active nodes")
        if self.bc_right == "neumann-fold":
            rhs[-1] *= 0.5
        if self.bc_left == "neumann-fold":
            rhs[0] *= 0.5
        return rhs

    def similarity_entries(self):
        """Diagonal and off-diagonal of W^{-1/2} A W^{-1/2}."""
        w = self.weight
        return self.diag / w, self.off / np.sqrt(w[:-1] * w[1:])


def _gauss2_average(f, lo: float, hi: float) -> float:
    """Two-point Gauss average of f over [lo, hi] (exact for cubics)."""
    if hi <= lo:
        return 0.0
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    off = half / np.sqrt(3.0)
    return 0.5 * float(f(mid - off) + f(mid + off))


def _junction_average(f_left, f_right, cut: float, lo: float, hi: float) -> float:
    """Measure-weighted average of a two-branch function over one dual cell."""
    cut = min(max(cut, lo), hi)
    width = hi - lo
    left_part = _gauss2_average(f_left, lo, cut) * (cut - lo)
    right_part = _gauss2_average(f_right, cut, hi) * (hi - cut)
    return (left_part + right_part) / width


def _junction_average_exact(prim_left, prim_right, cut: float, lo: float, hi: float) -> float:
    """Same, but through exact antiderivatives of the two branches."""
    cut = min(max(cut, lo), hi)
    width = hi - lo
    left_part = prim_left(cut) - prim_left(lo) if cut > lo else 0.0
    right_part = prim_right(hi) - prim_right(cut) if hi > cut else 0.0
    return (left_part + right_part) / width


# antiderivatives of the z-line branches (phi^2 = e^{2z}):
#   (1-12s+15s^2)/((1-s)s) = 1/s + 4/(1-s) - 15  integrated in z via dz = ds/(2s)
def _prim_v_left_z(z: float) -> float:
    return z - 2.0 * np.log(-np.expm1(2.0 * z)) - 7.5 * np.exp(2.0 * z)


def _prim_v_right_z(z: float) -> float:
    return z - 1.5 * np.exp(2.0 * z)


def _prim_w_left_z(z: float) -> float:
    return z - 0.5 * np.log(-np.expm1(2.0 * z))


def build_flux_operator(
    grid: GridSpec,
    a_mid: np.ndarray,
    v_nodes: np.ndarray,
    w_nodes: np.ndarray,
    bc_left: str = "dirichlet-ghost",
    bc_right: str = "neumann-fold",
    a_ghost_left: float | None = None,
) -> TridiagonalOperator:
    """Assemble the flux-form rows from precomputed coefficient samples.

    ``a_mid`` holds the N midpoint fluxes a(s_i + h/2); ``v_nodes`` and
    ``w_nodes`` are nodal samples on all N+1 grid nodes (junction cells
    already averaged by the caller).  Row sums of the second-difference
    part vanish identically at interior nodes.
    """
    h = grid.h
    h2 = h * h
    nodes = grid.nodes()
    a_mid = np.asarray(a_mid, dtype=float)
    if a_mid.shape[0] != grid.n:
        raise ValidationError("need one midpoint flux per interval")

    if bc_left == "dirichlet" and bc_right == "dirichlet":
        diag = (a_mid[:-1] + a_mid[1:]) / h2 + v_nodes[1:-1]
        off = -a_mid[1:-1] / h2
        weight = np.asarray(w_nodes[1:-1], dtype=float).copy()
        return TridiagonalOperator(diag, off, weight, grid, nodes[1:-1], "dirichlet", "dirichlet")

    if bc_left != "dirichlet-ghost" or bc_right != "neumann-fold":
        raise ValidationError(f"unsupported boundary pair ({bc_left!r}, {bc_right!r})")

    if a_ghost_left is None:
        a_ghost_left = float(a_mid[0])
    m = grid.n + 1
    diag = np.empty(m)
    off = -a_mid / h2
    diag[0] = (a_ghost_left + a_mid[0]) / h2 + v_nodes[0]
    diag[1:-1] = (a_mid[:-1] + a_mid[1:]) / h2 + v_nodes[1:-1]
    # mirror ghost with evenly reflected flux, then halve the row
    diag[-1] = a_mid[-1] / h2 + 0.5 * v_nodes[-1]
    weight = np.asarray(w_nodes, dtype=float).copy()
    weight[-1] *= 0.5
    return TridiagonalOperator(diag, off, weight, grid, nodes, "dirichlet-ghost", "neumann-fold")


def assemble_LR_z(R: float, grid: GridSpec = PAPER_Z_GRID) -> TridiagonalOperator:
    """Transformed piecewise operator on the z-line (cubic-quintic case).

    Discretizes -d/dz (1 - e^{2z}) d/dz + tilde V_R with diagonal weight
    tilde W_R on [z_min, 0]: Dirichlet through a zero ghost value at
    z_min - h, Neumann through the mirror ghost at z = 0.
    """
    if grid.var != "z":
        raise ValidationError("assemble_LR_z expects a z-grid")
    z_R = float(z_of_x(R))
    if not (grid.left < z_R < grid.right) or grid.right != 0.0:
        raise ValidationError(
            f"transition point z_R={z_R!r} must lie inside (z_min, 0); grid right end must be 0"
        )
    pots = PotentialSet(cubic_quintic_profile(), R)
    nodes = grid.nodes()
    h = grid.h

    a_mid = -np.expm1(2.0 * (nodes[:-1] + 0.5 * h))
    a_ghost_left = float(-np.expm1(2.0 * (grid.left - 0.5 * h)))

    clamped = np.minimum(nodes, -1e-300)  # keep the discarded branch finite at z = 0
    v_nodes = np.where(nodes <= z_R, _v_left_z(clamped), _v_right_z(nodes))
    w_right = 1.0 / pots.one_minus_phi_sq_at_R
    w_nodes = np.where(nodes <= z_R, 1.0 / -np.expm1(2.0 * clamped), w_right)

    j = int(round((z_R - grid.left) / h))
    j = min(max(j, 0), grid.n)
    cell_lo = nodes[j] - 0.5 * h
    cell_hi = min(nodes[j] + 0.5 * h, grid.right)
    if cell_lo <= z_R <= cell_hi:
        v_nodes[j] = _junction_average_exact(_prim_v_left_z, _prim_v_right_z, z_R, cell_lo, cell_hi)
        w_nodes[j] = _junction_average_exact(
            _prim_w_left_z, lambda z: w_right * z, z_R, cell_lo, cell_hi
        )
    return build_flux_operator(grid, a_mid, v_nodes, w_nodes, a_ghost_left=a_ghost_left)


def _v_left_z(z):
    s = np.exp(2.0 * np.asarray(z, dtype=float))
    return (1.0 - 12.0 * s + 15.0 * s * s) / -np.expm1(2.0 * np.asarray(z, dtype=float))


def _v_right_z(z):
    return 1.0 - 3.0 * np.exp(2.0 * np.asarray(z, dtype=float))


def assemble_Lminus_weighted(
    R: float,
    grid: GridSpec,
    profile: KinkProfile | None = None,
) -> TridiagonalOperator:
    """Weighted spectral problem for the imaginary-part operator.

    On a z-grid (cubic-quintic only) the potential collapses to the single
    smooth branch 1 - 3 e^{2z} while the weight keeps its jump at z_R; on
    an x-grid the general-case operator -d^2/dx^2 + V_-(phi(x)) is built
    against the H_R weight.  Dirichlet-ghost left, Neumann-fold right.
    """
    if grid.var == "z":
        z_R = float(z_of_x(R))
        if not (grid.left < z_R < grid.right) or grid.right != 0.0:
            raise ValidationError(f"z_R={z_R!r} outside (z_min, 0)")
        pots = PotentialSet(cubic_quintic_profile(), R)
        nodes = grid.nodes()
        h = grid.h
        a_mid = -np.expm1(2.0 * (nodes[:-1] + 0.5 * h))
        a_ghost_left = float(-np.expm1(2.0 * (grid.left - 0.5 * h)))
        v_nodes = _v_right_z(nodes)  # (1 - 4 phi^2 + 3 phi^4)/(1 - phi^2) = 1 - 3 phi^2 everywhere
        w_right = 1.0 / pots.one_minus_phi_sq_at_R
        w_nodes = np.where(
            nodes <= z_R, 1.0 / -np.expm1(2.0 * np.minimum(nodes, -1e-300)), w_right
        )
        j = int(round((z_R - grid.left) / h))
        j = min(max(j, 0), grid.n)
        cell_lo = nodes[j] - 0.5 * h
        cell_hi = min(nodes[j] + 0.5 * h, grid.right)
        if cell_lo <= z_R <= cell_hi:
            w_nodes[j] = _junction_average_exact(
                _prim_w_left_z, lambda z: w_right * z, z_R, cell_lo, cell_hi
            )
        return build_flux_operator(grid, a_mid, v_nodes, w_nodes, a_ghost_left=a_ghost_left)

    if profile is None:
        profile = cubic_quintic_profile()
    if not (grid.left < R < grid.right):
        raise ValidationError(f"R={R!r} outside the x-grid")
    pots = PotentialSet(profile, R)
    nodes = grid.nodes()
    h = grid.h
    a_mid = np.ones(grid.n)
    v_nodes = profile.params.v_minus(profile.phi(nodes))
    w_nodes = pots.w_R(nodes)
    j = int(round((R - grid.left) / h))
    j = min(max(j, 0), grid.n)
    cell_lo = nodes[j] - 0.5 * h
    cell_hi = min(nodes[j] + 0.5 * h, grid.right)
    denom = pots.one_minus_phi_sq_at_R
    if cell_lo <= R <= cell_hi:
        w_nodes[j] = _junction_average(
            lambda x: 1.0,
            lambda x: profile.one_minus_phi_sq(x) / denom,
            R,
            cell_lo,
            cell_hi,
        )
    return build_flux_operator(grid, a_mid, v_nodes, w_nodes, a_ghost_left=1.0)


def assemble_Lpm_x(
    which: str,
    params: NonlinearityParams = CUBIC_QUINTIC,
    grid: GridSpec | None = None,
    profile: KinkProfile | None = None,
) -> TridiagonalOperator:
    """Unweighted -d^2/dx^2 + V_{+/-} with Dirichlet values at both ends.

    The unknowns are the interior nodes; the weight is identically one.
    """
    if which not in ("plus", "minus"):
        raise ValidationError("which must be 'plus' or 'minus'")
    if grid is None:
        grid = GridSpec(-20.0, 20.0, 2000, var="x")
    if grid.var != "x":
        raise ValidationError("assemble_Lpm_x expects an x-grid")
    if profile is None:
        profile = cubic_quintic_profile() if params.is_cubic_quintic else None
    if profile is None:
        raise ValidationError("general-case assembly needs an explicit profile")
    nodes = grid.nodes()
    phi = profile.phi(nodes)
    v = params.v_plus(phi) if which == "plus" else params.v_minus(phi)
    a_mid = np.ones(grid.n)
    w = np.ones(grid.node_count)
    return build_flux_operator(grid, a_mid, v, w, bc_left="dirichlet", bc_right="dirichlet")
