"""Hamiltonian specifications: kinetic masses, grid potential, optional
internal coupling, and the bilinear x*p coupling used by the pointer
measurement protocol.

H = sum_a p_a^2 / (2 m_a) + V(x) + C (internal, s x s Hermitian)
    + g * x_0 * p_1          (2D grids only; pointer coupling)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import SpatialGrid
from .wavefunction import _frozen

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class HamiltonianSpec:
    grid: SpatialGrid
    masses: tuple
    potential: np.ndarray
    internal_coupling: np.ndarray | None = None
    xp_coupling: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        masses = tuple(float(m) for m in np.atleast_1d(self.masses))
        if len(masses) == 1:
            masses = masses * self.grid.dimension
        if len(masses) != self.grid.dimension:
            raise ValueError("need one mass per axis")
        if any(m <= 0 for m in masses):
            raise ValueError("masses must be positive")
        object.__setattr__(self, "masses", masses)

        pot = np.asarray(self.potential, dtype=float)
        if pot.shape != self.grid.shape:
            raise ValueError(
                f"potential shape {pot.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(pot)):
            raise ValueError("potential must be finite")
        object.__setattr__(self, "potential", _frozen(pot))

        if self.internal_coupling is not None:
            c = np.asarray(self.internal_coupling, dtype=np.complex128)
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise ValueError("internal coupling must be a square matrix")
            if np.max(np.abs(c - c.conj().T)) > HERMITICITY_TOL:
                raise ValueError("internal coupling must be Hermitian")
            object.__setattr__(self, "internal_coupling", _frozen(c))

        if self.xp_coupling != 0.0 and self.grid.dimension != 2:
            raise ValueError("x*p coupling requires a 2D grid")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")


def harmonic_potential(grid: SpatialGrid, omega, mass=1.0, center=0.0) -> np.ndarray:
    """V = sum_a (1/2) m_a omega_a^2 (x_a - c_a)^2."""
    omega = np.broadcast_to(np.atleast_1d(np.asarray(omega, float)), (grid.dimension,))
    mass = np.broadcast_to(np.atleast_1d(np.asarray(mass, float)), (grid.dimension,))
    center = np.broadcast_to(np.atleast_1d(np.asarray(center, float)), (grid.dimension,))
    coords = grid.meshgrid()
    v = np.zeros(grid.shape)
    for ax, c in enumerate(coords):
        v = v + 0.5 * mass[ax] * omega[ax] ** 2 * (c - center[ax]) ** 2
    return v


def quadratic_form_potential(grid: SpatialGrid, k_matrix: np.ndarray) -> np.ndarray:
    """V = (1/2) x^T K x for a symmetric coupling matrix K (one row per axis)."""
    k_matrix = np.asarray(k_matrix, dtype=float)
    coords = grid.meshgrid()
    v = np.zeros(grid.shape)
    for i in range(grid.dimension):
        for j in range(grid.dimension):
            v = v + 0.5 * k_matrix[i, j] * coords[i] * coords[j]
    return v


def barrier_with_slits(grid: SpatialGrid, x_barrier: float, thickness: float,
                       height: float, slit_separation: float, slit_width: float,
                       open_slits=(True, True)) -> np.ndarray:
    """Hard two-slit barrier on a 2D grid: a wall at x ~ x_barrier with up
    to two openings centered at y = +-slit_separation/2."""
    if grid.dimension != 2:
        raise ValueError("two-slit barrier requires a 2D grid")
    x, y = grid.meshgrid()
    in_wall = np.abs(x - x_barrier) < 0.5 * thickness
    opening = np.zeros(grid.shape, dtype=bool)
    centers = (+0.5 * slit_separation, -0.5 * slit_separation)
    for is_open, yc in zip(open_slits, centers):
        if is_open:
            opening |= np.abs(y - yc) < 0.5 * slit_width
    return np.where(in_wall & ~opening, height, 0.0)


_POTENTIAL_BUILDERS = {
    "free": lambda grid, p: np.zeros(grid.shape),
    "harmonic": lambda grid, p: harmonic_potential(
        grid, p["omega"], p.get("mass", 1.0), p.get("center", 0.0)
    ),
    "two-slit": lambda grid, p: barrier_with_slits(
        grid, p["x_barrier"], p["thickness"], p["height"],
        p["slit_separation"], p["slit_width"],
        tuple(p.get("open_slits", (True, True))),
    ),
}


def potential_from_dict(grid: SpatialGrid, spec: dict) -> np.ndarray:
    spec = dict(spec)
    kind = spec.pop("kind")
    try:
        builder = _POTENTIAL_BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown potential kind {kind!r}") from None
    return builder(grid, spec)


def hamiltonian_from_dict(spec: dict) -> HamiltonianSpec:
    """Load a grid + Hamiltonian pair from a plain JSON-style dict."""
    known = {"grid", "masses", "potential", "internal_coupling", "xp_coupling", "hbar"}
    unknown = set(spec) - known
    if unknown:
        raise ValueError(f"unknown Hamiltonian fields: {sorted(unknown)}")
    grid = SpatialGrid.from_dict(spec["grid"])
    coupling = spec.get("internal_coupling")
    if coupling is not None:
        raw = np.asarray(coupling, dtype=float)
        # JSON carries [re, im] pairs in the innermost axis for complex input
        coupling = raw[..., 0] + 1j * raw[..., 1] if raw.ndim == 3 else raw
    return HamiltonianSpec(
        grid=grid,
        masses=tuple(np.atleast_1d(spec.get("masses", 1.0))),
        potential=potential_from_dict(grid, spec["potential"]),
        internal_coupling=coupling,
        xp_coupling=float(spec.get("xp_coupling", 0.0)),
        hbar=float(spec.get("hbar", 1.0)),
    )
