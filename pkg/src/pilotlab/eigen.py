"""Brute-force dense eigensolver.

This is the oracle the rest of the repository checks itself against: a
literal diagonalization of the discretized Hamiltonian with spectrally
exact kinetic matrices (Fourier on periodic grids, sine basis between
hard walls), so low-lying eigenvalues converge exponentially in the
number of grid points for smooth potentials.
"""
from __future__ import annotations

import numpy as np

from .errors import GridCapError
from .grids import PERIODIC, SpatialGrid
from .hamiltonian import HamiltonianSpec
from .wavefunction import WaveFunction

DEFAULT_DENSE_CAP = 4096


def fourier_kinetic_matrix(n: int, dx: float, mass: float, hbar: float = 1.0) -> np.ndarray:
    """Dense kinetic matrix on a periodic axis (circulant, exact k^2)."""
    k = 2 * np.pi * np.fft.fftfreq(n, d=dx)
    energies = hbar**2 * k**2 / (2 * mass)
    row = np.fft.ifft(energies).real  # first row of the circulant
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return row[idx]


def sine_kinetic_matrix(n: int, dx: float, mass: float, hbar: float = 1.0) -> np.ndarray:
    """Dense kinetic matrix between hard walls (sine basis, exact k^2)."""
    length = (n + 1) * dx
    j = np.arange(1, n + 1)
    k = np.pi * j / length
    energies = hbar**2 * k**2 / (2 * mass)
    basis = np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(j, j) * np.pi / (n + 1))
    return basis @ np.diag(energies) @ basis


def kinetic_matrix(grid: SpatialGrid, mass: float, hbar: float = 1.0) -> np.ndarray:
    if grid.boundary == PERIODIC:
        return fourier_kinetic_matrix(grid.points_per_axis, grid.spacing, mass, hbar)
    return sine_kinetic_matrix(grid.points_per_axis, grid.spacing, mass, hbar)


def build_dense_hamiltonian(h: HamiltonianSpec, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Assemble the full dense Hamiltonian (space tensor internal)."""
    grid = h.grid
    s = 1 if h.internal_coupling is None else h.internal_coupling.shape[0]
    dim = grid.npoints * s
    if dim > cap:
        raise GridCapError(f"dense dimension {dim} exceeds cap {cap}")
    if h.xp_coupling != 0.0:
        raise ValueError("dense assembly does not support the x*p coupling")

    n = grid.points_per_axis
    if grid.dimension == 1:
        h_space = kinetic_matrix(grid, h.masses[0], h.hbar)
    else:
        tx = kinetic_matrix(grid, h.masses[0], h.hbar)
        ty = kinetic_matrix(grid, h.masses[1], h.hbar)
        h_space = np.kron(tx, np.eye(n)) + np.kron(np.eye(n), ty)
    h_space = h_space + np.diag(h.potential.reshape(-1))

    if s == 1:
        return h_space
    # amplitudes flatten with the component axis last
    return np.kron(h_space, np.eye(s)) + np.kron(np.eye(grid.npoints), h.internal_coupling)


def brute_force_eigens(h: HamiltonianSpec, k: int,
                       cap: int = DEFAULT_DENSE_CAP) -> list[tuple[float, WaveFunction]]:
    """Lowest ``k`` eigenpairs of the dense Hamiltonian, energies ascending.

    Eigenfunctions are normalized against the grid quadrature, so they can
    be compared directly with evolved wavefunctions.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    ham = build_dense_hamiltonian(h, cap=cap)
    if k > ham.shape[0]:
        raise ValueError(f"requested {k} eigenpairs from dimension {ham.shape[0]}")
    evals, evecs = np.linalg.eigh(ham)
    s = 1 if h.internal_coupling is None else h.internal_coupling.shape[0]
    out = []
    scale = 1.0 / np.sqrt(h.grid.cell_volume)
    for i in range(k):
        amps = (evecs[:, i] * scale).reshape(h.grid.shape + (s,))
        out.append((float(evals[i]), WaveFunction(h.grid, amps.astype(np.complex128))))
    return out
