"""Time evolution of grid wavefunctions.

Periodic grids use Strang-split spectral stepping (second order in dt,
spectrally accurate in space).  Hard-wall grids use an exact dense
eigenbasis propagator and are therefore restricted to small grids.

The splitting on periodic grids is, per step,

    exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2)

and when the bilinear pointer coupling g*x*p_y is present,

    exp(-i V dt/2) exp(-i Tx dt/2) exp(-i (Ty + g x p_y) dt)
        exp(-i Tx dt/2) exp(-i V dt/2)

where the middle factor is diagonal in the mixed (x, k_y) representation
because [Ty, x] = [Ty, p_y] = 0.
"""
from __future__ import annotations

import warnings

import numpy as np

from .eigen import build_dense_hamiltonian
from .errors import EvolutionDivergedError, UnsupportedBoundaryError
from .grids import PERIODIC
from .hamiltonian import HamiltonianSpec
from .wavefunction import WaveFunction


def _coupling_propagator(coupling: np.ndarray, dt: float, hbar: float) -> np.ndarray:
    evals, evecs = np.linalg.eigh(coupling)
    return (evecs * np.exp(-1j * evals * dt / hbar)) @ evecs.conj().T


class SplitStepEvolver:
    """Stateful spectral stepper; produces the intermediate states the
    trajectory integrator consumes."""

    def __init__(self, psi: WaveFunction, h: HamiltonianSpec, dt: float):
        if psi.grid.boundary != PERIODIC:
            raise UnsupportedBoundaryError(
                "the spectral stepper requires a periodic grid; use the dense "
                "propagator for hard-wall boxes"
            )
        if psi.grid != h.grid:
            raise ValueError("wavefunction and Hamiltonian grids differ")
        vmax = float(np.max(np.abs(h.potential)))
        if vmax > 0 and dt * vmax / h.hbar >= 1.0:
            warnings.warn(
                "dt*max|V|/hbar >= 1; the potential half-step is under-resolved",
                stacklevel=2,
            )
        self.h = h
        self.dt = float(dt)
        self.time = float(psi.time)
        self._amps = np.array(psi.amplitudes, dtype=np.complex128)
        self._steps_done = 0

        grid = psi.grid
        k = grid.wavenumbers()
        hbar = h.hbar
        self._half_v = np.exp(-0.5j * h.potential * dt / hbar)[..., np.newaxis]
        self._half_c = None
        if h.internal_coupling is not None:
            self._half_c = _coupling_propagator(h.internal_coupling, dt / 2, hbar)

        if h.xp_coupling == 0.0:
            if grid.dimension == 1:
                kin = hbar * k**2 / (2 * h.masses[0])
            else:
                kx, ky = np.meshgrid(k, k, indexing="ij")
                kin = hbar * (kx**2 / (2 * h.masses[0]) + ky**2 / (2 * h.masses[1]))
            self._kinetic = np.exp(-1j * kin * dt)[..., np.newaxis]
            self._mixed = None
        else:
            # x-kinetic half steps bracket the mixed (Ty + g x p_y) step
            self._kinetic = np.exp(
                -0.5j * hbar * k**2 / (2 * h.masses[0]) * dt
            )[:, np.newaxis, np.newaxis]
            x = grid.axis()
            mixed = (hbar * k[np.newaxis, :] ** 2 / (2 * h.masses[1])
                     + h.xp_coupling * x[:, np.newaxis] * k[np.newaxis, :])
            self._mixed = np.exp(-1j * mixed * dt)[..., np.newaxis]

    def _apply_half_potential(self, amps):
        amps *= self._half_v
        if self._half_c is not None:
            amps[:] = amps @ self._half_c.T
        return amps

    def step(self) -> None:
        amps = self._amps
        self._apply_half_potential(amps)
        if self._mixed is None:
            spatial_axes = tuple(range(amps.ndim - 1))
            amps = np.fft.ifftn(self._kinetic * np.fft.fftn(amps, axes=spatial_axes),
                                axes=spatial_axes)
        else:
            amps = np.fft.ifft(self._kinetic * np.fft.fft(amps, axis=0), axis=0)
            amps = np.fft.ifft(self._mixed * np.fft.fft(amps, axis=1), axis=1)
            amps = np.fft.ifft(self._kinetic * np.fft.fft(amps, axis=0), axis=0)
        self._apply_half_potential(amps)
        self._amps = amps
        self._steps_done += 1
        self.time += self.dt

    def advance(self, steps: int) -> None:
        for _ in range(steps):
            self.step()
        if not np.all(np.isfinite(self._amps.view(np.float64))):
            raise EvolutionDivergedError(
                f"non-finite amplitudes after {self._steps_done} steps"
            )

    @property
    def state(self) -> WaveFunction:
        return WaveFunction(self.h.grid, self._amps.copy(), self.time)

    def raw_amplitudes(self) -> np.ndarray:
        """Internal buffer, (space..., s); do not mutate."""
        return self._amps


def evolve_dense(psi: WaveFunction, h: HamiltonianSpec, dt: float,
                 steps: int) -> WaveFunction:
    """Exact propagation in the dense eigenbasis (small grids only)."""
    if h.xp_coupling != 0.0:
        raise UnsupportedBoundaryError("dense propagator has no x*p coupling support")
    ham = build_dense_hamiltonian(h)
    evals, evecs = np.linalg.eigh(ham)
    vec = psi.amplitudes.reshape(-1)
    coeff = evecs.conj().T @ vec
    coeff *= np.exp(-1j * evals * dt * steps / h.hbar)
    out = (evecs @ coeff).reshape(psi.amplitudes.shape)
    return WaveFunction(psi.grid, out, psi.time + dt * steps)


def evolve_split_step(psi: WaveFunction, h: HamiltonianSpec, dt: float,
                      steps: int, method: str = "auto") -> WaveFunction:
    """Advance ``psi`` by ``steps`` timesteps of size ``dt``.

    ``method`` is "auto" (spectral on periodic grids, dense otherwise),
    "spectral", or "dense".
    """
    if method not in ("auto", "spectral", "dense"):
        raise ValueError(f"unknown method {method!r}")
    periodic = psi.grid.boundary == PERIODIC
    if method == "spectral" and not periodic:
        raise UnsupportedBoundaryError(
            "spectral stepping requested on a non-periodic grid"
        )
    if method == "dense" or not periodic:
        out = evolve_dense(psi, h, dt, steps)
        if not np.all(np.isfinite(out.amplitudes.view(np.float64))):
            raise EvolutionDivergedError("dense propagation produced non-finite values")
        return out
    evolver = SplitStepEvolver(psi, h, dt)
    evolver.advance(steps)
    return evolver.state


def energy_expectation(psi: WaveFunction, h: HamiltonianSpec) -> float:
    """<H> for a normalized state (periodic grids)."""
    grid = psi.grid
    amps = psi.amplitudes
    k = grid.wavenumbers()
    spatial_axes = tuple(range(amps.ndim - 1))
    psi_k = np.fft.fftn(amps, axes=spatial_axes)
    weight = np.abs(psi_k) ** 2
    total = np.sum(weight)
    if grid.dimension == 1:
        kin = h.hbar**2 * k**2 / (2 * h.masses[0])
        t_term = np.sum(weight * kin[:, np.newaxis]) / total
    else:
        kx, ky = np.meshgrid(k, k, indexing="ij")
        kin = h.hbar**2 * (kx**2 / (2 * h.masses[0]) + ky**2 / (2 * h.masses[1]))
        t_term = np.sum(weight * kin[..., np.newaxis]) / total

    dv = grid.cell_volume
    v_term = np.sum(psi.density() * h.potential) * dv

    c_term = 0.0
    if h.internal_coupling is not None:
        flat = amps.reshape(-1, psi.components)
        c_term = np.real(np.sum(flat.conj() * (flat @ h.internal_coupling.T))) * dv

    xp_term = 0.0
    if h.xp_coupling != 0.0:
        psi_ky = np.fft.fft(amps, axis=1)
        w = np.abs(psi_ky) ** 2
        x = grid.axis()
        xp_term = (h.xp_coupling * h.hbar
                   * np.sum(w * x[:, np.newaxis, np.newaxis] * k[np.newaxis, :, np.newaxis])
                   / np.sum(w))
    return float(t_term + v_term + c_term + xp_term)
