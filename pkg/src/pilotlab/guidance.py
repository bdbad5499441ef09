"""Guidance velocities for particle configurations.

The velocity law is the probability-current one,

    v_a(x) = (hbar / m_a) * Im[ psi^dag grad_a psi / psi^dag psi ],

with the dagger summing internal (non-ontic) components.  Amplitudes and
their spectral gradients are interpolated at off-grid points with local
cubic stencils and combined pointwise, which keeps momentum eigenstates
exact and preserves the node structure of the current.

When the Hamiltonian carries the bilinear pointer coupling g*x*p_y the
conserved current acquires a drift term and the pointer-axis velocity
becomes v_y + g*x; the integrator and velocity evaluators honor that.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NodeProximityError
from .grids import PERIODIC, SpatialGrid
from .hamiltonian import HamiltonianSpec
from .wavefunction import WaveFunction

NODE_THRESHOLD_REL = 1e-12


def spectral_gradients(psi: WaveFunction) -> list[np.ndarray]:
    """Per-axis gradients of the amplitudes (component axis last).

    Periodic grids differentiate spectrally; hard-wall grids fall back to
    second-order central differences with the wall values pinned to zero.
    """
    amps = psi.amplitudes
    grads = []
    if psi.grid.boundary == PERIODIC:
        k = psi.grid.wavenumbers()
        for ax in range(psi.grid.dimension):
            shape = [1] * amps.ndim
            shape[ax] = k.size
            psi_k = np.fft.fft(amps, axis=ax)
            grads.append(np.fft.ifft(1j * k.reshape(shape) * psi_k, axis=ax))
    else:
        dx = psi.grid.spacing
        for ax in range(psi.grid.dimension):
            padded = np.concatenate(
                [np.zeros_like(np.take(amps, [0], axis=ax)), amps,
                 np.zeros_like(np.take(amps, [0], axis=ax))], axis=ax)
            grads.append(
                (np.take(padded, range(2, amps.shape[ax] + 2), axis=ax)
                 - np.take(padded, range(0, amps.shape[ax]), axis=ax)) / (2 * dx))
    return grads


class GuidanceSnapshot:
    """Wavefunction + gradients at a fixed time, laid out component-first
    for the interpolation kernels."""

    def __init__(self, grid: SpatialGrid, amplitudes: np.ndarray, time: float):
        self.grid = grid
        self.time = float(time)
        # amplitudes arrive with the component axis last; kernels want it
        # first, writable, and C-contiguous
        self.psi = np.array(np.moveaxis(amplitudes, -1, 0),
                            dtype=np.complex128, order="C")
        wf = WaveFunction(grid, amplitudes, time)
        self.grads = [
            np.array(np.moveaxis(g, -1, 0), dtype=np.complex128, order="C")
            for g in spectral_gradients(wf)
        ]
        self.peak_density = float(np.max(np.sum(np.abs(self.psi) ** 2, axis=0)))

    @classmethod
    def of(cls, psi: WaveFunction) -> "GuidanceSnapshot":
        return cls(psi.grid, psi.amplitudes, psi.time)

    def terms(self, positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Current numerators (M, d) and densities (M,) at the positions."""
        grid = self.grid
        periodic = grid.boundary == PERIODIC
        x0 = grid.origin
        inv = 1.0 / grid.spacing
        pos = np.ascontiguousarray(np.atleast_2d(positions), dtype=np.float64)
        if grid.dimension == 1:
            num, rho = kernels.guidance_terms_1d(
                self.psi, self.grads[0], pos[:, 0], x0, inv, periodic)
            return num[:, np.newaxis], rho
        numx, numy, rho = kernels.guidance_terms_2d(
            self.psi, self.grads[0], self.grads[1], pos, x0, x0, inv, inv, periodic)
        return np.stack([numx, numy], axis=1), rho


def velocity_from_terms(nums: np.ndarray, rho: np.ndarray, h: HamiltonianSpec,
                        positions: np.ndarray) -> np.ndarray:
    """Combine interpolated current terms into velocities (M, d)."""
    inv_mass = np.array([h.hbar / m for m in h.masses])
    v = nums * inv_mass[np.newaxis, :] / rho[:, np.newaxis]
    if h.xp_coupling != 0.0:
        pos = np.atleast_2d(positions)
        v[:, 1] = v[:, 1] + h.xp_coupling * pos[:, 0]
    return v


def guidance_velocity(psi: WaveFunction, x, h: HamiltonianSpec,
                      node_threshold_rel: float = NODE_THRESHOLD_REL) -> np.ndarray:
    """Velocity of the configuration ``x`` under ``psi``.

    ``x`` may be a single point (shape (d,)) or a batch (M, d); the result
    matches.  Raises NodeProximityError (carrying the offending density)
    where the component-summed density falls below ``node_threshold_rel``
    times the grid peak.
    """
    single = np.asarray(x, dtype=float).ndim == 1
    pos = np.atleast_2d(np.asarray(x, dtype=float))
    snap = GuidanceSnapshot.of(psi)
    nums, rho = snap.terms(pos)
    floor = node_threshold_rel * snap.peak_density
    if np.any(rho < floor):
        raise NodeProximityError(
            f"density below node threshold ({float(rho.min()):.3e} < {floor:.3e})",
            density=float(rho.min()),
        )
    v = velocity_from_terms(nums, rho, h, pos)
    return v[0] if single else v


@dataclass(frozen=True)
class GuidanceField:
    """Velocity samples on the grid at a fixed time (diagnostic view)."""

    grid: SpatialGrid
    velocities: np.ndarray  # (d,) + grid.shape, nan below the node floor
    time: float
    node_floor: float


def guidance_field(psi: WaveFunction, h: HamiltonianSpec,
                   node_threshold_rel: float = NODE_THRESHOLD_REL) -> GuidanceField:
    rho = psi.density()
    floor = node_threshold_rel * float(rho.max())
    grads = spectral_gradients(psi)
    vs = []
    mask = rho < floor
    for ax in range(psi.grid.dimension):
        num = np.sum((psi.amplitudes.conj() * grads[ax]).imag, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = h.hbar / h.masses[ax] * num / rho
        v[mask] = np.nan
        vs.append(v)
    if h.xp_coupling != 0.0:
        x = psi.grid.meshgrid()[0]
        vs[1] = vs[1] + h.xp_coupling * x
    return GuidanceField(psi.grid, np.stack(vs), psi.time, floor)
