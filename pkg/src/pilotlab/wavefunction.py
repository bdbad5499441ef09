"""Wavefunctions on spatial grids.

Amplitudes live on ``grid.shape + (components,)``; the trailing axis
indexes internal non-ontic degrees of freedom (generic "spin-like"
labels).  All densities and inner products sum over that axis, so the
guidance and measurement layers never see the internal basis.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .grids import SpatialGrid

NORM_TOL = 1e-10


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class WaveFunction:
    grid: SpatialGrid
    amplitudes: np.ndarray  # complex128, shape grid.shape + (s,)
    time: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim == self.grid.dimension:
            amps = amps[..., np.newaxis]
        if amps.shape[: self.grid.dimension] != self.grid.shape:
            raise ValueError(
                f"amplitude shape {amps.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def components(self) -> int:
        return self.amplitudes.shape[-1]

    def density(self) -> np.ndarray:
        """Component-summed |psi|^2 on the grid."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=-1)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.density()) * self.grid.cell_volume))

    def normalized(self) -> "WaveFunction":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero wavefunction")
        return WaveFunction(self.grid, self.amplitudes / n, self.time)

    def with_time(self, time: float) -> "WaveFunction":
        return WaveFunction(self.grid, self.amplitudes, time)

    def to_csv(self, path) -> None:
        """Snapshot as CSV rows: coordinates, component, re, im."""
        coords = self.grid.meshgrid()
        head = [f"x{i}" for i in range(self.grid.dimension)] + ["component", "re", "im"]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(head)
            flat = self.amplitudes.reshape(-1, self.components)
            flat_coords = [c.reshape(-1) for c in coords]
            for i in range(flat.shape[0]):
                for s in range(self.components):
                    z = flat[i, s]
                    writer.writerow(
                        [repr(float(c[i])) for c in flat_coords]
                        + [s, repr(z.real), repr(z.imag)]
                    )


def from_callable(grid: SpatialGrid, fn, components: int = 1, time: float = 0.0,
                  normalize: bool = True) -> WaveFunction:
    """Build a wavefunction by evaluating ``fn(*coords)`` on the grid.

    For multi-component states ``fn`` must return an array with a trailing
    component axis.
    """
    coords = grid.meshgrid()
    amps = np.asarray(fn(*coords), dtype=np.complex128)
    if amps.shape == grid.shape:
        amps = amps[..., np.newaxis]
    psi = WaveFunction(grid, amps, time)
    return psi.normalized() if normalize else psi


def gaussian_packet(grid: SpatialGrid, center, width, momentum=None,
                    hbar: float = 1.0, time: float = 0.0) -> WaveFunction:
    """Normalized Gaussian packet exp(-(x-c)^2/4w^2 + i p.x / hbar)."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    width = np.broadcast_to(np.asarray(width, dtype=float), center.shape)
    if momentum is None:
        momentum = np.zeros_like(center)
    momentum = np.broadcast_to(np.asarray(momentum, dtype=float), center.shape)

    def fn(*coords):
        phase = np.zeros(coords[0].shape, dtype=np.complex128)
        envelope = np.zeros(coords[0].shape)
        for ax, c in enumerate(coords):
            envelope = envelope - (c - center[ax]) ** 2 / (4 * width[ax] ** 2)
            phase = phase + 1j * momentum[ax] * c / hbar
        return np.exp(envelope + phase)

    return from_callable(grid, fn, time=time)


def plane_wave(grid: SpatialGrid, k, time: float = 0.0) -> WaveFunction:
    """Normalized plane wave exp(i k.x) (periodic grids)."""
    k = np.atleast_1d(np.asarray(k, dtype=float))

    def fn(*coords):
        phase = np.zeros(coords[0].shape, dtype=np.complex128)
        for ax, c in enumerate(coords):
            phase = phase + 1j * k[ax] * c
        return np.exp(phase)

    return from_callable(grid, fn, time=time)


def expectation(psi: WaveFunction, observable: np.ndarray) -> float:
    """Grid-quadrature expectation value of a real grid function."""
    obs = np.asarray(observable, dtype=float)
    if obs.shape != psi.grid.shape:
        raise ValueError(
            f"observable shape {obs.shape} does not match grid {psi.grid.shape}"
        )
    if not np.all(np.isfinite(obs)):
        raise ValueError("observable must be finite on the grid")
    return float(np.sum(psi.density() * obs) * psi.grid.cell_volume)
