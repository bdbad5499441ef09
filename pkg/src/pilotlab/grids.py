"""Uniform spatial grids for wavefunctions.

Two boundary types are supported:

* ``periodic`` -- points x_i = (i - n//2) * dx, period L = n * dx.  The
  spectral stepper and all trajectory experiments live here.
* ``hard-wall`` -- interior points of a box with walls at +-L/2 where
  L = (n + 1) * dx; the wavefunction is implicitly zero on the walls.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridCapError, UnsupportedBoundaryError

DEFAULT_POINT_CAP = 1 << 22

PERIODIC = "periodic"
HARD_WALL = "hard-wall"


@dataclass(frozen=True)
class SpatialGrid:
    dimension: int
    points_per_axis: int
    spacing: float
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.points_per_axis < 8:
            raise ValueError("grids need at least 8 points per axis")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if self.boundary not in (PERIODIC, HARD_WALL):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.points_per_axis ** self.dimension > DEFAULT_POINT_CAP:
            raise GridCapError(
                f"{self.points_per_axis}^{self.dimension} points exceed the "
                f"cap of {DEFAULT_POINT_CAP}"
            )

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dimension

    @property
    def npoints(self) -> int:
        return self.points_per_axis ** self.dimension

    @property
    def extent(self) -> float:
        """Box length per axis."""
        n = self.points_per_axis
        return (n if self.boundary == PERIODIC else n + 1) * self.spacing

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dimension

    def axis(self) -> np.ndarray:
        """Coordinates along one axis (all axes are identical)."""
        n, dx = self.points_per_axis, self.spacing
        if self.boundary == PERIODIC:
            return (np.arange(n) - n // 2) * dx
        half = (n + 1) * dx / 2.0
        return -half + (np.arange(n) + 1) * dx

    @property
    def origin(self) -> float:
        """Coordinate of the first grid point along an axis."""
        return float(self.axis()[0])

    def meshgrid(self) -> tuple:
        ax = self.axis()
        if self.dimension == 1:
            return (ax,)
        return tuple(np.meshgrid(ax, ax, indexing="ij"))

    def wavenumbers(self) -> np.ndarray:
        """Spectral wavenumbers along one axis (periodic grids only)."""
        if self.boundary != PERIODIC:
            raise UnsupportedBoundaryError(
                "spectral wavenumbers are defined on periodic grids only"
            )
        return 2 * np.pi * np.fft.fftfreq(self.points_per_axis, d=self.spacing)

    def contains(self, positions: np.ndarray) -> np.ndarray:
        """Boolean mask of positions inside the grid extent."""
        pos = np.atleast_2d(positions)
        lo, hi = self.origin - 0.5 * self.spacing, self.origin + self.extent
        return np.all((pos >= lo) & (pos <= hi), axis=-1)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "points_per_axis": self.points_per_axis,
            "spacing": self.spacing,
            "boundary": self.boundary,
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "SpatialGrid":
        known = {"dimension", "points_per_axis", "spacing", "boundary"}
        unknown = set(spec) - known
        if unknown:
            raise ValueError(f"unknown grid fields: {sorted(unknown)}")
        return cls(
            dimension=int(spec["dimension"]),
            points_per_axis=int(spec["points_per_axis"]),
            spacing=float(spec["spacing"]),
            boundary=spec.get("boundary", PERIODIC),
        )
