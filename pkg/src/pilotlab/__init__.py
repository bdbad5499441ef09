"""pilotlab: a desk-scale laboratory for pilot-wave dynamics.

Subsystems
----------
* grids / wavefunction / hamiltonian / evolution / eigen -- grid quantum
  mechanics with a split-step stepper and a dense brute-force eigensolver
  used as the oracle throughout the repository.
* guidance / ensemble / pointer / nonlocality / twoslit -- Bohmian
  particle trajectories: velocity law, Born sampling, equivariance
  statistics, measurement and interference experiments.
* lattice / wavefunctional / correlator -- harmonic chains and lattice
  scalar fields: dispersion, phonon Fock spectra, Gaussian wavefunctionals,
  vacuum two-point functions.
* fieldbohm -- Bohmian field configurations guided by wavefunctionals.
* gauge -- Coulomb-gauge electromagnetism on small 3D grids.
* relativity -- sound-cone boosts, dispersion linearity, correlator
  invariance, and the ontology/prediction asymmetry demos.
* experiments / cli -- named, seeded, reproducible experiment runners.
"""

from .grids import SpatialGrid
from .hamiltonian import HamiltonianSpec
from .wavefunction import WaveFunction, expectation, from_callable, gaussian_packet, plane_wave
from .evolution import evolve_split_step, energy_expectation
from .eigen import brute_force_eigens
from .guidance import guidance_velocity, guidance_field
from .ensemble import (
    TrajectoryEnsemble,
    EnsembleHistory,
    sample_born,
    sample_born_symmetric,
    integrate_trajectories,
    equivariance_statistic,
)

__version__ = "0.1.0"
