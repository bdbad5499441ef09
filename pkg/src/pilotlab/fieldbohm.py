"""Bohmian field configurations and their guidance.

The ontic object here is a real field configuration Phi(x) on the
lattice; the wavefunctional guides it through

    dPhi(x)/dt = (hbar / mu) Im[ (d Psi / d phi_x) / Psi ] at phi = Phi,

which in the canonical mode coordinates (q = sqrt(mu) phi, Q = B q)
becomes the per-mode law dQ_k/dt = hbar Im[d log Psi_k / dQ_k] for
product states.  The lattice functional derivative carries the 1/mu
measure factor (mu = a for scalar fields), making the continuum limit of
the guidance law exact.

Two wavefunctional representations are supported:

* ProductWavefunctional (mode space, closed-form evolution) -- the fast
  path used by ensembles;
* GriddedWavefunctional (N <= 2 sites, full grid wavefunction over the
  canonical site coordinates) -- the brute-force oracle path, reusing the
  particle-sector stepper and guidance.

A two-component wavefunctional models a non-ontic internal degree: its
guidance sums numerator and denominator over the components, so the
velocity is invariant under unitary reparametrizations of that basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensemble import TrajectoryEnsemble, integrate_trajectories
from .errors import NodeProximityError
from .grids import SpatialGrid
from .guidance import NODE_THRESHOLD_REL, guidance_velocity
from .hamiltonian import HamiltonianSpec, quadratic_form_potential
from .lattice import LatticeModel, ModeBasis
from .wavefunction import WaveFunction, from_callable
from .wavefunctional import FrozenMode, GaussianMode, ProductWavefunctional


@dataclass(frozen=True)
class FieldConfiguration:
    values: np.ndarray  # (sites,) real field values
    time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError("field configuration must be a 1D site array")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", vals)


@dataclass
class FieldTrajectory:
    times: np.ndarray       # (T,)
    fields: np.ndarray      # (T, sites)
    mode_coords: np.ndarray  # (T, nmodes)
    metadata: dict = field(default_factory=dict)

    def final(self) -> FieldConfiguration:
        return FieldConfiguration(self.fields[-1], float(self.times[-1]))


def _mode_rel_density(psi: ProductWavefunctional, q: np.ndarray) -> np.ndarray:
    """Per-mode density relative to the mode's own peak, shape like q."""
    q = np.asarray(q, dtype=float)
    out = np.ones(q.shape)
    for i, mode in enumerate(psi.modes):
        if isinstance(mode, FrozenMode):
            continue
        if isinstance(mode, GaussianMode):
            dq = q[..., i] - mode.q
            out[..., i] = np.exp(-mode.width.real * dq**2 / mode.hbar)
        else:
            vals = np.abs(mode.value(q[..., i])) ** 2
            _, rho = mode._quadrature(1024)
            out[..., i] = vals / rho.max()
    return out


def mode_velocity(psi: ProductWavefunctional, q: np.ndarray) -> np.ndarray:
    """hbar * Im d log Psi_k / dQ_k, vectorized over leading axes of q."""
    v = psi.model.hbar * psi.mode_dlogs(q).imag
    if np.any(psi.basis.zero_rows):
        v[..., psi.basis.zero_rows] = 0.0
    return v


def field_guidance_velocity(psi, phi: FieldConfiguration,
                            node_threshold_rel: float = NODE_THRESHOLD_REL) -> np.ndarray:
    """Site-space field velocity dPhi/dt for a mode-space or gridded
    wavefunctional."""
    if isinstance(psi, GriddedWavefunctional):
        return psi.field_velocity(phi)
    q = psi.basis.site_to_mode(phi.values)
    rel = _mode_rel_density(psi, q)
    if np.any(rel < node_threshold_rel):
        k = int(np.argmin(rel))
        raise NodeProximityError(
            f"mode {k} density below node threshold", density=float(rel.min())
        )
    return psi.basis.mode_to_site(mode_velocity(psi, q))


def integrate_field_trajectory(psi: ProductWavefunctional, phi0: FieldConfiguration,
                               dt: float, steps: int,
                               velocity_sign: float = 1.0) -> FieldTrajectory:
    """RK4 transport of one configuration in mode space; the wavefunctional
    is advanced in closed form, so every stage sees the exact state."""
    history = integrate_field_ensemble(
        psi, psi.basis.site_to_mode(phi0.values)[np.newaxis, :], dt, steps,
        velocity_sign=velocity_sign,
    )
    return FieldTrajectory(history["times"], history["fields"][:, 0],
                           history["modes"][:, 0], history["metadata"])


def integrate_field_ensemble(psi: ProductWavefunctional, q0: np.ndarray,
                             dt: float, steps: int,
                             velocity_sign: float = 1.0) -> dict:
    """Vectorized mode-space RK4 for an (M, nmodes) ensemble."""
    q = np.array(q0, dtype=float)
    times = [psi.time]
    modes = [q.copy()]
    psi_t = psi
    for _ in range(steps):
        psi_half = psi_t.evolve(dt / 2)
        psi_full = psi_t.evolve(dt)
        k1 = velocity_sign * mode_velocity(psi_t, q)
        k2 = velocity_sign * mode_velocity(psi_half, q + 0.5 * dt * k1)
        k3 = velocity_sign * mode_velocity(psi_half, q + 0.5 * dt * k2)
        k4 = velocity_sign * mode_velocity(psi_full, q + dt * k3)
        q = q + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        psi_t = psi_full
        times.append(psi_t.time)
        modes.append(q.copy())
    modes = np.asarray(modes)
    fields = psi.basis.mode_to_site(modes.reshape(-1, modes.shape[-1]))
    fields = fields.reshape(modes.shape[0], modes.shape[1], -1)
    return {
        "times": np.asarray(times),
        "modes": modes,
        "fields": fields,
        "metadata": {"velocity_sign": velocity_sign},
    }


def field_equivariance(model: LatticeModel, psi: ProductWavefunctional, m: int,
                       seed: int, t: float, steps: int = 200,
                       velocity_sign: float = 1.0,
                       initial_modes: np.ndarray | None = None) -> dict:
    """Sample M configurations from |Psi(0)|^2, transport them to time t,
    and compare empirical per-mode moments with |Psi(t)|^2.

    Bounds: mean z-scores within 3 sigma of the sampling noise, variance
    ratios within 3*sqrt(2/M) (chi-square).  ``initial_modes`` overrides
    the Born sample (negative-control hook); ``velocity_sign=-1``
    sabotages the guidance law (used by the frame report's control).
    """
    rng = np.random.default_rng(seed)
    q0 = psi.sample_modes(rng, m) if initial_modes is None else np.asarray(initial_modes, float)
    history = integrate_field_ensemble(psi, q0, t / steps, steps,
                                       velocity_sign=velocity_sign)
    q_t = history["modes"][-1]
    psi_t = psi.evolve(t)
    means, variances = psi_t.mode_moments()
    live = ~psi.basis.zero_rows

    emp_mean = q_t.mean(axis=0)
    emp_var = q_t.var(axis=0)
    sigma_mean = np.sqrt(np.maximum(variances, 1e-300) / m)
    mean_z = np.where(live, np.abs(emp_mean - means) / sigma_mean, 0.0)
    var_rel = np.where(live & (variances > 0),
                       np.abs(emp_var - variances) / np.maximum(variances, 1e-300), 0.0)
    var_bound = 3.0 * np.sqrt(2.0 / m)

    passed = bool(np.all(mean_z <= 3.0) and np.all(var_rel <= var_bound))
    return {
        "member_count": m,
        "time": t,
        "max_mean_z": float(mean_z.max()),
        "max_var_rel": float(var_rel.max()),
        "var_bound": float(var_bound),
        "mean_bound_z": 3.0,
        "passed": passed,
        "gross_mismatch": bool(mean_z.max() > 30.0 or var_rel.max() > 10 * var_bound),
        "per_mode_mean_z": mean_z,
        "per_mode_var_rel": var_rel,
    }


class TwoComponentWavefunctional:
    """Psi_chi(Q) = sum_j coeffs[chi, j] * Psi_j(Q) over two base product
    states; chi is a non-ontic two-level degree summed over in guidance."""

    def __init__(self, model: LatticeModel, base_states: list,
                 coeffs: np.ndarray | None = None):
        if len(base_states) != 2:
            raise ValueError("need exactly two base states")
        basis = base_states[0].basis
        if base_states[1].basis is not basis:
            raise ValueError("base states must share a mode basis")
        self.model = model
        self.basis = basis
        self.base_states = list(base_states)
        self.coeffs = (np.eye(2, dtype=np.complex128) if coeffs is None
                       else np.asarray(coeffs, dtype=np.complex128))

    def rotated(self, unitary: np.ndarray) -> "TwoComponentWavefunctional":
        u = np.asarray(unitary, dtype=np.complex128)
        if np.max(np.abs(u @ u.conj().T - np.eye(2))) > 1e-12:
            raise ValueError("component rotation must be unitary")
        return TwoComponentWavefunctional(self.model, self.base_states,
                                          u @ self.coeffs)

    def _log_values(self, q: np.ndarray):
        logs = []
        for state in self.base_states:
            vals = state.mode_values(q)
            logs.append(np.sum(np.log(vals), axis=-1))
        return np.stack(logs, axis=-1)  # (..., 2)

    def guidance_velocity(self, phi: FieldConfiguration,
                          node_threshold_rel: float = NODE_THRESHOLD_REL) -> np.ndarray:
        q = self.basis.site_to_mode(phi.values)
        logs = self._log_values(q)            # (2,)
        ref = logs.real.max()
        base_vals = np.exp(logs - ref)        # (2,)
        comp_vals = self.coeffs @ base_vals   # (2,)
        den = float(np.sum(np.abs(comp_vals) ** 2))
        scale = float((np.abs(self.coeffs) @ np.abs(base_vals)).max()) ** 2
        if den < node_threshold_rel * max(scale, 1e-300):
            raise NodeProximityError("component-summed density at a node",
                                     density=den)
        dlogs = np.stack([s.mode_dlogs(q) for s in self.base_states], axis=0)  # (2, K)
        dvals = self.coeffs @ (base_vals[:, np.newaxis] * dlogs)               # (2, K)
        num = np.sum(comp_vals.conj()[:, np.newaxis] * dvals, axis=0).imag      # (K,)
        v_modes = self.model.hbar * num / den
        v_modes[self.basis.zero_rows] = 0.0
        return self.basis.mode_to_site(v_modes)


def traced_guidance_velocity(psi: TwoComponentWavefunctional,
                             phi: FieldConfiguration) -> np.ndarray:
    """Field velocity with the non-ontic component degree traced out."""
    return psi.guidance_velocity(phi)


class GriddedWavefunctional:
    """Full wavefunction over the canonical site coordinates of a small
    lattice (N <= 2): the brute-force side of the mode/grid comparison."""

    def __init__(self, model: LatticeModel, wavefunction: WaveFunction,
                 hamiltonian: HamiltonianSpec, basis: ModeBasis | None = None):
        self.model = model
        self.basis = basis or ModeBasis(model)
        self.wavefunction = wavefunction
        self.hamiltonian = hamiltonian

    @classmethod
    def hamiltonian_for(cls, model: LatticeModel, grid: SpatialGrid) -> HamiltonianSpec:
        if model.sites != grid.dimension:
            raise ValueError("grid dimension must equal the site count")
        return HamiltonianSpec(
            grid, (1.0,) * grid.dimension,
            quadratic_form_potential(grid, model.coupling_matrix()),
            hbar=model.hbar,
        )

    @classmethod
    def from_product(cls, psi: ProductWavefunctional,
                     grid: SpatialGrid) -> "GriddedWavefunctional":
        model = psi.model
        h = cls.hamiltonian_for(model, grid)
        basis = psi.basis

        def amplitude(*coords):
            q_sites = np.stack(coords, axis=-1)
            q_modes = q_sites @ basis.matrix.T
            return psi.amplitude(q_modes)

        wf = from_callable(grid, amplitude, time=psi.time, normalize=True)
        return cls(model, wf, h, basis)

    def site_coordinates(self, phi: FieldConfiguration) -> np.ndarray:
        return np.sqrt(self.model.mode_mass) * phi.values

    def field_velocity(self, phi: FieldConfiguration) -> np.ndarray:
        q = self.site_coordinates(phi)
        v_q = guidance_velocity(self.wavefunction, q, self.hamiltonian)
        return v_q / np.sqrt(self.model.mode_mass)

    def integrate(self, phi0: FieldConfiguration, dt: float,
                  steps: int, **kwargs) -> FieldTrajectory:
        q0 = self.site_coordinates(phi0)
        ens = TrajectoryEnsemble(q0[np.newaxis, :], self.wavefunction.time)
        history = integrate_trajectories(self.wavefunction, self.hamiltonian,
                                         ens, dt, steps, **kwargs)
        fields = history.positions[:, 0, :] / np.sqrt(self.model.mode_mass)
        modes = fields @ self.basis.matrix.T * np.sqrt(self.model.mode_mass)
        return FieldTrajectory(history.times, fields, modes, history.metadata)
