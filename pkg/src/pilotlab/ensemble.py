"""Trajectory ensembles: Born sampling, RK4 transport along the guidance
field, and equivariance statistics.

Ensemble members are independent given the shared wavefunction history:
the integrator advances all members against read-only snapshots, so the
work is trivially parallel over members (and vectorized here).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StaleEnsembleError
from .evolution import SplitStepEvolver
from .grids import PERIODIC
from .guidance import NODE_THRESHOLD_REL, GuidanceSnapshot, velocity_from_terms
from .hamiltonian import HamiltonianSpec
from .wavefunction import WaveFunction

TIME_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class TrajectoryEnsemble:
    positions: np.ndarray  # (M, d), continuous coordinates
    time: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=np.float64))
        if pos.shape[0] < 1:
            raise ValueError("ensemble needs at least one member")
        object.__setattr__(self, "positions", pos)

    @property
    def member_count(self) -> int:
        return self.positions.shape[0]


@dataclass
class EnsembleHistory:
    times: np.ndarray            # (T,), strictly increasing
    positions: np.ndarray        # (T, M, d)
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    def at(self, index: int) -> TrajectoryEnsemble:
        return TrajectoryEnsemble(self.positions[index], float(self.times[index]),
                                  self.seed)

    @property
    def final(self) -> TrajectoryEnsemble:
        return self.at(len(self.times) - 1)


def sample_born(psi: WaveFunction, m: int, seed: int) -> TrajectoryEnsemble:
    """M independent draws from |psi|^2: inverse-CDF over grid cells plus
    uniform jitter inside the selected cell.  Deterministic given seed."""
    if m < 1:
        raise ValueError("sample count must be positive")
    rng = np.random.default_rng(seed)
    rho = psi.density().reshape(-1)
    cdf = np.cumsum(rho)
    cdf /= cdf[-1]
    cells = np.searchsorted(cdf, rng.random(m), side="right")
    cells = np.minimum(cells, rho.size - 1)
    grid = psi.grid
    ax = grid.axis()
    d = grid.dimension
    jitter = (rng.random((m, d)) - 0.5) * grid.spacing
    if d == 1:
        centers = ax[cells][:, np.newaxis]
    else:
        ij = np.unravel_index(cells, grid.shape)
        centers = np.stack([ax[ij[0]], ax[ij[1]]], axis=1)
    return TrajectoryEnsemble(centers + jitter, psi.time, seed)


def sample_born_symmetric(psi: WaveFunction, m: int, seed: int, axis: int = 0,
                          center: float = 0.0) -> TrajectoryEnsemble:
    """Born sample with mirror pairing about ``center`` along ``axis``.

    Requires |psi|^2 symmetric under that reflection; each member is still
    marginally Born-distributed, and the pairing removes the odd sampling
    moments (useful for mean-drift and symmetry tests).
    """
    if m % 2:
        raise ValueError("symmetrized sampling needs an even member count")
    half = sample_born(psi, m // 2, seed)
    mirrored = half.positions.copy()
    mirrored[:, axis] = 2 * center - mirrored[:, axis]
    return TrajectoryEnsemble(np.concatenate([half.positions, mirrored]),
                              psi.time, seed)


def _wrap_positions(pos: np.ndarray, grid) -> np.ndarray:
    if grid.boundary != PERIODIC:
        return pos
    lo = grid.origin
    return lo + np.mod(pos - lo, grid.extent)


class _StepContext:
    """Guidance snapshots at (t, t + dt/2, t + dt) for one RK4 step."""

    def __init__(self, snaps, h, dt_full):
        self.snaps = snaps
        self.h = h
        self.dt_full = dt_full
        self.floor_scale = max(s.peak_density for s in snaps)

    def velocity(self, level: int, pos: np.ndarray):
        nums, rho = self.snaps[level].terms(pos)
        return velocity_from_terms(nums, rho, self.h, pos), rho

    def velocity_at(self, tau: float, dt: float, pos: np.ndarray):
        """Quadratic time interpolation between the three levels."""
        u = tau / dt
        c0 = (1 - u) * (1 - 2 * u)
        c1 = 4 * u * (1 - u)
        c2 = u * (2 * u - 1)
        v = 0.0
        rho_min = None
        for c, level in zip((c0, c1, c2), range(3)):
            vl, rl = self.velocity(level, pos)
            v = v + c * vl
            rho_min = rl if rho_min is None else np.minimum(rho_min, rl)
        return v, rho_min


def _rk4_step(ctx: _StepContext, pos: np.ndarray, dt: float):
    """One vectorized RK4 step; returns new positions and min density seen."""
    v1, r1 = ctx.velocity(0, pos)
    v2, r2 = ctx.velocity(1, pos + 0.5 * dt * v1)
    v3, r3 = ctx.velocity(1, pos + 0.5 * dt * v2)
    v4, r4 = ctx.velocity(2, pos + dt * v3)
    new = pos + dt / 6.0 * (v1 + 2 * v2 + 2 * v3 + v4)
    rho_min = np.minimum(np.minimum(r1, r2), np.minimum(r3, r4))
    return new, rho_min


def _rk4_substep(ctx: _StepContext, pos: np.ndarray, t0: float, dt: float):
    v1, r1 = ctx.velocity_at(t0, ctx.dt_full, pos)
    v2, r2 = ctx.velocity_at(t0 + 0.5 * dt, ctx.dt_full, pos + 0.5 * dt * v1)
    v3, r3 = ctx.velocity_at(t0 + 0.5 * dt, ctx.dt_full, pos + 0.5 * dt * v2)
    v4, r4 = ctx.velocity_at(t0 + dt, ctx.dt_full, pos + dt * v3)
    new = pos + dt / 6.0 * (v1 + 2 * v2 + 2 * v3 + v4)
    rho_min = np.minimum(np.minimum(r1, r2), np.minimum(r3, r4))
    return new, rho_min


def integrate_trajectories(psi0: WaveFunction, h: HamiltonianSpec,
                           ensemble0: TrajectoryEnsemble, dt: float, steps: int,
                           psi_substeps: int = 2,
                           node_threshold_rel: float = NODE_THRESHOLD_REL,
                           record_every: int = 1) -> EnsembleHistory:
    """Transport the ensemble along the Bohmian flow of ``psi0`` under ``h``.

    The wavefunction advances with timestep dt/psi_substeps (psi_substeps
    even, so the RK4 midpoint level exists).  Members that dip below the
    node threshold are retried for that step with dt/4 substeps and a
    quadratic-in-time velocity interpolant; members that still fail are
    frozen for the step and counted.  If more than 0.1% of members were
    ever frozen, the history carries a statistics-quality warning.
    """
    if psi_substeps < 2 or psi_substeps % 2:
        raise ValueError("psi_substeps must be even and >= 2")
    if abs(psi0.time - ensemble0.time) > TIME_MATCH_TOL:
        raise StaleEnsembleError("ensemble and wavefunction start times differ")
    grid = psi0.grid
    if not np.all(grid.contains(ensemble0.positions)):
        raise ValueError("ensemble positions fall outside the grid extent")

    evolver = SplitStepEvolver(psi0, h, dt / psi_substeps)
    pos = ensemble0.positions.copy()
    m = pos.shape[0]

    times = [evolver.time]
    recorded = [pos.copy()]
    retry_events = 0
    frozen_steps = 0
    ever_frozen = np.zeros(m, dtype=bool)

    snap_start = GuidanceSnapshot(grid, evolver.raw_amplitudes().copy(), evolver.time)
    half = psi_substeps // 2
    for step in range(steps):
        evolver.advance(half)
        snap_mid = GuidanceSnapshot(grid, evolver.raw_amplitudes().copy(), evolver.time)
        evolver.advance(psi_substeps - half)
        snap_end = GuidanceSnapshot(grid, evolver.raw_amplitudes().copy(), evolver.time)

        ctx = _StepContext((snap_start, snap_mid, snap_end), h, dt)
        floor = node_threshold_rel * ctx.floor_scale

        new_pos, rho_min = _rk4_step(ctx, pos, dt)
        bad = rho_min < floor
        if np.any(bad):
            retry_events += int(bad.sum())
            sub_pos = pos[bad]
            ok = np.ones(sub_pos.shape[0], dtype=bool)
            tau = 0.0
            for _ in range(4):
                sub_new, sub_rho = _rk4_substep(ctx, sub_pos, tau, dt / 4)
                still_ok = sub_rho >= floor
                sub_pos = np.where(still_ok[:, np.newaxis], sub_new, sub_pos)
                ok &= still_ok
                tau += dt / 4
            resolved = pos[bad]
            resolved = np.where(ok[:, np.newaxis], sub_pos, resolved)
            new_pos[bad] = resolved
            frozen = np.zeros(m, dtype=bool)
            frozen[np.flatnonzero(bad)[~ok]] = True
            ever_frozen |= frozen
            frozen_steps += int((~ok).sum())

        pos = _wrap_positions(new_pos, grid)
        snap_start = snap_end
        if (step + 1) % record_every == 0 or step == steps - 1:
            times.append(evolver.time)
            recorded.append(pos.copy())

    unresolved = int(ever_frozen.sum())
    metadata = {
        "node_retry_events": retry_events,
        "frozen_member_steps": frozen_steps,
        "unresolved_members": unresolved,
        "quality_warning": unresolved > 1e-3 * m,
    }
    return EnsembleHistory(np.asarray(times), np.asarray(recorded),
                           ensemble0.seed, metadata)


def histogram_bins(grid, bins: int):
    lo = grid.origin - 0.5 * grid.spacing
    return np.linspace(lo, lo + grid.extent, bins + 1)


def _density_bin_masses(psi: WaveFunction, edges: np.ndarray, axis: int) -> np.ndarray:
    """Probability mass of |psi|^2 per histogram bin (marginal on ``axis``)."""
    rho = psi.density() * psi.grid.cell_volume
    if psi.grid.dimension == 2:
        rho = rho.sum(axis=1 - axis)
    centers = psi.grid.axis()
    which = np.clip(np.searchsorted(edges, centers, side="right") - 1,
                    0, len(edges) - 2)
    masses = np.zeros(len(edges) - 1)
    np.add.at(masses, which, rho)
    return masses / masses.sum()


def equivariance_statistic(ensemble: TrajectoryEnsemble, psi: WaveFunction,
                           bins: int = 64) -> dict:
    """L1 histogram distance and KS statistic between the ensemble and
    |psi|^2 at the shared time."""
    if abs(ensemble.time - psi.time) > TIME_MATCH_TOL:
        raise StaleEnsembleError(
            f"ensemble at t={ensemble.time} vs wavefunction at t={psi.time}"
        )
    grid = psi.grid
    edges = histogram_bins(grid, bins)
    widths = np.diff(edges)
    m = ensemble.member_count

    l1_axes = []
    ks_axes = []
    for axis in range(grid.dimension):
        target = _density_bin_masses(psi, edges, axis)
        counts, _ = np.histogram(ensemble.positions[:, axis], bins=edges)
        empirical = counts / m
        l1_axes.append(float(np.sum(np.abs(empirical - target))))
        # KS against the piecewise-linear CDF of the binned target
        cdf_right = np.concatenate([[0.0], np.cumsum(target)])
        xs = np.sort(ensemble.positions[:, axis])
        target_cdf = np.interp(xs, edges, cdf_right)
        ecdf_hi = np.arange(1, m + 1) / m
        ecdf_lo = np.arange(0, m) / m
        ks_axes.append(float(np.max(np.maximum(np.abs(ecdf_hi - target_cdf),
                                               np.abs(target_cdf - ecdf_lo)))))
    return {"L1": max(l1_axes), "KS": max(ks_axes)}


def multinomial_l1_noise(psi: WaveFunction, m: int, bins: int = 64,
                         z: float = 3.0) -> float:
    """Sampling-noise bound for the L1 statistic of a fresh Born sample:
    mean of sum_b |Binomial(m, P_b)/m - P_b| under the normal approximation
    plus ``z`` standard deviations."""
    edges = histogram_bins(psi.grid, bins)
    p = _density_bin_masses(psi, edges, 0)
    var = p * (1 - p) / m
    mean = np.sum(np.sqrt(2 * var / np.pi))
    sigma = np.sqrt(np.sum((1 - 2 / np.pi) * var))
    return float(mean + z * sigma)
