"""Lattice-regularized bosonic models: harmonic atom chains and massive
scalar fields on periodic 1D lattices.

Conventions (fixed here, used everywhere):

* Mode wavenumbers k_j = 2*pi*j/(N*a) with signed integer j in FFT order.
* Dispersion: chain  w(k) = 2 sqrt(kappa/m) |sin(k a / 2)|,
              scalar w(k) = sqrt(m^2 + (4/a^2) sin^2(k a / 2)).
* Mode mass scale mu: the canonical coordinates are q_x = sqrt(mu) phi_x
  with mu = atom mass (chain) or mu = a (scalar field, from the 1D lattice
  measure), making every normal mode a unit-mass oscillator
  H_j = P_j^2/2 + w_j^2 Q_j^2 / 2.  Consequently the ground-state Gaussian
  width parameter equals w_j: Psi_0 ~ exp(-w_j Q_j^2 / 2 hbar).
* The real mode basis pairs cos/sin rows, so site configurations stay
  manifestly real; the transform matrix is orthogonal.
* The chain's j = 0 row is the uniform-translation zero mode (w = 0); it
  is excluded from wavefunctionals and treated as a frozen classical
  coordinate.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .eigen import DEFAULT_DENSE_CAP, fourier_kinetic_matrix
from .errors import GridCapError

CHAIN = "chain"
SCALAR = "scalar"


@dataclass(frozen=True)
class LatticeModel:
    kind: str
    sites: int
    spacing: float
    mass: float              # atom mass (chain) or field mass (scalar)
    spring: float = 1.0      # chain coupling kappa; ignored for scalar
    hbar: float = 1.0

    def __post_init__(self):
        if self.kind not in (CHAIN, SCALAR):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        min_sites = 2 if self.kind == CHAIN else 1
        if self.sites < min_sites:
            raise ValueError(f"{self.kind} needs at least {min_sites} site(s)")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if self.kind == CHAIN and (self.mass <= 0 or self.spring <= 0):
            raise ValueError("chain needs positive atom mass and spring")
        if self.kind == SCALAR and self.mass < 0:
            raise ValueError("scalar field mass must be nonnegative")

    @property
    def length(self) -> float:
        return self.sites * self.spacing

    def positions(self) -> np.ndarray:
        return np.arange(self.sites) * self.spacing

    def wavenumbers(self) -> np.ndarray:
        """Signed k_j = 2*pi*j/(N*a) in FFT ordering (j = 0 first)."""
        return 2 * np.pi * np.fft.fftfreq(self.sites, d=1.0 / self.sites) / self.length

    def omega(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        a = self.spacing
        if self.kind == CHAIN:
            return 2 * np.sqrt(self.spring / self.mass) * np.abs(np.sin(k * a / 2))
        return np.sqrt(self.mass**2 + (4 / a**2) * np.sin(k * a / 2) ** 2)

    @property
    def sound_speed(self) -> float:
        """Long-wavelength phase velocity: a*sqrt(kappa/m) for the chain,
        1 for the scalar field (its dispersion is relativistic with c=1)."""
        if self.kind == CHAIN:
            return self.spacing * np.sqrt(self.spring / self.mass)
        return 1.0

    @property
    def mode_mass(self) -> float:
        """Canonical mass scale mu relating phi and q = sqrt(mu) phi."""
        return self.mass if self.kind == CHAIN else self.spacing

    def coupling_matrix(self) -> np.ndarray:
        """Potential quadratic form in canonical coordinates:
        V = (1/2) q^T K q, with eigenvalues w(k)^2."""
        n = self.sites
        if self.kind == CHAIN:
            diag = 2 * self.spring / self.mass
            off = -self.spring / self.mass
        else:
            diag = self.mass**2 + 2 / self.spacing**2
            off = -1 / self.spacing**2
        k_mat = np.zeros((n, n))
        np.fill_diagonal(k_mat, diag)
        for i in range(n):
            k_mat[i, (i + 1) % n] += off
            k_mat[i, (i - 1) % n] += off
        return k_mat

    def dispersion(self) -> dict:
        """Full table: wavenumbers, frequencies, and the sound speed."""
        k = self.wavenumbers()
        return {"k": k, "omega": self.omega(k), "sound_speed": self.sound_speed}

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sites": self.sites,
            "spacing": self.spacing,
            "mass": self.mass,
            "spring": self.spring,
            "hbar": self.hbar,
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "LatticeModel":
        known = {"kind", "sites", "spacing", "mass", "spring", "hbar"}
        unknown = set(spec) - known
        if unknown:
            raise ValueError(f"unknown lattice fields: {sorted(unknown)}")
        return cls(
            kind=spec["kind"],
            sites=int(spec["sites"]),
            spacing=float(spec["spacing"]),
            mass=float(spec["mass"]),
            spring=float(spec.get("spring", 1.0)),
            hbar=float(spec.get("hbar", 1.0)),
        )


class ModeBasis:
    """Orthogonal real-field mode transform.

    Rows: the j = 0 uniform row, then (cos, sin) pairs for each positive
    j, then the alternating Nyquist row when N is even.  ``site_to_mode``
    maps site field values to canonical mode coordinates Q (including the
    sqrt(mu) mass scaling); ``mode_to_site`` inverts it.
    """

    def __init__(self, model: LatticeModel):
        n = model.sites
        x = np.arange(n)
        rows = [np.full(n, 1.0 / np.sqrt(n))]
        freqs = [model.omega(0.0).item()]
        kvals = [0.0]
        for j in range(1, (n + 1) // 2):
            k = 2 * np.pi * j / (n * model.spacing)
            rows.append(np.sqrt(2.0 / n) * np.cos(k * model.spacing * x))
            rows.append(np.sqrt(2.0 / n) * np.sin(k * model.spacing * x))
            w = float(model.omega(k))
            freqs += [w, w]
            kvals += [k, k]
        if n % 2 == 0:
            k = np.pi / model.spacing
            rows.append(np.where(x % 2 == 0, 1.0, -1.0) / np.sqrt(n))
            freqs.append(float(model.omega(k)))
            kvals.append(k)
        self.model = model
        self.matrix = np.array(rows)
        self.frequencies = np.array(freqs)
        self.wavenumbers = np.array(kvals)
        self.zero_rows = self.frequencies < 1e-12 * max(self.frequencies.max(), 1.0)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def site_to_mode(self, phi: np.ndarray) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        return np.sqrt(self.model.mode_mass) * (phi @ self.matrix.T)

    def mode_to_site(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return (q @ self.matrix) / np.sqrt(self.model.mode_mass)


@dataclass(frozen=True)
class FockState:
    """Occupations per mode-basis row; sparse map row -> n."""

    occupations: tuple

    def __post_init__(self):
        occ = tuple(sorted((int(r), int(n)) for r, n in dict(self.occupations).items()))
        if any(n < 0 for _, n in occ):
            raise ValueError("occupations must be nonnegative")
        object.__setattr__(self, "occupations", occ)

    @classmethod
    def vacuum(cls) -> "FockState":
        return cls(())

    @classmethod
    def single(cls, row: int, n: int = 1) -> "FockState":
        return cls(((row, n),))


def fock_energy(model: LatticeModel, state: FockState,
                basis: ModeBasis | None = None) -> float:
    """E = sum_rows hbar w_row (n_row + 1/2), exact closed form."""
    basis = basis or ModeBasis(model)
    energy = 0.5 * model.hbar * float(np.sum(basis.frequencies))
    for row, n in state.occupations:
        energy += model.hbar * basis.frequencies[row] * n
    return energy


def enumerate_fock_levels(model: LatticeModel, count: int) -> np.ndarray:
    """Lowest ``count`` Fock-tower energies (with multiplicity), found by a
    best-first search over occupation vectors of the nonzero modes."""
    basis = ModeBasis(model)
    freqs = model.hbar * basis.frequencies[~basis.zero_rows]
    freqs = np.sort(freqs)
    vacuum = 0.5 * model.hbar * float(np.sum(basis.frequencies))
    # heap over (added energy, occupation tuple); increments keep entries unique
    heap = [(0.0, (0,) * len(freqs))]
    seen = {heap[0][1]}
    out = []
    while heap and len(out) < count:
        added, occ = heapq.heappop(heap)
        out.append(vacuum + added)
        for i, w in enumerate(freqs):
            nxt = occ[:i] + (occ[i] + 1,) + occ[i + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (added + w, nxt))
    return np.array(out)


def _jacobi_relative_coordinates(n: int, mass: float):
    """Sequential Jacobi coordinates r_j = mean(x_1..x_j) - x_{j+1} with
    reduced masses mu_j = m j/(j+1); the center of mass is dropped.

    Returns (T, reduced_masses) where site displacements u = T r + COM
    terms; T has shape (n, n-1).
    """
    # rows of R express r in terms of u; invert the full transform
    rows = []
    for j in range(1, n):
        row = np.zeros(n)
        row[:j] = 1.0 / j
        row[j] = -1.0
        rows.append(row)
    com = np.full(n, 1.0 / n)
    full = np.vstack([rows, com])          # (n, n): u -> (r, X_com)
    inv = np.linalg.inv(full)              # (r, X_com) -> u
    t_rel = inv[:, : n - 1]
    reduced = np.array([mass * j / (j + 1) for j in range(1, n)])
    return t_rel, reduced


def _grid_axis_hamiltonian(npts: int, half_width: float, mass: float,
                           hbar: float) -> tuple[np.ndarray, np.ndarray]:
    dx = 2 * half_width / npts
    coords = -half_width + (np.arange(npts) + 0.5) * dx
    kin = fourier_kinetic_matrix(npts, dx, mass, hbar)
    return kin, coords


def brute_force_field_eigens(model: LatticeModel, levels: int,
                             grid_points: int = 32, half_width: float | None = None,
                             cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Lowest energies of the coupled-oscillator Hamiltonian, diagonalized
    on a per-coordinate position grid with spectral kinetic matrices.

    For chains the translational zero mode is removed exactly by working
    in Jacobi relative coordinates (standard center-of-mass separation,
    independent of the normal-mode construction under test).  For scalar
    fields all site coordinates are kept.
    """
    n = model.sites
    hbar = model.hbar
    if model.kind == CHAIN:
        t_rel, masses = _jacobi_relative_coordinates(n, model.mass)
        # V = (kappa/2) sum (u_{i+1} - u_i)^2, u = T r
        diff = np.zeros((n, n))
        for i in range(n):
            diff[i, (i + 1) % n] = 1.0
            diff[i, i] -= 1.0
        k_full = model.spring * (diff.T @ diff)
        k_rel = t_rel.T @ k_full @ t_rel
        axis_masses = masses
        k_form = k_rel
        naxes = n - 1
    else:
        # canonical coordinates q = sqrt(a) phi: unit masses, K with w^2 spectrum
        k_form = model.coupling_matrix()
        axis_masses = np.ones(n)
        naxes = n

    dim = grid_points**naxes
    if dim > cap:
        raise GridCapError(f"tensor grid dimension {dim} exceeds cap {cap}")

    if half_width is None:
        # Balance position and momentum truncation: from the exact ground
        # covariances C_x = (hbar/2) M^-1/2 W^-1/2 M^-1/2 and
        # C_p = (hbar/2) M^1/2 W^1/2 M^1/2 (W = M^-1/2 K M^-1/2), choose
        # the box so that half_width/sigma_x equals k_max/sigma_k.
        m_half = np.sqrt(axis_masses)
        w_mat = k_form / np.outer(m_half, m_half)
        evals, evecs = np.linalg.eigh(w_mat)
        w_sqrt = (evecs * np.sqrt(np.maximum(evals, 0.0))) @ evecs.T
        w_isqrt = (evecs * (1.0 / np.sqrt(np.maximum(evals, 1e-300)))) @ evecs.T
        sigma_x = np.sqrt(np.max(np.diag(hbar / 2 * w_isqrt / np.outer(m_half, m_half))))
        sigma_k = np.sqrt(np.max(np.diag(0.5 / hbar * w_sqrt * np.outer(m_half, m_half))))
        half_width = float(np.sqrt(np.pi * grid_points * sigma_x / (2 * sigma_k)))

    kins, coords = [], []
    for ax in range(naxes):
        kin, c = _grid_axis_hamiltonian(grid_points, half_width, axis_masses[ax], hbar)
        kins.append(kin)
        coords.append(c)

    ham = np.zeros((dim, dim))
    eye_cache = {ax: np.eye(grid_points) for ax in range(naxes)}
    for ax in range(naxes):
        mats = [kins[ax] if a == ax else eye_cache[a] for a in range(naxes)]
        term = mats[0]
        for mat in mats[1:]:
            term = np.kron(term, mat)
        ham += term

    mesh = np.meshgrid(*coords, indexing="ij")
    v = np.zeros([grid_points] * naxes)
    for i in range(naxes):
        for j in range(naxes):
            if k_form[i, j] != 0.0:
                v = v + 0.5 * k_form[i, j] * mesh[i] * mesh[j]
    ham += np.diag(v.reshape(-1))

    evals = np.linalg.eigvalsh(ham)
    return evals[:levels]
