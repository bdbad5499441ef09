"""Wavefunctionals over lattice field configurations, factorized over
normal modes.

Every mode is a unit-mass oscillator H = P^2/2 + w^2 Q^2/2 (see
lattice.py for the canonical scaling), so per-mode states evolve in
closed form:

* Gaussian modes  psi ~ exp(-Omega (Q-q)^2 / 2 hbar + i p (Q-q)/hbar + i theta):
  the complex width follows the Riccati flow dOmega/dt = -i(Omega^2 - w^2),
  solved by the Moebius map

      Omega(t) = w (Omega0 cos wt + i w sin wt) / (w cos wt + i Omega0 sin wt),

  the center (q, p) follows the classical equations, and the phase picks
  up the classical action plus the width half-trace,

      theta(t) = theta0 + S_cl/hbar - (1/2) Im log[D(t)/D(0)],
      D(t) = w cos wt + i Omega0 sin wt,  S_cl = (p q - p0 q0)/2,

  with the log taken on the continuous branch
  log D = i w t + log((w+Omega0)/2) + log1p(r e^{-2 i w t}),
  r = (w-Omega0)/(w+Omega0), |r| < 1 whenever Re Omega0 > 0.

* Hermite modes  psi = sum_n c_n phi_n(Q) e^{-i w (n+1/2) t}: exact
  eigenbasis phases; values and derivatives from the recurrences
  phi_{n+1} = xi sqrt(2/(n+1)) phi_n - sqrt(n/(n+1)) phi_{n-1} and
  phi_n' = sqrt(w/hbar) (sqrt(n/2) phi_{n-1} - sqrt((n+1)/2) phi_{n+1}).

The ground state has Omega_k = w_k, alpha_k = 0 and is real up to the
global phase; a chain's zero mode is frozen (classical free coordinate,
excluded from the functional).
"""
from __future__ import annotations

import numpy as np

from .errors import NonNormalizableError, ZeroModeError
from .lattice import LatticeModel, ModeBasis


def riccati_width(omega: float, width0: complex, t: float) -> complex:
    c, s = np.cos(omega * t), np.sin(omega * t)
    return omega * (width0 * c + 1j * omega * s) / (omega * c + 1j * width0 * s)


def _log_d(omega: float, width0: complex, t: float) -> complex:
    """Continuous-branch log of D(t) = w cos wt + i Omega0 sin wt."""
    r = (omega - width0) / (omega + width0)
    return (1j * omega * t + np.log((omega + width0) / 2)
            + np.log1p(r * np.exp(-2j * omega * t)))


class GaussianMode:
    """Normalized Gaussian oscillator state with exact evolution."""

    def __init__(self, omega: float, width: complex, q: float = 0.0,
                 p: float = 0.0, theta: float = 0.0, hbar: float = 1.0):
        if omega <= 0:
            raise ZeroModeError("Gaussian modes need a positive frequency")
        if width.real <= 0:
            raise NonNormalizableError(f"Re Omega must be positive, got {width}")
        self.omega = float(omega)
        self.width = complex(width)
        self.q = float(q)
        self.p = float(p)
        self.theta = float(theta)
        self.hbar = float(hbar)

    @classmethod
    def ground(cls, omega: float, hbar: float = 1.0) -> "GaussianMode":
        return cls(omega, omega, hbar=hbar)

    @classmethod
    def coherent(cls, omega: float, alpha: complex, hbar: float = 1.0) -> "GaussianMode":
        q = np.sqrt(2 * hbar / omega) * alpha.real
        p = np.sqrt(2 * hbar * omega) * alpha.imag
        return cls(omega, omega, q, p, hbar=hbar)

    @property
    def alpha(self) -> complex:
        return np.sqrt(self.omega / (2 * self.hbar)) * (self.q + 1j * self.p / self.omega)

    def evolve(self, t: float) -> "GaussianMode":
        w, hbar = self.omega, self.hbar
        c, s = np.cos(w * t), np.sin(w * t)
        q_new = self.q * c + (self.p / w) * s
        p_new = self.p * c - w * self.q * s
        width_new = riccati_width(w, self.width, t)
        action = 0.5 * (p_new * q_new - self.p * self.q)
        dlog = _log_d(w, self.width, t) - _log_d(w, self.width, 0.0)
        theta_new = self.theta + action / hbar - 0.5 * dlog.imag
        return GaussianMode(w, width_new, q_new, p_new, theta_new, hbar)

    def value(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=float)
        norm = (self.width.real / (np.pi * self.hbar)) ** 0.25
        dq = qs - self.q
        return norm * np.exp(-self.width * dq**2 / (2 * self.hbar)
                             + 1j * self.p * dq / self.hbar + 1j * self.theta)

    def dlog(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=float)
        return (-self.width * (qs - self.q) + 1j * self.p) / self.hbar

    def mean_var(self) -> tuple[float, float]:
        return self.q, self.hbar / (2 * self.width.real)

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        mean, var = self.mean_var()
        return rng.normal(mean, np.sqrt(var), size=m)

    def is_stationary(self) -> bool:
        return (abs(self.width - self.omega) < 1e-12 * self.omega
                and self.q == 0.0 and self.p == 0.0)


def hermite_rows(omega: float, nmax: int, qs: np.ndarray,
                 hbar: float = 1.0) -> np.ndarray:
    """Normalized oscillator eigenfunctions phi_0..phi_nmax at qs."""
    xi = np.sqrt(omega / hbar) * np.asarray(qs, dtype=float)
    rows = np.empty((nmax + 1,) + xi.shape)
    rows[0] = (omega / (np.pi * hbar)) ** 0.25 * np.exp(-xi**2 / 2)
    if nmax >= 1:
        rows[1] = np.sqrt(2.0) * xi * rows[0]
    for n in range(1, nmax):
        rows[n + 1] = (xi * np.sqrt(2.0 / (n + 1)) * rows[n]
                       - np.sqrt(n / (n + 1.0)) * rows[n - 1])
    return rows


class HermiteMode:
    """Finite superposition of oscillator eigenstates of one mode."""

    def __init__(self, omega: float, coefficients, time_phases=None,
                 hbar: float = 1.0):
        if omega <= 0:
            raise ZeroModeError("Hermite modes need a positive frequency")
        coeff = np.asarray(coefficients, dtype=np.complex128)
        norm = np.sqrt(np.sum(np.abs(coeff) ** 2))
        if norm == 0:
            raise ValueError("at least one coefficient must be nonzero")
        self.omega = float(omega)
        self.coeff = coeff / norm
        self.hbar = float(hbar)

    @property
    def nmax(self) -> int:
        return self.coeff.size - 1

    def evolve(self, t: float) -> "HermiteMode":
        n = np.arange(self.coeff.size)
        phases = np.exp(-1j * self.omega * (n + 0.5) * t)
        return HermiteMode(self.omega, self.coeff * phases, hbar=self.hbar)

    def value(self, qs: np.ndarray) -> np.ndarray:
        rows = hermite_rows(self.omega, self.nmax, qs, self.hbar)
        return np.tensordot(self.coeff, rows, axes=(0, 0))

    def derivative(self, qs: np.ndarray) -> np.ndarray:
        rows = hermite_rows(self.omega, self.nmax + 1, qs, self.hbar)
        scale = np.sqrt(self.omega / self.hbar)
        out = np.zeros(rows.shape[1:], dtype=np.complex128)
        for n, c in enumerate(self.coeff):
            term = -np.sqrt((n + 1) / 2.0) * rows[n + 1]
            if n >= 1:
                term = term + np.sqrt(n / 2.0) * rows[n - 1]
            out = out + c * scale * term
        return out

    def dlog(self, qs: np.ndarray) -> np.ndarray:
        val = self.value(qs)
        return self.derivative(qs) / val

    def _quadrature(self, npts: int = 4096):
        span = np.sqrt(self.hbar / self.omega) * (6.0 + 2.0 * np.sqrt(self.nmax + 1.0))
        qs = np.linspace(-span, span, npts)
        rho = np.abs(self.value(qs)) ** 2
        return qs, rho / np.trapezoid(rho, qs)

    def mean_var(self) -> tuple[float, float]:
        qs, rho = self._quadrature()
        mean = np.trapezoid(qs * rho, qs)
        var = np.trapezoid((qs - mean) ** 2 * rho, qs)
        return float(mean), float(var)

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        qs, rho = self._quadrature()
        cdf = np.cumsum(rho)
        cdf = cdf / cdf[-1]
        u = rng.random(m)
        return np.interp(u, cdf, qs)

    def is_stationary(self) -> bool:
        return int(np.sum(np.abs(self.coeff) > 1e-14)) == 1


class FrozenMode:
    """Zero-frequency (classical) coordinate: no functional weight, no
    velocity; held at a fixed value."""

    omega = 0.0

    def __init__(self, hbar: float = 1.0):
        self.hbar = hbar

    def evolve(self, t: float) -> "FrozenMode":
        return self

    def value(self, qs):
        return np.ones_like(np.asarray(qs, dtype=float), dtype=np.complex128)

    def dlog(self, qs):
        return np.zeros_like(np.asarray(qs, dtype=float), dtype=np.complex128)

    def mean_var(self):
        return 0.0, 0.0

    def sample(self, rng, m):
        return np.zeros(m)

    def is_stationary(self) -> bool:
        return True


class ProductWavefunctional:
    """Product over mode-basis rows of per-mode states."""

    def __init__(self, model: LatticeModel, modes: list, time: float = 0.0,
                 basis: ModeBasis | None = None):
        self.model = model
        self.basis = basis or ModeBasis(model)
        if len(modes) != self.basis.size:
            raise ValueError("need one mode state per basis row")
        self.modes = list(modes)
        self.time = float(time)

    @classmethod
    def ground(cls, model: LatticeModel, basis: ModeBasis | None = None):
        basis = basis or ModeBasis(model)
        modes = [FrozenMode(model.hbar) if zero else GaussianMode.ground(w, model.hbar)
                 for w, zero in zip(basis.frequencies, basis.zero_rows)]
        return cls(model, modes, 0.0, basis)

    @classmethod
    def coherent(cls, model: LatticeModel, shifts: dict,
                 basis: ModeBasis | None = None):
        """Coherent state with alpha values given per basis row index."""
        basis = basis or ModeBasis(model)
        modes = []
        for row, (w, zero) in enumerate(zip(basis.frequencies, basis.zero_rows)):
            if zero:
                if row in shifts:
                    raise ZeroModeError("cannot displace the frozen zero mode")
                modes.append(FrozenMode(model.hbar))
            elif row in shifts:
                modes.append(GaussianMode.coherent(w, complex(shifts[row]), model.hbar))
            else:
                modes.append(GaussianMode.ground(w, model.hbar))
        return cls(model, modes, 0.0, basis)

    def evolve(self, t: float) -> "ProductWavefunctional":
        return ProductWavefunctional(
            self.model, [m.evolve(t) for m in self.modes], self.time + t, self.basis
        )

    def mode_values(self, q: np.ndarray) -> np.ndarray:
        """Per-mode amplitudes at mode coordinates q (..., nmodes)."""
        q = np.asarray(q, dtype=float)
        out = np.empty(q.shape, dtype=np.complex128)
        for i, mode in enumerate(self.modes):
            out[..., i] = mode.value(q[..., i])
        return out

    def mode_dlogs(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        out = np.empty(q.shape, dtype=np.complex128)
        for i, mode in enumerate(self.modes):
            out[..., i] = mode.dlog(q[..., i])
        return out

    def amplitude(self, q: np.ndarray) -> np.ndarray:
        return np.prod(self.mode_values(q), axis=-1)

    def is_stationary(self) -> bool:
        return all(m.is_stationary() for m in self.modes)

    def sample_modes(self, rng: np.random.Generator, m: int) -> np.ndarray:
        """M draws of mode-coordinate vectors from the product density."""
        cols = [mode.sample(rng, m) for mode in self.modes]
        return np.stack(cols, axis=1)

    def mode_moments(self) -> tuple[np.ndarray, np.ndarray]:
        stats = [mode.mean_var() for mode in self.modes]
        means = np.array([s[0] for s in stats])
        variances = np.array([s[1] for s in stats])
        return means, variances


class GaussianWavefunctional(ProductWavefunctional):
    """Product of Gaussian modes with array views of the widths Omega_k,
    coherent shifts alpha_k, and the accumulated global phase."""

    @property
    def widths(self) -> np.ndarray:
        return np.array([np.nan if isinstance(m, FrozenMode) else m.width
                         for m in self.modes], dtype=np.complex128)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([0j if isinstance(m, FrozenMode) else m.alpha
                         for m in self.modes], dtype=np.complex128)

    @property
    def phase(self) -> float:
        return float(sum(m.theta for m in self.modes if isinstance(m, GaussianMode)))

    @classmethod
    def from_arrays(cls, model: LatticeModel, widths=None, alphas=None,
                    basis: ModeBasis | None = None) -> "GaussianWavefunctional":
        basis = basis or ModeBasis(model)
        modes = []
        for row, (w, zero) in enumerate(zip(basis.frequencies, basis.zero_rows)):
            if zero:
                modes.append(FrozenMode(model.hbar))
                continue
            width = w if widths is None else complex(np.asarray(widths)[row])
            mode = GaussianMode(w, width, hbar=model.hbar)
            if alphas is not None:
                alpha = complex(np.asarray(alphas)[row])
                mode = GaussianMode(
                    w, width,
                    q=np.sqrt(2 * model.hbar / w) * alpha.real,
                    p=np.sqrt(2 * model.hbar * w) * alpha.imag,
                    hbar=model.hbar,
                )
            modes.append(mode)
        return cls(model, modes, 0.0, basis)

    def evolve(self, t: float) -> "GaussianWavefunctional":
        return GaussianWavefunctional(
            self.model, [m.evolve(t) for m in self.modes], self.time + t, self.basis
        )


def evolve_gaussian(psi: GaussianWavefunctional, t: float) -> GaussianWavefunctional:
    """Closed-form evolution of a Gaussian wavefunctional by time t."""
    return psi.evolve(t)
