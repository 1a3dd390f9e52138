"""Closed and open (Markovian) evolution of two-mode covariance matrices."""
from dataclasses import dataclass
import math

import numpy as np

from .core import OMEGA, as_covariance, make_hamiltonian, symmetrize
from .errors import InvalidParameterError, NoSteadyStateError, StabilityError
from .linalg import expm, is_hurwitz, rk4_lyapunov, solve_lyapunov
from .potentials import check_stability

RK4_STEP = 1e-3


@dataclass(frozen=True)
class NoiseModel:
    """Rescaled damping rate ``kappa/omega_m`` and thermal phonon number."""

    kappa_tilde: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        for name in ("kappa_tilde", "n_th"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class SymplecticPropagator:
    s_matrix: np.ndarray
    tau: float


@dataclass(frozen=True)
class DriftDiffusion:
    a_matrix: np.ndarray
    d_matrix: np.ndarray


def _as_hamiltonian(h):
    return make_hamiltonian(h) if isinstance(h, (int, float)) else h


def _check_tau(tau):
    tau = float(tau)
    if not (math.isfinite(tau) and tau >= 0):
        raise InvalidParameterError(f"tau must be finite and >= 0, got {tau!r}")
    return tau


def _require_stable(h, allow_unstable):
    if not allow_unstable and check_stability(h.alpha_tilde) == "unstable":
        raise StabilityError(
            f"alpha_tilde = {h.alpha_tilde} is below -1/2: the Hamiltonian is unbounded from below"
        )


def propagator(h, tau):
    """``S = exp(Omega H tau)``."""
    h = _as_hamiltonian(h)
    tau = _check_tau(tau)
    return SymplecticPropagator(expm(OMEGA @ h.h_matrix * tau), tau)


def evolve_closed(sigma0, h, tau, allow_unstable=False):
    """Unitary evolution ``S sigma0 S^T``, re-symmetrized."""
    h = _as_hamiltonian(h)
    sigma0 = as_covariance(sigma0)
    _require_stable(h, allow_unstable)
    s = propagator(h, tau).s_matrix
    return symmetrize(s @ sigma0 @ s.T)


def drift_diffusion(h, noise):
    h = _as_hamiltonian(h)
    a = OMEGA @ h.h_matrix - 0.5 * noise.kappa_tilde * np.eye(4)
    d = (2 * noise.n_th + 1) * noise.kappa_tilde * np.eye(4)
    return DriftDiffusion(a, d)


def evolve_open(sigma0, h, noise, tau, allow_unstable=False):
    """Solve ``dsigma/dtau = A sigma + sigma A^T + D`` up to ``tau``.

    For Hurwitz ``A`` the exact form
    ``e^{A tau} (sigma0 - sigma_inf) e^{A^T tau} + sigma_inf`` is used. Without
    damping ``D`` vanishes and the evolution is ``e^{A tau} sigma0 e^{A^T tau}``.
    Anything else (damped but unstable, reachable only with
    ``allow_unstable``) falls back to fixed-step RK4.
    """
    h = _as_hamiltonian(h)
    sigma0 = as_covariance(sigma0)
    tau = _check_tau(tau)
    _require_stable(h, allow_unstable)
    dd = drift_diffusion(h, noise)
    a, d = dd.a_matrix, dd.d_matrix
    if noise.kappa_tilde == 0:
        e = expm(a * tau)
        return symmetrize(e @ sigma0 @ e.T)
    if is_hurwitz(a):
        sigma_inf = solve_lyapunov(a, d)
        e = expm(a * tau)
        return symmetrize(e @ (sigma0 - sigma_inf) @ e.T + sigma_inf)
    return symmetrize(rk4_lyapunov(a, d, sigma0, tau, RK4_STEP))


def trajectory(sigma0, h, noise, taus, allow_unstable=False):
    """Evaluate the evolution at each requested time; returns ``[(tau, sigma), ...]``."""
    if noise is None or noise.kappa_tilde == 0:
        return [(float(t), evolve_closed(sigma0, h, t, allow_unstable)) for t in taus]
    return [(float(t), evolve_open(sigma0, h, noise, t, allow_unstable)) for t in taus]


def steady_state_numeric(h, noise):
    """Steady state from the Kronecker-vectorized Lyapunov equation."""
    h = _as_hamiltonian(h)
    if check_stability(h.alpha_tilde) == "unstable":
        raise StabilityError(f"alpha_tilde = {h.alpha_tilde} is below -1/2")
    if noise.kappa_tilde <= 0:
        raise NoSteadyStateError("steady state requires kappa_tilde > 0")
    dd = drift_diffusion(h, noise)
    return solve_lyapunov(dd.a_matrix, dd.d_matrix)
