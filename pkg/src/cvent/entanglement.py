"""PPT invariants, logarithmic negativity and the closed-form steady state.

E_N is ``max(0, -log2 nu_minus)`` where ``nu_minus`` is the smaller
symplectic eigenvalue of the partially transposed covariance matrix. The
partial transpose is never formed explicitly: it only flips the sign of
``det sigma_AB`` inside the local symplectic invariant ``Delta``.
"""
from dataclasses import asdict, dataclass
import math

import numpy as np

from .core import as_covariance
from .errors import NumericError, SingularParameterError, StabilityError
from .potentials import check_stability

RADICAND_TOL = 1e-12
SEPARABLE_TOL = 1e-10


@dataclass(frozen=True)
class PptInvariants:
    det_a: float
    det_b: float
    det_ab: float
    delta: float
    delta_tilde: float
    det_sigma: float


@dataclass(frozen=True)
class EntanglementReport:
    nu_minus: float
    nu_plus: float
    e_n: float
    ppt_satisfied: bool
    entangled: bool

    def as_record(self):
        return asdict(self)


def _det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def ppt_invariants(sigma):
    sigma = as_covariance(sigma)
    det_a = _det2(sigma[:2, :2])
    det_b = _det2(sigma[2:, 2:])
    det_ab = _det2(sigma[:2, 2:])
    return PptInvariants(
        det_a=det_a,
        det_b=det_b,
        det_ab=det_ab,
        delta=det_a + det_b + 2 * det_ab,
        delta_tilde=det_a + det_b - 2 * det_ab,
        det_sigma=float(np.linalg.det(sigma)),
    )


def partial_transpose_eigenvalues(delta_tilde, det_sigma):
    """``(nu_minus, nu_plus)`` from ``nu^2 = (Dt -+ sqrt(Dt^2 - 4 det)) / 2``."""
    radicand = delta_tilde**2 - 4 * det_sigma
    if radicand < -RADICAND_TOL:
        raise NumericError(f"negative radicand {radicand:.3e}: covariance matrix is corrupted")
    root = math.sqrt(max(radicand, 0.0))
    nu_minus_sq = 0.5 * (delta_tilde - root)
    nu_plus_sq = 0.5 * (delta_tilde + root)
    if nu_minus_sq < 0:
        raise NumericError(f"negative partial-transpose eigenvalue {nu_minus_sq:.3e}")
    return math.sqrt(nu_minus_sq), math.sqrt(nu_plus_sq)


def _report(nu_minus, nu_plus):
    entangled = nu_minus < 1.0 - SEPARABLE_TOL
    e_n = -math.log2(nu_minus) if entangled else 0.0
    return EntanglementReport(nu_minus, nu_plus, e_n, not entangled, entangled)


def log_negativity(sigma):
    inv = ppt_invariants(sigma)
    return _report(*partial_transpose_eigenvalues(inv.delta_tilde, inv.det_sigma))


def _steady_state_denominator(alpha_tilde, noise):
    if check_stability(alpha_tilde) == "unstable":
        raise StabilityError(f"alpha_tilde = {alpha_tilde} is below -1/2")
    if noise.kappa_tilde <= 0:
        raise SingularParameterError("closed-form steady state requires kappa_tilde > 0")
    den = 8 * alpha_tilde + noise.kappa_tilde**2 + 4
    if den == 0:
        raise SingularParameterError("8 alpha + kappa^2 + 4 vanishes")
    return den


def steady_state_closed_form(alpha_tilde, noise):
    """Assemble the analytic steady-state covariance matrix."""
    a = float(alpha_tilde)
    k = noise.kappa_tilde
    den = _steady_state_denominator(a, noise)
    f = (2 * noise.n_th + 1) / den
    s11 = (6 * a + k * k + 4) * f
    s22 = (4 * a * a + 10 * a + k * k + 4) * f
    s12 = -a * k * f
    s14 = a * k * f
    s13 = 2 * a * f
    s24 = -2 * a * (2 * a + 1) * f
    return np.array(
        [
            [s11, s12, s13, s14],
            [s12, s22, s14, s24],
            [s13, s14, s11, s12],
            [s14, s24, s12, s22],
        ]
    )


@dataclass(frozen=True)
class SteadyStateInvariants:
    lam: float
    lam_minus_one: float
    delta_tilde: float
    det_sigma: float


def steady_state_invariants(alpha_tilde, noise):
    """``Lambda``, ``Delta~`` and ``det sigma`` of the steady state.

    ``Lambda - 1 = 4 alpha^2 / den`` is kept separately so that weak
    couplings do not lose it to cancellation.
    """
    a = float(alpha_tilde)
    den = _steady_state_denominator(a, noise)
    lam_m1 = 4 * a * a / den
    lam = 1.0 + lam_m1
    scale = (2 * noise.n_th + 1) ** 2
    return SteadyStateInvariants(lam, lam_m1, 2 * lam * scale, lam * scale * scale)


def steady_state_minus_log_nu(alpha_tilde, noise):
    """``-ln nu_minus`` of the steady state, unclamped and accurate for weak coupling."""
    inv = steady_state_invariants(alpha_tilde, noise)
    if inv.lam_minus_one < -RADICAND_TOL:
        raise NumericError(f"Lambda < 1 ({inv.lam})")
    lm1 = max(inv.lam_minus_one, 0.0)
    # Lambda - sqrt((Lambda-1) Lambda) = 1 + [(Lambda-1) - sqrt((Lambda-1) Lambda)]
    log_nu_sq = math.log1p(lm1 - math.sqrt(lm1 * inv.lam))
    return -(math.log(2 * noise.n_th + 1) + 0.5 * log_nu_sq)


def steady_state_nu_minus(alpha_tilde, noise):
    return math.exp(-steady_state_minus_log_nu(alpha_tilde, noise))


def steady_state_log_negativity(alpha_tilde, noise):
    """E_N of the steady state via ``Lambda`` (log base 2)."""
    x = steady_state_minus_log_nu(alpha_tilde, noise)
    if x <= -math.log1p(-SEPARABLE_TOL):
        return 0.0
    return x / math.log(2)
