"""Covariance-matrix data model for two harmonically trapped oscillators.

Conventions used throughout the package:

* quadratures are ordered ``(x1, p1, x2, p2)`` and are dimensionless; the
  physical operators are ``x = sqrt(hbar / (m omega_m)) x'`` and
  ``p = sqrt(hbar m omega_m) p'`` (recorded in :data:`POSITION_SCALE` and
  :data:`MOMENTUM_SCALE` for reference, never used at runtime),
* the vacuum covariance matrix is the 4x4 identity,
* both oscillators share the same mass and trap frequency.

Covariance matrices are plain ``(4, 4)`` float arrays. Functions in this
package never modify their inputs.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

ORDERING = ("x1", "p1", "x2", "p2")
POSITION_SCALE = "sqrt(hbar/(m*omega_m))"
MOMENTUM_SCALE = "sqrt(hbar*m*omega_m)"

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9

_omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.kron(np.eye(2), _omega)
OMEGA.setflags(write=False)

# H_I^(1) puts alpha on both x-x diagonals, H_I^(2) couples x1 and x2.
H_INTERACTION_LOCAL = np.diag([1.0, 0.0, 1.0, 0.0])
H_INTERACTION_CROSS = np.zeros((4, 4))
H_INTERACTION_CROSS[0, 2] = H_INTERACTION_CROSS[2, 0] = 1.0
for _m in (H_INTERACTION_LOCAL, H_INTERACTION_CROSS):
    _m.setflags(write=False)


def symplectic_form(n_modes=2):
    """Return the block-diagonal symplectic form for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), _omega)


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Dimensionless Hamiltonian matrix ``H = I + a*H_I1 - a*H_I2``."""

    alpha_tilde: float
    h_matrix: np.ndarray

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.h_matrix)


def _finite(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return value


def make_hamiltonian(alpha_tilde):
    alpha_tilde = _finite(alpha_tilde, "alpha_tilde")
    h = np.eye(4) + alpha_tilde * H_INTERACTION_LOCAL - alpha_tilde * H_INTERACTION_CROSS
    return QuadraticHamiltonian(alpha_tilde, h)


def squeezed_state(z):
    """Product state ``diag(z, 1/z, 1/z, z)``; ``z = 1`` is the vacuum."""
    z = _finite(z, "z")
    if z <= 0:
        raise InvalidParameterError(f"squeezing z must be positive, got {z}")
    return np.diag([z, 1.0 / z, 1.0 / z, z])


def vacuum():
    return np.eye(4)


def as_covariance(sigma):
    """Validate shape and symmetry, returning a float copy."""
    sigma = np.array(sigma, dtype=float)
    if sigma.shape != (4, 4):
        raise InvalidInputError(f"covariance matrix must be 4x4, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise InvalidInputError("covariance matrix has non-finite entries")
    asym = np.max(np.abs(sigma - sigma.T))
    if asym > SYMMETRY_TOL * max(1.0, np.max(np.abs(sigma))):
        raise InvalidInputError(f"covariance matrix is not symmetric (max |s - s^T| = {asym:.3e})")
    return sigma


def symmetrize(m):
    return 0.5 * (m + m.T)


def symplectic_eigenvalues(sigma):
    """Symplectic eigenvalues of ``sigma`` in ascending order.

    Computed as the moduli of the eigenvalues of ``i*Omega*sigma``, which
    come in +/- pairs.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ sigma))
    return np.sort(ev)[::2]


@dataclass(frozen=True)
class Physicality:
    physical: bool
    reason: str = ""
    value: float = float("nan")

    def __bool__(self):
        return self.physical


def check_physicality(sigma, tol=PHYSICALITY_TOL):
    """Check ``sigma + i*Omega >= 0``.

    Asymmetric input raises :class:`InvalidInputError`; a symmetric but
    unphysical matrix returns a falsy :class:`Physicality` naming the
    violated quantity.
    """
    sigma = as_covariance(sigma)
    min_eig = float(np.min(np.linalg.eigvalsh(sigma)))
    if min_eig <= 0:
        return Physicality(False, "sigma is not positive definite (min eigenvalue)", min_eig)
    nu_min = float(symplectic_eigenvalues(sigma)[0])
    if nu_min < 1.0 - tol:
        return Physicality(False, "symplectic eigenvalue below 1 (nu_minus)", nu_min)
    return Physicality(True, "", nu_min)


def to_row_major(sigma):
    """Serialize to ``{"ordering": [...], "values": [16 floats]}``."""
    return {"ordering": list(ORDERING), "values": [float(v) for v in np.asarray(sigma).ravel()]}


def from_row_major(data):
    if list(data.get("ordering", ORDERING)) != list(ORDERING):
        raise InvalidInputError(f"unsupported quadrature ordering {data.get('ordering')!r}")
    values = data["values"]
    if len(values) != 16:
        raise InvalidInputError(f"expected 16 values, got {len(values)}")
    return as_covariance(np.reshape(np.asarray(values, dtype=float), (4, 4)))


def element_labels():
    """Labels ``"11", "12", ...`` (1-based) for the 16 entries in row-major order."""
    return [f"{i + 1}{j + 1}" for i in range(4) for j in range(4)]
