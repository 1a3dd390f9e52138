"""Central potentials ``alpha / |r1 - r2|^n`` and the dimensionless coupling.

Two formulas for the coupling are exposed. :func:`coupling_generic` keeps
the ``n(n+1)`` prefactor from the quadratic term of the Taylor expansion.
:func:`coupling_coulomb` and :func:`coupling_newtonian` are the specialized
forms used for the Coulomb and Newtonian tables; they omit that prefactor,
so at ``n = 1`` they are exactly half of the generic value. Use the
specialized forms to reproduce the reference couplings (-0.231, -6.67e-8).
"""
from dataclasses import dataclass
import math

from .errors import InvalidParameterError

# CODATA 2018, pinned for bit-reproducible output.
EPSILON_0 = 8.8541878128e-12  # F/m
G = 6.67430e-11  # m^3 kg^-1 s^-2
E_CHARGE = 1.602176634e-19  # C (exact)

STABILITY_BOUND = -0.5
STABILITY_TOL = 1e-12

KINDS = ("generic", "coulomb", "newtonian")


@dataclass(frozen=True)
class PotentialSpec:
    """Physical scenario in SI units. ``n`` is forced to 1 for Coulomb/Newtonian."""

    kind: str
    m: float
    omega_m: float
    r: float
    n: int = 1
    alpha: float = 0.0
    q1: float = 0.0
    q2: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("m", "omega_m", "r"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"n must be an integer >= 1, got {self.n!r}")
        if self.kind != "generic" and self.n != 1:
            raise InvalidParameterError(f"{self.kind} potential has n = 1, got {self.n}")
        for name in ("alpha", "q1", "q2"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")


@dataclass(frozen=True)
class TaylorCoefficients:
    c0: float
    c1: float
    c2: float

    def __call__(self, dx):
        return self.c0 + self.c1 * dx + self.c2 * dx * dx


def taylor_expand(n, r):
    """Second-order expansion of ``1/(r - dx)^n`` around ``dx = 0``."""
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"n must be an integer >= 1, got {n!r}")
    if not (math.isfinite(r) and r > 0):
        raise InvalidParameterError(f"r must be positive, got {r!r}")
    n = int(n)
    return TaylorCoefficients(r**-n, n * r ** -(n + 1), n * (n + 1) / 2 * r ** -(n + 2))


def coupling_generic(spec):
    """``alpha * n(n+1) / (omega_m^2 m r^(n+2))``."""
    n = int(spec.n)
    return spec.alpha * n * (n + 1) / (spec.omega_m**2 * spec.m * spec.r ** (n + 2))


def coupling_coulomb(spec):
    """``q1 q2 / (4 pi eps0 r^3 m omega_m^2)``; negative for opposite charges."""
    return spec.q1 * spec.q2 / (4 * math.pi * EPSILON_0 * spec.r**3 * spec.m * spec.omega_m**2)


def coupling_newtonian(spec):
    """``-G m / (r^3 omega_m^2)``, always attractive."""
    return -G * spec.m / (spec.r**3 * spec.omega_m**2)


def generic_equivalent(spec):
    """Rewrite a Coulomb or Newtonian spec as ``kind="generic"`` with ``n = 1``.

    ``coupling_generic`` of the result is exactly twice the specialized coupling.
    """
    if spec.kind == "coulomb":
        alpha = spec.q1 * spec.q2 / (4 * math.pi * EPSILON_0)
    elif spec.kind == "newtonian":
        alpha = -G * spec.m**2
    else:
        return spec
    return PotentialSpec("generic", spec.m, spec.omega_m, spec.r, n=1, alpha=alpha)


def coupling(spec):
    """Dispatch on ``spec.kind``."""
    return {"generic": coupling_generic, "coulomb": coupling_coulomb, "newtonian": coupling_newtonian}[
        spec.kind
    ](spec)


def check_stability(alpha_tilde, tol=STABILITY_TOL):
    """Classify as ``"stable"``, ``"marginal"`` or ``"unstable"``.

    The Hamiltonian matrix has eigenvalues ``{1, 1, 1, 1 + 2 alpha_tilde}``,
    so it is bounded from below iff ``alpha_tilde > -1/2``.
    """
    alpha_tilde = float(alpha_tilde)
    if not math.isfinite(alpha_tilde):
        raise InvalidParameterError(f"alpha_tilde must be finite, got {alpha_tilde!r}")
    if abs(alpha_tilde - STABILITY_BOUND) <= tol:
        return "marginal"
    return "stable" if alpha_tilde > STABILITY_BOUND else "unstable"
