"""Small dense linear-algebra kernels: matrix exponential and Lyapunov solve."""
import math

import numpy as np

from .errors import NoSteadyStateError, NumericError

# Coefficients of the [13/13] Pade approximant to exp (Higham 2005).
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152
_MAX_SQUARINGS = 64


def expm(a):
    """Matrix exponential by scaling and squaring with a fixed [13/13] Pade step.

    The approximant degree never changes with the norm of ``a``; only the
    number of squarings does. This keeps results reproducible across
    platforms at a cost that is irrelevant for 4x4 inputs.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    if not math.isfinite(norm):
        raise NumericError("matrix exponential of a non-finite matrix")
    if norm == 0:
        return np.eye(n)
    s = int(math.ceil(math.log2(norm / _THETA13))) if norm > _THETA13 else 0
    if s > _MAX_SQUARINGS:
        raise NumericError(f"matrix exponential needs {s} squarings (norm {norm:.3e})")
    a = a / 2.0**s

    b = _PADE13
    ident = np.eye(n)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    if not np.all(np.isfinite(r)):
        raise NumericError("matrix exponential overflowed")
    return r


def is_hurwitz(a, tol=0.0):
    return bool(np.max(np.linalg.eigvals(a).real) < -tol)


def solve_lyapunov(a, d):
    """Solve ``A X + X A^T + D = 0`` by Kronecker-sum vectorization.

    With row-major ``vec``, ``vec(A X) = (A kron I) vec(X)`` and
    ``vec(X A^T) = (I kron A) vec(X)``.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    n = a.shape[0]
    if not is_hurwitz(a):
        raise NoSteadyStateError("drift matrix is not Hurwitz; no unique steady state")
    ident = np.eye(n)
    k = np.kron(a, ident) + np.kron(ident, a)
    try:
        x = np.linalg.solve(k, -d.ravel())
    except np.linalg.LinAlgError as exc:
        raise NoSteadyStateError("singular Kronecker system") from exc
    x = x.reshape(n, n)
    return 0.5 * (x + x.T)


def lyapunov_residual(a, x, d):
    return float(np.linalg.norm(a @ x + x @ a.T + d))


def rk4_lyapunov(a, d, x0, tau, step=1e-3):
    """Integrate ``dX/dt = A X + X A^T + D`` with fixed-step RK4."""
    if tau == 0:
        return np.array(x0, dtype=float)
    n_steps = int(math.ceil(tau / step))
    if n_steps <= 0 or tau / n_steps == 0.0:
        raise NumericError("RK4 step size underflow")
    h = tau / n_steps

    def f(x):
        return a @ x + x @ a.T + d

    x = np.array(x0, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n_steps):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise NumericError("RK4 integration diverged")
    return x
