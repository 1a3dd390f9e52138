"""Propagation of relative covariance-element errors into the E_N uncertainty.

Each independent element ``sigma_k`` is assumed known up to a relative
error ``eps_k`` (``sigma_k -> sigma_k (1 + eps_k)``, mirrored onto the
transposed entry), and

    delta_E_N = sqrt(sum_k (dE_N/deps_k * eps_k)^2).

The partials are central finite differences of E_N. For weak couplings the
two partial-transpose eigenvalues are nearly degenerate and E_N is tiny, so
E_N is evaluated in extended precision (mpmath) and the step is shrunk
until two successive step sizes agree.
"""
from dataclasses import dataclass, field, replace
import math

import mpmath
import numpy as np

from .core import as_covariance
from .entanglement import SEPARABLE_TOL, steady_state_closed_form
from .errors import CventError, NonDifferentiableError
from .potentials import check_stability

ELEMENTS = ("11", "12", "13", "14", "22", "23", "24", "33", "34", "44")

STEP = 1e-6
STEP_RATIO = 10.0
MIN_STEP = 1e-16
AGREEMENT = 1e-4
WORKING_DIGITS = 50
# -log2 nu below this counts as separable, matching the float pipeline.
_SEPARABLE_E_N = -math.log2(1.0 - SEPARABLE_TOL)


def _index(label):
    return int(label[0]) - 1, int(label[1]) - 1


def _minus_log2_nu(entries):
    """Unclamped ``-log2 nu_minus`` of a 4x4 nested list of mpf values."""
    s = entries
    det_a = s[0][0] * s[1][1] - s[0][1] * s[1][0]
    det_b = s[2][2] * s[3][3] - s[2][3] * s[3][2]
    det_ab = s[0][2] * s[1][3] - s[0][3] * s[1][2]
    delta_tilde = det_a + det_b - 2 * det_ab
    det_sigma = mpmath.det(mpmath.matrix(s))
    radicand = delta_tilde**2 - 4 * det_sigma
    if radicand < 0:
        radicand = mpmath.mpf(0)
    nu_sq = (delta_tilde - mpmath.sqrt(radicand)) / 2
    if nu_sq <= 0:
        return None
    return -mpmath.log(nu_sq) / (2 * mpmath.log(2))


class _Evaluator:
    def __init__(self, sigma):
        self.base = [[mpmath.mpf(float(v)) for v in row] for row in sigma]

    def __call__(self, label=None, h=0):
        s = [row[:] for row in self.base]
        if label is not None:
            i, j = _index(label)
            s[i][j] = s[i][j] * (1 + h)
            if i != j:
                s[j][i] = s[j][i] * (1 + h)
        return _minus_log2_nu(s)

    def central(self, label, h):
        """Central difference, or None if either side leaves the entangled region."""
        hp = mpmath.mpf(h)
        up, down = self(label, hp), self(label, -hp)
        if up is None or down is None or up <= 0 or down <= 0:
            return None
        return (up - down) / (2 * hp)


def _partial(evaluate, label, scale):
    i, j = _index(label)
    if evaluate.base[i][j] == 0:
        return 0.0
    h = STEP
    while h / STEP_RATIO >= MIN_STEP:
        coarse = evaluate.central(label, h)
        fine = evaluate.central(label, h / STEP_RATIO)
        if coarse is not None and fine is not None:
            if abs(coarse - fine) <= AGREEMENT * max(abs(fine), scale):
                return float(fine)
        h /= STEP_RATIO
    raise NonDifferentiableError(
        f"finite differences for element {label} did not converge down to step {MIN_STEP:g}"
    )


def log_negativity_precise(sigma):
    """E_N (log base 2) of ``sigma`` in extended precision."""
    with mpmath.workdps(WORKING_DIGITS):
        value = _Evaluator(as_covariance(sigma))()
    return 0.0 if value is None or value <= _SEPARABLE_E_N else float(value)


def partials(sigma_inf):
    """``{label: dE_N/deps_k}`` for the ten independent elements, at ``eps = 0``."""
    sigma_inf = as_covariance(sigma_inf)
    with mpmath.workdps(WORKING_DIGITS):
        evaluate = _Evaluator(sigma_inf)
        e_n = evaluate()
        if e_n is None or e_n <= _SEPARABLE_E_N:
            raise NonDifferentiableError("state is separable (E_N = 0); E_N is not differentiable here")
        # Absolute floor for comparing near-zero partials; well below any
        # partial that can matter next to the O(1) diagonal ones.
        scale = 1e-12
        return {k: _partial(evaluate, k, scale) for k in ELEMENTS}


@dataclass(frozen=True)
class ErrorBudget:
    """Relative precision per element and the resulting E_N uncertainty.

    ``per_element`` overrides ``epsilon`` for the listed labels; unlisted
    elements use ``epsilon``.
    """

    epsilon: float = 0.0
    per_element: dict = field(default_factory=dict)
    partials: dict = field(default_factory=dict)
    e_n: float = float("nan")
    delta_e_n: float = float("nan")
    relative_error: float = float("nan")

    def eps(self, label):
        return float(self.per_element.get(label, self.epsilon))


def propagate_error(sigma_inf, budget=None, precomputed=None):
    """Fill in ``partials``, ``e_n``, ``delta_e_n`` and ``relative_error``."""
    budget = budget or ErrorBudget()
    grads = precomputed if precomputed is not None else partials(sigma_inf)
    e_n = log_negativity_precise(sigma_inf)
    delta = math.sqrt(sum((grads[k] * budget.eps(k)) ** 2 for k in ELEMENTS))
    return replace(budget, partials=dict(grads), e_n=e_n, delta_e_n=delta, relative_error=delta / e_n)


@dataclass(frozen=True)
class PrecisionCell:
    alpha_tilde: float
    epsilon: float
    e_n: float
    delta_e_n: float
    relative_error: float
    flag: str

    CSV_HEADER = ("alpha_tilde", "epsilon", "e_n", "delta_e_n", "relative_error", "flag")

    def row(self):
        return (self.alpha_tilde, self.epsilon, self.e_n, self.delta_e_n, self.relative_error, self.flag)


def precision_map(alpha_range, epsilon_range, noise):
    """Relative error of the steady-state E_N on an ``alpha x epsilon`` grid.

    Flags: ``ok``; ``exceeds_unity`` when the relative error is above 1;
    ``separable`` when E_N = 0; ``unstable`` or ``error`` when the steady
    state or its partials cannot be computed. Cells are ordered with
    ``alpha`` as the slow index.
    """
    cells = []
    nan = float("nan")
    for alpha in alpha_range:
        alpha = float(alpha)
        flag, grads, sigma = None, None, None
        if check_stability(alpha) == "unstable":
            flag = "unstable"
        else:
            try:
                sigma = steady_state_closed_form(alpha, noise)
                grads = partials(sigma)
            except NonDifferentiableError:
                flag = "separable"
            except CventError:
                flag = "error"
        for eps in epsilon_range:
            eps = float(eps)
            if flag is not None:
                e_n = 0.0 if flag == "separable" else nan
                cells.append(PrecisionCell(alpha, eps, e_n, nan, nan, flag))
                continue
            b = propagate_error(sigma, ErrorBudget(epsilon=eps), precomputed=grads)
            cell_flag = "exceeds_unity" if b.relative_error > 1 else "ok"
            cells.append(PrecisionCell(alpha, eps, b.e_n, b.delta_e_n, b.relative_error, cell_flag))
    return cells


def as_grid(cells, n_alpha, n_eps):
    """Reshape a cell list into an ``(n_alpha, n_eps)`` array of relative errors."""
    return np.array([c.relative_error for c in cells]).reshape(n_alpha, n_eps)
