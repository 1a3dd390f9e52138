import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvent.core import squeezed_state
from cvent.dynamics import NoiseModel
from cvent.entanglement import log_negativity, steady_state_closed_form, steady_state_log_negativity
from cvent import metrology
from cvent.metrology import (
    ELEMENTS,
    ErrorBudget,
    log_negativity_precise,
    partials,
    precision_map,
    propagate_error,
)
from cvent.errors import NonDifferentiableError

from conftest import two_mode_squeezed

INV_LN2 = 1 / math.log(2)

ENTANGLED_GRID = [
    (a, k, n)
    for a in (-0.49, -0.4, -0.2, -0.05, 0.2, 0.4)
    for k in (0.05, 0.5, 1.0, 5.0)
    for n in (0.0, 0.01, 1.0)
    if steady_state_log_negativity(a, NoiseModel(k, n)) > 0
]


def test_grid_has_entangled_states():
    assert len(ENTANGLED_GRID) >= 20


def test_scaling_identity_example(noise_unit):
    grads = partials(steady_state_closed_form(-0.4, noise_unit))
    assert set(grads) == set(ELEMENTS)
    assert sum(grads.values()) == pytest.approx(-INV_LN2, abs=1e-4)


@pytest.mark.parametrize("alpha, kappa, n_th", ENTANGLED_GRID)
def test_scaling_identity_on_grid(alpha, kappa, n_th):
    grads = partials(steady_state_closed_form(alpha, NoiseModel(kappa, n_th)))
    assert sum(grads.values()) == pytest.approx(-INV_LN2, abs=1e-4)


def test_scaling_identity_two_mode_squeezed():
    assert sum(partials(two_mode_squeezed(0.4)).values()) == pytest.approx(-INV_LN2, abs=1e-4)


def test_weak_coupling_partials():
    sigma = steady_state_closed_form(-6.6743e-8, NoiseModel(0.1, 1e-9))
    assert sum(partials(sigma).values()) == pytest.approx(-INV_LN2, abs=1e-4)


@pytest.mark.parametrize("sigma", [np.eye(4), squeezed_state(3.0)])
def test_separable_rejected(sigma):
    with pytest.raises(NonDifferentiableError):
        partials(sigma)


def test_precise_log_negativity_matches_float_for_strong_coupling(noise_unit):
    sigma = steady_state_closed_form(-0.4, noise_unit)
    assert log_negativity_precise(sigma) == pytest.approx(log_negativity(sigma).e_n, rel=1e-12)


def test_precise_log_negativity_matches_lambda_path_for_weak_coupling():
    noise = NoiseModel(0.1, 1e-9)
    sigma = steady_state_closed_form(-6.6743e-8, noise)
    assert log_negativity_precise(sigma) == pytest.approx(steady_state_log_negativity(-6.6743e-8, noise), rel=1e-6)


def partial_at_step(sigma, label, h):
    with mpmath.workdps(metrology.WORKING_DIGITS):
        return float(metrology._Evaluator(sigma).central(label, h))


@pytest.mark.parametrize("label", ELEMENTS)
def test_halving_step_is_consistent(noise_unit, label):
    sigma = steady_state_closed_form(-0.3, noise_unit)
    coarse = partial_at_step(sigma, label, 1e-6)
    fine = partial_at_step(sigma, label, 5e-7)
    assert abs(coarse - fine) <= 1e-4 * max(abs(fine), 1e-12)


def test_partials_match_analytic_global_scaling(noise_unit):
    # Diagonal-only scaling of one mode: d/deps of -log2 nu for sigma_11 cross-checked
    # against a 2-point secant in plain float with a large step.
    sigma = steady_state_closed_form(-0.4, noise_unit)
    grads = partials(sigma)
    h = 1e-4

    def e_n(eps):
        s = sigma.copy()
        s[0, 0] *= 1 + eps
        return log_negativity(s).e_n

    assert grads["11"] == pytest.approx((e_n(h) - e_n(-h)) / (2 * h), rel=1e-6)


def test_zero_budget_gives_zero(noise_unit):
    b = propagate_error(steady_state_closed_form(-0.4, noise_unit), ErrorBudget(epsilon=0.0))
    assert b.delta_e_n == 0.0
    assert b.relative_error == 0.0


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-6, 1e-1), st.floats(0.1, 10.0))
def test_homogeneity(eps, c):
    sigma = steady_state_closed_form(-0.4, NoiseModel(1.0, 0.0))
    grads = partials_cache(sigma)
    one = propagate_error(sigma, ErrorBudget(epsilon=eps), precomputed=grads)
    scaled = propagate_error(sigma, ErrorBudget(epsilon=c * eps), precomputed=grads)
    assert scaled.delta_e_n == pytest.approx(c * one.delta_e_n, rel=1e-14)


_CACHE = {}


def partials_cache(sigma):
    key = sigma.tobytes()
    if key not in _CACHE:
        _CACHE[key] = partials(sigma)
    return _CACHE[key]


def test_per_element_override(noise_unit):
    sigma = steady_state_closed_form(-0.4, noise_unit)
    grads = partials_cache(sigma)
    b = propagate_error(sigma, ErrorBudget(epsilon=0.0, per_element={"13": 0.02}), precomputed=grads)
    assert b.delta_e_n == pytest.approx(abs(grads["13"]) * 0.02, rel=1e-15)
    assert b.eps("13") == 0.02 and b.eps("11") == 0.0


def test_coulomb_table_budget():
    sigma = steady_state_closed_form(-0.230708, NoiseModel(1.0, 0.01))
    b = propagate_error(sigma, ErrorBudget(epsilon=1e-2))
    assert b.relative_error <= 0.07
    assert b.delta_e_n == pytest.approx(0.008, abs=0.001)


def test_deterministic(noise_unit):
    sigma = steady_state_closed_form(-0.25, noise_unit)
    assert partials(sigma) == partials(sigma)


def test_precision_map_flags():
    cells = precision_map([-0.6, -0.3, 0.0, 0.001, 0.3], [0.0, 1e-2, 1e-1], NoiseModel(1.0, 0.0))
    by = {(c.alpha_tilde, c.epsilon): c for c in cells}
    assert [c.alpha_tilde for c in cells[:3]] == [-0.6] * 3
    assert all(by[(-0.6, e)].flag == "unstable" for e in (0.0, 1e-2, 1e-1))
    assert all(by[(0.0, e)].flag == "separable" for e in (0.0, 1e-2, 1e-1))
    assert by[(0.001, 1e-1)].flag == "exceeds_unity"
    assert by[(-0.3, 0.0)].relative_error == 0.0 and by[(-0.3, 0.0)].flag == "ok"
    assert by[(-0.3, 1e-2)].relative_error < by[(0.3, 1e-2)].relative_error
    grid = metrology.as_grid(cells, 5, 3)
    assert grid.shape == (5, 3)
    assert np.isnan(grid[0]).all()


def test_precision_map_bit_identical():
    args = ([-0.3, 0.2], [1e-3, 1e-2], NoiseModel(1.0, 0.0))
    assert [c.row() for c in precision_map(*args)] == [c.row() for c in precision_map(*args)]
