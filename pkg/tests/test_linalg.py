import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cvent.errors import NoSteadyStateError, NumericError
from cvent.linalg import expm, is_hurwitz, lyapunov_residual, rk4_lyapunov, solve_lyapunov


def taylor_expm(a, terms):
    out = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def test_expm_zero():
    assert np.array_equal(expm(np.zeros((4, 4))), np.eye(4))


def test_expm_rotation():
    gen = np.array([[0.0, 1.0], [-1.0, 0.0]])
    t = 0.7
    assert np.allclose(expm(gen * t), [[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]], atol=1e-15)


@settings(max_examples=50)
@given(arrays(np.float64, (4, 4), elements=st.floats(-3, 3)))
def test_expm_matches_scipy(a):
    ref = scipy.linalg.expm(a)
    assert np.allclose(expm(a), ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


def test_expm_large_norm_uses_squaring():
    a = np.array([[-20.0, 5.0], [0.0, -30.0]])
    assert np.allclose(expm(a), scipy.linalg.expm(a), rtol=1e-10, atol=1e-300)


def test_expm_small_norm_matches_taylor():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 4)) * 0.3
    assert np.allclose(expm(a), taylor_expm(a, 30), atol=1e-14)


def test_expm_rejects_non_finite():
    with pytest.raises(NumericError):
        expm(np.full((2, 2), np.inf))


def test_solve_lyapunov_residual():
    a = np.array([[-1.0, 2.0], [-3.0, -0.5]])
    d = np.eye(2)
    x = solve_lyapunov(a, d)
    assert np.allclose(x, scipy.linalg.solve_continuous_lyapunov(a, -d), atol=1e-13)
    assert lyapunov_residual(a, x, d) < 1e-13


def test_solve_lyapunov_non_hurwitz():
    with pytest.raises(NoSteadyStateError):
        solve_lyapunov(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(2))


def test_is_hurwitz():
    assert is_hurwitz(-np.eye(3))
    assert not is_hurwitz(np.zeros((3, 3)))


def test_rk4_matches_exact():
    a = np.array([[-0.5, 1.0], [-1.0, -0.5]])
    d = np.eye(2)
    x0 = np.diag([2.0, 0.5])
    x_inf = solve_lyapunov(a, d)
    e = expm(a * 1.5)
    exact = e @ (x0 - x_inf) @ e.T + x_inf
    assert np.allclose(rk4_lyapunov(a, d, x0, 1.5, step=1e-3), exact, atol=1e-12)


def test_rk4_diverges_to_numeric_error():
    with pytest.raises(NumericError):
        rk4_lyapunov(np.eye(2) * 400, np.eye(2), np.eye(2), 10.0, step=1e-2)
