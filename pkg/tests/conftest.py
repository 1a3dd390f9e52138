import numpy as np
import pytest

from cvent.dynamics import NoiseModel


@pytest.fixture
def noise_unit():
    return NoiseModel(kappa_tilde=1.0, n_th=0.0)


def two_mode_squeezed(r):
    c, s = np.cosh(r), np.sinh(r)
    return np.array([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])


def local_rotation(theta1, theta2):
    def rot(t):
        return np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]])

    out = np.zeros((4, 4))
    out[:2, :2] = rot(theta1)
    out[2:, 2:] = rot(theta2)
    return out


def local_squeezer(r1, r2):
    return np.diag([np.exp(-r1), np.exp(r1), np.exp(-r2), np.exp(r2)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
