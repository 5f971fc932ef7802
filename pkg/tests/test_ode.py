import numpy as np
import pytest

from spacethread.errors import DomainError, StepFailure
from spacethread.ode import integrate_ode


def test_exponential():
    sol = integrate_ode(lambda t, y: y, 0.0, [1.0], 2.0, tol=1e-12)
    assert sol.status == "done"
    assert np.isclose(sol.y[-1, 0], np.exp(2.0), rtol=1e-10)


def test_backward_direction():
    sol = integrate_ode(lambda t, y: y, 0.0, [1.0], -1.0, tol=1e-12)
    assert sol.t[-1] == -1.0
    assert np.isclose(sol.y[-1, 0], np.exp(-1.0), rtol=1e-10)


def test_harmonic_oscillator_energy():
    sol = integrate_ode(lambda t, y: np.array([y[1], -y[0]]), 0.0, [1.0, 0.0], 20.0, tol=1e-12)
    assert np.allclose(sol.y[-1], [np.cos(20.0), -np.sin(20.0)], atol=1e-9)


def test_event_located():
    # y = cos t crosses zero at pi/2
    sol = integrate_ode(lambda t, y: np.array([y[1], -y[0]]), 0.0, [1.0, 0.0], 5.0,
                        event=lambda t, y: y[0], event_tol=1e-13)
    assert sol.status == "event"
    assert abs(sol.t_event - np.pi / 2) < 1e-10


def test_boundary_stops_inside():
    # y' = 1 leaves the domain y < 1 at t = 1
    sol = integrate_ode(lambda t, y: np.array([1.0]), 0.0, [0.0], 3.0, inside=lambda y: y[0] < 1.0)
    assert sol.status == "boundary"
    assert sol.y[-1, 0] < 1.0 and 1.0 - sol.y[-1, 0] < 1e-9


def test_domain_error_is_boundary():
    def f(t, y):
        if y[0] >= 0.5:
            raise DomainError("outside")
        return np.array([1.0])
    sol = integrate_ode(f, 0.0, [0.0], 1.0)
    assert sol.status == "boundary" and 0.5 - sol.y[-1, 0] < 1e-9


def test_finite_time_blowup_fails_cleanly():
    with pytest.raises(StepFailure):
        integrate_ode(lambda t, y: y * y, 0.0, [1.0], 2.0, max_steps=2000)


def test_zero_span():
    sol = integrate_ode(lambda t, y: y, 1.0, [2.0], 1.0)
    assert sol.status == "done" and len(sol.t) == 1
