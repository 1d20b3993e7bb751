import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahler_g2 import flow as F
from kahler_g2.flow import FlowParams, FlowState

GLPS = FlowParams(0, 0, 0, 1, 1)


def test_hamiltonian_examples():
    assert F.hamiltonian(GLPS, 1.0, 1.0) == 0.0
    assert F.hamiltonian(GLPS, 0.0, 2.25) == -3.0
    for t in (0.3, 1.0, 1.7, 2.4):
        assert F.hamiltonian(GLPS, t, t ** 4) == pytest.approx(0.0, abs=1e-13)
    with pytest.raises(F.DegenerateError):
        F.hamiltonian(GLPS, 1.0, 0.0)
    with pytest.raises(F.FlowDomainError):
        F.hamiltonian(FlowParams(1, 0, 0, 0), 0.5, 1.0)


def test_rhs_examples():
    assert F.hamilton_rhs(GLPS, FlowState(0, 0.7, 4.0)) == pytest.approx((0.5, 2.8))
    # on z = t^4 the flow moves t at speed t^-2
    dt, dz = F.hamilton_rhs(GLPS, FlowState(0, 1.3, 1.3 ** 4))
    assert dt == pytest.approx(1.3 ** -2)
    assert dz == pytest.approx(4 * 1.3 ** 3 * dt)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3))
def test_zero_level_is_z_equals_t_squared_s(p, q, k, l, t):
    params = FlowParams(p, q, k, l, 1)
    if k + l * t <= abs(p + q * t) + 1e-3:
        return
    z = t * t * params.S(t)
    assert F.hamiltonian(params, t, z) == pytest.approx(0.0, abs=1e-12 * (1 + z))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.1, 4.0), st.sampled_from([1, -1]))
def test_energy_derivative_vanishes(t, z, eps):
    params = FlowParams(0, 0.3, 1.0, 1.0, eps)
    dt, dz = F.hamilton_rhs(params, FlowState(0, t, z))
    h = 1e-6
    dHdt = (F.hamiltonian(params, t + h, z) - F.hamiltonian(params, t - h, z)) / (2 * h)
    dHdz = (F.hamiltonian(params, t, z + h) - F.hamiltonian(params, t, z - h)) / (2 * h)
    assert dHdt * dt + dHdz * dz == pytest.approx(0.0, abs=1e-7)


def test_quartic_examples():
    assert F.quartic_level(2, 0) == 1
    assert F.quartic_level(0, 2) == 16
    assert F.quartic_level(-2, 1) == 4


@pytest.mark.parametrize("H_c,t0,tau_max", [(-2.0, 0.0, 10.0), (0.0, 1.0, 10.0), (2.0, 1.2, 10.0)])
def test_ten_thousand_steps_conserve_energy(H_c, t0, tau_max):
    params, s0 = F.level_start(H_c, t0)
    traj = F.integrate(params, s0, 1e-3, tau_max)
    assert traj.status == "ok" and len(traj) == 10_001
    assert traj.drift() <= 1e-8
    assert np.all(np.diff(traj.t) > 0)
    ref = np.array([F.quartic_level(H_c, t) for t in traj.t])
    assert np.abs(traj.z - ref).max() <= 1e-6


def test_bell_segment_point():
    state = F.level_state_at(2.0, 0.0)
    t, z = state(0.5 - 0.5 ** 3 / 3)
    assert t == pytest.approx(0.5, abs=1e-10)
    assert z == pytest.approx(0.5625, abs=1e-9)


def test_bell_segment_degenerates_adaptively():
    params, s0 = F.level_start(2.0, 0.0)
    traj = F.integrate(params, s0, 1e-3, 5.0, adaptive=True)
    assert traj.status == "degenerate"
    assert traj.drift() <= 1e-8
    assert traj.t[-1] == pytest.approx(1.0, abs=1e-3)
    ref = np.array([F.quartic_level(2.0, t) for t in traj.t])
    assert np.abs(traj.z - ref).max() <= 1e-6


def test_fixed_step_bell_reports_degeneration():
    params, s0 = F.level_start(2.0, 0.0)
    traj = F.integrate(params, s0, 1e-3, 5.0)
    assert traj.status == "degenerate"
    assert "z" in traj.message


def test_level_examples_from_spec_points():
    t, z = F.level_state_at(-2.0, 0.0)(1.0 + 1.0 / 3.0)
    assert (t, z) == pytest.approx((1.0, 4.0), abs=1e-9)
    t, z = F.level_state_at(0.0, 1.0)((2.0 ** 3 - 1.0) / 3.0)
    assert (t, z) == pytest.approx((2.0, 16.0), abs=1e-9)


def test_rk4_order():
    params, s0 = F.level_start(0.0, 1.0)
    exact = lambda tau: (1 + 3 * tau) ** (1 / 3)

    def err(h):
        traj = F.integrate(params, s0, h, 2.0)
        return np.abs(traj.t - exact(traj.tau)).max()

    ratio = err(0.1) / err(0.05)
    assert 12 <= ratio <= 20


def test_tau_of_t():
    assert F.tau_of_t(GLPS, 1.3, 1.3) == 0.0
    assert F.tau_of_t(GLPS, 0.0, 3.0) == pytest.approx(9.0, rel=1e-12)
    p = FlowParams(0, 0, 0.7, 1.3)
    val = F.tau_of_t(p, 0.5, 2.0)
    exact = 0.5 * 0.7 * (4 - 0.25) + 1.3 / 3 * (8 - 0.125)
    assert val == pytest.approx(exact, rel=1e-10)
    with pytest.raises(F.FlowDomainError):
        F.tau_of_t(FlowParams(1, 0, 0, 0), 0.0, 1.0)


def test_invert_tau():
    fn = lambda t: F.tau_of_t(GLPS, 0.0, t)
    assert F.invert_tau(fn, 9.0, 0.0, 5.0) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(F.FlowDomainError):
        F.invert_tau(fn, 100.0, 0.0, 2.0)
    bell = lambda t: F.tau_of_t(GLPS, 0.0, t, sqrt_z=lambda s: 1 - s * s)
    for tau in (0.1, 0.4, 0.6):
        t = F.invert_tau(bell, tau, 0.0, 1.0)
        assert abs(bell(t) - tau) <= 1e-12
        assert t - t ** 3 / 3 == pytest.approx(tau, abs=1e-12)


def test_backwards_direction():
    params, s0 = F.level_start(0.0, 1.0)
    traj = F.integrate(params, s0, 1e-3, 0.2, direction=-1)
    assert traj.t[-1] < 1.0
    assert traj.tau[-1] == pytest.approx(-0.2)


def test_csv_roundtrip():
    params, s0 = F.level_start(0.0, 1.0)
    traj = F.integrate(params, s0, 0.1, 0.3)
    buf = io.StringIO()
    F.write_csv(traj, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "tau,t,z,H"
    rows = F.read_csv(io.StringIO(text))
    assert len(rows) == len(traj)
    assert rows[-1]["t"] == traj.states[-1].t
    assert all("," not in r.split(",", 3)[-1] for r in text.splitlines()[1:])
    assert math.isfinite(rows[-1]["H"])


def test_invalid_arguments():
    with pytest.raises(ValueError):
        FlowParams(eps=0)
    with pytest.raises(ValueError):
        F.integrate(GLPS, FlowState(0, 1, 1), 0.0, 1.0)
