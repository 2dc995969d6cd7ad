import math

import numpy as np
import pytest

from pendulum_smc.controller import (
    Controller,
    ControllerConfig,
    ReferenceSignal,
    combined_control,
    pd_control,
    pi2_control,
)
from pendulum_smc.plant import PendulumParams, PlantState, acceleration, eval_f, eval_g
from pendulum_smc.reaching import ReachingParams, first_order_rate, second_order_rate
from pendulum_smc.simulator import Scenario, run_scenario
from pendulum_smc.surfaces import SurfaceGains, TrackingError

P = PendulumParams()
REF = ReferenceSignal()
SIGN = ReachingParams(switch="sign")
# gains quoted by the worked examples
EX_CFG = ControllerConfig(
    surface_gains=SurfaceGains(kp=2.0, ki=1.0, kd=0.5),
    reaching_first=SIGN, reaching_second=SIGN,
)
ZERO = TrackingError(0.0, 0.0, 0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        ControllerConfig(kind="pid")
    with pytest.raises(ValueError):
        ControllerConfig(pd_weight=1.5)
    with pytest.raises(ValueError):
        ControllerConfig(u_max=0.0)
    with pytest.raises(ValueError):
        ControllerConfig(kind="pd_smc", surface_gains=SurfaceGains(kd=0.0))
    ControllerConfig(kind="pd_smc", surface_gains=SurfaceGains(ki=0.0))


def test_equilibrium_outputs_zero():
    st = PlantState(0.0, 0.0)
    assert pd_control(EX_CFG, P, st, REF, ZERO).u == 0.0
    assert pi2_control(EX_CFG, P, st, REF, ZERO).u == 0.0
    out = combined_control(EX_CFG, P, st, REF, ZERO)
    assert (out.u_pd, out.u_pi, out.u_total) == (0.0, 0.0, 0.0)


def test_pd_control_example():
    st = PlantState(0.2, 0.0)
    err = TrackingError(-0.2, 0.0)
    u, guard = pd_control(EX_CFG, P, st, REF, err)
    assert not guard
    # 30-digit evaluation of the closed-form law
    assert u == pytest.approx(2.13318564223654273636, rel=1e-12)
    # substituting u into the PD balance reproduces the first-order law
    s_dot = 2.0 * err.e_dot + 0.5 * (0.0 - acceleration(P, st, u, 0.0))
    assert s_dot == pytest.approx(first_order_rate(SIGN, -0.4), abs=1e-9)


def test_pi2_control_example():
    st = PlantState(0.2, 0.0)
    err = TrackingError(-0.2, 0.0, 0.0)
    u, guard = pi2_control(EX_CFG, P, st, REF, err)
    assert not guard
    assert u == pytest.approx(-0.23399556420347845797, rel=1e-12)
    s_ddot = 2.0 * (0.0 - acceleration(P, st, u, 0.0)) + 1.0 * err.e_dot
    assert s_ddot == pytest.approx(second_order_rate(SIGN, -0.4, -0.2), abs=1e-9)


@pytest.mark.parametrize("law", [pd_control, pi2_control])
def test_guard_at_singularity(law):
    st = PlantState(math.pi / 2, 0.0)
    err = TrackingError(-math.pi / 2, 0.0, 0.0)
    u, guard = law(EX_CFG, P, st, REF, err, u_prev=3.0)
    assert guard and u == 3.0
    u, guard = law(EX_CFG, P, st, REF, err, u_prev=1e9)
    assert guard and u == EX_CFG.u_max


def test_guard_below_g_min():
    # |g| < g_min close to pi/2
    theta = math.pi / 2 - 0.01
    assert abs(eval_g(P, PlantState(theta, 0.0))) < P.g_min
    out = combined_control(EX_CFG, P, PlantState(theta, 0.0), REF, TrackingError(-theta, 0.0, 0.0))
    assert out.guard_active and math.isfinite(out.u_total)


def test_combined_weights():
    st = PlantState(0.3, -0.5)
    err = TrackingError(-0.3, 0.5, -0.1)
    u_pd = pd_control(EX_CFG, P, st, REF, err).u
    u_pi = pi2_control(EX_CFG, P, st, REF, err).u
    w0 = ControllerConfig(surface_gains=EX_CFG.surface_gains, reaching_first=SIGN,
                          reaching_second=SIGN, pd_weight=0.0)
    assert combined_control(w0, P, st, REF, err).u_total == max(-50, min(50, u_pi))
    out = combined_control(EX_CFG, P, st, REF, err)
    assert out.u_total == max(-50, min(50, u_pd + u_pi))
    assert (out.u_pd, out.u_pi) == (u_pd, u_pi)


def test_single_branch_kinds():
    st = PlantState(0.3, -0.5)
    err = TrackingError(-0.3, 0.5, -0.1)
    pd_only = ControllerConfig(kind="pd_smc", surface_gains=EX_CFG.surface_gains)
    out = combined_control(pd_only, P, st, REF, err)
    assert out.u_pi == 0.0 and out.u_total == max(-50, min(50, out.u_pd))


def test_output_bounded_and_finite(rng):
    ctrl = Controller(ControllerConfig(u_max=5.0), P)
    for th, thd, ei in rng.uniform(-math.pi, math.pi, (500, 3)):
        out = ctrl(PlantState(th, thd), REF, TrackingError(-th, -thd, ei))
        assert abs(out.u_total) <= 5.0
        assert all(math.isfinite(x) for x in out[:-1])


def test_reference_shift_equivariance(rng):
    """With a linear surrogate plant (f = 0, g = const) control depends only on errors."""
    import pendulum_smc.controller as c

    orig_f, orig_g = c._f, c._g
    c._f = lambda params, th, thd: 0.0
    c._g = lambda params, th: -1.5
    try:
        cfg = ControllerConfig(surface_gains=SurfaceGains(kp=2.0, ki=1.0, kd=0.5))
        for th, thd, ei, delta in rng.uniform(-1, 1, (50, 4)):
            a = combined_control(cfg, P, PlantState(th, thd), ReferenceSignal(theta_ref=0.0),
                                 TrackingError(-th, -thd, ei))
            b = combined_control(cfg, P, PlantState(th + delta, thd), ReferenceSignal(theta_ref=delta),
                                 TrackingError(delta - (th + delta), -thd, ei))
            assert b.u_total == pytest.approx(a.u_total, rel=1e-12, abs=1e-12)
    finally:
        c._f, c._g = orig_f, orig_g


def _run(kind, dt=1e-5, t_final=1.0):
    sc = Scenario(controller=ControllerConfig(kind=kind), dt=dt, t_final=t_final)
    tr = run_scenario(sc)
    assert not tr.failed and not tr.guard.any()
    return tr


def test_pd_closed_loop_enforces_first_order_law():
    tr = _run("pd_smc")
    rp = tr.scenario.controller.reaching_first
    s = tr.s_pd
    # central differences at interior points
    s_dot = (s[2:] - s[:-2]) / (2 * tr.scenario.dt)
    law = np.array([first_order_rate(rp, x) for x in s[1:-1]])
    assert np.all(np.abs(s_dot - law) <= 1e-6 + 1e-3 * np.abs(law))


def test_pi2_closed_loop_enforces_second_order_law():
    tr = _run("pi2_smc")
    sc = tr.scenario
    g = sc.controller.surface_gains
    rp = sc.controller.reaching_second
    for r in list(tr.records)[::97]:
        theta_ddot = acceleration(sc.plant, PlantState(r.theta, r.theta_dot), r.u_total, r.d)
        s_ddot = g.kp * (0.0 - theta_ddot) + g.ki * r.e_dot
        law = second_order_rate(rp, r.s_pi, r.s_pi_dot)
        assert abs(s_ddot - law) <= 1e-6 + 1e-3 * abs(law)
    # and the integrated surface follows its rate
    s_dot_fd = (tr.s_pi[2:] - tr.s_pi[:-2]) / (2 * sc.dt)
    assert np.all(np.abs(s_dot_fd - tr.s_pi_dot[1:-1]) <= 1e-6 + 1e-3 * np.abs(tr.s_pi_dot[1:-1]))


def test_controller_guard_holds_last_value():
    ctrl = Controller(ControllerConfig(), P)
    first = ctrl(PlantState(0.3, 0.0), REF, TrackingError(-0.3, 0.0, 0.0))
    held = ctrl(PlantState(math.pi / 2, 0.0), REF, TrackingError(-math.pi / 2, 0.0, 0.0))
    assert held.guard_active
    assert held.u_pd == first.u_pd and held.u_pi == first.u_pi
    ctrl.reset()
    fresh = ctrl(PlantState(math.pi / 2, 0.0), REF, TrackingError(-math.pi / 2, 0.0, 0.0))
    assert fresh.u_total == 0.0
