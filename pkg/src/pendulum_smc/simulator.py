"""Fixed-step closed-loop integration producing a per-step trace."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Optional

import numpy as np

from .controller import ControlDecomposition, Controller, ControllerConfig, ReferenceSignal
from .plant import (
    DisturbanceModel,
    PendulumParams,
    PlantState,
    acceleration_fn,
    eval_disturbance,
)
from .surfaces import TrackingError

MAX_STEPS = 10**8

TRACE_COLUMNS = (
    "t", "theta", "theta_dot", "theta_ref", "e", "e_dot", "e_int",
    "s_pd", "s_pi", "s_pi_dot", "u_pd", "u_pi", "u_total", "d", "guard",
)


class NonFiniteState(ArithmeticError):
    """An integration stage produced NaN or Inf."""


@dataclass(frozen=True)
class Scenario:
    """A complete closed-loop experiment.

    ``model`` is the parameter set the controller believes in; ``None`` means
    the controller uses the true plant parameters.
    """

    plant: PendulumParams = field(default_factory=PendulumParams)
    disturbance: DisturbanceModel = field(default_factory=DisturbanceModel)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    reference: ReferenceSignal = field(default_factory=ReferenceSignal)
    theta0: float = 0.2
    theta_dot0: float = 0.0
    dt: float = 1e-3
    t_final: float = 10.0
    label: str = ""
    model: Optional[PendulumParams] = None

    def __post_init__(self):
        if not (math.isfinite(self.theta0) and math.isfinite(self.theta_dot0)):
            raise ValueError("initial state must be finite")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (math.isfinite(self.t_final) and self.t_final >= self.dt):
            raise ValueError(f"t_final must be at least dt, got {self.t_final!r}")
        if self.t_final / self.dt > MAX_STEPS:
            raise ValueError(f"t_final/dt exceeds {MAX_STEPS} steps")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def controller_model(self) -> PendulumParams:
        return self.plant if self.model is None else self.model


class TraceRecord(NamedTuple):
    t: float
    theta: float
    theta_dot: float
    theta_ref: float
    e: float
    e_dot: float
    e_int: float
    s_pd: float
    s_pi: float
    s_pi_dot: float
    u_pd: float
    u_pi: float
    u_total: float
    d: float
    guard: bool


class Trace:
    """Simulation output stored column-wise; one row per grid point."""

    def __init__(self, scenario: Scenario, data: np.ndarray, failed: bool = False,
                 failure: str = ""):
        data = np.asarray(data, dtype=float).reshape(-1, len(TRACE_COLUMNS))
        self.scenario = scenario
        self.data = data
        self.failed = failed
        self.failure = failure

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getattr__(self, name: str) -> np.ndarray:
        if name in TRACE_COLUMNS:
            return self.data[:, TRACE_COLUMNS.index(name)]
        raise AttributeError(name)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, TRACE_COLUMNS.index(name)]

    @property
    def records(self) -> Iterator[TraceRecord]:
        for row in self.data:
            vals = [float(v) for v in row]
            vals[-1] = bool(vals[-1])
            yield TraceRecord(*vals)

    def record(self, i: int) -> TraceRecord:
        vals = [float(v) for v in self.data[i]]
        vals[-1] = bool(vals[-1])
        return TraceRecord(*vals)


Accel = Callable[[float, float, float, float], float]


def rk4_step(accel: Accel, theta: float, theta_dot: float, dt: float, u: float,
             d: float) -> tuple[float, float]:
    """Classical RK4 step of theta_ddot = accel(theta, theta_dot, u, d) with u, d held."""
    h2 = 0.5 * dt
    a1 = accel(theta, theta_dot, u, d)
    v2 = theta_dot + h2 * a1
    a2 = accel(theta + h2 * theta_dot, v2, u, d)
    v3 = theta_dot + h2 * a2
    a3 = accel(theta + h2 * v2, v3, u, d)
    v4 = theta_dot + dt * a3
    a4 = accel(theta + dt * v3, v4, u, d)
    theta_new = theta + dt / 6.0 * (theta_dot + 2.0 * v2 + 2.0 * v3 + v4)
    theta_dot_new = theta_dot + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    if not (math.isfinite(theta_new) and math.isfinite(theta_dot_new)):
        raise NonFiniteState(
            f"non-finite state after step from theta={theta!r}, theta_dot={theta_dot!r}"
        )
    return theta_new, theta_dot_new


ControlLaw = Callable[[PlantState, ReferenceSignal, TrackingError], ControlDecomposition]


def run_scenario(scenario: Scenario, control_law: Optional[ControlLaw] = None) -> Trace:
    """Integrate the closed loop on the grid t = 0, dt, ..., t_final.

    Control and disturbance are evaluated at the start of each step and held
    across it. The error integral is advanced by the trapezoidal rule. A
    non-finite state stops the run and returns the partial trace flagged as
    failed.
    """
    if control_law is None:
        control_law = Controller(scenario.controller, scenario.controller_model)
    plant = scenario.plant
    ref = scenario.reference
    dist = scenario.disturbance
    dt = scenario.dt
    n = scenario.n_steps
    r, r_dot = ref.theta_ref, ref.theta_ref_dot

    accel = acceleration_fn(plant)
    theta, theta_dot = scenario.theta0, scenario.theta_dot0
    e_int = 0.0
    data = np.empty((n + 1, len(TRACE_COLUMNS)))
    filled = 0
    failed, failure = False, ""
    for i in range(n + 1):
        t = i * dt
        e = r - theta
        e_dot = r_dot - theta_dot
        state = PlantState(theta, theta_dot, t)
        c = control_law(state, ref, TrackingError(e, e_dot, e_int))
        d = eval_disturbance(dist, t)
        row = (t, theta, theta_dot, r, e, e_dot, e_int, c.s_pd, c.s_pi, c.s_pi_dot,
               c.u_pd, c.u_pi, c.u_total, d, float(c.guard_active))
        data[i] = row
        filled = i + 1
        if i == n:
            break
        try:
            theta, theta_dot = rk4_step(accel, theta, theta_dot, dt, c.u_total, d)
        except NonFiniteState as exc:
            failed, failure = True, f"step {i} (t={t!r}): {exc}"
            break
        e_int += 0.5 * dt * (e + (r - theta))
    data = data[:filled]
    bad = np.flatnonzero(~np.isfinite(data).all(axis=1))
    if bad.size:
        i = int(bad[0])
        failed, failure = True, f"non-finite trace values at step {i} (t={i * dt!r})"
        data = data[:i]
    return Trace(scenario, data, failed, failure)
