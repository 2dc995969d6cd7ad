"""Sliding-mode control laws for the pendulum.

Both laws are obtained by solving the surface balance for u:

* PD branch: d/dt(kp*e + kd*e_dot) equals the first-order reaching rate.
* PI branch: d2/dt2(kp*e + ki*int e) equals the second-order reaching rate.

The combined controller sums the two branch outputs (the PD branch scaled by
``pd_weight``) and clamps the result to +-``u_max``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .plant import PendulumParams, PlantState, _f, _g
from .reaching import ReachingParams, switch_fn
from .surfaces import SurfaceGains, TrackingError, pd_surface, pi_surface

CONTROLLER_KINDS = ("pd_smc", "pi2_smc", "combined")


@dataclass(frozen=True)
class ReferenceSignal:
    kind: str = "constant"
    theta_ref: float = 0.0

    def __post_init__(self):
        if self.kind != "constant":
            raise ValueError(f"unknown reference kind {self.kind!r}")
        if not math.isfinite(self.theta_ref):
            raise ValueError("theta_ref must be finite")

    @property
    def theta_ref_dot(self) -> float:
        return 0.0

    @property
    def theta_ref_ddot(self) -> float:
        return 0.0


@dataclass(frozen=True)
class ControllerConfig:
    kind: str = "combined"
    surface_gains: SurfaceGains = field(default_factory=SurfaceGains)
    reaching_first: ReachingParams = field(default_factory=ReachingParams)
    reaching_second: ReachingParams = field(default_factory=ReachingParams)
    pd_weight: float = 1.0
    u_max: float = 50.0

    def __post_init__(self):
        if self.kind not in CONTROLLER_KINDS:
            raise ValueError(f"unknown controller kind {self.kind!r}")
        if not 0.0 <= self.pd_weight <= 1.0:
            raise ValueError(f"pd_weight must lie in [0, 1], got {self.pd_weight!r}")
        if not (math.isfinite(self.u_max) and self.u_max > 0):
            raise ValueError(f"u_max must be positive, got {self.u_max!r}")
        if self.uses_pd and self.surface_gains.kd <= 0:
            raise ValueError("kd must be positive when the PD branch is active")
        if self.uses_pi and self.surface_gains.ki <= 0:
            raise ValueError("ki must be positive when the PI branch is active")

    @property
    def uses_pd(self) -> bool:
        return self.kind in ("pd_smc", "combined")

    @property
    def uses_pi(self) -> bool:
        return self.kind in ("pi2_smc", "combined")


class ControlDecomposition(NamedTuple):
    u_pd: float
    u_pi: float
    u_total: float
    s_pd: float
    s_pi: float
    s_pi_dot: float
    guard_active: bool


class BranchOutput(NamedTuple):
    u: float
    guard_active: bool


def clamp(x: float, limit: float) -> float:
    return max(-limit, min(limit, x))


def pd_control(
    cfg: ControllerConfig,
    params: PendulumParams,
    state: PlantState,
    ref: ReferenceSignal,
    err: TrackingError,
    u_prev: float = 0.0,
) -> BranchOutput:
    """First-order sliding-mode law on the PD surface.

    When |g(theta)| < g_min the law is not inverted; the previous output is
    held (clamped) and the guard flag is raised.
    """
    g = _g(params, state.theta)
    if abs(g) < params.g_min:
        return BranchOutput(clamp(u_prev, cfg.u_max), True)
    gains, rp = cfg.surface_gains, cfg.reaching_first
    s = pd_surface(gains, err).s
    f = _f(params, state.theta, state.theta_dot)
    rhs = (
        gains.kd * (ref.theta_ref_ddot - f)
        + gains.kp * err.e_dot
        + rp.k1 * s
        + rp.eps1 * abs(s) ** rp.alpha * switch_fn(rp, s)
    )
    return BranchOutput(rhs / (gains.kd * g), False)


def pi2_control(
    cfg: ControllerConfig,
    params: PendulumParams,
    state: PlantState,
    ref: ReferenceSignal,
    err: TrackingError,
    u_prev: float = 0.0,
) -> BranchOutput:
    """Second-order sliding-mode law on the PI surface; guarded like `pd_control`."""
    g = _g(params, state.theta)
    if abs(g) < params.g_min:
        return BranchOutput(clamp(u_prev, cfg.u_max), True)
    gains, rp = cfg.surface_gains, cfg.reaching_second
    sv = pi_surface(gains, err)
    s, sd = sv.s, sv.s_dot
    f = _f(params, state.theta, state.theta_dot)
    rhs = (
        gains.kp * (ref.theta_ref_ddot - f)
        + gains.ki * err.e_dot
        + rp.k1 * sd
        + rp.k2 * s
        + rp.eps1 * abs(sd) ** rp.alpha * switch_fn(rp, sd)
        + rp.eps2 * abs(s) ** rp.alpha * switch_fn(rp, s)
    )
    return BranchOutput(rhs / (gains.kp * g), False)


def combined_control(
    cfg: ControllerConfig,
    params: PendulumParams,
    state: PlantState,
    ref: ReferenceSignal,
    err: TrackingError,
    u_prev_pd: float = 0.0,
    u_prev_pi: float = 0.0,
) -> ControlDecomposition:
    """Evaluate whichever branches ``cfg.kind`` selects and mix them.

    Inactive branches report u = 0; all surfaces are reported regardless.
    """
    gains = cfg.surface_gains
    s_pd = pd_surface(gains, err).s
    pi = pi_surface(gains, err)
    u_pd = u_pi = 0.0
    guard = False
    if cfg.uses_pd:
        u_pd, g_pd = pd_control(cfg, params, state, ref, err, u_prev_pd)
        guard |= g_pd
    if cfg.uses_pi:
        u_pi, g_pi = pi2_control(cfg, params, state, ref, err, u_prev_pi)
        guard |= g_pi
    if cfg.kind == "combined":
        raw = cfg.pd_weight * u_pd + u_pi
    elif cfg.kind == "pd_smc":
        raw = u_pd
    else:
        raw = u_pi
    return ControlDecomposition(
        u_pd, u_pi, clamp(raw, cfg.u_max), s_pd, pi.s, pi.s_dot, guard
    )


class Controller:
    """Stateful wrapper holding the last branch outputs for the singularity guard."""

    def __init__(self, cfg: ControllerConfig, params: PendulumParams):
        self.cfg = cfg
        self.params = params
        self.reset()

    def reset(self):
        self._prev_pd = 0.0
        self._prev_pi = 0.0

    def __call__(
        self, state: PlantState, ref: ReferenceSignal, err: TrackingError
    ) -> ControlDecomposition:
        out = combined_control(
            self.cfg, self.params, state, ref, err, self._prev_pd, self._prev_pi
        )
        self._prev_pd = clamp(out.u_pd, self.cfg.u_max)
        self._prev_pi = clamp(out.u_pi, self.cfg.u_max)
        return out
