"""Nonlinear inverted pendulum dynamics in affine form.

    theta_ddot = f(theta, theta_dot) + g(theta) * u + d(t)

with the shared denominator

    D(theta) = m^2 l^2 cos^2(theta) - (I + m l^2)

The angle is measured from the upright position.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PendulumParams:
    mass_m: float = 0.1
    length_l: float = 0.5
    inertia_I: float = 0.1 * 0.5**2 / 3.0
    gravity_g: float = 9.81
    g_min: float = 0.05

    def __post_init__(self):
        for name in ("mass_m", "length_l", "inertia_I", "gravity_g", "g_min"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        # cos^2 = 1 is the worst case for the sign of D
        if self.denominator(0.0) >= 0:
            raise ValueError(
                "pendulum parameters give a non-negative dynamics denominator at theta=0; "
                "increase inertia_I"
            )

    def denominator(self, theta: float) -> float:
        ml = self.mass_m * self.length_l
        c = math.cos(theta)
        return ml * ml * c * c - (self.inertia_I + self.mass_m * self.length_l * self.length_l)


@dataclass(frozen=True)
class PlantState:
    theta: float
    theta_dot: float
    time: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.theta, self.theta_dot, self.time)):
            raise ValueError(f"non-finite plant state {self!r}")


DISTURBANCE_KINDS = ("none", "step", "sinusoid")


@dataclass(frozen=True)
class DisturbanceModel:
    kind: str = "none"
    amplitude: float = 0.0
    onset_time: float = 0.0
    frequency: float = 0.0

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        for name in ("amplitude", "onset_time", "frequency"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"disturbance {name} must be finite")


def eval_f(params: PendulumParams, state: PlantState) -> float:
    """Drift term of the angular acceleration (rad/s^2)."""
    return _f(params, state.theta, state.theta_dot)


def eval_g(params: PendulumParams, state: PlantState) -> float:
    """Input gain; exactly zero where cos(theta) is zero."""
    return _g(params, state.theta)


def _f(params: PendulumParams, theta: float, theta_dot: float) -> float:
    ml = params.mass_m * params.length_l
    s, c = math.sin(theta), math.cos(theta)
    num = ml * params.gravity_g * s - ml * ml * c * s * theta_dot * theta_dot
    return num / params.denominator(theta)


def _g(params: PendulumParams, theta: float) -> float:
    return params.mass_m * params.length_l * math.cos(theta) / params.denominator(theta)


def eval_disturbance(model: DisturbanceModel, t: float) -> float:
    if model.kind == "step":
        return model.amplitude if t >= model.onset_time else 0.0
    if model.kind == "sinusoid":
        return model.amplitude * math.sin(2.0 * math.pi * model.frequency * t)
    return 0.0


def acceleration(params: PendulumParams, state: PlantState, u: float, d: float) -> float:
    return eval_f(params, state) + eval_g(params, state) * u + d


def _accel(params: PendulumParams, theta: float, theta_dot: float, u: float, d: float) -> float:
    # same expression as _f + _g*u + d with the shared terms evaluated once
    m, l = params.mass_m, params.length_l
    s, c = math.sin(theta), math.cos(theta)
    ml = m * l
    den = ml * ml * c * c - (params.inertia_I + m * l * l)
    f = (ml * params.gravity_g * s - ml * ml * c * s * theta_dot * theta_dot) / den
    return f + ml * c / den * u + d


def acceleration_fn(params: PendulumParams):
    """Return accel(theta, theta_dot, u, d) bound to ``params``, for integrators."""

    def accel(theta: float, theta_dot: float, u: float, d: float) -> float:
        return _accel(params, theta, theta_dot, u, d)

    return accel
