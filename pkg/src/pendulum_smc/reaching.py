"""Power-rate reaching laws and the switching element."""
from __future__ import annotations

import math
from dataclasses import dataclass

SWITCH_KINDS = ("sign", "saturation")


@dataclass(frozen=True)
class ReachingParams:
    """Gains of the reaching dynamics.

    ``k1``/``eps1`` drive the first-order law; the second-order law pairs
    ``k1``/``eps1`` with the surface rate and ``k2``/``eps2`` with the surface
    itself. ``delta`` is the half-width of the saturation boundary layer.
    """

    k1: float = 5.0
    k2: float = 6.0
    eps1: float = 2.0
    eps2: float = 2.0
    alpha: float = 0.5
    switch: str = "saturation"
    delta: float = 0.05

    def __post_init__(self):
        if self.switch not in SWITCH_KINDS:
            raise ValueError(f"unknown switch kind {self.switch!r}")
        vals = (self.k1, self.k2, self.eps1, self.eps2, self.alpha, self.delta)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("reaching parameters must be finite")
        if self.k1 <= 0 or self.eps1 <= 0:
            raise ValueError("k1 and eps1 must be positive")
        if self.k2 < 0 or self.eps2 < 0:
            raise ValueError("k2 and eps2 must be non-negative")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.switch == "saturation" and self.delta <= 0:
            raise ValueError("delta must be positive for saturation switching")


def sign(x: float) -> float:
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


def switch_fn(params: ReachingParams, s: float) -> float:
    if params.switch == "sign":
        return sign(s)
    if s > params.delta:
        return 1.0
    if s < -params.delta:
        return -1.0
    return s / params.delta


def _power_term(params: ReachingParams, gain: float, x: float) -> float:
    return gain * abs(x) ** params.alpha * switch_fn(params, x)


def first_order_rate(params: ReachingParams, s: float) -> float:
    """ds/dt = -k1*s - eps1*|s|^alpha*switch(s)."""
    return -params.k1 * s - _power_term(params, params.eps1, s)


def second_order_rate(params: ReachingParams, s: float, s_dot: float) -> float:
    """d2s/dt2 = -k1*s_dot - k2*s - eps1*|s_dot|^a*switch(s_dot) - eps2*|s|^a*switch(s)."""
    return (
        -params.k1 * s_dot
        - params.k2 * s
        - _power_term(params, params.eps1, s_dot)
        - _power_term(params, params.eps2, s)
    )


def reaching_time_bound(params: ReachingParams, s0: float) -> float:
    """Exact time for the first-order law with sign switching to drive s0 to zero.

    Separating variables in ds/dt = -k1*s - eps1*s^alpha (s > 0) with
    w = s^(1-alpha) gives a linear ODE in w, hence

        t_r = ln((k1*|s0|^(1-alpha) + eps1) / eps1) / (k1*(1-alpha))
    """
    if params.switch != "sign":
        raise ValueError("reaching_time_bound holds only for sign switching")
    if s0 == 0:
        return 0.0
    k1, eps1, a = params.k1, params.eps1, params.alpha
    return math.log1p(k1 * abs(s0) ** (1.0 - a) / eps1) / (k1 * (1.0 - a))
