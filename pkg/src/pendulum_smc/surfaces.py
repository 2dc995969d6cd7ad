"""Sliding surfaces over the tracking error e = theta_ref - theta."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class TrackingError:
    e: float
    e_dot: float
    e_int: float = 0.0


@dataclass(frozen=True)
class SurfaceGains:
    kp: float = 2.0
    ki: float = 1.0
    kd: float = 0.1
    lam: float = 20.0

    def __post_init__(self):
        if not (math.isfinite(self.kp) and self.kp > 0):
            raise ValueError(f"surface gain kp must be positive, got {self.kp!r}")
        # ki, kd, lam are only required positive by the controller that uses them
        for name in ("ki", "kd", "lam"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"surface gain {name} must be non-negative, got {value!r}")


@dataclass(frozen=True)
class SurfaceValue:
    s: float
    s_dot: Optional[float] = None


def classical_surface(gains: SurfaceGains, err: TrackingError) -> SurfaceValue:
    """s = e_dot + lambda * e for a second-order plant.

    The rate needs e_ddot and is left as None.
    """
    return SurfaceValue(err.e_dot + gains.lam * err.e)


def pi_surface(gains: SurfaceGains, err: TrackingError) -> SurfaceValue:
    """Integral surface s = kp*e + ki*int(e); its rate is available from states."""
    return SurfaceValue(
        gains.kp * err.e + gains.ki * err.e_int,
        gains.kp * err.e_dot + gains.ki * err.e,
    )


def pd_surface(gains: SurfaceGains, err: TrackingError) -> SurfaceValue:
    """s = kp*e + kd*e_dot. The rate is obtained by the controller from the plant model."""
    return SurfaceValue(gains.kp * err.e + gains.kd * err.e_dot)
