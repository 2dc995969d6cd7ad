"""Scalar performance metrics over simulation traces and comparisons between runs."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .plant import _f, _g
from .reaching import first_order_rate, second_order_rate
from .simulator import TRACE_COLUMNS, Trace


class DegenerateStart(ValueError):
    """Initial error is zero, so relative metrics are undefined."""


class IncomparableScenarios(ValueError):
    pass


@dataclass(frozen=True)
class Metrics:
    overshoot_pct: Optional[float]
    settling_time: Optional[float]
    settled: Optional[bool]
    sse: float
    conv_time_pd: Optional[float]
    conv_time_pi: Optional[float]
    chatter_tv: float
    chatter_switches: int
    guard_fraction: float
    context: tuple = ()

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("context")
        return d


def scenario_context(trace: Trace) -> tuple:
    sc = trace.scenario
    return (sc.plant, sc.controller_model, sc.reference, sc.disturbance,
            sc.theta0, sc.theta_dot0, sc.dt, sc.t_final)


def _first_time_staying_below(t: np.ndarray, x: np.ndarray, tol: float) -> Optional[float]:
    outside = np.flatnonzero(~(np.abs(x) <= tol))
    if outside.size == 0:
        return float(t[0])
    k = outside[-1] + 1
    return float(t[k]) if k < len(t) else None


def chatter_total_variation(u: np.ndarray) -> float:
    return float(np.abs(np.diff(u)).sum())


def chatter_switch_count(u: np.ndarray) -> int:
    """Strict sign changes between consecutive nonzero increments of u."""
    du = np.sign(np.diff(u))
    du = du[du != 0]
    return int(np.count_nonzero(du[1:] != du[:-1]))


def compute_metrics(trace: Trace, s_tol: float = 1e-3, band_pct: float = 0.02) -> Metrics:
    """Metrics for one trace.

    ``band_pct`` is a fraction of the initial error magnitude (0.02 = 2%).
    A zero initial error leaves overshoot and settling undefined (None); use
    `overshoot` directly to get the `DegenerateStart` error instead.
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    if trace.failed:
        raise ValueError(f"trace is from a failed run: {trace.failure}")
    t = trace.t
    if np.any(np.diff(t) <= 0):
        raise ValueError("trace times must be strictly increasing")
    e = trace.e
    try:
        os_pct = overshoot(e)
        settle = _first_time_staying_below(t, e, band_pct * abs(e[0]))
        settled = settle is not None
    except DegenerateStart:
        os_pct, settle, settled = None, None, None

    horizon = t[-1] - t[0]
    window = t >= t[-1] - 0.1 * horizon
    u = trace.u_total
    return Metrics(
        overshoot_pct=os_pct,
        settling_time=settle,
        settled=settled,
        sse=float(np.mean(np.abs(e[window]))),
        conv_time_pd=_first_time_staying_below(t, trace.s_pd, s_tol),
        conv_time_pi=_first_time_staying_below(t, trace.s_pi, s_tol),
        chatter_tv=chatter_total_variation(u),
        chatter_switches=chatter_switch_count(u),
        guard_fraction=float(np.mean(trace.guard)),
        context=scenario_context(trace),
    )


def overshoot(e: np.ndarray) -> float:
    """Peak excursion past the reference, in percent of |e[0]|."""
    e0 = float(e[0])
    if e0 == 0:
        raise DegenerateStart("initial error is zero; overshoot undefined")
    peak = float(np.max(-math.copysign(1.0, e0) * np.asarray(e)))
    return 100.0 * max(0.0, peak) / abs(e0)


# metric name -> True when smaller is better
COMPARED_METRICS = {
    "overshoot_pct": True,
    "settling_time": True,
    "sse": True,
    "conv_time_pd": True,
    "conv_time_pi": True,
    "chatter_tv": True,
    "chatter_switches": True,
    "guard_fraction": True,
}


@dataclass(frozen=True)
class Comparison:
    """Per-metric ordering of run ``a`` relative to run ``b``: '<', '=', '>' or 'n/a'."""

    order: dict

    @property
    def all_equal(self) -> bool:
        return all(v in ("=", "n/a") for v in self.order.values())

    def less(self, name: str) -> Optional[bool]:
        v = self.order[name]
        return None if v == "n/a" else v == "<"


def compare(a: Metrics, b: Metrics) -> Comparison:
    if a.context != b.context:
        raise IncomparableScenarios(
            "metrics come from scenarios with different plant, reference, initial state or grid"
        )
    order = {}
    for name in COMPARED_METRICS:
        x, y = getattr(a, name), getattr(b, name)
        if x is None or y is None:
            order[name] = "n/a"
        elif x < y:
            order[name] = "<"
        elif x > y:
            order[name] = ">"
        else:
            order[name] = "="
    return Comparison(order)


@dataclass(frozen=True)
class Verdict:
    name: str
    holds: Optional[bool]  # None means not applicable
    detail: str = ""

    @property
    def status(self) -> str:
        return {True: "pass", False: "fail", None: "n/a"}[self.holds]


def hierarchy_verdicts(combined: Metrics, pi2: Metrics, pi2_sign: Metrics,
                       pd_sign: Metrics, theta0: float) -> list[Verdict]:
    """Verdicts for the controller hierarchy.

    * the PD-compensated controller overshoots less than the PI controller alone
    * with sign switching the second-order law chatters less than the first-order one
    * the combined controller never needs the singularity guard from |theta0| < pi/2
    * the combined controller settles
    """
    out = []
    c = compare(combined, pi2)
    out.append(Verdict(
        "overshoot_combined_lt_pi2", c.less("overshoot_pct"),
        f"{combined.overshoot_pct} vs {pi2.overshoot_pct}",
    ))
    c = compare(pi2_sign, pd_sign)
    # no control activity at all (e.g. starting at the reference): nothing to rank
    idle = pi2_sign.chatter_tv == 0 and pd_sign.chatter_tv == 0
    out.append(Verdict(
        "chatter_tv_pi2_lt_pd_sign", None if idle else c.less("chatter_tv"),
        f"{pi2_sign.chatter_tv} vs {pd_sign.chatter_tv}",
    ))
    out.append(Verdict(
        "guard_free_combined",
        combined.guard_fraction == 0 if abs(theta0) < math.pi / 2 else None,
        f"guard_fraction={combined.guard_fraction}",
    ))
    out.append(Verdict(
        "combined_settled", combined.settled, f"settling_time={combined.settling_time}"
    ))
    return out


def reaching_law_residuals(trace: Trace) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Reconstruct each branch's surface dynamics from its own control output.

    For every record the PD surface rate kp*e_dot + kd*(theta_ref_ddot - f - g*u_pd)
    and the PI surface acceleration kp*(theta_ref_ddot - f - g*u_pi) + ki*e_dot
    are rebuilt from the controller's plant model and returned next to the
    reaching-law values they should equal. Guarded records are dropped.

    Returns (pd_reconstructed, pd_law, pi_reconstructed, pi_law).
    """
    sc = trace.scenario
    cfg = sc.controller
    params = sc.controller_model
    gains = cfg.surface_gains
    ddr = sc.reference.theta_ref_ddot
    col = {name: i for i, name in enumerate(TRACE_COLUMNS)}
    i_th, i_thd, i_ed = col["theta"], col["theta_dot"], col["e_dot"]
    i_spd, i_spi, i_spid = col["s_pd"], col["s_pi"], col["s_pi_dot"]
    i_upd, i_upi, i_guard = col["u_pd"], col["u_pi"], col["guard"]
    pd_rec, pd_law, pi_rec, pi_law = [], [], [], []
    for row in trace.data.tolist():
        if row[i_guard]:
            continue
        f = _f(params, row[i_th], row[i_thd])
        g = _g(params, row[i_th])
        if cfg.uses_pd:
            pd_rec.append(gains.kp * row[i_ed] + gains.kd * (ddr - f - g * row[i_upd]))
            pd_law.append(first_order_rate(cfg.reaching_first, row[i_spd]))
        if cfg.uses_pi:
            pi_rec.append(gains.kp * (ddr - f - g * row[i_upi]) + gains.ki * row[i_ed])
            pi_law.append(second_order_rate(cfg.reaching_second, row[i_spi], row[i_spid]))
    return tuple(np.asarray(x) for x in (pd_rec, pd_law, pi_rec, pi_law))
