"""Sliding-mode stabilization of a nonlinear inverted pendulum.

PD first-order and PI second-order sliding-mode controllers, their additive
combination, a fixed-step RK4 closed-loop simulator and trace metrics.
"""
from .analysis import Metrics, compare, compute_metrics
from .controller import (
    ControlDecomposition,
    Controller,
    ControllerConfig,
    ReferenceSignal,
    combined_control,
    pd_control,
    pi2_control,
)
from .plant import (
    DisturbanceModel,
    PendulumParams,
    PlantState,
    acceleration,
    eval_disturbance,
    eval_f,
    eval_g,
)
from .reaching import (
    ReachingParams,
    first_order_rate,
    reaching_time_bound,
    second_order_rate,
    switch_fn,
)
from .simulator import NonFiniteState, Scenario, Trace, TraceRecord, rk4_step, run_scenario
from .surfaces import (
    SurfaceGains,
    SurfaceValue,
    TrackingError,
    classical_surface,
    pd_surface,
    pi_surface,
)

__version__ = "0.1.0"
