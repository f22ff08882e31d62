"""Reference solutions: exact Riemann solver, Godunov schemes, shock reflection."""
from .godunov import (
    PositivityError,
    godunov_step,
    godunov_step_2d,
    run_godunov_1d,
    run_godunov_2d,
)
from .reflection import (
    REFLECTION_STATES,
    ReflectionStates,
    reflected_front_angle,
    reflected_front_normal,
    reflection_exact,
    rh_residual,
)
from .riemann import RiemannSolution, VacuumError, exact_riemann, interface_state

__all__ = [
    "REFLECTION_STATES",
    "PositivityError",
    "ReflectionStates",
    "RiemannSolution",
    "VacuumError",
    "exact_riemann",
    "godunov_step",
    "godunov_step_2d",
    "interface_state",
    "reflected_front_angle",
    "reflected_front_normal",
    "reflection_exact",
    "rh_residual",
    "run_godunov_1d",
    "run_godunov_2d",
]
