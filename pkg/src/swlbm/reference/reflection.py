"""Regular reflection of a stationary oblique shock on a wall.

An incident front ``x + y = 1`` separates a uniform "left" stream from the
"top" state; it hits the bottom wall at ``x = 1`` where a reflected front
turns the flow back parallel to the wall ("right" state).  The three states
are the published constants below.

The reflected front's inclination is recovered from the states themselves by
requiring zero mass-flux jump across it.  With ``p = rho^2 / 2`` the
published states are consistent with a front of slope ``5/4`` (about 51.34
degrees from the wall) to round-off.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from ..sw_core import PhysParams

DOMAIN = (1.75, 1.0)
IMPACT_X = 1.0


class Primitive2D(NamedTuple):
    rho: float
    u: float
    v: float


class ReflectionStates(NamedTuple):
    left: Primitive2D
    top: Primitive2D
    right: Primitive2D


REFLECTION_STATES = ReflectionStates(
    left=Primitive2D(1.0, 1.59497132403753, 0.0),
    top=Primitive2D(1.17150636388320, 1.47822089880855, -0.116750425228984),
    right=Primitive2D(1.38196199044604, 1.33228286727232, 0.0),
)

INCIDENT_NORMAL = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))


def conserved(state: Primitive2D):
    rho, u, v = state
    return np.array([rho, rho * u, rho * v])


def normal_flux(state: Primitive2D, normal, params: PhysParams = PhysParams()):
    rho, u, v = state
    nx, ny = normal
    un = u * nx + v * ny
    p = params.kappa * rho * rho
    return np.array([rho * un, rho * u * un + p * nx, rho * v * un + p * ny])


def rh_residual(state_a, state_b, normal, speed=0.0, params: PhysParams = PhysParams()):
    """Euclidean norm of ``F_n(B) - F_n(A) - speed (U(B) - U(A))``."""
    jump = normal_flux(state_b, normal, params) - normal_flux(state_a, normal, params)
    jump -= speed * (conserved(state_b) - conserved(state_a))
    return float(np.linalg.norm(jump))


def reflected_front_angle(states: ReflectionStates = REFLECTION_STATES) -> float:
    """Angle (radians, from the wall) of the stationary front joining top and right.

    The front normal ``(sin a, -cos a)`` is the one with equal normal mass
    flux on both sides.
    """
    top, right = states.top, states.right

    def mass_jump(a):
        n = (math.sin(a), -math.cos(a))
        return normal_flux(right, n)[0] - normal_flux(top, n)[0]

    return brentq(mass_jump, math.radians(20.0), math.radians(85.0), xtol=1e-15)


def reflected_front_normal(states: ReflectionStates = REFLECTION_STATES):
    a = reflected_front_angle(states)
    return (math.sin(a), -math.cos(a))


def region(x, y, states: ReflectionStates = REFLECTION_STATES):
    """0 for left, 1 for top, 2 for right; vectorized."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope = math.tan(reflected_front_angle(states))
    out = np.full(np.broadcast(x, y).shape, 2, dtype=int)
    out[np.broadcast_to(x + y < 1.0, out.shape)] = 0
    top = (x + y >= 1.0) & (y > slope * (x - IMPACT_X))
    out[np.broadcast_to(top, out.shape)] = 1
    return out


def reflection_exact(x, y, states: ReflectionStates = REFLECTION_STATES):
    """Exact steady field; returns ``(rho, u, v)`` arrays shaped like ``x, y``."""
    reg = region(x, y, states)
    table = np.array(states)
    return tuple(table[reg, k] for k in range(3))
