"""Shallow water physics with a power-law pressure.

Conserved variables are the density ``rho`` (water height) and the momentum
``q = rho * u``.  The pressure law is ``p = p0 * (rho / rho0) ** gamma``; the
default normalization ``rho0 = 1, p0 = 1/2, gamma = 2`` gives ``p = rho**2 / 2``
and ``c0 = 1``, the usual ``g = 1`` shallow water convention.

All functions broadcast over numpy arrays.  The entropy-variable inverse and
the dual entropy only exist in closed form for ``gamma = 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """A state lies outside the physical (or convexity) domain."""


class UnsupportedExponentError(NotImplementedError):
    """Raised by closed forms that are only available for ``gamma = 2``."""


@dataclass(frozen=True)
class PhysParams:
    gamma: float = 2.0
    rho0: float = 1.0
    p0: float = 0.5

    def __post_init__(self):
        if not self.rho0 > 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")
        if not self.p0 > 0:
            raise ValueError(f"p0 must be positive, got {self.p0}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def c0(self) -> float:
        return float(np.sqrt(self.gamma * self.p0 / self.rho0))

    @property
    def K(self) -> float:
        """Dual-entropy coefficient, ``p0 / c0**4``."""
        return self.p0 / (self.gamma * self.p0 / self.rho0) ** 2

    @property
    def kappa(self) -> float:
        """Pressure coefficient ``p0 / rho0**gamma``."""
        return self.p0 / self.rho0**self.gamma

    def require_gamma2(self):
        if self.gamma != 2.0:
            raise UnsupportedExponentError(
                f"closed form needs gamma = 2, got gamma = {self.gamma}"
            )


class MacroState1D(NamedTuple):
    rho: np.ndarray
    q: np.ndarray


class MacroState2D(NamedTuple):
    rho: np.ndarray
    qx: np.ndarray
    qy: np.ndarray


class EntropyVars(NamedTuple):
    """Entropy variables; ``beta`` is ``u`` in 1D and ``(u, v)`` in 2D."""

    theta: np.ndarray
    beta: tuple


def _check_rho(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(~(rho > 0)):
        raise DomainError("density must be positive")
    return rho


def _velocities(state):
    rho = _check_rho(state[0])
    return rho, tuple(np.asarray(m, dtype=float) / rho for m in state[1:])


def pressure(rho, params: PhysParams = PhysParams()):
    rho = _check_rho(rho)
    if params.gamma == 2.0:
        return params.kappa * rho * rho
    return params.p0 * (rho / params.rho0) ** params.gamma


def sound_speed(rho, params: PhysParams = PhysParams()):
    rho = _check_rho(rho)
    return np.sqrt(params.gamma * pressure(rho, params) / rho)


def entropy_pair(state, params: PhysParams = PhysParams()):
    """Mathematical entropy and its flux.

    ``eta = rho |u|^2 / 2 + p / (gamma - 1)`` and ``zeta = (eta + p) u``.
    In 2D ``zeta`` is a tuple ``(zeta_x, zeta_y)``.
    """
    rho, vel = _velocities(state)
    p = pressure(rho, params)
    eta = 0.5 * rho * sum(w * w for w in vel) + p / (params.gamma - 1.0)
    zeta = tuple((eta + p) * w for w in vel)
    return eta, zeta[0] if len(zeta) == 1 else zeta


def entropy_vars(state, params: PhysParams = PhysParams()) -> EntropyVars:
    """Gradient of the entropy: ``theta = c^2/(gamma-1) - |u|^2/2``, ``beta = u``."""
    rho, vel = _velocities(state)
    c2 = params.gamma * pressure(rho, params) / rho
    theta = c2 / (params.gamma - 1.0) - 0.5 * sum(w * w for w in vel)
    return EntropyVars(theta, vel)


def state_from_entropy_vars(phi: EntropyVars, params: PhysParams = PhysParams()):
    """Inverse of :func:`entropy_vars` (``gamma = 2`` only).

    Uses ``rho = 2 K (theta + |beta|^2 / 2)``.  Returns a :class:`MacroState1D`
    or :class:`MacroState2D` depending on the number of velocity components.
    """
    params.require_gamma2()
    theta = np.asarray(phi.theta, dtype=float)
    beta = tuple(np.asarray(b, dtype=float) for b in phi.beta)
    c2 = theta + 0.5 * sum(b * b for b in beta)
    if np.any(~(c2 > 0)):
        raise DomainError("theta + |beta|^2/2 must be positive")
    rho = 2.0 * params.K * c2
    moms = tuple(rho * b for b in beta)
    if len(moms) == 1:
        return MacroState1D(rho, moms[0])
    return MacroState2D(rho, *moms)


def dual_entropy(phi: EntropyVars, params: PhysParams = PhysParams()):
    """Legendre dual of the entropy and its flux, ``eta* = p`` and ``zeta* = p u``."""
    params.require_gamma2()
    theta = np.asarray(phi.theta, dtype=float)
    beta = tuple(np.asarray(b, dtype=float) for b in phi.beta)
    c2 = theta + 0.5 * sum(b * b for b in beta)
    if np.any(~(c2 > 0)):
        raise DomainError("theta + |beta|^2/2 must be positive")
    eta_star = params.K * c2 * c2
    zeta_star = tuple(eta_star * b for b in beta)
    return eta_star, zeta_star[0] if len(zeta_star) == 1 else zeta_star


def flux(state, params: PhysParams = PhysParams()):
    """Physical flux.

    1D: returns ``(q, q^2/rho + p)``.  2D: returns a nested tuple ``F[k][alpha]``
    over conserved component ``k`` (rho, qx, qy) and direction ``alpha`` (x, y).
    """
    rho, vel = _velocities(state)
    p = pressure(rho, params)
    if len(vel) == 1:
        (u,) = vel
        q = rho * u
        return q, q * u + p
    u, v = vel
    ruv = rho * u * v
    return (
        (rho * u, rho * v),
        (rho * u * u + p, ruv),
        (ruv, rho * v * v + p),
    )
