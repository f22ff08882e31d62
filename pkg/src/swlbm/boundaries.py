"""Boundary condition descriptions shared by the lattice and finite volume solvers.

A domain side is one of

* ``Periodic()`` -- wraps around to the opposite side (both sides must agree),
* ``Wall()`` -- impermeable slip wall,
* ``Dirichlet(state)`` -- prescribed far-field state; in 2D ``state`` is
  ``(rho, u, v)`` whose entries are scalars or arrays along the side,
* ``Outflow()`` -- zero-gradient copy-out.

States here are *primitive* (density and velocity), which is how far-field
data is usually given.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Periodic:
    kind: str = "periodic"


@dataclass(frozen=True)
class Wall:
    kind: str = "wall"


@dataclass(frozen=True)
class Outflow:
    kind: str = "outflow"


@dataclass(frozen=True, eq=False)
class Dirichlet:
    state: tuple
    kind: str = "dirichlet"

    def primitive(self, n=None):
        """State broadcast to ``n`` points along the side (or left scalar)."""
        if n is None:
            return tuple(float(s) for s in self.state)
        return tuple(np.broadcast_to(np.asarray(s, dtype=float), (n,)).copy() for s in self.state)


Side = Union[Periodic, Wall, Outflow, Dirichlet]


@dataclass(frozen=True)
class Sides1D:
    left: Side = Periodic()
    right: Side = Periodic()

    def __post_init__(self):
        if isinstance(self.left, Periodic) != isinstance(self.right, Periodic):
            raise ValueError("periodic boundaries must be set on both ends")


@dataclass(frozen=True)
class Sides2D:
    left: Side = Periodic()
    right: Side = Periodic()
    bottom: Side = Periodic()
    top: Side = Periodic()

    def __post_init__(self):
        for a, b in ((self.left, self.right), (self.bottom, self.top)):
            if isinstance(a, Periodic) != isinstance(b, Periodic):
                raise ValueError("periodic boundaries must be set on opposite sides together")
