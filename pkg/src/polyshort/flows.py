"""Velocity fields that drive the polygon evolutions.

Three flows are provided, each assigning one velocity per vertex:

* linear: ``v_i = (z_{i+1} - z_i)/2 + (z_{i-1} - z_i)/2``, a fixed linear map
  of the vertex vector (each vertex chases the midpoint of its neighbors).
* Menger-Melnikov: ``v_i = (C_i - z_i) / R_i**2`` where ``C_i`` and ``R_i``
  are the center and radius of the circle through ``z_{i-1}, z_i, z_{i+1}``;
  the magnitude is the Menger curvature ``1/R_i``.  A collinear triple has
  zero curvature and contributes zero velocity.
* bisector: motion along the internal angle bisector at each vertex, the
  direction that locally shrinks the perimeter fastest for a given speed.
  ``d_i`` is the sum of the two unit edge vectors out of ``z_i``; UNIT mode
  moves at fixed speed along ``d_i`` (zero where the edges are anti-parallel
  and ``d_i`` vanishes), NORM_MATCHED mode uses ``d_i / 2`` so magnitudes are
  comparable with the linear flow.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import Polygon, circumcircle

__all__ = [
    "FlowKind",
    "BisectorSpeedMode",
    "FlowSpec",
    "VelocityField",
    "FlowDegeneracyError",
    "DegenerateTripleError",
    "CoincidentVerticesError",
    "linear_velocity",
    "menger_melnikov_velocity",
    "bisector_velocity",
    "velocity",
]

# |d_i| below this counts as anti-parallel edges (d is a sum of unit vectors,
# so the threshold is scale-free).
ANTIPARALLEL_TOL = 1e-12


class FlowKind(enum.Enum):
    LINEAR = "linear"
    MENGER_MELNIKOV = "menger_melnikov"
    BISECTOR = "bisector"


class BisectorSpeedMode(enum.Enum):
    UNIT = "unit"
    NORM_MATCHED = "norm_matched"


class FlowDegeneracyError(Exception):
    """The velocity field is undefined for this polygon state."""


class DegenerateTripleError(FlowDegeneracyError):
    """Two points of a curvature triple coincide exactly."""


class CoincidentVerticesError(FlowDegeneracyError):
    """An edge has exactly zero length, so its unit vector is undefined."""


@dataclass(frozen=True)
class FlowSpec:
    """Which flow to run, plus bisector parameters when applicable.

    ``bisector_speed_mode`` and ``bisector_speed`` must be set if and only if
    ``kind`` is BISECTOR; ``bisector_speed`` applies to UNIT mode only.
    """

    kind: FlowKind
    bisector_speed_mode: BisectorSpeedMode | None = None
    bisector_speed: float | None = None

    def __post_init__(self):
        if self.kind is FlowKind.BISECTOR:
            if self.bisector_speed_mode is None:
                raise ValueError("bisector flow needs a speed mode")
            if self.bisector_speed_mode is BisectorSpeedMode.UNIT:
                if self.bisector_speed is None or self.bisector_speed <= 0.0:
                    raise ValueError("UNIT bisector flow needs a positive speed")
            elif self.bisector_speed is not None:
                raise ValueError("NORM_MATCHED bisector flow takes no speed")
        else:
            if self.bisector_speed_mode is not None or self.bisector_speed is not None:
                raise ValueError("bisector parameters only apply to the bisector flow")

    @classmethod
    def linear(cls) -> "FlowSpec":
        return cls(kind=FlowKind.LINEAR)

    @classmethod
    def menger_melnikov(cls) -> "FlowSpec":
        return cls(kind=FlowKind.MENGER_MELNIKOV)

    @classmethod
    def bisector(
        cls,
        speed_mode: BisectorSpeedMode = BisectorSpeedMode.UNIT,
        speed: float = 1.0,
    ) -> "FlowSpec":
        if speed_mode is BisectorSpeedMode.NORM_MATCHED:
            return cls(kind=FlowKind.BISECTOR, bisector_speed_mode=speed_mode)
        return cls(kind=FlowKind.BISECTOR, bisector_speed_mode=speed_mode, bisector_speed=speed)


@dataclass(frozen=True)
class VelocityField:
    """One complex velocity per vertex, aligned with the polygon's numbering."""

    velocities: np.ndarray

    def __post_init__(self):
        v = np.array(self.velocities, dtype=np.complex128)
        if v.ndim != 1:
            raise ValueError("velocities must be a flat sequence")
        if not np.isfinite(v).all():
            raise ValueError("velocities must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "velocities", v)

    def __len__(self) -> int:
        return self.velocities.size


def _linear_field(z: np.ndarray) -> np.ndarray:
    return 0.5 * (np.roll(z, -1) + np.roll(z, 1)) - z


def _menger_melnikov_field(z: np.ndarray) -> np.ndarray:
    zp = np.roll(z, 1)
    zn = np.roll(z, -1)
    if np.any(zp == z) or np.any(zp == zn):
        raise DegenerateTripleError("coincident points in a curvature triple")
    v = np.zeros_like(z)
    for i in range(z.size):
        circ = circumcircle(zp[i], z[i], zn[i])
        if circ is not None:
            v[i] = (circ.center - z[i]) / (circ.radius * circ.radius)
    return v


def _bisector_direction(z: np.ndarray) -> np.ndarray:
    e_prev = np.roll(z, 1) - z
    e_next = np.roll(z, -1) - z
    lp = np.abs(e_prev)
    ln = np.abs(e_next)
    if np.any(lp == 0.0) or np.any(ln == 0.0):
        raise CoincidentVerticesError("zero-length edge")
    return e_prev / lp + e_next / ln


def _bisector_field(z: np.ndarray, spec: FlowSpec) -> np.ndarray:
    d = _bisector_direction(z)
    if spec.bisector_speed_mode is BisectorSpeedMode.NORM_MATCHED:
        return 0.5 * d
    mag = np.abs(d)
    safe = np.where(mag > ANTIPARALLEL_TOL, mag, 1.0)
    u = spec.bisector_speed * d / safe
    return np.where(mag > ANTIPARALLEL_TOL, u, 0.0 + 0.0j)


def _field_function(spec: FlowSpec):
    # raw ndarray -> ndarray evaluator used by the integrator
    if spec.kind is FlowKind.LINEAR:
        return _linear_field
    if spec.kind is FlowKind.MENGER_MELNIKOV:
        return _menger_melnikov_field
    return lambda z: _bisector_field(z, spec)


def linear_velocity(poly: Polygon) -> VelocityField:
    """Velocity of the linear midpoint-chasing flow.  Defined for every polygon."""
    return VelocityField(_linear_field(poly.z))


def menger_melnikov_velocity(poly: Polygon) -> VelocityField:
    """Curvature velocity toward each vertex's neighbor circumcenter.

    Raises :class:`DegenerateTripleError` when two points of some consecutive
    triple coincide exactly.  Collinear (but distinct) triples get velocity 0.
    """
    return VelocityField(_menger_melnikov_field(poly.z))


def bisector_velocity(poly: Polygon, spec: FlowSpec) -> VelocityField:
    """Velocity along each internal angle bisector, per ``spec``'s mode.

    Raises :class:`CoincidentVerticesError` when an edge has exactly zero
    length.  Raises ValueError when ``spec`` is not a bisector flow.
    """
    if spec.kind is not FlowKind.BISECTOR:
        raise ValueError("spec must describe a bisector flow")
    return VelocityField(_bisector_field(poly.z, spec))


def velocity(poly: Polygon, spec: FlowSpec) -> VelocityField:
    """Velocity field of ``spec``'s flow on ``poly``."""
    return VelocityField(_field_function(spec)(poly.z))
