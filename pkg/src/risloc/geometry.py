"""Coordinate frames, poses, and the geometric maps to delays, Dopplers and angles.

Conventions used throughout the package:

* Azimuth is measured in a device's body frame from the body +x axis toward
  +y; elevation from the body xy-plane toward +z.  Azimuth lies in (-pi, pi],
  elevation in [-pi/2, pi/2].
* A pose stores the rotation matrix whose columns are the body axes expressed
  in the global frame, so a global vector u maps into the body frame as R^T u.
* The clock offset is added to UE-terminating delays only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroDistance

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def as_vec3(v) -> np.ndarray:
    """Coerce input to a finite float64 3-vector."""
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite 3-vector: {a}")
    return a


def rotation_from_euler(yaw: float, pitch: float, roll: float) -> np.ndarray:
    """Rotation matrix from intrinsic Z-Y-X Euler angles (radians).

    Columns are the rotated body axes in the global frame; the result is
    orthonormal with determinant +1.
    """
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cr, sr = math.cos(roll), math.sin(roll)
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    return rz @ ry @ rx


@dataclass(frozen=True, eq=False)
class AnglePair:
    """Azimuth/elevation pair in radians."""

    az: float
    el: float

    def __post_init__(self):
        if not (-math.pi < self.az <= math.pi):
            raise ValueError(f"azimuth {self.az} outside (-pi, pi]")
        if not (-math.pi / 2 <= self.el <= math.pi / 2):
            raise ValueError(f"elevation {self.el} outside [-pi/2, pi/2]")

    def as_array(self) -> np.ndarray:
        return np.array([self.az, self.el])


@dataclass(frozen=True, eq=False)
class Pose:
    """Position plus orientation (columns = body axes in the global frame)."""

    position: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec3(self.position))
        r = np.asarray(self.orientation, dtype=float).reshape(3, 3)
        if np.linalg.norm(r.T @ r - np.eye(3)) >= 1e-12 * 3 or np.linalg.det(r) < 0:
            raise ValueError("orientation is not a proper rotation matrix")
        object.__setattr__(self, "orientation", r)


@dataclass(frozen=True, eq=False)
class Satellite:
    """Anchor with a known pose and constant velocity."""

    pose: Pose
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "velocity", as_vec3(self.velocity))


@dataclass(frozen=True, eq=False)
class Scenario:
    """Full geometric world: UE, satellites, RIS poses, clock offset.

    ``sat_shape`` and ``ris_shape`` carry the UPA dimensions (nx, ny) shared
    by all satellites and all RISs, respectively.
    """

    ue_position: np.ndarray
    clock_offset: float
    satellites: tuple
    rises: tuple
    sat_shape: tuple = (2, 2)
    ris_shape: tuple = (10, 10)

    def __post_init__(self):
        object.__setattr__(self, "ue_position", as_vec3(self.ue_position))
        object.__setattr__(self, "satellites", tuple(self.satellites))
        object.__setattr__(self, "rises", tuple(self.rises))
        if len(self.satellites) < 1:
            raise ValueError("scenario needs at least one satellite")
        for sat in self.satellites:
            if np.linalg.norm(sat.pose.position - self.ue_position) == 0.0:
                raise ValueError("satellite coincides with UE")
            for ris in self.rises:
                if np.linalg.norm(sat.pose.position - ris.position) == 0.0:
                    raise ValueError("satellite coincides with a RIS")
        for ris in self.rises:
            if np.linalg.norm(ris.position - self.ue_position) == 0.0:
                raise ValueError("RIS coincides with UE")

    @property
    def n_satellites(self) -> int:
        return len(self.satellites)

    @property
    def n_ris(self) -> int:
        return len(self.rises)


def direction_angles(observer: Pose, target) -> AnglePair:
    """Body-frame azimuth/elevation of ``target`` as seen from ``observer``."""
    d = as_vec3(target) - observer.position
    r = np.linalg.norm(d)
    if r == 0.0:
        raise ZeroDistance("target coincides with observer position")
    u = observer.orientation.T @ (d / r)
    el = math.asin(min(1.0, max(-1.0, u[2])))
    az = math.atan2(u[1], u[0])
    if az <= -math.pi:  # atan2 may return -pi; fold onto (-pi, pi]
        az = math.pi
    return AnglePair(az=az, el=el)


def path_delay(a, b, offset: float = 0.0) -> float:
    """One-hop propagation delay ||a - b|| / c plus a clock offset (seconds)."""
    d = np.linalg.norm(as_vec3(a) - as_vec3(b))
    if d == 0.0:
        raise ZeroDistance("zero-length propagation path")
    return d / SPEED_OF_LIGHT + offset


def doppler_shift(v, p_from, p_to, wavelength: float) -> float:
    """Doppler shift v^T (p_to - p_from) / (lambda ||p_to - p_from||) in Hz.

    ``p_from`` is the moving anchor, ``p_to`` the static endpoint.
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    d = as_vec3(p_to) - as_vec3(p_from)
    r = np.linalg.norm(d)
    if r == 0.0:
        raise ZeroDistance("zero-length Doppler baseline")
    return float(as_vec3(v) @ d) / (wavelength * r)
