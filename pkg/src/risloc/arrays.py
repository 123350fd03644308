"""Uniform planar array geometry, steering vectors and angular derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimension
from .geometry import SPEED_OF_LIGHT, AnglePair


@dataclass(frozen=True, eq=False)
class UpaGeometry:
    """Half-wavelength UPA element coordinates in the body frame.

    ``element_coords`` is 3 x N with the elements on a centered grid in the
    body z = 0 plane, column order row-major (x index fastest).
    """

    nx: int
    ny: int
    element_coords: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny


def upa_coordinates(nx: int, ny: int, wavelength: float) -> UpaGeometry:
    """Build a centered nx-by-ny UPA with lambda/2 spacing."""
    if nx < 1 or ny < 1:
        raise InvalidDimension(f"UPA dimensions must be >= 1, got {nx}x{ny}")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    d = wavelength / 2.0
    xs = (np.arange(nx) - (nx - 1) / 2.0) * d
    ys = (np.arange(ny) - (ny - 1) / 2.0) * d
    gx, gy = np.meshgrid(xs, ys, indexing="xy")  # x index fastest when flattened
    coords = np.vstack([gx.ravel(), gy.ravel(), np.zeros(nx * ny)])
    return UpaGeometry(nx=nx, ny=ny, element_coords=coords)


def direction_vector(angle: AnglePair) -> np.ndarray:
    """Unit propagation direction [cos(az)cos(el), sin(az)cos(el), sin(el)]."""
    ca, sa = math.cos(angle.az), math.sin(angle.az)
    ce, se = math.cos(angle.el), math.sin(angle.el)
    return np.array([ca * ce, sa * ce, se])


def _direction_vector_grad(angle: AnglePair):
    ca, sa = math.cos(angle.az), math.sin(angle.az)
    ce, se = math.cos(angle.el), math.sin(angle.el)
    d_az = np.array([-sa * ce, ca * ce, 0.0])
    d_el = np.array([-ca * se, -sa * se, ce])
    return d_az, d_el


def array_response(geom: UpaGeometry, angle: AnglePair, fc: float) -> np.ndarray:
    """Narrowband steering vector exp(-j 2 pi fc / c * P^T t(angle))."""
    if fc <= 0:
        raise ValueError("carrier frequency must be positive")
    k = 2.0 * math.pi * fc / SPEED_OF_LIGHT
    phase = geom.element_coords.T @ direction_vector(angle)
    return np.exp(-1j * k * phase)


def array_response_jacobian(geom: UpaGeometry, angle: AnglePair, fc: float):
    """Analytic (d a / d az, d a / d el) of the steering vector."""
    if fc <= 0:
        raise ValueError("carrier frequency must be positive")
    k = 2.0 * math.pi * fc / SPEED_OF_LIGHT
    a = array_response(geom, angle, fc)
    t_az, t_el = _direction_vector_grad(angle)
    da_az = (-1j * k) * (geom.element_coords.T @ t_az) * a
    da_el = (-1j * k) * (geom.element_coords.T @ t_el) * a
    return da_az, da_el


def ris_cascade_vector(geom: UpaGeometry, phi_ru: AnglePair, phi_sr: AnglePair, fc: float):
    """Cascade vector b = a(phi_ru) * a(phi_sr) and its phi_ru derivatives.

    The Hadamard structure keeps every entry unit modulus; phi_sr is a known
    constant so only the phi_ru factor is differentiated.
    """
    a_sr = array_response(geom, phi_sr, fc)
    b = array_response(geom, phi_ru, fc) * a_sr
    da_az, da_el = array_response_jacobian(geom, phi_ru, fc)
    return b, da_az * a_sr, da_el * a_sr
