"""Elementary building blocks: angles, rotations, wave vectors, the Dirichlet
kernel and the parameterized element radiation pattern.

All angles are in radians internally; degrees appear only at CLI/IO
boundaries. Every function here is pure and broadcasts over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0
"Propagation speed in m/s."

HALF_PI = 0.5 * np.pi


@dataclass(frozen=True)
class Direction:
    """Signal arrival / observation direction, azimuth and elevation in radians.

    Both angles live in [-pi/2, pi/2]: azimuth measured from the positive
    x-axis in the xy-plane, elevation from the xy-plane (positive above).
    """

    azimuth: float
    elevation: float

    def __post_init__(self) -> None:
        if not (-HALF_PI <= self.azimuth <= HALF_PI):
            raise ValueError(f"azimuth {self.azimuth} outside [-pi/2, pi/2]")
        if not (-HALF_PI <= self.elevation <= HALF_PI):
            raise ValueError(f"elevation {self.elevation} outside [-pi/2, pi/2]")

    @classmethod
    def from_degrees(cls, azimuth_deg: float, elevation_deg: float) -> "Direction":
        return cls(np.radians(azimuth_deg), np.radians(elevation_deg))


@dataclass(frozen=True)
class Orientation:
    """Panel boresight: yaw about z (from the positive x-axis) and pitch about y.

    Pitch must stay strictly inside (-pi/2, pi/2); a panel pitched to the pole
    has no defined yaw.
    """

    yaw: float
    pitch: float

    def __post_init__(self) -> None:
        if not abs(self.pitch) < HALF_PI:
            raise ValueError(f"pitch {self.pitch} outside (-pi/2, pi/2)")


def wave_vector(azimuth, elevation) -> np.ndarray:
    """Unit propagation vector(s) for a plane wave arriving from (azimuth, elevation).

    Points from the source toward the array:
    k = [-cos(el)cos(az), -cos(el)sin(az), -sin(el)].  Broadcasts; the
    component axis is last, so scalar input gives shape (3,) and array input
    shape (..., 3).
    """
    az = np.asarray(azimuth, dtype=float)
    el = np.asarray(elevation, dtype=float)
    ce = np.cos(el)
    return np.stack(
        np.broadcast_arrays(-ce * np.cos(az), -ce * np.sin(az), -np.sin(el)),
        axis=-1,
    )


def boresight_vector(yaw, pitch) -> np.ndarray:
    """Outward unit vector [cos(pitch)cos(yaw), cos(pitch)sin(yaw), sin(pitch)]."""
    y = np.asarray(yaw, dtype=float)
    p = np.asarray(pitch, dtype=float)
    cp = np.cos(p)
    return np.stack(
        np.broadcast_arrays(cp * np.cos(y), cp * np.sin(y), np.sin(p)), axis=-1
    )


def rotation_matrix(yaw: float, pitch: float) -> np.ndarray:
    """3x3 rotation R_z(yaw) @ R_y(pitch) carrying a yz-plane panel to its orientation.

    No self-spin: the panel's first side vector [0,1,0] maps to
    [-sin(yaw), cos(yaw), 0] and the second side vector [0,0,1] to
    [-cos(yaw)sin(pitch), -sin(yaw)sin(pitch), cos(pitch)].

    Raises ValueError for |pitch| >= pi/2.
    """
    if not abs(pitch) < HALF_PI:
        raise ValueError(f"pitch {pitch} outside (-pi/2, pi/2)")
    ce, se = np.cos(yaw), np.sin(yaw)
    cv, sv = np.cos(pitch), np.sin(pitch)
    r_z = np.array([[ce, -se, 0.0], [se, ce, 0.0], [0.0, 0.0, 1.0]])
    r_y = np.array([[cv, 0.0, -sv], [0.0, 1.0, 0.0], [sv, 0.0, cv]])
    return r_z @ r_y


def side_vectors(yaw, pitch) -> tuple[np.ndarray, np.ndarray]:
    """Rotated panel side vectors (u1', u2'), vectorized over yaw/pitch arrays."""
    y = np.asarray(yaw, dtype=float)
    p = np.asarray(pitch, dtype=float)
    zeros = np.zeros(np.broadcast(y, p).shape)
    u1 = np.stack(np.broadcast_arrays(-np.sin(y), np.cos(y), zeros), axis=-1)
    u2 = np.stack(
        np.broadcast_arrays(-np.cos(y) * np.sin(p), -np.sin(y) * np.sin(p), np.cos(p)),
        axis=-1,
    )
    return u1, u2


# Below this the ratio form of the Dirichlet kernel is 0/0; fall back to the
# explicit exponential sum.
_DIRICHLET_SINGULAR = 1e-9


def dirichlet_kernel(x, m: int):
    """Normalized exponential sum H_m(x) = (1/m) * sum_{k=0}^{m-1} exp(j*pi*k*x).

    Equals exp(j*pi*(m-1)*x/2) * sin(pi*m*x/2) / (m*sin(pi*x/2)) away from
    even-integer x; at those removable singularities the explicit sum is used,
    giving the analytic limit (magnitude 1). |H_m| <= 1 everywhere.

    Accepts scalars or arrays; m >= 1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    den = np.sin(HALF_PI * x)
    singular = np.abs(den) < _DIRICHLET_SINGULAR
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(1j * HALF_PI * (m - 1) * x) * np.sin(HALF_PI * m * x) / (m * den)
    if np.any(singular):
        k = np.arange(m)
        out[singular] = np.exp(1j * np.pi * np.outer(x[singular], k)).sum(axis=1) / m
    return out[0] if scalar else out


@dataclass(frozen=True)
class ElementPattern:
    """Per-element radiation pattern, parameterized as in the 3GPP model.

    ``gain_db(dphi, dtheta) = a0_db - min(min(12*(dtheta/theta_3db)^2, sla_v_db)
    + min(12*(dphi/phi_3db)^2, a_max_db), a_max_db)``, so the boresight gain is
    exactly ``a0_db``.  ``isotropic=True`` short-circuits to unit gain
    everywhere.
    """

    a0_db: float = 0.0
    theta_3db: float = np.pi
    phi_3db: float = np.pi
    a_max_db: float = 30.0
    sla_v_db: float = 30.0
    isotropic: bool = False

    def __post_init__(self) -> None:
        if self.theta_3db <= 0 or self.phi_3db <= 0:
            raise ValueError("3 dB beamwidths must be positive")
        if self.a_max_db < 0 or self.sla_v_db < 0:
            raise ValueError("a_max_db and sla_v_db must be non-negative")


ISOTROPIC = ElementPattern(isotropic=True)
# Test-campaign presets: the spherical array uses narrow high-gain elements
# (each panel serves one sector), the baseline UPA uses wide unity-gain ones.
DIRECTIVE_DCAA = ElementPattern(a0_db=12.79, theta_3db=0.3 * np.pi, phi_3db=0.3 * np.pi)
DIRECTIVE_UPA = ElementPattern(a0_db=0.0, theta_3db=np.pi, phi_3db=np.pi)


def element_gain(pattern: ElementPattern, dphi, dtheta):
    """Linear power gain of one element at angular offsets (dphi, dtheta) rad."""
    dphi = np.asarray(dphi, dtype=float)
    dtheta = np.asarray(dtheta, dtype=float)
    if pattern.isotropic:
        return np.ones(np.broadcast(dphi, dtheta).shape)
    att_v = np.minimum(12.0 * (dtheta / pattern.theta_3db) ** 2, pattern.sla_v_db)
    att_h = np.minimum(12.0 * (dphi / pattern.phi_3db) ** 2, pattern.a_max_db)
    gain_db = pattern.a0_db - np.minimum(att_v + att_h, pattern.a_max_db)
    return 10.0 ** (gain_db / 10.0)
