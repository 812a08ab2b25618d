"""Spherical array geometry: panel orientation design, sphere radius, placement
and collision verification.

The array is built from N identical m-by-m directly-connected panels tangent
to a sphere. Orientations are laid out in elevation layers spaced by
arcsin(2/m), and within each layer azimuths spaced by arcsin(2/(m*cos(pitch))),
so that adjacent main lobes meet at their first nulls.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fundamentals import SPEED_OF_LIGHT, boresight_vector, side_vectors


class SeparationError(ValueError):
    """Two panels are closer than the collision bound allows."""

    def __init__(self, message: str, pair: tuple[int, int], separation: float):
        super().__init__(message)
        self.pair = pair
        self.separation = separation


@dataclass(frozen=True)
class DesignSpec:
    """Input parameters of the spherical array design.

    ``m`` is the per-side element count of each panel, ``phi_max`` and
    ``theta_max`` bound the azimuth/elevation coverage, ``carrier_hz`` sets the
    wavelength and ``spacing`` the element pitch (default half-wavelength).
    """

    m: int = 16
    phi_max: float = 0.5 * np.pi
    theta_max: float = 0.5 * np.pi
    carrier_hz: float = 39e9
    spacing: float | None = None

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if not (0.0 < self.phi_max <= 0.5 * np.pi):
            raise ValueError("phi_max must be in (0, pi/2]")
        if not (0.0 < self.theta_max <= 0.5 * np.pi):
            raise ValueError("theta_max must be in (0, pi/2]")
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        if self.spacing is not None and self.spacing <= 0:
            raise ValueError("spacing must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def d(self) -> float:
        "Element spacing in meters."
        return 0.5 * self.wavelength if self.spacing is None else self.spacing


def elevation_layer_count(spec: DesignSpec) -> int:
    """Number of elevation layers on each side of the equator."""
    return int(np.floor(spec.theta_max / np.arcsin(2.0 / spec.m)))


def azimuth_count(spec: DesignSpec, pitch: float) -> int:
    """Number of azimuth steps on each side of yaw 0 within one layer.

    Zero when the azimuth step arcsin(2/(m*cos(pitch))) is undefined (polar
    cap), leaving a single panel in that layer.
    """
    arg = 2.0 / (spec.m * np.cos(pitch))
    if arg > 1.0:
        return 0
    step = np.arcsin(arg)
    return int(np.floor(spec.phi_max / step))


def design_orientations(spec: DesignSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Orientation grid of the design: arrays (p, q, yaw, pitch).

    Layers are indexed q in [-Q, Q] with pitch q*arcsin(2/m); within layer q,
    panels are indexed p in [-P(q), P(q)] with yaw p*arcsin(2/(m*cos(pitch))).
    Returned in ascending (q, p) order, which makes the flat index
    n = p + P(q) + 1 + sum_{k<q} (2*P(k)+1) equal to 1 + position.
    """
    n_layers = elevation_layer_count(spec)
    dv = np.arcsin(2.0 / spec.m)
    ps, qs, yaws, pitches = [], [], [], []
    for q in range(-n_layers, n_layers + 1):
        pitch = q * dv
        n_az = azimuth_count(spec, pitch)
        step = 0.0 if n_az == 0 else np.arcsin(2.0 / (spec.m * np.cos(pitch)))
        for p in range(-n_az, n_az + 1):
            ps.append(p)
            qs.append(q)
            yaws.append(p * step)
            pitches.append(pitch)
    return (
        np.array(ps, dtype=int),
        np.array(qs, dtype=int),
        np.array(yaws, dtype=float),
        np.array(pitches, dtype=float),
    )


def min_sphere_radius(spec: DesignSpec) -> float:
    """Smallest sphere radius at which no two panel circumcircles overlap.

    The critical state has adjacent circumcircles (radius m*d/sqrt(2)) tangent,
    giving R = m*d / (sqrt(2) * tan(arcsin(2/m)/2)).
    """
    if spec.m < 3:
        raise ValueError("m must be >= 3 for a tangent-circumcircle radius")
    half = 0.5 * np.arcsin(2.0 / spec.m)
    return spec.m * spec.d / (np.sqrt(2.0) * np.tan(half))


def min_sphere_radius_large_m(spec: DesignSpec) -> float:
    """Large-m approximation m^2 * wavelength / (2*sqrt(2)) of the minimum radius."""
    return spec.m**2 * spec.wavelength / (2.0 * np.sqrt(2.0))


@dataclass(frozen=True)
class DcaaLayout:
    """A fully placed spherical array.

    Panel n (0-based internally; the exported flat index is 1-based) has
    orientation (yaw[n], pitch[n]), layer labels (p[n], q[n]), center
    ``radius * boresight`` and reference antenna ``center - (m*d/2)*(u1'+u2')``.
    """

    m: int
    spacing: float
    wavelength: float
    radius: float
    p: np.ndarray
    q: np.ndarray
    yaw: np.ndarray
    pitch: np.ndarray
    centers: np.ndarray = field(repr=False)
    ref_positions: np.ndarray = field(repr=False)

    @property
    def n_panels(self) -> int:
        return self.yaw.size

    @property
    def boresights(self) -> np.ndarray:
        "Unit vectors toward each panel center, shape (N, 3)."
        return self.centers / self.radius

    def flat_indices(self) -> np.ndarray:
        """1-based flat indices reconstructed from the (p, q) layer labels."""
        q_vals = np.unique(self.q)
        per_layer = {int(qv): int(np.max(self.p[self.q == qv])) for qv in q_vals}
        out = np.empty(self.n_panels, dtype=int)
        for i in range(self.n_panels):
            qi = int(self.q[i])
            below = sum(2 * per_layer[int(qv)] + 1 for qv in q_vals if qv < qi)
            out[i] = int(self.p[i]) + per_layer[qi] + 1 + below
        return out


def place_supas(
    p: np.ndarray,
    q: np.ndarray,
    yaw: np.ndarray,
    pitch: np.ndarray,
    radius: float,
    spec: DesignSpec,
) -> DcaaLayout:
    """Place oriented panels on a sphere of the given radius.

    Centers sit outward along each boresight so that a panel faces the signals
    it is oriented toward. Raises SeparationError when the radius is below the
    tangent-circumcircle minimum.
    """
    r_min = min_sphere_radius(spec)
    if radius < r_min * (1.0 - 1e-12):
        raise SeparationError(
            f"radius {radius:.6g} m below collision minimum {r_min:.6g} m",
            pair=(-1, -1),
            separation=radius,
        )
    centers = radius * boresight_vector(yaw, pitch)
    u1, u2 = side_vectors(yaw, pitch)
    ref = centers - 0.5 * spec.m * spec.d * (u1 + u2)
    return DcaaLayout(
        m=spec.m,
        spacing=spec.d,
        wavelength=spec.wavelength,
        radius=radius,
        p=p,
        q=q,
        yaw=yaw,
        pitch=pitch,
        centers=centers,
        ref_positions=ref,
    )


def design_layout(spec: DesignSpec, radius: float | None = None) -> DcaaLayout:
    """Run the whole design chain: orientations, minimum radius, placement."""
    p, q, yaw, pitch = design_orientations(spec)
    r = min_sphere_radius(spec) if radius is None else radius
    return place_supas(p, q, yaw, pitch, r, spec)


def pairwise_separations(layout: DcaaLayout) -> np.ndarray:
    """Condensed upper-triangle angular separations between panel centers."""
    g = np.clip(layout.boresights @ layout.boresights.T, -1.0, 1.0)
    iu = np.triu_indices(layout.n_panels, k=1)
    return np.arccos(g[iu])


def verify_separation(layout: DcaaLayout) -> float:
    """Minimum pairwise angular separation between panel centers, in radians.

    Checks the design bound arcsin(2/m) and, when the sphere is at (or above)
    the minimum radius, the tangency bound 2*arctan(r_circ/R). Returns +inf
    for a single-panel layout; raises SeparationError naming the offending
    pair when a bound is violated.
    """
    n = layout.n_panels
    if n < 2:
        return np.inf
    g = np.clip(layout.boresights @ layout.boresights.T, -1.0, 1.0)
    np.fill_diagonal(g, -1.0)
    flat = int(np.argmax(g))
    i, j = divmod(flat, n)
    min_sep = float(np.arccos(g[i, j]))
    bound = np.arcsin(2.0 / layout.m)
    circ = layout.m * layout.spacing / np.sqrt(2.0)
    tangency = 2.0 * np.arctan(circ / layout.radius)
    required = max(bound, min(tangency, bound))  # tangency <= bound once R >= R_min
    if min_sep < required - 1e-12:
        raise SeparationError(
            f"panels {i} and {j} separated by {min_sep:.9f} rad < bound {required:.9f} rad",
            pair=(i, j),
            separation=min_sep,
        )
    return min_sep


def same_layer_adjacent_cos(spec: DesignSpec, pitch: float) -> float:
    """cos of the separation between azimuth-adjacent panels in one layer.

    Closed form cos^2(v)*sqrt(1 - 4/(m*cos(v))^2) + sin^2(v); defined while
    cos(pitch) > 2/m.
    """
    c = np.cos(pitch)
    arg = 2.0 / (spec.m * c)
    if arg > 1.0:
        raise ValueError("layer has a single panel; no adjacent pair")
    return c * c * np.sqrt(1.0 - arg * arg) + np.sin(pitch) ** 2


def layout_to_dict(layout: DcaaLayout) -> dict:
    """JSON-ready description of the layout."""
    idx = layout.flat_indices()
    return {
        "M": layout.m,
        "d_m": layout.spacing,
        "lambda_m": layout.wavelength,
        "R_m": layout.radius,
        "supas": [
            {
                "n": int(idx[i]),
                "p": int(layout.p[i]),
                "q": int(layout.q[i]),
                "eta_rad": float(layout.yaw[i]),
                "vartheta_rad": float(layout.pitch[i]),
                "center_m": [float(v) for v in layout.centers[i]],
                "ref_antenna_m": [float(v) for v in layout.ref_positions[i]],
            }
            for i in range(layout.n_panels)
        ],
    }


def write_layout_json(layout: DcaaLayout, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(layout_to_dict(layout), fh, indent=2)
        fh.write("\n")
