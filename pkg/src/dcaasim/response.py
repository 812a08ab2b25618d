"""Complex array responses: single-panel beam patterns, the full spherical
array response with blockage and carrier phase, and the Kronecker-product
DFT-codebook (KPC) responses of the baseline hybrid-beamforming UPA.

All evaluators broadcast over flat direction arrays and return the port axis
first, so a field over a grid is computed as ``resp(phi.ravel(), ...)`` and
reshaped by the caller.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .fundamentals import ElementPattern, dirichlet_kernel, element_gain, wave_vector
from .geometry import DcaaLayout

_HALF_PI = 0.5 * np.pi


def _dirichlet_ratio(x: np.ndarray, m: int) -> np.ndarray:
    """Real ratio sin(pi*m*x/2) / (m*sin(pi*x/2)) with its removable-singularity
    limit (-1)^(k*(m-1)) at x ~ 2k; H_m(x) = exp(j*pi*(m-1)*x/2) * ratio."""
    den = np.sin(_HALF_PI * x)
    singular = np.abs(den) < 1e-9
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sin(_HALF_PI * m * x) / (m * den)
    if np.any(singular):
        k = np.rint(x[singular] / 2.0)
        r[singular] = np.where((k * (m - 1)) % 2 == 0, 1.0, -1.0)
    return r


def supa_array_factor(m: int, yaw: float, pitch: float, phi, theta) -> np.ndarray:
    """Unweighted panel factor f = m^2 * H_m(x1) * H_m(x2) at observation (phi, theta).

    x1 = cos(theta)*sin(phi - yaw) and
    x2 = sin(theta)*cos(pitch) - cos(theta)*sin(pitch)*cos(phi - yaw) are the
    projections of the wave vector on the rotated panel sides. |f| peaks at
    m^2 when (phi, theta) equals the orientation.
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    ct = np.cos(theta)
    x1 = ct * np.sin(phi - yaw)
    x2 = np.sin(theta) * np.cos(pitch) - ct * np.sin(pitch) * np.cos(phi - yaw)
    return m * m * dirichlet_kernel(x1, m) * dirichlet_kernel(x2, m)


def supa_response(
    m: int, yaw: float, pitch: float, pattern: ElementPattern, phi, theta
) -> np.ndarray:
    """Element-weighted panel response sqrt(G(yaw-phi, pitch-theta)) * f."""
    g = element_gain(pattern, np.asarray(yaw) - phi, np.asarray(pitch) - theta)
    return np.sqrt(g) * supa_array_factor(m, yaw, pitch, phi, theta)


def dcaa_response(
    layout: DcaaLayout,
    pattern: ElementPattern,
    phi,
    theta,
    ports: np.ndarray | None = None,
) -> np.ndarray:
    """Response of (a subset of) the spherical array's panels, shape (n_ports, n_dirs).

    Entry = illuminated * exp(-j*2*pi/lambda * k.ref_position) * panel response,
    where the blockage indicator is a hard zero for panels whose center lies in
    the shadow hemisphere (k . center > 0; grazing incidence counts as
    illuminated).

    Direction trig is computed once and shared across panels via angle
    addition, which dominates the cost of dense-grid scans.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if ports is None:
        ports = np.arange(layout.n_panels)
    sp, cp = np.sin(phi), np.cos(phi)
    st, ct = np.sin(theta), np.cos(theta)
    kx, ky, kz = -ct * cp, -ct * sp, -st
    m = layout.m
    wavenum = 2.0 * np.pi / layout.wavelength
    out = np.empty((len(ports), phi.size), dtype=complex)
    for row, n in enumerate(ports):
        se, ce = np.sin(layout.yaw[n]), np.cos(layout.yaw[n])
        sv, cv = np.sin(layout.pitch[n]), np.cos(layout.pitch[n])
        x1 = ct * (sp * ce - cp * se)
        x2 = st * cv - ct * sv * (cp * ce + sp * se)
        amp = m * m * _dirichlet_ratio(x1, m) * _dirichlet_ratio(x2, m)
        amp *= np.sqrt(element_gain(pattern, layout.yaw[n] - phi, layout.pitch[n] - theta))
        cen, ref = layout.centers[n], layout.ref_positions[n]
        illuminated = (kx * cen[0] + ky * cen[1] + kz * cen[2]) <= 0.0
        # Dirichlet phases and the carrier projection fused into one exponential.
        arg = _HALF_PI * (m - 1) * (x1 + x2) - wavenum * (
            kx * ref[0] + ky * ref[1] + kz * ref[2]
        )
        out[row] = np.where(illuminated, amp * np.exp(1j * arg), 0.0)
    return out


def envelope(
    layout: DcaaLayout, pattern: ElementPattern, phi, theta
) -> tuple[np.ndarray, np.ndarray]:
    """Per-direction maximum panel magnitude and the index of the best panel.

    Evaluates panel by panel to keep memory flat over large grids.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    k = wave_vector(phi, theta)
    best = np.zeros(phi.size)
    best_idx = np.zeros(phi.size, dtype=int)
    for n in range(layout.n_panels):
        resp = supa_response(layout.m, layout.yaw[n], layout.pitch[n], pattern, phi, theta)
        mag = np.abs(resp) * ((k @ layout.centers[n]) <= 0.0)
        better = mag > best
        best = np.where(better, mag, best)
        best_idx = np.where(better, n, best_idx)
    return best, best_idx


@dataclass(frozen=True)
class KpcCodebook:
    """Kronecker-product DFT codebook of an m-by-m half-wavelength UPA.

    Codeword (p, q) steers to sin-space coordinates (2p/m, 2q/m); indices run
    p in [-(n_h-1)/2, (n_h-1)/2] and q in [-(n_v-1)/2, (n_v-1)/2].  The flat
    codeword order is q-major, matching ``sin_phi_p``/``sin_theta_q``.
    """

    m: int
    n_h: int
    n_v: int
    p: np.ndarray
    q: np.ndarray
    sin_phi_p: np.ndarray
    sin_theta_q: np.ndarray

    @property
    def n_codewords(self) -> int:
        return self.p.size

    def codeword(self, flat: int) -> np.ndarray:
        """Explicit m^2 phase-only codeword vector for oracle checks.

        Element (m1, m2) of the aperture maps to flat index m1*m + m2 and
        carries phase exp(j*pi*(m1*sin_phi_p + m2*sin_theta_q)).
        """
        idx = np.arange(self.m)
        ch = np.exp(1j * np.pi * idx * self.sin_phi_p[flat])
        cv = np.exp(1j * np.pi * idx * self.sin_theta_q[flat])
        return np.kron(ch, cv)


def build_kpc(m: int, phi_max: float, theta_max: float) -> KpcCodebook:
    """Codebook sized to cover |sin(az)| <= sin(phi_max), |sin(el)| <= sin(theta_max)."""
    if m < 2:
        raise ValueError("m must be >= 2")
    half_h = int(np.floor(np.sin(phi_max) / (2.0 / m)))
    half_v = int(np.floor(np.sin(theta_max) / (2.0 / m)))
    p_axis = np.arange(-half_h, half_h + 1)
    q_axis = np.arange(-half_v, half_v + 1)
    qg, pg = np.meshgrid(q_axis, p_axis, indexing="ij")
    p = pg.ravel()
    q = qg.ravel()
    return KpcCodebook(
        m=m,
        n_h=2 * half_h + 1,
        n_v=2 * half_v + 1,
        p=p,
        q=q,
        sin_phi_p=2.0 * p / m,
        sin_theta_q=2.0 * q / m,
    )


def kpc_array_factor(m: int, sin_phi_p: float, sin_theta_q: float, phi, theta) -> np.ndarray:
    """Beamformed factor f = m^2 * H_m(cos(th)sin(ph) - sin_phi_p) * H_m(sin(th) - sin_theta_q)."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    x1 = np.cos(theta) * np.sin(phi) - sin_phi_p
    x2 = np.sin(theta) - sin_theta_q
    return m * m * dirichlet_kernel(x1, m) * dirichlet_kernel(x2, m)


def kpc_response(
    m: int, sin_phi_p: float, sin_theta_q: float, pattern: ElementPattern, phi, theta
) -> np.ndarray:
    """Codeword beam response sqrt(G(phi, theta)) * f; the element gain uses the
    absolute observation direction (the UPA faces the x-axis)."""
    g = element_gain(pattern, phi, theta)
    return np.sqrt(g) * kpc_array_factor(m, sin_phi_p, sin_theta_q, phi, theta)


def upa_steering_vector(m: int, pattern: ElementPattern, phi: float, theta: float) -> np.ndarray:
    """Element-space response a of the unrotated UPA for one direction.

    Aperture element (m1, m2) at flat index m1*m + m2 has phase
    exp(j*pi*(m1*cos(theta)sin(phi) + m2*sin(theta))); the whole vector is
    scaled by sqrt(G(phi, theta)). Used as the inner-product oracle against
    the closed-form codeword responses.
    """
    idx = np.arange(m)
    a1 = np.exp(1j * np.pi * idx * (np.cos(theta) * np.sin(phi)))
    a2 = np.exp(1j * np.pi * idx * np.sin(theta))
    return np.sqrt(element_gain(pattern, phi, theta)) * np.kron(a1, a2)


def kpc_response_inner(
    codebook: KpcCodebook, flat: int, pattern: ElementPattern, phi: float, theta: float
) -> complex:
    """Oracle form of the codeword response: c^H a over the full aperture."""
    c = codebook.codeword(flat)
    a = upa_steering_vector(codebook.m, pattern, phi, theta)
    return complex(np.vdot(c, a))


class DcaaPorts:
    """Port-response provider for the spherical array: one port per panel."""

    def __init__(self, layout: DcaaLayout, pattern: ElementPattern):
        self.layout = layout
        self.pattern = pattern
        self.n_ports = layout.n_panels
        self.m = layout.m

    def response(self, phi, theta, ports: np.ndarray | None = None) -> np.ndarray:
        return dcaa_response(self.layout, self.pattern, phi, theta, ports)


class KpcPorts:
    """Port-response provider for the baseline UPA: one port per codeword beam."""

    def __init__(self, codebook: KpcCodebook, pattern: ElementPattern):
        self.codebook = codebook
        self.pattern = pattern
        self.n_ports = codebook.n_codewords
        self.m = codebook.m

    def response(self, phi, theta, ports: np.ndarray | None = None) -> np.ndarray:
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if ports is None:
            ports = np.arange(self.n_ports)
        # Dirichlet arguments differ across codewords only by constant shifts.
        m = self.m
        base1 = np.cos(theta) * np.sin(phi)
        base2 = np.sin(theta)
        amp0 = m * m * np.sqrt(element_gain(self.pattern, phi, theta))
        out = np.empty((len(ports), phi.size), dtype=complex)
        for row, c in enumerate(ports):
            x1 = base1 - self.codebook.sin_phi_p[c]
            x2 = base2 - self.codebook.sin_theta_q[c]
            amp = amp0 * _dirichlet_ratio(x1, m) * _dirichlet_ratio(x2, m)
            out[row] = amp * np.exp(1j * (_HALF_PI * (m - 1) * (x1 + x2)))
        return out


def write_beam_csv(path, phi_deg, theta_deg, magnitude, best_index=None) -> None:
    """Flat sweep export: (phi_deg, theta_deg, magnitude[, best_supa_index]) rows."""
    header = ["phi_deg", "theta_deg", "magnitude"]
    if best_index is not None:
        header.append("best_supa_index")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(len(phi_deg)):
            row = [f"{phi_deg[i]:.9g}", f"{theta_deg[i]:.9g}", f"{magnitude[i]:.9g}"]
            if best_index is not None:
                row.append(str(int(best_index[i])))
            w.writerow(row)
