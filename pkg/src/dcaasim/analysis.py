"""Beam-pattern structure: null curves, main-lobe beamwidths, closed-form
angular resolutions for both architectures, and a numerical null-search oracle
that ground-truths the closed forms.

Angular resolution is half the null-to-null main-lobe width along each axis
cut through the pattern peak; an axis is flagged undefined when no null
brackets the peak.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

HALF_PI = 0.5 * np.pi
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class NullSearchError(RuntimeError):
    """No pattern null found inside the search range."""


@dataclass(frozen=True)
class NullCurveSpec:
    """One family of pattern-null curves.

    ``family`` is one of ``supa-u1``/``supa-u2`` (panel side-vector factors,
    order p/q) or ``kpc-azimuth``/``kpc-elevation`` (codeword factors, order
    n/m). The source is an orientation (yaw, pitch) for panels or sin-space
    codeword coordinates for the UPA.
    """

    family: str
    order: int
    m: int
    yaw: float = 0.0
    pitch: float = 0.0
    sin_phi_p: float = 0.0
    sin_theta_q: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in ("supa-u1", "supa-u2", "kpc-azimuth", "kpc-elevation"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.order == 0:
            raise ValueError("order must be nonzero")
        if self.family == "supa-u1" and abs(self.order) > self.m / 2:
            raise ValueError("|p| must be <= m/2 for the u1 family")
        if self.family == "supa-u2" and abs(self.order) > self.m:
            raise ValueError("|q| must be <= m for the u2 family")


def _in_domain(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    v = v[(v >= -HALF_PI - 1e-12) & (v <= HALF_PI + 1e-12)]
    return np.unique(np.clip(np.sort(v), -HALF_PI, HALF_PI))


def null_directions(spec: NullCurveSpec, fixed_axis: str, fixed_value: float) -> np.ndarray:
    """All null positions of one curve family along a fixed-axis cut.

    ``fixed_axis`` is ``"theta"`` (solve for azimuth) or ``"phi"`` (solve for
    elevation); ``fixed_value`` is the fixed coordinate in radians. Returns a
    sorted array of solutions in [-pi/2, pi/2]; empty when the transcendental
    condition has no real solution on the cut.
    """
    if fixed_axis not in ("phi", "theta"):
        raise ValueError("fixed_axis must be 'phi' or 'theta'")
    m = spec.m
    rhs = 2.0 * spec.order / m
    sols: list[float] = []
    if spec.family == "supa-u1":
        # cos(theta) * sin(phi - yaw) = rhs
        if fixed_axis == "theta":
            s = rhs / np.cos(fixed_value) if np.cos(fixed_value) != 0 else np.inf
            if abs(s) <= 1.0:
                base = np.arcsin(s)
                for root in (base, np.pi - base):
                    for k in (-1, 0, 1):
                        sols.append(spec.yaw + root + 2.0 * np.pi * k)
        else:
            denom = np.sin(fixed_value - spec.yaw)
            if denom != 0.0:
                c = rhs / denom
                if 0.0 <= c <= 1.0:
                    sols.extend([np.arccos(c), -np.arccos(c)])
    elif spec.family == "supa-u2":
        # sin(theta)cos(pitch) - cos(theta)sin(pitch)cos(phi - yaw) = rhs
        if fixed_axis == "phi":
            a = np.cos(spec.pitch)
            b = -np.sin(spec.pitch) * np.cos(fixed_value - spec.yaw)
            amp = np.hypot(a, b)
            if amp >= abs(rhs) and amp > 0.0:
                shift = np.arctan2(b, a)
                base = np.arcsin(rhs / amp)
                for root in (base, np.pi - base):
                    for k in (-1, 0, 1):
                        sols.append(root - shift + 2.0 * np.pi * k)
        else:
            denom = np.cos(fixed_value) * np.sin(spec.pitch)
            if abs(denom) > 1e-15:
                c = (np.sin(fixed_value) * np.cos(spec.pitch) - rhs) / denom
                if abs(c) <= 1.0:
                    base = np.arccos(c)
                    for root in (base, -base):
                        for k in (-1, 0, 1):
                            sols.append(spec.yaw + root + 2.0 * np.pi * k)
    elif spec.family == "kpc-elevation":
        # sin(theta) - sin_theta_q = rhs; independent of the fixed azimuth
        v = spec.sin_theta_q + rhs
        if abs(v) <= 1.0:
            sols.append(np.arcsin(v))
    else:  # kpc-azimuth: cos(theta)sin(phi) - sin_phi_p = rhs
        ct = np.cos(fixed_value)
        if fixed_axis != "theta":
            raise ValueError("kpc-azimuth nulls are solved for phi at fixed theta")
        if ct > 1e-15:
            v = (spec.sin_phi_p + rhs) / ct
            if abs(v) <= 1.0:
                sols.append(np.arcsin(v))
    return _in_domain(sols)


def supa_beamwidth(m: int, pitch: float) -> tuple[float, float]:
    """Null-to-null (azimuth, elevation) main-lobe widths of a panel.

    Elevation width 2*arcsin(2/m) is pitch-independent; the azimuth width
    2*arcsin(2/(m*cos(pitch))) widens with pitch and is undefined once
    2/(m*cos(pitch)) > 1.
    """
    arg = 2.0 / (m * np.cos(pitch))
    if arg > 1.0:
        raise ValueError(f"azimuth beamwidth undefined at pitch {pitch}")
    return 2.0 * np.arcsin(arg), 2.0 * np.arcsin(2.0 / m)


@dataclass(frozen=True)
class ResolutionResult:
    """Angular resolution at one desired direction: half null-to-null widths."""

    azimuth: float
    elevation: float
    gamma_v: float
    gamma_h: float
    defined_v: bool = True
    defined_h: bool = True


def dcaa_resolution(m: int, azimuth: float, elevation: float) -> ResolutionResult:
    """Closed-form spherical-array resolution at a desired direction.

    gamma_v = arcsin(2/m) everywhere; gamma_h = arcsin(2/(m*cos(elevation))),
    undefined where the argument exceeds 1.
    """
    gv = np.arcsin(2.0 / m)
    arg = 2.0 / (m * np.cos(elevation))
    if arg > 1.0:
        return ResolutionResult(azimuth, elevation, gv, np.nan, True, False)
    return ResolutionResult(azimuth, elevation, gv, np.arcsin(arg), True, True)


@dataclass(frozen=True)
class UpaResolutionTerms:
    """Branch scalars and null sets behind the UPA closed form.

    ``x``, ``y``, ``z`` select the piecewise branch; ``a``..``g`` are the
    candidate null positions entering it (NaN where the arcsin/arccos argument
    leaves [-1, 1]). The sets hold every enumerated null around the beam peak.
    """

    x: float
    y: float
    z: float
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    g: float
    theta_above: np.ndarray = field(repr=False)
    theta_below: np.ndarray = field(repr=False)
    phi_above: np.ndarray = field(repr=False)
    phi_below: np.ndarray = field(repr=False)
    branch: str = ""


def _upa_theta_nulls(m: int, sp: float, st: float, ct: float) -> np.ndarray:
    """Every elevation-cut null of the codeword pattern (cut through the peak)."""
    sols = []
    for mm in range(-m, m + 1):
        if mm == 0:
            continue
        v = st + 2.0 * mm / m
        if abs(v) <= 1.0:
            base = np.arcsin(v)
            sols.extend([base, np.pi - base, -np.pi - base])
    if sp > 1e-15:
        for nn in range(-m, m + 1):
            if nn == 0:
                continue
            w = ct * (1.0 + 2.0 * nn / (m * sp))
            if abs(w) <= 1.0:
                base = np.arccos(w)
                sols.extend([base, -base])
    return np.asarray(sols, dtype=float)


def _upa_phi_nulls(m: int, sp: float, ct: float) -> np.ndarray:
    """Every azimuth-cut null (fixed elevation at the codeword elevation)."""
    sols = []
    for nn in range(-m, m + 1):
        if nn == 0:
            continue
        v = (sp + 2.0 * nn / m) / ct
        if abs(v) <= 1.0:
            base = np.arcsin(v)
            sols.extend([base, np.pi - base, -np.pi - base])
    return np.asarray(sols, dtype=float)


def _split(nulls: np.ndarray, center: float) -> tuple[np.ndarray, np.ndarray]:
    above = np.sort(nulls[nulls > center + 1e-12])
    below = np.sort(nulls[nulls < center - 1e-12])
    return above, below


def upa_resolution(
    m: int, azimuth: float, elevation: float
) -> tuple[ResolutionResult, UpaResolutionTerms]:
    """Closed-form baseline-UPA resolution for the codeword steered to
    sin-space coordinates (sin(azimuth), sin(elevation)).

    The beam peak sits at (arcsin(sin(az)/cos(el)), el); both resolutions are
    measured about that peak. Stated for the positive quadrant; other
    quadrants are mapped by sign reflection of the pattern. Axes with no
    bracketing nulls are flagged undefined (including the case where the peak
    itself does not exist).
    """
    sgn_p, sgn_t = np.sign(azimuth) or 1.0, np.sign(elevation) or 1.0
    sp = np.sin(abs(azimuth))
    st = np.sin(abs(elevation))
    ct = np.cos(elevation)
    nan = float("nan")
    if sp / ct > 1.0:
        empty = np.array([])
        terms = UpaResolutionTerms(
            x=st + 2.0 / m, y=nan, z=nan, a=nan, b=nan, c=nan, d=nan, e=nan,
            f=nan, g=nan, theta_above=empty, theta_below=empty,
            phi_above=empty, phi_below=empty, branch="no-peak",
        )
        return ResolutionResult(azimuth, elevation, nan, nan, False, False), terms

    th_above, th_below = _split(_upa_theta_nulls(m, sp, st, ct), abs(elevation))
    peak_phi = np.arcsin(sp / ct)
    ph_above, ph_below = _split(_upa_phi_nulls(m, sp, ct), peak_phi)

    gv = 0.5 * (th_above[0] - th_below[-1]) if th_above.size and th_below.size else nan
    gh = 0.5 * (ph_above[0] - ph_below[-1]) if ph_above.size and ph_below.size else nan

    # Branch bookkeeping mirroring the piecewise closed form.
    x = st + 2.0 / m
    y = ct * (1.0 + 2.0 / (m * sp)) if sp > 1e-15 else np.inf
    z = ct * (1.0 - 2.0 / (m * sp)) if sp > 1e-15 else np.inf
    e_ = np.arcsin(x) if x <= 1.0 else nan
    f_ = np.arcsin(st - 2.0 / m)
    g_ = np.pi - f_
    acz = np.arccos(z) if abs(z) <= 1.0 else nan
    acy = np.arccos(y) if abs(y) <= 1.0 else nan

    def _reduce(fn, *vals):
        finite = [v for v in vals if not np.isnan(v)]
        return fn(finite) if finite else nan

    a_ = _reduce(min, e_, acz)
    b_ = _reduce(max, f_, -acz)
    c_ = _reduce(max, f_, acy)
    # First null above the peak when the principal arcsin branch is gone:
    # the smaller of the wrapped solution and the azimuth-factor null.
    d_ = _reduce(min, g_, acz)
    if x <= 1.0 and y > 1.0 and (np.isnan(acz) or abs(z) >= 1.0):
        branch = "E-F"
    elif x > 1.0 and y > 1.0 and (np.isnan(acz) or abs(z) >= 1.0):
        branch = "G-F"
    elif x <= 1.0 and y > 1.0:
        branch = "A-B"
    elif x <= 1.0 and y <= 1.0:
        branch = "A-C"
    elif x > 1.0 and y > 1.0:
        branch = "D-B"
    else:
        branch = "D-C"
    terms = UpaResolutionTerms(
        x=x, y=y, z=z, a=a_, b=b_, c=c_, d=d_, e=e_, f=f_, g=g_,
        theta_above=sgn_t * th_above, theta_below=sgn_t * th_below,
        phi_above=sgn_p * ph_above, phi_below=sgn_p * ph_below, branch=branch,
    )
    res = ResolutionResult(
        azimuth, elevation, gv, gh, defined_v=not np.isnan(gv), defined_h=not np.isnan(gh)
    )
    return res, terms


def branch_value(terms: UpaResolutionTerms) -> float:
    """Half the piecewise-branch combination selected by (x, y, z)."""
    table = {
        "E-F": terms.e - terms.f,
        "G-F": terms.g - terms.f,
        "A-B": terms.a - terms.b,
        "A-C": terms.a - terms.c,
        "D-B": terms.d - terms.b,
        "D-C": terms.d - terms.c,
    }
    if terms.branch not in table:
        return float("nan")
    return 0.5 * table[terms.branch]


def _golden_min(fun, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section minimum of a scalar unimodal function on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    t = 0.5 * (a + b)
    return t, fun(t)


def _first_null(cut, center: float, sign: float, threshold: float,
                step: float, tol: float, search_range: float) -> float:
    """First magnitude zero of ``cut`` on one side of ``center``.

    Samples the whole side at ``step`` spacing, brackets interior local minima
    in walk order and refines each by golden section; the first refined
    minimum below ``threshold`` is the null.
    """
    n = max(int(np.ceil(search_range / step)), 4)
    ts = center + sign * step * np.arange(1, n + 1)
    vs = np.abs(cut(ts))
    interior = np.flatnonzero((vs[1:-1] <= vs[:-2]) & (vs[1:-1] <= vs[2:])) + 1
    for i in interior:
        lo, hi = sorted((ts[i - 1], ts[i + 1]))
        t, v = _golden_min(lambda t: float(np.abs(cut(np.array([t]))[0])), lo, hi, tol)
        if v < threshold:
            return t
    raise NullSearchError(
        f"no null below {threshold:.3g} within {search_range:.3f} rad "
        f"on side {sign:+.0f} of {center:.6f}"
    )


def numerical_resolution_oracle(
    beam,
    azimuth: float,
    elevation: float,
    m: int,
    *,
    step: float = 2e-4,
    tol: float = 1e-10,
    search_range: float = HALF_PI,
) -> ResolutionResult:
    """Ground-truth resolution by scanning a beam evaluator for its first nulls.

    ``beam(phi, theta)`` must accept arrays and peak at the desired direction;
    the null detection threshold is 1e-8 * m^2 on the response magnitude.
    Raises NullSearchError when a cut has no null inside ``search_range``.
    """
    threshold = 1e-8 * m * m
    th_cut = lambda t: beam(np.full_like(t, azimuth), t)
    ph_cut = lambda p: beam(p, np.full_like(p, elevation))
    t_hi = _first_null(th_cut, elevation, +1.0, threshold, step, tol, search_range)
    t_lo = _first_null(th_cut, elevation, -1.0, threshold, step, tol, search_range)
    p_hi = _first_null(ph_cut, azimuth, +1.0, threshold, step, tol, search_range)
    p_lo = _first_null(ph_cut, azimuth, -1.0, threshold, step, tol, search_range)
    return ResolutionResult(
        azimuth, elevation, 0.5 * (t_hi - t_lo), 0.5 * (p_hi - p_lo)
    )


def write_resolution_csv(path, rows: list[ResolutionResult]) -> None:
    """Resolution-map export, one row per desired direction."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["phi_deg", "theta_deg", "gamma_v_deg", "gamma_h_deg", "defined_v", "defined_h"])
        for r in rows:
            w.writerow(
                [
                    f"{np.degrees(r.azimuth):.9g}",
                    f"{np.degrees(r.elevation):.9g}",
                    f"{np.degrees(r.gamma_v):.9g}" if r.defined_v else "nan",
                    f"{np.degrees(r.gamma_h):.9g}" if r.defined_h else "nan",
                    int(r.defined_v),
                    int(r.defined_h),
                ]
            )
