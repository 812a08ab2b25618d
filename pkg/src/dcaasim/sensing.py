"""2D MUSIC over the selected array ports: sample covariance, subspace split,
spatial-spectrum evaluation on an angle grid, and peak extraction with
sub-grid refinement.

The spectrum uses the noise-subspace projection of the equivalent steering
vector (the selected ports' response). Grid cells whose steering vector is
numerically zero (every selected panel shadowed) are flagged invalid and
excluded from the peak search.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .signalchain import SelectionMap, SnapshotMatrix

_BLOCKED_NORM2 = 1e-24


def sample_covariance(snapshots: SnapshotMatrix | np.ndarray) -> np.ndarray:
    """Sample covariance C = Y @ Y^H / K of the snapshot matrix."""
    y = snapshots.samples if isinstance(snapshots, SnapshotMatrix) else np.asarray(snapshots)
    if y.ndim != 2 or y.shape[1] < 1:
        raise ValueError("snapshot matrix must be (n_rf, k) with k >= 1")
    return (y @ y.conj().T) / y.shape[1]


@dataclass(frozen=True)
class SubspaceDecomposition:
    """Eigenstructure of the sample covariance, eigenvalues descending."""

    signal: np.ndarray = field(repr=False)
    noise: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray

    @property
    def n_sources(self) -> int:
        return self.signal.shape[1]


def subspace_split(cov: np.ndarray, n_sources: int) -> SubspaceDecomposition:
    """Hermitian EVD split into signal (top n_sources) and noise eigenvectors."""
    n = cov.shape[0]
    if not (0 < n_sources < n):
        raise ValueError(f"model order {n_sources} must be in (0, {n})")
    w, v = np.linalg.eigh(cov)  # ascending
    w, v = w[::-1], v[:, ::-1]
    return SubspaceDecomposition(
        signal=v[:, :n_sources], noise=v[:, n_sources:], eigenvalues=w
    )


@dataclass(frozen=True)
class SpectrumPeak:
    azimuth: float
    elevation: float
    value: float


@dataclass(frozen=True)
class MusicSpectrum:
    """Spatial spectrum over a rectangular (azimuth, elevation) grid."""

    phi_grid: np.ndarray
    theta_grid: np.ndarray
    values: np.ndarray = field(repr=False)
    valid: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if np.any(np.diff(self.phi_grid) <= 0) or np.any(np.diff(self.theta_grid) <= 0):
            raise ValueError("grids must be strictly increasing")


def music_spectrum(
    decomp: SubspaceDecomposition,
    ports,
    selection: SelectionMap,
    phi_grid: np.ndarray,
    theta_grid: np.ndarray,
    *,
    normalize: bool = True,
    max_block: int = 400_000,
) -> MusicSpectrum:
    """Evaluate the MUSIC spectrum over the grid using the selected ports.

    For each direction the equivalent steering vector h is the selected ports'
    response; the raw spectrum is 1 / (h^H En En^H h). With ``normalize``
    (default) the steering vector is unit-normalized first, which makes the
    spectrum scale-free across directions -- necessary here because this
    manifold's norm varies by orders of magnitude (shadowing, element
    patterns), unlike a conventional equal-norm array manifold.
    """
    en = decomp.noise
    n_phi, n_theta = phi_grid.size, theta_grid.size
    values = np.empty((n_phi, n_theta))
    valid = np.empty((n_phi, n_theta), dtype=bool)
    rows_per_block = max(1, max_block // max(n_theta, 1))
    en_h = en.conj().T.copy()
    for start in range(0, n_phi, rows_per_block):
        stop = min(start + rows_per_block, n_phi)
        ph, th = np.meshgrid(phi_grid[start:stop], theta_grid, indexing="ij")
        h = ports.response(ph.ravel(), th.ravel(), selection.indices)
        norm2 = np.einsum("ij,ij->j", h.real, h.real) + np.einsum("ij,ij->j", h.imag, h.imag)
        proj = en_h @ h
        quad = np.einsum("ij,ij->j", proj.real, proj.real) + np.einsum(
            "ij,ij->j", proj.imag, proj.imag
        )
        ok = norm2 > _BLOCKED_NORM2
        num = norm2 if normalize else 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.where(ok, num / np.maximum(quad, 1e-300), 0.0)
        values[start:stop] = p.reshape(stop - start, n_theta)
        valid[start:stop] = ok.reshape(stop - start, n_theta)
    return MusicSpectrum(phi_grid, theta_grid, values, valid)


def _refine_parabolic(values: np.ndarray, i: int, j: int) -> tuple[float, float]:
    """Per-axis log-parabola vertex offset in cells, clamped to +-0.5."""
    window = values[i - 1 : i + 2, j - 1 : j + 2]
    if np.any(window <= 0):
        return 0.0, 0.0
    logv = np.log(window)
    deltas = []
    for a, b, c in ((logv[0, 1], logv[1, 1], logv[2, 1]), (logv[1, 0], logv[1, 1], logv[1, 2])):
        denom = a - 2.0 * b + c
        deltas.append(0.0 if denom >= -1e-300 else float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5)))
    return deltas[0], deltas[1]


def find_peaks(
    spectrum: MusicSpectrum, max_peaks: int, *, refine: bool = True
) -> list[SpectrumPeak]:
    """Strict 8-neighborhood local maxima, strongest first, at most ``max_peaks``.

    Border cells are compared against their in-grid neighbors only; invalid
    cells can neither be peaks nor suppress one. With ``refine`` each peak is
    shifted by a per-axis quadratic fit over its 3x3 neighborhood.
    """
    vals = np.where(spectrum.valid, spectrum.values, -np.inf)
    padded = np.pad(vals, 1, constant_values=-np.inf)
    n_phi, n_theta = vals.shape
    neighbor_max = np.full(vals.shape, -np.inf)
    for di in range(3):
        for dj in range(3):
            if di == 1 and dj == 1:
                continue
            np.maximum(neighbor_max, padded[di : di + n_phi, dj : dj + n_theta], out=neighbor_max)
    mask = (vals > neighbor_max) & np.isfinite(vals)
    ii, jj = np.nonzero(mask)
    if ii.size == 0:
        return []
    order = np.argsort(-vals[ii, jj], kind="stable")[:max_peaks]
    dp = spectrum.phi_grid[1] - spectrum.phi_grid[0] if spectrum.phi_grid.size > 1 else 0.0
    dt = spectrum.theta_grid[1] - spectrum.theta_grid[0] if spectrum.theta_grid.size > 1 else 0.0
    peaks = []
    for o in order:
        i, j = int(ii[o]), int(jj[o])
        phi, theta = spectrum.phi_grid[i], spectrum.theta_grid[j]
        if (
            refine
            and 0 < i < n_phi - 1
            and 0 < j < n_theta - 1
            and np.all(spectrum.valid[i - 1 : i + 2, j - 1 : j + 2])
        ):
            di_, dj_ = _refine_parabolic(spectrum.values, i, j)
            phi = phi + di_ * dp
            theta = theta + dj_ * dt
        peaks.append(SpectrumPeak(float(phi), float(theta), float(vals[i, j])))
    return peaks


def write_spectrum_csv(path, spectrum: MusicSpectrum) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["phi_deg", "theta_deg", "p_music", "valid"])
        for i, phi in enumerate(spectrum.phi_grid):
            for j, theta in enumerate(spectrum.theta_grid):
                w.writerow(
                    [
                        f"{np.degrees(phi):.9g}",
                        f"{np.degrees(theta):.9g}",
                        f"{spectrum.values[i, j]:.9g}",
                        int(spectrum.valid[i, j]),
                    ]
                )


def write_estimates_json(path, peaks: list[SpectrumPeak]) -> None:
    doc = [
        {
            "phi_deg": float(np.degrees(p.azimuth)),
            "theta_deg": float(np.degrees(p.elevation)),
            "value": p.value,
        }
        for p in peaks
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
