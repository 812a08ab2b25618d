"""Uplink signal path: multipath channel over the array ports, energy-driven
port selection, snapshot synthesis with element-summed noise, and the uplink
rate.

Randomness follows a counter-based substream contract: every consumer derives
its own Philox generator from (master seed, *integer path), so Monte-Carlo
results are reproducible and independent of scheduling order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

SYMBOL_MODELS = ("cscg", "qpsk", "constant")
FADING_MODELS = ("static", "per-slot-phase", "rayleigh")


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent counter-based generator for one work unit.

    Streams with distinct (seed, path) tuples never collide, and a stream's
    output does not depend on how many sibling streams exist or run first.
    """
    ss = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=tuple(int(x) for x in path)
    )
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class PathSet:
    """Propagation paths: directions plus complex base coefficients.

    Index 0 is the line-of-sight path when one is present (``has_los``);
    the remaining entries are target reflections.
    """

    azimuth: np.ndarray
    elevation: np.ndarray
    coeff: np.ndarray
    has_los: bool = False

    def __post_init__(self) -> None:
        if not (self.azimuth.size == self.elevation.size == self.coeff.size):
            raise ValueError("path arrays must have equal length")
        if self.azimuth.size == 0:
            raise ValueError("at least one path required")
        if not np.all(np.isfinite(self.coeff)) or np.any(self.coeff == 0):
            raise ValueError("path coefficients must be finite and nonzero")

    @property
    def n_paths(self) -> int:
        return self.azimuth.size

    @property
    def target_indices(self) -> np.ndarray:
        return np.arange(1 if self.has_los else 0, self.n_paths)


@dataclass(frozen=True)
class SelectionMap:
    """Ports routed to the RF chains: distinct indices, ascending."""

    indices: np.ndarray
    n_ports: int

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices)
        if idx.size != np.unique(idx).size:
            raise ValueError("selected indices must be distinct")
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_ports):
            raise ValueError("selected index out of range")

    @property
    def n_rf(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class SnapshotMatrix:
    """Post-selection receive samples over K slots plus the transmit bookkeeping."""

    samples: np.ndarray = field(repr=False)
    symbols: np.ndarray = field(repr=False)
    noise_power: float
    transmit_power: float

    @property
    def n_rf(self) -> int:
        return self.samples.shape[0]

    @property
    def n_slots(self) -> int:
        return self.samples.shape[1]


def channel(port_paths: np.ndarray, paths: PathSet) -> np.ndarray:
    """Superposed port-domain channel h = sum_l coeff_l * response(:, l).

    ``port_paths`` holds the per-path port responses, shape (n_ports, n_paths).
    """
    return port_paths @ paths.coeff


def _symbols(model: str, k: int, p_t: float, rng: np.random.Generator) -> np.ndarray:
    if model == "cscg":
        return np.sqrt(p_t / 2.0) * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    if model == "qpsk":
        return np.sqrt(p_t) * np.exp(1j * (np.pi / 4.0 + 0.5 * np.pi * rng.integers(0, 4, k)))
    if model == "constant":
        return np.sqrt(p_t) * np.ones(k, dtype=complex)
    raise ValueError(f"unknown symbol model {model!r}")


def _path_gains(model: str, n_paths: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Per-slot multiplicative path gains, shape (n_paths, k)."""
    if model == "static":
        return np.ones((n_paths, k), dtype=complex)
    if model == "per-slot-phase":
        return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, (n_paths, k)))
    if model == "rayleigh":
        return np.sqrt(0.5) * (
            rng.standard_normal((n_paths, k)) + 1j * rng.standard_normal((n_paths, k))
        )
    raise ValueError(f"unknown path fading model {model!r}")


def _port_noise(m: int, sigma2: float, shape, rng: np.random.Generator) -> np.ndarray:
    """Noise after directly summing m^2 elements: CN(0, m^2 * sigma2) per port."""
    scale = np.sqrt(m * m * sigma2 / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def select_ports(
    port_paths: np.ndarray,
    paths: PathSet,
    n_rf: int,
    m: int,
    p_t: float,
    sigma2: float,
    rng: np.random.Generator,
    *,
    measurement_noise: bool = True,
    symbol_model: str = "cscg",
    path_fading: str = "per-slot-phase",
) -> SelectionMap:
    """Energy-maximizing port selection.

    Sweeps the ports in ceil(n_ports/n_rf) groups, one slot per sweep, and
    keeps the n_rf ports with the largest measured energy (ties to the lower
    index). With ``measurement_noise`` off, the sweep sees noiseless energies
    of the static channel, so the result is exactly the top |h| ports.
    """
    n_ports = port_paths.shape[0]
    if n_rf > n_ports:
        raise ValueError("n_rf cannot exceed the number of ports")
    if n_rf == n_ports:
        return SelectionMap(np.arange(n_ports), n_ports)
    energy = np.empty(n_ports)
    if not measurement_noise:
        energy[:] = np.abs(channel(port_paths, paths)) ** 2 * p_t
    else:
        n_sweeps = int(np.ceil(n_ports / n_rf))
        for s in range(n_sweeps):
            active = np.arange(s * n_rf, min((s + 1) * n_rf, n_ports))
            gains = _path_gains(path_fading, paths.n_paths, 1, rng)[:, 0]
            x = _symbols(symbol_model, 1, p_t, rng)[0]
            h = port_paths[active] @ (paths.coeff * gains)
            z = _port_noise(m, sigma2, active.size, rng)
            energy[active] = np.abs(h * x + z) ** 2
    order = np.argsort(-energy, kind="stable")[:n_rf]
    return SelectionMap(np.sort(order), n_ports)


def synthesize_snapshots(
    port_paths: np.ndarray,
    paths: PathSet,
    selection: SelectionMap,
    k: int,
    m: int,
    p_t: float,
    sigma2: float,
    rng: np.random.Generator,
    *,
    symbol_model: str = "cscg",
    path_fading: str = "per-slot-phase",
) -> SnapshotMatrix:
    """K post-selection receive slots: Y[:, k] = A_sel @ (coeff * gains_k) * x_k + z_k.

    Noise is CN(0, m^2*sigma2) per selected port and slot. Deterministic for a
    given generator state; with static fading and constant symbols the
    noiseless column is exactly the selected channel entries.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    a_sel = port_paths[selection.indices]
    x = _symbols(symbol_model, k, p_t, rng)
    gains = _path_gains(path_fading, paths.n_paths, k, rng)
    signal = a_sel @ (paths.coeff[:, None] * gains) * x[None, :]
    noise = _port_noise(m, sigma2, (selection.n_rf, k), rng) if sigma2 > 0 else 0.0
    return SnapshotMatrix(
        samples=signal + noise,
        symbols=x,
        noise_power=sigma2,
        transmit_power=p_t,
    )


def uplink_rate(h_c: np.ndarray, p_t: float, sigma2: float, m: int) -> float:
    """Uplink spectral efficiency log2(1 + ||h_c||^2 * p_t / (m^2 * sigma2))."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    snr = float(np.vdot(h_c, h_c).real) * p_t / (m * m * sigma2)
    return float(np.log2(1.0 + snr))


def scenario_from_dict(doc: dict, rng: np.random.Generator | None = None) -> tuple[PathSet, dict]:
    """Parse the scenario JSON document into a PathSet plus run parameters.

    Path coefficients may be given explicitly (alpha_re/alpha_im) or as the
    string "random", drawing unit magnitude with uniform phase from ``rng``.
    """
    entries = doc["paths"]
    az = np.array([np.radians(p["phi_deg"]) for p in entries], dtype=float)
    el = np.array([np.radians(p["theta_deg"]) for p in entries], dtype=float)
    coeff = np.empty(len(entries), dtype=complex)
    for i, p in enumerate(entries):
        if p.get("alpha_re") == "random" or p.get("alpha") == "random":
            if rng is None:
                rng = substream(int(doc.get("seed", 0)), 0)
            coeff[i] = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        else:
            coeff[i] = complex(p["alpha_re"], p.get("alpha_im", 0.0))
    p_t = doc.get("Pt_linear")
    if p_t is None and "Pt_dbm" in doc:
        p_t = 10.0 ** ((doc["Pt_dbm"] - 30.0) / 10.0)
    params = {
        "K": int(doc.get("K", 128)),
        "Pt": 1.0 if p_t is None else float(p_t),
        "sigma2": float(doc.get("sigma2", 0.0)),
        "N_RF": int(doc.get("N_RF", 8)),
        "seed": int(doc.get("seed", 0)),
        "symbol_model": doc.get("symbol_model", "cscg"),
        "path_fading": doc.get("path_fading", "per-slot-phase"),
    }
    return PathSet(az, el, coeff, has_los=bool(doc.get("has_los", False))), params


def load_scenario(path, rng: np.random.Generator | None = None) -> tuple[PathSet, dict]:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh), rng)
