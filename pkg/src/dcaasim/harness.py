"""Experiment harness: swarm scenarios, the paired DCAA vs UPA-KPC trial
pipeline, the three evaluation metrics (missed targets, angle RMSE, spectral
efficiency) and the Monte-Carlo sweeps behind the CLI.

Every trial is a pure function of (config, center index, trial index,
architecture); randomness comes from named substreams of the master seed, so
sweep outputs are byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import ResolutionResult, dcaa_resolution, upa_resolution, write_resolution_csv
from .fundamentals import DIRECTIVE_DCAA, DIRECTIVE_UPA, ISOTROPIC, ElementPattern
from .geometry import (
    DesignSpec,
    design_layout,
    min_sphere_radius,
    min_sphere_radius_large_m,
    write_layout_json,
)
from .response import DcaaPorts, KpcPorts, build_kpc, envelope, supa_response, write_beam_csv
from .sensing import (
    MusicSpectrum,
    SpectrumPeak,
    find_peaks,
    music_spectrum,
    sample_covariance,
    subspace_split,
    write_estimates_json,
    write_spectrum_csv,
)
from .signalchain import (
    FADING_MODELS,
    SYMBOL_MODELS,
    PathSet,
    channel,
    select_ports,
    substream,
    synthesize_snapshots,
    uplink_rate,
)

ARCHITECTURES = ("dcaa", "upa-kpc")
ELEMENT_MODES = ("isotropic", "directive")

# Substream purpose channels (third RNG path component).
_STREAM_SCENARIO = 0
_STREAM_SELECT = 1
_STREAM_SNAPSHOTS = 2


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one harness run; round-trips through JSON."""

    architectures: tuple[str, ...] = ARCHITECTURES
    m: int = 16
    phi_max_deg: float = 90.0
    theta_max_deg: float = 90.0
    carrier_hz: float = 39e9
    element_pattern: str = "directive"
    n_rf: int = 8
    k_slots: int = 128
    snr_db: float = 20.0
    transmit_power: float = 1.0
    trials: int = 100
    swarm_centers_deg: tuple[tuple[float, float], ...] = ((40.0, 40.0),)
    region_half_width_deg: float = 2.5
    n_targets: int = 3
    include_los: bool = False
    scan_step_deg: float = 0.25
    symbol_model: str = "cscg"
    path_fading: str = "per-slot-phase"
    selection_noise: bool = True
    # Sweeps measure the static channel with a constant-power pilot so the
    # ranking reflects true port magnitudes (plus AWGN); turning this off makes
    # the sweeps see the same symbol/fading draws as the data slots.
    selection_pilot: bool = True
    normalize_spectrum: bool = True
    refine_peaks: bool = True
    master_seed: int = 20260809
    workers: int = 1
    out_dir: str = "results"
    snr_grid_db: tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    sweep_m: tuple[int, ...] = (8, 12, 16, 20, 24)
    sweep_carrier_ghz: tuple[float, ...] = (28.0, 39.0, 60.0, 100.0)
    beam_yaw_deg: float = 0.0
    beam_pitch_deg: float = 0.0
    beam_step_deg: float = 1.0
    resolution_grid_deg: tuple[float, ...] = tuple(np.linspace(5.0, 35.0, 10))

    def __post_init__(self) -> None:
        if any(a not in ARCHITECTURES for a in self.architectures):
            raise ConfigError(f"architectures must be among {ARCHITECTURES}")
        if self.element_pattern not in ELEMENT_MODES:
            raise ConfigError(f"element_pattern must be one of {ELEMENT_MODES}")
        if self.symbol_model not in SYMBOL_MODELS:
            raise ConfigError(f"symbol_model must be one of {SYMBOL_MODELS}")
        if self.path_fading not in FADING_MODELS:
            raise ConfigError(f"path_fading must be one of {FADING_MODELS}")
        if self.m < 2:
            raise ConfigError("m must be >= 2")
        if self.k_slots < 1:
            raise ConfigError("k_slots must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n_targets < 1:
            raise ConfigError("n_targets must be >= 1")
        if self.scan_step_deg <= 0:
            raise ConfigError("scan_step_deg must be positive")
        n_paths = self.n_targets + (1 if self.include_los else 0)
        if n_paths + 1 > self.n_rf:
            raise ConfigError(
                f"n_rf={self.n_rf} too small for model order {n_paths} (need n_rf > paths)"
            )
        hw = self.region_half_width_deg
        for cp, ct in self.swarm_centers_deg:
            if abs(cp) + hw > self.phi_max_deg or abs(ct) + hw > self.theta_max_deg:
                raise ConfigError(f"swarm region at ({cp}, {ct}) leaves the coverage box")

    @property
    def sigma2(self) -> float:
        "Per-element noise power implied by the transmit SNR."
        return self.transmit_power / 10.0 ** (self.snr_db / 10.0)

    def design_spec(self) -> DesignSpec:
        return DesignSpec(
            m=self.m,
            phi_max=np.radians(self.phi_max_deg),
            theta_max=np.radians(self.theta_max_deg),
            carrier_hz=self.carrier_hz,
        )

    def pattern_for(self, arch: str) -> ElementPattern:
        if self.element_pattern == "isotropic":
            return ISOTROPIC
        return DIRECTIVE_DCAA if arch == "dcaa" else DIRECTIVE_UPA

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["architectures"] = list(self.architectures)
        doc["swarm_centers_deg"] = [list(c) for c in self.swarm_centers_deg]
        doc["snr_grid_db"] = list(self.snr_grid_db)
        doc["sweep_m"] = list(self.sweep_m)
        doc["sweep_carrier_ghz"] = list(self.sweep_carrier_ghz)
        doc["resolution_grid_deg"] = list(self.resolution_grid_deg)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        for key in ("architectures", "snr_grid_db", "sweep_m", "sweep_carrier_ghz",
                    "resolution_grid_deg"):
            if key in doc:
                doc[key] = tuple(doc[key])
        if "swarm_centers_deg" in doc:
            doc["swarm_centers_deg"] = tuple(tuple(c) for c in doc["swarm_centers_deg"])
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return RunConfig.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


@dataclass(frozen=True)
class SwarmScenario:
    """Cluster of point targets inside a square angular region."""

    center_azimuth: float
    center_elevation: float
    half_width: float = np.radians(2.5)
    n_targets: int = 3
    include_los: bool = False
    los_azimuth: float | None = None
    los_elevation: float | None = None
    seed: int | None = None


def generate_scenario(scenario: SwarmScenario, rng: np.random.Generator) -> PathSet:
    """Draw the trial's path set: targets uniform in the box, optional LoS first.

    All coefficients have unit magnitude and uniform random phase.
    """
    if rng is None:
        rng = substream(scenario.seed or 0, _STREAM_SCENARIO)
    hw = scenario.half_width
    az = scenario.center_azimuth + rng.uniform(-hw, hw, scenario.n_targets)
    el = scenario.center_elevation + rng.uniform(-hw, hw, scenario.n_targets)
    if scenario.include_los:
        los_az = scenario.los_azimuth
        los_el = scenario.los_elevation
        if los_az is None or los_el is None:
            los_az = rng.uniform(-np.radians(60.0), np.radians(60.0))
            los_el = rng.uniform(-np.radians(60.0), np.radians(60.0))
        az = np.concatenate([[los_az], az])
        el = np.concatenate([[los_el], el])
    coeff = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, az.size))
    return PathSet(az, el, coeff, has_los=scenario.include_los)


def missed_targets(n_true: int, n_detected: int) -> int:
    """Per-trial missed-target count, clamped at zero."""
    return max(0, n_true - n_detected)


def detection_gates(m: int, elevation: float) -> tuple[float, float]:
    """Per-axis matching gates: twice the local spherical-array resolution."""
    res = dcaa_resolution(m, 0.0, elevation)
    gate_h = 2.0 * res.gamma_h if res.defined_h else np.pi
    return gate_h, 2.0 * res.gamma_v


def match_targets(
    true_az: np.ndarray,
    true_el: np.ndarray,
    peaks: list[SpectrumPeak],
    m: int,
) -> list[tuple[int, float, float]]:
    """Assign peaks to true targets and gate the assignment.

    The assignment minimizes the total squared angular error by exhaustive
    permutation (optimal for the small target counts used here); assigned
    pairs outside the per-axis gates are then discarded. Returns
    (target index, azimuth error, elevation error) per surviving pair.
    """
    n_t, n_e = true_az.size, len(peaks)
    if n_e == 0:
        return []
    pk_az = np.array([p.azimuth for p in peaks])
    pk_el = np.array([p.elevation for p in peaks])
    d2 = (true_az[:, None] - pk_az[None, :]) ** 2 + (true_el[:, None] - pk_el[None, :]) ** 2
    best_cost, best_pairs = np.inf, []
    if n_t <= n_e:
        for perm in permutations(range(n_e), n_t):
            cost = sum(d2[i, perm[i]] for i in range(n_t))
            if cost < best_cost:
                best_cost = cost
                best_pairs = [(i, perm[i]) for i in range(n_t)]
    else:
        for perm in permutations(range(n_t), n_e):
            cost = sum(d2[perm[j], j] for j in range(n_e))
            if cost < best_cost:
                best_cost = cost
                best_pairs = [(perm[j], j) for j in range(n_e)]
    matched = []
    for i, j in best_pairs:
        gate_h, gate_v = detection_gates(m, true_el[i])
        dphi = pk_az[j] - true_az[i]
        dtheta = pk_el[j] - true_el[i]
        if abs(dphi) <= gate_h and abs(dtheta) <= gate_v:
            matched.append((i, float(dphi), float(dtheta)))
    return matched


@dataclass(frozen=True)
class TrialOutcome:
    """One architecture's result on one scenario draw."""

    center_deg: tuple[float, float]
    trial: int
    arch: str
    true_azimuth: np.ndarray
    true_elevation: np.ndarray
    peaks: list[SpectrumPeak]
    matched: list[tuple[int, float, float]]
    missed: int
    excess: int
    rate_bits: float


def match_and_rmse(outcomes: list[TrialOutcome]) -> tuple[float, float, int]:
    """(azimuth RMSE, elevation RMSE) in degrees over every matched pair."""
    dphi = [err for o in outcomes for (_i, err, _e) in o.matched]
    dtheta = [err for o in outcomes for (_i, _e, err) in o.matched]
    if not dphi:
        raise ValueError("no matched pairs in any trial")
    rmse_phi = float(np.degrees(np.sqrt(np.mean(np.square(dphi)))))
    rmse_theta = float(np.degrees(np.sqrt(np.mean(np.square(dtheta)))))
    return rmse_phi, rmse_theta, len(dphi)


class ArchRuntime:
    """Per-architecture heavy state shared across trials in one process."""

    def __init__(self, config: RunConfig, arch: str):
        if arch not in ARCHITECTURES:
            raise ConfigError(f"unknown architecture {arch!r}")
        self.arch = arch
        self.config = config
        spec = config.design_spec()
        pattern = config.pattern_for(arch)
        if arch == "dcaa":
            self.layout = design_layout(spec)
            self.ports = DcaaPorts(self.layout, pattern)
        else:
            self.codebook = build_kpc(config.m, spec.phi_max, spec.theta_max)
            self.ports = KpcPorts(self.codebook, pattern)

    def local_resolution(self, azimuth: float, elevation: float) -> ResolutionResult:
        if self.arch == "dcaa":
            return dcaa_resolution(self.config.m, azimuth, elevation)
        return upa_resolution(self.config.m, azimuth, elevation)[0]


_ARCH_CACHE: dict[tuple, ArchRuntime] = {}


def _arch_runtime(config: RunConfig, arch: str) -> ArchRuntime:
    key = (arch, config.m, config.phi_max_deg, config.theta_max_deg,
           config.carrier_hz, config.element_pattern)
    if key not in _ARCH_CACHE:
        _ARCH_CACHE[key] = ArchRuntime(config, arch)
    return _ARCH_CACHE[key]


def scan_grids(config: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    step = config.scan_step_deg
    phi = np.radians(np.arange(-config.phi_max_deg, config.phi_max_deg + 0.5 * step, step))
    theta = np.radians(np.arange(-config.theta_max_deg, config.theta_max_deg + 0.5 * step, step))
    return phi, theta


def estimate_directions(
    runtime: ArchRuntime,
    paths: PathSet,
    config: RunConfig,
    rng_select: np.random.Generator,
    rng_snap: np.random.Generator,
    *,
    sigma2: float | None = None,
    return_spectrum: bool = False,
):
    """Full estimation pipeline for one path set on one architecture.

    Selection, snapshots, covariance, subspace split, MUSIC scan and peak
    extraction; the model order is the (known) number of paths. Returns
    (peaks, selection, rate_bits[, spectrum]).
    """
    cfg = config
    sig2 = cfg.sigma2 if sigma2 is None else sigma2
    port_paths = runtime.ports.response(paths.azimuth, paths.elevation)
    sweep_symbols = "constant" if cfg.selection_pilot else cfg.symbol_model
    sweep_fading = "static" if cfg.selection_pilot else cfg.path_fading
    selection = select_ports(
        port_paths, paths, cfg.n_rf, cfg.m, cfg.transmit_power, sig2, rng_select,
        measurement_noise=cfg.selection_noise,
        symbol_model=sweep_symbols,
        path_fading=sweep_fading,
    )
    h_c = channel(port_paths, paths)[selection.indices]
    rate = uplink_rate(h_c, cfg.transmit_power, sig2, cfg.m) if sig2 > 0 else np.inf
    snaps = synthesize_snapshots(
        port_paths, paths, selection, cfg.k_slots, cfg.m, cfg.transmit_power, sig2,
        rng_snap, symbol_model=cfg.symbol_model, path_fading=cfg.path_fading,
    )
    decomp = subspace_split(sample_covariance(snaps), paths.n_paths)
    phi_grid, theta_grid = scan_grids(cfg)
    spectrum = music_spectrum(
        decomp, runtime.ports, selection, phi_grid, theta_grid,
        normalize=cfg.normalize_spectrum,
    )
    peaks = find_peaks(spectrum, max_peaks=paths.n_paths, refine=cfg.refine_peaks)
    if return_spectrum:
        return peaks, selection, rate, spectrum
    return peaks, selection, rate


def run_music_trial(
    config: RunConfig, center_idx: int, trial: int, arch: str
) -> TrialOutcome:
    """One paired-seed Monte-Carlo trial of the sensing pipeline."""
    runtime = _arch_runtime(config, arch)
    center = config.swarm_centers_deg[center_idx]
    scenario = SwarmScenario(
        center_azimuth=np.radians(center[0]),
        center_elevation=np.radians(center[1]),
        half_width=np.radians(config.region_half_width_deg),
        n_targets=config.n_targets,
        include_los=config.include_los,
    )
    arch_id = ARCHITECTURES.index(arch)
    rng_scene = substream(config.master_seed, center_idx, trial, _STREAM_SCENARIO)
    rng_select = substream(config.master_seed, center_idx, trial, _STREAM_SELECT, arch_id)
    rng_snap = substream(config.master_seed, center_idx, trial, _STREAM_SNAPSHOTS, arch_id)
    paths = generate_scenario(scenario, rng_scene)
    peaks, _selection, rate = estimate_directions(runtime, paths, config, rng_select, rng_snap)
    tgt = paths.target_indices
    true_az, true_el = paths.azimuth[tgt], paths.elevation[tgt]
    matched = match_targets(true_az, true_el, peaks, config.m)
    return TrialOutcome(
        center_deg=(center[0], center[1]),
        trial=trial,
        arch=arch,
        true_azimuth=true_az,
        true_elevation=true_el,
        peaks=peaks,
        matched=matched,
        missed=missed_targets(true_az.size, len(matched)),
        excess=max(0, len(peaks) - true_az.size),
        rate_bits=rate,
    )


def _music_worker(args: tuple) -> tuple[tuple, TrialOutcome]:
    config_doc, center_idx, trial, arch = args
    config = RunConfig.from_dict(config_doc)
    return (center_idx, trial, arch), run_music_trial(config, center_idx, trial, arch)


def _run_units(config: RunConfig, units: list[tuple], worker) -> dict:
    """Execute work units on the configured pool; results keyed deterministically."""
    results: dict = {}
    if config.workers <= 1:
        for u in units:
            key, value = worker(u)
            results[key] = value
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for key, value in pool.map(worker, units, chunksize=1):
                results[key] = value
    return results


def run_montecarlo(config: RunConfig, out_dir: Path | None = None) -> dict:
    """Missed-target and RMSE maps over the configured swarm centers.

    Writes missed_targets.csv, rmse.csv, trials.csv and manifest.json; per-trial
    failures are recorded as rows with missed = n_targets rather than aborting.
    """
    out = _prepare_out(config, out_dir)
    doc = config.to_dict()
    units = [
        (doc, ci, t, arch)
        for ci in range(len(config.swarm_centers_deg))
        for t in range(config.trials)
        for arch in config.architectures
    ]
    results = _run_units(config, units, _music_worker)
    failures = []
    trial_rows = []
    summary_missed = []
    summary_rmse = []
    for ci, center in enumerate(config.swarm_centers_deg):
        for arch in config.architectures:
            outcomes = [results[(ci, t, arch)] for t in range(config.trials)]
            for o in outcomes:
                trial_rows.append(
                    [center[0], center[1], arch, o.trial, o.missed, o.excess, o.rate_bits]
                )
            missed = np.array([o.missed for o in outcomes])
            summary_missed.append(
                [center[0], center[1], arch, config.trials,
                 float(missed.mean()), float(np.median(missed)),
                 float(np.mean([o.excess for o in outcomes]))]
            )
            try:
                rmse_phi, rmse_theta, pairs = match_and_rmse(outcomes)
            except ValueError:
                rmse_phi, rmse_theta, pairs = np.nan, np.nan, 0
                failures.append({"center": list(center), "arch": arch, "reason": "no matches"})
            summary_rmse.append([center[0], center[1], arch, pairs, rmse_phi, rmse_theta])
    _write_csv(out / "missed_targets.csv",
               ["center_phi_deg", "center_theta_deg", "arch", "trials",
                "mean_missed", "median_missed", "mean_excess"], summary_missed)
    _write_csv(out / "rmse.csv",
               ["center_phi_deg", "center_theta_deg", "arch", "matched_pairs",
                "rmse_phi_deg", "rmse_theta_deg"], summary_rmse)
    _write_csv(out / "trials.csv",
               ["center_phi_deg", "center_theta_deg", "arch", "trial",
                "missed", "excess", "rate_bits"], trial_rows)
    _write_manifest(config, out, ["missed_targets.csv", "rmse.csv", "trials.csv"],
                    failures=failures)
    return {
        "missed": summary_missed,
        "rmse": summary_rmse,
        "out_dir": str(out),
    }


def _rate_worker(args: tuple) -> tuple[tuple, float]:
    config_doc, snr_db, trial, arch = args
    config = RunConfig.from_dict(config_doc)
    runtime = _arch_runtime(config, arch)
    center = config.swarm_centers_deg[0]
    scenario = SwarmScenario(
        center_azimuth=np.radians(center[0]),
        center_elevation=np.radians(center[1]),
        half_width=np.radians(config.region_half_width_deg),
        n_targets=config.n_targets,
        include_los=config.include_los,
    )
    arch_id = ARCHITECTURES.index(arch)
    sig2 = config.transmit_power / 10.0 ** (snr_db / 10.0)
    rng_scene = substream(config.master_seed, 0, trial, _STREAM_SCENARIO)
    rng_select = substream(config.master_seed, 0, trial, _STREAM_SELECT, arch_id)
    paths = generate_scenario(scenario, rng_scene)
    port_paths = runtime.ports.response(paths.azimuth, paths.elevation)
    selection = select_ports(
        port_paths, paths, config.n_rf, config.m, config.transmit_power, sig2,
        rng_select, measurement_noise=config.selection_noise,
        symbol_model="constant" if config.selection_pilot else config.symbol_model,
        path_fading="static" if config.selection_pilot else config.path_fading,
    )
    h_c = channel(port_paths, paths)[selection.indices]
    return (snr_db, trial, arch), uplink_rate(h_c, config.transmit_power, sig2, config.m)


def run_rate_sweep(config: RunConfig, out_dir: Path | None = None) -> dict:
    """Mean uplink rate vs transmit SNR for each architecture (paired draws)."""
    out = _prepare_out(config, out_dir)
    doc = config.to_dict()
    units = [
        (doc, snr, t, arch)
        for snr in config.snr_grid_db
        for t in range(config.trials)
        for arch in config.architectures
    ]
    results = _run_units(config, units, _rate_worker)
    rows = []
    means: dict = {}
    for snr in config.snr_grid_db:
        for arch in config.architectures:
            rates = np.array([results[(snr, t, arch)] for t in range(config.trials)])
            rows.append([snr, arch, config.element_pattern, config.trials,
                         float(rates.mean()), float(rates.min()), float(rates.max())])
            means[(snr, arch)] = float(rates.mean())
    _write_csv(out / "rate.csv",
               ["snr_db", "arch", "element_pattern", "trials",
                "mean_rate_bits", "min_rate_bits", "max_rate_bits"], rows)
    _write_manifest(config, out, ["rate.csv"])
    return {"rows": rows, "means": means, "out_dir": str(out)}


def run_radius_sweep(config: RunConfig, out_dir: Path | None = None) -> dict:
    """Minimum sphere radius vs panel size and carrier frequency."""
    out = _prepare_out(config, out_dir)
    rows = []
    for m in config.sweep_m:
        for f_ghz in config.sweep_carrier_ghz:
            spec = DesignSpec(m=m, carrier_hz=f_ghz * 1e9)
            rows.append([m, f_ghz, min_sphere_radius(spec), min_sphere_radius_large_m(spec)])
    _write_csv(out / "radius.csv",
               ["m", "carrier_ghz", "radius_m", "radius_large_m_approx_m"], rows)
    _write_manifest(config, out, ["radius.csv"])
    return {"rows": rows, "out_dir": str(out)}


def run_beampattern(config: RunConfig, out_dir: Path | None = None) -> dict:
    """Single-panel pattern and whole-array envelope over the coverage box."""
    out = _prepare_out(config, out_dir)
    runtime = _arch_runtime(config, "dcaa")
    step = config.beam_step_deg
    phi_deg = np.arange(-config.phi_max_deg, config.phi_max_deg + 0.5 * step, step)
    theta_deg = np.arange(-config.theta_max_deg, config.theta_max_deg + 0.5 * step, step)
    ph, th = np.meshgrid(np.radians(phi_deg), np.radians(theta_deg), indexing="ij")
    pattern = config.pattern_for("dcaa")
    single = supa_response(
        config.m, np.radians(config.beam_yaw_deg), np.radians(config.beam_pitch_deg),
        pattern, ph.ravel(), th.ravel(),
    )
    env, best = envelope(runtime.layout, pattern, ph.ravel(), th.ravel())
    flat_phi = np.degrees(ph.ravel())
    flat_theta = np.degrees(th.ravel())
    write_beam_csv(out / "beampattern.csv", flat_phi, flat_theta, np.abs(single))
    write_beam_csv(out / "envelope.csv", flat_phi, flat_theta, env, best_index=best)
    _write_manifest(config, out, ["beampattern.csv", "envelope.csv"])
    return {"out_dir": str(out), "envelope_min": float(env.min())}


def run_resolution_maps(config: RunConfig, out_dir: Path | None = None) -> dict:
    """Closed-form resolution maps for both architectures on the config grid."""
    out = _prepare_out(config, out_dir)
    grid = np.radians(np.asarray(config.resolution_grid_deg))
    outputs = []
    for arch in config.architectures:
        rows = []
        for el in grid:
            for az in grid:
                if arch == "dcaa":
                    rows.append(dcaa_resolution(config.m, az, el))
                else:
                    rows.append(upa_resolution(config.m, az, el)[0])
        name = f"resolution_{arch}.csv"
        write_resolution_csv(out / name, rows)
        outputs.append(name)
    _write_manifest(config, out, outputs)
    return {"out_dir": str(out)}


def run_music_once(config: RunConfig, out_dir: Path | None = None) -> dict:
    """One scenario per architecture; exports spectrum and estimates."""
    out = _prepare_out(config, out_dir)
    outputs = []
    result = {}
    for arch in config.architectures:
        outcome = run_music_trial(config, 0, 0, arch)
        runtime = _arch_runtime(config, arch)
        rng_scene = substream(config.master_seed, 0, 0, _STREAM_SCENARIO)
        center = config.swarm_centers_deg[0]
        scenario = SwarmScenario(
            center_azimuth=np.radians(center[0]),
            center_elevation=np.radians(center[1]),
            half_width=np.radians(config.region_half_width_deg),
            n_targets=config.n_targets,
            include_los=config.include_los,
        )
        paths = generate_scenario(scenario, rng_scene)
        arch_id = ARCHITECTURES.index(arch)
        rng_select = substream(config.master_seed, 0, 0, _STREAM_SELECT, arch_id)
        rng_snap = substream(config.master_seed, 0, 0, _STREAM_SNAPSHOTS, arch_id)
        _pk, _sel, _rate, spectrum = estimate_directions(
            runtime, paths, config, rng_select, rng_snap, return_spectrum=True
        )
        tag = arch.replace("-", "_")
        write_spectrum_csv(out / f"spectrum_{tag}.csv", spectrum)
        write_estimates_json(out / f"estimates_{tag}.json", outcome.peaks)
        outputs += [f"spectrum_{tag}.csv", f"estimates_{tag}.json"]
        result[arch] = {"missed": outcome.missed, "peaks": len(outcome.peaks)}
    _write_manifest(config, out, outputs)
    result["out_dir"] = str(out)
    return result


def run_design(config: RunConfig, out_dir: Path | None = None) -> dict:
    """Design the spherical layout and export it as JSON."""
    out = _prepare_out(config, out_dir)
    spec = config.design_spec()
    layout = design_layout(spec)
    write_layout_json(layout, out / "layout.json")
    _write_manifest(config, out, ["layout.json"])
    return {
        "n_panels": layout.n_panels,
        "radius_m": layout.radius,
        "out_dir": str(out),
    }


def _prepare_out(config: RunConfig, out_dir: Path | None) -> Path:
    out = Path(out_dir) if out_dir is not None else Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _git_describe() -> str | None:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5.0, check=False,
        )
        return out.stdout.strip() or None
    except (OSError, subprocess.SubprocessError):
        return None


def _write_manifest(config: RunConfig, out: Path, outputs: list[str], failures=None) -> None:
    doc = {
        "package_version": __version__,
        "git_describe": _git_describe(),
        "config": config.to_dict(),
        "master_seed": config.master_seed,
        "seed_scheme": "Philox substreams keyed by (master_seed, center, trial, purpose, arch)",
        "outputs": outputs,
        "failures": failures or [],
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
