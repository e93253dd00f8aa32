"""Scan orchestration and data files.

``run_scan`` walks the piezo voltage ramp, simulating each point's photon
stream, detection and coincidence counting for its dwell time.  Every scan
point gets a child seed derived from (scan seed, point index) with the
splitmix64 mixer, so points are independent of evaluation order and of the
worker count; results are collected by index.  Workers are threads: the heavy
lifting is in numpy, and thread scheduling cannot perturb the per-point
streams.

The scan CSV schema is fixed:
    point,voltage_V,x_m,phase_rad,envelope,N_A,N_B,N_c
Reports are flat key,value CSV files.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import (
    CLASSICAL_G2_BOUND,
    CLASSICAL_VISIBILITY_LIMIT,
    CorrelationReport,
    FringeSeries,
    averaged_g2,
    eta21,
    fringe_period,
    g2_rate,
    g2_ratio,
    visibility,
    robust_extrema,
)
from .coincidence import StepCount, accumulate, coincide
from .config import ExperimentConfig, config_to_dict
from .detection import detect_bin
from .errors import ConfigError, DataError, PstreamError
from .interferometer import OpticalState, envelope, pzt_phase, singles_fringe, voltage_to_displacement
from .seeding import derive_seed
from .source import mean_photon_number, sample_batch

SCAN_COLUMNS = ["point", "voltage_V", "x_m", "phase_rad", "envelope", "N_A", "N_B", "N_c"]


@dataclass(frozen=True)
class ScanPoint:
    point: int
    voltage: float
    x: float
    phase: float
    envelope: float
    n_a: int
    n_b: int
    n_c: int


@dataclass(frozen=True)
class ScanResult:
    points: list[ScanPoint]
    seed: int
    config: dict


def _scan_voltages(cfg: ExperimentConfig) -> np.ndarray:
    pzt = cfg.optics.pzt
    volts = np.linspace(pzt.voltage_min, pzt.voltage_max, cfg.scan.n_points)
    if cfg.scan.jitter_volts > 0.0:
        rng = np.random.default_rng(derive_seed(cfg.scan.seed, 0xA11CE))
        cycles = rng.uniform(1.0, 3.0)
        phase0 = rng.uniform(0.0, 2.0 * math.pi)
        idx = np.arange(cfg.scan.n_points)
        volts = volts + cfg.scan.jitter_volts * np.sin(
            2.0 * math.pi * cycles * idx / cfg.scan.n_points + phase0
        )
        volts = np.clip(volts, pzt.voltage_min, pzt.voltage_max)
    return volts


def _point_optics(cfg: ExperimentConfig, volt: float) -> tuple[float, float, float, OpticalState]:
    x = voltage_to_displacement(volt, cfg.optics.pzt)
    phase = pzt_phase(x, cfg.source.wavelength)
    scale = (
        cfg.optics.effective_coherence_length
        if cfg.scan.asymmetric_walkoff
        else cfg.optics.laser_coherence_length
    )
    state = OpticalState(
        phase=phase,
        intrinsic_visibility=cfg.optics.intrinsic_visibility,
        scan_position=x,
        effective_coherence_length=scale,
        laser_coherence_length=cfg.optics.laser_coherence_length,
    )
    return x, phase, state.envelope_gain(), state


def _simulate_point(cfg: ExperimentConfig, index: int, volt: float) -> ScanPoint:
    x, phase, gain, state = _point_optics(cfg, volt)
    mean = cfg.source.mean_photon()
    point_seed = derive_seed(cfg.scan.seed, index)
    n_steps = round(cfg.scan.seconds_per_point / cfg.ccm.step)
    if abs(n_steps * cfg.ccm.step - cfg.scan.seconds_per_point) > 1e-9:
        raise ConfigError("seconds_per_point must be a whole number of ccm steps")
    slots_per_step = int(cfg.ccm.step / cfg.source.dead_time)
    steps = []
    for j in range(n_steps):
        step_seed = derive_seed(point_seed, j)
        batch = sample_batch(mean, slots_per_step, derive_seed(step_seed, 0), bin_index=j)
        train_a, train_b = detect_bin(
            batch, state, cfg.detectors, derive_seed(step_seed, 1), slot_width=cfg.source.dead_time
        )
        n_c, _ = coincide(train_a, train_b, cfg.ccm)
        steps.append(StepCount(n_a=len(train_a), n_b=len(train_b), n_c=n_c))
    bins = accumulate(steps, cfg.ccm)
    return ScanPoint(
        point=index,
        voltage=float(volt),
        x=x,
        phase=phase,
        envelope=float(gain),
        n_a=sum(b.n_a for b in bins),
        n_b=sum(b.n_b for b in bins),
        n_c=sum(b.n_c for b in bins),
    )


def run_scan(cfg: ExperimentConfig, workers: int = 1) -> ScanResult:
    """Simulate the full voltage scan; reproducible for a fixed config seed."""
    volts = _scan_voltages(cfg)

    def job(args: tuple[int, float]) -> ScanPoint:
        index, volt = args
        try:
            return _simulate_point(cfg, index, volt)
        except PstreamError as exc:
            raise type(exc)(f"scan point {index}: {exc}") from exc

    tasks = list(enumerate(volts.tolist()))
    if workers <= 1:
        points = [job(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(job, tasks))
    return ScanResult(points=points, seed=cfg.scan.seed, config=config_to_dict(cfg))


def scan_series(result: ScanResult) -> tuple[FringeSeries, FringeSeries, FringeSeries, np.ndarray]:
    """Decompose a scan into (singles A, singles B, coincidence, envelope) series."""
    xs = np.array([p.x for p in result.points])
    gains = np.array([p.envelope for p in result.points])
    series_a = FringeSeries(xs, np.array([p.n_a for p in result.points], dtype=float), "A")
    series_b = FringeSeries(xs, np.array([p.n_b for p in result.points], dtype=float), "B")
    series_c = FringeSeries(xs, np.array([p.n_c for p in result.points], dtype=float), "C")
    return series_a, series_b, series_c, gains


def build_report(
    result: ScanResult,
    dead_time: float = 22e-9,
    accumulation: float | None = None,
    delta_t: float = 10e-9,
    center_halfwidth: float = 2e-6,
) -> CorrelationReport:
    """Correlation summary for a scan.

    ``accumulation`` defaults to the per-point dwell recorded in the config
    echo, falling back to 1 s.  The bunched-event count entering eta21 is the
    robust maximum of the coincidence fringe, matching how a counter reads the
    crossing-point rate.
    """
    if accumulation is None:
        accumulation = float(result.config.get("scan", {}).get("seconds_per_point", 1.0))
    series_a, series_b, series_c, _ = scan_series(result)
    window = (-center_halfwidth, center_halfwidth)
    vis_a = visibility(series_a, window)
    vis_b = visibility(series_b, window)
    ratio = g2_ratio(series_c, window)
    _, n_bunched = robust_extrema(series_c.select(window))
    totals = series_a.values + series_b.values
    per_path = float(totals.mean()) / 2.0
    rate = g2_rate(
        float(series_a.values.mean()),
        float(series_b.values.mean()),
        float(series_c.values.mean()),
        accumulation,
        delta_t,
    )
    mean_n = float(
        np.mean([mean_photon_number(t, accumulation, dead_time) for t in totals])
    )
    period = fringe_period(series_a)
    return CorrelationReport(
        visibility_a=vis_a,
        visibility_b=vis_b,
        g2_ratio_min_over_max=ratio,
        g2_rate=rate,
        eta21=eta21(n_bunched, per_path),
        mean_photon=mean_n,
        fringe_period=period,
        visibility_above_classical=max(vis_a, vis_b) > CLASSICAL_VISIBILITY_LIMIT,
        g2_below_classical=ratio < CLASSICAL_G2_BOUND,
    )


@dataclass(frozen=True)
class Fig4Curves:
    """Reference curves for the phase scan: singles intensities, their product, and g2."""

    x: np.ndarray
    envelope: np.ndarray
    intensity_d1: np.ndarray
    intensity_d2: np.ndarray
    coincidence: np.ndarray
    g2: np.ndarray


def analytic_fig4(
    visibility_v: float,
    l_eff: float,
    x_grid: np.ndarray,
    wavelength: float = 632.8e-9,
) -> Fig4Curves:
    """Noise-free model curves over ``x_grid``.

    (a) the pair of normalized output intensities with envelope-degraded
    contrast, (b) their pointwise product (the coincidence curve), and (c) the
    blended intensity correlation from ``averaged_g2``.
    """
    x = np.asarray(x_grid, dtype=float)
    if x.size < 2:
        raise DataError("x grid must hold at least two points")
    gain = envelope(x, l_eff)
    phase = pzt_phase(x, wavelength)
    i_d1, i_d2 = singles_fringe(phase, gain, visibility_v)
    product = i_d1 * i_d2
    g2 = averaged_g2(
        (FringeSeries(x, i_d1, "D1"), FringeSeries(x, i_d2, "D2")),
        FringeSeries(x, product, "coincidence"),
        gain,
    )
    return Fig4Curves(
        x=x, envelope=gain, intensity_d1=i_d1, intensity_d2=i_d2, coincidence=product, g2=g2.values
    )


def export_scan_csv(result: ScanResult, path: str | Path) -> None:
    """Write a scan as CSV with the fixed column schema (header always present)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCAN_COLUMNS)
        for p in result.points:
            writer.writerow(
                [p.point, repr(p.voltage), repr(p.x), repr(p.phase), repr(p.envelope), p.n_a, p.n_b, p.n_c]
            )


def read_scan_csv(path: str | Path) -> list[ScanPoint]:
    """Read a scan CSV back into records; floats round-trip exactly via repr."""
    points = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SCAN_COLUMNS:
            raise DataError(f"{path}: expected header {','.join(SCAN_COLUMNS)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(SCAN_COLUMNS):
                raise DataError(f"{path}: line {lineno}: expected {len(SCAN_COLUMNS)} fields")
            try:
                points.append(
                    ScanPoint(
                        point=int(row[0]),
                        voltage=float(row[1]),
                        x=float(row[2]),
                        phase=float(row[3]),
                        envelope=float(row[4]),
                        n_a=int(row[5]),
                        n_b=int(row[6]),
                        n_c=int(row[7]),
                    )
                )
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from exc
    return points


def export_report_csv(report: CorrelationReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in report.as_items():
            writer.writerow([key, repr(value) if isinstance(value, float) else value])


def export_fig4_csv(curves: Fig4Curves, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x_m", "envelope", "intensity_d1", "intensity_d2", "coincidence", "g2"])
        for k in range(curves.x.size):
            writer.writerow(
                [
                    repr(float(curves.x[k])),
                    repr(float(curves.envelope[k])),
                    repr(float(curves.intensity_d1[k])),
                    repr(float(curves.intensity_d2[k])),
                    repr(float(curves.coincidence[k])),
                    repr(float(curves.g2[k])),
                ]
            )
