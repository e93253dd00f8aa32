"""Oscilloscope trace synthesis, parsing and edge extraction.

A trace holds two channels of voltage samples on a fixed sampling grid
(400 ps by default, 2.5e6 points per channel for a 1 ms capture).  Events are
recovered by rising-edge extraction: each run of samples above the threshold
contributes one event at its first sample.

Two file forms are supported:

* CSV with header ``time_s,ch1_V,ch2_V``;
* raw packed little-endian float32 with a 16-byte header: the magic
  ``PSTRACE1`` followed by two little-endian uint32 words (sample count,
  channel count), then count*channels floats interleaved per sample
  (ch1, ch2, ch1, ch2, ...).
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detection import PS_PER_S, PulseTrain
from .errors import TraceParseError

MAGIC = b"PSTRACE1"
HEADER = struct.Struct("<8sII")
DEFAULT_SAMPLING_PERIOD = 400e-12
DEFAULT_THRESHOLD = 2.0


@dataclass(frozen=True)
class TraceFile:
    """Two-channel sampled voltage record."""

    ch1: np.ndarray
    ch2: np.ndarray
    sampling_period: float = DEFAULT_SAMPLING_PERIOD
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        ch1 = np.asarray(self.ch1, dtype=np.float32)
        ch2 = np.asarray(self.ch2, dtype=np.float32)
        object.__setattr__(self, "ch1", ch1)
        object.__setattr__(self, "ch2", ch2)
        if ch1.shape != ch2.shape or ch1.ndim != 1:
            raise TraceParseError("channels must be 1-d arrays of equal length")
        if self.sampling_period <= 0:
            raise TraceParseError("sampling period must be > 0")

    @property
    def n_samples(self) -> int:
        return int(self.ch1.size)

    @property
    def duration(self) -> float:
        return self.n_samples * self.sampling_period


def synthesize_trace(
    train_ch1: PulseTrain,
    train_ch2: PulseTrain,
    sampling_period: float = DEFAULT_SAMPLING_PERIOD,
    duration: float | None = None,
    amplitude: float = 4.0,
    threshold: float = DEFAULT_THRESHOLD,
) -> TraceFile:
    """Rasterize two pulse trains onto the sampling grid.

    A sample reads ``amplitude`` volts whenever any pulse covers its instant.
    """
    if duration is None:
        duration = max(train_ch1.bin_length, train_ch2.bin_length) / PS_PER_S
    n = int(round(duration / sampling_period))
    dt_ps = sampling_period * PS_PER_S
    channels = []
    for train in (train_ch1, train_ch2):
        v = np.zeros(n, dtype=np.float32)
        first = np.ceil(train.starts / dt_ps).astype(np.int64)
        last = np.ceil((train.starts + train.durations) / dt_ps).astype(np.int64)
        for a, b in zip(np.clip(first, 0, n).tolist(), np.clip(last, 0, n).tolist()):
            v[a:b] = amplitude
        channels.append(v)
    return TraceFile(
        ch1=channels[0], ch2=channels[1], sampling_period=sampling_period, threshold=threshold
    )


def _rising_edges(samples: np.ndarray, threshold: float, dt: float) -> np.ndarray:
    above = samples > threshold
    if not above.any():
        return np.empty(0, dtype=float)
    edges = np.flatnonzero(above & ~np.concatenate(([False], above[:-1])))
    return edges * dt


def ingest_trace(trace: TraceFile) -> tuple[np.ndarray, np.ndarray]:
    """Event times (seconds) per channel, one per above-threshold run."""
    return (
        _rising_edges(trace.ch1, trace.threshold, trace.sampling_period),
        _rising_edges(trace.ch2, trace.threshold, trace.sampling_period),
    )


def write_trace_csv(trace: TraceFile, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time_s", "ch1_V", "ch2_V"])
        dt = trace.sampling_period
        for k in range(trace.n_samples):
            writer.writerow([repr(k * dt), repr(float(trace.ch1[k])), repr(float(trace.ch2[k]))])


def read_trace_csv(path: str | Path, threshold: float = DEFAULT_THRESHOLD) -> TraceFile:
    times = []
    ch1 = []
    ch2 = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["time_s", "ch1_V", "ch2_V"]:
            raise TraceParseError(f"{path}: line 1: expected header time_s,ch1_V,ch2_V")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise TraceParseError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
            try:
                times.append(float(row[0]))
                ch1.append(float(row[1]))
                ch2.append(float(row[2]))
            except ValueError as exc:
                raise TraceParseError(f"{path}: line {lineno}: {exc}") from exc
    if len(times) < 2:
        raise TraceParseError(f"{path}: need at least two samples to infer the sampling period")
    return TraceFile(
        ch1=np.array(ch1, dtype=np.float32),
        ch2=np.array(ch2, dtype=np.float32),
        sampling_period=times[1] - times[0],
        threshold=threshold,
    )


def write_trace_raw(trace: TraceFile, path: str | Path) -> None:
    data = np.empty(2 * trace.n_samples, dtype="<f4")
    data[0::2] = trace.ch1
    data[1::2] = trace.ch2
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, trace.n_samples, 2))
        fh.write(data.tobytes())


def read_trace_raw(
    path: str | Path,
    sampling_period: float = DEFAULT_SAMPLING_PERIOD,
    threshold: float = DEFAULT_THRESHOLD,
) -> TraceFile:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise TraceParseError(f"{path}: truncated header at byte {len(raw)} (need {HEADER.size})")
    magic, count, channels = HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise TraceParseError(f"{path}: bad magic at byte 0: {magic!r}")
    if channels != 2:
        raise TraceParseError(f"{path}: byte 12: expected 2 channels, got {channels}")
    expected = HEADER.size + 4 * count * channels
    if len(raw) != expected:
        raise TraceParseError(
            f"{path}: payload ends at byte {len(raw)}, expected {expected} "
            f"({count} samples x {channels} channels)"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=HEADER.size)
    return TraceFile(
        ch1=data[0::2].copy(),
        ch2=data[1::2].copy(),
        sampling_period=sampling_period,
        threshold=threshold,
    )
