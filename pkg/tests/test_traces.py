import math

import numpy as np
import pytest

from pstream.detection import (
    CHANNEL_A,
    CHANNEL_B,
    DetectorConfig,
    PulseTrain,
    detect_bin,
    shape_pulses,
)
from pstream.errors import TraceParseError
from pstream.interferometer import OpticalState
from pstream.source import sample_batch
from pstream.traces import (
    TraceFile,
    ingest_trace,
    read_trace_csv,
    read_trace_raw,
    synthesize_trace,
    write_trace_csv,
    write_trace_raw,
)

PS = 1


def regular_train(n, channel, spacing_ps=3_700_000, duration_ps=10_000, start=50_000):
    starts = (start + np.arange(n) * spacing_ps).astype(np.int64)
    durations = np.full(n, duration_ps, dtype=np.int64)
    return PulseTrain(
        channel, starts, durations, bin_length=int(starts[-1] + duration_ps + 1_000_000)
    )


class TestSynthesizeIngest:
    def test_recovers_270_well_separated_pulses(self):
        # one millisecond of 270 pulses per channel on the 400 ps scope grid
        a = regular_train(270, CHANNEL_A)
        b = regular_train(270, CHANNEL_B, start=1_850_000)
        trace = synthesize_trace(a, b, duration=1e-3)
        assert trace.n_samples == 2_500_000
        ev1, ev2 = ingest_trace(trace)
        assert ev1.size == 270
        assert ev2.size == 270

    def test_all_zero_trace(self):
        trace = TraceFile(ch1=np.zeros(1000), ch2=np.zeros(1000))
        ev1, ev2 = ingest_trace(trace)
        assert ev1.size == 0 and ev2.size == 0

    def test_event_times_on_sampling_grid(self):
        a = regular_train(5, CHANNEL_A)
        b = regular_train(3, CHANNEL_B, start=777_000)
        trace = synthesize_trace(a, b)
        ev1, ev2 = ingest_trace(trace)
        dt = trace.sampling_period
        assert np.allclose(ev1 / dt, np.round(ev1 / dt))
        # edge positions track the pulse starts to within one sample
        assert np.max(np.abs(ev1 - a.starts * 1e-12)) <= dt

    def test_exact_count_recovery_from_detection_chain(self):
        batch = sample_batch(0.012, 45_454, seed=55)  # one millisecond of slots
        optics = OpticalState(phase=math.pi / 2, intrinsic_visibility=0.882)
        train_a, train_b = detect_bin(batch, optics, DetectorConfig(dark_rate=0.0), seed=56)
        trace = synthesize_trace(train_a, train_b)
        ev1, ev2 = ingest_trace(trace)
        assert ev1.size == len(train_a)
        assert ev2.size == len(train_b)

    def test_oscilloscope_ensemble_counts_match_bench_rates(self):
        # repeated 1 ms captures at the working occupancy: per-channel event
        # counts average near the bench's 274 +- 16 / 265 +- 18 readings
        n_runs = 50
        counts = np.empty((n_runs, 2))
        optics = OpticalState(phase=math.pi / 2, intrinsic_visibility=0.882)
        for k in range(n_runs):
            batch = sample_batch(0.012, 45_454, seed=7000 + k)
            train_a, train_b = detect_bin(batch, optics, DetectorConfig(), seed=8000 + k)
            ev1, ev2 = ingest_trace(synthesize_trace(train_a, train_b, duration=1e-3))
            counts[k] = ev1.size, ev2.size
        mean_a, mean_b = counts.mean(axis=0)
        assert 274 - 16 < mean_a < 274 + 16
        assert 265 - 18 < mean_b < 265 + 18


class TestCsvRoundTrip:
    def test_round_trip(self, tmp_path):
        a = regular_train(4, CHANNEL_A, spacing_ps=40_000, duration_ps=10_000, start=10_000)
        b = regular_train(2, CHANNEL_B, spacing_ps=40_000, duration_ps=10_000, start=30_000)
        trace = synthesize_trace(a, b, duration=2e-7)
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        back = read_trace_csv(path)
        assert np.array_equal(back.ch1, trace.ch1)
        assert np.array_equal(back.ch2, trace.ch2)
        assert back.sampling_period == pytest.approx(trace.sampling_period, rel=1e-9)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,v1,v2\n0,0,0\n")
        with pytest.raises(TraceParseError, match="line 1"):
            read_trace_csv(path)

    def test_bad_row_width(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time_s,ch1_V,ch2_V\n0.0,0.0\n")
        with pytest.raises(TraceParseError, match="line 2"):
            read_trace_csv(path)

    def test_single_sample_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time_s,ch1_V,ch2_V\n0.0,0.0,0.0\n")
        with pytest.raises(TraceParseError):
            read_trace_csv(path)


class TestRawRoundTrip:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(4)
        trace = TraceFile(
            ch1=rng.uniform(0, 4, size=1000).astype(np.float32),
            ch2=rng.uniform(0, 4, size=1000).astype(np.float32),
        )
        path = tmp_path / "trace.bin"
        write_trace_raw(trace, path)
        back = read_trace_raw(path)
        assert np.array_equal(back.ch1, trace.ch1)
        assert np.array_equal(back.ch2, trace.ch2)

    def test_bad_magic_reports_byte_zero(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 8)
        with pytest.raises(TraceParseError, match="byte 0"):
            read_trace_raw(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"PSTR")
        with pytest.raises(TraceParseError, match="byte 4"):
            read_trace_raw(path)

    def test_length_mismatch_reports_offset(self, tmp_path):
        import struct

        path = tmp_path / "bad.bin"
        payload = struct.pack("<8sII", b"PSTRACE1", 10, 2) + b"\x00" * 40  # needs 80
        path.write_bytes(payload)
        with pytest.raises(TraceParseError, match="byte 56"):
            read_trace_raw(path)

    def test_wrong_channel_count(self, tmp_path):
        import struct

        path = tmp_path / "bad.bin"
        path.write_bytes(struct.pack("<8sII", b"PSTRACE1", 1, 3) + b"\x00" * 12)
        with pytest.raises(TraceParseError, match="channels"):
            read_trace_raw(path)


class TestTraceFile:
    def test_channel_shape_mismatch(self):
        with pytest.raises(TraceParseError):
            TraceFile(ch1=np.zeros(3), ch2=np.zeros(4))

    def test_duration(self):
        trace = TraceFile(ch1=np.zeros(2_500_000), ch2=np.zeros(2_500_000))
        assert trace.duration == pytest.approx(1e-3, rel=1e-9)
