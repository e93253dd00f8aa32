import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pstream.coincidence import CcmConfig, CountRecord, StepCount, accumulate, coincide
from pstream.detection import CHANNEL_A, CHANNEL_B, PulseTrain
from pstream.errors import ConfigError, ContractError

NS = 1000  # ps per ns


def make_train(starts, duration=10 * NS, channel=CHANNEL_A, min_gap=0):
    starts = np.asarray(starts, dtype=np.int64)
    durations = np.full(starts.shape, duration, dtype=np.int64)
    top = int(starts[-1] + duration + 1) if starts.size else 1
    return PulseTrain(channel, starts, durations, bin_length=top, min_gap=min_gap)


def brute_force_coincide(train_a, train_b, cfg):
    """Independent oracle: all-pairs overlaps, matched greedily by AND-gate
    trigger time (overlap onset + required overlap), one match per pulse."""
    threshold = cfg.overlap_threshold_ps
    tau = cfg.delay_tau_ps
    candidates = []
    for i, (a0, da) in enumerate(zip(train_a.starts.tolist(), train_a.durations.tolist())):
        for j, (b0, db) in enumerate(zip(train_b.starts.tolist(), train_b.durations.tolist())):
            b0 = b0 + tau
            overlap = min(a0 + da, b0 + db) - max(a0, b0)
            if overlap >= threshold:
                candidates.append((max(a0, b0) + threshold, i, j))
    candidates.sort()
    used_a, used_b, matches = set(), set(), []
    for _, i, j in candidates:
        if i not in used_a and j not in used_b:
            matches.append((i, j))
            used_a.add(i)
            used_b.add(j)
    return len(matches), sorted(matches)


# gap/duration generator guaranteeing the PulseTrain invariants: starts strictly
# increasing, gaps at least the dead time, durations no longer than the gap floor
def train_strategy(channel, min_gap=22 * NS):
    return st.lists(
        st.tuples(
            st.integers(min_value=min_gap, max_value=4 * min_gap),  # gap to previous
            st.integers(min_value=1 * NS, max_value=min_gap),  # duration
        ),
        min_size=0,
        max_size=25,
    ).map(
        lambda items: PulseTrain(
            channel,
            np.cumsum([g for g, _ in items]).astype(np.int64) if items else np.empty(0, np.int64),
            np.array([d for _, d in items], dtype=np.int64),
            bin_length=int(sum(g for g, _ in items) + 5 * min_gap + 1) if items else 1,
            min_gap=min_gap,
        )
    )


class TestCoincideExamples:
    def test_six_nanosecond_overlap_counts(self):
        a = make_train([0])
        b = make_train([4 * NS], channel=CHANNEL_B)
        count, matches = coincide(a, b, CcmConfig())
        assert count == 1 and list(matches) == [(0, 0)]

    def test_four_nanosecond_overlap_rejected(self):
        a = make_train([0])
        b = make_train([6 * NS], channel=CHANNEL_B)
        count, matches = coincide(a, b, CcmConfig())
        assert count == 0 and list(matches) == []

    def test_empty_train(self):
        a = make_train([0, 30 * NS])
        b = make_train([], channel=CHANNEL_B)
        assert coincide(a, b, CcmConfig())[0] == 0
        assert coincide(b, a, CcmConfig())[0] == 0

    def test_simultaneous_pulses_always_match(self):
        starts = np.arange(10) * 40 * NS
        a = make_train(starts)
        b = make_train(starts, channel=CHANNEL_B)
        count, matches = coincide(a, b, CcmConfig())
        assert count == 10
        assert list(matches) == [(k, k) for k in range(10)]

    def test_delay_tau_shifts_channel_b(self):
        a = make_train([100 * NS])
        b = make_train([80 * NS], channel=CHANNEL_B)
        assert coincide(a, b, CcmConfig())[0] == 0
        shifted = CcmConfig(delay_tau=20e-9)
        assert coincide(a, b, shifted)[0] == 1

    def test_invariant_violating_train_rejected(self):
        good = make_train([0])
        bad = PulseTrain.__new__(PulseTrain)
        object.__setattr__(bad, "channel", CHANNEL_B)
        object.__setattr__(bad, "starts", np.array([10, 5], dtype=np.int64))
        object.__setattr__(bad, "durations", np.array([3, 3], dtype=np.int64))
        object.__setattr__(bad, "bin_length", 100)
        object.__setattr__(bad, "min_gap", 0)
        with pytest.raises(ContractError):
            coincide(good, bad, CcmConfig())


class TestCoincideOracle:
    @given(train_strategy(CHANNEL_A), train_strategy(CHANNEL_B), st.integers(1, 10))
    @settings(max_examples=300, deadline=None)
    def test_matches_brute_force(self, a, b, threshold_ns):
        cfg = CcmConfig(overlap_threshold=threshold_ns * 1e-9)
        count, matches = coincide(a, b, cfg)
        ref_count, ref_matches = brute_force_coincide(a, b, cfg)
        assert count == ref_count
        assert sorted(matches) == ref_matches

    @given(
        train_strategy(CHANNEL_A),
        train_strategy(CHANNEL_B),
        st.integers(1, 10),
        st.integers(-60, 60),
    )
    @settings(max_examples=150, deadline=None)
    def test_matches_brute_force_with_delay(self, a, b, threshold_ns, tau_ns):
        cfg = CcmConfig(overlap_threshold=threshold_ns * 1e-9, delay_tau=tau_ns * 1e-9)
        count, matches = coincide(a, b, cfg)
        ref_count, ref_matches = brute_force_coincide(a, b, cfg)
        assert count == ref_count
        assert sorted(matches) == ref_matches

    def test_bulk_random_trains_both_paths(self):
        rng = np.random.default_rng(20_240_901)
        for trial in range(300):
            n_a, n_b = rng.integers(0, 120, size=2)
            dur = int(rng.integers(2, 22)) * NS
            a = _random_train(rng, CHANNEL_A, n_a, dur)
            b = _random_train(rng, CHANNEL_B, n_b, dur)
            threshold = int(rng.integers(1, max(dur // NS, 2))) * 1e-9
            cfg = CcmConfig(overlap_threshold=threshold)
            count, matches = coincide(a, b, cfg)
            ref_count, ref_matches = brute_force_coincide(a, b, cfg)
            assert count == ref_count, f"trial {trial}"
            assert sorted(matches) == ref_matches, f"trial {trial}"

    @given(train_strategy(CHANNEL_A), train_strategy(CHANNEL_B))
    @settings(max_examples=100, deadline=None)
    def test_symmetric_without_delay(self, a, b):
        cfg = CcmConfig()
        ab = coincide(a, b, cfg)[0]
        b_as_a = PulseTrain(CHANNEL_A, b.starts, b.durations, b.bin_length, b.min_gap)
        a_as_b = PulseTrain(CHANNEL_B, a.starts, a.durations, a.bin_length, a.min_gap)
        assert ab == coincide(b_as_a, a_as_b, cfg)[0]

    @given(train_strategy(CHANNEL_A), train_strategy(CHANNEL_B))
    @settings(max_examples=100, deadline=None)
    def test_lower_threshold_never_reduces_count(self, a, b):
        counts = [
            coincide(a, b, CcmConfig(overlap_threshold=th))[0]
            for th in (10e-9, 5e-9, 1e-9, 0.5e-9)
        ]
        assert counts == sorted(counts)

    def test_additive_over_disjoint_ranges(self):
        rng = np.random.default_rng(7)
        first_a = _random_train(rng, CHANNEL_A, 40, 10 * NS)
        first_b = _random_train(rng, CHANNEL_B, 40, 10 * NS)
        offset = max(first_a.bin_length, first_b.bin_length) + 100 * NS
        second_a = _random_train(rng, CHANNEL_A, 40, 10 * NS)
        second_b = _random_train(rng, CHANNEL_B, 40, 10 * NS)
        cfg = CcmConfig()
        separate = (
            coincide(first_a, first_b, cfg)[0] + coincide(second_a, second_b, cfg)[0]
        )
        joined_a = _concat(first_a, second_a, offset)
        joined_b = _concat(first_b, second_b, offset)
        assert coincide(joined_a, joined_b, cfg)[0] == separate


def _random_train(rng, channel, n, duration, min_gap=22_000):
    gaps = rng.integers(min_gap, 4 * min_gap, size=n)
    starts = np.cumsum(gaps).astype(np.int64)
    durations = np.full(n, duration, dtype=np.int64)
    top = int(starts[-1] + duration + 1) if n else 1
    return PulseTrain(channel, starts, durations, bin_length=top, min_gap=min_gap)


def _concat(first, second, offset):
    starts = np.concatenate([first.starts, second.starts + offset])
    durations = np.concatenate([first.durations, second.durations])
    return PulseTrain(
        first.channel,
        starts,
        durations,
        bin_length=int(offset + second.bin_length),
        min_gap=min(first.min_gap, second.min_gap) if len(first) and len(second) else 0,
    )


class TestAccumulate:
    def test_all_zero_steps(self):
        steps = [StepCount(0, 0, 0)] * 10
        records = accumulate(steps, CcmConfig())
        assert records == [CountRecord(0, 0, 0, 0, partial=False)]

    def test_measured_rates_sum_to_bin(self):
        steps = [StepCount(27_000, 27_000, 82)] * 10
        (record,) = accumulate(steps, CcmConfig())
        assert (record.n_a, record.n_b, record.n_c) == (270_000, 270_000, 820)
        assert not record.partial

    def test_partial_final_bin_flagged(self):
        steps = [StepCount(1, 1, 0)] * 13
        records = accumulate(steps, CcmConfig())
        assert len(records) == 2
        assert not records[0].partial and records[0].n_a == 10
        assert records[1].partial and records[1].n_a == 3

    def test_step_must_tile_bin(self):
        with pytest.raises(ConfigError):
            CcmConfig(step=0.3).steps_per_bin


class TestCountRecord:
    def test_coincidences_bounded_by_singles(self):
        with pytest.raises(ContractError):
            CountRecord(0, 10, 5, 6)

    def test_negative_counts_rejected(self):
        with pytest.raises(ContractError):
            CountRecord(0, -1, 5, 0)


class TestCcmConfig:
    def test_defaults(self):
        cfg = CcmConfig()
        assert cfg.overlap_threshold_ps == 5_000
        assert cfg.steps_per_bin == 10

    def test_validation(self):
        with pytest.raises(ConfigError):
            CcmConfig(overlap_threshold=0.0)
        with pytest.raises(ConfigError):
            CcmConfig(step=2.0, accumulation_bin=1.0)
