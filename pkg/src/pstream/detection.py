"""Single-photon counting module (SPCM) model.

Optical detection slots become timestamped electrical pulses.  Channel "A"
feeds detector D1, channel "B" feeds detector D2.  All pulse times are integer
picoseconds: arrival times are quantized to the module's resolving-time grid,
a non-paralyzable dead-time filter drops events that follow a kept event too
closely, and each surviving event becomes one fixed-shape pulse.  Dark counts
are merged with photon events before filtering since they trigger the same
avalanche electronics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError, DomainError
from .interferometer import OpticalState
from .seeding import derive_seed
from .source import PhotonBatch

PS_PER_S = 1_000_000_000_000

CHANNEL_A = "A"  # -> D1
CHANNEL_B = "B"  # -> D2


@dataclass(frozen=True)
class DetectorConfig:
    """SPCM parameters.  The pulse amplitude is metadata for trace synthesis."""

    dead_time: float = 22e-9
    dark_rate: float = 27.0
    pulse_duration: float = 10e-9
    pulse_amplitude: float = 4.0
    resolving_time: float = 350e-12
    efficiency: float = 1.0

    def __post_init__(self):
        for name in ("dead_time", "pulse_duration", "resolving_time"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if self.dark_rate < 0:
            raise ConfigError("dark_rate must be >= 0")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigError(f"efficiency must lie in [0, 1], got {self.efficiency}")

    @property
    def dead_time_ps(self) -> int:
        return round(self.dead_time * PS_PER_S)

    @property
    def pulse_duration_ps(self) -> int:
        return round(self.pulse_duration * PS_PER_S)

    @property
    def resolving_time_ps(self) -> int:
        return round(self.resolving_time * PS_PER_S)


@dataclass(frozen=True)
class PulseTrain:
    """Ordered electrical pulses on one channel.

    ``starts`` and ``durations`` are int64 picoseconds.  Invariants: starts
    strictly increasing with consecutive gaps >= ``min_gap`` (the generating
    detector's dead time), and every pulse contained in [0, bin_length).
    """

    channel: str
    starts: np.ndarray
    durations: np.ndarray
    bin_length: int
    min_gap: int = 0

    def __post_init__(self):
        if self.channel not in (CHANNEL_A, CHANNEL_B):
            raise ContractError(f"channel must be {CHANNEL_A!r} or {CHANNEL_B!r}")
        starts = np.asarray(self.starts, dtype=np.int64)
        durations = np.asarray(self.durations, dtype=np.int64)
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "durations", durations)
        if starts.shape != durations.shape or starts.ndim != 1:
            raise ContractError("starts and durations must be 1-d arrays of equal length")
        self.validate()

    def validate(self) -> None:
        starts, durations = self.starts, self.durations
        if starts.size == 0:
            return
        if np.any(durations <= 0):
            raise ContractError("pulse durations must be positive")
        gaps = np.diff(starts)
        if np.any(gaps <= 0):
            raise ContractError("pulse starts must be strictly increasing")
        if self.min_gap and np.any(gaps < self.min_gap):
            raise ContractError(
                f"consecutive pulse starts closer than the dead time ({self.min_gap} ps)"
            )
        if starts[0] < 0 or np.any(starts + durations > self.bin_length):
            raise ContractError("pulses must lie within [0, bin_length)")

    def __len__(self) -> int:
        return int(self.starts.size)

    @property
    def pulses(self) -> list[tuple[int, int]]:
        return list(zip(self.starts.tolist(), self.durations.tolist()))


def empty_train(channel: str, bin_length: int, min_gap: int = 0) -> PulseTrain:
    return PulseTrain(
        channel=channel,
        starts=np.empty(0, dtype=np.int64),
        durations=np.empty(0, dtype=np.int64),
        bin_length=bin_length,
        min_gap=min_gap,
    )


def generate_dark_events(rate: float, duration: float, seed: int) -> np.ndarray:
    """Dark-count instants (seconds) from a homogeneous Poisson point process.

    Inter-arrival gaps are exponential with mean 1/rate; deterministic per
    seed.
    """
    if rate < 0:
        raise DomainError(f"rate must be >= 0, got {rate}")
    if duration <= 0:
        raise DomainError(f"duration must be > 0, got {duration}")
    if rate == 0.0:
        return np.empty(0, dtype=float)
    rng = np.random.default_rng(seed)
    times: list[np.ndarray] = []
    t = 0.0
    block = max(16, int(rate * duration * 1.2) + 16)
    while t < duration:
        gaps = rng.exponential(1.0 / rate, size=block)
        arrivals = t + np.cumsum(gaps)
        times.append(arrivals)
        t = float(arrivals[-1])
    all_times = np.concatenate(times)
    return all_times[all_times < duration]


def dead_time_filter(events: np.ndarray, t_d) -> np.ndarray:
    """Non-paralyzable dead-time filter.

    Keeps an event iff it falls at least ``t_d`` after the last *kept* event;
    the first event is always kept.  Works on sorted integer or float times
    and preserves the input dtype.

    Implementation: repeated vectorized passes that drop, in each run of
    violations, the first event whose predecessor survives the pass.  Each
    pass only removes events the sequential filter would remove, and removes
    at least one per violating run, so the fixed point is exactly the
    sequential result.  Production streams converge in one or two passes.
    """
    events = np.asarray(events)
    if events.size == 0:
        return events.copy()
    if np.any(np.diff(events) < 0):
        raise ContractError("dead_time_filter requires ascending event times")
    kept = events
    while kept.size > 1:
        bad = np.empty(kept.size, dtype=bool)
        bad[0] = False
        bad[1:] = np.diff(kept) < t_d
        if not bad.any():
            break
        drop = bad & ~np.concatenate(([False], bad[:-1]))
        kept = kept[~drop]
    return kept.copy()


def shape_pulses(
    events: np.ndarray,
    cfg: DetectorConfig,
    channel: str = CHANNEL_A,
    bin_length: int | None = None,
) -> PulseTrain:
    """One fixed-duration pulse per dead-time-filtered event time (int ps).

    Overlapping pulses mean the dead-time precondition was violated and raise
    a contract error via the train invariants.
    """
    events = np.asarray(events, dtype=np.int64)
    if bin_length is None:
        top = int(events[-1]) + cfg.pulse_duration_ps if events.size else cfg.pulse_duration_ps
        bin_length = top
    if events.size and np.any(np.diff(events) < cfg.pulse_duration_ps):
        raise ContractError("events closer than one pulse duration: overlapping pulses")
    return PulseTrain(
        channel=channel,
        starts=events,
        durations=np.full(events.shape, cfg.pulse_duration_ps, dtype=np.int64),
        bin_length=bin_length,
        min_gap=cfg.dead_time_ps,
    )


def sample_distinct_slots(rng: np.random.Generator, n_slots: int, k: int) -> np.ndarray:
    """``k`` distinct slot indices drawn uniformly from range(n_slots), in random order.

    Rejection fill: oversample with replacement, deduplicate, top up, then
    permute so that slicing the result does not correlate with slot position.
    O(k) memory regardless of n_slots.
    """
    if k > n_slots:
        raise DomainError(f"cannot place {k} events in {n_slots} slots")
    if k == 0:
        return np.empty(0, dtype=np.int64)
    chosen = np.unique(rng.integers(0, n_slots, size=k + k // 16 + 16, dtype=np.int64))
    while chosen.size < k:
        extra = rng.integers(0, n_slots, size=(k - chosen.size) * 2 + 16, dtype=np.int64)
        chosen = np.unique(np.concatenate([chosen, extra]))
    return rng.permutation(chosen)[:k]


def _quantize(times_ps: np.ndarray, grid_ps: int) -> np.ndarray:
    """Round times to the nearest multiple of the resolving-time grid (half up)."""
    return (times_ps + grid_ps // 2) // grid_ps * grid_ps


def detect_bin(
    batch: PhotonBatch,
    optics: OpticalState,
    detectors: DetectorConfig | tuple[DetectorConfig, DetectorConfig],
    seed: int,
    slot_width: float | None = None,
) -> tuple[PulseTrain, PulseTrain]:
    """Full detection chain for one accumulation bin: (train toward D1, train toward D2).

    Occupied slots are placed collision-free at uniformly random slot
    positions; each single photon is routed to D1 with the state's port
    probability, each pair (and each higher-order slot, treated as a pair) as
    two independently routed photons sharing one arrival time.  Survivors of
    the per-channel efficiency draw are merged with dark events, quantized to
    the resolving-time grid, dead-time filtered and shaped into pulses.
    Deterministic per seed.
    """
    if isinstance(detectors, DetectorConfig):
        det_a, det_b = detectors, detectors
    else:
        det_a, det_b = detectors
    if slot_width is None:
        slot_width = det_a.dead_time
    slot_ps = round(slot_width * PS_PER_S)
    bin_length = batch.slots_per_bin * slot_ps
    duration_s = bin_length / PS_PER_S

    rng = np.random.default_rng(derive_seed(seed, 0))
    p_d1 = optics.d1_probability()

    n_s = batch.n_single_slots
    n_p = batch.n_pair_slots + batch.n_higher_slots
    slots = sample_distinct_slots(rng, batch.slots_per_bin, n_s + n_p)
    single_t = slots[:n_s] * slot_ps
    pair_t = slots[n_s:] * slot_ps

    to_d1 = rng.random(n_s) < p_d1
    pair_first = rng.random(n_p) < p_d1
    pair_second = rng.random(n_p) < p_d1

    times = {CHANNEL_A: [], CHANNEL_B: []}
    times[CHANNEL_A].append(single_t[to_d1])
    times[CHANNEL_B].append(single_t[~to_d1])
    times[CHANNEL_A].append(pair_t[pair_first])
    times[CHANNEL_B].append(pair_t[~pair_first])
    times[CHANNEL_A].append(pair_t[pair_second])
    times[CHANNEL_B].append(pair_t[~pair_second])

    trains = []
    for lane, (channel, det) in enumerate([(CHANNEL_A, det_a), (CHANNEL_B, det_b)]):
        t = np.concatenate(times[channel])
        if det.efficiency < 1.0:
            t = t[rng.random(t.size) < det.efficiency]
        dark = generate_dark_events(det.dark_rate, duration_s, derive_seed(seed, 1 + lane))
        dark_ps = np.round(dark * PS_PER_S).astype(np.int64)
        t = np.concatenate([t, dark_ps])
        t = _quantize(np.sort(t), det.resolving_time_ps)
        # rounding can push a boundary event past the bin; the pulse must fit
        t = t[t + det.pulse_duration_ps <= bin_length]
        t = dead_time_filter(t, det.dead_time_ps)
        trains.append(shape_pulses(t, det, channel=channel, bin_length=bin_length))
    return trains[0], trains[1]
