"""Wave-model Mach-Zehnder interferometer.

One mirror rides on a piezo actuator; its displacement sets the relative phase
between the two arms.  A photon reaching the recombining beam splitter exits
toward detector D1 with probability (1 - V*G*cos(phase))/2, where V is the
static overlap quality of the two beams and G is a Gaussian envelope modelling
the walk-off decoherence induced by single-axis piezo scanning.  The pi/2
phase picked up between the transmitted and reflected fields of a lossless
splitter is what pins the zero-phase output to D2; it is carried here as a
frozen constant.

All functions are pure; OpticalState and PztConfig are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

BS_PHASE = math.pi / 2

_FOUR_LN2 = 4.0 * math.log(2.0)


@dataclass(frozen=True)
class OpticalState:
    """Interferometer state at one scan position.

    phase                      relative phase between the arms at the output
                               splitter, radians (unwrapped)
    intrinsic_visibility       static fringe contrast from alignment / splitter
                               ratio imperfections, in [0, 1]
    scan_position              piezo path-length offset from the zero-path
                               center, meters
    effective_coherence_length scale (FWHM) of the walk-off envelope actually
                               in effect: the ~2 um artifact scale when the
                               asymmetric scan is on, else the laser coherence
                               length
    laser_coherence_length     bandwidth-limited coherence length of the
                               unattenuated laser
    """

    phase: float = 0.0
    intrinsic_visibility: float = 1.0
    scan_position: float = 0.0
    effective_coherence_length: float = 2e-6
    laser_coherence_length: float = 0.30
    bs_phase: float = field(default=BS_PHASE, init=False)

    def __post_init__(self):
        if not 0.0 <= self.intrinsic_visibility <= 1.0:
            raise ConfigError(
                f"intrinsic_visibility must lie in [0, 1], got {self.intrinsic_visibility}"
            )
        if self.effective_coherence_length <= 0:
            raise ConfigError("effective_coherence_length must be > 0")
        if self.laser_coherence_length <= 0:
            raise ConfigError("laser_coherence_length must be > 0")

    def envelope_gain(self) -> float:
        """Walk-off envelope value G at the current scan position."""
        return envelope(self.scan_position, self.effective_coherence_length)

    def fringe_contrast(self) -> float:
        """Total fringe contrast V*G at the current scan position."""
        return self.intrinsic_visibility * self.envelope_gain()

    def d1_probability(self) -> float:
        """Probability that a photon exits toward D1 in this state."""
        return port_probability(self.phase, self.envelope_gain(), self.intrinsic_visibility)


@dataclass(frozen=True)
class PztConfig:
    """Piezo scan calibration: voltage range, resolution and meters per volt.

    The default calibration of 8e-8 m/V maps the 0-100 V range onto +-4 um
    about the range center, where the beam overlap is perfect.
    """

    voltage_min: float = 0.0
    voltage_max: float = 100.0
    voltage_resolution: float = 1.5e-3
    displacement_per_volt: float = 8e-8
    scan_duration: float = 316.0

    def __post_init__(self):
        if self.voltage_max <= self.voltage_min:
            raise ConfigError("voltage_max must exceed voltage_min")
        if self.voltage_resolution <= 0:
            raise ConfigError("voltage_resolution must be > 0")
        if self.displacement_per_volt <= 0:
            raise ConfigError("displacement_per_volt must be > 0")
        if self.scan_duration <= 0:
            raise ConfigError("scan_duration must be > 0")

    @property
    def voltage_center(self) -> float:
        return 0.5 * (self.voltage_min + self.voltage_max)


def pzt_phase(x, wavelength: float):
    """Phase 2*pi*x/wavelength for a path-length offset ``x`` (unwrapped).

    A half-wavelength displacement is a pi phase shift.  Accepts scalars or
    arrays.
    """
    if wavelength <= 0:
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    return 2.0 * math.pi * x / wavelength


def voltage_to_displacement(v: float, cfg: PztConfig) -> float:
    """Mirror displacement for drive voltage ``v``.

    The offset from the range center is quantized to the controller's voltage
    resolution grid, then scaled by the calibration; the center of the range
    maps to x = 0.
    """
    if not cfg.voltage_min <= v <= cfg.voltage_max:
        raise DomainError(
            f"voltage {v} outside [{cfg.voltage_min}, {cfg.voltage_max}]"
        )
    offset = v - cfg.voltage_center
    quantized = round(offset / cfg.voltage_resolution) * cfg.voltage_resolution
    return quantized * cfg.displacement_per_volt


def envelope(x, l_eff: float):
    """Gaussian walk-off envelope with FWHM ``l_eff``: exp(-4 ln2 x^2 / l_eff^2).

    Accepts scalars or arrays; equals 1 at x = 0 and 1/2 at |x| = l_eff/2.
    """
    if l_eff <= 0:
        raise DomainError(f"l_eff must be > 0, got {l_eff}")
    xs = np.asarray(x, dtype=float)
    return np.exp(-_FOUR_LN2 * xs * xs / (l_eff * l_eff))


def _check_unit_interval(name: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")


def port_probability(phase, envelope_gain, visibility):
    """Probability a photon exits toward D1: (1 - V*G*cos(phase))/2.

    At zero phase with perfect contrast every photon exits toward D2; with no
    coherence (V*G = 0) the splitter is a plain 50/50 divider.  Accepts scalar
    or array phase/envelope.
    """
    _check_unit_interval("envelope_gain", envelope_gain)
    _check_unit_interval("visibility", visibility)
    return 0.5 * (1.0 - visibility * envelope_gain * np.cos(phase))


def singles_fringe(phase, envelope_gain, visibility):
    """Normalized single-photon rates (toward D1, toward D2); the pair sums to 1."""
    p = port_probability(phase, envelope_gain, visibility)
    return p, 1.0 - p


def pair_coincidence_probability(phase, envelope_gain, visibility):
    """Probability a bunched pair splits to one click on each detector.

    Both photons of a pair are routed independently with the same port
    probability p, so a split happens with probability
    2 p (1 - p) = (1 - (V G cos phase)^2) / 2, giving a fringe doubly
    modulated relative to the singles fringe.
    """
    p = port_probability(phase, envelope_gain, visibility)
    return 2.0 * p * (1.0 - p)
