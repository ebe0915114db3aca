"""Envelope-domain ASK physical layer: modulation, detection, slicing.

Carriers sit two to three orders of magnitude above the bit rate, so the
simulation works on carrier-amplitude envelopes rather than RF waveforms:
an open-drain pin toggling its filter between high and low input impedance
shifts the carrier amplitude on the line (ASK), a logarithmic detector maps
the envelope to a voltage, and a data slicer with a self-tuning reference
recovers logic levels.  The latch-up fault of a spiking detector input and
its diode-clip mitigation are modeled explicitly.

Logic levels are integers: H = 1, L = 0.  Decoding is defined relative to
the bus idle-high initial condition (slicer output starts high).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels

__all__ = [
    "H",
    "L",
    "CarrierSeparationWarning",
    "LogicTimeline",
    "EnvelopeTrace",
    "VoltageTrace",
    "DetectorParams",
    "SlicerParams",
    "ClipParams",
    "Demodulator",
    "modulate",
    "detect",
    "slice_levels",
    "inject_latchup_spike",
    "check_carrier_separation",
]

H = 1
L = 0

MIN_SAMPLES_PER_BIT = 50
MIN_CARRIER_CLOCK_RATIO = 100.0


class CarrierSeparationWarning(UserWarning):
    """The baseband clock is too close to a carrier for clean envelopes."""


def check_carrier_separation(clock_hz: float, carrier_hz: float) -> None:
    """Warn when a carrier is within 100x of the data clock."""
    if carrier_hz < MIN_CARRIER_CLOCK_RATIO * clock_hz:
        warnings.warn(
            f"carrier {carrier_hz:.4g} Hz is within {MIN_CARRIER_CLOCK_RATIO:.0f}x "
            f"of the {clock_hz:.4g} Hz clock; envelope separation degrades",
            CarrierSeparationWarning,
            stacklevel=2,
        )


@dataclass(frozen=True)
class LogicTimeline:
    """Sampled digital waveform (values in {0, 1})."""

    sample_rate: float
    levels: np.ndarray

    def __post_init__(self) -> None:
        if self.sample_rate <= 0.0:
            raise ValueError("sample_rate must be positive")
        arr = np.ascontiguousarray(self.levels, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("levels must be a nonempty 1-D sequence")
        if np.any(arr > 1):
            raise ValueError("levels must be 0 (L) or 1 (H)")
        object.__setattr__(self, "levels", arr)

    @staticmethod
    def from_bits(
        bits, samples_per_bit: int, sample_rate: float
    ) -> "LogicTimeline":
        """Expand a bit sequence; enforces >= 50 samples per bit."""
        if samples_per_bit < MIN_SAMPLES_PER_BIT:
            raise ValueError(
                f"samples_per_bit must be >= {MIN_SAMPLES_PER_BIT} "
                f"(got {samples_per_bit}); the envelope model needs headroom"
            )
        arr = np.repeat(np.asarray(list(bits), dtype=np.uint8), samples_per_bit)
        return LogicTimeline(sample_rate, arr)

    def __len__(self) -> int:
        return int(self.levels.size)

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def transitions(self) -> np.ndarray:
        """Indices where the level changes from the previous sample."""
        return np.nonzero(np.diff(self.levels.astype(np.int8)) != 0)[0] + 1


@dataclass(frozen=True)
class EnvelopeTrace:
    """Carrier-amplitude samples in volts (nonnegative)."""

    sample_rate: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        if self.sample_rate <= 0.0:
            raise ValueError("sample_rate must be positive")
        arr = np.ascontiguousarray(self.samples, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("samples must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise ValueError("envelope samples must be finite and >= 0")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class VoltageTrace:
    """Generic sampled voltage (may be negative, unlike an envelope)."""

    sample_rate: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class DetectorParams:
    """Logarithmic RF detector transfer curve.

    Output volts per input dB with a fixed anchor point:
    out = ref_out + slope * 20*log10(env / ref_in), clamped at ``floor``
    volts of input (default 60 dB below the anchor).  ``input_impedance``
    is recorded for loading calculations but the detector itself is
    treated as high-impedance.
    """

    slope: float = 0.044
    ref_in: float = 0.010
    ref_out: float = 1.0
    floor: float | None = None
    input_impedance: float = 2000.0

    def __post_init__(self) -> None:
        if self.slope <= 0.0 or self.ref_in <= 0.0:
            raise ValueError("slope and ref_in must be positive")
        if self.floor is not None and self.floor < 0.0:
            raise ValueError("floor must be >= 0")

    @property
    def floor_volts(self) -> float:
        return self.floor if self.floor is not None else self.ref_in * 1e-3


@dataclass(frozen=True)
class SlicerParams:
    """Self-tuning comparator: reference = one-pole LPF of the input."""

    lpf_time_constant: float
    hysteresis: float = 0.010
    initial_reference: float | None = None

    def __post_init__(self) -> None:
        if self.lpf_time_constant <= 0.0:
            raise ValueError("lpf_time_constant must be positive")
        if self.hysteresis < 0.0:
            raise ValueError("hysteresis must be >= 0")

    @staticmethod
    def for_bit_rate(bit_rate: float, periods: float = 20.0, **kw) -> "SlicerParams":
        """Default tuning: LPF constant of ``periods`` bit periods."""
        return SlicerParams(lpf_time_constant=periods / bit_rate, **kw)

    def alpha(self, sample_rate: float) -> float:
        return 1.0 - math.exp(-1.0 / (sample_rate * self.lpf_time_constant))


@dataclass(frozen=True)
class ClipParams:
    """Transition-spike model and the anti-parallel diode clip level.

    Pin toggles stimulate the RF detector; what matters downstream is the
    induced excursion on the detector output, so ``spike_amplitude`` and
    ``v_f`` are both volts in that domain.  The input diode pair bounds the
    excursion at the diode drop ``v_f``; it leaves the keyed carrier alone
    as long as the carrier amplitude stays below ``v_f``.
    """

    v_f: float = 0.3
    spike_amplitude: float = 1.0
    spike_decay: float = 1e-6

    def __post_init__(self) -> None:
        if self.v_f <= 0.0:
            raise ValueError("v_f must be positive")
        if self.spike_amplitude < 0.0 or self.spike_decay <= 0.0:
            raise ValueError("spike_amplitude >= 0 and spike_decay > 0 required")

    def effective_amplitude(self, clip_enabled: bool = True) -> float:
        return min(self.spike_amplitude, self.v_f) if clip_enabled else self.spike_amplitude

    def decay_mult(self, sample_rate: float) -> float:
        return math.exp(-1.0 / (sample_rate * self.spike_decay))


def modulate(
    bus_amp_h: float,
    bus_amp_l: float,
    logic: LogicTimeline,
    rise_time: float = 0.0,
) -> EnvelopeTrace:
    """Map logic levels to carrier amplitude with a one-pole transition.

    ``rise_time`` is 10-90%; zero means ideal instant switching.  A useful
    default for a bit stream is 1% of the bit period.
    """
    if not bus_amp_h >= bus_amp_l >= 0.0:
        raise ValueError("need bus_amp_h >= bus_amp_l >= 0")
    target = np.where(logic.levels, bus_amp_h, bus_amp_l).astype(np.float64)
    if rise_time <= 0.0:
        return EnvelopeTrace(logic.sample_rate, target)
    tau = rise_time / math.log(9.0)  # 10-90% of a one-pole step
    a = 1.0 - math.exp(-1.0 / (logic.sample_rate * tau))
    from scipy.signal import lfilter

    y, _ = lfilter([a], [1.0, a - 1.0], target, zi=[(1.0 - a) * target[0]])
    return EnvelopeTrace(logic.sample_rate, y)


def detect(env: EnvelopeTrace, p: DetectorParams = DetectorParams()) -> VoltageTrace:
    """Logarithmic envelope detector (vectorized, memoryless)."""
    x = np.maximum(env.samples, p.floor_volts)
    out = p.ref_out + p.slope * 20.0 * np.log10(x / p.ref_in)
    return VoltageTrace(env.sample_rate, out)


def slice_levels(det: VoltageTrace, p: SlicerParams) -> LogicTimeline:
    """Binarize a detector trace; output starts high (bus idle)."""
    ref0 = p.initial_reference if p.initial_reference is not None else float(det.samples[0])
    levels, _ = kernels.slicer_loop(
        det.samples, p.alpha(det.sample_rate), p.hysteresis, ref0, H
    )
    return LogicTimeline(det.sample_rate, levels)


def inject_latchup_spike(
    det_in: EnvelopeTrace,
    transitions: LogicTimeline,
    clip: ClipParams,
    clip_enabled: bool = True,
    detector: DetectorParams = DetectorParams(),
) -> EnvelopeTrace:
    """Stimulate the detector with a decaying spike at each logic transition.

    The spike is an excursion of ``min(spike_amplitude, v_f)`` volts on the
    detector output (the full amplitude with the clip disabled), decaying
    with ``spike_decay``.  On the envelope that is a multiplicative factor
    through the log detector, which is how it is applied here, so that
    ``detect()`` of the result shows exactly the additive excursion.  No
    transitions, no change.
    """
    if len(det_in) != len(transitions):
        raise ValueError("envelope and transition timeline must be aligned")
    amp = clip.effective_amplitude(clip_enabled)
    idx = transitions.transitions()
    if idx.size == 0 or amp == 0.0:
        return det_in
    impulses = np.zeros(len(det_in), dtype=np.float64)
    impulses[idx] = amp
    from scipy.signal import lfilter

    spike_v, _ = lfilter([1.0], [1.0, -clip.decay_mult(det_in.sample_rate)], impulses, zi=[0.0])
    if clip_enabled:
        spike_v = np.minimum(spike_v, clip.v_f)
    factor = 10.0 ** (spike_v / (20.0 * detector.slope))
    base = np.where(factor > 1.0, np.maximum(det_in.samples, detector.floor_volts), det_in.samples)
    return EnvelopeTrace(det_in.sample_rate, base * factor)


@dataclass(frozen=True)
class Demodulator:
    """Detector + slicer chain, optionally with closed-loop spike feedback.

    With ``feedback`` on and a spike model present, each output transition
    couples a spike back into the detector input within the same sample;
    a large unclipped spike then holds the output at its previous level
    indefinitely (latch-up).
    """

    detector: DetectorParams = DetectorParams()
    slicer: SlicerParams = SlicerParams(lpf_time_constant=2e-3)
    clip: ClipParams | None = None
    clip_enabled: bool = True
    feedback: bool = True

    def run(
        self, env: EnvelopeTrace, initial_out: int = H
    ) -> tuple[LogicTimeline, VoltageTrace, VoltageTrace]:
        """Demodulate an envelope; returns (levels, detector, reference)."""
        p = self.detector
        rate = env.sample_rate
        spike_amp = 0.0
        decay_mult = 0.0
        spike_cap = math.inf
        feedback = False
        if self.clip is not None:
            spike_amp = self.clip.effective_amplitude(self.clip_enabled)
            decay_mult = self.clip.decay_mult(rate)
            if self.clip_enabled:
                spike_cap = self.clip.v_f
            feedback = self.feedback
        if self.slicer.initial_reference is not None:
            ref0 = self.slicer.initial_reference
        else:
            x0 = max(float(env.samples[0]), p.floor_volts)
            ref0 = p.ref_out + p.slope * 20.0 * math.log10(x0 / p.ref_in)
        levels, det, refs = kernels.demod_loop(
            env.samples,
            p.ref_in,
            p.ref_out,
            p.slope,
            p.floor_volts,
            self.slicer.alpha(rate),
            self.slicer.hysteresis,
            ref0,
            initial_out,
            spike_amp,
            decay_mult,
            spike_cap,
            feedback,
        )
        return (
            LogicTimeline(rate, levels),
            VoltageTrace(rate, det),
            VoltageTrace(rate, refs),
        )
