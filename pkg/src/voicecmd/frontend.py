"""Acoustic front-end: endpointing, pre-emphasis, framing, mel filter-bank, deltas.

Turns a raw 16 kHz clip into three parallel feature streams per frame:
static log filter-bank energies, their first differences (delta), and
second differences (acceleration). All operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio import SAMPLE_RATE, AudioClip
from .errors import InputTooShort, NoSpeechDetected

# Flooring applied inside the log so silence stays finite.
LOG_ENERGY_FLOOR = 1e-10

# A frame qualifies for the zero-crossing boundary extension only if its
# energy also clears this (low) multiple of the background estimate, so a
# stationary noise floor cannot drag endpoints outward.
ZCR_STE_FLOOR_RATIO = 2.0

# Duration of the leading background region used for the adaptive STE
# threshold.
BACKGROUND_SECONDS = 0.1


@dataclass(frozen=True)
class FrontendConfig:
    frame_len_samples: int = 256        # 16 ms at 16 kHz
    hop_samples: int = 128              # 8 ms (50% overlap)
    preemphasis_alpha: float = 0.97
    num_filters: int = 15
    delta_window: int = 2
    ste_threshold_ratio: float = 4.0
    zcr_threshold: float = 0.25         # fraction of sample pairs changing sign
    min_speech_frames: int = 3
    max_silence_gap_frames: int = 25    # 200 ms

    def __post_init__(self):
        if not (0 < self.hop_samples <= self.frame_len_samples):
            raise ValueError("need 0 < hop_samples <= frame_len_samples")
        if self.num_filters < 1:
            raise ValueError("num_filters must be >= 1")
        if not (0.0 <= self.preemphasis_alpha < 1.0):
            raise ValueError("preemphasis_alpha must be in [0, 1)")
        if self.delta_window < 1:
            raise ValueError("delta_window must be >= 1")
        if self.min_speech_frames < 1:
            raise ValueError("min_speech_frames must be >= 1")


@dataclass(eq=False)
class FeatureStreams:
    """Per-frame triple of feature vectors (static / delta / accel)."""

    static: np.ndarray
    delta: np.ndarray
    accel: np.ndarray

    def __post_init__(self):
        for name in ("static", "delta", "accel"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2:
                raise ValueError(f"{name} stream must be 2-D [frames, dims]")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} stream contains non-finite values")
            setattr(self, name, arr)
        if not (self.static.shape == self.delta.shape == self.accel.shape):
            raise ValueError("all three streams must have identical shape")

    @property
    def num_frames(self) -> int:
        return self.static.shape[0]

    @property
    def dim(self) -> int:
        return self.static.shape[1]

    def stream(self, s: int) -> np.ndarray:
        return (self.static, self.delta, self.accel)[s]


def num_frames(num_samples: int, cfg: FrontendConfig) -> int:
    if num_samples < cfg.frame_len_samples:
        return 0
    return (num_samples - cfg.frame_len_samples) // cfg.hop_samples + 1


def _frame_starts(num_samples: int, cfg: FrontendConfig) -> np.ndarray:
    return np.arange(num_frames(num_samples, cfg)) * cfg.hop_samples


def frame_signal(samples: np.ndarray, cfg: FrontendConfig) -> np.ndarray:
    """Slice a signal into overlapping frames; trailing partial is dropped."""
    samples = np.asarray(samples)
    n = num_frames(samples.size, cfg)
    if n == 0:
        raise InputTooShort(
            f"need at least {cfg.frame_len_samples} samples, got {samples.size}")
    view = np.lib.stride_tricks.sliding_window_view(samples, cfg.frame_len_samples)
    return view[:: cfg.hop_samples][:n].copy()


def short_time_energy(samples: np.ndarray, cfg: FrontendConfig) -> np.ndarray:
    """Sum of squared sample values per frame."""
    frames = frame_signal(np.asarray(samples, dtype=np.float64), cfg)
    return np.sum(frames * frames, axis=1)


def zero_crossings(samples: np.ndarray, cfg: FrontendConfig) -> np.ndarray:
    """Count of sign changes per frame (zeros count as nonnegative)."""
    nonneg = np.asarray(samples) >= 0
    changes = (nonneg[:-1] != nonneg[1:]).astype(np.int64)
    csum = np.concatenate(([0], np.cumsum(changes)))
    starts = _frame_starts(len(nonneg), cfg)
    if starts.size == 0:
        raise InputTooShort(
            f"need at least {cfg.frame_len_samples} samples, got {len(nonneg)}")
    span = cfg.frame_len_samples - 1
    return csum[starts + span] - csum[starts]


def _speech_runs(speech: np.ndarray, max_gap: int) -> list[tuple[int, int]]:
    """Maximal index runs of True, merging gaps of at most max_gap frames."""
    idx = np.flatnonzero(speech)
    if idx.size == 0:
        return []
    runs = []
    start = prev = idx[0]
    for i in idx[1:]:
        if i - prev - 1 <= max_gap:
            prev = i
        else:
            runs.append((start, prev))
            start = prev = i
    runs.append((start, prev))
    return runs


def detect_endpoints(clip: AudioClip, cfg: FrontendConfig) -> tuple[int, int]:
    """Locate the spoken word as an inclusive [start, end] frame range.

    A frame is speech when its short-time energy exceeds an adaptive
    threshold (ste_threshold_ratio times the background estimate taken from
    the first 100 ms). Boundaries are then extended over adjacent frames
    whose zero-crossing rate is high and whose energy clears a low floor,
    which catches fricative onsets and offsets.
    """
    samples = clip.samples
    n = num_frames(samples.size, cfg)
    if n == 0:
        raise NoSpeechDetected("clip shorter than one analysis frame")
    ste = short_time_energy(samples, cfg)
    zcr = zero_crossings(samples, cfg)

    bg_samples = int(BACKGROUND_SECONDS * clip.sample_rate_hz)
    n_bg = max(1, min(n, num_frames(bg_samples, cfg)))
    background = float(np.mean(ste[:n_bg]))

    is_speech = ste > cfg.ste_threshold_ratio * background
    zcr_limit = cfg.zcr_threshold * (cfg.frame_len_samples - 1)
    extendable = (zcr > zcr_limit) & (ste > ZCR_STE_FLOOR_RATIO * background)

    extended = is_speech.copy()
    for start, end in _speech_runs(is_speech, 0):
        i = start
        while i > 0 and extendable[i - 1]:
            i -= 1
            extended[i] = True
        j = end
        while j < n - 1 and extendable[j + 1]:
            j += 1
            extended[j] = True

    runs = [(s, e) for s, e in _speech_runs(extended, cfg.max_silence_gap_frames)
            if e - s + 1 >= cfg.min_speech_frames]
    if not runs:
        raise NoSpeechDetected(
            f"no speech run of at least {cfg.min_speech_frames} frames")
    # The spoken word is the highest-energy run; earliest wins ties.
    best = max(runs, key=lambda r: (float(np.sum(ste[r[0]:r[1] + 1])), -r[0]))
    return best


def preemphasize(samples: np.ndarray, alpha: float) -> np.ndarray:
    """First-order high-pass: y[0] = x[0], y[n] = x[n] - alpha * x[n-1]."""
    if not (0.0 <= alpha < 1.0):
        raise ValueError("alpha must be in [0, 1)")
    x = np.asarray(samples, dtype=np.float64)
    y = x.copy()
    y[1:] -= alpha * x[:-1]
    return y


@lru_cache(maxsize=8)
def hamming_window(m: int) -> np.ndarray:
    idx = np.arange(m)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * idx / (m - 1))


def frame_and_window(samples: np.ndarray, cfg: FrontendConfig) -> np.ndarray:
    """Overlapping frames multiplied elementwise by a Hamming window."""
    frames = frame_signal(np.asarray(samples, dtype=np.float64), cfg)
    return frames * hamming_window(cfg.frame_len_samples)


def mel(f):
    """Perceptual frequency warp: mel(f) = 2595 * log10(1 + f/700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_inv(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=8)
def mel_filterbank(num_filters: int, frame_len: int,
                   sample_rate: int = SAMPLE_RATE) -> np.ndarray:
    """Triangular filters with centers equally spaced on the mel scale
    between 0 Hz and the Nyquist frequency; shape [num_filters, num_bins]."""
    nbins = frame_len // 2 + 1
    bin_freqs = np.arange(nbins) * (sample_rate / frame_len)
    edges = mel_inv(np.linspace(0.0, float(mel(sample_rate / 2)), num_filters + 2))
    bank = np.zeros((num_filters, nbins))
    for j in range(num_filters):
        lo, center, hi = edges[j], edges[j + 1], edges[j + 2]
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        bank[j] = np.maximum(0.0, np.minimum(rising, falling))
    return bank


def mel_filterbank_energies(windowed, cfg: FrontendConfig) -> np.ndarray:
    """Natural-log mel filter-bank energies of one frame or a frame stack."""
    frames = np.atleast_2d(np.asarray(windowed, dtype=np.float64))
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    bank = mel_filterbank(cfg.num_filters, cfg.frame_len_samples)
    energies = power @ bank.T
    out = np.log(energies + LOG_ENERGY_FLOOR)
    return out[0] if np.ndim(windowed) == 1 else out


def compute_deltas(static: np.ndarray, delta_window: int) -> tuple[np.ndarray, np.ndarray]:
    """Regression differences with edge frames clamped to the boundary.

    delta[t] = sum_d d * (x[t+d] - x[t-d]) / (2 * sum_d d^2); the same
    operator applied to delta yields the acceleration stream.
    """
    x = np.atleast_2d(np.asarray(static, dtype=np.float64))

    def regress(stream):
        n = stream.shape[0]
        t = np.arange(n)
        num = np.zeros_like(stream)
        for d in range(1, delta_window + 1):
            plus = np.clip(t + d, 0, n - 1)
            minus = np.clip(t - d, 0, n - 1)
            num += d * (stream[plus] - stream[minus])
        denom = 2.0 * sum(d * d for d in range(1, delta_window + 1))
        return num / denom

    delta = regress(x)
    accel = regress(delta)
    return delta, accel


def extract_features(clip: AudioClip, cfg: FrontendConfig) -> FeatureStreams:
    """Full pipeline: endpoint, slice, pre-emphasize, window, mel, deltas."""
    start, end = detect_endpoints(clip, cfg)
    lo = start * cfg.hop_samples
    hi = end * cfg.hop_samples + cfg.frame_len_samples
    segment = preemphasize(clip.samples[lo:hi], cfg.preemphasis_alpha)
    windowed = frame_and_window(segment, cfg)
    static = mel_filterbank_energies(windowed, cfg)
    delta, accel = compute_deltas(static, cfg.delta_window)
    return FeatureStreams(static=static, delta=delta, accel=accel)
