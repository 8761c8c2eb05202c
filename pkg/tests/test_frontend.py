"""Front-end tests: endpointing, pre-emphasis, windowing, mel bank, deltas."""

import math

import numpy as np
import pytest

from voicecmd.audio import SAMPLE_RATE, AudioClip
from voicecmd.errors import InputTooShort, NoSpeechDetected
from voicecmd.frontend import (FrontendConfig, compute_deltas,
                               detect_endpoints, extract_features,
                               frame_and_window, hamming_window, mel,
                               mel_filterbank_energies, preemphasize,
                               LOG_ENERGY_FLOOR)

CFG = FrontendConfig()


def tone_clip(freq=1000.0, lead_s=0.5, tone_s=0.4, trail_s=0.5, amp=20000):
    lead = np.zeros(int(lead_s * SAMPLE_RATE), dtype=np.int16)
    t = np.arange(int(tone_s * SAMPLE_RATE)) / SAMPLE_RATE
    tone = (amp * np.sin(2 * np.pi * freq * t)).astype(np.int16)
    trail = np.zeros(int(trail_s * SAMPLE_RATE), dtype=np.int16)
    return AudioClip(np.concatenate([lead, tone, trail])), lead.size, lead.size + tone.size


# --- preemphasize ---

def test_preemphasis_direct_formula():
    out = preemphasize([1.0, 1.0, 1.0], 0.97)
    assert np.allclose(out, [1.0, 0.03, 0.03])


def test_preemphasis_alpha_zero_is_identity():
    x = np.array([3.0, -2.0, 7.5, 0.0])
    assert np.array_equal(preemphasize(x, 0.0), x)


def test_preemphasis_alternating():
    out = preemphasize([1.0, -1.0, 1.0], 0.97)
    assert np.allclose(out, [1.0, -1.97, 1.97])


# --- framing and windowing ---

def test_hamming_endpoints():
    w = hamming_window(256)
    assert abs(w[0] - 0.08) < 1e-12
    assert abs(w[255] - 0.08) < 1e-12


def test_hamming_peak_near_one():
    w = hamming_window(256)
    mid = round((256 - 1) / 2)
    assert abs(w[mid] - 1.0) < 1e-3


def test_frame_count():
    frames = frame_and_window(np.ones(512), CFG)
    assert frames.shape == (3, 256)


def test_frame_too_short():
    with pytest.raises(InputTooShort):
        frame_and_window(np.ones(100), CFG)


def test_window_reduces_energy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=1024)
    windowed = frame_and_window(x, CFG)
    for i, frame in enumerate(windowed):
        start = i * CFG.hop_samples
        raw = x[start:start + CFG.frame_len_samples]
        assert np.sum(frame ** 2) <= np.sum(raw ** 2) + 1e-12


# --- mel filter bank ---

def test_mel_formula():
    assert mel(0.0) == 0.0
    assert abs(mel(700.0) - 2595.0 * math.log10(2.0)) < 1e-9


def test_zero_frame_hits_floor():
    out = mel_filterbank_energies(np.zeros(256), CFG)
    assert np.allclose(out, np.log(LOG_ENERGY_FLOOR))


def test_amplitude_scaling_shifts_log_energy():
    rng = np.random.default_rng(1)
    frame = rng.normal(scale=1000.0, size=256) * hamming_window(256)
    c = 3.0
    base = mel_filterbank_energies(frame, CFG)
    scaled = mel_filterbank_energies(c * frame, CFG)
    # Energies far above the floor shift by exactly 2 ln c.
    assert np.all(base > np.log(LOG_ENERGY_FLOOR) + 5)
    assert np.allclose(scaled - base, 2.0 * np.log(c), atol=1e-6)


# --- deltas ---

def test_deltas_constant_stream_zero():
    static = np.ones((10, 15)) * 4.2
    delta, accel = compute_deltas(static, CFG.delta_window)
    assert np.all(delta == 0.0)
    assert np.all(accel == 0.0)


def test_deltas_single_frame_zero():
    delta, accel = compute_deltas(np.ones((1, 15)), CFG.delta_window)
    assert np.all(delta == 0.0)
    assert np.all(accel == 0.0)


def test_deltas_linear_ramp():
    # Hand evaluation of the regression formula on x[t] = t with W=2:
    # interior delta = (1*(2) + 2*(4)) / (2*(1+4)) = 1.
    ramp = np.arange(12, dtype=float)[:, None]
    delta, _ = compute_deltas(ramp, 2)
    assert np.allclose(delta[2:-2], 1.0)


# --- endpointing ---

def test_all_zero_clip_no_speech():
    clip = AudioClip(np.zeros(SAMPLE_RATE, dtype=np.int16))
    with pytest.raises(NoSpeechDetected):
        detect_endpoints(clip, CFG)


def test_tone_boundaries_within_two_frames():
    clip, tone_start, tone_end = tone_clip()
    start, end = detect_endpoints(clip, CFG)
    # Oracle: exact sample extent of the constructed tone, in frame units.
    expect_start = tone_start / CFG.hop_samples
    expect_end = (tone_end - CFG.frame_len_samples) / CFG.hop_samples
    assert abs(start - expect_start) <= 2
    assert abs(end - expect_end) <= 2


def test_dc_offset_no_speech():
    # Uniform energy equals the background estimate; no sign changes.
    clip = AudioClip(np.full(SAMPLE_RATE, 5000, dtype=np.int16))
    with pytest.raises(NoSpeechDetected):
        detect_endpoints(clip, CFG)


def test_endpoints_translation_consistency():
    base, _, _ = tone_clip(lead_s=0.4)
    s0, e0 = detect_endpoints(base, CFG)
    for k in (1, 3, 20):
        shifted = AudioClip(np.concatenate(
            [np.zeros(k * CFG.hop_samples, dtype=np.int16), base.samples]))
        s1, e1 = detect_endpoints(shifted, CFG)
        assert (s1, e1) == (s0 + k, e0 + k)


def test_endpoints_merge_small_gaps():
    clip1, a, _ = tone_clip(lead_s=0.4, tone_s=0.2, trail_s=0.05)
    gap = np.zeros(10 * CFG.hop_samples, dtype=np.int16)
    t = np.arange(int(0.2 * SAMPLE_RATE)) / SAMPLE_RATE
    tone2 = (18000 * np.sin(2 * np.pi * 800 * t)).astype(np.int16)
    merged = AudioClip(np.concatenate(
        [clip1.samples, gap, tone2, np.zeros(int(0.3 * SAMPLE_RATE), np.int16)]))
    start, end = detect_endpoints(merged, CFG)
    total_frames = (len(merged.samples) - CFG.frame_len_samples) // CFG.hop_samples
    assert start < a / CFG.hop_samples + 3
    assert end > total_frames - int(0.3 * SAMPLE_RATE) / CFG.hop_samples - 3


# --- extract_features ---

def test_extract_feature_count_matches_endpoints():
    clip, _, _ = tone_clip()
    start, end = detect_endpoints(clip, CFG)
    streams = extract_features(clip, CFG)
    assert streams.num_frames == end - start + 1
    assert streams.dim == CFG.num_filters


def test_extract_silence_only_raises():
    clip = AudioClip(np.zeros(SAMPLE_RATE, dtype=np.int16))
    with pytest.raises(NoSpeechDetected):
        extract_features(clip, CFG)


def test_extract_deterministic():
    clip, _, _ = tone_clip()
    a = extract_features(clip, CFG)
    b = extract_features(clip, CFG)
    assert np.array_equal(a.static, b.static)
    assert np.array_equal(a.delta, b.delta)
    assert np.array_equal(a.accel, b.accel)
