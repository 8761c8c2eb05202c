"""Synthetic corpus generator tests."""

import hashlib

import numpy as np
import pytest

from conftest import TINY_LEXICON, TINY_SPECS
from voicecmd.audio import SAMPLE_RATE, read_wav
from voicecmd.errors import MissingSpec
from voicecmd.frontend import FrontendConfig
from voicecmd.synth import (format_specs, generate_corpus, parse_specs,
                            synthesize_word)
from voicecmd.training import load_manifest

CFG = FrontendConfig()


def test_spec_parsing_round_trip():
    text = format_specs(TINY_SPECS)
    again = parse_specs(text)
    assert set(again) == set(TINY_SPECS)
    for label in TINY_SPECS:
        assert again[label].partials == TINY_SPECS[label].partials
        assert again[label].dur_min_frames == TINY_SPECS[label].dur_min_frames


def test_spectral_peak_at_dominant_partial():
    clip = synthesize_word(("s",), TINY_SPECS, seed=5, snr_db=np.inf)
    spectrum = np.abs(np.fft.rfft(clip.samples.astype(np.float64)))
    freqs = np.fft.rfftfreq(len(clip.samples), d=1.0 / SAMPLE_RATE)
    peak = freqs[np.argmax(spectrum)]
    dominant = max(TINY_SPECS["s"].partials, key=lambda p: p[1])[0]
    assert abs(peak - dominant) < 50.0


def test_deterministic_per_seed():
    a = synthesize_word(("m", "a", "l"), TINY_SPECS, seed=9, snr_db=np.inf)
    b = synthesize_word(("m", "a", "l"), TINY_SPECS, seed=9, snr_db=np.inf)
    assert np.array_equal(a.samples, b.samples)
    c = synthesize_word(("m", "a", "l"), TINY_SPECS, seed=10, snr_db=np.inf)
    assert not np.array_equal(a.samples, c.samples)


def test_empty_pronunciation():
    with pytest.raises(MissingSpec):
        synthesize_word((), TINY_SPECS, seed=0)


def test_missing_spec():
    with pytest.raises(MissingSpec):
        synthesize_word(("zz",), TINY_SPECS, seed=0)


def test_silence_margins():
    clip = synthesize_word(("k",), TINY_SPECS, seed=1, snr_db=np.inf)
    margin = int(0.3 * SAMPLE_RATE)
    assert np.all(clip.samples[: margin - 1] == 0)
    assert np.all(clip.samples[-(margin - 1):] == 0)


def test_generate_corpus_counts_and_segments(tmp_path):
    paths = generate_corpus(TINY_LEXICON, TINY_SPECS, tmp_path,
                            tokens_per_word=2, test_tokens_per_word=1,
                            seed=3, cfg=CFG)
    assert paths.num_train == 2 * len(TINY_LEXICON)
    assert paths.num_test == len(TINY_LEXICON)
    entries = load_manifest(paths.train_manifest)
    assert len(entries) == paths.num_train
    from voicecmd.frontend import extract_features
    for entry in entries[:4]:
        clip = read_wav(entry.wav_path)
        n = extract_features(clip, CFG).num_frames
        # segments are contiguous, exhaustive, and >= 3 frames each
        expected = 0
        for label, start, end in entry.segments:
            assert start == expected
            assert end - start >= 3
            expected = end
        assert expected == n
        labels = [s[0] for s in entry.segments]
        assert tuple(labels) == TINY_LEXICON.pronunciation(entry.words[0])


def test_train_test_clips_disjoint(tmp_path):
    paths = generate_corpus(TINY_LEXICON, TINY_SPECS, tmp_path,
                            tokens_per_word=2, test_tokens_per_word=2,
                            seed=4, cfg=CFG, train_snr_db=np.inf,
                            test_snr_db=np.inf)
    def hashes(manifest):
        return {hashlib.sha256(e.wav_path.read_bytes()).hexdigest()
                for e in load_manifest(manifest)}
    assert not (hashes(paths.train_manifest) & hashes(paths.test_manifest))


def test_generation_reproducible(tmp_path):
    p1 = generate_corpus(TINY_LEXICON, TINY_SPECS, tmp_path / "a",
                         tokens_per_word=1, test_tokens_per_word=1, seed=5,
                         cfg=CFG)
    p2 = generate_corpus(TINY_LEXICON, TINY_SPECS, tmp_path / "b",
                         tokens_per_word=1, test_tokens_per_word=1, seed=5,
                         cfg=CFG)
    for e1, e2 in zip(load_manifest(p1.train_manifest),
                      load_manifest(p2.train_manifest)):
        assert e1.segments == e2.segments
        assert e1.wav_path.read_bytes() == e2.wav_path.read_bytes()
