"""Synthetic speaker: deterministic tone-complex "phones" for end-to-end tests.

Each synthetic phone is a sum of sinusoid partials with a small noise
floor, rendered at durations drawn from its spec range. Words are phone
concatenations surrounded by silence; utterance-level white noise is
added at a requested SNR. Phone boundaries are known by construction and
are emitted as bootstrap segments in feature-frame units. This is a test
stand-in, not a speech synthesizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import SAMPLE_RATE, AudioClip, write_wav
from .errors import MissingSpec, VoiceCmdError
from .frontend import FrontendConfig, detect_endpoints
from .grammar import CommandFsn
from .lexicon import Lexicon
from .training import ManifestEntry, format_manifest

PEAK_AMPLITUDE = 11000              # int16 headroom for added noise
EDGE_RAMP_S = 0.002
MIN_SILENCE_S = 0.3
WORD_GAP_S = 0.15


@dataclass(frozen=True)
class SynthPhoneSpec:
    label: str
    partials: tuple                  # (frequency Hz, relative amplitude)
    dur_min_frames: int
    dur_max_frames: int
    amp_jitter: float = 0.1
    noise_snr_db: float = 30.0       # per-phone noise floor

    def __post_init__(self):
        if self.dur_min_frames < 3:
            raise ValueError(f"{self.label}: duration minimum is 3 frames")
        if self.dur_max_frames < self.dur_min_frames:
            raise ValueError(f"{self.label}: bad duration range")
        if not self.partials:
            raise ValueError(f"{self.label}: need at least one partial")
        for freq, _amp in self.partials:
            if not (0 < freq < SAMPLE_RATE / 2):
                raise ValueError(f"{self.label}: partial {freq} Hz out of range")


def parse_specs(text: str) -> dict:
    """Parse `phone: f1:a1 f2:a2 ... dur:min-max [jitter:x] [snr:db]` lines."""
    specs: dict[str, SynthPhoneSpec] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        label, _, rest = line.partition(":")
        label = label.strip()
        if not label or not rest.strip():
            raise VoiceCmdError(f"specs line {lineno}: expected `phone: ...`")
        partials = []
        dur = None
        jitter = 0.1
        snr = 45.0
        for token in rest.split():
            key, _, value = token.partition(":")
            if key == "dur":
                lo, _, hi = value.partition("-")
                dur = (int(lo), int(hi))
            elif key == "jitter":
                jitter = float(value)
            elif key == "snr":
                snr = float(value)
            else:
                partials.append((float(key), float(value)))
        if dur is None:
            raise VoiceCmdError(f"specs line {lineno}: missing dur:min-max")
        specs[label] = SynthPhoneSpec(
            label=label, partials=tuple(partials),
            dur_min_frames=dur[0], dur_max_frames=dur[1],
            amp_jitter=jitter, noise_snr_db=snr)
    return specs


def format_specs(specs: dict) -> str:
    lines = []
    for spec in specs.values():
        parts = [f"{freq:g}:{amp:g}" for freq, amp in spec.partials]
        parts.append(f"dur:{spec.dur_min_frames}-{spec.dur_max_frames}")
        parts.append(f"jitter:{spec.amp_jitter:g}")
        parts.append(f"snr:{spec.noise_snr_db:g}")
        lines.append(f"{spec.label}: {' '.join(parts)}")
    return "\n".join(lines) + "\n"


def load_specs(path) -> dict:
    with open(path, encoding="utf-8") as fobj:
        return parse_specs(fobj.read())


def _edge_ramp(n: int) -> np.ndarray:
    ramp_len = min(int(EDGE_RAMP_S * SAMPLE_RATE), n // 2)
    env = np.ones(n)
    if ramp_len > 0:
        ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(ramp_len) / ramp_len))
        env[:ramp_len] = ramp
        env[-ramp_len:] = ramp[::-1]
    return env


def _render_phone(spec: SynthPhoneSpec, rng, hop: int) -> np.ndarray:
    frames = int(rng.integers(spec.dur_min_frames, spec.dur_max_frames + 1))
    n = frames * hop
    t = np.arange(n) / SAMPLE_RATE
    wave = np.zeros(n)
    for freq, amp in spec.partials:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        wave += amp * np.sin(2.0 * np.pi * freq * t + phase)
    wave *= _edge_ramp(n) * rng.uniform(1.0 - spec.amp_jitter,
                                        1.0 + spec.amp_jitter)
    if np.isfinite(spec.noise_snr_db):
        power = float(np.mean(wave ** 2))
        sigma = np.sqrt(power / 10.0 ** (spec.noise_snr_db / 10.0))
        wave += rng.normal(0.0, sigma, n)
    return wave


def _round_to_hop(n_samples: float, hop: int) -> int:
    return int(round(n_samples / hop)) * hop


def _render_sequence(pronunciations, specs, rng, snr_db: float,
                     cfg: FrontendConfig):
    """Render a sequence of (word, phones) with silence margins and gaps.

    Returns (clip, phone sample spans as (label, start, end)).
    """
    hop = cfg.hop_samples
    lead = _round_to_hop((MIN_SILENCE_S + rng.uniform(0.0, 0.1)) * SAMPLE_RATE, hop)
    gap = _round_to_hop(WORD_GAP_S * SAMPLE_RATE, hop)
    trail = _round_to_hop((MIN_SILENCE_S + rng.uniform(0.0, 0.1)) * SAMPLE_RATE, hop)

    pieces = [np.zeros(lead)]
    spans = []
    cursor = lead
    for w_idx, (_word, phones) in enumerate(pronunciations):
        if w_idx > 0:
            pieces.append(np.zeros(gap))
            cursor += gap
        for label in phones:
            spec = specs.get(label)
            if spec is None:
                raise MissingSpec(f"no synthesis spec for phoneme {label!r}")
            wave = _render_phone(spec, rng, hop)
            pieces.append(wave)
            spans.append((label, cursor, cursor + wave.size))
            cursor += wave.size
    pieces.append(np.zeros(trail))
    signal = np.concatenate(pieces)

    peak = float(np.max(np.abs(signal)))
    if peak > 0:
        signal *= PEAK_AMPLITUDE / peak
    if np.isfinite(snr_db):
        speech = signal[lead:cursor]
        power = float(np.mean(speech ** 2))
        sigma = np.sqrt(power / 10.0 ** (snr_db / 10.0))
        signal = signal + rng.normal(0.0, sigma, signal.size)
    samples = np.clip(np.round(signal), -32768, 32767).astype(np.int16)
    return AudioClip(samples), spans


def synthesize_word(pronunciation, specs, seed: int,
                    snr_db: float = np.inf,
                    cfg: FrontendConfig = FrontendConfig()) -> AudioClip:
    """Render one word; deterministic for a given seed."""
    phones = tuple(pronunciation)
    if not phones:
        raise MissingSpec("empty pronunciation")
    rng = np.random.default_rng(seed)
    clip, _spans = _render_sequence([("", phones)], specs, rng, snr_db, cfg)
    return clip


def _frame_segments(spans, clip: AudioClip, cfg: FrontendConfig):
    """Map phone sample spans to feature-frame segments of the endpointed
    region, covering it exactly with at least 3 frames per phone."""
    start, end = detect_endpoints(clip, cfg)
    total = end - start + 1
    hop = cfg.hop_samples
    bounds = [0]
    for _label, _a, b in spans[:-1]:
        bounds.append(b // hop - start)
    bounds.append(total)
    # Clamp to monotone, then enforce the 3-frame minimum in both passes.
    if total < 3 * len(spans):
        raise VoiceCmdError(
            f"endpointed region has {total} frames; cannot cover "
            f"{len(spans)} phones")
    for i in range(1, len(bounds)):
        bounds[i] = max(bounds[i], bounds[i - 1] + 3)
    bounds[-1] = total
    for i in range(len(bounds) - 2, 0, -1):
        bounds[i] = min(bounds[i], bounds[i + 1] - 3)
    segments = []
    for i, (label, _a, _b) in enumerate(spans):
        segments.append((label, bounds[i], bounds[i + 1]))
    return segments


@dataclass(frozen=True)
class CorpusPaths:
    out_dir: Path
    train_manifest: Path
    test_manifest: Path
    command_manifest: Path | None
    num_train: int
    num_test: int
    num_commands: int


def _seed_for(master: int, split: int, group: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((master, split, group, index)))


def generate_corpus(lexicon: Lexicon, specs: dict, out_dir,
                    tokens_per_word: int = 5, test_tokens_per_word: int = 10,
                    seed: int = 0, train_snr_db: float = np.inf,
                    test_snr_db: float = 20.0,
                    cfg: FrontendConfig = FrontendConfig(),
                    grammar: CommandFsn | None = None,
                    command_tokens: int = 0) -> CorpusPaths:
    """Write WAV files plus train/test (and optional command) manifests.

    Training entries carry ground-truth bootstrap segments. Train and
    test draw from disjoint seed streams, so no clip repeats across
    splits.
    """
    for word in lexicon.words:
        for label in lexicon.pronunciation(word):
            if label not in specs:
                raise MissingSpec(f"no synthesis spec for phoneme {label!r}")
    out_dir = Path(out_dir)
    wav_dir = out_dir / "wav"
    wav_dir.mkdir(parents=True, exist_ok=True)

    def render_to(name, pronunciations, rng, snr_db, want_segments):
        clip, spans = _render_sequence(pronunciations, specs, rng, snr_db, cfg)
        path = wav_dir / name
        write_wav(path, clip)
        segments = _frame_segments(spans, clip, cfg) if want_segments else None
        return path, segments

    train_entries = []
    test_entries = []
    for w_idx, word in enumerate(lexicon.words):
        phones = lexicon.pronunciation(word)
        for i in range(tokens_per_word):
            rng = _seed_for(seed, 0, w_idx, i)
            path, segments = render_to(f"train_{word}_{i:03d}.wav",
                                       [(word, phones)], rng, train_snr_db, True)
            train_entries.append(ManifestEntry(
                words=(word,), wav_path=path.relative_to(out_dir),
                segments=tuple(segments)))
        for i in range(test_tokens_per_word):
            rng = _seed_for(seed, 1, w_idx, i)
            path, _ = render_to(f"test_{word}_{i:03d}.wav",
                                [(word, phones)], rng, test_snr_db, False)
            test_entries.append(ManifestEntry(
                words=(word,), wav_path=path.relative_to(out_dir)))

    train_manifest = out_dir / "train.manifest"
    train_manifest.write_text(format_manifest(train_entries), encoding="utf-8")
    test_manifest = out_dir / "test.manifest"
    test_manifest.write_text(format_manifest(test_entries), encoding="utf-8")

    command_manifest = None
    num_commands = 0
    if grammar is not None and command_tokens > 0:
        command_entries = []
        for c_idx, command in enumerate(grammar.commands):
            pronunciations = [(w, lexicon.pronunciation(w)) for w in command]
            for i in range(command_tokens):
                rng = _seed_for(seed, 2, c_idx, i)
                path, _ = render_to(f"cmd_{c_idx:02d}_{i:03d}.wav",
                                    pronunciations, rng, test_snr_db, False)
                command_entries.append(ManifestEntry(
                    words=tuple(command), wav_path=path.relative_to(out_dir)))
        command_manifest = out_dir / "commands.manifest"
        command_manifest.write_text(format_manifest(command_entries),
                                    encoding="utf-8")
        num_commands = len(command_entries)

    return CorpusPaths(out_dir=out_dir, train_manifest=train_manifest,
                       test_manifest=test_manifest,
                       command_manifest=command_manifest,
                       num_train=len(train_entries),
                       num_test=len(test_entries),
                       num_commands=num_commands)
