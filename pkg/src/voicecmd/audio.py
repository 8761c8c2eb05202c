"""16 kHz / 16-bit mono PCM audio clips and WAV I/O."""

from __future__ import annotations

import io
import wave
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAudio, WavFormatError

SAMPLE_RATE = 16000


@dataclass(eq=False)
class AudioClip:
    """Raw speech samples; the engine's only input medium."""

    samples: np.ndarray
    sample_rate_hz: int = SAMPLE_RATE

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.int16)
        if samples.ndim != 1:
            raise InvalidAudio("samples must be a 1-D array")
        if samples.size == 0:
            raise InvalidAudio("samples must be nonempty")
        if self.sample_rate_hz != SAMPLE_RATE:
            raise InvalidAudio(
                f"sample_rate_hz must be {SAMPLE_RATE}, got {self.sample_rate_hz}")
        self.samples = samples

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def _check_wav_params(params) -> None:
    if params.comptype != "NONE":
        raise WavFormatError(
            f"compression type must be NONE (PCM), got {params.comptype!r}")
    if params.nchannels != 1:
        raise WavFormatError(
            f"channels must be 1 (mono), got {params.nchannels}")
    if params.sampwidth != 2:
        raise WavFormatError(
            f"sample width must be 2 bytes (16-bit), got {params.sampwidth}")
    if params.framerate != SAMPLE_RATE:
        raise WavFormatError(
            f"sample rate must be {SAMPLE_RATE} Hz, got {params.framerate}")


def _read_wav_file(fobj) -> AudioClip:
    try:
        with wave.open(fobj, "rb") as wav:
            _check_wav_params(wav.getparams())
            raw = wav.readframes(wav.getnframes())
    except wave.Error as exc:
        raise WavFormatError(f"not a readable RIFF WAV file: {exc}") from exc
    if not raw:
        raise WavFormatError("WAV file contains no samples")
    return AudioClip(np.frombuffer(raw, dtype="<i2"))


def read_wav(path) -> AudioClip:
    with open(path, "rb") as fobj:
        return _read_wav_file(fobj)


def read_wav_bytes(data: bytes) -> AudioClip:
    return _read_wav_file(io.BytesIO(data))


def write_wav(path, clip: AudioClip) -> None:
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(clip.sample_rate_hz)
        wav.writeframes(clip.samples.astype("<i2").tobytes())


def wav_bytes(clip: AudioClip) -> bytes:
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(clip.sample_rate_hz)
        wav.writeframes(clip.samples.astype("<i2").tobytes())
    return buf.getvalue()
