"""Model-directory storage and the assembled recognition engine.

A model directory holds the three stream codebooks, one HMM file per
phoneme, and the front-end configuration the models were trained with:

    codebook-0.txt  codebook-1.txt  codebook-2.txt
    hmm-<label>.txt ...
    frontend.cfg
"""

from __future__ import annotations

from dataclasses import fields as dataclass_fields
from pathlib import Path

from . import hmm, vq
from .audio import AudioClip, read_wav_bytes
from .decoder import DEFAULT_BEAM, DecodeResult, compile_network, decode
from .errors import NoPathSurvived, NoSpeechDetected, VoiceCmdError, WavFormatError
from .frontend import FrontendConfig, extract_features
from .grammar import CommandFsn
from .lexicon import Lexicon
from .phones import SIL


def parse_config(text: str) -> dict:
    """Parse `key = value` lines; `#` comments and blanks skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise VoiceCmdError(f"config line {lineno}: expected `key = value`")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def frontend_config_from_mapping(mapping: dict) -> FrontendConfig:
    defaults = FrontendConfig()
    kwargs = {}
    for field in dataclass_fields(FrontendConfig):
        if field.name in mapping:
            cast = type(getattr(defaults, field.name))
            kwargs[field.name] = cast(mapping[field.name])
    return FrontendConfig(**kwargs)


def save_model_dir(model_dir, codebooks=None, models=None,
                   cfg: FrontendConfig | None = None) -> None:
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    if codebooks is not None:
        for cb in codebooks:
            vq.save_codebook(cb, model_dir / f"codebook-{cb.stream_id}.txt")
    if models is not None:
        for label, model in models.items():
            hmm.save_model(model, model_dir / f"hmm-{label}.txt")
    if cfg is not None:
        lines = [f"{field.name} = {getattr(cfg, field.name)}"
                 for field in dataclass_fields(FrontendConfig)]
        (model_dir / "frontend.cfg").write_text("\n".join(lines) + "\n",
                                                encoding="utf-8")


def load_codebooks(model_dir) -> list:
    model_dir = Path(model_dir)
    books = []
    for s in range(vq.NUM_STREAMS):
        path = model_dir / f"codebook-{s}.txt"
        if not path.exists():
            raise VoiceCmdError(f"missing codebook file {path}")
        books.append(vq.load_codebook(path))
    return books


def load_models(model_dir) -> dict:
    model_dir = Path(model_dir)
    models = {}
    for path in sorted(model_dir.glob("hmm-*.txt")):
        model = hmm.load_model(path)
        models[model.label] = model
    if not models:
        raise VoiceCmdError(f"no hmm-*.txt model files in {model_dir}")
    return models


def load_frontend_config(model_dir) -> FrontendConfig:
    path = Path(model_dir) / "frontend.cfg"
    if not path.exists():
        return FrontendConfig()
    return frontend_config_from_mapping(
        parse_config(path.read_text(encoding="utf-8")))


class Recognizer:
    """Front-end, codebooks, models and compiled networks in one place."""

    def __init__(self, codebooks, models: dict, cfg: FrontendConfig,
                 lexicon: Lexicon, grammar: CommandFsn,
                 wake_grammar: CommandFsn | None = None,
                 beam_width: float = DEFAULT_BEAM, n_best: int = 6,
                 with_edge_silence: bool = True):
        silence = models.get(SIL)
        if silence is None:
            raise VoiceCmdError("model set has no silence model")
        self.codebooks = list(codebooks)
        self.models = dict(models)
        self.cfg = cfg
        self.lexicon = lexicon
        self.beam_width = beam_width
        self.n_best = n_best
        self.command_net = compile_network(grammar, lexicon, self.models,
                                           silence, with_edge_silence)
        self.wake_net = None
        if wake_grammar is not None:
            self.wake_net = compile_network(wake_grammar, lexicon, self.models,
                                            silence, with_edge_silence)

    @classmethod
    def from_dirs(cls, model_dir, lexicon: Lexicon, grammar: CommandFsn,
                  wake_grammar: CommandFsn | None = None, **kwargs):
        return cls(load_codebooks(model_dir), load_models(model_dir),
                   load_frontend_config(model_dir), lexicon, grammar,
                   wake_grammar, **kwargs)

    # --- observation preparation ---

    def codes_from_clip(self, clip: AudioClip) -> vq.CodewordSequence:
        features = extract_features(clip, self.cfg)
        return vq.quantize_streams(features, self.codebooks)

    def codes_from_payload(self, payload: bytes) -> vq.CodewordSequence:
        """Accept either WAV bytes or a codeword file (test mode)."""
        if payload.startswith(b"RIFF"):
            return self.codes_from_clip(read_wav_bytes(payload))
        if payload.startswith(b"CODEWORDS"):
            return vq.parse_codewords(payload.decode("utf-8"))
        raise WavFormatError(
            "payload is neither RIFF WAV nor a CODEWORDS file")

    # --- recognition ---

    def recognize(self, payload: bytes, n_best: int | None = None) -> DecodeResult:
        codes = self.codes_from_payload(payload)
        return decode(codes, self.command_net, beam_width=self.beam_width,
                      n_best=n_best or self.n_best)

    def try_wake(self, payload: bytes) -> str | None:
        """Decode against the wake grammar; None when not the wake word.

        The one-word wake grammar would force-align any speech, so the
        command grammar doubles as the filler model: the audio counts as
        the wake word only when the wake network scores at least as well.
        """
        if self.wake_net is None:
            return None
        try:
            codes = self.codes_from_payload(payload)
            result = decode(codes, self.wake_net, beam_width=self.beam_width,
                            n_best=1)
        except (NoSpeechDetected, NoPathSurvived):
            return None
        try:
            filler = decode(codes, self.command_net,
                            beam_width=self.beam_width, n_best=1)
        except NoPathSurvived:
            return " ".join(result.top.words)
        if result.top.score >= filler.top.score:
            return " ".join(result.top.words)
        return None
