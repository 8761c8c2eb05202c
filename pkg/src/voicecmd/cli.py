"""Command-line interface.

Subcommands: synth-corpus, train-codebooks, bootstrap, train, decode,
evaluate, serve. Exit codes: 0 success, 1 runtime failure (diagnostic on
stderr), 2 usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import engine as engine_mod
from . import kernels, synth, vq
from .audio import read_wav
from .decoder import DEFAULT_BEAM, evaluate
from .errors import VoiceCmdError
from .frontend import FrontendConfig, extract_features
from .grammar import load_grammar, parse_grammar
from .lexicon import load_lexicon, parse_lexicon
from .service import CommandService
from .training import (TrainConfig, TrainingUtterance, bootstrap_models,
                       load_manifest, segmental_kmeans_train)

LISTEN_ENV_VAR = "VOICECMD_LISTEN"
DEFAULT_LISTEN = "127.0.0.1:8747"


def _data_text(name: str) -> str:
    return resources.files("voicecmd").joinpath(f"data/{name}").read_text(
        encoding="utf-8")


def _load_lexicon_arg(path: str | None):
    if path is None:
        return parse_lexicon(_data_text("sample.lex"))
    return load_lexicon(path)


def _frontend_config(args) -> FrontendConfig:
    if getattr(args, "frontend_config", None):
        text = Path(args.frontend_config).read_text(encoding="utf-8")
        return engine_mod.frontend_config_from_mapping(
            engine_mod.parse_config(text))
    return FrontendConfig()


def _corpus_from_manifest(entries, cfg: FrontendConfig, codebooks):
    corpus = []
    for entry in entries:
        clip = read_wav(entry.wav_path)
        features = extract_features(clip, cfg)
        codes = vq.quantize_streams(features, codebooks)
        segments = list(entry.segments) if entry.segments else None
        corpus.append(TrainingUtterance(word=entry.words[0], codes=codes,
                                        segments=segments))
    return corpus


def cmd_synth_corpus(args) -> int:
    lexicon = _load_lexicon_arg(args.lexicon)
    specs = (synth.load_specs(args.specs) if args.specs
             else synth.parse_specs(_data_text("phones.spec")))
    grammar = None
    if args.command_tokens > 0:
        grammar = (load_grammar(args.grammar, lexicon) if args.grammar
                   else parse_grammar(_data_text("commands.fsn"), lexicon))
    paths = synth.generate_corpus(
        lexicon, specs, args.out_dir,
        tokens_per_word=args.tokens_per_word,
        test_tokens_per_word=args.test_tokens_per_word,
        seed=args.seed, train_snr_db=args.train_snr_db,
        test_snr_db=args.test_snr_db, cfg=_frontend_config(args),
        grammar=grammar, command_tokens=args.command_tokens)
    print(f"train manifest: {paths.train_manifest} ({paths.num_train} utterances)")
    print(f"test manifest: {paths.test_manifest} ({paths.num_test} utterances)")
    if paths.command_manifest:
        print(f"command manifest: {paths.command_manifest} "
              f"({paths.num_commands} utterances)")
    return 0


def cmd_train_codebooks(args) -> int:
    cfg = _frontend_config(args)
    entries = load_manifest(args.manifest)
    pooled = [[], [], []]
    for entry in entries:
        features = extract_features(read_wav(entry.wav_path), cfg)
        for s in range(vq.NUM_STREAMS):
            pooled[s].append(features.stream(s))
    codebooks = []
    for s in range(vq.NUM_STREAMS):
        vectors = np.vstack(pooled[s])
        codebooks.append(vq.train_codebook(vectors, args.clusters,
                                           seed=args.seed + s, stream_id=s))
        print(f"stream {s}: {vectors.shape[0]} vectors -> "
              f"{codebooks[-1].size} codewords")
    engine_mod.save_model_dir(args.model_dir, codebooks=codebooks, cfg=cfg)
    return 0


def cmd_bootstrap(args) -> int:
    lexicon = _load_lexicon_arg(args.lexicon)
    cfg = engine_mod.load_frontend_config(args.model_dir)
    codebooks = engine_mod.load_codebooks(args.model_dir)
    corpus = _corpus_from_manifest(load_manifest(args.manifest), cfg, codebooks)
    ks = tuple(cb.size for cb in codebooks)
    models = bootstrap_models(corpus, lexicon, ks)
    engine_mod.save_model_dir(args.model_dir, models=models)
    print(f"bootstrapped {len(models)} phoneme models from "
          f"{len(corpus)} utterances")
    return 0


def cmd_train(args) -> int:
    lexicon = _load_lexicon_arg(args.lexicon)
    cfg = engine_mod.load_frontend_config(args.model_dir)
    codebooks = engine_mod.load_codebooks(args.model_dir)
    models = engine_mod.load_models(args.model_dir)
    corpus = _corpus_from_manifest(load_manifest(args.manifest), cfg, codebooks)
    train_cfg = TrainConfig(max_iterations=args.max_iterations,
                            rel_ll_epsilon=args.epsilon)
    models, log = segmental_kmeans_train(corpus, lexicon, models, train_cfg)
    for stats in log:
        print(stats.log_line())
    engine_mod.save_model_dir(args.model_dir, models=models)
    return 0


def _build_recognizer(args, wake: bool = False):
    lexicon = _load_lexicon_arg(args.lexicon)
    grammar = load_grammar(args.grammar, lexicon) if args.grammar else \
        parse_grammar(_data_text("commands.fsn"), lexicon)
    wake_grammar = None
    if wake:
        wake_grammar = (load_grammar(args.wake_grammar, lexicon)
                        if args.wake_grammar
                        else parse_grammar(_data_text("wake.fsn"), lexicon))
    return engine_mod.Recognizer.from_dirs(
        args.model_dir, lexicon, grammar, wake_grammar,
        beam_width=args.beam, n_best=args.nbest,
        with_edge_silence=not args.no_edge_silence)


def cmd_decode(args) -> int:
    recognizer = _build_recognizer(args)
    path = Path(args.input)
    if not path.exists():
        raise VoiceCmdError(f"input file not found: {path}")
    payload = path.read_bytes()
    result = recognizer.recognize(payload)
    for rank, hyp in enumerate(result.nbest, start=1):
        print(f"HYP {rank} {hyp.score:.6f} {' '.join(hyp.words)}")
    return 0


def cmd_evaluate(args) -> int:
    recognizer = _build_recognizer(args)
    entries = load_manifest(args.manifest)
    testset = [(read_wav(e.wav_path), e.words) for e in entries]
    report = evaluate(
        testset, recognizer.command_net, beam_width=args.beam,
        n_best=args.nbest, transform=recognizer.codes_from_clip,
        ks=(1, 3, 6))
    for line in report.metric_lines():
        print(line)
    print()
    print(report.table())
    return 0


def cmd_serve(args) -> int:
    config = {}
    if args.config:
        config = engine_mod.parse_config(
            Path(args.config).read_text(encoding="utf-8"))

    def pick(flag_value, key, fallback=None):
        if flag_value is not None:
            return flag_value
        return config.get(key, fallback)

    args.model_dir = pick(args.model_dir, "model_dir")
    args.lexicon = pick(args.lexicon, "lexicon")
    args.grammar = pick(args.grammar, "grammar")
    args.wake_grammar = pick(args.wake_grammar, "wake_grammar")
    if args.model_dir is None:
        raise VoiceCmdError("serve needs --model-dir (or model_dir in --config)")
    listen = os.environ.get(LISTEN_ENV_VAR) or pick(args.listen, "listen",
                                                    DEFAULT_LISTEN)
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise VoiceCmdError(f"bad listen address {listen!r}; use HOST:PORT")

    recognizer = _build_recognizer(args, wake=True)
    service = CommandService(recognizer, host=host, port=int(port),
                             n_best=args.nbest)
    service.start()
    bound = service.address
    print(f"listening on {bound[0]}:{bound[1]} ({kernels.BACKEND} kernels)")
    service.serve_forever()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voicecmd",
        description="Speaker-dependent isolated-word voice command recognition")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-corpus", help="generate the synthetic corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--specs")
    p.add_argument("--grammar")
    p.add_argument("--tokens-per-word", type=int, default=5)
    p.add_argument("--test-tokens-per-word", type=int, default=10)
    p.add_argument("--command-tokens", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-snr-db", type=float, default=float("inf"))
    p.add_argument("--test-snr-db", type=float, default=20.0)
    p.add_argument("--frontend-config")
    p.set_defaults(func=cmd_synth_corpus)

    p = sub.add_parser("train-codebooks", help="train the three VQ codebooks")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--clusters", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frontend-config")
    p.set_defaults(func=cmd_train_codebooks)

    p = sub.add_parser("bootstrap", help="initialize models from segments")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--lexicon")
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("train", help="segmental k-means training")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--max-iterations", type=int, default=20)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.set_defaults(func=cmd_train)

    def add_decode_args(p):
        p.add_argument("--model-dir", required=True)
        p.add_argument("--lexicon")
        p.add_argument("--grammar")
        p.add_argument("--nbest", type=int, default=6)
        p.add_argument("--beam", type=float, default=DEFAULT_BEAM)
        p.add_argument("--no-edge-silence", action="store_true")

    p = sub.add_parser("decode", help="decode one WAV or codeword file")
    add_decode_args(p)
    p.add_argument("input")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("evaluate", help="score a labeled test manifest")
    add_decode_args(p)
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="run the wake-word command service")
    p.add_argument("--model-dir")
    p.add_argument("--lexicon")
    p.add_argument("--grammar")
    p.add_argument("--wake-grammar")
    p.add_argument("--listen")
    p.add_argument("--config")
    p.add_argument("--nbest", type=int, default=6)
    p.add_argument("--beam", type=float, default=DEFAULT_BEAM)
    p.add_argument("--no-edge-silence", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VoiceCmdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
