"""Shared fixtures: a small trained system used by service and CLI tests."""

import numpy as np
import pytest

from voicecmd import vq
from voicecmd.audio import read_wav
from voicecmd.frontend import FrontendConfig, extract_features
from voicecmd.grammar import parse_grammar
from voicecmd.lexicon import Lexicon
from voicecmd.phones import SIL
from voicecmd.synth import generate_corpus, parse_specs
from voicecmd.training import (TrainConfig, TrainingUtterance,
                               bootstrap_models, load_manifest,
                               segmental_kmeans_train)

TINY_LEXICON = Lexicon(entries={
    "kant": ("k", "a", "n", "t"),
    "kulcasayk": ("k", "wu", "l", "c", "a", "s", "ay", "k"),
    "mal": ("m", "a", "l"),
    "saym": ("s", "ay", "m"),
    "mwul": ("m", "wu", "l"),
})

TINY_SPECS = parse_specs("""
k: 423:1.0 3260:0.7 snr:30 dur:8-12
a: 259:1.0 839:0.7 snr:30 dur:10-14
n: 120:1.0 1409:0.7 snr:30 dur:8-12
t: 2683:1.0 4727:0.7 snr:30 dur:8-12
wu: 615:1.0 1101:0.7 snr:30 dur:10-14
l: 839:1.0 1768:0.7 snr:30 dur:8-12
c: 2190:1.0 3936:0.7 snr:30 dur:8-12
s: 4727:1.0 6737:0.7 snr:30 dur:8-12
ay: 1101:1.0 2190:0.7 snr:30 dur:10-14
m: 120:1.0 615:0.7 snr:30 dur:8-12
""")


class TinySystem:
    def __init__(self, out_dir):
        self.cfg = FrontendConfig()
        self.lexicon = TINY_LEXICON
        self.specs = TINY_SPECS
        self.out_dir = out_dir
        paths = generate_corpus(self.lexicon, self.specs, out_dir,
                                tokens_per_word=3, test_tokens_per_word=2,
                                seed=11, train_snr_db=np.inf,
                                test_snr_db=25.0, cfg=self.cfg)
        self.paths = paths
        entries = load_manifest(paths.train_manifest)
        feats = [(e, extract_features(read_wav(e.wav_path), self.cfg))
                 for e in entries]
        pooled = [np.vstack([f.stream(s) for _, f in feats]) for s in range(3)]
        self.codebooks = [vq.train_codebook(pooled[s], 8, seed=s, stream_id=s)
                          for s in range(3)]
        corpus = [TrainingUtterance(word=e.words[0],
                                    codes=vq.quantize_streams(f, self.codebooks),
                                    segments=list(e.segments))
                  for e, f in feats]
        ks = tuple(cb.size for cb in self.codebooks)
        models = bootstrap_models(corpus, self.lexicon, ks)
        self.models, self.train_log = segmental_kmeans_train(
            corpus, self.lexicon, models, TrainConfig(max_iterations=8))
        self.corpus = corpus
        self.silence = self.models[SIL]

    def command_grammar(self):
        return parse_grammar("kulcasayk\nmal\nsaym\nmwul\nkulcasayk mal\n",
                             self.lexicon)

    def wake_grammar(self):
        return parse_grammar("kant\n", self.lexicon)

    def transform(self, clip):
        return vq.quantize_streams(extract_features(clip, self.cfg),
                                   self.codebooks)


@pytest.fixture(scope="session")
def tiny_system(tmp_path_factory):
    return TinySystem(tmp_path_factory.mktemp("tiny_corpus"))
