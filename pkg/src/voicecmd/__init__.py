"""Speaker-dependent isolated-word voice command recognition toolkit.

Discrete multi-codebook phoneme HMMs trained by segmental k-means,
grammar-constrained frame-synchronous Viterbi decoding with N-best
output, and a wake-word command service over a local socket.
"""

__version__ = "0.1.0"

from .audio import AudioClip, read_wav, read_wav_bytes, write_wav
from .decoder import DecodeResult, compile_network, decode, evaluate
from .frontend import FeatureStreams, FrontendConfig, extract_features
from .grammar import CommandFsn, branching_stats, parse_grammar, word_pairs
from .hmm import CompositeModel, PhonemeModel, init_flat, reestimate, viterbi_align
from .lexicon import Lexicon, parse_lexicon
from .training import TrainConfig, TrainingUtterance, bootstrap_models, \
    segment_word, segmental_kmeans_train
from .vq import Codebook, CodewordSequence, quantize, quantize_streams, \
    train_codebook

__all__ = [
    "AudioClip", "read_wav", "read_wav_bytes", "write_wav",
    "FeatureStreams", "FrontendConfig", "extract_features",
    "Codebook", "CodewordSequence", "train_codebook", "quantize",
    "quantize_streams",
    "PhonemeModel", "CompositeModel", "init_flat", "reestimate",
    "viterbi_align",
    "Lexicon", "parse_lexicon",
    "CommandFsn", "parse_grammar", "word_pairs", "branching_stats",
    "TrainConfig", "TrainingUtterance", "bootstrap_models", "segment_word",
    "segmental_kmeans_train",
    "DecodeResult", "compile_network", "decode", "evaluate",
]
