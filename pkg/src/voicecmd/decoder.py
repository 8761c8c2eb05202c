"""Grammar-constrained frame-synchronous Viterbi decoding with N-best output.

The command network expands every grammar arc into its word's phone chain.
A silence model instance sits on every word-to-word junction (one per
grammar node with both incoming and outgoing arcs) and is skippable
through a bypass link; optional silence instances guard the utterance
start and end. Decoding is time-synchronous token passing with a
log-score beam margin; with an infinite beam the top hypothesis is the
exact Viterbi optimum over (word sequence, state path) pairs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (EmptyTestset, MissingModel, NoPathSurvived, UnknownWord,
                     VoiceCmdError)
from .grammar import END, START, CommandFsn, word_pairs
from .hmm import NUM_STATES, CompositeModel, PhonemeModel, emission_matrix
from .lexicon import Lexicon
from .vq import NUM_STREAMS, CodewordSequence

DEFAULT_BEAM = 200.0
NEG_INF = float("-inf")


@dataclass(eq=False)
class DecodingNetwork:
    """Flattened chain/slot arrays consumed by the decode kernels."""

    fsn: CommandFsn
    words: tuple                        # word id -> word string
    pairs: object                       # WordPairSet derived from the FSN
    with_edge_silence: bool
    num_states: int
    num_slots: int
    self_lp: np.ndarray
    adv_lp: np.ndarray
    chain_off: np.ndarray
    chain_len: np.ndarray
    chain_entry: np.ndarray
    chain_exit: np.ndarray
    chain_exit_lp: np.ndarray
    chain_word: np.ndarray
    byp_src: np.ndarray
    byp_dst: np.ndarray
    start_slot: int
    final_slot: int
    emit_rows: tuple                    # per stream, [num_states, K_s]
    num_silence_instances: int
    min_frames: int

    def frame_emissions(self, obs: CodewordSequence) -> np.ndarray:
        return emission_matrix(self.emit_rows, obs.codes)


@dataclass(frozen=True)
class Hypothesis:
    words: tuple
    score: float
    spans: tuple                        # (word, start_frame, end_frame) each


@dataclass(frozen=True)
class DecodeResult:
    nbest: tuple
    beam_width: float
    frames: int

    @property
    def top(self) -> Hypothesis:
        return self.nbest[0]


def _pre(node: int) -> int:
    return 2 * node


def _post(node: int) -> int:
    return 2 * node + 1


def compile_network(fsn: CommandFsn, lexicon: Lexicon, phone_models: dict,
                    silence_model: PhonemeModel,
                    with_edge_silence: bool = True) -> DecodingNetwork:
    """Expand the grammar into a decoding network of HMM chain instances.

    Every grammar arc becomes a word chain (3 states per phone). Grammar
    nodes with both incoming and outgoing word arcs receive one silence
    instance between their pre and post slots; START and END receive one
    only when with_edge_silence is set. A bypass link always joins pre to
    post, so silence is optional everywhere it appears.
    """
    word_ids: dict[str, int] = {}
    for arc in fsn.arcs:
        if arc.word not in lexicon:
            raise UnknownWord(f"{arc.word!r} is not in the lexicon")
        word_ids.setdefault(arc.word, len(word_ids))
    words = tuple(word_ids)

    def phone_chain(labels) -> CompositeModel:
        models = []
        for label in labels:
            model = phone_models.get(label)
            if model is None:
                raise MissingModel(f"no trained model for phoneme {label!r}")
            models.append(model)
        return CompositeModel(models)

    chains: list[tuple[CompositeModel, int, int, int]] = []  # model, entry, exit, word
    has_in = set()
    has_out = set()
    for arc in fsn.arcs:
        has_in.add(arc.dst)
        has_out.add(arc.src)
        chain = phone_chain(lexicon.pronunciation(arc.word))
        chains.append((chain, _post(arc.src), _pre(arc.dst), word_ids[arc.word]))

    silence_nodes = [n for n in range(fsn.num_nodes)
                     if (n in has_in and n in has_out) or
                        (with_edge_silence and n in (START, END))]
    sil_chain = CompositeModel([silence_model])
    num_silence = 0
    for node in silence_nodes:
        chains.append((sil_chain, _pre(node), _post(node), -1))
        num_silence += 1

    num_slots = 2 * fsn.num_nodes
    byp_src = np.asarray([_pre(n) for n in range(fsn.num_nodes)], dtype=np.int32)
    byp_dst = np.asarray([_post(n) for n in range(fsn.num_nodes)], dtype=np.int32)

    total_states = sum(c[0].num_states for c in chains)
    self_lp = np.empty(total_states)
    adv_lp = np.full(total_states, NEG_INF)
    ks = silence_model.codebook_sizes
    emit_rows = tuple(np.empty((total_states, ks[s])) for s in range(NUM_STREAMS))
    chain_off = np.empty(len(chains), dtype=np.int32)
    chain_len = np.empty(len(chains), dtype=np.int32)
    chain_entry = np.empty(len(chains), dtype=np.int32)
    chain_exit = np.empty(len(chains), dtype=np.int32)
    chain_exit_lp = np.empty(len(chains))
    chain_word = np.empty(len(chains), dtype=np.int32)

    offset = 0
    for idx, (chain, entry, exit_slot, word_id) in enumerate(chains):
        c_self, c_adv, c_exit, c_emit = chain.flattened()
        size = chain.num_states
        self_lp[offset:offset + size] = c_self
        adv_lp[offset:offset + size] = c_adv
        for s in range(NUM_STREAMS):
            emit_rows[s][offset:offset + size] = c_emit[s]
        chain_off[idx] = offset
        chain_len[idx] = size
        chain_entry[idx] = entry
        chain_exit[idx] = exit_slot
        chain_exit_lp[idx] = c_exit
        chain_word[idx] = word_id
        offset += size

    min_frames = min(NUM_STATES * sum(len(lexicon.pronunciation(w)) for w in seq)
                     for seq in fsn.commands)

    return DecodingNetwork(
        fsn=fsn, words=words, pairs=word_pairs(fsn),
        with_edge_silence=with_edge_silence,
        num_states=total_states, num_slots=num_slots,
        self_lp=self_lp, adv_lp=adv_lp,
        chain_off=chain_off, chain_len=chain_len,
        chain_entry=chain_entry, chain_exit=chain_exit,
        chain_exit_lp=chain_exit_lp, chain_word=chain_word,
        byp_src=byp_src, byp_dst=byp_dst,
        start_slot=_pre(START), final_slot=_post(END),
        emit_rows=emit_rows, num_silence_instances=num_silence,
        min_frames=min_frames)


def decode(obs: CodewordSequence, net: DecodingNetwork,
           beam_width: float = DEFAULT_BEAM, n_best: int = 1) -> DecodeResult:
    """Time-synchronous beam search; returns the N best distinct word
    sequences reaching END at the final frame, best first. Equal scores
    order by the lexicographically earlier word sequence."""
    if len(obs) == 0:
        raise NoPathSurvived("empty observation")
    if n_best < 1:
        raise ValueError("n_best must be >= 1")
    width = 2 * n_best
    emit = net.frame_emissions(obs)
    final, hist_parent, hist_word, rec_parent, rec_word, rec_start, rec_end = \
        kernels.decode_frames(
            emit, net.self_lp, net.adv_lp,
            net.chain_off, net.chain_len, net.chain_entry, net.chain_exit,
            net.chain_exit_lp, net.chain_word,
            net.byp_src, net.byp_dst, net.num_slots,
            net.start_slot, net.final_slot,
            float(beam_width), width)
    if not final:
        raise NoPathSurvived(
            f"no hypothesis reached the grammar end after {len(obs)} frames "
            f"(beam {beam_width})")

    def sequence_of(hist: int) -> tuple:
        out = []
        while hist > 0:
            out.append(net.words[hist_word[hist]])
            hist = hist_parent[hist]
        return tuple(reversed(out))

    def spans_of(rec: int) -> tuple:
        out = []
        while rec >= 0:
            out.append((net.words[rec_word[rec]], rec_start[rec], rec_end[rec]))
            rec = rec_parent[rec]
        return tuple(reversed(out))

    scored = [(float(score), sequence_of(hist), spans_of(rec))
              for score, hist, rec in final]
    scored.sort(key=lambda item: (-item[0], item[1]))
    nbest = tuple(Hypothesis(words=words, score=score, spans=spans)
                  for score, words, spans in scored[:n_best])
    return DecodeResult(nbest=nbest, beam_width=float(beam_width),
                        frames=len(obs))


@dataclass(eq=False)
class EvalReport:
    total: int
    top_k_correct: dict
    failures: int
    latencies_s: list = field(default_factory=list)

    def accuracy(self, k: int) -> float:
        return self.top_k_correct[k] / self.total

    @property
    def mean_latency_s(self) -> float:
        return float(np.mean(self.latencies_s)) if self.latencies_s else 0.0

    @property
    def p95_latency_s(self) -> float:
        return float(np.percentile(self.latencies_s, 95)) if self.latencies_s else 0.0

    def metric_lines(self) -> list:
        lines = [f"METRIC total {self.total}",
                 f"METRIC failures {self.failures}"]
        for k in sorted(self.top_k_correct):
            lines.append(f"METRIC top{k}_accuracy {self.accuracy(k):.4f}")
        lines.append(f"METRIC mean_latency_s {self.mean_latency_s:.4f}")
        lines.append(f"METRIC p95_latency_s {self.p95_latency_s:.4f}")
        return lines

    def table(self) -> str:
        rows = [("utterances", str(self.total)),
                ("decode failures", str(self.failures))]
        for k in sorted(self.top_k_correct):
            rows.append((f"top-{k} accuracy", f"{100 * self.accuracy(k):.2f}%"))
        rows.append(("mean latency", f"{1000 * self.mean_latency_s:.1f} ms"))
        rows.append(("95p latency", f"{1000 * self.p95_latency_s:.1f} ms"))
        pad = max(len(r[0]) for r in rows)
        return "\n".join(f"{name.ljust(pad)}  {value}" for name, value in rows)


def evaluate(testset, net: DecodingNetwork, beam_width: float = DEFAULT_BEAM,
             n_best: int = 6, transform=None, ks=(1, 3, 6)) -> EvalReport:
    """Decode a labeled test set and report top-k accuracy and latency.

    Items are (observation, reference word sequence) pairs; observations
    that are not CodewordSequence instances are converted through
    `transform`. References must be accepted by the grammar. Decode
    errors count as failures (wrong at every k).
    """
    items = list(testset)
    if not items:
        raise EmptyTestset("test set is empty")
    ks = tuple(sorted(set(ks) | {1}))
    report = EvalReport(total=len(items), top_k_correct={k: 0 for k in ks},
                        failures=0)
    for obs, reference in items:
        reference = tuple(reference)
        if not net.fsn.accepts(reference):
            raise VoiceCmdError(
                f"reference {' '.join(reference)!r} is not accepted by the grammar")
        if not isinstance(obs, CodewordSequence):
            obs = transform(obs)
        begin = time.perf_counter()
        try:
            result = decode(obs, net, beam_width=beam_width,
                            n_best=max(n_best, max(ks)))
        except VoiceCmdError:
            report.failures += 1
            continue
        finally:
            report.latencies_s.append(time.perf_counter() - begin)
        hyp_seqs = [h.words for h in result.nbest]
        for k in ks:
            if reference in hyp_seqs[:k]:
                report.top_k_correct[k] += 1
    return report
