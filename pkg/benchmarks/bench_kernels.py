#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python reference lane.

Builds a realistic workload (a 30-word flat decoding network and phone
chain alignments, random discrete observations) and times both lanes on
identical inputs. Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from voicecmd.decoder import compile_network
from voicecmd.grammar import parse_grammar
from voicecmd.hmm import NUM_STATES, CompositeModel, PhonemeModel, emission_matrix
from voicecmd.kernels import _ref
from voicecmd.lexicon import Lexicon
from voicecmd.phones import SIL

try:
    from voicecmd.kernels import _hot
except ImportError:
    _hot = None

K = 16
NUM_WORDS = 30
FRAMES = 90
DECODES = 40
ALIGNMENTS = 400
WIDTH = 12
BEAM = 200.0


def random_model(rng, label):
    log_trans = np.full((NUM_STATES, NUM_STATES + 1), float("-inf"))
    for i in range(NUM_STATES):
        stay = rng.uniform(0.6, 0.9)
        log_trans[i, i] = np.log(stay)
        log_trans[i, i + 1] = np.log(1.0 - stay)
    emits = []
    for _ in range(3):
        rows = rng.uniform(0.05, 1.0, size=(NUM_STATES, K))
        rows /= rows.sum(axis=1, keepdims=True)
        emits.append(np.log(rows))
    return PhonemeModel(label=label, log_trans=log_trans, log_emit=tuple(emits))


def build_network(rng):
    phones = [f"p{i}" for i in range(10)]
    models = {ph: random_model(rng, ph) for ph in phones}
    models[SIL] = random_model(rng, SIL)
    entries = {}
    for w in range(NUM_WORDS):
        length = int(rng.integers(2, 5))
        entries[f"word{w:02d}"] = tuple(
            phones[int(rng.integers(len(phones)))] for _ in range(length))
    lex = Lexicon(entries=entries)
    fsn = parse_grammar("\n".join(entries), lex)
    net = compile_network(fsn, lex, models, models[SIL])
    return net, models


def bench_decode(lane, net, observations):
    args_list = []
    for codes in observations:
        emit = emission_matrix(net.emit_rows, codes)
        args_list.append((emit, net.self_lp, net.adv_lp,
                          net.chain_off, net.chain_len, net.chain_entry,
                          net.chain_exit, net.chain_exit_lp, net.chain_word,
                          net.byp_src, net.byp_dst, net.num_slots,
                          net.start_slot, net.final_slot, BEAM, WIDTH))
    begin = time.perf_counter()
    for args in args_list:
        lane.decode_frames(*args)
    return time.perf_counter() - begin


def bench_align(lane, models, rng):
    chain = CompositeModel([models[f"p{i % 10}"] for i in range(3)])
    self_lp, adv_lp, exit_lp, emit_rows = chain.flattened()
    jobs = []
    for _ in range(ALIGNMENTS):
        codes = rng.integers(0, K, size=(FRAMES, 3)).astype(np.int32)
        jobs.append(emission_matrix(emit_rows, codes))
    begin = time.perf_counter()
    for emit in jobs:
        lane.chain_viterbi(emit, self_lp, adv_lp, exit_lp)
    return time.perf_counter() - begin


def main():
    rng = np.random.default_rng(0)
    net, models = build_network(rng)
    observations = [rng.integers(0, K, size=(FRAMES, 3)).astype(np.int32)
                    for _ in range(DECODES)]
    print(f"network: {net.num_states} states, {len(net.chain_off)} chains, "
          f"{DECODES} decodes x {FRAMES} frames, beam {BEAM}, width {WIDTH}")

    rows = []
    ref_decode = bench_decode(_ref, net, observations)
    ref_align = bench_align(_ref, models, np.random.default_rng(1))
    rows.append(("pure", ref_decode, ref_align))
    if _hot is not None:
        hot_decode = bench_decode(_hot, net, observations)
        hot_align = bench_align(_hot, models, np.random.default_rng(1))
        rows.append(("compiled", hot_decode, hot_align))

    print(f"{'lane':<10} {'decode_frames':>16} {'chain_viterbi':>16}")
    for name, d, a in rows:
        print(f"{name:<10} {d:>13.3f} s {a:>13.3f} s")
    if _hot is not None:
        print(f"{'speedup':<10} {ref_decode / hot_decode:>14.1f}x "
              f"{ref_align / hot_align:>14.1f}x")
    else:
        print("compiled lane not built; install with Cython to compare")


if __name__ == "__main__":
    main()
