"""Pure-Python/NumPy reference lane for the dynamic-programming kernels.

The compiled lane mirrors this module operation for operation; any change
to merge order or tie rules here must be replicated there.
"""

from __future__ import annotations

import numpy as np

NEG_INF = float("-inf")


def chain_viterbi(emit: np.ndarray, self_lp: np.ndarray, adv_lp: np.ndarray,
                  exit_lp: float) -> tuple[np.ndarray, float]:
    """Best path through a left-to-right chain of states.

    emit[t, g] is the frame log-emission for state g; self_lp[g] and
    adv_lp[g] are the g->g and g->g+1 transition log-probabilities
    (adv_lp of the last state is unused); exit_lp is charged once for
    leaving the final state after the last frame. The path must start in
    state 0 and end in the last state. Predecessor ties prefer the
    lower-indexed state.
    """
    emit = np.asarray(emit, dtype=np.float64)
    t_len, g_len = emit.shape
    delta = np.full(g_len, NEG_INF)
    delta[0] = emit[0, 0]
    from_prev = np.zeros((t_len, g_len), dtype=bool)
    for t in range(1, t_len):
        stay = delta + self_lp
        move = np.empty(g_len)
        move[0] = NEG_INF
        move[1:] = delta[:-1] + adv_lp[:-1]
        # >= : on ties take the lower-indexed predecessor.
        take_move = move >= stay
        delta = np.where(take_move, move, stay) + emit[t]
        from_prev[t] = take_move
    score = float(delta[g_len - 1] + exit_lp)
    path = np.empty(t_len, dtype=np.int32)
    g = g_len - 1
    path[t_len - 1] = g
    for t in range(t_len - 1, 0, -1):
        if from_prev[t, g]:
            g -= 1
        path[t - 1] = g
    return path, score


def _push(dest: list, score: float, hist: int, rec: int, ws: int, width: int) -> None:
    """Insert a token into a bounded, sequence-distinct token list.

    Same-history tokens keep the better score; at capacity the worst
    entry is evicted only by a strictly better score.
    """
    for i, tok in enumerate(dest):
        if tok[1] == hist:
            if score > tok[0]:
                dest[i] = (score, hist, rec, ws)
            return
    if len(dest) < width:
        dest.append((score, hist, rec, ws))
        return
    worst = 0
    for i in range(1, len(dest)):
        if dest[i][0] < dest[worst][0]:
            worst = i
    if score > dest[worst][0]:
        dest[worst] = (score, hist, rec, ws)


def decode_frames(emit, self_lp, adv_lp,
                  chain_off, chain_len, chain_entry, chain_exit,
                  chain_exit_lp, chain_word,
                  byp_src, byp_dst, n_slots, start_slot, final_slot,
                  beam, width):
    """Frame-synchronous token passing over a network of HMM chains.

    Chains (word or silence instances) are linear state runs connected
    through non-emitting slots. Per frame each state merges tokens from
    itself, its predecessor state, and (for chain-initial states) the
    chain's entry slot; then chain exits extend word histories, push into
    slots, and bypass edges forward slot contents. Tokens more than
    `beam` below the frame-best are pruned. Returns the tokens of
    `final_slot` after the last frame plus the history/span tables.
    """
    emit = np.asarray(emit, dtype=np.float64)
    t_len, g_len = emit.shape
    n_chains = len(chain_off)

    hist_parent = [-1]
    hist_word = [-1]
    intern: dict[tuple[int, int], int] = {}
    rec_parent: list[int] = []
    rec_word: list[int] = []
    rec_start: list[int] = []
    rec_end: list[int] = []

    slots_prev: list[list] = [[] for _ in range(n_slots)]
    slots_prev[start_slot].append((0.0, 0, -1, 0))
    for b in range(len(byp_src)):
        for tok in slots_prev[byp_src[b]]:
            _push(slots_prev[byp_dst[b]], tok[0], tok[1], tok[2], tok[3], width)

    tokens: list[list] = [[] for _ in range(g_len)]

    for t in range(t_len):
        new_tokens: list[list] = [[] for _ in range(g_len)]
        best = NEG_INF
        for c in range(n_chains):
            off = chain_off[c]
            length = chain_len[c]
            entry = slots_prev[chain_entry[c]]
            active = bool(entry)
            if not active:
                for i in range(length):
                    if tokens[off + i]:
                        active = True
                        break
            if not active:
                continue
            is_word = chain_word[c] >= 0
            for i in range(length):
                g = off + i
                dest = new_tokens[g]
                for tok in tokens[g]:
                    score = tok[0] + self_lp[g]
                    if score > NEG_INF:
                        _push(dest, score, tok[1], tok[2], tok[3], width)
                if i > 0:
                    for tok in tokens[g - 1]:
                        score = tok[0] + adv_lp[g - 1]
                        if score > NEG_INF:
                            _push(dest, score, tok[1], tok[2], tok[3], width)
                else:
                    for tok in entry:
                        _push(dest, tok[0], tok[1], tok[2],
                              t if is_word else tok[3], width)
                if dest:
                    e = emit[t, g]
                    for i2 in range(len(dest)):
                        s2 = dest[i2][0] + e
                        dest[i2] = (s2, dest[i2][1], dest[i2][2], dest[i2][3])
                        if s2 > best:
                            best = s2
        cutoff = best - beam if best > NEG_INF else NEG_INF
        if cutoff > NEG_INF:
            for g in range(g_len):
                kept = [tok for tok in new_tokens[g]
                        if tok[0] >= cutoff and tok[0] > NEG_INF]
                new_tokens[g] = kept
        else:
            for g in range(g_len):
                new_tokens[g] = [tok for tok in new_tokens[g] if tok[0] > NEG_INF]
        tokens = new_tokens

        slots_cur: list[list] = [[] for _ in range(n_slots)]
        for c in range(n_chains):
            last = chain_off[c] + chain_len[c] - 1
            if not tokens[last]:
                continue
            word = chain_word[c]
            exit_lp = chain_exit_lp[c]
            dest = slots_cur[chain_exit[c]]
            for tok in tokens[last]:
                score = tok[0] + exit_lp
                if score == NEG_INF or (cutoff > NEG_INF and score < cutoff):
                    continue
                if word >= 0:
                    key = (tok[1], word)
                    hist = intern.get(key)
                    if hist is None:
                        hist = len(hist_parent)
                        hist_parent.append(tok[1])
                        hist_word.append(word)
                        intern[key] = hist
                    rec_parent.append(tok[2])
                    rec_word.append(word)
                    rec_start.append(tok[3])
                    rec_end.append(t)
                    _push(dest, score, hist, len(rec_parent) - 1, 0, width)
                else:
                    _push(dest, score, tok[1], tok[2], tok[3], width)
        for b in range(len(byp_src)):
            src = slots_cur[byp_src[b]]
            if not src:
                continue
            dest = slots_cur[byp_dst[b]]
            for tok in list(src):
                _push(dest, tok[0], tok[1], tok[2], tok[3], width)
        slots_prev = slots_cur

    final = [(tok[0], tok[1], tok[2]) for tok in slots_prev[final_slot]
             if tok[0] > NEG_INF]
    return (final, hist_parent, hist_word,
            rec_parent, rec_word, rec_start, rec_end)
