# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lane for the dynamic-programming kernels.

Mirrors kernels._ref operation for operation (same candidate order, same
tie rules); the two lanes must produce identical outputs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double NEG_INF = float("-inf")


def chain_viterbi(double[:, ::1] emit, double[::1] self_lp,
                  double[::1] adv_lp, double exit_lp):
    cdef int t_len = emit.shape[0]
    cdef int g_len = emit.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] delta_arr = np.full(g_len, NEG_INF)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] next_arr = np.full(g_len, NEG_INF)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] from_prev_arr = np.zeros(
        (t_len, g_len), dtype=np.uint8)
    cdef double[::1] delta = delta_arr
    cdef double[::1] nxt = next_arr
    cdef cnp.uint8_t[:, ::1] from_prev = from_prev_arr
    cdef int t, g
    cdef double stay, move

    delta[0] = emit[0, 0]
    for t in range(1, t_len):
        for g in range(g_len):
            stay = delta[g] + self_lp[g]
            if g > 0:
                move = delta[g - 1] + adv_lp[g - 1]
            else:
                move = NEG_INF
            # >= : on ties take the lower-indexed predecessor.
            if move >= stay:
                nxt[g] = move + emit[t, g]
                from_prev[t, g] = 1
            else:
                nxt[g] = stay + emit[t, g]
                from_prev[t, g] = 0
        delta, nxt = nxt, delta

    cdef double score = delta[g_len - 1] + exit_lp
    cdef cnp.ndarray[cnp.int32_t, ndim=1] path = np.empty(t_len, dtype=np.int32)
    cdef int state = g_len - 1
    path[t_len - 1] = state
    for t in range(t_len - 1, 0, -1):
        if from_prev[t, state]:
            state -= 1
        path[t - 1] = state
    return path, float(score)


cdef inline void _push(double[:, ::1] sc, cnp.int64_t[:, ::1] hi,
                       cnp.int32_t[:, ::1] re, cnp.int32_t[:, ::1] ws,
                       cnp.int32_t[::1] cnt, int row, int width,
                       double score, cnp.int64_t hist, int rec, int wstart):
    """Bounded sequence-distinct token insert; mirrors _ref._push."""
    cdef int n = cnt[row]
    cdef int i, worst
    for i in range(n):
        if hi[row, i] == hist:
            if score > sc[row, i]:
                sc[row, i] = score
                re[row, i] = rec
                ws[row, i] = wstart
            return
    if n < width:
        sc[row, n] = score
        hi[row, n] = hist
        re[row, n] = rec
        ws[row, n] = wstart
        cnt[row] = n + 1
        return
    worst = 0
    for i in range(1, n):
        if sc[row, i] < sc[row, worst]:
            worst = i
    if score > sc[row, worst]:
        sc[row, worst] = score
        hi[row, worst] = hist
        re[row, worst] = rec
        ws[row, worst] = wstart


def decode_frames(double[:, ::1] emit, double[::1] self_lp, double[::1] adv_lp,
                  cnp.int32_t[::1] chain_off, cnp.int32_t[::1] chain_len,
                  cnp.int32_t[::1] chain_entry, cnp.int32_t[::1] chain_exit,
                  double[::1] chain_exit_lp, cnp.int32_t[::1] chain_word,
                  cnp.int32_t[::1] byp_src, cnp.int32_t[::1] byp_dst,
                  int n_slots, int start_slot, int final_slot,
                  double beam, int width):
    cdef int t_len = emit.shape[0]
    cdef int g_len = emit.shape[1]
    cdef int n_chains = chain_off.shape[0]
    cdef int n_byp = byp_src.shape[0]

    hist_parent = [-1]
    hist_word = [-1]
    intern = {}
    rec_parent = []
    rec_word = []
    rec_start = []
    rec_end = []

    cdef double[:, ::1] prev_sc = np.full((g_len, width), NEG_INF)
    cdef cnp.int64_t[:, ::1] prev_hi = np.zeros((g_len, width), dtype=np.int64)
    cdef cnp.int32_t[:, ::1] prev_re = np.zeros((g_len, width), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] prev_ws = np.zeros((g_len, width), dtype=np.int32)
    cdef cnp.int32_t[::1] prev_cnt = np.zeros(g_len, dtype=np.int32)
    cdef double[:, ::1] cur_sc = np.full((g_len, width), NEG_INF)
    cdef cnp.int64_t[:, ::1] cur_hi = np.zeros((g_len, width), dtype=np.int64)
    cdef cnp.int32_t[:, ::1] cur_re = np.zeros((g_len, width), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] cur_ws = np.zeros((g_len, width), dtype=np.int32)
    cdef cnp.int32_t[::1] cur_cnt = np.zeros(g_len, dtype=np.int32)

    cdef double[:, ::1] slot_sc = np.full((n_slots, width), NEG_INF)
    cdef cnp.int64_t[:, ::1] slot_hi = np.zeros((n_slots, width), dtype=np.int64)
    cdef cnp.int32_t[:, ::1] slot_re = np.zeros((n_slots, width), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] slot_ws = np.zeros((n_slots, width), dtype=np.int32)
    cdef cnp.int32_t[::1] slot_cnt = np.zeros(n_slots, dtype=np.int32)

    cdef int t, c, i, g, j, k, off, length, entry, last, m
    cdef int word, rec_id
    cdef cnp.int64_t hist
    cdef double score, e, best, cutoff, exit_lp
    cdef bint active, is_word

    # Seed the start slot, then run the bypass pass once.
    slot_sc[start_slot, 0] = 0.0
    slot_hi[start_slot, 0] = 0
    slot_re[start_slot, 0] = -1
    slot_ws[start_slot, 0] = 0
    slot_cnt[start_slot] = 1
    for k in range(n_byp):
        j = byp_src[k]
        for m in range(slot_cnt[j]):
            _push(slot_sc, slot_hi, slot_re, slot_ws, slot_cnt, byp_dst[k],
                  width, slot_sc[j, m], slot_hi[j, m], slot_re[j, m],
                  slot_ws[j, m])

    for t in range(t_len):
        for g in range(g_len):
            cur_cnt[g] = 0
        best = NEG_INF
        for c in range(n_chains):
            off = chain_off[c]
            length = chain_len[c]
            entry = chain_entry[c]
            active = slot_cnt[entry] > 0
            if not active:
                for i in range(length):
                    if prev_cnt[off + i] > 0:
                        active = True
                        break
            if not active:
                continue
            is_word = chain_word[c] >= 0
            for i in range(length):
                g = off + i
                for m in range(prev_cnt[g]):
                    score = prev_sc[g, m] + self_lp[g]
                    if score > NEG_INF:
                        _push(cur_sc, cur_hi, cur_re, cur_ws, cur_cnt, g,
                              width, score, prev_hi[g, m], prev_re[g, m],
                              prev_ws[g, m])
                if i > 0:
                    for m in range(prev_cnt[g - 1]):
                        score = prev_sc[g - 1, m] + adv_lp[g - 1]
                        if score > NEG_INF:
                            _push(cur_sc, cur_hi, cur_re, cur_ws, cur_cnt, g,
                                  width, score, prev_hi[g - 1, m],
                                  prev_re[g - 1, m], prev_ws[g - 1, m])
                else:
                    for m in range(slot_cnt[entry]):
                        _push(cur_sc, cur_hi, cur_re, cur_ws, cur_cnt, g,
                              width, slot_sc[entry, m], slot_hi[entry, m],
                              slot_re[entry, m],
                              t if is_word else slot_ws[entry, m])
                if cur_cnt[g] > 0:
                    e = emit[t, g]
                    for m in range(cur_cnt[g]):
                        cur_sc[g, m] = cur_sc[g, m] + e
                        if cur_sc[g, m] > best:
                            best = cur_sc[g, m]
        if best > NEG_INF:
            cutoff = best - beam
        else:
            cutoff = NEG_INF
        # Prune and compact, preserving storage order.
        for g in range(g_len):
            k = 0
            for m in range(cur_cnt[g]):
                if cur_sc[g, m] > NEG_INF and \
                        (cutoff == NEG_INF or cur_sc[g, m] >= cutoff):
                    if k != m:
                        cur_sc[g, k] = cur_sc[g, m]
                        cur_hi[g, k] = cur_hi[g, m]
                        cur_re[g, k] = cur_re[g, m]
                        cur_ws[g, k] = cur_ws[g, m]
                    k += 1
            cur_cnt[g] = k

        prev_sc, cur_sc = cur_sc, prev_sc
        prev_hi, cur_hi = cur_hi, prev_hi
        prev_re, cur_re = cur_re, prev_re
        prev_ws, cur_ws = cur_ws, prev_ws
        prev_cnt, cur_cnt = cur_cnt, prev_cnt

        for j in range(n_slots):
            slot_cnt[j] = 0
        for c in range(n_chains):
            last = chain_off[c] + chain_len[c] - 1
            if prev_cnt[last] == 0:
                continue
            word = chain_word[c]
            exit_lp = chain_exit_lp[c]
            j = chain_exit[c]
            for m in range(prev_cnt[last]):
                score = prev_sc[last, m] + exit_lp
                if score == NEG_INF or (cutoff > NEG_INF and score < cutoff):
                    continue
                if word >= 0:
                    key = (int(prev_hi[last, m]), word)
                    cached = intern.get(key)
                    if cached is None:
                        cached = len(hist_parent)
                        hist_parent.append(int(prev_hi[last, m]))
                        hist_word.append(word)
                        intern[key] = cached
                    hist = <cnp.int64_t> cached
                    rec_parent.append(int(prev_re[last, m]))
                    rec_word.append(word)
                    rec_start.append(int(prev_ws[last, m]))
                    rec_end.append(t)
                    rec_id = len(rec_parent) - 1
                    _push(slot_sc, slot_hi, slot_re, slot_ws, slot_cnt, j,
                          width, score, hist, rec_id, 0)
                else:
                    _push(slot_sc, slot_hi, slot_re, slot_ws, slot_cnt, j,
                          width, score, prev_hi[last, m], prev_re[last, m],
                          prev_ws[last, m])
        for k in range(n_byp):
            j = byp_src[k]
            if slot_cnt[j] == 0:
                continue
            m = slot_cnt[j]
            for i in range(m):
                _push(slot_sc, slot_hi, slot_re, slot_ws, slot_cnt, byp_dst[k],
                      width, slot_sc[j, i], slot_hi[j, i], slot_re[j, i],
                      slot_ws[j, i])

    final = []
    for m in range(slot_cnt[final_slot]):
        if slot_sc[final_slot, m] > NEG_INF:
            final.append((float(slot_sc[final_slot, m]),
                          int(slot_hi[final_slot, m]),
                          int(slot_re[final_slot, m])))
    return (final, hist_parent, hist_word,
            rec_parent, rec_word, rec_start, rec_end)
