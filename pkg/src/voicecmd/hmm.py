"""Discrete multi-stream phoneme HMMs: evaluation, alignment, re-estimation.

Each phoneme is a 3-state model with only self and left-to-right
transitions (exit from the last state only). Emissions are discrete
distributions over codeword indices, one per feature stream; a frame's
log emission is the sum of the three stream log-probabilities (equal
stream weights). All arithmetic is in the natural-log domain, so scores
stay finite (or exactly -inf) for arbitrarily long inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import IllegalPath, TooShort, Unalignable
from .vq import NUM_STREAMS, CodewordSequence

NUM_STATES = 3
NEG_INF = float("-inf")
DEFAULT_EMISSION_FLOOR = 1e-6

# Allowed transitions: self, next, and exit from the last state. Column 3
# of the transition matrix is the exit pseudo-state.
_ALLOWED = np.zeros((NUM_STATES, NUM_STATES + 1), dtype=bool)
for _i in range(NUM_STATES):
    _ALLOWED[_i, _i] = True
_ALLOWED[0, 1] = True
_ALLOWED[1, 2] = True
_ALLOWED[2, 3] = True

ROW_SUM_TOL = 1e-6


@dataclass(eq=False)
class PhonemeModel:
    """3-state left-to-right discrete HMM for one phoneme (or silence)."""

    label: str
    log_trans: np.ndarray                  # [3, 4]; column 3 is exit
    log_emit: tuple                        # per stream, [3, K_s]

    def __post_init__(self):
        self.log_trans = np.asarray(self.log_trans, dtype=np.float64)
        self.log_emit = tuple(np.asarray(e, dtype=np.float64) for e in self.log_emit)
        self.validate()

    def validate(self) -> None:
        if self.log_trans.shape != (NUM_STATES, NUM_STATES + 1):
            raise ValueError("log_trans must have shape [3, 4]")
        if np.any(self.log_trans[~_ALLOWED] > NEG_INF):
            raise ValueError(f"{self.label}: transition outside the "
                             "left-to-right topology")
        row_sums = np.exp(self.log_trans).sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > ROW_SUM_TOL):
            raise ValueError(f"{self.label}: transition rows must sum to 1")
        if len(self.log_emit) != NUM_STREAMS:
            raise ValueError(f"{self.label}: need {NUM_STREAMS} emission streams")
        for s, emit in enumerate(self.log_emit):
            if emit.ndim != 2 or emit.shape[0] != NUM_STATES:
                raise ValueError(f"{self.label}: stream {s} emissions must be "
                                 "[3, K]")
            sums = np.exp(emit).sum(axis=1)
            if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
                raise ValueError(f"{self.label}: emission rows of stream {s} "
                                 "must sum to 1")

    @property
    def codebook_sizes(self) -> tuple[int, ...]:
        return tuple(e.shape[1] for e in self.log_emit)


def init_flat(label: str, ks) -> PhonemeModel:
    """Uniform model: 0.5 self / 0.5 forward, emissions 1/K per stream."""
    log_trans = np.full((NUM_STATES, NUM_STATES + 1), NEG_INF)
    for i in range(NUM_STATES):
        log_trans[i, i] = np.log(0.5)
        log_trans[i, i + 1] = np.log(0.5)
    log_emit = tuple(np.full((NUM_STATES, k), -np.log(k)) for k in ks)
    return PhonemeModel(label=label, log_trans=log_trans, log_emit=log_emit)


class CompositeModel:
    """Ordered chain of phoneme models joined by unit exit->entry links."""

    def __init__(self, models):
        models = list(models)
        if not models:
            raise ValueError("composite model needs at least one phoneme")
        ks = models[0].codebook_sizes
        for m in models[1:]:
            if m.codebook_sizes != ks:
                raise ValueError("all phoneme models must share codebook sizes")
        self.models = models
        self.labels = tuple(m.label for m in models)
        self._flat = None

    @property
    def num_phones(self) -> int:
        return len(self.models)

    @property
    def num_states(self) -> int:
        return NUM_STATES * len(self.models)

    def state_phone(self, g: int) -> tuple[int, int]:
        """Map a global state index to (phone index, state within phone)."""
        return divmod(g, NUM_STATES)

    def flattened(self):
        """Chain arrays for the DP kernels: per-state self/advance
        log-probabilities (advance across a phone boundary is that phone's
        exit probability), the final exit probability, and per-stream
        emission matrices of shape [num_states, K_s]."""
        if self._flat is None:
            g = self.num_states
            self_lp = np.empty(g)
            adv_lp = np.full(g, NEG_INF)
            for p, m in enumerate(self.models):
                base = NUM_STATES * p
                for i in range(NUM_STATES):
                    self_lp[base + i] = m.log_trans[i, i]
                    if i < NUM_STATES - 1:
                        adv_lp[base + i] = m.log_trans[i, i + 1]
                if p < len(self.models) - 1:
                    adv_lp[base + NUM_STATES - 1] = m.log_trans[NUM_STATES - 1,
                                                                NUM_STATES]
            exit_lp = float(self.models[-1].log_trans[NUM_STATES - 1, NUM_STATES])
            emit = tuple(
                np.vstack([m.log_emit[s] for m in self.models])
                for s in range(NUM_STREAMS))
            self._flat = (self_lp, adv_lp, exit_lp, emit)
        return self._flat


def as_composite(model) -> CompositeModel:
    return model if isinstance(model, CompositeModel) else CompositeModel([model])


def emission_matrix(emit_rows, codes: np.ndarray) -> np.ndarray:
    """Per-frame, per-state log emissions summed over streams: [T, G]."""
    total = emit_rows[0][:, codes[:, 0]].T.copy()
    for s in range(1, NUM_STREAMS):
        total += emit_rows[s][:, codes[:, s]].T
    return total


def viterbi_align(model, obs: CodewordSequence) -> tuple[np.ndarray, float]:
    """Best state path for an observation through a phone chain.

    The path starts in the chain's first state, ends in its last, and the
    final exit transition is charged after the last frame. Raises TooShort
    when the observation cannot traverse the chain (3 frames per phone)
    and Unalignable when every legal path has probability zero.
    """
    chain = as_composite(model)
    t_len = len(obs)
    if t_len < chain.num_states:
        raise TooShort(
            f"{t_len} frames cannot traverse {chain.num_phones} phones "
            f"({chain.num_states} states minimum)")
    self_lp, adv_lp, exit_lp, emit_rows = chain.flattened()
    emit = emission_matrix(emit_rows, obs.codes)
    path, score = kernels.chain_viterbi(emit, self_lp, adv_lp, exit_lp)
    if score == NEG_INF or np.isnan(score):
        raise Unalignable("no legal path has nonzero probability")
    return path, score


class AlignmentStats:
    """Transition and emission counts pooled per phoneme label.

    Counts are integers, so merging partial statistics is exact and
    independent of merge order.
    """

    def __init__(self):
        self._by_label: dict[str, tuple] = {}

    def _entry(self, label: str, ks):
        entry = self._by_label.get(label)
        if entry is None:
            entry = (np.zeros((NUM_STATES, NUM_STATES + 1), dtype=np.int64),
                     tuple(np.zeros((NUM_STATES, k), dtype=np.int64) for k in ks))
            self._by_label[label] = entry
        return entry

    @property
    def labels(self):
        return set(self._by_label)

    def trans_counts(self, label: str) -> np.ndarray:
        return self._by_label[label][0]

    def emit_counts(self, label: str, stream: int) -> np.ndarray:
        return self._by_label[label][1][stream]

    def add_transition(self, label: str, ks, i: int, j: int, n: int = 1) -> None:
        if not _ALLOWED[i, j]:
            raise IllegalPath(f"{label}: transition {i}->{j} not allowed")
        self._entry(label, ks)[0][i, j] += n

    def add_emission(self, label: str, ks, state: int, codeword_triple) -> None:
        entry = self._entry(label, ks)
        for s in range(NUM_STREAMS):
            entry[1][s][state, codeword_triple[s]] += 1

    def merge(self, other: "AlignmentStats") -> "AlignmentStats":
        for label, (trans, emits) in other._by_label.items():
            mine = self._entry(label, tuple(e.shape[1] for e in emits))
            mine[0] += trans
            for s in range(NUM_STREAMS):
                mine[1][s] += emits[s]
        return self


def accumulate_counts(model, state_path, obs: CodewordSequence,
                      stats: AlignmentStats | None = None) -> AlignmentStats:
    """Count transitions and emissions along an aligned state path,
    including the per-phone exit transitions."""
    chain = as_composite(model)
    path = np.asarray(state_path, dtype=np.int64)
    if path.size == 0:
        raise IllegalPath("empty state path")
    if path.size != len(obs):
        raise IllegalPath("path length must equal the observation length")
    if path[0] != 0 or path[-1] != chain.num_states - 1:
        raise IllegalPath("path must start in the first state and end in the last")
    steps = np.diff(path)
    if np.any((steps != 0) & (steps != 1)):
        raise IllegalPath("path may only stay or advance one state")

    if stats is None:
        stats = AlignmentStats()
    ks = chain.models[0].codebook_sizes
    codes = obs.codes
    for t in range(path.size):
        p, state = chain.state_phone(int(path[t]))
        stats.add_emission(chain.labels[p], ks, state, codes[t])
        if t > 0:
            q, prev_state = chain.state_phone(int(path[t - 1]))
            if q == p:
                stats.add_transition(chain.labels[p], ks, prev_state, state)
            else:
                # Crossing a phone boundary realizes the left phone's exit.
                stats.add_transition(chain.labels[q], ks, NUM_STATES - 1,
                                     NUM_STATES)
    last_phone, _ = chain.state_phone(int(path[-1]))
    stats.add_transition(chain.labels[last_phone], ks, NUM_STATES - 1, NUM_STATES)
    return stats


def reestimate(model: PhonemeModel, stats: AlignmentStats,
               floor: float = DEFAULT_EMISSION_FLOOR) -> PhonemeModel:
    """Count-ratio update of one phoneme's parameters.

    a_ij = count(i->j) / count(i->any); b_i(k) = count(k at i) / count(at i).
    Emission probabilities are floored and the row renormalized; rows with
    zero occupancy keep the previous parameters.
    """
    if model.label not in stats.labels:
        return model
    trans_counts = stats.trans_counts(model.label)
    log_trans = model.log_trans.copy()
    for i in range(NUM_STATES):
        total = trans_counts[i].sum()
        if total > 0:
            with np.errstate(divide="ignore"):
                log_trans[i] = np.log(trans_counts[i] / total)
    log_emit = []
    for s in range(NUM_STREAMS):
        counts = stats.emit_counts(model.label, s)
        rows = model.log_emit[s].copy()
        for i in range(NUM_STATES):
            total = counts[i].sum()
            if total > 0:
                probs = np.maximum(counts[i] / total, floor)
                with np.errstate(divide="ignore"):
                    rows[i] = np.log(probs / probs.sum())
        log_emit.append(rows)
    return PhonemeModel(label=model.label, log_trans=log_trans,
                        log_emit=tuple(log_emit))


# --- model files ---

def _format_row(row) -> str:
    return " ".join("-inf" if v == NEG_INF else f"{v:.17g}" for v in row)


def save_model(model: PhonemeModel, path) -> None:
    ks = ",".join(str(k) for k in model.codebook_sizes)
    with open(path, "w", encoding="utf-8") as fobj:
        fobj.write(f"PHONEME v1 label={model.label} streams={NUM_STREAMS} "
                   f"K={ks}\n")
        for row in model.log_trans:
            fobj.write(_format_row(row) + "\n")
        for emit in model.log_emit:
            for row in emit:
                fobj.write(_format_row(row) + "\n")


def load_model(path) -> PhonemeModel:
    with open(path, encoding="utf-8") as fobj:
        header = fobj.readline().split()
        if len(header) != 5 or header[0] != "PHONEME" or header[1] != "v1":
            raise ValueError(f"{path}: not a PHONEME v1 file")
        fields = dict(part.split("=", 1) for part in header[2:])
        label = fields["label"]
        ks = tuple(int(k) for k in fields["K"].split(","))
        rows = [[float(tok) for tok in line.split()]
                for line in fobj if line.strip()]
    expected = NUM_STATES * (1 + len(ks))
    if len(rows) != expected:
        raise ValueError(f"{path}: expected {expected} parameter rows")
    log_trans = np.asarray(rows[:NUM_STATES])
    log_emit = []
    at = NUM_STATES
    for k in ks:
        block = np.asarray(rows[at:at + NUM_STATES])
        if block.shape != (NUM_STATES, k):
            raise ValueError(f"{path}: emission block has wrong width")
        log_emit.append(block)
        at += NUM_STATES
    return PhonemeModel(label=label, log_trans=log_trans, log_emit=tuple(log_emit))
