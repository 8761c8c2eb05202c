"""Segmental k-means training: bootstrap, segment, count, re-estimate, iterate.

Each iteration Viterbi-segments every utterance against its word model
built from the current phoneme models, pools integer alignment counts per
phoneme across the corpus, and re-estimates all models from the pooled
counts. With codebooks frozen, the total alignment log-likelihood is
non-decreasing across iterations, which is the convergence guarantee.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

from .errors import (MissingPhonemeCoverage, SegmentTooShort, TrainingFailed,
                     UnknownWord, VoiceCmdError)
from .hmm import (NUM_STATES, AlignmentStats, CompositeModel,
                  accumulate_counts, init_flat, reestimate, viterbi_align)
from .lexicon import Lexicon
from .phones import ALL_LABELS, SIL
from .vq import CodewordSequence


@dataclass(eq=False)
class TrainingUtterance:
    word: str
    codes: CodewordSequence
    segments: list | None = None        # (phoneme label, start, end) half-open

    def __post_init__(self):
        if self.segments is not None:
            expected = 0
            for label, start, end in self.segments:
                if start != expected or end <= start:
                    raise VoiceCmdError(
                        f"{self.word}: segments must be contiguous, ordered "
                        f"and non-overlapping (bad span {label} {start}-{end})")
                expected = end
            if expected != len(self.codes):
                raise VoiceCmdError(
                    f"{self.word}: segments must cover all "
                    f"{len(self.codes)} frames")


@dataclass(frozen=True)
class TrainConfig:
    max_iterations: int = 20
    rel_ll_epsilon: float = 1e-4
    emission_floor: float = 1e-6

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.rel_ll_epsilon <= 0:
            raise ValueError("rel_ll_epsilon must be > 0")


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    total_ll: float
    changed_params: int
    aligned: int
    skipped: int

    def log_line(self) -> str:
        return (f"ITER {self.iteration} total_ll={self.total_ll:.6f} "
                f"changed_params={self.changed_params}")


def _forced_segment_path(length: int) -> list:
    """State occupation for a phone segment: three equal contiguous spans,
    remainder frames on the last state."""
    span = length // NUM_STATES
    counts = [span, span, length - 2 * span]
    path = []
    for state, count in enumerate(counts):
        path.extend([state] * count)
    return path


def bootstrap_models(utterances, lexicon: Lexicon, ks,
                     floor: float = 1e-6) -> dict:
    """Initialize one model per inventory label from pre-segmented data.

    Segment frames are split equally across the three states and counted
    as a forced alignment. Labels without any coverage are
    flat-initialized; lexicon phonemes among them trigger a warning.
    """
    stats = AlignmentStats()
    covered = set()
    for utt in utterances:
        if not utt.segments:
            continue
        codes = utt.codes.codes
        for label, start, end in utt.segments:
            length = end - start
            if length < NUM_STATES:
                raise SegmentTooShort(
                    f"{utt.word}: segment {label} {start}-{end} has "
                    f"{length} frames; need at least {NUM_STATES}")
            covered.add(label)
            path = _forced_segment_path(length)
            for offset, state in enumerate(path):
                stats.add_emission(label, ks, state, codes[start + offset])
                if offset > 0:
                    stats.add_transition(label, ks, path[offset - 1], state)
            stats.add_transition(label, ks, NUM_STATES - 1, NUM_STATES)

    missing = (lexicon.phoneme_labels | {SIL}) - covered
    if missing - {SIL}:
        warnings.warn(
            f"no bootstrap segments for: {', '.join(sorted(missing - {SIL}))}; "
            f"flat-initializing", MissingPhonemeCoverage)

    models = {}
    for label in ALL_LABELS:
        flat = init_flat(label, ks)
        models[label] = (reestimate(flat, stats, floor)
                         if label in covered else flat)
    return models


def word_model(word: str, lexicon: Lexicon, models: dict) -> CompositeModel:
    return CompositeModel([models[ph] for ph in lexicon.pronunciation(word)])


def segment_word(model: CompositeModel, obs: CodewordSequence):
    """Viterbi segmentation of a word into its phone spans.

    Returns (boundaries, state_path, log_score) where boundaries are
    (phone label, start, end) half-open frame spans read off the chain
    alignment. Equivalent to level building for a fixed phone order.
    """
    path, score = viterbi_align(model, obs)
    boundaries = []
    start = 0
    for t in range(1, len(path)):
        phone_prev = path[t - 1] // NUM_STATES
        phone_now = path[t] // NUM_STATES
        if phone_now != phone_prev:
            boundaries.append((model.labels[phone_prev], start, t))
            start = t
    boundaries.append((model.labels[path[-1] // NUM_STATES], start, len(path)))
    return boundaries, path, score


def segmental_kmeans_train(corpus, lexicon: Lexicon, models: dict,
                           cfg: TrainConfig = TrainConfig()):
    """Run the training loop to convergence.

    Returns (models, iteration log). Utterances that fail to align are
    skipped with a warning; training aborts if more than half of the
    corpus is skipped in one iteration. Stops when the relative
    improvement of the total alignment log-likelihood falls below
    rel_ll_epsilon, when no parameter changes, or at max_iterations.
    """
    corpus = list(corpus)
    if not corpus:
        raise TrainingFailed("empty training corpus")
    for utt in corpus:
        if utt.word not in lexicon:
            raise UnknownWord(f"{utt.word!r} is not in the lexicon")

    models = dict(models)
    log: list[IterationStats] = []
    prev_ll = None
    for iteration in range(1, cfg.max_iterations + 1):
        chains = {}
        stats = AlignmentStats()
        total_ll = 0.0
        skipped = 0
        for utt in corpus:
            chain = chains.get(utt.word)
            if chain is None:
                chain = word_model(utt.word, lexicon, models)
                chains[utt.word] = chain
            try:
                path, score = viterbi_align(chain, utt.codes)
            except VoiceCmdError as exc:
                warnings.warn(f"skipping {utt.word!r}: {exc}")
                skipped += 1
                continue
            accumulate_counts(chain, path, utt.codes, stats)
            total_ll += score
        if skipped * 2 > len(corpus):
            raise TrainingFailed(
                f"{skipped} of {len(corpus)} utterances failed to align")

        changed = 0
        for label in list(models):
            updated = reestimate(models[label], stats, cfg.emission_floor)
            if updated is not models[label]:
                diff = int((updated.log_trans != models[label].log_trans).sum())
                for s in range(len(updated.log_emit)):
                    diff += int((updated.log_emit[s]
                                 != models[label].log_emit[s]).sum())
                changed += diff
                models[label] = updated

        log.append(IterationStats(iteration=iteration, total_ll=total_ll,
                                  changed_params=changed,
                                  aligned=len(corpus) - skipped,
                                  skipped=skipped))
        if changed == 0:
            break
        if prev_ll is not None and prev_ll != 0:
            if (total_ll - prev_ll) < cfg.rel_ll_epsilon * abs(prev_ll):
                break
        prev_ll = total_ll
    return models, log


# --- corpus manifests ---

@dataclass(frozen=True)
class ManifestEntry:
    """One corpus line: reference words, WAV path, optional segments.

    Multi-word references (evaluation manifests) join words with commas;
    training manifests use a single word. Segments are in frame units of
    the extracted features.
    """

    words: tuple
    wav_path: Path
    segments: tuple | None = None


def parse_manifest(text: str, base_dir) -> list:
    """Parse `<word> <wav-path> [<phone>:<start>-<end> ...]` lines.

    Relative WAV paths resolve against base_dir.
    """
    base = Path(base_dir)
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise VoiceCmdError(
                f"manifest line {lineno}: expected `<word> <wav-path> ...`")
        words = tuple(parts[0].split(","))
        path = Path(parts[1])
        if not path.is_absolute():
            path = base / path
        segments = None
        if len(parts) > 2:
            segments = []
            for token in parts[2:]:
                try:
                    label, span = token.split(":", 1)
                    start, end = span.split("-", 1)
                    segments.append((label, int(start), int(end)))
                except ValueError:
                    raise VoiceCmdError(
                        f"manifest line {lineno}: bad segment {token!r}") from None
            segments = tuple(segments)
        entries.append(ManifestEntry(words=words, wav_path=path,
                                     segments=segments))
    return entries


def format_manifest(entries) -> str:
    lines = []
    for entry in entries:
        parts = [",".join(entry.words), str(entry.wav_path)]
        if entry.segments:
            parts.extend(f"{label}:{start}-{end}"
                         for label, start, end in entry.segments)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def load_manifest(path) -> list:
    path = Path(path)
    with open(path, encoding="utf-8") as fobj:
        return parse_manifest(fobj.read(), path.parent)
