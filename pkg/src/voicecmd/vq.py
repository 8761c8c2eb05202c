"""Vector quantization: LBG binary-splitting k-means codebooks, one per stream."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyInput, MissingCodebook
from .frontend import FeatureStreams

SPLIT_EPSILON = 0.01
LLOYD_REL_TOL = 1e-5
LLOYD_MAX_ITER = 100

NUM_STREAMS = 3


@dataclass(eq=False)
class Codebook:
    stream_id: int
    centroids: np.ndarray
    # Per split stage, the Lloyd distortion trace (mean squared distance).
    training_log: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.centroids = np.asarray(self.centroids, dtype=np.float64)
        if self.centroids.ndim != 2 or self.centroids.shape[0] < 1:
            raise ValueError("centroids must be a nonempty [K, dim] array")
        if not np.all(np.isfinite(self.centroids)):
            raise ValueError("centroids must be finite")
        if self.stream_id not in (0, 1, 2):
            raise ValueError("stream_id must be 0, 1 or 2")

    @property
    def size(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


@dataclass(eq=False)
class CodewordSequence:
    """Frame-wise codeword index triples, one per stream."""

    codes: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int32)
        if codes.ndim != 2 or codes.shape[1] != NUM_STREAMS:
            raise ValueError("codes must have shape [frames, 3]")
        if codes.size and codes.min() < 0:
            raise ValueError("codeword indices must be nonnegative")
        self.codes = codes

    def __len__(self) -> int:
        return self.codes.shape[0]


def _sq_distances(vectors: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ||x||^2 - 2 x.c + ||c||^2, clipped at 0 against rounding.
    d2 = (np.sum(vectors ** 2, axis=1)[:, None]
          - 2.0 * vectors @ centroids.T
          + np.sum(centroids ** 2, axis=1)[None, :])
    return np.maximum(d2, 0.0)


def _repair_empty_cells(vectors, centroids, assign):
    """Move each empty centroid onto the farthest point of the currently
    worst cluster; guarantees progress toward zero distortion."""
    k = centroids.shape[0]
    counts = np.bincount(assign, minlength=k)
    for empty in np.flatnonzero(counts == 0):
        sq = np.sum((vectors - centroids[assign]) ** 2, axis=1)
        sse = np.bincount(assign, weights=sq, minlength=k)
        donor = int(np.argmax(sse))
        if sse[donor] <= 0.0:
            # All points coincide with their centroids; duplicate the donor.
            centroids[empty] = centroids[donor]
            continue
        members = np.flatnonzero(assign == donor)
        far = members[int(np.argmax(sq[members]))]
        centroids[empty] = vectors[far]
        assign[far] = empty
        counts = np.bincount(assign, minlength=k)
    return centroids, assign


def _lloyd(vectors: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, list]:
    history = []
    prev = np.inf
    for _ in range(LLOYD_MAX_ITER):
        assign = np.argmin(_sq_distances(vectors, centroids), axis=1)
        centroids, assign = _repair_empty_cells(vectors, centroids.copy(), assign)
        for j in range(centroids.shape[0]):
            members = vectors[assign == j]
            if members.shape[0]:
                centroids[j] = members.mean(axis=0)
        distortion = float(np.mean(
            np.sum((vectors - centroids[np.argmin(
                _sq_distances(vectors, centroids), axis=1)]) ** 2, axis=1)))
        history.append(distortion)
        if distortion == 0.0:
            break
        if prev < np.inf and (prev - distortion) < LLOYD_REL_TOL * prev:
            break
        prev = distortion
    return centroids, history


def train_codebook(vectors, k: int, seed: int = 0, stream_id: int = 0) -> Codebook:
    """LBG: start from the global mean, binary-split with +/- epsilon
    perturbation until k centroids, running Lloyd iterations after each
    split. Deterministic for a given seed."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] < 1:
        raise EmptyInput("need at least one training vector")
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)

    centroids = vectors.mean(axis=0, keepdims=True)
    log: list[list[float]] = []
    centroids, history = _lloyd(vectors, centroids)
    log.append(history)

    while centroids.shape[0] < k:
        m = centroids.shape[0]
        assign = np.argmin(_sq_distances(vectors, centroids), axis=1)
        sq = np.sum((vectors - centroids[assign]) ** 2, axis=1)
        sse = np.bincount(assign, weights=sq, minlength=m)
        n_split = min(m, k - m)
        order = np.argsort(-sse, kind="stable")[:n_split]
        new = []
        for j in range(m):
            if j in order:
                spread = vectors[assign == j].std(axis=0)
                if not np.any(spread > 0):
                    spread = rng.uniform(0.5, 1.0, size=centroids.shape[1])
                delta = SPLIT_EPSILON * spread
                new.append(centroids[j] + delta)
                new.append(centroids[j] - delta)
            else:
                new.append(centroids[j])
        centroids, history = _lloyd(vectors, np.asarray(new))
        log.append(history)

    return Codebook(stream_id=stream_id, centroids=centroids, training_log=log)


def quantize(vector, codebook: Codebook) -> int:
    """Index of the nearest centroid; ties break toward the lowest index."""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (codebook.dim,):
        raise DimensionMismatch(
            f"vector has shape {vector.shape}, codebook dim is {codebook.dim}")
    return int(np.argmin(_sq_distances(vector[None, :], codebook.centroids)[0]))


def quantize_streams(features: FeatureStreams, codebooks) -> CodewordSequence:
    """Frame-wise independent quantization of all three streams."""
    books = list(codebooks)
    by_stream = {cb.stream_id: cb for cb in books}
    for s in range(NUM_STREAMS):
        if s not in by_stream:
            raise MissingCodebook(f"no codebook for stream {s}")
    n = features.num_frames
    codes = np.zeros((n, NUM_STREAMS), dtype=np.int32)
    for s in range(NUM_STREAMS):
        cb = by_stream[s]
        stream = features.stream(s)
        if stream.shape[1] != cb.dim:
            raise DimensionMismatch(
                f"stream {s} has dim {stream.shape[1]}, codebook dim is {cb.dim}")
        if n:
            codes[:, s] = np.argmin(_sq_distances(stream, cb.centroids), axis=1)
    return CodewordSequence(codes)


# --- file formats ---

def save_codebook(codebook: Codebook, path) -> None:
    with open(path, "w", encoding="utf-8") as fobj:
        fobj.write(f"CODEBOOK v1 stream={codebook.stream_id} "
                   f"K={codebook.size} dim={codebook.dim}\n")
        for row in codebook.centroids:
            fobj.write(" ".join(f"{v:.12g}" for v in row) + "\n")


def load_codebook(path) -> Codebook:
    with open(path, encoding="utf-8") as fobj:
        header = fobj.readline().split()
        if len(header) != 5 or header[0] != "CODEBOOK" or header[1] != "v1":
            raise ValueError(f"{path}: not a CODEBOOK v1 file")
        fields = dict(part.split("=", 1) for part in header[2:])
        stream_id, k, dim = (int(fields["stream"]), int(fields["K"]),
                             int(fields["dim"]))
        rows = [np.array([float(x) for x in line.split()])
                for line in fobj if line.strip()]
    if len(rows) != k or any(r.size != dim for r in rows):
        raise ValueError(f"{path}: expected {k} rows of {dim} values")
    return Codebook(stream_id=stream_id, centroids=np.vstack(rows))


def save_codewords(seq: CodewordSequence, path) -> None:
    with open(path, "w", encoding="utf-8") as fobj:
        fobj.write(f"CODEWORDS v1 streams={NUM_STREAMS}\n")
        for row in seq.codes:
            fobj.write(" ".join(str(int(c)) for c in row) + "\n")


def parse_codewords(text: str) -> CodewordSequence:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("CODEWORDS v1"):
        raise ValueError("not a CODEWORDS v1 payload")
    rows = [[int(tok) for tok in ln.split()] for ln in lines[1:]]
    codes = (np.asarray(rows, dtype=np.int32) if rows
             else np.zeros((0, NUM_STREAMS), dtype=np.int32))
    return CodewordSequence(codes)


def load_codewords(path) -> CodewordSequence:
    with open(path, encoding="utf-8") as fobj:
        return parse_codewords(fobj.read())
