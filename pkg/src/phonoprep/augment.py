"""Robustness data generation: similarity noise and edit perturbations.

``noise_augment`` substitutes a fixed fraction of words per sentence with
embedding-space neighbors (sampled proportionally to positive cosine
similarity). ``perturb_edit`` applies a fixed number of word-level edit
operations. Both are deterministic per seed, with independent per-sentence
substreams so corpora can be processed in parallel.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyEmbedding
from .geometry import EmbeddingTable

__all__ = [
    "NoiseSpec",
    "PerturbationSpec",
    "noise_augment",
    "perturb_edit",
    "perturb_corpus",
    "edit_distance",
]

log = logging.getLogger(__name__)

EDIT_OPS = ("deletion", "substitution", "insertion")


@dataclass(frozen=True)
class NoiseSpec:
    """Similarity-noise parameters: replace ``fraction`` of words per sentence."""

    fraction: float = 0.2
    top_n: int = 10
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("fraction must be in (0, 1]")
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")


@dataclass(frozen=True)
class PerturbationSpec:
    """Edit-perturbation parameters: exactly ``k`` operations per sentence."""

    k: int
    seed: int = 0
    op_weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if len(self.op_weights) != 3 or any(w < 0 for w in self.op_weights):
            raise ValueError("op_weights must be three non-negative weights")
        total = sum(self.op_weights)
        if total <= 0:
            raise ValueError("op_weights must not all be zero")
        object.__setattr__(
            self, "op_weights", tuple(w / total for w in self.op_weights)
        )


class _NeighborSampler:
    """Cosine-nearest-neighbor candidates over an embedding vocabulary."""

    def __init__(self, table: EmbeddingTable, top_n: int):
        if not table.vectors:
            raise EmptyEmbedding("embedding table has no vectors")
        self.units, matrix = table.matrix()
        norms = np.linalg.norm(matrix, axis=1)
        norms[norms == 0] = 1.0
        self.normed = matrix / norms[:, None]
        self.index = {u: i for i, u in enumerate(self.units)}
        self.top_n = top_n
        self._cache: dict[str, tuple[list[str], np.ndarray]] = {}

    def candidates(self, word: str) -> tuple[list[str], np.ndarray] | None:
        """Top-n neighbors of ``word`` (excluding itself) with sampling weights."""
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        wi = self.index.get(word)
        if wi is None or len(self.units) < 2:
            return None
        sims = self.normed @ self.normed[wi]
        sims[wi] = -np.inf
        n = min(self.top_n, len(self.units) - 1)
        top = np.argpartition(sims, -n)[-n:]
        top = top[np.argsort(sims[top])[::-1]]
        weights = np.maximum(sims[top], 0.0)
        if weights.sum() <= 0:
            result = None
        else:
            result = ([self.units[i] for i in top], weights / weights.sum())
        self._cache[word] = result
        return result


def _replacement_count(fraction: float, length: int) -> int:
    # round to nearest keeps the corpus-level replacement rate at ``fraction``
    # (a ceiling would bias short sentences upward)
    return int(np.floor(fraction * length + 0.5))


def noise_augment(
    corpus: Iterable[str],
    table: EmbeddingTable,
    spec: NoiseSpec,
    stats_out: dict | None = None,
) -> list[str]:
    """Substitute sampled words with embedding neighbors, sentence by sentence.

    Words without vectors (or without positively-similar neighbors) stay
    unchanged. Sentence count and per-sentence length are preserved.
    """
    sampler = _NeighborSampler(table, spec.top_n)
    out: list[str] = []
    total_tokens = 0
    covered_tokens = 0
    replaced = 0
    for sent_index, line in enumerate(corpus):
        tokens = line.split()
        total_tokens += len(tokens)
        covered_tokens += sum(1 for t in tokens if t in sampler.index)
        if not tokens:
            out.append(line)
            continue
        rng = np.random.default_rng([spec.seed, sent_index])
        count = _replacement_count(spec.fraction, len(tokens))
        if count > 0:
            positions = rng.choice(len(tokens), size=count, replace=False)
            for pos in sorted(positions):
                cand = sampler.candidates(tokens[pos])
                if cand is None:
                    continue
                words, weights = cand
                tokens[pos] = words[rng.choice(len(words), p=weights)]
                replaced += 1
        out.append(" ".join(tokens))

    coverage = covered_tokens / total_tokens if total_tokens else 0.0
    if coverage < 0.9:
        log.warning("embedding covers only %.1f%% of corpus tokens", 100 * coverage)
    if stats_out is not None:
        stats_out.update(
            total_tokens=total_tokens,
            replaced_tokens=replaced,
            replacement_rate=replaced / total_tokens if total_tokens else 0.0,
            embedding_coverage=coverage,
        )
    return out


def perturb_edit(
    sentence: Sequence[str],
    vocab: Sequence[str],
    spec: PerturbationSpec,
    rng: np.random.Generator | None = None,
) -> list[str]:
    """Apply exactly ``k`` uniform edit operations to a token list.

    Deletions and substitutions on an emptied sentence fall back to
    insertions so all ``k`` operations are always performed.
    """
    if not vocab:
        raise ValueError("vocab must be non-empty")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    tokens = list(sentence)
    exhausted = not tokens
    for _ in range(spec.k):
        op = EDIT_OPS[rng.choice(3, p=spec.op_weights)]
        if exhausted:
            op = "insertion"
        if op == "deletion":
            del tokens[rng.integers(len(tokens))]
        elif op == "substitution":
            tokens[rng.integers(len(tokens))] = vocab[rng.integers(len(vocab))]
        else:
            tokens.insert(rng.integers(len(tokens) + 1), vocab[rng.integers(len(vocab))])
        if not tokens:
            exhausted = True
    return tokens


def perturb_corpus(
    corpus: Iterable[str],
    vocab: Sequence[str],
    spec: PerturbationSpec,
) -> list[str]:
    """Perturb every sentence with an index-derived substream of the seed."""
    out = []
    for sent_index, line in enumerate(corpus):
        rng = np.random.default_rng([spec.seed, sent_index])
        out.append(" ".join(perturb_edit(line.split(), vocab, spec, rng=rng)))
    return out


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Word-level Levenshtein distance with unit costs."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i]
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            current.append(min(
                previous[j] + 1,       # deletion
                current[j - 1] + 1,    # insertion
                previous[j - 1] + cost,  # substitution / match
            ))
        previous = current
    return previous[-1]
