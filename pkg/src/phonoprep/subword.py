"""Byte Pair Encoding over whitespace-tokenized text.

Learning initializes every word as its character sequence terminated by an
end-of-word marker, then greedily merges the most frequent adjacent symbol
pair (ties broken lexicographically, so learning is fully deterministic).
The marker is a boundary symbol: pairs touching it are never merged, which
keeps words separable and makes decoding exact.

Applied output uses a continuation suffix on every non-final piece of a
word (the ``@@`` convention), so ``bpe_decode`` inverts ``bpe_apply``
exactly as long as corpus tokens do not themselves end with the marker.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import DanglingContinuation, EmptyCorpus

__all__ = [
    "BpeModel",
    "bpe_learn",
    "bpe_apply",
    "bpe_decode",
    "save_bpe_model",
    "load_bpe_model",
]

MERGE_FILE_HEADER = "#version: 0.2"


@dataclass(frozen=True)
class BpeModel:
    """Ordered merge operations plus the marker conventions used to apply them."""

    merges: tuple[tuple[str, str], ...]
    num_operations: int
    end_of_word_marker: str = "</w>"
    continuation_marker: str = "@@"
    _ranks: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ranks = {pair: i for i, pair in enumerate(self.merges)}
        if len(ranks) != len(self.merges):
            raise ValueError("duplicate merge pairs")
        if len(self.merges) > self.num_operations:
            raise ValueError("more merges than operations")
        object.__setattr__(self, "_ranks", ranks)


def _iter_tokens(corpus: str | Iterable[str]) -> Iterable[str]:
    if isinstance(corpus, str):
        corpus = [corpus]
    for line in corpus:
        yield from line.split()


def bpe_learn(
    corpus: str | Iterable[str],
    num_operations: int,
    end_of_word_marker: str = "</w>",
    continuation_marker: str = "@@",
) -> BpeModel:
    """Learn up to ``num_operations`` merges from a corpus of sentences.

    Stops early once no adjacent pair occurs more than once.
    """
    if num_operations < 0:
        raise ValueError("num_operations must be >= 0")
    word_freqs = Counter(_iter_tokens(corpus))
    if not word_freqs:
        raise EmptyCorpus("corpus has no tokens")

    # one working sequence per unique word; marker terminates each word
    words = sorted(word_freqs)
    seqs: list[list[str]] = [list(w) + [end_of_word_marker] for w in words]
    freqs = [word_freqs[w] for w in words]

    pair_counts: Counter[tuple[str, str]] = Counter()
    pair_words: dict[tuple[str, str], set[int]] = {}

    def add_pairs(wi: int, sign: int) -> None:
        seq, f = seqs[wi], freqs[wi]
        for a, b in zip(seq, seq[1:]):
            if b == end_of_word_marker:
                continue
            pair = (a, b)
            pair_counts[pair] += sign * f
            if sign > 0:
                pair_words.setdefault(pair, set()).add(wi)

    for wi in range(len(seqs)):
        add_pairs(wi, +1)

    merges: list[tuple[str, str]] = []
    while len(merges) < num_operations:
        best = None
        best_count = 1  # a pair must occur at least twice to be merged
        for pair, count in pair_counts.items():
            if count > best_count or (count == best_count and best is not None and pair < best):
                best, best_count = pair, count
        if best is None:
            break
        merges.append(best)
        joined = best[0] + best[1]
        for wi in sorted(pair_words.get(best, ())):
            seq = seqs[wi]
            if best[0] not in seq:  # stale index from an earlier merge
                continue
            add_pairs(wi, -1)
            merged: list[str] = []
            j = 0
            while j < len(seq):
                if j + 1 < len(seq) and seq[j] == best[0] and seq[j + 1] == best[1]:
                    merged.append(joined)
                    j += 2
                else:
                    merged.append(seq[j])
                    j += 1
            seqs[wi] = merged
            add_pairs(wi, +1)
        pair_counts = +pair_counts  # drop zero/negative remnants

    return BpeModel(
        merges=tuple(merges),
        num_operations=num_operations,
        end_of_word_marker=end_of_word_marker,
        continuation_marker=continuation_marker,
    )


def _segment(word: str, model: BpeModel) -> list[str]:
    symbols = list(word)
    ranks = model._ranks
    while len(symbols) > 1:
        best_rank = None
        best_at = -1
        for j in range(len(symbols) - 1):
            rank = ranks.get((symbols[j], symbols[j + 1]))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank, best_at = rank, j
        if best_rank is None:
            break
        symbols[best_at:best_at + 2] = [symbols[best_at] + symbols[best_at + 1]]
    return symbols


def bpe_apply(sentence: list[str], model: BpeModel, _cache: dict | None = None) -> list[str]:
    """Split each token into learned subword pieces.

    Non-final pieces of a word carry the continuation marker so the output
    is exactly decodable. Pass a dict as ``_cache`` to reuse per-word
    segmentations across calls.
    """
    out: list[str] = []
    cache = _cache if _cache is not None else {}
    for token in sentence:
        pieces = cache.get(token)
        if pieces is None:
            raw = _segment(token, model)
            pieces = [p + model.continuation_marker for p in raw[:-1]] + [raw[-1]]
            cache[token] = pieces
        out.extend(pieces)
    return out


def bpe_decode(pieces: list[str], model: BpeModel) -> list[str]:
    """Rejoin subword pieces into tokens; exact inverse of ``bpe_apply``."""
    marker = model.continuation_marker
    out: list[str] = []
    buf: list[str] = []
    for piece in pieces:
        if piece.endswith(marker) and len(piece) > len(marker):
            buf.append(piece[:-len(marker)])
        else:
            buf.append(piece)
            out.append("".join(buf))
            buf = []
    if buf:
        raise DanglingContinuation(f"stream ends mid-word: {''.join(buf)!r}")
    return out


def save_bpe_model(model: BpeModel, path: str | Path) -> None:
    """Write the merge list in the de-facto merge-file layout."""
    lines = [MERGE_FILE_HEADER]
    lines += [f"{a} {b}" for a, b in model.merges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_bpe_model(
    path: str | Path,
    end_of_word_marker: str = "</w>",
    continuation_marker: str = "@@",
) -> BpeModel:
    merges = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if lineno == 1 and line.startswith("#version"):
            continue
        if not line.strip():
            continue
        parts = line.split(" ")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'left right', got {line!r}")
        merges.append((parts[0], parts[1]))
    return BpeModel(
        merges=tuple(merges),
        num_operations=len(merges),
        end_of_word_marker=end_of_word_marker,
        continuation_marker=continuation_marker,
    )
