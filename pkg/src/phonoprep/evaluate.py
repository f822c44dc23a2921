"""Corpus-level BLEU scoring and vocabulary statistics.

The scorer reproduces the classic multi-bleu script semantics:
case-sensitive, whitespace-tokenized BLEU-4 with modified (clipped) n-gram
precision and the brevity penalty, reported on the familiar one-line
format. Smoothing is off by default; any zero n-gram precision zeroes the
score.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import LineCountMismatch

__all__ = ["BleuReport", "VocabReport", "bleu", "vocab_stats"]

MAX_ORDER = 4


@dataclass(frozen=True)
class BleuReport:
    bleu: float  # percentage in [0, 100]
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    @property
    def ratio(self) -> float:
        return self.hyp_length / self.ref_length if self.ref_length else 0.0

    def format_line(self) -> str:
        p = "/".join(f"{100 * x:.1f}" for x in self.precisions)
        return (
            f"BLEU = {self.bleu:.2f}, {p} "
            f"(BP={self.brevity_penalty:.3f}, ratio={self.ratio:.3f}, "
            f"hyp_len={self.hyp_length}, ref_len={self.ref_length})"
        )


@dataclass(frozen=True)
class VocabReport:
    """unique/total token counts per named stream."""

    streams: dict[str, tuple[int, int]]

    def unique(self, stream: str = "corpus") -> int:
        return self.streams[stream][0]

    def total(self, stream: str = "corpus") -> int:
        return self.streams[stream][1]


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(
    hypotheses: Sequence[str],
    references: Sequence[str] | Sequence[Sequence[str]],
    smooth: bool = False,
) -> BleuReport:
    """Corpus BLEU-4 of one hypothesis stream against reference stream(s).

    Each reference entry may be a single sentence or a list of alternative
    references; clipping then uses the per-n-gram maximum across them, and
    the closest reference length feeds the brevity penalty. ``smooth``
    add-one-smooths orders 2-4 (useful only for tiny corpora).
    """
    hypotheses = list(hypotheses)
    references = list(references)
    if len(hypotheses) != len(references):
        raise LineCountMismatch(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )

    matches = [0] * MAX_ORDER
    totals = [0] * MAX_ORDER
    hyp_length = 0
    ref_length = 0
    for hyp, refs in zip(hypotheses, references):
        hyp_tokens = hyp.split()
        ref_group = [refs] if isinstance(refs, str) else list(refs)
        ref_token_lists = [r.split() for r in ref_group]

        hyp_length += len(hyp_tokens)
        diffs = sorted(
            (abs(len(r) - len(hyp_tokens)), len(r)) for r in ref_token_lists
        )
        ref_length += diffs[0][1]

        for n in range(1, MAX_ORDER + 1):
            hyp_counts = _ngrams(hyp_tokens, n)
            if not hyp_counts:
                continue
            max_ref: Counter = Counter()
            for ref_tokens in ref_token_lists:
                for gram, count in _ngrams(ref_tokens, n).items():
                    if count > max_ref[gram]:
                        max_ref[gram] = count
            totals[n - 1] += sum(hyp_counts.values())
            matches[n - 1] += sum(
                min(count, max_ref[gram]) for gram, count in hyp_counts.items()
            )

    precisions = []
    for n in range(MAX_ORDER):
        m, t = matches[n], totals[n]
        if smooth and n > 0:
            m, t = m + 1, t + 1
        precisions.append(m / t if t > 0 else 0.0)

    if hyp_length == 0:
        bp = 0.0
    elif hyp_length > ref_length:
        bp = 1.0
    else:
        bp = math.exp(1 - ref_length / hyp_length)

    if min(precisions) > 0:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / MAX_ORDER) * 100
    else:
        score = 0.0

    return BleuReport(
        bleu=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_length=hyp_length,
        ref_length=ref_length,
    )


def vocab_stats(
    corpus: Iterable[str] | Mapping[str, Iterable[str]],
) -> VocabReport:
    """Exact unique/total token counts, per stream when given a mapping."""
    if isinstance(corpus, Mapping):
        named = corpus
    else:
        named = {"corpus": corpus}
    streams = {}
    for name, lines in named.items():
        unique: set[str] = set()
        total = 0
        for line in lines:
            tokens = line.split()
            total += len(tokens)
            unique.update(tokens)
        streams[name] = (len(unique), total)
    return VocabReport(streams=streams)
