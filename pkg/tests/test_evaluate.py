"""BLEU scorer and vocabulary statistics tests."""

from __future__ import annotations

import math
import random

import pytest

from phonoprep.encoders import soundex_encode
from phonoprep.errors import LineCountMismatch
from phonoprep.evaluate import bleu, vocab_stats

CORPUS = [
    "the cat sat on the mat today",
    "a quick brown fox jumps over the lazy dog",
    "machines translate sentences into other languages",
]


class TestBleu:
    def test_identity_is_100(self):
        report = bleu(CORPUS, CORPUS)
        assert report.bleu == pytest.approx(100.0)
        assert report.brevity_penalty == pytest.approx(1.0)

    def test_zero_overlap_is_0(self):
        hyp = ["w x y z w x y z"]
        ref = ["a b c d e f g h"]
        assert bleu(hyp, ref).bleu == 0.0

    def test_clipped_unigram_precision(self):
        report = bleu(["the the the the"], ["the cat"])
        assert report.precisions[0] == pytest.approx(1 / 4)
        assert report.bleu == 0.0  # no bigram overlap, smoothing off

    def test_hand_computed_score(self):
        # hyp/ref differ in one word; clipped counts done by hand:
        # p1=5/6, p2=3/5, p3=2/4, p4=1/3, BP=1
        report = bleu(["a b c d e f"], ["a b c d x f"])
        assert report.precisions == pytest.approx((5 / 6, 3 / 5, 2 / 4, 1 / 3))
        want = math.exp(sum(math.log(p) for p in (5 / 6, 3 / 5, 2 / 4, 1 / 3)) / 4) * 100
        assert report.bleu == pytest.approx(want, abs=0.01)

    def test_brevity_penalty(self):
        hyp = ["a b c d e"]
        ref = ["a b c d e f g h i j"]
        report = bleu(hyp, ref)
        assert report.brevity_penalty == pytest.approx(math.exp(1 - 10 / 5))

    def test_no_penalty_for_long_hypotheses(self):
        hyp = ["a b c d e f g h i j"]
        ref = ["a b c d e"]
        assert bleu(hyp, ref).brevity_penalty == 1.0

    def test_pair_permutation_invariance(self):
        hyps = ["a b c d", "e f g h", "i j k l m"]
        refs = ["a b c x", "e f y h", "i j k l z"]
        base = bleu(hyps, refs)
        rng = random.Random(4)
        order = list(range(3))
        rng.shuffle(order)
        shuffled = bleu([hyps[i] for i in order], [refs[i] for i in order])
        assert shuffled.bleu == pytest.approx(base.bleu)

    def test_self_concatenation_invariance(self):
        hyps = ["a b c d e f", "g h i j k"]
        refs = ["a b c d x f", "g h i q k"]
        once = bleu(hyps, refs)
        twice = bleu(hyps * 2, refs * 2)
        assert twice.bleu == pytest.approx(once.bleu)

    def test_line_count_mismatch(self):
        with pytest.raises(LineCountMismatch):
            bleu(["a"], ["a", "b"])

    def test_multi_reference_clipping(self):
        hyp = ["the cat the cat sat down here"]
        refs = [["the cat sat down here now ok", "the cat the dog sat up here"]]
        report = bleu(hyp, refs)
        # max ref counts: the=2 (second ref), cat=1; hand-clipped matches:
        # the(2)+cat(1)+sat(1)+down(1)+here(1) = 6 of 7 hypothesis tokens
        assert report.precisions[0] == pytest.approx(6 / 7)

    def test_smoothing_flag_rescues_tiny_corpora(self):
        report = bleu(["a b"], ["a b"], smooth=True)
        assert report.bleu > 0.0

    def test_range(self):
        report = bleu(["a b c d e"], ["a b x d e"])
        assert 0.0 <= report.bleu <= 100.0

    def test_format_line_convention(self):
        line = bleu(CORPUS, CORPUS).format_line()
        assert line.startswith("BLEU = 100.00, 100.0/100.0/100.0/100.0 (BP=1.000")
        assert "hyp_len=" in line and "ref_len=" in line


class TestVocabStats:
    def test_basic_counts(self):
        report = vocab_stats(["a b a"])
        assert report.unique() == 2
        assert report.total() == 3

    def test_empty_corpus(self):
        report = vocab_stats([])
        assert report.streams["corpus"] == (0, 0)

    def test_named_streams(self):
        report = vocab_stats({"words": ["a b c"], "codes": ["X X Y"]})
        assert report.streams["words"] == (3, 3)
        assert report.streams["codes"] == (2, 3)

    def test_encoded_stream_compresses_vocabulary(self):
        words = CORPUS
        codes = [" ".join(soundex_encode(w) for w in line.split()) for line in words]
        report = vocab_stats({"words": words, "codes": codes})
        assert report.unique("codes") <= report.unique("words")
        assert report.total("codes") == report.total("words")
