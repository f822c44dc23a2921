"""phonoprep: corpus encodings and dispersion analysis for translation data.

The package turns tokenized text into auxiliary code streams (phonetic
codes, Pinyin/Wubi lookups, seeded random clusters), learns and applies
BPE subword segmentation, generates noise-augmented and edit-perturbed
corpora, scores BLEU, and measures how widely the members of each code
group spread in an embedding space (convex hulls, coverage curves,
concentration factor, nearest-neighbor density).
"""

from __future__ import annotations

__version__ = "0.1.0"

from .encoders import (
    CodeTable,
    bundled_table_path,
    load_code_table,
    metaphone_encode,
    nysiis_encode,
    soundex_encode,
    table_encode,
)

__all__ = [
    "__version__",
    "CodeTable",
    "bundled_table_path",
    "load_code_table",
    "metaphone_encode",
    "nysiis_encode",
    "soundex_encode",
    "table_encode",
]
