"""End-to-end corpus preparation: encode, BPE, and combine streams.

``run_pipeline`` reads tokenized input corpora, converts every token to
its code (phonetic, table, or cluster), learns BPE models on the training
split only, applies them to every split, and emits either a single
concatenated stream (words + separator + codes) or paired multi-source
files, together with models, vocabulary reports, and a manifest carrying
every seed, parameter, and output checksum. Reruns with the same config
are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import logging
import shutil
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import __version__
from .clustering import (
    ClusterModel,
    derive_size_distribution,
    encode_with_clusters,
    random_cluster,
    random_cluster_uniform,
    save_cluster_model,
)
from .encoders import (
    CodeTable,
    bundled_table_path,
    load_code_table,
    metaphone_encode,
    nysiis_encode,
    soundex_encode,
    table_encode,
)
from .errors import NonAlphabeticToken, PipelineStageError, SeparatorCollision
from .evaluate import vocab_stats
from .subword import bpe_apply, bpe_learn, save_bpe_model

__all__ = [
    "PipelineConfig",
    "EncodedCorpus",
    "WORD_ENCODERS",
    "TABLE_ENCODERS",
    "make_token_encoder",
    "encode_corpus",
    "combine",
    "run_pipeline",
]

log = logging.getLogger(__name__)

WORD_ENCODERS: dict[str, Callable[[str], str]] = {
    "soundex": soundex_encode,
    "nysiis": nysiis_encode,
    "metaphone": metaphone_encode,
}
TABLE_ENCODERS = ("pinyin", "wubi")
CLUSTER_ENCODERS = ("cluster", "cluster_uniform")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one run needs; serializes to/from a flat JSON document."""

    train_path: str
    output_dir: str
    encoder: str = "metaphone"
    combine_mode: str = "concat"  # codes_only | concat | multi_source
    separator: str = "<sep>"
    seed: int = 0
    bpe_operations_words: int = 0
    bpe_operations_codes: int = 0
    dev_path: str | None = None
    test_path: str | None = None
    table_path: str | None = None  # pinyin/wubi table override
    granularity: str = "per_character"  # table encoders only
    cluster_baseline: str = "metaphone"  # size-distribution source
    cluster_fraction: float | None = None  # uniform clustering instead

    def __post_init__(self):
        known = tuple(WORD_ENCODERS) + TABLE_ENCODERS + CLUSTER_ENCODERS
        if self.encoder not in known:
            raise ValueError(f"unknown encoder {self.encoder!r}; pick one of {known}")
        if self.combine_mode not in ("codes_only", "concat", "multi_source"):
            raise ValueError(f"unknown combine mode {self.combine_mode!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        return cls(**data)


@dataclass
class EncodedCorpus:
    """Aligned word and code streams (equal sentence counts)."""

    word_lines: list[str]
    code_lines: list[str]
    token_parity: bool  # per-line token counts equal across streams
    passthrough_tokens: int = 0

    def __post_init__(self):
        if len(self.word_lines) != len(self.code_lines):
            raise ValueError("streams must have equal sentence counts")


class _TokenEncoder:
    """Token -> list-of-codes adapter around the configured encoder.

    ``fn`` returns (codes, passthrough) where the flag marks tokens the
    codec rejected and passed through as-is.
    """

    def __init__(self, name: str, fn: Callable[[str], tuple[list[str], bool]],
                 word_level: bool, cluster_model: ClusterModel | None = None):
        self.name = name
        self.fn = fn
        self.word_level = word_level
        self.cluster_model = cluster_model

    def __call__(self, token: str) -> list[str]:
        return self.fn(token)[0]


def make_token_encoder(
    name: str,
    table: CodeTable | None = None,
    granularity: str = "per_character",
    cluster_model: ClusterModel | None = None,
) -> _TokenEncoder:
    """Build the token encoder named in a pipeline config."""
    if name in WORD_ENCODERS:
        codec = WORD_ENCODERS[name]

        def encode_word(tok: str) -> tuple[list[str], bool]:
            try:
                return [codec(tok)], False
            except NonAlphabeticToken:
                return [tok], True

        return _TokenEncoder(name, encode_word, word_level=True)
    if name in TABLE_ENCODERS:
        if table is None:
            table = load_code_table(bundled_table_path(name), name)
        return _TokenEncoder(
            name,
            lambda tok: (table_encode(tok, table, granularity), False),
            word_level=False,
        )
    if name in CLUSTER_ENCODERS:
        if cluster_model is None:
            raise ValueError("cluster encoder needs a ClusterModel")
        return _TokenEncoder(
            name,
            lambda tok: (encode_with_clusters([tok], cluster_model), False),
            word_level=True,
            cluster_model=cluster_model,
        )
    raise ValueError(f"unknown encoder {name!r}")


def encode_corpus(corpus: Iterable[str], encoder: _TokenEncoder) -> EncodedCorpus:
    """Token-aligned code stream for a sentence stream.

    Tokens the codec rejects pass through unchanged (counted); per-character
    encoders may expand the token count, relaxing alignment to the
    sentence level.
    """
    word_lines: list[str] = []
    code_lines: list[str] = []
    passthrough = 0
    parity = True
    for line in corpus:
        tokens = line.split()
        codes: list[str] = []
        for tok in tokens:
            out, passed = encoder.fn(tok)
            if passed:
                passthrough += 1
            codes.extend(out)
        if len(codes) != len(tokens):
            parity = False
        word_lines.append(" ".join(tokens))
        code_lines.append(" ".join(codes))
    return EncodedCorpus(
        word_lines=word_lines,
        code_lines=code_lines,
        token_parity=parity,
        passthrough_tokens=passthrough,
    )


def _check_separator(lines: Sequence[str], separator: str, stream: str) -> None:
    for i, line in enumerate(lines, start=1):
        if separator in line.split():
            raise SeparatorCollision(
                f"separator {separator!r} occurs in {stream} line {i}"
            )


def combine(
    encoded: EncodedCorpus,
    mode: str,
    separator: str,
    out_dir: str | Path,
    prefix: str = "corpus",
) -> list[Path]:
    """Write the combined input files; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if mode == "codes_only":
        path = out_dir / f"{prefix}.input-codes"
        _write_lines(path, encoded.code_lines)
        return [path]
    if mode == "concat":
        _check_separator(encoded.word_lines, separator, "word stream")
        _check_separator(encoded.code_lines, separator, "code stream")
        lines = [
            f"{w} {separator} {c}".strip()
            for w, c in zip(encoded.word_lines, encoded.code_lines)
        ]
        path = out_dir / f"{prefix}.concat"
        _write_lines(path, lines)
        return [path]
    if mode == "multi_source":
        words = out_dir / f"{prefix}.src-words"
        codes = out_dir / f"{prefix}.src-codes"
        _write_lines(words, encoded.word_lines)
        _write_lines(codes, encoded.code_lines)
        return [words, codes]
    raise ValueError(f"unknown combine mode {mode!r}")


def _write_lines(path: Path, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


def _read_lines(path: str | Path) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_pipeline(config: PipelineConfig) -> Path:
    """Execute encode -> BPE -> combine and write the artifact directory."""
    out = Path(config.output_dir)
    for sub in ("inputs", "models", "streams", "reports"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    splits: dict[str, list[str]] = {}
    try:
        splits["train"] = _read_lines(config.train_path)
        if config.dev_path:
            splits["dev"] = _read_lines(config.dev_path)
        if config.test_path:
            splits["test"] = _read_lines(config.test_path)
    except OSError as exc:
        raise PipelineStageError("read-inputs", str(exc)) from exc
    for name in splits:
        src = {"train": config.train_path, "dev": config.dev_path,
               "test": config.test_path}[name]
        shutil.copyfile(src, out / "inputs" / f"{name}.txt")

    # models are learned on the training split only
    cluster_model = None
    try:
        if config.encoder in CLUSTER_ENCODERS:
            units = sorted({tok for line in splits["train"] for tok in line.split()})
            if config.encoder == "cluster_uniform":
                if config.cluster_fraction is None:
                    raise ValueError("cluster_uniform needs cluster_fraction")
                cluster_model = random_cluster_uniform(
                    units, config.cluster_fraction, config.seed
                )
            else:
                baseline = WORD_ENCODERS[config.cluster_baseline]
                dist = derive_size_distribution(units, baseline)
                cluster_model = random_cluster(units, dist, config.seed)
            save_cluster_model(cluster_model, out / "models" / "clusters.tsv")
        table = None
        if config.encoder in TABLE_ENCODERS and config.table_path:
            table = load_code_table(config.table_path, config.encoder)
        encoder = make_token_encoder(
            config.encoder,
            table=table,
            granularity=config.granularity,
            cluster_model=cluster_model,
        )
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError("build-encoder", str(exc)) from exc

    encoded: dict[str, EncodedCorpus] = {}
    try:
        for name, lines in splits.items():
            encoded[name] = encode_corpus(lines, encoder)
    except Exception as exc:
        raise PipelineStageError("encode", str(exc)) from exc

    try:
        word_bpe = bpe_learn(encoded["train"].word_lines, config.bpe_operations_words)
        code_bpe = bpe_learn(encoded["train"].code_lines, config.bpe_operations_codes)
        save_bpe_model(word_bpe, out / "models" / "words.bpe")
        save_bpe_model(code_bpe, out / "models" / "codes.bpe")
    except Exception as exc:
        raise PipelineStageError("bpe-learn", str(exc)) from exc

    written: list[Path] = [
        out / "models" / "words.bpe",
        out / "models" / "codes.bpe",
    ]
    if cluster_model is not None:
        written.append(out / "models" / "clusters.tsv")

    try:
        word_cache: dict = {}
        code_cache: dict = {}
        for name, enc in encoded.items():
            words_path = out / "streams" / f"{name}.words"
            codes_path = out / "streams" / f"{name}.codes"
            _write_lines(words_path, enc.word_lines)
            _write_lines(codes_path, enc.code_lines)
            written += [words_path, codes_path]

            bpe_words = [
                " ".join(bpe_apply(line.split(), word_bpe, _cache=word_cache))
                for line in enc.word_lines
            ]
            bpe_codes = [
                " ".join(bpe_apply(line.split(), code_bpe, _cache=code_cache))
                for line in enc.code_lines
            ]
            processed = EncodedCorpus(
                word_lines=bpe_words,
                code_lines=bpe_codes,
                token_parity=False,
                passthrough_tokens=enc.passthrough_tokens,
            )
            written += combine(
                processed, config.combine_mode, config.separator,
                out / "streams", prefix=name,
            )
    except PipelineStageError:
        raise
    except SeparatorCollision as exc:
        raise PipelineStageError("combine", str(exc)) from exc
    except Exception as exc:
        raise PipelineStageError("bpe-apply", str(exc)) from exc

    try:
        train = encoded["train"]
        report = vocab_stats({
            "words": train.word_lines,
            "codes": train.code_lines,
            "combined": train.word_lines + train.code_lines,
        })
        vocab_path = out / "reports" / "vocab.json"
        vocab_payload = {
            "schema": "phonoprep/vocab-report/1",
            "streams": {k: {"unique": u, "total": t}
                        for k, (u, t) in sorted(report.streams.items())},
        }
        vocab_path.write_text(
            json.dumps(vocab_payload, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        written.append(vocab_path)
    except Exception as exc:
        raise PipelineStageError("reports", str(exc)) from exc

    manifest = {
        "schema": "phonoprep/manifest/1",
        "tool_version": __version__,
        "config": config.to_dict(),
        "token_parity": {name: enc.token_parity for name, enc in encoded.items()},
        "passthrough_tokens": {
            name: enc.passthrough_tokens for name, enc in encoded.items()
        },
        "files": {
            str(p.relative_to(out)): _sha256(p)
            for p in sorted(written + [out / "inputs" / f"{n}.txt" for n in splits])
        },
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return out
