"""Command-line interface: every capability as a scriptable subcommand.

Exit codes: 0 success, 1 usage error, 2 data/contract error, 3 internal
error. Randomized subcommands require an explicit ``--seed`` (or
``--seed auto``, which draws one and records it in the output). A flat
JSON ``--config`` file supplies defaults; explicit flags override it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .augment import NoiseSpec, PerturbationSpec, noise_augment, perturb_corpus
from .clustering import (
    derive_size_distribution,
    load_cluster_model,
    random_cluster,
    random_cluster_uniform,
    save_cluster_model,
)
from .encoders import load_code_table, bundled_table_path
from .errors import PhonoprepError
from .evaluate import bleu, vocab_stats
from .geometry import (
    HullParams,
    concentration_factor,
    coverage_curve,
    density_measure,
    group_points,
    load_embeddings,
    pca_project,
    save_embeddings,
    smooth_hull,
    train_embeddings,
    volume_cdf,
)
from .pipeline import (
    PipelineConfig,
    WORD_ENCODERS,
    make_token_encoder,
    run_pipeline,
)
from .subword import bpe_apply, bpe_decode, bpe_learn, load_bpe_model, save_bpe_model

CODEC_CHOICES = tuple(WORD_ENCODERS) + ("pinyin", "wubi", "cluster")


def _parse_seed(value: str) -> int:
    """'auto' draws a fresh seed; anything else must be an integer."""
    if value == "auto":
        return secrets.randbits(63)
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"seed must be an integer or 'auto', got {value!r}"
        ) from None


def _read_lines(path: str) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _write_lines(path: str, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _rows_to_csv(header: list[str], rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _load_groups_file(path: str) -> dict[str, str]:
    mapping = {}
    for line in _read_lines(path):
        if not line or line.startswith("#"):
            continue
        unit, code = line.split("\t")
        mapping[unit] = code
    return mapping


def _load_points_file(path: str) -> dict[str, np.ndarray]:
    table = load_embeddings(path)
    return dict(table.vectors)


def _hull_params(args) -> HullParams | None:
    if args.beta is None and args.radius is None:
        return None
    if args.beta is None or args.radius is None:
        raise PhonoprepError("--beta and --radius must be given together")
    return HullParams(beta=args.beta, radius=args.radius)


def _grouped_points(args) -> list[np.ndarray]:
    projected = _load_points_file(args.points)
    encoding = _load_groups_file(args.groups)
    return group_points(projected, encoding)


# --- subcommand handlers ---

def cmd_encode(args) -> int:
    if args.codec == "cluster":
        if not args.model:
            raise PhonoprepError("--codec cluster requires --model")
        encoder = make_token_encoder(
            "cluster", cluster_model=load_cluster_model(args.model)
        )
    elif args.codec in ("pinyin", "wubi"):
        table_path = args.table or bundled_table_path(args.codec)
        table = load_code_table(table_path, args.codec)
        encoder = make_token_encoder(args.codec, table=table,
                                     granularity=args.granularity)
    else:
        encoder = make_token_encoder(args.codec)
    source = _read_lines(args.input) if args.input else sys.stdin.read().splitlines()
    out_lines = []
    for line in source:
        codes = []
        for tok in line.split():
            codes.extend(encoder(tok))
        out_lines.append(" ".join(codes))
    if args.output:
        _write_lines(args.output, out_lines)
    else:
        for line in out_lines:
            print(line)
    return 0


def cmd_cluster(args) -> int:
    lines = _read_lines(args.corpus)
    units = sorted({tok for line in lines for tok in line.split()})
    if args.fraction is not None:
        model = random_cluster_uniform(units, args.fraction, args.seed)
    else:
        baseline = WORD_ENCODERS[args.baseline]
        dist = derive_size_distribution(units, baseline)
        model = random_cluster(units, dist, args.seed)
    save_cluster_model(model, args.output)
    print(f"wrote {model.num_clusters} clusters for {len(units)} units to {args.output}")
    return 0


def cmd_bpe_learn(args) -> int:
    model = bpe_learn(_read_lines(args.corpus), args.operations)
    save_bpe_model(model, args.output)
    print(f"learned {len(model.merges)} merges to {args.output}")
    return 0


def cmd_bpe_apply(args) -> int:
    model = load_bpe_model(args.model)
    source = _read_lines(args.input) if args.input else sys.stdin.read().splitlines()
    cache: dict = {}
    out_lines = []
    for line in source:
        if args.reverse:
            out_lines.append(" ".join(bpe_decode(line.split(), model)))
        else:
            out_lines.append(" ".join(bpe_apply(line.split(), model, _cache=cache)))
    if args.output:
        _write_lines(args.output, out_lines)
    else:
        for line in out_lines:
            print(line)
    return 0


def cmd_pipeline_run(args) -> int:
    fields = (
        "train_path", "output_dir", "encoder", "combine_mode", "separator",
        "seed", "bpe_operations_words", "bpe_operations_codes", "dev_path",
        "test_path", "table_path", "granularity", "cluster_baseline",
        "cluster_fraction",
    )
    data = {k: getattr(args, k) for k in fields if getattr(args, k, None) is not None}
    if "train_path" not in data or "output_dir" not in data:
        raise PhonoprepError("pipeline run needs --train-path and --output-dir")
    out = run_pipeline(PipelineConfig(**data))
    print(f"artifacts written to {out}")
    return 0


def cmd_geometry_embed(args) -> int:
    table = train_embeddings(
        _read_lines(args.corpus), d=args.dim, window=args.window, seed=args.seed,
        normalize=args.normalize,
    )
    save_embeddings(table, args.output)
    print(f"wrote {len(table.vectors)} vectors (d={table.dimension}) to {args.output}")
    return 0


def cmd_geometry_project(args) -> int:
    table = load_embeddings(args.vectors)
    _, projected = pca_project(table)
    with open(args.output, "w", encoding="utf-8", newline="\n") as f:
        for unit in sorted(projected):
            x, y = projected[unit]
            f.write(f"{unit} {x!r} {y!r}\n")
    print(f"projected {len(projected)} units to {args.output}")
    return 0


def cmd_geometry_gamma(args) -> int:
    report = concentration_factor(_grouped_points(args))
    if args.format == "json":
        _emit(args, json.dumps({
            "schema": "phonoprep/gamma-report/1",
            "gamma": report.gamma,
            "groups": report.k,
            "group_sizes": list(report.group_sizes),
        }, sort_keys=True))
    elif args.format == "csv":
        _emit(args, _rows_to_csv(["gamma", "groups"], [[report.gamma, report.k]]))
    else:
        _emit(args, f"{report.gamma:.12g}")
    return 0


def cmd_geometry_cdf(args) -> int:
    points = _grouped_points(args)
    cdf = volume_cdf(points, _hull_params(args))
    if args.format == "json":
        _emit(args, json.dumps({
            "schema": "phonoprep/volume-cdf/1",
            "points": [{"volume": v, "fraction": f} for v, f in cdf],
        }, sort_keys=True))
    else:
        _emit(args, _rows_to_csv(["volume", "fraction"], cdf))
    return 0


def cmd_geometry_coverage(args) -> int:
    groups = _grouped_points(args)
    curve = coverage_curve(groups, order_seed=args.seed, params=_hull_params(args))
    if args.format == "json":
        _emit(args, json.dumps({
            "schema": "phonoprep/coverage-curve/1",
            "seed": args.seed,
            "steps": [{"step": s, "volume": v} for s, v in curve],
        }, sort_keys=True))
    else:
        _emit(args, _rows_to_csv(["step", "volume"], curve))
    return 0


def cmd_geometry_density(args) -> int:
    groups = _grouped_points(args)
    all_points = np.vstack([g for g in groups])
    report = density_measure(
        all_points, groups,
        neighbor_index=args.index,
        params=_hull_params(args),
        m=args.samples,
        threshold=args.threshold,
        seed=args.seed,
    )
    indices = sorted(report.max_density)
    if args.format == "json":
        _emit(args, json.dumps({
            "schema": "phonoprep/density-report/1",
            "seed": args.seed,
            "converge_threshold": report.converge_threshold,
            "samples_used": report.samples_used,
            "chosen_groups": list(report.chosen_groups),
            "per_index": {
                str(i): {
                    "max": report.max_density[i],
                    "sum": report.sum_density[i],
                    "mean": report.mean_density[i],
                } for i in indices
            },
        }, sort_keys=True))
    else:
        rows = [[i, report.max_density[i], report.sum_density[i], report.mean_density[i]]
                for i in indices]
        _emit(args, _rows_to_csv(["index", "max", "sum", "mean"], rows))
    return 0


def cmd_augment_noise(args) -> int:
    table = load_embeddings(args.embeddings)
    spec = NoiseSpec(fraction=args.fraction, top_n=args.top_n, seed=args.seed)
    stats: dict = {}
    out = noise_augment(_read_lines(args.input), table, spec, stats_out=stats)
    _write_lines(args.output, out)
    manifest = {
        "schema": "phonoprep/noise-manifest/1",
        "seed": args.seed,
        "fraction": args.fraction,
        "top_n": args.top_n,
        "stats": stats,
    }
    if args.manifest:
        Path(args.manifest).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(f"replaced {stats['replaced_tokens']} of {stats['total_tokens']} tokens")
    return 0


def cmd_augment_perturb(args) -> int:
    lines = _read_lines(args.input)
    vocab = sorted({tok for line in lines for tok in line.split()})
    spec = PerturbationSpec(k=args.k, seed=args.seed)
    _write_lines(args.output, perturb_corpus(lines, vocab, spec))
    print(f"applied {args.k} edits per sentence to {len(lines)} sentences (seed {args.seed})")
    return 0


def cmd_eval_bleu(args) -> int:
    report = bleu(_read_lines(args.hyp), _read_lines(args.ref), smooth=args.smooth)
    if args.format == "json":
        _emit(args, json.dumps({
            "schema": "phonoprep/bleu-report/1",
            "bleu": report.bleu,
            "precisions": list(report.precisions),
            "brevity_penalty": report.brevity_penalty,
            "hyp_length": report.hyp_length,
            "ref_length": report.ref_length,
        }, sort_keys=True))
    else:
        _emit(args, report.format_line())
    return 0


def cmd_eval_vocab(args) -> int:
    report = vocab_stats({Path(p).name: _read_lines(p) for p in args.inputs})
    if args.format == "json":
        _emit(args, json.dumps({
            "schema": "phonoprep/vocab-report/1",
            "streams": {k: {"unique": u, "total": t}
                        for k, (u, t) in sorted(report.streams.items())},
        }, sort_keys=True))
    else:
        rows = [[k, u, t] for k, (u, t) in sorted(report.streams.items())]
        _emit(args, _rows_to_csv(["stream", "unique", "total"], rows))
    return 0


# --- parser assembly ---

class _Parser(argparse.ArgumentParser):
    registry: list["_Parser"] = []

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        _Parser.registry.append(self)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_format(p, default="text", choices=("text", "json", "csv")) -> None:
    p.add_argument("--format", choices=choices, default=default)
    p.add_argument("--output", help="write to file instead of stdout")


def _add_hull(p) -> None:
    p.add_argument("--beta", type=float, default=None,
                   help="outlier threshold: fraction (<1) or count (>=1)")
    p.add_argument("--radius", type=float, default=None, help="outlier ball radius")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phonoprep", description=__doc__)
    parser.add_argument("--version", action="version", version=f"phonoprep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="encode tokens on stdin or a file")
    p.add_argument("--codec", choices=CODEC_CHOICES, required=True)
    p.add_argument("--table", help="code table override for pinyin/wubi")
    p.add_argument("--granularity", choices=("per_character", "letters"),
                   default="per_character")
    p.add_argument("--model", help="cluster model file for --codec cluster")
    p.add_argument("--input", help="input file (default: stdin)")
    p.add_argument("--output", help="output file (default: stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("cluster", help="build a random clustering model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--baseline", choices=tuple(WORD_ENCODERS), default="metaphone")
    p.add_argument("--fraction", type=float, default=None,
                   help="uniform clustering at this fraction of the vocabulary")
    p.add_argument("--seed", type=_parse_seed, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("bpe", help="subword segmentation")
    bpe_sub = p.add_subparsers(dest="bpe_command", required=True, parser_class=_Parser)
    q = bpe_sub.add_parser("learn")
    q.add_argument("--corpus", required=True)
    q.add_argument("--operations", type=int, required=True)
    q.add_argument("--output", required=True)
    q.set_defaults(func=cmd_bpe_learn)
    q = bpe_sub.add_parser("apply")
    q.add_argument("--model", required=True)
    q.add_argument("--input", help="input file (default: stdin)")
    q.add_argument("--output", help="output file (default: stdout)")
    q.add_argument("--reverse", action="store_true", help="decode instead of encode")
    q.set_defaults(func=cmd_bpe_apply)

    p = sub.add_parser("pipeline", help="end-to-end corpus preparation")
    pipe_sub = p.add_subparsers(dest="pipeline_command", required=True,
                                parser_class=_Parser)
    q = pipe_sub.add_parser("run")
    q.add_argument("--train-path", dest="train_path")
    q.add_argument("--output-dir", dest="output_dir")
    q.add_argument("--encoder", choices=tuple(WORD_ENCODERS) + ("pinyin", "wubi", "cluster", "cluster_uniform"))
    q.add_argument("--combine-mode", dest="combine_mode",
                   choices=("codes_only", "concat", "multi_source"))
    q.add_argument("--separator")
    q.add_argument("--seed", type=_parse_seed, required=True)
    q.add_argument("--bpe-operations-words", dest="bpe_operations_words", type=int)
    q.add_argument("--bpe-operations-codes", dest="bpe_operations_codes", type=int)
    q.add_argument("--dev-path", dest="dev_path")
    q.add_argument("--test-path", dest="test_path")
    q.add_argument("--table-path", dest="table_path")
    q.add_argument("--granularity", choices=("per_character", "letters"))
    q.add_argument("--cluster-baseline", dest="cluster_baseline",
                   choices=tuple(WORD_ENCODERS))
    q.add_argument("--cluster-fraction", dest="cluster_fraction", type=float)
    q.set_defaults(func=cmd_pipeline_run)

    p = sub.add_parser("geometry", help="dispersion analysis")
    geo_sub = p.add_subparsers(dest="geometry_command", required=True,
                               parser_class=_Parser)
    q = geo_sub.add_parser("embed")
    q.add_argument("--corpus", required=True)
    q.add_argument("--dim", type=int, default=100)
    q.add_argument("--window", type=int, default=5)
    q.add_argument("--seed", type=_parse_seed, required=True)
    q.add_argument("--normalize", action="store_true",
                   help="rescale vectors to unit length")
    q.add_argument("--output", required=True)
    q.set_defaults(func=cmd_geometry_embed)
    q = geo_sub.add_parser("project")
    q.add_argument("--vectors", required=True)
    q.add_argument("--output", required=True)
    q.set_defaults(func=cmd_geometry_project)
    for name, handler in (
        ("gamma", cmd_geometry_gamma),
        ("cdf", cmd_geometry_cdf),
        ("coverage", cmd_geometry_coverage),
        ("density", cmd_geometry_density),
    ):
        q = geo_sub.add_parser(name)
        q.add_argument("--groups", required=True, help="unit<TAB>group-id file")
        q.add_argument("--points", required=True, help="unit x y vectors file")
        if name in ("cdf", "coverage", "density"):
            _add_hull(q)
        if name in ("coverage", "density"):
            q.add_argument("--seed", type=_parse_seed, required=True)
        if name == "density":
            q.add_argument("--index", type=int, choices=(1, 2, 3), default=3)
            q.add_argument("--samples", type=int, default=10_000)
            q.add_argument("--threshold", type=float, default=0.001)
        _add_format(q, default="text" if name == "gamma" else "csv")
        q.set_defaults(func=handler)

    p = sub.add_parser("augment", help="robustness data generation")
    aug_sub = p.add_subparsers(dest="augment_command", required=True,
                               parser_class=_Parser)
    q = aug_sub.add_parser("noise")
    q.add_argument("--input", required=True)
    q.add_argument("--embeddings", required=True)
    q.add_argument("--output", required=True)
    q.add_argument("--fraction", type=float, default=0.2)
    q.add_argument("--top-n", dest="top_n", type=int, default=10)
    q.add_argument("--seed", type=_parse_seed, required=True)
    q.add_argument("--manifest", help="write seed/spec/stats JSON here")
    q.set_defaults(func=cmd_augment_noise)
    q = aug_sub.add_parser("perturb")
    q.add_argument("--input", required=True)
    q.add_argument("--output", required=True)
    q.add_argument("-k", "--k", type=int, required=True,
                   help="edit operations per sentence")
    q.add_argument("--seed", type=_parse_seed, required=True)
    q.set_defaults(func=cmd_augment_perturb)

    p = sub.add_parser("eval", help="scoring and statistics")
    eval_sub = p.add_subparsers(dest="eval_command", required=True,
                                parser_class=_Parser)
    q = eval_sub.add_parser("bleu")
    q.add_argument("--hyp", required=True)
    q.add_argument("--ref", required=True)
    q.add_argument("--smooth", action="store_true")
    _add_format(q, default="text", choices=("text", "json"))
    q.set_defaults(func=cmd_eval_bleu)
    q = eval_sub.add_parser("vocab")
    q.add_argument("--input", dest="inputs", action="append", required=True,
                   help="corpus file; repeat for multiple streams")
    _add_format(q, default="csv", choices=("json", "csv"))
    q.set_defaults(func=cmd_eval_vocab)

    return parser


def _apply_config_defaults(argv: list[str]) -> list[str]:
    """Load a flat JSON config named by --config and install it as defaults.

    Defaults go onto every (sub)parser: argparse subparsers use their own
    namespaces, so top-level defaults would not reach them.
    """
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        return argv  # let argparse report the missing value
    config_path = argv[at + 1]
    data = json.loads(Path(config_path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise PhonoprepError(f"config {config_path} must be a flat JSON object")
    defaults = {k.replace("-", "_"): v for k, v in data.items()}
    for registered in _Parser.registry:
        registered.set_defaults(**defaults)
    return argv[:at] + argv[at + 2:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _Parser.registry = []
    parser = build_parser()
    try:
        argv = _apply_config_defaults(argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (PhonoprepError, OSError, json.JSONDecodeError) as exc:
        print(f"phonoprep: error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (PhonoprepError, OSError, ValueError) as exc:
        print(f"phonoprep: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"phonoprep: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
