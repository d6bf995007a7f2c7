"""Command-line entry point: ``cmapstruct <subcommand> ...``.

Exit status: 0 success, 1 validation failure, 2 input/format error, 3 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .corpus import read_corpus, segment_corpus, Segmentation
from .errors import CmapError, InputError
from .export import (
    ExportOptions,
    export_map,
    read_graphml,
    read_structure,
    to_graphml,
    write_atomic,
    write_structure,
)
from .extraction import check_provenance, extract_corpus, format_triples, read_triples
from .framework import read_registry, registry_counts, validate_coverage
from .graph import (
    build_level0,
    build_structure,
    contract,
    infer_inverse_edges,
    read_assignment,
    validate_structure,
)
from .saturation import (
    PlateauCriterion,
    compute_saturation,
    detect_plateau,
    export_stats,
    plateau_verdict,
    source_from_triples,
)

EXIT_OK, EXIT_INVALID, EXIT_INPUT, EXIT_USAGE = 0, 1, 2, 3
DEFAULT_SEGMENT_SIZE = 31
DEFAULT_EPSILON = 2
DEFAULT_WINDOW = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, output: str | None) -> None:
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def _positive(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return n


def _nonnegative(value):
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return n


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _load_triples(args):
    """Manual triples if given, else rule extraction over the corpus."""
    corpus = read_corpus(args.corpus) if getattr(args, "corpus", None) else None
    if args.triples:
        triples = [t for path in args.triples for t in read_triples(path)]
        if corpus is not None:
            check_provenance(triples, corpus)
    elif corpus is not None:
        triples = extract_corpus(corpus, jobs=getattr(args, "jobs", 1))
    else:
        raise UsageError("one of --corpus or --triples is required")
    return corpus, triples


# ---------------------------------------------------------------------------
# subcommands


def cmd_extract(args):
    corpus = read_corpus(args.corpus)
    triples = extract_corpus(corpus, jobs=args.jobs)
    _emit(format_triples(triples), args.output)
    _log(f"extracted {len(triples)} triples from {len(corpus)} sentences")
    return EXIT_OK


def cmd_classify(args):
    registry = read_registry(args.registry)
    _, triples = _load_triples(args)
    labels = sorted({t.predicate.canonical for t in triples})
    missing = validate_coverage(labels, registry)
    lines = []
    for label in labels:
        cats = registry.classify(label)
        text = "; ".join(str(c) for c in sorted(cats)) if cats else "UNCLASSIFIED"
        lines.append(f"{label}\t{text}")
    lines.append(f"labels: {len(labels)}; unclassified: {len(missing)}")
    _emit("\n".join(lines) + "\n", args.output)
    if missing:
        _log("unclassified label(s): " + ", ".join(missing))
        return EXIT_INVALID
    return EXIT_OK


def cmd_build(args):
    registry = read_registry(args.registry)
    _, triples = _load_triples(args)
    cmap = build_level0(triples)
    missing = validate_coverage(cmap.labels, registry)
    if missing:
        _log("warning: unclassified label(s): " + ", ".join(missing))
    if args.infer_inverses:
        cmap = infer_inverse_edges(cmap, registry)
    _emit(to_graphml(cmap), args.output)
    _log(f"level 0: {len(cmap.nodes)} nodes, {len(cmap.edges)} edges")
    return EXIT_OK


def cmd_level(args):
    cmap = read_graphml(args.map)
    assignment = read_assignment(args.groups)
    nxt = contract(cmap, assignment)
    _emit(to_graphml(nxt), args.output)
    _log(f"level {nxt.level}: {len(nxt.nodes)} nodes, {len(nxt.edges)} edges")
    return EXIT_OK


def cmd_saturate(args):
    corpus, triples = _load_triples(args)
    if corpus is not None:
        ids = corpus.ids
    else:
        ids = list(dict.fromkeys(t.provenance for t in triples))
        if None in ids:
            raise InputError("triples without '@ sentence-id' provenance cannot be segmented")
    segments = Segmentation(
        args.segment_size,
        tuple(tuple(ids[i:i + args.segment_size]) for i in range(0, len(ids), args.segment_size)),
    ) if corpus is None else segment_corpus(corpus, args.segment_size)
    series = compute_saturation(segments, source_from_triples(triples))
    plateau = detect_plateau(series, PlateauCriterion(args.epsilon, args.window))
    _emit(export_stats(series, args.format), args.output)
    print(plateau_verdict(plateau))
    return EXIT_OK


def cmd_validate(args):
    structure = read_structure(args.structure)
    report = validate_structure(structure)
    sys.stdout.write(report.format())
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_export(args):
    registry = read_registry(args.registry) if args.registry else None
    cmap = read_graphml(args.map)
    options = ExportOptions(args.format, not args.no_provenance, args.categories)
    _emit(export_map(cmap, options, registry), args.output)
    return EXIT_OK


def cmd_stats(args):
    counts = registry_counts(read_registry(args.registry))
    for name, value in counts._asdict().items():
        print(f"{name}: {value}")
    return EXIT_OK


def read_config(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    config = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        if not sep or not key.strip():
            raise InputError(f"{path}:{lineno}: expected key = value")
        config[key.strip()] = value.strip()
    return config


PIPELINE_KEYS = {
    "corpus", "triples", "registry", "level1", "level2", "level3", "output",
    "format", "include_provenance", "include_categories", "segment_size",
    "epsilon", "window", "jobs",
}


def _flag(value: str) -> bool:
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise InputError(f"not a boolean: {value!r}")


def cmd_pipeline(args):
    config = read_config(args.config)
    unknown = sorted(set(config) - PIPELINE_KEYS)
    if unknown:
        raise InputError(f"{args.config}: unknown key(s): {', '.join(unknown)}")
    base = Path(args.config).parent if args.relative_to_config else Path(".")

    def path(key):
        return str(base / config[key]) if key in config else None

    for key in ("registry", "level1", "level2", "level3", "output"):
        if key not in config:
            raise InputError(f"{args.config}: missing required key {key!r}")
    ns = argparse.Namespace(
        corpus=path("corpus"),
        triples=[str(base / p.strip()) for p in config["triples"].split(",")] if "triples" in config else None,
        jobs=int(config.get("jobs", 1)),
    )
    registry = read_registry(path("registry"))
    corpus, triples = _load_triples(ns)
    level0 = build_level0(triples)
    assignments = [read_assignment(path(f"level{k}")) for k in (1, 2, 3)]
    structure = build_structure(level0, assignments)
    out = Path(path("output"))
    write_structure(out, structure)

    fmt = config.get("format", "dot")
    options = ExportOptions(
        fmt,
        _flag(config.get("include_provenance", "true")),
        _flag(config.get("include_categories", "false")),
    )
    ext = {"dot": "dot", "graphml": "graphml", "cxl": "cxl"}[fmt]
    if fmt != "graphml":
        for m in structure.levels:
            write_atomic(out / f"level{m.level}.{ext}", export_map(m, options, registry))

    if corpus is not None:
        segments = segment_corpus(corpus, int(config.get("segment_size", DEFAULT_SEGMENT_SIZE)))
        series = compute_saturation(segments, source_from_triples(triples))
        criterion = PlateauCriterion(int(config.get("epsilon", DEFAULT_EPSILON)),
                                     int(config.get("window", DEFAULT_WINDOW)))
        write_atomic(out / "saturation.csv", export_stats(series))
        print(plateau_verdict(detect_plateau(series, criterion)))

    report = validate_structure(structure)
    write_atomic(out / "validation.txt", report.format())
    sys.stdout.write(report.format())
    return EXIT_OK if report.ok else EXIT_INVALID


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cmapstruct", description="Build leveled concept maps from a tagged corpus.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def source_flags(p, corpus_help="tagged corpus file (rule extraction unless --triples given)"):
        p.add_argument("--corpus", help=corpus_help)
        p.add_argument("--triples", action="append", metavar="PATH",
                       help="manual triples file; may be repeated")
        p.add_argument("--jobs", type=_positive, default=1,
                       help="worker processes for rule extraction (default 1)")

    p = sub.add_parser("extract", help="corpus -> triples file")
    p.add_argument("--corpus", required=True, help="tagged corpus file")
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes (default 1)")
    p.add_argument("-o", "--output", help="output triples file (default stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("classify", help="report predicate labels the registry does not classify")
    source_flags(p)
    p.add_argument("--registry", required=True, help="relation registry file")
    p.add_argument("-o", "--output", help="report file (default stdout)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("build", help="triples -> level-0 GraphML map")
    source_flags(p)
    p.add_argument("--registry", required=True, help="relation registry file")
    p.add_argument("--infer-inverses", action="store_true",
                   help="add inverse and symmetric mirror edges")
    p.add_argument("-o", "--output", help="output GraphML file (default stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("level", help="contract a map to the next level")
    p.add_argument("--map", required=True, help="source GraphML map")
    p.add_argument("--groups", required=True, help="group-assignment file")
    p.add_argument("-o", "--output", help="output GraphML file (default stdout)")
    p.set_defaults(func=cmd_level)

    p = sub.add_parser("saturate", help="segment-wise saturation CSV and plateau verdict")
    source_flags(p)
    p.add_argument("--segment-size", type=_positive, default=DEFAULT_SEGMENT_SIZE,
                   help=f"sentences per segment (default {DEFAULT_SEGMENT_SIZE})")
    p.add_argument("--epsilon", type=_nonnegative, default=DEFAULT_EPSILON,
                   help=f"max new items per plateau segment (default {DEFAULT_EPSILON})")
    p.add_argument("--window", type=_positive, default=DEFAULT_WINDOW,
                   help=f"consecutive plateau segments required (default {DEFAULT_WINDOW})")
    p.add_argument("--format", choices=("wide", "long"), default="wide",
                   help="CSV layout (default wide)")
    p.add_argument("-o", "--output", help="CSV file (default stdout, before the verdict line)")
    p.set_defaults(func=cmd_saturate)

    p = sub.add_parser("validate", help="check a structure directory")
    p.add_argument("structure", help="directory with levelK.graphml and levelK.groups files")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("export", help="GraphML map -> dot/graphml/cxl")
    p.add_argument("--map", required=True, help="source GraphML map")
    p.add_argument("--format", choices=("dot", "graphml", "cxl"), required=True)
    p.add_argument("--registry", help="registry used for --categories")
    p.add_argument("--categories", action="store_true", help="annotate edges with semantic categories")
    p.add_argument("--no-provenance", action="store_true", help="omit sentence-id provenance")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("stats", help="registry relation and category counts")
    p.add_argument("--registry", required=True, help="relation registry file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("pipeline", help="build, contract x3, validate and export from a config file")
    p.add_argument("--config", required=True, help="key=value config file")
    p.add_argument("--relative-to-config", action="store_true",
                   help="resolve config paths against the config file's directory")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cmapstruct {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        print(f"cmapstruct {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CmapError as exc:
        print(f"cmapstruct {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
