"""Segment-wise growth of distinct concepts and relation labels, and plateau detection."""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Callable, Iterable

from .corpus import Corpus, Segmentation
from .extraction import Triple, extract_corpus

CSV_HEADER = ("segment", "new_concepts", "new_relations", "cum_concepts", "cum_relations")

TripleSource = Callable[[str], Iterable[Triple]]


@dataclass(frozen=True)
class SegmentStats:
    segment_index: int
    new_concepts: int
    new_relations: int
    cum_concepts: int
    cum_relations: int

    @property
    def new_total(self) -> int:
        return self.new_concepts + self.new_relations


@dataclass(frozen=True)
class SaturationSeries:
    stats: tuple[SegmentStats, ...]
    plateau_at: int | None = None

    def __len__(self):
        return len(self.stats)

    def new_totals(self) -> list[int]:
        return [s.new_total for s in self.stats]


@dataclass(frozen=True)
class PlateauCriterion:
    epsilon: int = 2
    window: int = 2

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


def triples_by_sentence(triples: Iterable[Triple]) -> dict[str, list[Triple]]:
    grouped = defaultdict(list)
    for t in triples:
        grouped[t.provenance].append(t)
    return dict(grouped)


def source_from_triples(triples: Iterable[Triple]) -> TripleSource:
    grouped = triples_by_sentence(triples)
    return lambda sid: grouped.get(sid, ())


def source_from_corpus(corpus: Corpus, jobs: int = 1) -> TripleSource:
    return source_from_triples(extract_corpus(corpus, jobs=jobs))


def compute_saturation(segments: Segmentation, triple_source: TripleSource) -> SaturationSeries:
    if not segments.segments:
        raise ValueError("cannot compute saturation over an empty segmentation")
    seen_concepts: set[str] = set()
    seen_relations: set[str] = set()
    stats = []
    for index, segment in enumerate(segments.segments, start=1):
        concepts, relations = set(), set()
        for sid in segment:
            for t in triple_source(sid):
                concepts.add(t.subject.canonical)
                concepts.add(t.object.canonical)
                relations.add(t.predicate.canonical)
        new_c = concepts - seen_concepts
        new_r = relations - seen_relations
        seen_concepts |= new_c
        seen_relations |= new_r
        stats.append(SegmentStats(index, len(new_c), len(new_r),
                                  len(seen_concepts), len(seen_relations)))
    return SaturationSeries(tuple(stats))


def detect_plateau(series: SaturationSeries, criterion: PlateauCriterion) -> int | None:
    """First segment opening a run of ``window`` segments that each add at most
    ``epsilon`` new items; None if no complete run fits in the series."""
    totals = series.new_totals()
    run = 0
    for i, total in enumerate(totals):
        run = run + 1 if total <= criterion.epsilon else 0
        if run == criterion.window:
            return i - criterion.window + 2
    return None


def with_plateau(series: SaturationSeries, criterion: PlateauCriterion) -> SaturationSeries:
    return replace(series, plateau_at=detect_plateau(series, criterion))


def export_stats(series: SaturationSeries, fmt: str = "wide") -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if fmt == "wide":
        writer.writerow(CSV_HEADER)
        for s in series.stats:
            writer.writerow((s.segment_index, s.new_concepts, s.new_relations,
                             s.cum_concepts, s.cum_relations))
    elif fmt == "long":
        writer.writerow(("segment", "series", "value"))
        for s in series.stats:
            for name in CSV_HEADER[1:]:
                writer.writerow((s.segment_index, name, getattr(s, name)))
    else:
        raise ValueError(f"unknown stats format {fmt!r}")
    return out.getvalue()


def plateau_verdict(segment: int | None) -> str:
    return f"plateau: segment {segment}" if segment is not None else "plateau: none"
