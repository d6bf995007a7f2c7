"""Leveled concept maps and semantic-relation frameworks from tagged domain corpora."""

__version__ = "0.1.0"

from .corpus import Corpus, Segmentation, TaggedSentence, TaggedToken, parse_corpus, segment_corpus
from .extraction import (
    Concept,
    Origin,
    PredicateLabel,
    Triple,
    extract_corpus,
    extract_triples,
    load_manual_triples,
    normalize_label,
)
from .framework import (
    RelationEntry,
    RelationRegistry,
    SemanticCategory,
    classify,
    inverse_of,
    load_registry,
    registry_counts,
)
from .graph import (
    ConceptMap,
    ConceptualStructure,
    Edge,
    GroupAssignment,
    build_level0,
    build_structure,
    contract,
    infer_inverse_edges,
    query_by_category,
    validate_structure,
)
from .saturation import (
    PlateauCriterion,
    SaturationSeries,
    SegmentStats,
    compute_saturation,
    detect_plateau,
    export_stats,
)
from .export import ExportOptions, export_map, import_graphml
