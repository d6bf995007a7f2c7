"""The semantic-relation taxonomy and the label registry built on it.

The taxonomy tree is fixed; registry files bind predicate labels to paths in
that tree and declare inverse pairings.  Registry line format::

    label :: Kind / Tier 1 / Tier 2 [; Kind / Tier 1 ...] :: inverse=<label>|none [:: symmetric]
"""

from __future__ import annotations

import enum
import io
import re
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, TextIO

from .errors import (
    DuplicateError,
    EmptyLabelError,
    InverseConflictError,
    ParseError,
    TaxonomyError,
    UnknownLabelError,
)
from .extraction import PredicateLabel, as_label


class Kind(enum.Enum):
    PREDICATE_RELATIONS = "PredicateRelations"
    SIMILARITY = "Similarity"
    QUANTITATIVE_RELATIONS = "QuantitativeRelations"
    INSTANTIATION = "Instantiation"
    EXTENSION = "Extension"


TAXONOMY: Mapping[Kind, Mapping[str, tuple[str, ...]]] = {
    Kind.PREDICATE_RELATIONS: {
        "Hierarchy/Class Inclusion": (),
        "Physically Related": ("Parts", "Constituent Material"),
        "Spatial Relations": ("Location of Objects", "Location of Activities"),
        "Causally/Functionally Related": (
            "Effect/Partial Cause",
            "Production/Generation",
            "Destruction",
            "Manifestation",
        ),
        "Instrumental Function/Usage": ("Functions", "Use"),
        "Human Role": (),
        "Conceptually Related": ("Topic", "Representation", "Property"),
    },
    Kind.SIMILARITY: {"Synonymy": (), "Hyponymy": ()},
    Kind.QUANTITATIVE_RELATIONS: {"Numerical Relations": ()},
    Kind.INSTANTIATION: {},
    Kind.EXTENSION: {},
}


@dataclass(frozen=True)
class SemanticCategory:
    kind: Kind
    tier1: str | None = None
    tier2: str | None = None

    def __post_init__(self):
        if self.tier2 is not None and self.tier1 is None:
            raise TaxonomyError(f"tier 2 {self.tier2!r} given without tier 1")
        branches = TAXONOMY[self.kind]
        if self.tier1 is not None and self.tier1 not in branches:
            raise TaxonomyError(f"invalid category path {self.path_text()!r}")
        if self.tier2 is not None and self.tier2 not in branches[self.tier1]:
            raise TaxonomyError(f"invalid category path {self.path_text()!r}")

    def __lt__(self, other):
        if not isinstance(other, SemanticCategory):
            return NotImplemented
        return self.path < other.path

    @property
    def path(self) -> tuple[str, ...]:
        return tuple(p for p in (self.kind.value, self.tier1, self.tier2) if p is not None)

    def path_text(self) -> str:
        return " / ".join(p for p in (self.kind.value, self.tier1, self.tier2) if p)

    def __str__(self):
        return self.path_text()

    def contains(self, other: SemanticCategory) -> bool:
        """True when ``other`` equals this path or descends from it."""
        return other.path[: len(self.path)] == self.path

    @classmethod
    def parse(cls, text: str) -> SemanticCategory:
        """Look a path up by text; separators and spacing are not significant."""
        found = _PATHS.get(_path_key(text))
        if found is None:
            raise TaxonomyError(f"invalid category path {text.strip()!r}")
        return found


def _path_key(text):
    return re.sub(r"\s+", "", text).casefold()


def all_categories() -> list[SemanticCategory]:
    """Every valid path of the taxonomy, parents before children."""
    out = []
    for kind, branches in TAXONOMY.items():
        out.append(SemanticCategory(kind))
        for tier1, leaves in branches.items():
            out.append(SemanticCategory(kind, tier1))
            out.extend(SemanticCategory(kind, tier1, t2) for t2 in leaves)
    return out


_PATHS = {_path_key("/".join(c.path)): c for c in all_categories()}


@dataclass(frozen=True)
class RelationEntry:
    label: PredicateLabel
    categories: frozenset[SemanticCategory]
    inverse: PredicateLabel | None = None
    symmetric: bool = False

    def __post_init__(self):
        if not self.categories:
            raise TaxonomyError(f"relation {self.label} has no category")


class RegistryCounts(NamedTuple):
    relation_count: int
    inverse_pair_member_count: int
    tier1_category_count_in_use: int
    tier2_category_count_in_use: int


class RelationRegistry:
    """Immutable mapping from canonical predicate label to :class:`RelationEntry`."""

    def __init__(self, entries: Iterable[RelationEntry] = ()):
        table = {}
        for entry in entries:
            key = entry.label.canonical
            if key in table:
                raise DuplicateError(f"duplicate relation label {key!r}")
            table[key] = entry
        _check_inverses(table)
        self._entries = MappingProxyType(table)

    @property
    def entries(self) -> Mapping[str, RelationEntry]:
        return self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries[k] for k in sorted(self._entries))

    def __contains__(self, label):
        try:
            return as_label(label).canonical in self._entries
        except EmptyLabelError:
            return False

    def __eq__(self, other):
        if not isinstance(other, RelationRegistry):
            return NotImplemented
        return dict(self._entries) == dict(other._entries)

    def get(self, label) -> RelationEntry | None:
        return self._entries.get(as_label(label).canonical)

    def classify(self, label) -> frozenset[SemanticCategory]:
        return classify(label, self)

    def inverse_of(self, label) -> PredicateLabel | None:
        return inverse_of(label, self)

    def is_symmetric(self, label) -> bool:
        entry = self.get(label)
        if entry is None:
            raise UnknownLabelError([as_label(label).canonical])
        return entry.symmetric


def _check_inverses(table):
    for key, entry in table.items():
        if entry.inverse is None:
            continue
        inv = entry.inverse.canonical
        if inv == key:
            raise InverseConflictError(f"relation {key!r} cannot be its own inverse")
        if entry.symmetric:
            raise InverseConflictError(f"symmetric relation {key!r} cannot declare an inverse")
        other = table.get(inv)
        if other is None:
            raise InverseConflictError(f"inverse {inv!r} of {key!r} is not registered")
        if other.inverse is None or other.inverse.canonical != key:
            got = other.inverse.canonical if other.inverse else "none"
            raise InverseConflictError(
                f"inverse conflict: {key!r} -> {inv!r} but {inv!r} -> {got!r}"
            )


def classify(label, registry: RelationRegistry) -> frozenset[SemanticCategory]:
    """Registered categories of ``label``; the empty set when unregistered."""
    try:
        entry = registry.get(label)
    except EmptyLabelError:
        return frozenset()
    return entry.categories if entry is not None else frozenset()


def inverse_of(label, registry: RelationRegistry) -> PredicateLabel | None:
    entry = registry.get(label)
    if entry is None:
        raise UnknownLabelError([as_label(label).canonical])
    return entry.inverse


def validate_coverage(labels: Iterable, registry: RelationRegistry) -> list[str]:
    """Sorted canonical labels that the registry does not classify."""
    return sorted({as_label(l).canonical for l in labels if not classify(l, registry)})


def registry_counts(registry: RelationRegistry) -> RegistryCounts:
    tier1, tier2 = set(), set()
    paired = 0
    for entry in registry.entries.values():
        if entry.inverse is not None:
            paired += 1
        for cat in entry.categories:
            if cat.tier1 is not None:
                tier1.add((cat.kind, cat.tier1))
            if cat.tier2 is not None:
                tier2.add((cat.kind, cat.tier1, cat.tier2))
    return RegistryCounts(len(registry), paired, len(tier1), len(tier2))


def load_registry(stream: TextIO | str, source: str | None = None) -> RelationRegistry:
    """Parse and validate a registry file.

    An inverse pointing at a label that is missing, or registered without any
    inverse, is repaired by pairing the two; a missing reverse entry copies
    the categories of the declaring entry.  Any other asymmetry is an
    :class:`InverseConflictError`.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    table: dict[str, RelationEntry] = {}
    lines: dict[str, int] = {}
    for lineno, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = [p.strip() for p in text.split("::")]
        if len(parts) not in (3, 4):
            raise ParseError("expected 'label :: categories :: inverse=... [:: symmetric]'",
                             lineno, source)
        try:
            label = PredicateLabel.from_text(parts[0])
        except EmptyLabelError as exc:
            raise ParseError(str(exc), lineno, source) from None
        cats = set()
        for chunk in parts[1].split(";"):
            if not chunk.strip():
                raise ParseError("empty category path", lineno, source)
            try:
                cats.add(SemanticCategory.parse(chunk))
            except TaxonomyError as exc:
                raise TaxonomyError(f"{source + ':' if source else ''}{lineno}: {exc}") from None
        inv_spec = parts[2]
        if not inv_spec.startswith("inverse="):
            raise ParseError(f"expected inverse=<label>|none, got {inv_spec!r}", lineno, source)
        inv_text = inv_spec[len("inverse="):].strip()
        inverse = None if inv_text in ("", "none") else PredicateLabel.from_text(inv_text)
        symmetric = False
        if len(parts) == 4:
            if parts[3] != "symmetric":
                raise ParseError(f"unknown flag {parts[3]!r}", lineno, source)
            symmetric = True
        key = label.canonical
        if key in table:
            raise DuplicateError(
                f"duplicate relation label {key!r} (lines {lines[key]} and {lineno})"
            )
        table[key] = RelationEntry(label, frozenset(cats), inverse, symmetric)
        lines[key] = lineno

    for key in list(table):
        entry = table[key]
        if entry.inverse is None:
            continue
        inv = entry.inverse.canonical
        other = table.get(inv)
        if other is None:
            table[inv] = RelationEntry(entry.inverse, entry.categories, entry.label)
        elif other.inverse is None and not other.symmetric and inv != key:
            table[inv] = replace(other, inverse=entry.label)
    return RelationRegistry(table.values())


def read_registry(path) -> RelationRegistry:
    with open(path, encoding="utf-8") as f:
        return load_registry(f, source=str(path))


def dump_registry(registry: RelationRegistry) -> str:
    lines = []
    for entry in registry:
        cats = "; ".join(str(c) for c in sorted(entry.categories))
        inv = entry.inverse.canonical if entry.inverse else "none"
        line = f"{entry.label.canonical} :: {cats} :: inverse={inv}"
        if entry.symmetric:
            line += " :: symmetric"
        lines.append(line)
    return "".join(l + "\n" for l in lines)
