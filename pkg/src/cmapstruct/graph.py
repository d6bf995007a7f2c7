"""Concept maps, level-by-level contraction and conceptual-structure checks."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

from .errors import (
    EmptyMapError,
    LevelOverflowError,
    ParseError,
    StructuralError,
    TotalityError,
    UnknownLabelError,
)
from .extraction import Concept, PredicateLabel, Triple, as_concept, as_label, normalize_label
from .framework import RelationRegistry, SemanticCategory

MAX_LEVEL = 3
FALLBACK_LABEL = "related to"


@dataclass(frozen=True)
class Edge:
    subject: Concept
    label: PredicateLabel
    object: Concept
    provenance: frozenset[str] = field(default=frozenset())

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.subject.canonical, self.label.canonical, self.object.canonical)


def _pick_display(a, b):
    return a if a.display <= b.display else b


class ConceptMap:
    """A directed labeled graph of concepts at one level of the structure.

    Edges are identified by (subject, label, object); duplicates merge their
    provenance.  Parallel edges with different labels are kept.
    """

    def __init__(self, level: int, nodes: Iterable[Concept] = (), edges: Iterable[Edge] = ()):
        if not isinstance(level, int) or not 0 <= level <= MAX_LEVEL:
            raise ValueError(f"level must be in 0..{MAX_LEVEL}, got {level!r}")
        self.level = level
        table: dict[str, Concept] = {}
        for node in nodes:
            node = as_concept(node)
            old = table.get(node.canonical)
            table[node.canonical] = node if old is None else _pick_display(old, node)
        merged: dict[tuple[str, str, str], Edge] = {}
        for edge in edges:
            if edge.subject == edge.object:
                raise StructuralError(f"self-loop on {edge.subject.canonical!r}")
            for end in (edge.subject, edge.object):
                if end.canonical not in table:
                    raise StructuralError(
                        f"edge {edge.key} names unknown node {end.canonical!r}"
                    )
            old = merged.get(edge.key)
            if old is None:
                merged[edge.key] = edge
            else:
                merged[edge.key] = Edge(
                    edge.subject, _pick_display(old.label, edge.label), edge.object,
                    old.provenance | edge.provenance,
                )
        self._nodes = table
        self._edges = {
            k: Edge(table[e.subject.canonical], e.label, table[e.object.canonical],
                    frozenset(e.provenance))
            for k, e in sorted(merged.items())
        }

    @property
    def nodes(self) -> tuple[Concept, ...]:
        """Nodes in canonical order."""
        return tuple(self._nodes[k] for k in sorted(self._nodes))

    @property
    def edges(self) -> tuple[Edge, ...]:
        """Edges in (subject, label, object) order."""
        return tuple(self._edges.values())

    def node(self, canonical: str) -> Concept:
        return self._nodes[canonical]

    def has_node(self, concept) -> bool:
        return as_concept(concept).canonical in self._nodes

    def edge(self, subject, label, obj) -> Edge | None:
        key = (as_concept(subject).canonical, as_label(label).canonical, as_concept(obj).canonical)
        return self._edges.get(key)

    @property
    def labels(self) -> list[PredicateLabel]:
        seen = {}
        for e in self._edges.values():
            seen.setdefault(e.label.canonical, e.label)
        return [seen[k] for k in sorted(seen)]

    def __eq__(self, other):
        if not isinstance(other, ConceptMap):
            return NotImplemented
        return (
            self.level == other.level
            and self._nodes.keys() == other._nodes.keys()
            and self._edges == other._edges
        )

    __hash__ = None

    def __repr__(self):
        return f"ConceptMap(level={self.level}, nodes={len(self._nodes)}, edges={len(self._edges)})"

    def with_level(self, level: int) -> ConceptMap:
        return ConceptMap(level, self.nodes, self.edges)

    def difference(self, other: ConceptMap) -> list[str]:
        """Human-readable differences between two maps (empty when equal)."""
        out = []
        if self.level != other.level:
            out.append(f"level {self.level} != {other.level}")
        for k in sorted(self._nodes.keys() - other._nodes.keys()):
            out.append(f"unexpected node {k!r}")
        for k in sorted(other._nodes.keys() - self._nodes.keys()):
            out.append(f"missing node {k!r}")
        for k in sorted(self._edges.keys() - other._edges.keys()):
            out.append("unexpected edge ({}, {}, {})".format(*k))
        for k in sorted(other._edges.keys() - self._edges.keys()):
            out.append("missing edge ({}, {}, {})".format(*k))
        for k in sorted(self._edges.keys() & other._edges.keys()):
            if self._edges[k].provenance != other._edges[k].provenance:
                out.append("provenance differs on edge ({}, {}, {})".format(*k))
        return out


def build_level0(triples: Iterable[Triple]) -> ConceptMap:
    """Level-0 map: one node per distinct concept, one edge per distinct triple."""
    nodes, edges = [], []
    for t in triples:
        nodes += [t.subject, t.object]
        prov = frozenset([t.provenance]) if t.provenance else frozenset()
        edges.append(Edge(t.subject, t.predicate, t.object, prov))
    if not edges:
        raise EmptyMapError("cannot build a level-0 map from zero triples")
    return ConceptMap(0, nodes, edges)


@dataclass(frozen=True)
class GroupAssignment:
    """Total map from source concepts to group names, plus inter-group labels."""

    mapping: Mapping[str, Concept]
    intergroup_labels: Mapping[tuple[str, str], PredicateLabel] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, mapping: Mapping[str, str], labels: Mapping[tuple[str, str], str] = None):
        groups = {normalize_label(c): Concept.from_text(g) for c, g in mapping.items()}
        rels = {
            (normalize_label(a), normalize_label(b)): PredicateLabel.from_text(l)
            for (a, b), l in (labels or {}).items()
        }
        return cls(groups, rels)

    @property
    def groups(self) -> list[Concept]:
        found = {}
        for g in self.mapping.values():
            old = found.get(g.canonical)
            found[g.canonical] = g if old is None else _pick_display(old, g)
        return [found[k] for k in sorted(found)]

    def missing(self, cmap: ConceptMap) -> list[str]:
        return sorted(n.canonical for n in cmap.nodes if n.canonical not in self.mapping)

    def label_for(self, a: Concept, b: Concept) -> PredicateLabel:
        return self.intergroup_labels.get(
            (a.canonical, b.canonical), PredicateLabel(FALLBACK_LABEL)
        )


def contract(cmap: ConceptMap, assignment: GroupAssignment) -> ConceptMap:
    """Quotient ``cmap`` by the group assignment; the result sits one level up.

    Inter-group edges collapse to one edge per (group, label, group) carrying
    the union of source provenances; intra-group edges are dropped.
    """
    if cmap.level >= MAX_LEVEL:
        raise LevelOverflowError(f"cannot contract a level-{cmap.level} map")
    missing = assignment.missing(cmap)
    if missing:
        raise TotalityError(missing)
    group_of = {n.canonical: assignment.mapping[n.canonical] for n in cmap.nodes}
    edges = []
    for e in cmap.edges:
        a, b = group_of[e.subject.canonical], group_of[e.object.canonical]
        if a == b:
            continue
        edges.append(Edge(a, assignment.label_for(a, b), b, e.provenance))
    return ConceptMap(cmap.level + 1, group_of.values(), edges)


def infer_inverse_edges(cmap: ConceptMap, registry: RelationRegistry) -> ConceptMap:
    """Add the inverse of every edge whose label has one, and mirror symmetric edges."""
    unknown = [l.canonical for l in cmap.labels if l.canonical not in registry.entries]
    if unknown:
        raise UnknownLabelError(unknown)
    added = []
    for e in cmap.edges:
        entry = registry.entries[e.label.canonical]
        if entry.inverse is not None:
            added.append(Edge(e.object, entry.inverse, e.subject, e.provenance))
        elif entry.symmetric:
            added.append(Edge(e.object, e.label, e.subject, e.provenance))
    return ConceptMap(cmap.level, cmap.nodes, list(cmap.edges) + added)


def query_by_category(cmap: ConceptMap, registry: RelationRegistry, category) -> list[Edge]:
    """Edges whose label is classified under ``category`` or one of its descendants."""
    if not isinstance(category, SemanticCategory):
        category = SemanticCategory.parse(str(category))
    return [
        e for e in cmap.edges
        if any(category.contains(c) for c in registry.classify(e.label))
    ]


# ---------------------------------------------------------------------------
# structures


@dataclass(frozen=True)
class ConceptualStructure:
    levels: Sequence[ConceptMap]
    assignments: Sequence[GroupAssignment]


def build_structure(level0: ConceptMap, assignments: Sequence[GroupAssignment]) -> ConceptualStructure:
    levels = [level0]
    for a in assignments:
        levels.append(contract(levels[-1], a))
    return ConceptualStructure(tuple(levels), tuple(assignments))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    message: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format(self) -> str:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.message}" for c in self.checks
        ]
        lines.append("structure valid" if self.ok else f"structure invalid ({len(self.failures)} failed)")
        return "\n".join(lines) + "\n"


def validate_structure(structure: ConceptualStructure) -> ValidationReport:
    checks = []
    levels = list(structure.levels)
    assignments = list(structure.assignments)

    numbers = [m.level for m in levels]
    ok = numbers == list(range(MAX_LEVEL + 1)) and len(assignments) == MAX_LEVEL
    checks.append(Check(
        "levels", ok,
        f"levels {numbers} with {len(assignments)} assignments"
        + ("" if ok else f"; expected levels 0..{MAX_LEVEL} with {MAX_LEVEL} assignments"),
    ))

    counts = [len(m.nodes) for m in levels]
    bad = [(i, i + 1) for i in range(len(counts) - 1) if counts[i + 1] > counts[i]]
    checks.append(Check(
        "monotone", not bad,
        f"node counts {counts}"
        + "".join(f"; level {b} has more nodes than level {a}" for a, b in bad),
    ))

    if len(levels) > MAX_LEVEL:
        top = levels[MAX_LEVEL]
        ok = len(top.nodes) == 1 and not top.edges
        names = ", ".join(n.canonical for n in top.nodes) or "none"
        checks.append(Check(
            "singleton", ok,
            f"level {MAX_LEVEL} nodes: {names}; edges: {len(top.edges)}"
            + ("" if ok else f"; level {MAX_LEVEL} must hold exactly one concept and no edges"),
        ))
    else:
        checks.append(Check("singleton", False, f"level {MAX_LEVEL} is missing"))

    for k in range(1, MAX_LEVEL + 1):
        if k > len(assignments) or k - 1 >= len(levels):
            checks.append(Check(f"totality[{k}]", False, f"assignment for level {k} is missing"))
            checks.append(Check(f"contraction[{k}]", False, f"level {k} cannot be derived"))
            continue
        source, assignment = levels[k - 1], assignments[k - 1]
        missing = assignment.missing(source)
        checks.append(Check(
            f"totality[{k}]", not missing,
            f"all {len(source.nodes)} level-{k - 1} concepts assigned" if not missing
            else f"unassigned level-{k - 1} concept(s): {', '.join(missing)}",
        ))
        if k >= len(levels):
            checks.append(Check(f"contraction[{k}]", False, f"level {k} is missing"))
            continue
        if missing:
            checks.append(Check(
                f"contraction[{k}]", False,
                f"not checked: assignment {k} is not total",
            ))
            continue
        try:
            expected = contract(source, assignment)
        except (LevelOverflowError, StructuralError) as exc:
            checks.append(Check(f"contraction[{k}]", False, str(exc)))
            continue
        diff = levels[k].difference(expected)
        checks.append(Check(
            f"contraction[{k}]", not diff,
            f"level {k} equals contraction of level {k - 1}" if not diff
            else f"level {k} differs from contraction of level {k - 1}: " + "; ".join(diff),
        ))
    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# group-assignment file format


def parse_assignment(stream: TextIO | str, source: str | None = None) -> GroupAssignment:
    """Read ``concept => group`` lines and a ``[relations]`` section of
    ``groupA -> groupB :: label`` lines."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    mapping: dict[str, Concept] = {}
    labels: dict[tuple[str, str], PredicateLabel] = {}
    in_relations = False
    for lineno, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text == "[relations]":
            in_relations = True
            continue
        try:
            if not in_relations:
                concept, sep, group = text.partition("=>")
                if not sep or not concept.strip() or not group.strip():
                    raise ParseError("expected 'concept => group'", lineno, source)
                key = normalize_label(concept)
                grp = Concept.from_text(group)
                if key in mapping and mapping[key] != grp:
                    raise ParseError(
                        f"concept {key!r} assigned to both {mapping[key].canonical!r} "
                        f"and {grp.canonical!r}", lineno, source,
                    )
                mapping[key] = grp
            else:
                pair, sep, label = text.partition("::")
                a, arrow, b = pair.partition("->")
                if not sep or not arrow or not a.strip() or not b.strip() or not label.strip():
                    raise ParseError("expected 'groupA -> groupB :: label'", lineno, source)
                key = (normalize_label(a), normalize_label(b))
                if key[0] == key[1]:
                    raise ParseError(f"relation from group {key[0]!r} to itself", lineno, source)
                if key in labels:
                    raise ParseError(f"duplicate relation for groups {key}", lineno, source)
                labels[key] = PredicateLabel.from_text(label)
        except ValueError as exc:
            raise ParseError(str(exc), lineno, source) from None
    groups = {g.canonical for g in mapping.values()}
    unknown = sorted({g for pair in labels for g in pair} - groups)
    if unknown:
        raise StructuralError("[relations] names undefined group(s): " + ", ".join(unknown))
    return GroupAssignment(mapping, labels)


def read_assignment(path) -> GroupAssignment:
    with open(path, encoding="utf-8") as f:
        return parse_assignment(f, source=str(path))


def format_assignment(assignment: GroupAssignment) -> str:
    lines = [f"{c} => {assignment.mapping[c].display}" for c in sorted(assignment.mapping)]
    disp = {g.canonical: g.display for g in assignment.groups}
    if assignment.intergroup_labels:
        lines.append("")
        lines.append("[relations]")
        for (a, b) in sorted(assignment.intergroup_labels):
            lines.append(f"{disp[a]} -> {disp[b]} :: {assignment.intergroup_labels[(a, b)].display}")
    return "".join(l + "\n" for l in lines)
