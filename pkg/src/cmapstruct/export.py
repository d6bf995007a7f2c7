"""DOT, GraphML and CXL serialization of concept maps.

Output is a pure function of its inputs: nodes in canonical order, edges in
(subject, label, object) order, no timestamps.  GraphML can be read back;
DOT and CXL are export-only.
"""

from __future__ import annotations

import math
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError, MissingRegistryError, StructuralError
from .extraction import Concept, PredicateLabel
from .framework import RelationRegistry
from .graph import ConceptMap, ConceptualStructure, Edge, MAX_LEVEL, read_assignment, format_assignment

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"
CXL_NS = "http://cmap.ihmc.us/xml/cmap/"
DC_NS = "http://purl.org/dc/elements/1.1/"

# (id, for, attr.name)
GRAPHML_KEYS = (
    ("d_level", "graph", "level", "int"),
    ("d_name", "node", "canonical", "string"),
    ("d_display", "node", "display", "string"),
    ("d_pred", "edge", "label", "string"),
    ("d_pred_display", "edge", "label_display", "string"),
    ("d_prov", "edge", "provenance", "string"),
    ("d_cat", "edge", "categories", "string"),
)

FORMATS = ("dot", "graphml", "cxl")


@dataclass(frozen=True)
class ExportOptions:
    format: str = "graphml"
    include_provenance: bool = True
    include_categories: bool = False

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown export format {self.format!r}")


def _categories_text(edge: Edge, registry: RelationRegistry | None) -> str | None:
    if registry is None:
        return None
    return "; ".join(str(c) for c in sorted(registry.classify(edge.label)))


def _prov_text(edge: Edge) -> str:
    return ",".join(sorted(edge.provenance))


def export_map(cmap: ConceptMap, options: ExportOptions = ExportOptions(),
               registry: RelationRegistry | None = None) -> str:
    if options.include_categories and registry is None and options.format == "cxl":
        raise MissingRegistryError("CXL export with categories requires a registry")
    reg = registry if options.include_categories else None
    if options.format == "dot":
        return to_dot(cmap, options.include_provenance, reg)
    if options.format == "graphml":
        return to_graphml(cmap, options.include_provenance, reg)
    return to_cxl(cmap, options.include_provenance, reg)


# ---------------------------------------------------------------------------
# DOT


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def to_dot(cmap: ConceptMap, include_provenance=True, registry=None) -> str:
    lines = [f"digraph level{cmap.level} {{", f"  graph [level={cmap.level}];"]
    for node in cmap.nodes:
        lines.append(f"  {_dot_quote(node.canonical)} [label={_dot_quote(node.display)}];")
    for e in cmap.edges:
        attrs = [f"label={_dot_quote(e.label.canonical)}"]
        if include_provenance:
            attrs.append(f"prov={_dot_quote(_prov_text(e))}")
        cats = _categories_text(e, registry)
        if cats is not None:
            attrs.append(f"categories={_dot_quote(cats)}")
        lines.append(
            f"  {_dot_quote(e.subject.canonical)} -> {_dot_quote(e.object.canonical)}"
            f" [{', '.join(attrs)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# GraphML


def _q(ns, tag):
    return f"{{{ns}}}{tag}"


def _tostring(root) -> str:
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode", xml_declaration=False) + "\n"


def to_graphml(cmap: ConceptMap, include_provenance=True, registry=None) -> str:
    ET.register_namespace("", GRAPHML_NS)
    root = ET.Element(_q(GRAPHML_NS, "graphml"))
    for key_id, domain, name, typ in GRAPHML_KEYS:
        ET.SubElement(root, _q(GRAPHML_NS, "key"),
                      {"id": key_id, "for": domain, "attr.name": name, "attr.type": typ})
    graph = ET.SubElement(root, _q(GRAPHML_NS, "graph"),
                          {"id": f"level{cmap.level}", "edgedefault": "directed"})
    _data(graph, "d_level", str(cmap.level))
    ids = {}
    for i, node in enumerate(cmap.nodes):
        ids[node.canonical] = f"n{i}"
        el = ET.SubElement(graph, _q(GRAPHML_NS, "node"), {"id": f"n{i}"})
        _data(el, "d_name", node.canonical)
        _data(el, "d_display", node.display)
    for i, e in enumerate(cmap.edges):
        el = ET.SubElement(graph, _q(GRAPHML_NS, "edge"), {
            "id": f"e{i}", "source": ids[e.subject.canonical], "target": ids[e.object.canonical],
        })
        _data(el, "d_pred", e.label.canonical)
        _data(el, "d_pred_display", e.label.display)
        if include_provenance:
            _data(el, "d_prov", _prov_text(e))
        cats = _categories_text(e, registry)
        if cats is not None:
            _data(el, "d_cat", cats)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + _tostring(root)


def _data(parent, key, value):
    el = ET.SubElement(parent, _q(GRAPHML_NS, "data"), {"key": key})
    el.text = value


def _read_data(el):
    return {d.get("key"): (d.text or "") for d in el.findall(_q(GRAPHML_NS, "data"))}


def import_graphml(text: str) -> ConceptMap:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise FormatError(f"GraphML is not well-formed XML: {exc}") from None
    if root.tag != _q(GRAPHML_NS, "graphml"):
        raise FormatError(f"unexpected root element {root.tag!r}")
    graph = root.find(_q(GRAPHML_NS, "graph"))
    if graph is None:
        raise FormatError("GraphML has no <graph> element")
    gdata = _read_data(graph)
    if "d_level" not in gdata:
        raise FormatError("GraphML graph is missing the d_level attribute")
    try:
        level = int(gdata["d_level"])
    except ValueError:
        raise FormatError(f"invalid level {gdata['d_level']!r}") from None

    nodes = {}
    for el in graph.findall(_q(GRAPHML_NS, "node")):
        node_id = el.get("id")
        if node_id is None:
            raise FormatError("node without id")
        if node_id in nodes:
            raise StructuralError(f"duplicate node id {node_id!r}")
        data = _read_data(el)
        canonical = data.get("d_name", node_id)
        try:
            nodes[node_id] = Concept(canonical, data.get("d_display") or canonical)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    edges = []
    for el in graph.findall(_q(GRAPHML_NS, "edge")):
        src, dst = el.get("source"), el.get("target")
        for ref in (src, dst):
            if ref not in nodes:
                raise StructuralError(f"edge {el.get('id')!r} references undeclared node {ref!r}")
        data = _read_data(el)
        if "d_pred" not in data:
            raise FormatError(f"edge {el.get('id')!r} has no d_pred label")
        try:
            label = PredicateLabel(data["d_pred"], data.get("d_pred_display") or data["d_pred"])
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        prov = frozenset(p for p in data.get("d_prov", "").split(",") if p)
        edges.append(Edge(nodes[src], label, nodes[dst], prov))
    try:
        return ConceptMap(level, nodes.values(), edges)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_graphml(path) -> ConceptMap:
    return import_graphml(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# CXL


def _grid(n):
    cols = max(1, math.ceil(math.sqrt(n)))
    return [(100 + 220 * (i % cols), 100 + 160 * (i // cols)) for i in range(n)]


def to_cxl(cmap: ConceptMap, include_provenance=True, registry=None) -> str:
    ET.register_namespace("", CXL_NS)
    ET.register_namespace("dc", DC_NS)
    root = ET.Element(_q(CXL_NS, "cmap"))
    meta = ET.SubElement(root, _q(CXL_NS, "res-meta"))
    ET.SubElement(meta, _q(DC_NS, "title")).text = f"level {cmap.level}"
    ET.SubElement(meta, _q(DC_NS, "format")).text = "x-cmap/x-storable"

    nodes = cmap.nodes
    positions = _grid(len(nodes))
    width = max([x for x, _ in positions], default=0) + 200
    height = max([y for _, y in positions], default=0) + 160
    mp = ET.SubElement(root, _q(CXL_NS, "map"), {"width": str(width), "height": str(height)})

    concept_ids = {n.canonical: f"c{i + 1}" for i, n in enumerate(nodes)}
    clist = ET.SubElement(mp, _q(CXL_NS, "concept-list"))
    for n in nodes:
        ET.SubElement(clist, _q(CXL_NS, "concept"), {"id": concept_ids[n.canonical], "label": n.display})

    llist = ET.SubElement(mp, _q(CXL_NS, "linking-phrase-list"))
    conns = ET.SubElement(mp, _q(CXL_NS, "connection-list"))
    link_pos = []
    for i, e in enumerate(cmap.edges, start=1):
        attrs = {"id": f"l{i}", "label": e.label.display}
        if include_provenance:
            attrs["short-comment"] = _prov_text(e)
        cats = _categories_text(e, registry)
        if cats is not None:
            attrs["long-comment"] = cats
        ET.SubElement(llist, _q(CXL_NS, "linking-phrase"), attrs)
        src, dst = concept_ids[e.subject.canonical], concept_ids[e.object.canonical]
        ET.SubElement(conns, _q(CXL_NS, "connection"),
                      {"id": f"k{2 * i - 1}", "from-id": src, "to-id": f"l{i}"})
        ET.SubElement(conns, _q(CXL_NS, "connection"),
                      {"id": f"k{2 * i}", "from-id": f"l{i}", "to-id": dst})
        (x1, y1) = positions[int(src[1:]) - 1]
        (x2, y2) = positions[int(dst[1:]) - 1]
        link_pos.append(((x1 + x2) // 2, (y1 + y2) // 2 + 10 * (i % 3)))

    capp = ET.SubElement(mp, _q(CXL_NS, "concept-appearance-list"))
    for n, (x, y) in zip(nodes, positions):
        ET.SubElement(capp, _q(CXL_NS, "concept-appearance"),
                      {"id": concept_ids[n.canonical], "x": str(x), "y": str(y)})
    lapp = ET.SubElement(mp, _q(CXL_NS, "linking-phrase-appearance-list"))
    for i, (x, y) in enumerate(link_pos, start=1):
        ET.SubElement(lapp, _q(CXL_NS, "linking-phrase-appearance"),
                      {"id": f"l{i}", "x": str(x), "y": str(y)})
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + _tostring(root)


def validate_cxl(text: str) -> list[str]:
    """Problems found against the documented CXL subset (empty list when valid)."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        return [f"not well-formed XML: {exc}"]
    problems = []
    if root.tag != _q(CXL_NS, "cmap"):
        return [f"root element is {root.tag!r}, expected cmap"]
    mp = root.find(_q(CXL_NS, "map"))
    if mp is None:
        return ["missing <map>"]
    sections = {}
    for name in ("concept-list", "linking-phrase-list", "connection-list"):
        sections[name] = mp.find(_q(CXL_NS, name))
        if sections[name] is None:
            problems.append(f"missing <{name}>")
    if problems:
        return problems
    ids: dict[str, str] = {}
    for section, tag in (("concept-list", "concept"), ("linking-phrase-list", "linking-phrase")):
        for el in sections[section]:
            if el.tag != _q(CXL_NS, tag):
                problems.append(f"unexpected element {el.tag!r} in <{section}>")
                continue
            if not el.get("id") or el.get("label") is None:
                problems.append(f"<{tag}> missing id or label")
                continue
            if el.get("id") in ids:
                problems.append(f"duplicate id {el.get('id')!r}")
            ids[el.get("id")] = tag
    for el in sections["connection-list"]:
        a, b = el.get("from-id"), el.get("to-id")
        if a not in ids or b not in ids:
            problems.append(f"connection {el.get('id')!r} references an unknown id")
        elif {ids[a], ids[b]} != {"concept", "linking-phrase"}:
            problems.append(f"connection {el.get('id')!r} must join a concept and a linking phrase")
    for section, tag in (("concept-appearance-list", "concept-appearance"),
                         ("linking-phrase-appearance-list", "linking-phrase-appearance")):
        holder = mp.find(_q(CXL_NS, section))
        if holder is None:
            continue
        for el in holder:
            if el.get("id") not in ids:
                problems.append(f"<{tag}> for unknown id {el.get('id')!r}")
            for coord in ("x", "y"):
                try:
                    int(el.get(coord, ""))
                except ValueError:
                    problems.append(f"<{tag}> {el.get('id')!r} has a non-integer {coord}")
    return problems


# ---------------------------------------------------------------------------
# files


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(tmp, path)


def write_structure(directory, structure: ConceptualStructure) -> None:
    """Store levels as ``levelK.graphml`` and assignments as ``levelK.groups``."""
    directory = Path(directory)
    for m in structure.levels:
        write_atomic(directory / f"level{m.level}.graphml", to_graphml(m))
    for k, a in enumerate(structure.assignments, start=1):
        write_atomic(directory / f"level{k}.groups", format_assignment(a))


def read_structure(directory) -> ConceptualStructure:
    directory = Path(directory)
    if not directory.is_dir():
        raise FormatError(f"{directory} is not a directory")
    levels, assignments = [], []
    for k in range(MAX_LEVEL + 1):
        p = directory / f"level{k}.graphml"
        if not p.exists():
            break
        levels.append(read_graphml(p))
    for k in range(1, MAX_LEVEL + 1):
        p = directory / f"level{k}.groups"
        if not p.exists():
            break
        assignments.append(read_assignment(p))
    if not levels:
        raise FormatError(f"{directory} contains no levelK.graphml files")
    return ConceptualStructure(tuple(levels), tuple(assignments))
