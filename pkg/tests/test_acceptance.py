"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed as they happen (visible with ``-s``) and repeated in the
"acceptance criteria" section of the pytest terminal summary.
"""

import os
import random
import subprocess
import sys
import time
from dataclasses import replace

import pytest

from cmapstruct.corpus import Segmentation, read_corpus, segment_corpus
from cmapstruct.extraction import (
    Concept,
    PredicateLabel,
    Triple,
    extract_corpus,
    format_triples,
    read_triples,
)
from cmapstruct.export import (
    import_graphml,
    read_structure,
    to_cxl,
    to_dot,
    to_graphml,
    validate_cxl,
)
from cmapstruct.framework import (
    Kind,
    SemanticCategory,
    classify,
    inverse_of,
    read_registry,
    registry_counts,
)
from cmapstruct.graph import (
    ConceptMap,
    ConceptualStructure,
    Edge,
    GroupAssignment,
    build_level0,
    contract,
    read_assignment,
    validate_structure,
)
from cmapstruct.saturation import (
    PlateauCriterion,
    compute_saturation,
    detect_plateau,
    export_stats,
    plateau_verdict,
    source_from_triples,
)

from conftest import ACCEPTANCE_RESULTS, FIXTURES, REGISTRY


def report(number, title, ok, detail=""):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_RESULTS.append(line)
    print(line)
    assert ok, line


# 1 ----------------------------------------------------------------------------

WORKED_EDGES = {
    ("dc circuit", "have component", "voltage source"),
    ("battery", "type of", "voltage source"),
    ("voltaic cell", "type of", "voltage source"),
    ("battery", "is", "voltaic cell"),
    ("voltage source", "connected to", "resistor"),
    ("battery", "connected to", "resistor"),
    ("voltaic cell", "connected to", "resistor"),
    ("dc circuit", "have component", "resistor"),
    ("dc circuit", "type of", "circuit"),
}


def test_01_worked_example_map():
    start = time.perf_counter()
    cmap = build_level0(read_triples(FIXTURES / "worked-example.triples"))
    elapsed = time.perf_counter() - start
    nodes = {n.canonical for n in cmap.nodes}
    edges = {e.key for e in cmap.edges}
    ok = (
        nodes == {"dc circuit", "circuit", "voltage source", "battery", "voltaic cell", "resistor"}
        and len(cmap.edges) == 9
        and edges == WORKED_EDGES
        and elapsed < 1.0
    )
    report(1, "worked-example level-0 map", ok,
           f"{len(nodes)} concepts, {len(edges)} edges, {elapsed * 1000:.1f} ms")


# 2 ----------------------------------------------------------------------------


def test_02_classification():
    reg = read_registry(REGISTRY)
    P = Kind.PREDICATE_RELATIONS
    expected = {
        "have component": {SemanticCategory(P, "Physically Related", "Parts")},
        "connected to": {SemanticCategory(P, "Spatial Relations", "Location of Objects")},
        "is": {SemanticCategory(Kind.SIMILARITY, "Synonymy")},
        "type of": {SemanticCategory(P, "Hierarchy/Class Inclusion"),
                    SemanticCategory(Kind.SIMILARITY, "Hyponymy")},
    }
    wrong = [label for label, cats in expected.items() if classify(label, reg) != cats]
    report(2, "classification of the four worked-example labels", not wrong,
           "mismatch: " + ", ".join(wrong) if wrong else "4/4 exact")


# 3 ----------------------------------------------------------------------------


def test_03_inverse_registry():
    reg = read_registry(REGISTRY)
    fwd = inverse_of("have type", reg)
    ok = fwd == PredicateLabel("type of") and inverse_of(fwd, reg) == PredicateLabel("have type")
    ok = ok and inverse_of("connected to", reg) is None
    checked = violations = 0
    for entry in reg:
        checked += 1
        inv = inverse_of(entry.label, reg)
        if inv is not None and (inverse_of(inv, reg) != entry.label or inv == entry.label):
            violations += 1
    ok = ok and violations == 0 and checked == len(reg)
    report(3, "inverse pairs and involution over the seed registry", ok,
           f"{checked}/{len(reg)} entries checked, {violations} violations")


# 4 ----------------------------------------------------------------------------


def test_04_grouping():
    cmap = build_level0(read_triples(FIXTURES / "worked-example.triples"))
    level1 = contract(cmap, read_assignment(FIXTURES / "worked-example.groups"))
    # items 1 and 8 are the only edges from the circuit group to the component group
    oracle = {"ex-1", "ex-8"}
    ok = (
        len(level1.nodes) == 2
        and len(level1.edges) == 1
        and level1.edges[0].key == ("circuit", "is made of", "circuit component")
        and level1.edges[0].provenance == oracle
    )
    prov = ",".join(sorted(level1.edges[0].provenance)) if level1.edges else "-"
    report(4, "grouping into circuit / circuit component", ok,
           f"{len(level1.nodes)} nodes, {len(level1.edges)} edge, provenance {prov}")


# 5 ----------------------------------------------------------------------------


def _mutants(s):
    levels, assignments = list(s.levels), list(s.assignments)

    top = levels[3]
    extra_top = ConceptMap(3, list(top.nodes) + [Concept("stray context")], top.edges)
    yield ("extra level-3 node", "singleton", "stray context",
           ConceptualStructure(tuple(levels[:3] + [extra_top]), s.assignments))

    first = assignments[0]
    dropped = "thermistor"
    mapping = {k: v for k, v in first.mapping.items() if k != dropped}
    yield ("unassigned concept", "totality[1]", dropped,
           ConceptualStructure(s.levels, (GroupAssignment(mapping, first.intergroup_labels),)
                               + tuple(assignments[1:])))

    l2 = levels[2]
    padded = ConceptMap(2, list(l2.nodes) + [Concept(f"padding {i}") for i in range(9)], l2.edges)
    yield ("non-monotone counts", "monotone", "level 2 has more nodes than level 1",
           ConceptualStructure(tuple(levels[:2] + [padded] + levels[3:]), s.assignments))

    victim = l2.edges[0]
    tampered_edge = replace(victim, label=PredicateLabel("connected to"))
    tampered = ConceptMap(2, l2.nodes, [tampered_edge] + list(l2.edges[1:]))
    yield ("tampered level-2 edge", "contraction[2]", victim.subject.canonical,
           ConceptualStructure(tuple(levels[:2] + [tampered] + levels[3:]), s.assignments))


def test_05_structure_validation():
    shipped = read_structure(FIXTURES / "structure")
    base_ok = validate_structure(shipped).ok
    detected = []
    for name, check_name, needle, mutant in _mutants(shipped):
        check = validate_structure(mutant).check(check_name)
        if not check.passed and needle in check.message:
            detected.append(name)
    ok = base_ok and len(detected) == 4
    report(5, "shipped structure valid; single-fault mutants detected", ok,
           f"shipped {'valid' if base_ok else 'INVALID'}, {len(detected)}/4 mutants detected")


# 6 ----------------------------------------------------------------------------


def _scan(totals, eps, window):
    for k in range(1, len(totals) + 1):
        chunk = totals[k - 1 : k - 1 + window]
        if len(chunk) == window and all(t <= eps for t in chunk):
            return k
    return None


def _random_stream(rng):
    concepts = [Concept(f"c{i}") for i in range(rng.randint(2, 30))]
    labels = [PredicateLabel(f"r{i}") for i in range(rng.randint(1, 10))]
    segments, table = [], {}
    for si in range(rng.randint(1, 12)):
        ids = []
        for j in range(rng.randint(0, 6)):
            sid = f"s{si}-{j}"
            ids.append(sid)
            table[sid] = []
            for _ in range(rng.randint(0, 4)):
                a, b = rng.sample(concepts, 2)
                table[sid].append(Triple(a, rng.choice(labels), b, sid))
        segments.append(tuple(ids))
    return segments, table


def _series(segments, table):
    return compute_saturation(Segmentation(6, tuple(segments)), lambda sid: table.get(sid, ()))


def test_06_saturation_properties():
    rng = random.Random(20260101)
    start = time.perf_counter()
    streams = 1200
    violations = 0
    for _ in range(streams):
        segments, table = _random_stream(rng)
        series = _series(segments, table)
        pc = pr = 0
        for s in series.stats:
            if s.cum_concepts < pc or s.cum_relations < pr:
                violations += 1
            if s.cum_concepts != pc + s.new_concepts or s.cum_relations != pr + s.new_relations:
                violations += 1
            pc, pr = s.cum_concepts, s.cum_relations
        shuffled = list(segments)
        rng.shuffle(shuffled)
        other = _series(shuffled, table).stats[-1]
        if (other.cum_concepts, other.cum_relations) != (pc, pr):
            violations += 1
        totals = series.new_totals()
        for eps in range(0, 4):
            for window in range(1, 5):
                if detect_plateau(series, PlateauCriterion(eps, window)) != _scan(totals, eps, window):
                    violations += 1
    elapsed = time.perf_counter() - start
    report(6, "saturation invariants over random segment streams", violations == 0 and elapsed < 30,
           f"{streams} streams, {violations} violations, {elapsed:.1f} s")


# 7 ----------------------------------------------------------------------------


def test_07_plateau_shape():
    corpus = read_corpus(FIXTURES / "dc-corpus.txt")
    segments = segment_corpus(corpus, 31)
    series = compute_saturation(segments, source_from_triples(extract_corpus(corpus)))
    verdict = plateau_verdict(detect_plateau(series, PlateauCriterion(epsilon=2, window=2)))
    golden = (FIXTURES / "golden" / "saturation.csv").read_text()
    ok = len(segments) == 10 and verdict == "plateau: segment 6" and export_stats(series) == golden
    report(7, "plateau on the fixture corpus", ok,
           f"{len(segments)} segments, {verdict}, golden CSV {'match' if export_stats(series) == golden else 'DIFF'}")


# 8 ----------------------------------------------------------------------------


def test_08_registry_counts():
    counts = registry_counts(read_registry(REGISTRY))
    ok = counts.relation_count == 55 and counts.inverse_pair_member_count == 42
    report(8, "seed registry counts", ok,
           f"{counts.relation_count} relations, {counts.inverse_pair_member_count} with an inverse")


# 9 ----------------------------------------------------------------------------


def _random_map(rng):
    n = rng.randint(1, 50)
    names = rng.sample(range(10_000), n)
    nodes = [Concept(f"k{x}", rng.choice([f"k{x}", f"K{x} <&>", f"\"k\" {x}"])) for x in names]
    edges = []
    if n > 1:
        for _ in range(rng.randint(0, 3 * n)):
            a, b = rng.sample(nodes, 2)
            prov = frozenset(f"s{rng.randint(1, 40)}-{rng.randint(1, 9)}" for _ in range(rng.randint(0, 3)))
            edges.append(Edge(a, PredicateLabel(rng.choice(["have component", "type of", "is", "r & d"])), b, prov))
    return ConceptMap(rng.randint(0, 3), nodes, edges)


_EXPORT_SNIPPET = """
import sys
from cmapstruct.extraction import read_triples
from cmapstruct.export import to_dot, to_cxl
from cmapstruct.graph import build_level0
m = build_level0(read_triples(sys.argv[1]))
sys.stdout.write(to_dot(m) + to_cxl(m))
"""


def test_09_serialization():
    rng = random.Random(9)
    failures = 0
    for _ in range(500):
        m = _random_map(rng)
        text = to_graphml(m)
        back = import_graphml(text)
        if back != m or [n.display for n in back.nodes] != [n.display for n in m.nodes]:
            failures += 1
    m = build_level0(read_triples(FIXTURES / "dc-corpus.triples"))
    in_process = to_dot(m) + to_cxl(m)
    repeat_ok = in_process == to_dot(m) + to_cxl(m)
    for seed in ("1", "2"):
        proc = subprocess.run(
            [sys.executable, "-c", _EXPORT_SNIPPET, str(FIXTURES / "dc-corpus.triples")],
            capture_output=True, text=True, env={**os.environ, "PYTHONHASHSEED": seed},
        )
        repeat_ok = repeat_ok and proc.returncode == 0 and proc.stdout == in_process
    cxl_problems = validate_cxl(to_cxl(m))
    ok = failures == 0 and repeat_ok and not cxl_problems
    report(9, "GraphML round trip, DOT/CXL determinism, CXL validity", ok,
           f"500 maps, {failures} round-trip failures; repeat runs "
           f"{'identical' if repeat_ok else 'DIFFER'}; CXL problems {len(cxl_problems)}")


# 10 ---------------------------------------------------------------------------


def test_10_extraction_determinism():
    corpus = read_corpus(FIXTURES / "dc-corpus.txt")
    runs = [format_triples(extract_corpus(corpus, jobs=j)) for j in (1, 1, 2, 4)]
    proc = subprocess.run(
        [sys.executable, "-m", "cmapstruct", "extract", "--corpus", str(FIXTURES / "dc-corpus.txt"),
         "--jobs", "3"],
        capture_output=True, text=True, env={**os.environ, "PYTHONHASHSEED": "7"},
    )
    runs.append(proc.stdout)
    shipped = (FIXTURES / "dc-corpus.triples").read_text()
    ok = all(r == shipped for r in runs)
    report(10, "extraction determinism across runs and worker counts", ok,
           f"{len(runs)} runs (jobs 1,1,2,4 and a subprocess with jobs 3) "
           f"{'byte-identical' if ok else 'DIFFER'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
