"""Generate fixtures/dc-corpus.txt, the tagged DC-circuit fixture corpus.

Facts are grouped by the segment that first mentions them; the remaining
sentences of each segment restate earlier facts in varied surface forms.
Every rendered sentence is checked against the extraction rules, and the
resulting new-item series is checked against TARGET_NEW before writing.

    python tools/make_fixture_corpus.py [output]
"""

import random
import sys
from pathlib import Path

from cmapstruct.corpus import Corpus, TaggedSentence, TaggedToken, format_corpus, segment_corpus
from cmapstruct.extraction import extract_triples
from cmapstruct.saturation import compute_saturation, source_from_triples

SEED = 1029
SEGMENT_SIZE = 31
SEGMENT_COUNTS = [31] * 9 + [29]
TARGET_NEW = [32, 17, 11, 8, 4, 0, 0, 1, 0, 1]

# key -> (modifier tokens, head singular, head plural, head stem, mass noun)
NOUNS = {
    "dc circuit": ([("DC", "NNP", "dc")], "circuit", "circuits", "circuit", False),
    "voltage source": ([("voltage", "NN", "voltage")], "source", "sources", "source", False),
    "resistor": ([], "resistor", "resistors", "resistor", False),
    "parallel": ([], "parallel", "parallel", "parallel", True),
    "series": ([], "series", "series", "series", True),
    "battery": ([], "battery", "batteries", "battery", False),
    "current": ([], "current", "current", "current", True),
    "energy": ([], "energy", "energy", "energy", True),
    "wire": ([], "wire", "wires", "wire", False),
    "switch": ([], "switch", "switches", "switch", False),
    "lamp": ([], "lamp", "lamps", "lamp", False),
    "load": ([], "load", "loads", "load", False),
    "electron": ([], "electron", "electrons", "electron", False),
    "charge": ([], "charge", "charge", "charge", True),
    "ammeter": ([], "ammeter", "ammeters", "ammeter", False),
    "voltmeter": ([], "voltmeter", "voltmeters", "voltmeter", False),
    "voltage": ([], "voltage", "voltage", "voltage", True),
    "resistance": ([], "resistance", "resistance", "resistance", True),
    "cell": ([], "cell", "cells", "cell", False),
    "circuit": ([], "circuit", "circuits", "circuit", False),
    "fuse": ([], "fuse", "fuses", "fuse", False),
    "copper": ([], "copper", "copper", "copper", True),
    "conductor": ([], "conductor", "conductors", "conductor", False),
    "rubber": ([], "rubber", "rubber", "rubber", True),
    "insulator": ([], "insulator", "insulators", "insulator", False),
    "voltage drop": ([("voltage", "NN", "voltage")], "drop", "drops", "drop", False),
    "capacitor": ([], "capacitor", "capacitors", "capacitor", False),
    "terminal": ([], "terminal", "terminals", "terminal", False),
    "end": ([], "end", "ends", "end", False),
    "diode": ([], "diode", "diodes", "diode", False),
    "power": ([], "power", "power", "power", True),
    "heat": ([], "heat", "heat", "heat", True),
    "light": ([], "light", "light", "light", True),
    "multimeter": ([], "multimeter", "multimeters", "multimeter", False),
    "overload": ([], "overload", "overloads", "overload", False),
    "ohm": ([], "ohm", "ohms", "ohm", False),
    "unit": ([], "unit", "units", "unit", False),
    "junction": ([], "junction", "junctions", "junction", False),
    "volt": ([], "volt", "volts", "volt", False),
    "ampere": ([], "ampere", "amperes", "ampere", False),
    "circuit diagram": ([("circuit", "NN", "circuit")], "diagram", "diagrams", "diagram", False),
    "symbol": ([], "symbol", "symbols", "symbol", False),
    "component": ([], "component", "components", "component", False),
    "rheostat": ([], "rheostat", "rheostats", "rheostat", False),
    "node": ([], "node", "nodes", "node", False),
    "branch": ([], "branch", "branches", "branch", False),
    "loop": ([], "loop", "loops", "loop", False),
    "thermistor": ([], "thermistor", "thermistors", "thermistor", False),
    # display-only context nouns
    "diagram": ([], "diagram", "diagrams", "diagram", False),
    "direction": ([], "direction", "directions", "direction", False),
}

# label -> (3rd singular, plural/base, verb stem, particle tokens)
VERBS = {
    "consist of": ("consists", "consist", "consist", [("of", "IN", "of")]),
    "connect to": ("connects", "connect", "connect", [("to", "TO", "to")]),
    "supply": ("supplies", "supply", "supply", []),
    "store": ("stores", "store", "store", []),
    "carry": ("carries", "carry", "carry", []),
    "oppose": ("opposes", "oppose", "oppose", []),
    "control": ("controls", "control", "control", []),
    "flow through": ("flows", "flow", "flow", [("through", "IN", "through")]),
    "flow from": ("flows", "flow", "flow", [("from", "IN", "from")]),
    "measure": ("measures", "measure", "measure", []),
    "have": ("has", "have", "have", []),
    "produce": ("produces", "produce", "produce", []),
    "protect": ("protects", "protect", "protect", []),
    "depend on": ("depends", "depend", "depend", [("on", "IN", "on")]),
    "convert": ("converts", "convert", "convert", []),
    "allow": ("allows", "allow", "allow", []),
    "dissipate": ("dissipates", "dissipate", "dissipate", []),
    "cause": ("causes", "cause", "cause", []),
    "join": ("joins", "join", "join", []),
    "represent": ("represents", "represent", "represent", []),
    "vary": ("varies", "vary", "vary", []),
    "contain": ("contains", "contain", "contain", []),
    "break": ("breaks", "break", "break", []),
}

COPULAS = {"type of", "be", "be in"}

# (subject, label, object, object context) grouped by first segment.
FACTS = {
    1: [
        ("battery", "supply", "current", None),
        ("battery", "store", "energy", None),
        ("wire", "carry", "current", None),
        ("resistor", "oppose", "current", None),
        ("switch", "control", "current", None),
        ("lamp", "type of", "load", None),
        ("current", "flow through", "wire", None),
        ("electron", "carry", "charge", None),
        ("ammeter", "measure", "current", None),
        ("voltmeter", "measure", "voltage", None),
        ("resistor", "have", "resistance", None),
        ("cell", "produce", "voltage", None),
        ("dc circuit", "type of", "circuit", None),
        ("cell", "supply", "current", None),
    ],
    2: [
        ("fuse", "protect", "circuit", None),
        ("copper", "type of", "conductor", None),
        ("rubber", "type of", "insulator", None),
        ("resistor", "be in", "series", None),
        ("voltage drop", "depend on", "resistance", None),
        ("battery", "convert", "energy", "into current"),
        ("capacitor", "store", "energy", None),
        ("battery", "connect to", "wire", None),
        ("capacitor", "store", "charge", None),
        ("terminal", "be", "end", "of a wire"),
        ("electron", "flow from", "terminal", None),
        ("diode", "allow", "current", "in one direction"),
    ],
    3: [
        ("power", "depend on", "current", None),
        ("resistor", "dissipate", "heat", None),
        ("lamp", "produce", "light", None),
        ("multimeter", "measure", "resistance", None),
        ("multimeter", "measure", "current", None),
        ("overload", "cause", "heat", None),
        ("ohm", "be", "unit", "of resistance"),
        ("junction", "join", "wire", None),
    ],
    4: [
        ("volt", "be", "unit", "of voltage"),
        ("ampere", "be", "unit", "of current"),
        ("circuit diagram", "represent", "circuit", None),
        ("symbol", "represent", "component", None),
        ("rheostat", "vary", "resistance", None),
    ],
    5: [
        ("node", "connect to", "branch", None),
        ("loop", "contain", "battery", None),
    ],
    8: [("thermistor", "type of", "resistor", None)],
    10: [("switch", "break", "circuit", None)],
}

SUBJECT_CONTEXTS = ["in the circuit", "in the diagram", "in a DC circuit", "of the circuit"]

CCG = {
    "DT": "NP[nb]/N", "JJ": "N/N", "CD": "N/N", "CC": "conj", "IN": "PP/NP", "TO": "PP/NP",
    "MD": "(S[dcl]\\NP)/(S[b]\\NP)", ".": ".", "VBN": "(S[pss]\\NP)/PP",
}


def _ccg(tokens):
    out = []
    for i, (surface, pos, stem) in enumerate(tokens):
        if pos.startswith("NN"):
            nxt = tokens[i + 1][1] if i + 1 < len(tokens) else ""
            tag = "N/N" if nxt.startswith("NN") else "N"
        elif pos in ("VBZ", "VBP", "VB"):
            nxt = tokens[i + 1][1] if i + 1 < len(tokens) else ""
            tag = "(S[dcl]\\NP)/PP" if nxt in ("IN", "TO") else "(S[dcl]\\NP)/NP"
            if pos == "VB":
                tag = tag.replace("dcl", "b")
        elif pos in ("-LRB-", "-RRB-"):
            tag = ""
        else:
            tag = CCG.get(pos, "")
        out.append(TaggedToken(surface, pos, tag, stem))
    return out


def _article(word):
    return "an" if word[0].lower() in "aeiou" else "a"


def noun_phrase(key, plural, det):
    """det: 'the', 'a' (indefinite singular) or None (bare)."""
    mods, sg, pl, stem, mass = NOUNS[key]
    words = list(mods)
    if mass:
        head = (sg, "NN", stem)
    elif plural:
        head = (pl, "NNS", stem)
    else:
        head = (sg, "NN", stem)
    words.append(head)
    if det == "the":
        return [("the", "DT", "the")] + words
    if det == "a":
        art = _article(words[0][0])
        return [(art, "DT", art)] + words
    return words


def context_tokens(text):
    out = []
    for w in text.split():
        lw = w.lower()
        if lw in ("in", "of", "into"):
            out.append((w, "IN", lw))
        elif lw in ("the", "a"):
            out.append((w, "DT", lw))
        elif lw == "one":
            out.append((w, "CD", "one"))
        elif lw == "dc":
            out.append((w, "NNP", "dc"))
        else:
            out.append((w, "NN", NOUNS[lw][3] if lw in NOUNS else lw))
    return out


def choose_det(rng, key, plural, subject=False):
    if NOUNS[key][4]:
        return None if subject else rng.choice(["the", None])
    if plural:
        return rng.choice(["the", None])
    return rng.choice(["the", "a"])


def render(rng, fact, partner=None):
    """Tokens for one fact (or two coordinated facts sharing label and object)."""
    subj, label, obj, ctx = fact
    plural = rng.random() < 0.35 and not NOUNS[subj][4]
    if partner is not None:
        plural = True
    toks = noun_phrase(subj, plural, choose_det(rng, subj, plural, subject=True))
    if partner is not None:
        psubj = partner[0]
        toks += [("and", "CC", "and")] + noun_phrase(psubj, True, choose_det(rng, psubj, True, subject=True))
    elif rng.random() < 0.15 and "circuit" not in subj:
        toks += context_tokens(rng.choice(SUBJECT_CONTEXTS))
    agree_pl = plural or partner is not None
    if label == "type of":
        toks.append(("are", "VBP", "be") if agree_pl else ("is", "VBZ", "be"))
        obj_pl = agree_pl and not NOUNS[obj][4]
        toks += noun_phrase(obj, obj_pl, None if (obj_pl or NOUNS[obj][4]) else "a")
    elif label == "be":
        toks.append(("are", "VBP", "be") if agree_pl else ("is", "VBZ", "be"))
        toks += noun_phrase(obj, agree_pl, "the")
    elif label == "be in":
        toks.append(("are", "VBP", "be") if agree_pl else ("is", "VBZ", "be"))
        toks.append(("in", "IN", "in"))
        toks += noun_phrase(obj, False, None)
    else:
        sg3, base, stem, particles = VERBS[label]
        roll = rng.random()
        if label == "connect to" and roll < 0.3:
            toks += [("is", "VBZ", "be") if not agree_pl else ("are", "VBP", "be"),
                     ("connected", "VBN", "connect")]
        elif roll < 0.12:
            toks += [("can", "MD", "can"), (base, "VB", stem)]
        else:
            toks.append((base, "VBP", stem) if agree_pl else (sg3, "VBZ", stem))
        toks += particles
        obj_pl = rng.random() < 0.3 and not NOUNS[obj][4]
        toks += noun_phrase(obj, obj_pl, choose_det(rng, obj, obj_pl))
    if ctx:
        toks += context_tokens(ctx)
    toks.append((".", ".", "."))
    first = toks[0]
    toks[0] = (first[0][0].upper() + first[0][1:],) + first[1:]
    return toks


WORKED_SENTENCES = [
    [("One", "CD", "one"), ("simple", "JJ", "simple"), ("DC", "NNP", "dc"),
     ("circuit", "NN", "circuit"), ("consists", "VBZ", "consist"), ("of", "IN", "of"),
     ("a", "DT", "a"), ("voltage", "NN", "voltage"), ("source", "NN", "source"),
     ("(", "-LRB-", "("), ("battery", "NN", "battery"), ("or", "CC", "or"),
     ("voltaic", "JJ", "voltaic"), ("cell", "NN", "cell"), (")", "-RRB-", ")"),
     ("connected", "VBN", "connect"), ("to", "TO", "to"), ("a", "DT", "a"),
     ("resistor", "NN", "resistor"), (".", ".", ".")],
    [("Resistors", "NNS", "resistor"), ("in", "IN", "in"), ("the", "DT", "the"),
     ("diagram", "NN", "diagram"), ("are", "VBP", "be"), ("in", "IN", "in"),
     ("parallel", "NN", "parallel"), (".", ".", ".")],
]
WORKED_FACTS = [
    {("dc circuit", "consist of", "voltage source"), ("voltage source", "connect to", "resistor")},
    {("resistor", "be in", "parallel")},
]


def _text(tokens):
    text = " ".join(t[0] for t in tokens)
    for a, b in ((" .", "."), ("( ", "("), (" )", ")")):
        text = text.replace(a, b)
    return text


def generate():
    rng = random.Random(SEED)
    sentences = []  # (tokens, expected triple keys)
    known = []
    for tokens, facts in zip(WORKED_SENTENCES, WORKED_FACTS):
        sentences.append((tokens, facts))
    known += [(s, l, o, None) for f in WORKED_FACTS for (s, l, o) in sorted(f)]

    segments = []
    for seg, size in enumerate(SEGMENT_COUNTS, start=1):
        intro = FACTS.get(seg, [])
        pool = known + intro
        block = [(render(rng, f), {f[:3]}) for f in intro]
        if seg == 1:
            block = sentences + block
        while len(block) < size:
            fact = rng.choice(known if seg > 1 else pool)
            partners = [g for g in (known if seg > 1 else pool)
                        if g[1:] == fact[1:] and g[0] != fact[0] and g[1] not in COPULAS]
            if partners and rng.random() < 0.35:
                other = rng.choice(partners)
                block.append((render(rng, fact, other), {fact[:3], other[:3]}))
            else:
                block.append((render(rng, fact), {fact[:3]}))
        head = block[:2] if seg == 1 else []
        rest = block[2:] if seg == 1 else block
        rng.shuffle(rest)
        segments.append(head + rest)
        known = pool

    out, source, ordinal = [], 1, 0
    for block in segments:
        for tokens, expected in block:
            ordinal += 1
            if ordinal > 7 or (ordinal > 3 and rng.random() < 0.2):
                source += 1
                ordinal = 1
            sid = f"src{source:03d}-{ordinal:03d}"
            sent = TaggedSentence(sid, tuple(_ccg(tokens)), _text(tokens))
            got = {t.key for t in extract_triples(sent)}
            if got != expected:
                raise SystemExit(f"{sid} {sent.raw_text!r}: extracted {got}, expected {expected}")
            out.append(sent)
    corpus = Corpus(tuple(out))
    from cmapstruct.extraction import extract_corpus
    series = compute_saturation(segment_corpus(corpus, SEGMENT_SIZE),
                                source_from_triples(extract_corpus(corpus)))
    new = series.new_totals()
    if new != TARGET_NEW:
        raise SystemExit(f"new-item series {new} != target {TARGET_NEW}")
    return corpus


def main(argv):
    target = Path(argv[1]) if len(argv) > 1 else Path(__file__).parents[1] / "fixtures" / "dc-corpus.txt"
    corpus = generate()
    header = (
        "## DC-circuit fixture corpus: 308 tagged sentences in 10 segments of 31.\n"
        "## Generated by tools/make_fixture_corpus.py; the first two sentences are\n"
        "## hand-tagged worked examples.\n"
    )
    target.write_text(header + format_corpus(corpus), encoding="utf-8")
    print(f"wrote {len(corpus)} sentences from {corpus.source_count} sources to {target}")


if __name__ == "__main__":
    main(sys.argv)
