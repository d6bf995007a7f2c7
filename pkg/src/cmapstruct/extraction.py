"""Level-0 predicate triples: rule-based extraction and the manual triples format.

Rules operate on POS tags only; CCG supertags are carried but not read.

R1  noun-phrase chunks: maximal runs of JJ*/NN*/CD tokens containing a noun.
    The concept is named by the stems of the noun compound ending at the head
    (last noun); adjectives and cardinals stay out of the canonical label.
    A following ``IN/TO (DT) NP`` attaches to the chunk as display context.
R2  verb predicates: main verb stem plus the immediately following RP/IN/TO
    stems; subject is the nearest preceding NP, object the nearest following
    NP before the next verb or clause punctuation.
R3  copula: ``be DT NP`` gives ``type of`` for an indefinite (a/an or bare)
    object and ``be`` for a definite one; ``be IN NP`` gives ``be <prep>``.
R4  coordination: NPs joined by and/or (and commas) fan out over the shared
    predicate on either side.

Bracketed spans are skipped by every rule.
"""

from __future__ import annotations

import enum
import io
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .corpus import Corpus, TaggedSentence
from .errors import EmptyLabelError, ParseError, RejectedTripleError, StructuralError

DETERMINERS = frozenset({"a", "an", "the"})
INDEFINITE = frozenset({"a", "an"})
COORDINATORS = frozenset({"and", "or"})
# subordinators tagged IN that never open a prepositional attachment
SUBORDINATORS = frozenset(
    {"that", "because", "if", "while", "although", "than", "as", "whether", "so", "since"}
)
CLAUSE_BREAKS = frozenset({",", ";", ":", ".", "!", "?"})
OPEN_BRACKETS = frozenset({"(", "[", "-LRB-", "-LSB-"})
CLOSE_BRACKETS = frozenset({")", "]", "-RRB-", "-RSB-"})


def normalize_label(surface: str, stems: Sequence[str] | None = None) -> str:
    """Canonical form of a concept or predicate label.

    Lowercases, substitutes ``stems`` token-for-token when given, collapses
    whitespace and drops the determiners a/an/the.
    """
    words = surface.split()
    if stems is not None:
        stems = list(stems)
        if len(stems) != len(words):
            raise ValueError(
                f"{len(stems)} stems given for {len(words)} tokens in {surface!r}"
            )
    else:
        stems = words
    kept = [stem.lower() for word, stem in zip(words, stems) if word.lower() not in DETERMINERS]
    kept = [w for part in kept for w in part.split()]
    if not kept:
        raise EmptyLabelError(f"label {surface!r} is empty after normalization")
    return " ".join(kept)


def _check_canonical(text):
    if not text or text != text.lower() or " ".join(text.split()) != text:
        raise ValueError(f"not a canonical label: {text!r}")


@dataclass(frozen=True, order=True)
class Concept:
    canonical: str
    display: str = field(default="", compare=False)

    def __post_init__(self):
        _check_canonical(self.canonical)
        if not self.display:
            object.__setattr__(self, "display", self.canonical)

    @classmethod
    def from_text(cls, surface, stems=None):
        return cls(normalize_label(surface, stems), " ".join(surface.split()))

    def __str__(self):
        return self.canonical


@dataclass(frozen=True, order=True)
class PredicateLabel:
    canonical: str
    display: str = field(default="", compare=False)

    def __post_init__(self):
        _check_canonical(self.canonical)
        if not self.display:
            object.__setattr__(self, "display", self.canonical)

    @classmethod
    def from_text(cls, surface, stems=None):
        return cls(normalize_label(surface, stems), " ".join(surface.split()))

    def __str__(self):
        return self.canonical


def as_label(label) -> PredicateLabel:
    if isinstance(label, PredicateLabel):
        return label
    return PredicateLabel.from_text(str(label))


def as_concept(concept) -> Concept:
    if isinstance(concept, Concept):
        return concept
    return Concept.from_text(str(concept))


class Origin(enum.Enum):
    RULE_EXTRACTED = "rule_extracted"
    MANUAL = "manual"


@dataclass(frozen=True)
class Triple:
    subject: Concept
    predicate: PredicateLabel
    object: Concept
    provenance: str | None = None
    origin: Origin = Origin.MANUAL

    def __post_init__(self):
        if self.subject == self.object:
            raise RejectedTripleError(
                f"self-relation on {self.subject.canonical!r}",
                [(self.subject.canonical, self.predicate.canonical, self.object.canonical)],
            )

    @property
    def key(self):
        return (self.subject.canonical, self.predicate.canonical, self.object.canonical)


# ---------------------------------------------------------------------------
# rule-based extraction


@dataclass
class _Chunk:
    start: int
    end: int  # exclusive, grows when prepositional context attaches
    concept: Concept
    indefinite: bool


@dataclass
class _Group:
    start: int
    end: int
    members: list


def _is_noun(pos):
    return pos.startswith("NN")


def _is_modifier(pos):
    return pos.startswith("JJ") or pos == "CD"


def _is_verb(pos):
    return pos.startswith("VB") or pos == "MD"


def _bracket_mask(tokens):
    mask, depth = [], 0
    for tok in tokens:
        if tok.pos in OPEN_BRACKETS or tok.surface in OPEN_BRACKETS:
            depth += 1
            mask.append(True)
        elif tok.pos in CLOSE_BRACKETS or tok.surface in CLOSE_BRACKETS:
            mask.append(True)
            depth = max(depth - 1, 0)
        else:
            mask.append(depth > 0)
    return mask


def _chunks(tokens, skip):
    chunks = []
    i, n = 0, len(tokens)
    while i < n:
        if skip[i] or not (_is_noun(tokens[i].pos) or _is_modifier(tokens[i].pos)):
            i += 1
            continue
        j = i
        while j < n and not skip[j] and (_is_noun(tokens[j].pos) or _is_modifier(tokens[j].pos)):
            j += 1
        nouns = [k for k in range(i, j) if _is_noun(tokens[k].pos)]
        if nouns:
            head = nouns[-1]
            core = head
            while core - 1 >= i and _is_noun(tokens[core - 1].pos):
                core -= 1
            words = [t.surface for t in tokens[core : head + 1]]
            stems = [t.stem for t in tokens[core : head + 1]]
            prev = tokens[i - 1] if i > 0 and not skip[i - 1] else None
            if prev is not None and prev.pos in ("DT", "PDT"):
                indefinite = prev.surface.lower() in INDEFINITE
            else:
                indefinite = True
            try:
                concept = Concept(normalize_label(" ".join(words), stems), " ".join(words))
            except (EmptyLabelError, ValueError):
                concept = None
            if concept is not None:
                chunks.append(_Chunk(i, head + 1, concept, indefinite))
        i = j
    return chunks


def _attach_context(tokens, chunks, skip):
    """Fold ``NP IN/TO (DT) NP`` into the first chunk's display form."""
    out = []
    for chunk in chunks:
        if out:
            prev = out[-1]
            k = prev.end
            if (
                k < chunk.start
                and tokens[k].pos in ("IN", "TO")
                and tokens[k].surface.lower() not in SUBORDINATORS
                and not skip[k]
            ):
                k += 1
                if k < chunk.start and tokens[k].pos == "DT":
                    k += 1
                if k == chunk.start:
                    context = " ".join(t.surface for t in tokens[prev.end : chunk.end])
                    prev.concept = Concept(
                        prev.concept.canonical, f"{prev.concept.display} {context}"
                    )
                    prev.end = chunk.end
                    continue
        out.append(chunk)
    return out


def _coordinate(tokens, chunks, skip):
    """Join NP chunks separated by and/or/commas into one group.

    A conjunct directly followed by a verb opens a new clause when a verb
    already precedes the group, so "A measures B and C measures D" is not
    fused into one coordination.
    """
    groups = []
    for chunk in chunks:
        if groups:
            prev = groups[-1]
            if (
                chunk.end < len(tokens)
                and not skip[chunk.end]
                and _is_verb(tokens[chunk.end].pos)
                and any(_is_verb(t.pos) for t in tokens[: prev.start])
            ):
                groups.append(_Group(chunk.start, chunk.end, [chunk.concept]))
                continue
            between = tokens[prev.end : chunk.start]
            words = [t.surface.lower() for t in between]
            if between and all(w in COORDINATORS or w == "," or t.pos == "DT"
                               for w, t in zip(words, between)) and (
                any(w in COORDINATORS for w in words) or words == [","]
            ):
                prev.members.append(chunk.concept)
                prev.end = chunk.end
                continue
        groups.append(_Group(chunk.start, chunk.end, [chunk.concept]))
    return groups


def _verb_groups(tokens, skip):
    groups = []
    i, n = 0, len(tokens)
    while i < n:
        if skip[i] or not _is_verb(tokens[i].pos):
            i += 1
            continue
        j = i
        main = None
        while j < n and not skip[j]:
            pos = tokens[j].pos
            if _is_verb(pos):
                if pos.startswith("VB"):
                    main = j
                j += 1
            elif pos.startswith("RB") and j + 1 < n and _is_verb(tokens[j + 1].pos):
                j += 1
            else:
                break
        if main is not None:
            groups.append((i, j, main))
        i = j
    return groups


def _next_object(groups, after, limit, tokens):
    for g in groups:
        if g.start < after:
            continue
        if g.start >= limit:
            return None
        if any(t.surface in CLAUSE_BREAKS for t in tokens[after : g.start]):
            return None
        return g
    return None


def _prev_subject(groups, before):
    best = None
    for g in groups:
        if g.end <= before:
            best = g
    return best


def extract_triples(sentence: TaggedSentence) -> list[Triple]:
    """Apply rules R1-R4 to one tagged sentence."""
    tokens = sentence.tokens
    skip = _bracket_mask(tokens)
    chunks = _attach_context(tokens, _chunks(tokens, skip), skip)
    groups = _coordinate(tokens, chunks, skip)
    by_start = {c.start: c for c in chunks}
    verbs = _verb_groups(tokens, skip)

    found = {}
    for idx, (vstart, vend, main) in enumerate(verbs):
        limit = verbs[idx + 1][0] if idx + 1 < len(verbs) else len(tokens)
        subject = _prev_subject(groups, vstart)
        if subject is None:
            continue
        k = vend
        particles = []
        while k < limit and not skip[k] and tokens[k].pos in ("RP", "IN", "TO"):
            if tokens[k].surface.lower() in SUBORDINATORS:
                break
            particles.append(tokens[k].stem)
            k += 1
        verb_stem = tokens[main].stem
        if verb_stem == "be":
            if particles:
                label = " ".join(["be"] + particles)
                obj = _next_object(groups, k, limit, tokens)
            elif k < limit and tokens[k].pos == "DT" and k + 1 in by_start:
                obj = _next_object(groups, k + 1, limit, tokens)
                label = "type of" if by_start[k + 1].indefinite else "be"
                if obj is not None and obj.start != k + 1:
                    obj = None
            elif k in by_start:
                obj = _next_object(groups, k, limit, tokens)
                label = "type of"
            else:
                obj = None
        else:
            label = " ".join([verb_stem] + particles)
            obj = _next_object(groups, k, limit, tokens)
        if obj is None:
            continue
        display = " ".join(t.surface for t in tokens[vstart:vend]) + (
            " " + " ".join(t.surface for t in tokens[vend:vend + len(particles)])
            if particles else ""
        )
        predicate = PredicateLabel(normalize_label(label), display)
        for si, s in enumerate(subject.members):
            for oi, o in enumerate(obj.members):
                if s == o:
                    continue
                order = (subject.start, si, obj.start, oi, vstart)
                key = (s.canonical, predicate.canonical, o.canonical)
                if key not in found:
                    found[key] = (
                        order,
                        Triple(s, predicate, o, sentence.id, Origin.RULE_EXTRACTED),
                    )
    return [t for _, t in sorted(found.values(), key=lambda x: x[0])]


def extract_corpus(corpus: Corpus | Iterable[TaggedSentence], jobs: int = 1) -> list[Triple]:
    """Extract triples for every sentence, concatenated in sentence order."""
    sentences = list(corpus)
    if jobs <= 1 or len(sentences) < 2:
        per_sentence = map(extract_triples, sentences)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_sentence = list(pool.map(extract_triples, sentences, chunksize=16))
    return [t for batch in per_sentence for t in batch]


# ---------------------------------------------------------------------------
# triples file format


def load_manual_triples(stream: TextIO | str, source: str | None = None) -> list[Triple]:
    """Read ``subject | predicate | object [@ sentence-id]`` lines."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    triples, rejected = [], []
    for lineno, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        provenance = None
        if "@" in text:
            text, _, provenance = text.rpartition("@")
            provenance = provenance.strip()
            if not provenance or re.search(r"[\s,|]", provenance):
                raise ParseError(f"invalid provenance {provenance!r}", lineno, source)
        fields = [f.strip() for f in text.split("|")]
        if len(fields) != 3 or not all(fields):
            raise ParseError(
                "expected 'subject | predicate | object' with three non-empty fields",
                lineno, source,
            )
        try:
            subject = Concept.from_text(fields[0])
            predicate = PredicateLabel.from_text(fields[1])
            obj = Concept.from_text(fields[2])
        except EmptyLabelError as exc:
            raise ParseError(str(exc), lineno, source) from None
        if subject == obj:
            rejected.append(f"line {lineno}: {subject} | {predicate} | {obj}")
            continue
        triples.append(Triple(subject, predicate, obj, provenance, Origin.MANUAL))
    if rejected:
        raise RejectedTripleError(
            "self-relation triple(s) rejected: " + "; ".join(rejected), rejected
        )
    return triples


def read_triples(path) -> list[Triple]:
    with open(path, encoding="utf-8") as f:
        return load_manual_triples(f, source=str(path))


def format_triples(triples: Iterable[Triple]) -> str:
    lines = []
    for t in triples:
        line = f"{t.subject.canonical} | {t.predicate.canonical} | {t.object.canonical}"
        if t.provenance:
            line += f" @ {t.provenance}"
        lines.append(line)
    return "".join(line + "\n" for line in lines)


def check_provenance(triples: Iterable[Triple], corpus: Corpus) -> None:
    known = set(corpus.ids)
    missing = sorted({t.provenance for t in triples if t.provenance and t.provenance not in known})
    if missing:
        raise StructuralError("provenance refers to unknown sentence id(s): " + ", ".join(missing))
