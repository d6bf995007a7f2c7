"""Reading, writing and segmenting the tagged corpus format.

A corpus file is a sequence of sentence blocks::

    ## comment
    #S src1-001
    #T Resistors in the diagram are in parallel
    Resistors<TAB>NNS<TAB>N<TAB>resistor
    ...

Blocks are separated by a blank line.  Each token line has exactly four
tab-separated fields: surface, POS tag, CCG supertag (may be empty) and stem.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import EmptyCorpusError, ParseError, StructuralError

_ID_RE = re.compile(r"^[^\s,|@]+$")


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    pos: str
    ccg: str
    stem: str

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if not self.stem or self.stem != self.stem.lower():
            raise ValueError(f"token stem must be non-empty lowercase: {self.stem!r}")


@dataclass(frozen=True)
class TaggedSentence:
    id: str
    tokens: tuple[TaggedToken, ...]
    raw_text: str

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"sentence {self.id} has no tokens")

    @property
    def source(self) -> str:
        return source_of(self.id)


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[TaggedSentence, ...]

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def source_count(self) -> int:
        return len({s.source for s in self.sentences})

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.sentences]

    def by_id(self) -> dict[str, TaggedSentence]:
        return {s.id: s for s in self.sentences}


@dataclass(frozen=True)
class Segmentation:
    segment_size: int
    segments: tuple[tuple[str, ...], ...]

    def __len__(self):
        return len(self.segments)

    def sizes(self) -> list[int]:
        return [len(seg) for seg in self.segments]


def source_of(sentence_id: str) -> str:
    """Source tag of an id like ``src12-004`` (everything before the last dash)."""
    head, sep, _ = sentence_id.rpartition("-")
    return head if sep else sentence_id


def parse_corpus(stream: TextIO | str, source: str | None = None) -> Corpus:
    """Parse corpus-format text into a :class:`Corpus`.

    ``stream`` may be a text stream or a string.  Errors carry the 1-based line
    number of the offending line.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    sentences: list[TaggedSentence] = []
    seen: dict[str, int] = {}
    current_id = None
    current_line = 0
    raw_text = None
    tokens: list[TaggedToken] = []

    def close_block():
        nonlocal current_id, raw_text, tokens
        if current_id is None:
            return
        if not tokens:
            raise ParseError(f"sentence {current_id} has no token lines", current_line, source)
        text = raw_text if raw_text is not None else " ".join(t.surface for t in tokens)
        sentences.append(TaggedSentence(current_id, tuple(tokens), text))
        current_id, raw_text, tokens = None, None, []

    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if line.startswith("##"):
            continue
        if not line.strip():
            close_block()
            continue
        if line.startswith("#S"):
            close_block()
            sid = line[2:].strip()
            if not _ID_RE.match(sid):
                raise ParseError(f"invalid sentence id {sid!r}", lineno, source)
            if sid in seen:
                raise StructuralError(
                    f"duplicate sentence id {sid!r} (lines {seen[sid]} and {lineno})"
                )
            seen[sid] = lineno
            current_id, current_line = sid, lineno
            continue
        if line.startswith("#T"):
            if current_id is None or tokens or raw_text is not None:
                raise ParseError("#T line must directly follow a #S header", lineno, source)
            raw_text = line[2:].strip()
            continue
        if line.startswith("#"):
            raise ParseError(f"unknown directive {line.split()[0]!r}", lineno, source)
        if current_id is None:
            raise ParseError("token line outside a sentence block", lineno, source)
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(
                f"expected 4 tab-separated fields, found {len(fields)}", lineno, source
            )
        surface, pos, ccg, stem = (f.strip() for f in fields)
        if not surface or not pos or not stem:
            raise ParseError("surface, pos and stem fields must be non-empty", lineno, source)
        tokens.append(TaggedToken(surface, pos, ccg, stem.lower()))
    close_block()

    if not sentences:
        raise EmptyCorpusError("corpus contains no sentences")
    return Corpus(tuple(sentences))


def read_corpus(path) -> Corpus:
    with open(path, encoding="utf-8") as f:
        return parse_corpus(f, source=str(path))


def format_corpus(corpus: Corpus | Iterable[TaggedSentence]) -> str:
    blocks = []
    for sent in corpus:
        lines = [f"#S {sent.id}", f"#T {sent.raw_text}"]
        lines += [f"{t.surface}\t{t.pos}\t{t.ccg}\t{t.stem}" for t in sent.tokens]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def segment_corpus(corpus: Corpus, segment_size: int) -> Segmentation:
    """Split the corpus into contiguous segments of ``segment_size`` sentences."""
    if not isinstance(segment_size, int) or segment_size < 1:
        raise ValueError(f"segment_size must be a positive integer, got {segment_size!r}")
    ids = corpus.ids
    segments = tuple(
        tuple(ids[i : i + segment_size]) for i in range(0, len(ids), segment_size)
    )
    return Segmentation(segment_size, segments)
