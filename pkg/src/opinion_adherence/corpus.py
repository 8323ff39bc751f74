"""Review and generic-corpus ingestion, tokenization and document frequencies."""

from __future__ import annotations

import json
import logging
import os
import re
import sys
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import IO, Iterable, Iterator, Mapping, Sequence, Union

from opinion_adherence.errors import RecordParseError

log = logging.getLogger(__name__)

WHOLE = "whole"
POSITIVE = "positive"
NEGATIVE = "negative"
SEGMENTS = (WHOLE, POSITIVE, NEGATIVE)

Source = Union[str, os.PathLike, IO[bytes], IO[str]]

# Accepted JSON keys per field; the first entry is the canonical name.
FIELD_ALIASES = {
    "id": ("id", "review_id", "reviewID"),
    "item": ("item", "asin", "hotelName", "hotel_name"),
    "category": ("category", "city"),
    "score": ("score", "overall"),
    "text": ("text", "reviewText"),
    "pos_text": ("pos_text", "posContent"),
    "neg_text": ("neg_text", "negContent"),
    "language": ("language", "lang"),
}


@dataclass(frozen=True)
class Review:
    """One review: the item and category it belongs to, an optional score and
    its text segments keyed by ``whole``/``positive``/``negative``.

    Segments that are empty after trimming are dropped. When no ``whole``
    segment is given it is built from the positive and negative segments,
    positive first, joined by a single space.
    """

    id: str
    item_id: str
    category_id: str
    segments: Mapping[str, str]
    score: float | None = None
    language: str | None = None

    def __post_init__(self):
        segs = {}
        for label, text in self.segments.items():
            if label not in SEGMENTS:
                raise ValueError(f"unknown segment label {label!r}")
            if text is not None and text.strip():
                segs[label] = text
        if WHOLE not in segs:
            parts = [segs[s] for s in (POSITIVE, NEGATIVE) if s in segs]
            if parts:
                segs[WHOLE] = " ".join(parts)
        if not segs:
            raise ValueError(f"review {self.id!r} has no non-empty text segment")
        object.__setattr__(self, "segments", segs)

    @property
    def text(self) -> str:
        return self.segments[WHOLE]

    def segment(self, label: str) -> str | None:
        return self.segments.get(label)


@dataclass(frozen=True)
class TokenizedDoc:
    doc_id: str
    tokens: tuple[str, ...]
    term_set: frozenset[str]


@dataclass(frozen=True)
class FrequencyTable:
    """Document frequencies over a set of documents.

    ``df[t]`` is the number of documents containing ``t`` at least once and
    ``doc_count`` the number of documents. Tables built from disjoint document
    sets combine with :meth:`merge`.
    """

    doc_count: int = 0
    df: Mapping[str, int] = field(default_factory=dict)

    def __contains__(self, term):
        return term in self.df

    def __len__(self):
        return len(self.df)

    def get(self, term: str) -> int:
        return self.df.get(term, 0)

    def merge(self, other: "FrequencyTable") -> "FrequencyTable":
        df = Counter(self.df)
        df.update(other.df)
        return FrequencyTable(self.doc_count + other.doc_count, dict(df))

    __add__ = merge


@dataclass
class LoadReport:
    """Tally of what happened while reading an input stream."""

    source: str = "<stream>"
    lines: int = 0
    emitted: int = 0
    dropped: int = 0
    errors: list[RecordParseError] = field(default_factory=list)

    @property
    def malformed(self) -> int:
        return len(self.errors)

    def summary(self) -> str:
        return (f"{self.source}: {self.emitted} read, {self.dropped} empty, "
                f"{self.malformed} malformed of {self.lines} lines")


# -- tokenization -----------------------------------------------------------

@lru_cache(maxsize=None)
def _token_re():
    # Combining marks belong to the word they follow (Devanagari vowel signs,
    # decomposed accents, and the dot that casefold adds to U+0130).
    ranges = []
    start = prev = None
    for cp in range(sys.maxunicode + 1):
        if unicodedata.category(chr(cp))[0] == "M":
            if start is None:
                start = prev = cp
            elif cp == prev + 1:
                prev = cp
            else:
                ranges.append((start, prev))
                start = prev = cp
    if start is not None:
        ranges.append((start, prev))
    marks = "".join(f"\\U{a:08x}-\\U{b:08x}" if a != b else f"\\U{a:08x}"
                    for a, b in ranges)
    char = f"(?:[^\\W_]|[{marks}])"
    return re.compile(f"{char}+(?:'{char}+)*")


_APOSTROPHES = str.maketrans({"’": "'", "ʼ": "'"})


def tokenize(text: str, doc_id: str = "") -> TokenizedDoc:
    """Split ``text`` into case-folded runs of letters and digits.

    Apostrophes between word characters stay inside the token (``didn't``);
    every other character separates tokens. Purely numeric tokens are kept.
    """
    text = text.translate(_APOSTROPHES).casefold()
    tokens = tuple(_token_re().findall(text))
    return TokenizedDoc(doc_id, tokens, frozenset(tokens))


# -- frequency tables -------------------------------------------------------

def build_frequency_table(docs: Iterable[TokenizedDoc]) -> FrequencyTable:
    df = Counter()
    n = 0
    for doc in docs:
        n += 1
        df.update(doc.term_set)
    return FrequencyTable(n, dict(df))


def merge_tables(tables: Iterable[FrequencyTable]) -> FrequencyTable:
    df = Counter()
    n = 0
    for t in tables:
        n += t.doc_count
        df.update(t.df)
    return FrequencyTable(n, dict(df))


# -- input ------------------------------------------------------------------

def _source_name(source) -> str:
    if isinstance(source, (str, os.PathLike)):
        return os.path.basename(os.fspath(source))
    name = getattr(source, "name", None)
    return os.path.basename(name) if isinstance(name, str) else "<stream>"


def _iter_lines(source: Source, report: LoadReport) -> Iterator[tuple[int, str]]:
    """Yield ``(line_no, text)`` for every non-blank line, 1-based."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            yield from _iter_lines(fh, report)
        return
    for line_no, raw in enumerate(source, 1):
        if isinstance(raw, bytes):
            if not raw.strip():
                continue
            report.lines += 1
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                _tally_error(report, RecordParseError(line_no, f"invalid UTF-8: {exc}"))
                continue
        else:
            if not raw.strip():
                continue
            report.lines += 1
        yield line_no, raw.rstrip("\r\n")


def _tally_error(report, err):
    report.errors.append(err)
    log.warning("%s: %s", report.source, err)


def _pick(obj, name):
    for key in FIELD_ALIASES[name]:
        value = obj.get(key)
        if value is not None:
            return value
    return None


def _parse_review(obj, line_no, source_name):
    if not isinstance(obj, dict):
        raise RecordParseError(line_no, "record is not a JSON object")
    item = _pick(obj, "item")
    category = _pick(obj, "category")
    if item is None or category is None:
        raise RecordParseError(line_no, "record lacks item or category")
    score = _pick(obj, "score")
    if score is not None:
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise RecordParseError(line_no, f"score is not a number: {score!r}")
        score = float(score)
    segments = {}
    for key, label in (("text", WHOLE), ("pos_text", POSITIVE), ("neg_text", NEGATIVE)):
        value = _pick(obj, key)
        if value is not None:
            if not isinstance(value, str):
                raise RecordParseError(line_no, f"{key} is not a string")
            segments[label] = value
    rid = _pick(obj, "id")
    rid = f"{source_name}:{line_no}" if rid is None else str(rid)
    language = _pick(obj, "language")
    try:
        return Review(rid, str(item), str(category), segments, score,
                      None if language is None else str(language))
    except ValueError:
        return None


def load_reviews(source: Source, format: str = "jsonl",
                 default_category: str | None = None) -> tuple[list[Review], LoadReport]:
    """Read reviews from a JSON Lines stream or path.

    Records whose text is empty in every segment are dropped and counted;
    lines that fail to parse are recorded in the report with their line
    number and skipped. ``default_category`` fills in records without one,
    for per-category dumps such as the Amazon files.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported review format {format!r}")
    report = LoadReport(_source_name(source))
    reviews = []
    seen = set()
    for line_no, line in _iter_lines(source, report):
        try:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordParseError(line_no, f"invalid JSON: {exc.msg}") from None
            if default_category is not None and isinstance(obj, dict):
                obj.setdefault("category", default_category)
            review = _parse_review(obj, line_no, report.source)
            if review is not None and review.id in seen:
                raise RecordParseError(line_no, f"duplicate review id {review.id!r}")
        except RecordParseError as err:
            _tally_error(report, err)
            continue
        if review is None:
            report.dropped += 1
            continue
        seen.add(review.id)
        reviews.append(review)
        report.emitted += 1
    return reviews, report


_GENERIC_FORMATS = {
    "plain": "plain", "plain-one-doc-per-line": "plain", "txt": "plain",
    "jsonl": "jsonl", "jsonl-text-field": "jsonl",
}


def iter_generic_docs(source: Source, format: str = "plain",
                      report: LoadReport | None = None) -> Iterator[TokenizedDoc]:
    """Stream tokenized documents from a generic (contrastive) corpus.

    One document per non-blank line, identified by its line number. With the
    ``jsonl`` format each line is an object whose ``text`` field is the
    document.
    """
    fmt = _GENERIC_FORMATS.get(format)
    if fmt is None:
        raise ValueError(f"unsupported corpus format {format!r}")
    if report is None:
        report = LoadReport(_source_name(source))
    for line_no, line in _iter_lines(source, report):
        if fmt == "jsonl":
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                _tally_error(report, RecordParseError(line_no, f"invalid JSON: {exc.msg}"))
                continue
            text = obj.get("text") if isinstance(obj, dict) else None
            if not isinstance(text, str):
                _tally_error(report, RecordParseError(line_no, "record lacks a text field"))
                continue
            if not text.strip():
                report.dropped += 1
                continue
            line = text
        report.emitted += 1
        yield tokenize(line, str(line_no))


def load_generic_corpus(source: Source, format: str = "plain") -> tuple[list[TokenizedDoc], LoadReport]:
    report = LoadReport(_source_name(source))
    docs = list(iter_generic_docs(source, format, report))
    return docs, report


def guess_corpus_format(path) -> str:
    return "jsonl" if os.fspath(path).endswith((".jsonl", ".json")) else "plain"


def generic_frequency_table(path, format: str | None = None) -> tuple[FrequencyTable, LoadReport]:
    """Document frequencies of a generic corpus file without keeping its docs."""
    report = LoadReport(_source_name(path))
    table = build_frequency_table(
        iter_generic_docs(path, format or guess_corpus_format(path), report))
    return table, report


def review_docs(reviews: Sequence[Review], segment: str = WHOLE) -> list[TokenizedDoc]:
    """Tokenize one segment of each review; reviews lacking it are skipped."""
    return [tokenize(r.segments[segment], r.id) for r in reviews if segment in r.segments]

