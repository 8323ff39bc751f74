"""Adherence of a document to a terminology: the share of its distinct terms
that belong to the terminology."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from opinion_adherence.corpus import WHOLE, SEGMENTS, Review, TokenizedDoc, tokenize
from opinion_adherence.errors import EmptyDocumentError
from opinion_adherence.terminology import TerminologyModel

log = logging.getLogger(__name__)

CSV_HEADER = ("review_id", "item_id", "category_id", "segment", "score", "adherence")


@dataclass(frozen=True)
class AdherenceRecord:
    review_id: str
    item_id: str
    category_id: str
    matched_count: int
    distinct_term_count: int
    score: float | None = None
    segment: str = WHOLE

    def __post_init__(self):
        if self.distinct_term_count < 1:
            raise ValueError("distinct_term_count must be positive")
        if not 0 <= self.matched_count <= self.distinct_term_count:
            raise ValueError("matched_count out of range")

    @property
    def adherence(self) -> float:
        return self.matched_count / self.distinct_term_count


def _matched(doc, model):
    if not doc.term_set:
        raise EmptyDocumentError(f"document {doc.doc_id!r} has no terms")
    terms = model.terms
    return sum(1 for t in doc.term_set if t in terms)


def compute_adherence(doc: TokenizedDoc, model: TerminologyModel) -> float:
    return _matched(doc, model) / len(doc.term_set)


def score_review(review: Review, model: TerminologyModel, segment: str = WHOLE,
                 doc: TokenizedDoc | None = None) -> AdherenceRecord:
    if doc is None:
        doc = tokenize(review.segments[segment], review.id)
    return AdherenceRecord(review.id, review.item_id, review.category_id,
                           _matched(doc, model), len(doc.term_set), review.score, segment)


def score_corpus(reviews: Iterable[Review], model: TerminologyModel,
                 segment: str = WHOLE) -> tuple[list[AdherenceRecord], int]:
    """Score one text segment of every review against ``model``.

    Returns the records in input order and the number of reviews skipped
    because the segment is missing or has no terms.
    """
    if segment not in SEGMENTS:
        raise ValueError(f"unknown segment {segment!r}")
    records = []
    skipped = 0
    for review in reviews:
        text = review.segments.get(segment)
        if text is None:
            skipped += 1
            continue
        doc = tokenize(text, review.id)
        if not doc.term_set:
            skipped += 1
            continue
        records.append(score_review(review, model, segment, doc))
    if skipped:
        log.info("category %s: %d reviews without usable %s text",
                 model.category_id, skipped, segment)
    return records, skipped


def _fmt_score(score):
    if score is None:
        return ""
    return repr(score)


def write_adherence_csv(records: Iterable[AdherenceRecord], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow((r.review_id, r.item_id, r.category_id, r.segment,
                         _fmt_score(r.score), repr(r.adherence)))


def read_adherence_csv(fh: IO[str]) -> list[dict]:
    """Rows of an adherence CSV with ``score`` and ``adherence`` as floats."""
    rows = []
    for row in csv.DictReader(fh):
        row["score"] = float(row["score"]) if row["score"] else None
        row["adherence"] = float(row["adherence"])
        rows.append(row)
    return rows
