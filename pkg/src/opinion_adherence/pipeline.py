"""In-process composition of the modules, shared by the CLI and the tests."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping, Sequence

from opinion_adherence.adherence import AdherenceRecord, score_corpus
from opinion_adherence.aggregation import balance_bins, group_by_score
from opinion_adherence.corpus import (
    WHOLE,
    FrequencyTable,
    Review,
    TokenizedDoc,
    build_frequency_table,
    review_docs,
)
from opinion_adherence.terminology import TerminologyModel, TerminologyParams, extract_terminology


def group_by_category(reviews: Iterable[Review]) -> dict[str, list[Review]]:
    groups = defaultdict(list)
    for r in reviews:
        groups[r.category_id].append(r)
    return {c: groups[c] for c in sorted(groups)}


def balance_reviews(reviews: Sequence[Review], scheme: str, seed: int) -> tuple[list[Review], int]:
    """Undersample reviews so every score bin has as many as the smallest.

    Returns the kept reviews in input order and the number rejected for an
    unusable score.
    """
    groups, rejected = group_by_score(reviews, scheme)
    kept = {r.id for members in balance_bins(groups, seed).values() for r in members}
    return [r for r in reviews if r.id in kept], rejected


def build_terminology(reviews: Sequence[Review], contrastive: Sequence[FrequencyTable],
                      params: TerminologyParams | None = None,
                      category_id: str = "") -> TerminologyModel:
    """Terminology of a category whose documents are the reviews' whole texts."""
    domain = build_frequency_table(review_docs(reviews, WHOLE))
    return extract_terminology(domain, contrastive, params, category_id)


def docs_by_id(reviews: Iterable[Review], segment: str = WHOLE) -> dict[str, TokenizedDoc]:
    return {d.doc_id: d for d in review_docs(list(reviews), segment)}


def score_categories(by_category: Mapping[str, Sequence[Review]],
                     models: Mapping[str, TerminologyModel],
                     segment: str = WHOLE) -> tuple[dict[str, list[AdherenceRecord]], int]:
    out = {}
    skipped = 0
    for cat, reviews in by_category.items():
        out[cat], n = score_corpus(reviews, models[cat], segment)
        skipped += n
    return out, skipped
