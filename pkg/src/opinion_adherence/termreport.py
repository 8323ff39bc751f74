"""Terms that set the most adherent reviews of an item apart from the least
adherent ones, and their frequency across a category."""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from opinion_adherence.adherence import AdherenceRecord
from opinion_adherence.aggregation import split_by_adherence
from opinion_adherence.corpus import FrequencyTable, TokenizedDoc, build_frequency_table
from opinion_adherence.errors import InsufficientDataError
from opinion_adherence.terminology import TerminologyModel

NEGATIVE_SIDE = "negative"
POSITIVE_SIDE = "positive"
DEFAULT_K_BINS = 10
DEFAULT_TOP_K = 20


@dataclass(frozen=True)
class TermScore:
    term: str
    weight: float
    bin_side: str


@dataclass(frozen=True)
class DiscriminatingTerms:
    subject_id: str
    positive: tuple[TermScore, ...]
    negative: tuple[TermScore, ...]
    k_bins: int = DEFAULT_K_BINS
    top_k: int = DEFAULT_TOP_K

    def to_dict(self) -> dict:
        return {
            "subject": self.subject_id,
            "k_bins": self.k_bins,
            "top_k": self.top_k,
            "positive": [{"term": t.term, "weight": t.weight} for t in self.positive],
            "negative": [{"term": t.term, "weight": t.weight} for t in self.negative],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"

    def write_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("side", "term"))
        for side, terms in ((NEGATIVE_SIDE, self.negative), (POSITIVE_SIDE, self.positive)):
            for t in terms:
                w.writerow((side, t.term))


def bin_term_weights(bin_docs: Sequence[TokenizedDoc], idf_corpus: FrequencyTable,
                     model: TerminologyModel) -> dict[str, float]:
    """tf-idf of the terminology terms found in a bin.

    tf is the number of reviews in the bin containing the term; idf is the
    natural log of ``idf_corpus.doc_count / df``.
    """
    if not bin_docs:
        raise InsufficientDataError("cannot weigh terms of an empty bin")
    if idf_corpus.doc_count <= 0:
        raise InsufficientDataError("idf corpus has no documents")
    tf = Counter()
    for doc in bin_docs:
        tf.update(t for t in doc.term_set if t in model.terms)
    weights = {}
    for term, count in tf.items():
        df = idf_corpus.get(term)
        if df == 0:
            raise ValueError(f"term {term!r} missing from the idf corpus")
        weights[term] = count * math.log(idf_corpus.doc_count / df)
    return weights


def _rank(scores: Mapping[str, float], side: str, top_k: int) -> list[TermScore]:
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [TermScore(t, float(w), side) for t, w in ordered[:top_k]]


def item_discriminating_terms(records: Sequence[AdherenceRecord],
                              docs: Mapping[str, TokenizedDoc],
                              model: TerminologyModel,
                              k_bins: int = DEFAULT_K_BINS,
                              top_k: int = DEFAULT_TOP_K,
                              idf_corpus: FrequencyTable | None = None,
                              item_id: str | None = None) -> DiscriminatingTerms:
    """Top terms of the first (negative) and last (positive) adherence bins.

    Each side keeps its ``top_k`` heaviest terms, then terms on both sides
    are dropped from both. ``docs`` maps review ids to their tokenized text.
    The idf corpus defaults to all of the item's reviews.
    """
    if item_id is None:
        item_id = records[0].item_id if records else ""
    if len(records) < k_bins:
        raise InsufficientDataError(
            f"item {item_id!r} has {len(records)} reviews, fewer than {k_bins} bins")
    if idf_corpus is None:
        idf_corpus = build_frequency_table(docs[r.review_id] for r in records)
    bins = split_by_adherence(records, k_bins)
    neg = _rank(bin_term_weights([docs[r.review_id] for r in bins[0]], idf_corpus, model),
                NEGATIVE_SIDE, top_k)
    pos = _rank(bin_term_weights([docs[r.review_id] for r in bins[-1]], idf_corpus, model),
                POSITIVE_SIDE, top_k)
    common = {t.term for t in neg} & {t.term for t in pos}
    return DiscriminatingTerms(
        item_id,
        tuple(t for t in pos if t.term not in common),
        tuple(t for t in neg if t.term not in common),
        k_bins, top_k)


def category_discriminating_terms(items: Iterable[DiscriminatingTerms],
                                  subject_id: str = "",
                                  top_k: int | None = None) -> DiscriminatingTerms:
    """Rank terms by the number of items listing them on each side.

    Terms counted on both sides are removed before truncating to ``top_k``;
    the weight of a term is its item count.
    """
    items = list(items)
    if not items:
        raise InsufficientDataError("no item term lists to aggregate")
    if top_k is None:
        top_k = items[0].top_k
    pos = Counter(t.term for it in items for t in it.positive)
    neg = Counter(t.term for it in items for t in it.negative)
    common = pos.keys() & neg.keys()
    pos = {t: c for t, c in pos.items() if t not in common}
    neg = {t: c for t, c in neg.items() if t not in common}
    return DiscriminatingTerms(subject_id,
                               tuple(_rank(pos, POSITIVE_SIDE, top_k)),
                               tuple(_rank(neg, NEGATIVE_SIDE, top_k)),
                               items[0].k_bins, top_k)
