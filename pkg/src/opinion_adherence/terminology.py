"""Contrastive single-term terminology extraction.

A term belongs to the terminology of a domain corpus when it occurs in enough
domain documents and is markedly more frequent there than in every generic
corpus it is contrasted with.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from opinion_adherence.corpus import FrequencyTable
from opinion_adherence.errors import ConfigurationError, EmptyCorpusError

DEFAULT_THETA_FREQ = 0.005
DEFAULT_THETA_CUTOFF = 16.0
HALF_DOC_SMOOTHING = "half_doc_smoothing"


@dataclass(frozen=True)
class TerminologyParams:
    """Thresholds for extraction.

    ``theta_freq`` is the minimum share of domain documents a candidate must
    occur in; ``theta_cutoff`` the minimum term strength (inclusive).
    """

    theta_freq: float = DEFAULT_THETA_FREQ
    theta_cutoff: float = DEFAULT_THETA_CUTOFF
    zero_df_policy: str = HALF_DOC_SMOOTHING

    def __post_init__(self):
        if not 0.0 < self.theta_freq < 1.0:
            raise ConfigurationError(f"theta_freq must lie in (0, 1), got {self.theta_freq}")
        if not self.theta_cutoff > 1.0:
            raise ConfigurationError(f"theta_cutoff must exceed 1, got {self.theta_cutoff}")
        if self.zero_df_policy != HALF_DOC_SMOOTHING:
            raise ConfigurationError(f"unknown zero_df_policy {self.zero_df_policy!r}")


@dataclass(frozen=True)
class TerminologyModel:
    category_id: str
    terms: Mapping[str, float]
    params: TerminologyParams = field(default_factory=TerminologyParams)
    domain_doc_count: int = 0
    contrastive_set_count: int = 0

    def __contains__(self, term):
        return term in self.terms

    def __len__(self):
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "category": self.category_id,
            "params": {"theta_freq": self.params.theta_freq,
                       "theta_cutoff": self.params.theta_cutoff},
            "domain_doc_count": self.domain_doc_count,
            "contrastive_set_count": self.contrastive_set_count,
            "terms": dict(self.terms),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "TerminologyModel":
        p = data.get("params", {})
        params = TerminologyParams(p.get("theta_freq", DEFAULT_THETA_FREQ),
                                   p.get("theta_cutoff", DEFAULT_THETA_CUTOFF))
        return cls(data["category"], {t: float(v) for t, v in data["terms"].items()},
                   params, int(data.get("domain_doc_count", 0)),
                   int(data.get("contrastive_set_count", 0)))

    @classmethod
    def from_json(cls, text: str) -> "TerminologyModel":
        return cls.from_dict(json.loads(text))


def term_frequency(table: FrequencyTable, term: str) -> float:
    """Share of the table's documents that contain ``term``."""
    if table.doc_count <= 0:
        raise EmptyCorpusError("term frequency is undefined on an empty corpus")
    return table.get(term) / table.doc_count


def _contrastive_frequency(table, term):
    if table.doc_count <= 0:
        raise EmptyCorpusError("contrastive corpus has no documents")
    df = table.get(term)
    # Absent terms count as half a document so the ratio stays finite.
    if df == 0:
        return 1.0 / (2 * table.doc_count)
    return df / table.doc_count


def _check_contrastive(contrastive):
    if not contrastive:
        raise ConfigurationError("at least one contrastive corpus is required")


def term_strength(domain: FrequencyTable, contrastive: Sequence[FrequencyTable], term: str,
                  params: TerminologyParams | None = None) -> float:
    """Domain frequency of ``term`` over its lowest frequency in any generic corpus."""
    _check_contrastive(contrastive)
    tf_domain = term_frequency(domain, term)
    return tf_domain / min(_contrastive_frequency(g, term) for g in contrastive)


def extract_terminology(domain: FrequencyTable, contrastive: Sequence[FrequencyTable],
                        params: TerminologyParams | None = None,
                        category_id: str = "") -> TerminologyModel:
    """Select the domain terms with enough support and strength.

    Candidates are the terms of ``domain``. Those occurring in fewer than
    ``theta_freq`` of the domain documents are skipped without computing a
    strength; the rest are kept when their strength reaches ``theta_cutoff``.
    """
    params = params or TerminologyParams()
    _check_contrastive(contrastive)
    for g in contrastive:
        if g.doc_count <= 0:
            raise EmptyCorpusError("contrastive corpus has no documents")
    terms = {}
    if domain.doc_count > 0:
        for term in sorted(domain.df):
            if term_frequency(domain, term) < params.theta_freq:
                continue
            ts = term_strength(domain, contrastive, term, params)
            if ts >= params.theta_cutoff:
                terms[term] = ts
    return TerminologyModel(category_id, terms, params, domain.doc_count, len(contrastive))
