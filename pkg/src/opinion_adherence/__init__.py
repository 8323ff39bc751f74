"""Unsupervised, language-agnostic aggregation of online reviews by adherence
to a contrastively extracted domain terminology."""

from opinion_adherence.corpus import (
    FrequencyTable,
    LoadReport,
    Review,
    TokenizedDoc,
    build_frequency_table,
    load_generic_corpus,
    load_reviews,
    tokenize,
)
from opinion_adherence.terminology import (
    TerminologyModel,
    TerminologyParams,
    extract_terminology,
    term_frequency,
    term_strength,
)
from opinion_adherence.adherence import AdherenceRecord, compute_adherence, score_corpus
from opinion_adherence.aggregation import (
    BinSummary,
    CategoryReport,
    ItemBinAnalysis,
    analyze_item,
    assign_score_bin,
    balance_bins,
    bin_stats,
    category_report,
    first_last_check,
    monotonic_check,
    moving_average,
    segment_comparison,
    split_by_adherence,
)
from opinion_adherence.termreport import (
    DiscriminatingTerms,
    TermScore,
    bin_term_weights,
    category_discriminating_terms,
    item_discriminating_terms,
)

__version__ = "0.1.0"
