"""Synthetic review corpora with a planted domain lexicon.

Every review mixes words from a Zipf-distributed generic vocabulary with words
from a planted lexicon; the share of lexicon words grows linearly with the
review's true score bin. Generic corpora draw from the generic vocabulary only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from opinion_adherence.corpus import Review

DEFAULT_BIN_SHARES = (0.08, 0.08, 0.12, 0.24, 0.48)


@dataclass
class SyntheticCorpus:
    reviews: list[Review]
    lexicon: list[str]
    true_bins: dict[str, int]


def lexicon_words(n: int) -> list[str]:
    return [f"lex{i:03d}" for i in range(n)]


def generic_words(n: int) -> list[str]:
    return [f"w{i:04d}" for i in range(n)]


def _zipf(n):
    p = 1.0 / np.arange(1, n + 1)
    return p / p.sum()


def _bin_counts(n, shares):
    shares = np.asarray(shares, dtype=float)
    counts = np.floor(n * shares / shares.sum()).astype(int)
    counts[-1] += n - counts.sum()
    return counts


def generate_reviews(n_reviews: int = 5000, n_items: int = 50, bin_shares=DEFAULT_BIN_SHARES,
                     lexicon_size: int = 100, share_low: float = 0.05, share_high: float = 0.30,
                     tokens_per_review: int = 40, vocab_size: int = 2000,
                     score_noise: float = 0.0, seed: int = 0,
                     category: str = "synthetic") -> SyntheticCorpus:
    """Reviews in five score bins whose lexicon share rises from
    ``share_low`` (bin 1) to ``share_high`` (bin 5).

    ``score_noise`` is the standard deviation, in bins, of Gaussian noise
    added to the reported score (rounded and clipped to 1..5); the text
    always follows the true bin. Items are assigned round-robin after a
    shuffle, so each gets ``n_reviews // n_items`` reviews or one more.
    """
    rng = np.random.default_rng(seed)
    lexicon = np.array(lexicon_words(lexicon_size))
    vocab = np.array(generic_words(vocab_size))
    pz = _zipf(vocab_size)

    true_bin = np.repeat(np.arange(1, 6), _bin_counts(n_reviews, bin_shares))
    rng.shuffle(true_bin)
    shares = share_low + (true_bin - 1) * (share_high - share_low) / 4.0

    from_lex = rng.random((n_reviews, tokens_per_review)) < shares[:, None]
    lex_tok = lexicon[rng.integers(0, lexicon_size, (n_reviews, tokens_per_review))]
    gen_tok = vocab[rng.choice(vocab_size, (n_reviews, tokens_per_review), p=pz)]
    tokens = np.where(from_lex, lex_tok, gen_tok)

    scores = true_bin.astype(float)
    if score_noise > 0:
        scores = np.clip(np.rint(scores + rng.normal(0.0, score_noise, n_reviews)), 1, 5)

    reviews = []
    true_bins = {}
    for i in range(n_reviews):
        rid = f"r{i:06d}"
        reviews.append(Review(rid, f"item{i % n_items:03d}", category,
                              {"whole": " ".join(tokens[i])}, float(scores[i])))
        true_bins[rid] = int(true_bin[i])
    return SyntheticCorpus(reviews, list(lexicon), true_bins)


def generate_generic_corpus(n_docs: int = 2000, tokens_per_doc: int = 40,
                            vocab_size: int = 2000, seed: int = 1) -> list[str]:
    rng = np.random.default_rng(seed)
    vocab = np.array(generic_words(vocab_size))
    tokens = vocab[rng.choice(vocab_size, (n_docs, tokens_per_doc), p=_zipf(vocab_size))]
    return [" ".join(row) for row in tokens]
