"""Grouping and validation of adherence values.

Two groupings are supported: by review score (to check that adherence carries
information about the score) and by adherence itself, splitting each item's
reviews into equal-size bins ordered from the least to the most adherent and
checking the bins' average scores against that order.
"""

from __future__ import annotations

import csv
import math
import random
from collections import defaultdict
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import IO, Iterable, Mapping, Sequence

from opinion_adherence.adherence import AdherenceRecord
from opinion_adherence.errors import (
    BalancingError,
    ConfigurationError,
    EmptyCategoryError,
    InsufficientDataError,
    InvalidScoreError,
)

BOOKING5 = "booking5"
AMAZON5 = "amazon5"
SCHEMES = (BOOKING5, AMAZON5)
BIN_LABELS = {
    BOOKING5: ("very poor", "poor", "okay", "good", "excellent"),
    AMAZON5: ("1", "2", "3", "4", "5"),
}
# Upper (inclusive) edges of the first four booking bins.
_BOOKING_EDGES = (3.0, 5.0, 7.0, 9.0)

PLOT_CSV_HEADER = ("bin_index", "avg_adherence", "std_adherence", "avg_score", "std_score")
AVGD_CSV_HEADER = ("k_bins", "avgd_adh", "avgd_score")


@dataclass(frozen=True)
class BinSummary:
    bin_index: int
    review_count: int
    avg_adherence: float
    std_adherence: float
    avg_score: float | None = None
    std_score: float | None = None
    min_adherence: float = 0.0
    max_adherence: float = 0.0


@dataclass(frozen=True)
class ItemBinAnalysis:
    item_id: str
    k_bins: int
    bins: tuple[BinSummary, ...]
    delta_adh: float
    delta_score: float | None
    first_last_ok: bool | None
    monotonic_ok: bool | None
    window: int = 2

    @property
    def review_count(self) -> int:
        return sum(b.review_count for b in self.bins)

    @property
    def avg_scores(self) -> list[float | None]:
        return [b.avg_score for b in self.bins]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bins"] = [asdict(b) for b in self.bins]
        d["review_count"] = self.review_count
        return d


@dataclass(frozen=True)
class CategoryReport:
    category_id: str
    min_rev: int
    item_count: int
    review_count: int
    pct_first_last: float | None
    pct_monotonic: float | None
    avgd_adh: float
    avgd_score: float | None
    balanced: bool = False
    seed: int | None = None
    k_bins: int = 3
    window: int = 2

    def to_dict(self) -> dict:
        return asdict(self)


# -- score bins -------------------------------------------------------------

def assign_score_bin(score: float, scheme: str) -> int:
    """Map a review score to a bin index in 1..5.

    ``booking5`` uses the intervals (.., 3], (3, 5], (5, 7], (7, 9], (9, ..)
    over the valid range [2.5, 10]; ``amazon5`` maps integer scores 1..5 to
    themselves.
    """
    if score is None or isinstance(score, bool) or not math.isfinite(score):
        raise InvalidScoreError(f"missing or invalid score {score!r}")
    if scheme == BOOKING5:
        if not 2.5 <= score <= 10.0:
            raise InvalidScoreError(f"booking score {score} outside [2.5, 10]")
        for i, edge in enumerate(_BOOKING_EDGES, 1):
            if score <= edge:
                return i
        return 5
    if scheme == AMAZON5:
        if score != int(score) or not 1 <= score <= 5:
            raise InvalidScoreError(f"amazon score {score} is not an integer in 1..5")
        return int(score)
    raise ConfigurationError(f"unknown score scheme {scheme!r}")


def group_by_score(items: Iterable, scheme: str, score=lambda x: x.score
                   ) -> tuple[dict[int, list], int]:
    """Group anything with a score into the five bins of ``scheme``.

    Returns every bin (possibly empty) and the number of inputs rejected for a
    missing or out-of-range score.
    """
    groups = {i: [] for i in range(1, 6)}
    rejected = 0
    for x in items:
        try:
            groups[assign_score_bin(score(x), scheme)].append(x)
        except InvalidScoreError:
            rejected += 1
    return groups, rejected


def balance_bins(groups: Mapping[int, Sequence], seed: int) -> dict[int, list]:
    """Undersample every bin to the size of the smallest one.

    Sampling is uniform without replacement and fully determined by ``seed``;
    selected members keep their original relative order.
    """
    for key, members in groups.items():
        if not members:
            raise BalancingError(f"cannot balance: bin {key} is empty")
    if not groups:
        return {}
    size = min(len(m) for m in groups.values())
    rng = random.Random(seed)
    out = {}
    for key in sorted(groups):
        members = groups[key]
        keep = sorted(rng.sample(range(len(members)), size))
        out[key] = [members[i] for i in keep]
    return out


# -- bin statistics ---------------------------------------------------------

def _mean_std(values):
    n = len(values)
    # Exact mean: bin averages then respect the order of their members.
    mean = float(sum(map(Fraction, values), Fraction(0)) / n)
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def summarize_bin(bin_index: int, records: Sequence[AdherenceRecord]) -> BinSummary:
    if not records:
        raise InsufficientDataError(f"bin {bin_index} is empty")
    adh = [r.adherence for r in records]
    avg_adh, std_adh = _mean_std(adh)
    scores = [r.score for r in records if r.score is not None]
    avg_score = std_score = None
    if scores:
        avg_score, std_score = _mean_std(scores)
    return BinSummary(bin_index, len(records), avg_adh, std_adh, avg_score, std_score,
                      min(adh), max(adh))


def bin_stats(bins: Mapping[int, Sequence[AdherenceRecord]] | Sequence[Sequence[AdherenceRecord]]
              ) -> list[BinSummary]:
    """Mean and population standard deviation of adherence (and score) per bin.

    ``bins`` is either a mapping from bin index to records or a sequence of
    bins numbered from 1. Empty bins are left out.
    """
    if not isinstance(bins, Mapping):
        bins = dict(enumerate(bins, 1))
    return [summarize_bin(i, bins[i]) for i in sorted(bins) if bins[i]]


def score_bin_stats(records: Sequence[AdherenceRecord], scheme: str,
                    balance: bool = False, seed: int | None = None
                    ) -> tuple[list[BinSummary], int]:
    groups, rejected = group_by_score(records, scheme)
    if balance:
        groups = balance_bins(groups, seed)
    return bin_stats(groups), rejected


def segment_comparison(records_pos: Sequence[AdherenceRecord],
                       records_neg: Sequence[AdherenceRecord],
                       scheme: str) -> tuple[list[BinSummary], list[BinSummary]]:
    """Per-score-bin statistics for positive and negative segments side by side."""
    pos, _ = group_by_score(records_pos, scheme)
    neg, _ = group_by_score(records_neg, scheme)
    return bin_stats(pos), bin_stats(neg)


# -- adherence bins ---------------------------------------------------------

def split_by_adherence(records: Sequence[AdherenceRecord], k_bins: int
                       ) -> list[list[AdherenceRecord]]:
    """Sort by adherence (ties by review id) and cut into ``k_bins`` bins of
    near-equal size; with n = q*k + r the first r bins hold q + 1 records."""
    if k_bins < 1:
        raise ConfigurationError(f"k_bins must be positive, got {k_bins}")
    n = len(records)
    if n < k_bins:
        raise InsufficientDataError(f"{n} records cannot fill {k_bins} bins")
    ordered = sorted(records, key=lambda r: (r.adherence, r.review_id))
    q, r = divmod(n, k_bins)
    bins = []
    start = 0
    for i in range(k_bins):
        size = q + 1 if i < r else q
        bins.append(ordered[start:start + size])
        start += size
    return bins


def moving_average(values: Sequence[float], window: int) -> list[float]:
    """Trailing moving average that keeps the series length.

    Element i is the mean of the last min(i + 1, window) values up to it, so
    the first element is unchanged.
    """
    if window < 1:
        raise ConfigurationError(f"window must be at least 1, got {window}")
    if not values:
        raise ValueError("moving average of an empty sequence")
    out = []
    for i in range(len(values)):
        chunk = values[max(0, i - window + 1):i + 1]
        out.append(math.fsum(chunk) / len(chunk))
    return out


def _scores_or_none(analysis):
    scores = analysis.avg_scores
    if not scores or any(s is None for s in scores):
        return None
    return scores


def first_last_check(analysis: ItemBinAnalysis) -> bool | None:
    """Whether the most adherent bin scores at least as well as the least adherent.

    ``None`` when some bin has no score, which is not the same as failing.
    """
    scores = _scores_or_none(analysis)
    if scores is None:
        return None
    return scores[-1] >= scores[0]


def monotonic_check(analysis: ItemBinAnalysis, window: int | None = None) -> bool | None:
    """Whether smoothed average scores never decrease across the bins."""
    scores = _scores_or_none(analysis)
    if scores is None:
        return None
    smooth = moving_average(scores, analysis.window if window is None else window)
    return all(b >= a for a, b in zip(smooth, smooth[1:]))


def analyze_item(records: Sequence[AdherenceRecord], k_bins: int = 3, window: int = 2,
                 item_id: str | None = None) -> ItemBinAnalysis:
    if item_id is None:
        item_id = records[0].item_id if records else ""
    bins = tuple(bin_stats(split_by_adherence(records, k_bins)))
    first, last = bins[0], bins[-1]
    delta_score = None
    if first.avg_score is not None and last.avg_score is not None:
        delta_score = last.avg_score - first.avg_score
    analysis = ItemBinAnalysis(item_id, k_bins, bins,
                               last.avg_adherence - first.avg_adherence,
                               delta_score, None, None, window)
    return replace(analysis, first_last_ok=first_last_check(analysis),
                   monotonic_ok=monotonic_check(analysis))


def group_by_item(records: Iterable[AdherenceRecord]) -> dict[str, list[AdherenceRecord]]:
    groups = defaultdict(list)
    for r in records:
        groups[r.item_id].append(r)
    return dict(groups)


def category_report(items: Sequence[ItemBinAnalysis], min_rev: int = 0,
                    category_id: str = "", balanced: bool = False,
                    seed: int | None = None) -> CategoryReport:
    """Share of items passing each check and mean first-to-last differences.

    Items with fewer than ``min_rev`` reviews are left out. Percentages are
    taken over the remaining items whose bins all carry scores and are
    ``None`` when there are none.
    """
    kept = [a for a in items if a.review_count >= min_rev]
    if not kept:
        raise EmptyCategoryError(
            f"category {category_id!r}: no item with at least {min_rev} reviews")

    def pct(flags):
        flags = [f for f in flags if f is not None]
        return 100.0 * sum(flags) / len(flags) if flags else None

    deltas = [a.delta_score for a in kept if a.delta_score is not None]
    return CategoryReport(
        category_id=category_id,
        min_rev=min_rev,
        item_count=len(kept),
        review_count=sum(a.review_count for a in kept),
        pct_first_last=pct(a.first_last_ok for a in kept),
        pct_monotonic=pct(a.monotonic_ok for a in kept),
        avgd_adh=math.fsum(a.delta_adh for a in kept) / len(kept),
        avgd_score=math.fsum(deltas) / len(deltas) if deltas else None,
        balanced=balanced,
        seed=seed,
        k_bins=kept[0].k_bins,
        window=kept[0].window,
    )


def analyze_category(records: Iterable[AdherenceRecord], k_bins: int = 3, window: int = 2,
                     min_rev: int = 0, category_id: str = "", balanced: bool = False,
                     seed: int | None = None
                     ) -> tuple[list[ItemBinAnalysis], CategoryReport]:
    """Bin every item with enough reviews and summarize the category."""
    items = []
    for item_id, recs in sorted(group_by_item(records).items()):
        if len(recs) < max(k_bins, min_rev):
            continue
        items.append(analyze_item(recs, k_bins, window, item_id))
    return items, category_report(items, min_rev, category_id, balanced, seed)


@dataclass(frozen=True)
class AvgDPoint:
    k_bins: int
    avgd_adh: float
    avgd_score: float | None
    item_count: int = 0


def avgd_curve(records: Sequence[AdherenceRecord], k_values: Iterable[int],
               min_rev: int = 0, window: int = 2) -> list[AvgDPoint]:
    """Category-wide mean first-to-last differences for several bin counts."""
    points = []
    for k in k_values:
        _, rep = analyze_category(records, k, window, min_rev)
        points.append(AvgDPoint(k, rep.avgd_adh, rep.avgd_score, rep.item_count))
    return points


# -- output -----------------------------------------------------------------

def _cell(v):
    return "" if v is None else repr(v)


def write_plot_csv(summaries: Iterable[BinSummary], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(PLOT_CSV_HEADER)
    for s in summaries:
        w.writerow((s.bin_index, _cell(s.avg_adherence), _cell(s.std_adherence),
                    _cell(s.avg_score), _cell(s.std_score)))


def write_avgd_csv(points: Iterable[AvgDPoint], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(AVGD_CSV_HEADER)
    for p in points:
        w.writerow((p.k_bins, _cell(p.avgd_adh), _cell(p.avgd_score)))
