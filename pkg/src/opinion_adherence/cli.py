"""Command line interface.

    opinion-adherence terms       --domain R.jsonl --contrastive G1.txt G2.txt --out OUT
    opinion-adherence adherence   ... --segment whole|positive|negative|pos-vs-neg
    opinion-adherence score-bins  ... --score-scheme amazon5 [--balance --seed 1]
    opinion-adherence adh-bins    ... --k-bins 3 --window 2 --min-rev 100
    opinion-adherence report-terms ... --k-bins 10 --top-k 20

Options may also come from a ``key = value`` file given with ``--config``;
flags on the command line take precedence.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from opinion_adherence import aggregation, termreport
from opinion_adherence.adherence import write_adherence_csv
from opinion_adherence.aggregation import AMAZON5, BOOKING5
from opinion_adherence.corpus import (
    NEGATIVE,
    POSITIVE,
    WHOLE,
    build_frequency_table,
    generic_frequency_table,
    load_reviews,
    review_docs,
)
from opinion_adherence.errors import ConfigurationError, EmptyCategoryError, OpinionAdherenceError
from opinion_adherence.pipeline import (
    balance_reviews,
    build_terminology,
    docs_by_id,
    group_by_category,
    score_categories,
)
from opinion_adherence.terminology import (
    DEFAULT_THETA_CUTOFF,
    DEFAULT_THETA_FREQ,
    TerminologyModel,
    TerminologyParams,
    extract_terminology,
    term_frequency,
)

log = logging.getLogger("opinion_adherence")

POS_VS_NEG = "pos-vs-neg"
SCORE_SCHEMES = (BOOKING5, AMAZON5, "none")
SEGMENT_CHOICES = (WHOLE, POSITIVE, NEGATIVE, POS_VS_NEG)


@dataclass
class RunConfig:
    domain_corpus_paths: list[str]
    output_dir: str
    contrastive_corpus_paths: list[str] = field(default_factory=list)
    terminology_path: str | None = None
    theta_freq: float = DEFAULT_THETA_FREQ
    theta_cutoff: float = DEFAULT_THETA_CUTOFF
    k_bins: int = 3
    k_sweep: list[int] = field(default_factory=list)
    window: int = 2
    min_rev: int = 0
    balance: bool = False
    seed: int | None = None
    score_scheme: str = "none"
    segment: str = WHOLE
    top_k: int = termreport.DEFAULT_TOP_K
    idf_scope: str = "item"
    default_category: str | None = None

    def __post_init__(self):
        if not self.domain_corpus_paths:
            raise ConfigurationError("at least one --domain corpus is required")
        if not self.contrastive_corpus_paths and not self.terminology_path:
            raise ConfigurationError("at least one --contrastive corpus is required")
        if self.k_bins < 2:
            raise ConfigurationError("--k-bins must be at least 2")
        if self.window < 1:
            raise ConfigurationError("--window must be at least 1")
        if self.balance and self.seed is None:
            raise ConfigurationError("--balance requires --seed")
        if self.balance and self.score_scheme == "none":
            raise ConfigurationError("--balance requires a --score-scheme")
        if self.score_scheme not in SCORE_SCHEMES:
            raise ConfigurationError(f"unknown score scheme {self.score_scheme!r}")
        if self.segment not in SEGMENT_CHOICES:
            raise ConfigurationError(f"unknown segment {self.segment!r}")

    @property
    def params(self) -> TerminologyParams:
        return TerminologyParams(self.theta_freq, self.theta_cutoff)

    @property
    def segments(self) -> list[str]:
        return [POSITIVE, NEGATIVE] if self.segment == POS_VS_NEG else [self.segment]


def slug(name: str) -> str:
    return re.sub(r"[^\w.-]+", "_", name, flags=re.ASCII).strip("_") or "_"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


class Run:
    """Loaded inputs for one command, with terminologies built on demand."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.out = Path(config.output_dir)
        self.failed = False
        reviews = []
        for path in config.domain_corpus_paths:
            loaded, report = load_reviews(path, default_category=config.default_category)
            log.info(report.summary())
            reviews.extend(loaded)
        self.reviews = reviews
        self.by_category = group_by_category(reviews)
        self._contrastive = None
        self._loaded_models = None
        if config.terminology_path:
            self._loaded_models = load_terminologies(config.terminology_path)

    @property
    def contrastive(self):
        if self._contrastive is None:
            tables = []
            for path in self.config.contrastive_corpus_paths:
                table, report = generic_frequency_table(path)
                log.info(report.summary())
                tables.append(table)
            self._contrastive = tables
        return self._contrastive

    def categories(self) -> dict:
        """Reviews per category, balanced by score bin when requested."""
        if not self.config.balance:
            return self.by_category
        out = {}
        for cat, reviews in self.by_category.items():
            try:
                kept, rejected = balance_reviews(reviews, self.config.score_scheme,
                                                 self.config.seed)
            except OpinionAdherenceError as exc:
                log.error("category %s: %s", cat, exc)
                self.failed = True
                continue
            if rejected:
                log.warning("category %s: %d reviews without a usable score", cat, rejected)
            out[cat] = kept
        return out

    def model(self, category: str, reviews) -> TerminologyModel:
        if self._loaded_models is not None and not self.config.balance:
            try:
                return self._loaded_models[category]
            except KeyError:
                raise ConfigurationError(f"no terminology for category {category!r}") from None
        return build_terminology(reviews, self.contrastive, self.config.params, category)

    def models(self, by_category) -> dict:
        return {cat: self.model(cat, revs) for cat, revs in by_category.items()}


def load_terminologies(path) -> dict[str, TerminologyModel]:
    path = Path(path)
    files = sorted(path.glob("*.json")) if path.is_dir() else [path]
    models = {}
    for f in files:
        m = TerminologyModel.from_json(f.read_text(encoding="utf-8"))
        models[m.category_id] = m
    return models


# -- commands ---------------------------------------------------------------

def cmd_terms(run: Run) -> None:
    cfg = run.config
    by_cat = run.categories()
    if not by_cat and not run.failed:
        by_cat = {cfg.default_category or "default": []}
    for cat, reviews in by_cat.items():
        domain = build_frequency_table(review_docs(reviews, WHOLE))
        model = extract_terminology(domain, run.contrastive, cfg.params, cat)
        frequent = sum(1 for t in domain.df if term_frequency(domain, t) >= cfg.theta_freq)
        _write(run.out / "terminology" / f"{slug(cat)}.json", model.to_json())
        print(f"{cat}: {len(domain)} candidates, {frequent} frequent, {len(model)} kept")


def cmd_adherence(run: Run) -> None:
    cfg = run.config
    by_cat = run.categories()
    models = run.models(by_cat)
    records = []
    for segment in cfg.segments:
        scored, skipped = score_categories(by_cat, models, segment)
        for cat in scored:
            records.extend(scored[cat])
        print(f"{segment}: {sum(len(v) for v in scored.values())} scored, {skipped} skipped")
    run.out.mkdir(parents=True, exist_ok=True)
    with open(run.out / "adherence.csv", "w", encoding="utf-8", newline="") as fh:
        write_adherence_csv(records, fh)


def _plot_csv(path, summaries):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        aggregation.write_plot_csv(summaries, fh)


def _score_bin_pass(run: Run, by_cat, suffix: str) -> None:
    cfg = run.config
    models = run.models(by_cat)
    for segment in cfg.segments:
        scored, _ = score_categories(by_cat, models, segment)
        for cat, records in scored.items():
            summaries, rejected = aggregation.score_bin_stats(records, cfg.score_scheme)
            if rejected:
                log.warning("category %s: %d records without a usable score", cat, rejected)
            _plot_csv(run.out / "score_bins" / f"{slug(cat)}_{segment}{suffix}.csv", summaries)
            means = " ".join(f"{s.bin_index}:{s.avg_adherence:.4f}" for s in summaries)
            print(f"{cat} {segment}{suffix}: {means}")


def cmd_score_bins(run: Run) -> None:
    cfg = run.config
    if cfg.score_scheme == "none":
        raise ConfigurationError("score-bins needs --score-scheme booking5 or amazon5")
    if cfg.balance:
        # The unbalanced pass comes first; the balanced pass rebuilds terminologies.
        cfg.balance = False
        _score_bin_pass(run, run.categories(), "")
        cfg.balance = True
        _score_bin_pass(run, run.categories(), "_balanced")
    else:
        _score_bin_pass(run, run.categories(), "")


def _k_sweep(cfg):
    return cfg.k_sweep or list(range(2, 11))


def cmd_adh_bins(run: Run) -> None:
    cfg = run.config
    by_cat = run.categories()
    models = run.models(by_cat)
    segment = cfg.segments[0]
    scored, _ = score_categories(by_cat, models, segment)
    for cat, records in scored.items():
        try:
            items, report = aggregation.analyze_category(
                records, cfg.k_bins, cfg.window, cfg.min_rev, cat, cfg.balance, cfg.seed)
        except EmptyCategoryError as exc:
            log.warning("%s", exc)
            continue
        curve = []
        for k in _k_sweep(cfg):
            try:
                curve.extend(aggregation.avgd_curve(records, [k], cfg.min_rev, cfg.window))
            except EmptyCategoryError:
                log.info("category %s: no item fills %d bins", cat, k)
        base = run.out / "adh_bins" / slug(cat)
        _write(base.with_suffix(".json"), _dump_json(
            {"report": report.to_dict(), "items": [a.to_dict() for a in items]}))
        base.parent.mkdir(parents=True, exist_ok=True)
        with open(f"{base}_avgd.csv", "w", encoding="utf-8", newline="") as fh:
            aggregation.write_avgd_csv(curve, fh)
        print(f"{cat}: {report.item_count} items, {report.review_count} reviews, "
              f"first-last {_pct(report.pct_first_last)}, monotonic {_pct(report.pct_monotonic)}, "
              f"AvgD adh {report.avgd_adh:.4f}")


def _pct(v):
    return "n/a" if v is None else f"{v:.1f}%"


def cmd_report_terms(run: Run) -> None:
    cfg = run.config
    k_bins = cfg.k_bins
    by_cat = run.categories()
    models = run.models(by_cat)
    scored, _ = score_categories(by_cat, models, WHOLE)
    for cat, records in scored.items():
        docs = docs_by_id(by_cat[cat])
        idf = None
        if cfg.idf_scope == "category":
            idf = build_frequency_table(docs[r.review_id] for r in records)
        items = []
        for item_id, recs in sorted(aggregation.group_by_item(records).items()):
            if len(recs) < max(k_bins, cfg.min_rev):
                log.warning("item %s: %d reviews, skipped (needs %d)", item_id, len(recs),
                            max(k_bins, cfg.min_rev))
                continue
            items.append(termreport.item_discriminating_terms(
                recs, docs, models[cat], k_bins, cfg.top_k, idf, item_id))
        if not items:
            log.warning("category %s: no item with enough reviews", cat)
            continue
        summary = termreport.category_discriminating_terms(items, cat, cfg.top_k)
        base = run.out / "terms" / slug(cat)
        _write(base.with_suffix(".json"), _dump_json(
            {"category": summary.to_dict(), "items": [i.to_dict() for i in items]}))
        with open(base.with_suffix(".csv"), "w", encoding="utf-8", newline="") as fh:
            summary.write_csv(fh)
        print(f"{cat}: negative {', '.join(t.term for t in summary.negative)}")
        print(f"{cat}: positive {', '.join(t.term for t in summary.positive)}")


COMMANDS = {
    "terms": cmd_terms,
    "adherence": cmd_adherence,
    "score-bins": cmd_score_bins,
    "adh-bins": cmd_adh_bins,
    "report-terms": cmd_report_terms,
}


# -- argument handling ------------------------------------------------------

def _shared_parser():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key = value file with default options")
    p.add_argument("--domain", nargs="+", metavar="PATH", help="review JSONL files")
    p.add_argument("--contrastive", nargs="+", metavar="PATH",
                   help="generic corpora, one document per line (.jsonl: 'text' field)")
    p.add_argument("--terminology", metavar="PATH",
                   help="reuse terminology JSON (file or directory) instead of extracting")
    p.add_argument("--category", help="category for records that lack one")
    p.add_argument("--theta-freq", type=float)
    p.add_argument("--theta-cutoff", type=float)
    p.add_argument("--k-bins", type=int)
    p.add_argument("--k-sweep", type=int, nargs="+", metavar="K",
                   help="bin counts for the AvgD curve (default 2..10)")
    p.add_argument("--window", type=int)
    p.add_argument("--min-rev", type=int)
    p.add_argument("--balance", action="store_true", default=None)
    p.add_argument("--seed", type=int)
    p.add_argument("--score-scheme", choices=SCORE_SCHEMES)
    p.add_argument("--segment", choices=SEGMENT_CHOICES)
    p.add_argument("--top-k", type=int)
    p.add_argument("--idf", choices=("item", "category"), dest="idf_scope")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opinion-adherence",
        description="Group reviews from worse to better opinions by terminology adherence.")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _shared_parser()
    for name in COMMANDS:
        sub.add_parser(name, parents=[shared])
    return parser


# config-file key -> (RunConfig field, converter)
_CONFIG_KEYS = {
    "domain": ("domain_corpus_paths", str.split),
    "contrastive": ("contrastive_corpus_paths", str.split),
    "terminology": ("terminology_path", str),
    "category": ("default_category", str),
    "theta_freq": ("theta_freq", float),
    "theta_cutoff": ("theta_cutoff", float),
    "k_bins": ("k_bins", int),
    "k_sweep": ("k_sweep", lambda s: [int(x) for x in s.replace(",", " ").split()]),
    "window": ("window", int),
    "min_rev": ("min_rev", int),
    "balance": ("balance", lambda s: s.strip().lower() in ("1", "true", "yes", "on")),
    "seed": ("seed", int),
    "score_scheme": ("score_scheme", str),
    "segment": ("segment", str),
    "top_k": ("top_k", int),
    "idf": ("idf_scope", str),
    "out": ("output_dir", str),
}

_ARG_FIELDS = {
    "domain": "domain_corpus_paths", "contrastive": "contrastive_corpus_paths",
    "terminology": "terminology_path", "category": "default_category",
    "theta_freq": "theta_freq", "theta_cutoff": "theta_cutoff", "k_bins": "k_bins",
    "k_sweep": "k_sweep", "window": "window", "min_rev": "min_rev", "balance": "balance",
    "seed": "seed", "score_scheme": "score_scheme", "segment": "segment", "top_k": "top_k",
    "idf_scope": "idf_scope", "out": "output_dir",
}


def read_config_file(path) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in _CONFIG_KEYS:
                raise ConfigurationError(f"{path}:{n}: unrecognized setting {line!r}")
            name, conv = _CONFIG_KEYS[key]
            values[name] = conv(value.strip())
    return values


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for arg, name in _ARG_FIELDS.items():
        v = getattr(args, arg)
        if v is not None:
            values[name] = v
    if "k_bins" not in values and args.command == "report-terms":
        values["k_bins"] = termreport.DEFAULT_K_BINS
    values.setdefault("domain_corpus_paths", [])
    if "output_dir" not in values:
        raise ConfigurationError("--out is required")
    return RunConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        config = config_from_args(args)
        for path in config.domain_corpus_paths + config.contrastive_corpus_paths:
            if not os.path.exists(path):
                raise FileNotFoundError(f"no such file: {path}")
        run = Run(config)
        COMMANDS[args.command](run)
    except (ConfigurationError, OpinionAdherenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigurationError) else 1
    return 1 if run.failed else 0


if __name__ == "__main__":
    sys.exit(main())
