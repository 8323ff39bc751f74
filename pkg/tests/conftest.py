import json
import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from opinion_adherence.corpus import Review  # noqa: E402

_criteria = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion a test covers")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _titles[m.args[0]] = m.args[1]
            item.user_properties.append(("criterion", m.args[0]))


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        crit = dict(report.user_properties).get("criterion")
        if crit is not None:
            _criteria[crit].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"[{status}] criterion {n}: {_titles.get(n, '')}")


def write_reviews(path, reviews):
    with open(path, "w", encoding="utf-8") as fh:
        for r in reviews:
            rec = {"id": r.id, "item": r.item_id, "category": r.category_id, "score": r.score}
            if "positive" in r.segments or "negative" in r.segments:
                rec["pos_text"] = r.segments.get("positive", "")
                rec["neg_text"] = r.segments.get("negative", "")
            else:
                rec["text"] = r.text
            fh.write(json.dumps(rec) + "\n")
    return path


def make_review(rid, text, item="i1", category="c1", score=None, **segments):
    segs = {"whole": text} if text is not None else {}
    segs.update(segments)
    return Review(rid, item, category, segs, score)


def planted_category(n_items=4, per_item=20, category="shop"):
    """Reviews whose adherence rises with their index inside each item.

    The two most adherent reviews of every item mention "great", the two
    least adherent mention "refund"; filler words also fill the generic corpus.
    """
    reviews = []
    for j in range(n_items):
        for i in range(per_item):
            words = [f"dom{(i + k) % 30}" for k in range(i)]
            words += [f"fill{(i * 7 + k) % 50}" for k in range(per_item - i)]
            if i >= per_item - 2:
                words.append("great")
            if i < 2:
                words.append("refund")
            score = 1 + (5 * i) // per_item
            reviews.append(Review(f"{category}-{j}-{i:02d}", f"item{j}", category,
                                  {"whole": " ".join(words)}, float(score)))
    generic = [" ".join(f"fill{(d * 3 + k) % 50}" for k in range(12)) for d in range(200)]
    return reviews, generic
