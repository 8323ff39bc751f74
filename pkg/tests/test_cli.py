import csv
import io
import json

import pytest

from opinion_adherence.cli import main, read_config_file, slug
from opinion_adherence.errors import ConfigurationError
from opinion_adherence.synthetic import generate_generic_corpus, generate_reviews

import oracles
from conftest import make_review, planted_category, write_reviews


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def small(tmp_path):
    """Two categories of hand-written reviews and two generic corpora."""
    reviews = [
        make_review("a1", "The battery is great, great sound", item="p1", category="Headsets", score=5),
        make_review("a2", "Battery died; refund requested", item="p1", category="Headsets", score=1),
        make_review("a3", "the sound is fine and the case is ok", item="p2", category="Headsets", score=3),
        make_review("a4", "Pairing bluetooth was easy", item="p2", category="Headsets", score=4),
        make_review("b1", None, item="h1", category="Rome", score=9.5,
                    positive="Great location near the Colosseum", negative="small room"),
        make_review("b2", None, item="h1", category="Rome", score=4.0,
                    positive="staff", negative="dirty room and noisy street"),
        make_review("b3", "The breakfast was good", item="h1", category="Rome", score=7.5),
    ]
    dom = write_reviews(tmp_path / "reviews.jsonl", reviews)
    g1 = tmp_path / "news.txt"
    g1.write_text("the market is up and the sound of the city\nit was a good day\n"
                  "the room is small\nnear the station a case was opened\n")
    g2 = tmp_path / "tweets.jsonl"
    g2.write_text("\n".join(json.dumps({"text": t}) for t in
                            ["good morning", "is it easy", "the and was", "ok ok"]) + "\n")
    return tmp_path, dom, [g1, g2], reviews


def _tokens(texts):
    return [oracles.scan_tokens(t) for t in texts]


@pytest.mark.parametrize("freq,cutoff", [(0.005, 16), (0.3, 2), (0.1, 1.5)])
def test_terms_match_oracle(small, freq, cutoff, capsys):
    tmp, dom, gen, reviews = small
    out = tmp / f"out{freq}"
    assert run(["terms", "--domain", dom, "--contrastive", *gen, "--out", out,
                "--theta-freq", freq, "--theta-cutoff", cutoff]) == 0
    generic = [_tokens(gen[0].read_text().splitlines()),
               _tokens(json.loads(line)["text"] for line in gen[1].read_text().splitlines())]
    for cat in ("Headsets", "Rome"):
        docs = _tokens(r.text for r in reviews if r.category_id == cat)
        expected = oracles.terminology(docs, generic, freq, cutoff)
        data = json.loads((out / "terminology" / f"{cat}.json").read_text())
        assert set(data["terms"]) == set(expected)
        assert data["params"] == {"theta_freq": freq, "theta_cutoff": cutoff}
        assert data["domain_doc_count"] == len(docs)
    assert "Headsets:" in capsys.readouterr().out


def test_terms_empty_domain(tmp_path):
    dom = tmp_path / "empty.jsonl"
    dom.write_text("")
    g = tmp_path / "g.txt"
    g.write_text("a b\n")
    assert run(["terms", "--domain", dom, "--contrastive", g, "--out", tmp_path / "o"]) == 0
    data = json.loads((tmp_path / "o" / "terminology" / "default.json").read_text())
    assert data["terms"] == {} and data["domain_doc_count"] == 0


def test_missing_contrastive_path(small, capsys):
    tmp, dom, gen, _ = small
    assert run(["terms", "--domain", dom, "--contrastive", tmp / "missing.txt",
                "--out", tmp / "o"]) != 0
    assert "missing.txt" in capsys.readouterr().err


def test_contrastive_required(small):
    tmp, dom, _, _ = small
    assert run(["terms", "--domain", dom, "--out", tmp / "o"]) != 0


def test_adherence_csv_matches_oracle(small):
    tmp, dom, gen, reviews = small
    out = tmp / "o"
    assert run(["adherence", "--domain", dom, "--contrastive", *gen, "--out", out,
                "--theta-freq", 0.3, "--theta-cutoff", 2]) == 0
    generic = [_tokens(gen[0].read_text().splitlines()),
               _tokens(json.loads(line)["text"] for line in gen[1].read_text().splitlines())]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["review_id", "item_id", "category_id", "segment", "score", "adherence"])
    for cat in ("Headsets", "Rome"):
        revs = [r for r in reviews if r.category_id == cat]
        terms = oracles.terminology(_tokens(r.text for r in revs), generic, 0.3, 2)
        for r in revs:
            w.writerow([r.id, r.item_id, cat, "whole", repr(float(r.score)),
                        repr(oracles.adherence(oracles.scan_tokens(r.text), terms))])
    assert (out / "adherence.csv").read_text() == buf.getvalue()


def test_adherence_empty_reviews(tmp_path):
    dom = tmp_path / "r.jsonl"
    dom.write_text("\n")
    g = tmp_path / "g.txt"
    g.write_text("x\n")
    assert run(["adherence", "--domain", dom, "--contrastive", g, "--out", tmp_path / "o"]) == 0
    assert (tmp_path / "o" / "adherence.csv").read_text() == \
        "review_id,item_id,category_id,segment,score,adherence\n"


def test_adherence_negative_segment_absent(tmp_path, capsys):
    dom = write_reviews(tmp_path / "r.jsonl", [make_review("x", "only whole text")])
    g = tmp_path / "g.txt"
    g.write_text("x\n")
    assert run(["adherence", "--domain", dom, "--contrastive", g, "--segment", "negative",
                "--out", tmp_path / "o"]) == 0
    assert len((tmp_path / "o" / "adherence.csv").read_text().splitlines()) == 1
    assert "0 scored, 1 skipped" in capsys.readouterr().out


def test_adherence_pos_vs_neg(small):
    tmp, dom, gen, _ = small
    assert run(["adherence", "--domain", dom, "--contrastive", *gen, "--segment", "pos-vs-neg",
                "--out", tmp / "o"]) == 0
    rows = list(csv.DictReader(open(tmp / "o" / "adherence.csv")))
    assert {(r["review_id"], r["segment"]) for r in rows} == {
        ("b1", "positive"), ("b2", "positive"), ("b1", "negative"), ("b2", "negative")}


@pytest.fixture
def synthetic(tmp_path):
    corpus = generate_reviews(n_reviews=1500, n_items=10, score_noise=0.5, seed=11,
                              category="Synth")
    dom = write_reviews(tmp_path / "syn.jsonl", corpus.reviews)
    gens = []
    for s in (1, 2):
        p = tmp_path / f"g{s}.txt"
        p.write_text("\n".join(generate_generic_corpus(1000, seed=s)) + "\n")
        gens.append(p)
    return tmp_path, dom, gens


def test_score_bins_refuses_without_scheme(synthetic, capsys):
    tmp, dom, gens = synthetic
    assert run(["score-bins", "--domain", dom, "--contrastive", *gens, "--out", tmp / "o"]) == 2
    assert "score-scheme" in capsys.readouterr().err


def test_balance_requires_seed(synthetic):
    tmp, dom, gens = synthetic
    assert run(["score-bins", "--domain", dom, "--contrastive", *gens, "--out", tmp / "o",
                "--score-scheme", "amazon5", "--balance"]) == 2


def test_score_bins_balanced_and_unbalanced(synthetic):
    tmp, dom, gens = synthetic
    args = ["score-bins", "--domain", dom, "--contrastive", *gens, "--score-scheme", "amazon5"]
    assert run(args + ["--out", tmp / "plain"]) == 0
    assert run(args + ["--out", tmp / "bal", "--balance", "--seed", 3]) == 0
    plain = (tmp / "plain" / "score_bins" / "Synth_whole.csv").read_text()
    assert (tmp / "bal" / "score_bins" / "Synth_whole.csv").read_text() == plain
    balanced = list(csv.DictReader(open(tmp / "bal" / "score_bins" / "Synth_whole_balanced.csv")))
    assert len(balanced) == 5
    avgs = [float(r["avg_adherence"]) for r in balanced]
    assert avgs == sorted(avgs)
    assert balanced != list(csv.DictReader(io.StringIO(plain)))
    assert run(args + ["--out", tmp / "bal2", "--balance", "--seed", 3]) == 0
    assert ((tmp / "bal2" / "score_bins" / "Synth_whole_balanced.csv").read_bytes()
            == (tmp / "bal" / "score_bins" / "Synth_whole_balanced.csv").read_bytes())


def test_score_bins_pos_vs_neg(small):
    tmp, dom, gen, _ = small
    assert run(["score-bins", "--domain", dom, "--contrastive", *gen, "--score-scheme",
                "booking5", "--segment", "pos-vs-neg", "--out", tmp / "o",
                "--theta-freq", 0.1, "--theta-cutoff", 1.5]) == 0
    files = sorted(p.name for p in (tmp / "o" / "score_bins").iterdir())
    assert "Rome_positive.csv" in files and "Rome_negative.csv" in files


def test_adh_bins(synthetic):
    tmp, dom, gens = synthetic
    # a separate tiny item that the min-rev filter must drop
    extra = tmp / "extra.jsonl"
    extra.write_text("".join(json.dumps({"id": f"x{i}", "item": "tiny", "category": "Synth",
                                         "score": 3, "text": "lex001 w0001 w0002"}) + "\n"
                             for i in range(20)))
    out = tmp / "o"
    assert run(["adh-bins", "--domain", dom, extra, "--contrastive", *gens, "--out", out,
                "--score-scheme", "amazon5", "--min-rev", 100, "--k-sweep", 3, 4, 5]) == 0
    data = json.loads((out / "adh_bins" / "Synth.json").read_text())
    rep = data["report"]
    assert rep["item_count"] == 10 and rep["pct_first_last"] == 100.0
    assert "tiny" not in {i["item_id"] for i in data["items"]}
    curve = list(csv.DictReader(open(out / "adh_bins" / "Synth_avgd.csv")))
    assert [int(r["k_bins"]) for r in curve] == [3, 4, 5]
    assert all(float(r["avgd_adh"]) > 0 for r in curve)


def test_adh_bins_without_scores(tmp_path):
    corpus = generate_reviews(n_reviews=300, n_items=3, seed=2)
    p = tmp_path / "r.jsonl"
    p.write_text("".join(json.dumps({"id": r.id, "item": r.item_id, "category": "c",
                                     "text": r.text}) + "\n" for r in corpus.reviews))
    g = tmp_path / "g.txt"
    g.write_text("\n".join(generate_generic_corpus(500)) + "\n")
    assert run(["adh-bins", "--domain", p, "--contrastive", g, "--out", tmp_path / "o"]) == 0
    rep = json.loads((tmp_path / "o" / "adh_bins" / "c.json").read_text())["report"]
    assert rep["pct_first_last"] is None and rep["avgd_score"] is None
    assert rep["avgd_adh"] > 0


def _planted_files(tmp_path):
    reviews, generic = planted_category()
    small_item = [make_review(f"s{i}", "great refund dom1", item="small", category="shop",
                              score=3) for i in range(5)]
    dom = write_reviews(tmp_path / "shop.jsonl", reviews + small_item)
    g = tmp_path / "g.txt"
    g.write_text("\n".join(generic) + "\n")
    return dom, g


def test_report_terms(tmp_path, caplog):
    dom, g = _planted_files(tmp_path)
    out = tmp_path / "o"
    assert run(["report-terms", "--domain", dom, "--contrastive", g, "--out", out]) == 0
    data = json.loads((out / "terms" / "shop.json").read_text())
    cat = data["category"]
    assert "great" in [t["term"] for t in cat["positive"]]
    assert "refund" in [t["term"] for t in cat["negative"]]
    assert cat["k_bins"] == 10 and cat["top_k"] == 20
    assert "small" not in {i["subject"] for i in data["items"]}
    assert "item small" in caplog.text
    rows = (out / "terms" / "shop.csv").read_text().splitlines()
    assert rows[0] == "side,term" and "negative,refund" in rows and "positive,great" in rows

    assert run(["report-terms", "--domain", dom, "--contrastive", g, "--out", tmp_path / "o2"]) == 0
    assert (tmp_path / "o2" / "terms" / "shop.json").read_bytes() == \
        (out / "terms" / "shop.json").read_bytes()


def test_commands_compose(tmp_path):
    dom, g = _planted_files(tmp_path)
    assert run(["terms", "--domain", dom, "--contrastive", g, "--out", tmp_path / "t"]) == 0
    assert run(["report-terms", "--domain", dom, "--terminology", tmp_path / "t" / "terminology",
                "--out", tmp_path / "reused"]) == 0
    assert run(["report-terms", "--domain", dom, "--contrastive", g, "--out",
                tmp_path / "direct"]) == 0
    assert (tmp_path / "reused" / "terms" / "shop.json").read_bytes() == \
        (tmp_path / "direct" / "terms" / "shop.json").read_bytes()


def test_idf_scope_category(tmp_path):
    dom, g = _planted_files(tmp_path)
    assert run(["report-terms", "--domain", dom, "--contrastive", g, "--idf", "category",
                "--out", tmp_path / "o"]) == 0
    cat = json.loads((tmp_path / "o" / "terms" / "shop.json").read_text())["category"]
    assert "great" in [t["term"] for t in cat["positive"]]


def test_config_file_and_flag_precedence(tmp_path, synthetic):
    tmp, dom, gens = synthetic
    cfg = tmp / "run.cfg"
    cfg.write_text(f"# defaults\ndomain = {dom}\ncontrastive = {gens[0]} {gens[1]}\n"
                   f"k-bins = 4\nmin_rev = 100\nscore_scheme = amazon5\nout = {tmp / 'cfg'}\n")
    assert run(["adh-bins", "--config", cfg, "--k-bins", 3, "--k-sweep", 3]) == 0
    rep = json.loads((tmp / "cfg" / "adh_bins" / "Synth.json").read_text())["report"]
    assert rep["k_bins"] == 3 and rep["min_rev"] == 100


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(ConfigurationError):
        read_config_file(cfg)


def test_slug():
    assert slug("Bluetooth Headsets") == "Bluetooth_Headsets"
    assert slug("../x") == ".._x"
