import json

import numpy as np
import pytest

from conftest import string_levenshtein
from lenient_cer import fixtures
from lenient_cer.builder import StageConfig
from lenient_cer.errors import EmptyReference, NoValidRecords
from lenient_cer.evaluate import (
    UtteranceRecord,
    bootstrap_ci,
    corpus_evaluate,
    lenient_eval,
    naive_cer,
    naive_wer,
    parse_metric,
    prepare_text,
    read_corpus,
    staged_metric_names,
)

FULL = StageConfig(kana=True, kanji=True, lexicon=True)
U = UtteranceRecord


def test_naive_cer_examples():
    s = naive_cer("だめ", "ダメ")
    assert (s.distance, s.substitutions, s.rate) == (2, 2, 1.0)
    assert naive_cer("だめ", "だめ").rate == 0.0
    s = naive_cer("がんばれ", "頑張れ")
    assert s.distance == string_levenshtein("がんばれ", "頑張れ") == 3
    assert s.denom == 4 and s.rate == 0.75
    s = naive_cer("頑張れ", "がんばれ")
    assert s.distance == string_levenshtein("頑張れ", "がんばれ") == 3
    assert s.rate == 1.0
    with pytest.raises(EmptyReference):
        naive_cer("", "x")


def test_naive_wer_examples(readings):
    assert naive_wer("この拉麺はうまい。", "この拉麺はうまい。", readings).rate == 0.0
    s = naive_wer("この拉麺はうまい。", "この拉麺は旨い。", readings)
    assert (s.distance, s.substitutions, s.denom, s.rate) == (1, 1, 5, 0.2)
    s = naive_wer("日本", "", readings)
    assert (s.distance, s.deletions, s.rate) == (1, 1, 1.0)
    with pytest.raises(EmptyReference):
        naive_wer("", "x", readings)


def test_lenient_eval_false_error_pairs(resources):
    s = lenient_eval(U("a", "みなさんごきげんよう", "皆さんご機嫌よう"), StageConfig(kana=True, kanji=True), resources)
    assert s.distance == 0 and s.rate == 0.0
    s = lenient_eval(U("b", "いなばのちゅーるかな", "イナバのチュールかな"), StageConfig(kana=True), resources)
    assert s.rate == 0.0
    # The large-ユ spelling is still an error: no small-kana normalization.
    s = lenient_eval(U("c", "いなばのちゅーるかな", "イナバのチユールかな"), StageConfig(kana=True), resources)
    assert s.distance == 1


def test_raw_equals_naive_on_mini_corpus(resources):
    for rec in fixtures.mini_corpus():
        raw = lenient_eval(rec, StageConfig(), resources)
        naive = naive_cer(rec.reference, rec.hypothesis)
        assert (raw.distance, raw.denom, raw.rate) == (naive.distance, naive.denom, naive.rate)


def test_dominance_per_record_on_mini_corpus(resources):
    for rec in fixtures.mini_corpus():
        rates = [lenient_eval(rec, c, resources).rate for c in FULL.cumulative()]
        distances = [lenient_eval(rec, c, resources).distance for c in FULL.cumulative()]
        assert rates == sorted(rates, reverse=True)
        assert distances == sorted(distances, reverse=True)
        assert rates[-1] <= naive_cer(rec.reference, rec.hypothesis).rate


def test_parse_metric():
    assert parse_metric("cer", FULL) == ("cer", None)
    assert parse_metric("lenient", FULL) == ("lenient", FULL)
    assert parse_metric("lenient:raw", FULL)[1] == StageConfig()
    assert parse_metric("lenient:kana+kanji", FULL)[1] == StageConfig(kana=True, kanji=True)
    assert staged_metric_names(FULL)[0] == "lenient:raw"
    with pytest.raises(ValueError):
        parse_metric("bleu", FULL)


def test_single_perfect_record():
    rep = corpus_evaluate([U("1", "だめ", "だめ")], ["cer", "lenient"], StageConfig(), bootstrap=100)
    for m in rep.corpus.values():
        assert m.rate == 0.0 and m.ci95 == (0.0, 0.0)


def test_identical_utterances_degenerate_interval():
    recs = [U(str(i), "だめです", "ダメです") for i in range(20)]
    rep = corpus_evaluate(recs, ["cer"], StageConfig(), bootstrap=200)
    m = rep.corpus["cer"]
    assert m.rate == 0.5 and m.ci95 == (0.5, 0.5)


def test_report_arithmetic_and_interval_contains_rate(resources):
    rep = corpus_evaluate(fixtures.mini_corpus(), ["wer", "cer"] + staged_metric_names(FULL), FULL, resources)
    data = json.loads(rep.to_json())
    for name, block in data["corpus"].items():
        utts = [u["metrics"][name] for u in data["utterances"]]
        assert block["errors"]["total"] == sum(u["distance"] for u in utts)
        assert block["errors"]["total"] == block["errors"]["sub"] + block["errors"]["ins"] + block["errors"]["del"]
        assert block["denom"] == sum(u["denom"] for u in utts)
        assert block["rate"] == block["errors"]["total"] / block["denom"]
        lo, hi = block["ci95"]
        assert lo <= block["rate"] <= hi
    assert data["corpus"]["lenient:raw"]["rate"] == data["corpus"]["cer"]["rate"]


def test_json_is_reproducible(resources):
    recs = fixtures.mini_corpus()
    a = corpus_evaluate(recs, ["cer", "lenient"], FULL, resources, seed=3).to_json()
    b = corpus_evaluate(recs, ["cer", "lenient"], FULL, fixtures.resources(), seed=3).to_json()
    c = corpus_evaluate(recs, ["cer", "lenient"], FULL, resources, seed=4).to_json()
    assert a == b
    assert a != c


def test_parallel_matches_serial(resources):
    recs = fixtures.mini_corpus()
    serial = corpus_evaluate(recs, ["wer", "cer", "lenient"], FULL, resources, jobs=1)
    parallel = corpus_evaluate(recs, ["wer", "cer", "lenient"], FULL, resources, jobs=2)
    assert serial.to_json() == parallel.to_json()
    assert serial.to_tsv() == parallel.to_tsv()


def test_rejected_records():
    recs = [U("a", "だめ", "だめ"), U("a", "だめ", "x"), U("b", "", "x"), U("c", "。", "")]
    rep = corpus_evaluate(recs, ["cer"], StageConfig(), bootstrap=100, strip_punct=True)
    assert [u.id for u in rep.utterances] == ["a"]
    assert rep.metadata["records"]["rejected"] == [
        {"id": "a", "reason": "duplicate id"},
        {"id": "b", "reason": "empty reference"},
        {"id": "c", "reason": "empty reference"},
    ]
    with pytest.raises(NoValidRecords):
        corpus_evaluate([U("b", "", "x")], ["cer"], StageConfig(), bootstrap=100)


def test_empty_hypothesis_is_all_deletions():
    rep = corpus_evaluate([U("a", "だめ", "")], ["cer", "lenient"], StageConfig(), bootstrap=100)
    for m in rep.corpus.values():
        assert m.deletions == 2 and m.rate == 1.0


def test_bootstrap_minimum():
    with pytest.raises(ValueError):
        corpus_evaluate([U("a", "x", "x")], ["cer"], bootstrap=99)


def test_prepare_text():
    assert prepare_text("ｱｲ", "NFKC") == "アイ"
    assert prepare_text("ｱｲ", "NFC") == "ｱｲ"
    assert prepare_text("この拉麺は、うまい。 ", strip_punct=True) == "この拉麺はうまい"


def test_strip_punct_changes_denominator():
    rec = [U("a", "この拉麺はうまい。", "この拉麺はうまい")]
    with_p = corpus_evaluate(rec, ["cer"], StageConfig(), bootstrap=100)
    without = corpus_evaluate(rec, ["cer"], StageConfig(), bootstrap=100, strip_punct=True)
    assert with_p.corpus["cer"].denom == 9 and with_p.corpus["cer"].errors == 1
    assert without.corpus["cer"].denom == 8 and without.corpus["cer"].errors == 0


def test_tsv_layout(resources):
    rep = corpus_evaluate(fixtures.mini_corpus()[:2], ["cer", "lenient"], FULL, resources, bootstrap=100)
    lines = rep.to_tsv().splitlines()
    assert lines[0].split("\t")[:3] == ["id", "metric", "distance"]
    assert len(lines) == 1 + 2 * 2 + 2
    assert lines[-1].startswith("*corpus*\tlenient\t")


def test_dump_lattice(tmp_path, resources):
    from lenient_cer.lattice import Lattice

    recs = [U("utt/1", "この拉麺はうまい。", "この拉麺は美味い。")]
    corpus_evaluate(recs, ["lenient"], FULL, resources, bootstrap=100, dump_dir=str(tmp_path))
    (path,) = tmp_path.iterdir()
    assert path.name == "utt_1.lat"
    lat = Lattice.from_text(path.read_text(encoding="utf-8"))
    assert len(list(lat.paths())) == 12


def test_read_corpus():
    recs = read_corpus(iter(["# c\n", "a\tだめ\tダメ\n", "b\tだめ\n", "\n"]))
    assert recs == [U("a", "だめ", "ダメ"), U("b", "だめ", "")]


def _simulate(n_utts, rng):
    lengths = rng.integers(5, 26, size=n_utts)
    errors = rng.binomial(lengths, 0.1)
    return errors, lengths


def test_interval_width_shrinks_with_corpus_size():
    rng = np.random.default_rng(1)
    widths = {100: [], 1000: []}
    for n in widths:
        for _ in range(30):
            e, d = _simulate(n, rng)
            lo, hi = bootstrap_ci(e, d, 300, rng)
            widths[n].append(hi - lo)
    assert np.median(widths[1000]) < np.median(widths[100])


def test_bootstrap_seeded():
    e, d = _simulate(50, np.random.default_rng(0))
    a = bootstrap_ci(e, d, 200, np.random.default_rng(5))
    b = bootstrap_ci(e, d, 200, np.random.default_rng(5))
    assert a == b
