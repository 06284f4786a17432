import io
import math
import random
import sys
import textwrap
from collections import Counter

import pytest

from lenient_cer import fixtures
from lenient_cer.errors import EmptyCorpus
from lenient_cer.kana import ReadingDictionary
from lenient_cer.restorer import (
    Candidate,
    ExternalRestorer,
    NgramModel,
    NgramRestorer,
    RestorationRequest,
    restore,
    serialize_tagged,
    train_ngram,
)

R = RestorationRequest


@pytest.mark.parametrize(
    "req, wire",
    [
        (R("再び、MTサミットが", "にほん", "で"), "再び、MTサミットが<to_kanji>にほん</to_kanji>で"),
        (R("", "て", ""), "<to_kanji>て</to_kanji>"),
        (R("この拉麺は", "うまい", "。"), "この拉麺は<to_kanji>うまい</to_kanji>。"),
    ],
)
def test_serialize_tagged(req, wire):
    assert serialize_tagged(req) == wire


def test_train_tiny():
    m = train_ngram(["ああ"], order=2)
    assert m.counts == {("<s>", "あ"): 1, ("あ", "あ"): 1, ("あ", "</s>"): 1}
    assert m.total == 3


def test_duplicate_lines_double_counts():
    lines = ["この拉麺は旨い。", "日本で"]
    once = train_ngram(lines)
    twice = train_ngram(lines + lines)
    assert {g: 2 * c for g, c in once.counts.items()} == twice.counts


def test_empty_corpus():
    with pytest.raises(EmptyCorpus):
        train_ngram(["", "  "])
    with pytest.raises(ValueError):
        train_ngram(["a"], order=0)


def _independent_counts(lines, order):
    counts = Counter()
    for line in lines:
        line = line.strip()
        if not line:
            continue
        padded = ["<s>"] * (order - 1) + list(line) + ["</s>"]
        counts.update(zip(*(padded[k:] for k in range(order))))
    return counts


def test_toy_corpus_counts_match_independent_count():
    lines = fixtures.toy_corpus()
    assert len(lines) == 1000
    model = train_ngram(lines, 3)
    assert model.counts == dict(_independent_counts(lines, 3))
    # One prediction per character plus the end symbol.
    assert model.total == sum(len(l.strip()) + 1 for l in lines if l.strip())


def test_model_tsv_round_trip(model):
    buf = io.StringIO()
    model.write(buf)
    buf.seek(0)
    again = NgramModel.read(buf)
    assert again.order == model.order and again.counts == model.counts


def test_model_tsv_escapes_space():
    m = train_ngram(["a b"], order=2)
    buf = io.StringIO()
    m.write(buf)
    assert "a <sp>\t1" in buf.getvalue()
    buf.seek(0)
    assert NgramModel.read(buf).counts == m.counts


def test_score_formula_by_hand():
    m = train_ngram(["ab", "ac"], order=2)
    # vocab {a, b, c, </s>} plus one unknown slot
    v = 5
    p_b_after_a = (1 + 0.1) / (2 + 0.1 * v)
    p_end_after_b = (1 + 0.1) / (1 + 0.1 * v)
    assert m.score_in_context("a", "b", "") == pytest.approx(-math.log(p_b_after_a) - math.log(p_end_after_b))


def test_nihon_restored(readings, model):
    cands = restore(R("再び、MTサミットが", "にほん", "で"), readings, model)
    assert "日本" in [c.surface for c in cands]


def test_particle_has_only_identity(readings, model):
    cands = restore(R("再び、MTサミットが日本", "で", ""), readings, model)
    assert [c.surface for c in cands] == ["で"]


def test_umai_food_context(readings, model):
    cands = restore(R("この拉麺は", "うまい", "。"), readings, model)
    surfaces = [c.surface for c in cands]
    assert surfaces[0] == "旨い"
    # 上手い (skilful) is out of the margin in a food context.
    assert "上手い" not in surfaces


def test_umai_ranking_matches_counts(readings, model):
    def by_hand(surface):
        symbols = ["拉", "麺", "は"][-2:] + list(surface) + ["。", "</s>"]
        total = 0.0
        for t in range(2, len(symbols)):
            h = tuple(symbols[t - 2 : t])
            num = model.counts.get(h + (symbols[t],), 0) + 0.1
            den = sum(c for g, c in model.counts.items() if g[:2] == h) + 0.1 * model.vocab_size
            total -= math.log(num / den)
        return total

    cands = restore(R("この拉麺は", "うまい", "。"), readings, model, max_candidates=10, margin=100)
    for c in cands:
        assert c.score == pytest.approx(by_hand(c.surface))
    assert [c.surface for c in cands] == sorted((c.surface for c in cands), key=by_hand)


def test_skill_context_prefers_jouzu(readings, model):
    cands = restore(R("彼女は絵が", "うまい", ""), readings, model)
    assert cands[0].surface == "上手い"


def test_empty_dictionary_identity_only(model):
    cands = restore(R("この", "ねこ", ""), ReadingDictionary(), model)
    assert cands == [cands[0]] and cands[0].surface == "ねこ"


def test_candidates_closed_and_deterministic(readings, model):
    rng = random.Random(3)
    kana_tokens = ["うまい", "にほん", "がんばれ", "やわらかい", "だめ", "ねこ", "かわいい", "みなさん", "ほう"]
    for _ in range(100):
        tok = rng.choice(kana_tokens)
        req = R(rng.choice(["", "この", "彼は歌が", "今日は"]), tok, rng.choice(["", "。", "です"]))
        cands = restore(req, readings, model)
        assert cands == restore(req, readings, model)
        for c in cands:
            assert c.surface == tok or tok in [r for r, _ in readings.readings(c.surface)]
            assert math.isfinite(c.score)
        assert [(c.score, c.surface) for c in cands] == sorted((c.score, c.surface) for c in cands)


def test_margin_and_cap_monotone(readings, model):
    req = R("この拉麺は", "うまい", "。")
    prev = set()
    for margin in [0, 0.5, 1, 2, 5, 20]:
        for cap in [1, 2, 3, 4]:
            got = {c.surface for c in restore(req, readings, model, cap, margin)}
            assert len(got) <= cap
    for cap in [1, 2, 3, 4, 5]:
        got = {c.surface for c in restore(req, readings, model, cap, 50)}
        assert prev <= got
        prev = got
    prev = set()
    for margin in [0, 0.5, 1, 2, 5, 20]:
        got = {c.surface for c in restore(req, readings, model, 10, margin)}
        assert prev <= got
        prev = got


def test_invalid_parameters(readings, model):
    with pytest.raises(ValueError):
        restore(R("", "うまい", ""), readings, model, max_candidates=0)
    with pytest.raises(ValueError):
        restore(R("", "うまい", ""), readings, model, margin=-1)


def test_candidate_validation():
    with pytest.raises(ValueError):
        Candidate("", 1.0)
    with pytest.raises(ValueError):
        Candidate("x", math.inf)


def test_ngram_restorer_cache_is_transparent(readings, model):
    r = NgramRestorer(readings, model)
    req = R("この拉麺は", "うまい", "。")
    assert r.propose(req) == restore(req, readings, model)
    longer = R("ところでこの拉麺は", "うまい", "。です")
    assert r.propose(longer) == restore(longer, readings, model)


PLUGIN = textwrap.dedent(
    """
    import sys
    for line in sys.stdin:
        line = line.rstrip("\\n")
        token = line.split("<to_kanji>")[1].split("</to_kanji>")[0]
        print(token + "\\t1.0")
        if token == "がんばれ":
            print("頑張れ\\t0.5")
            print("顔晴れ\\t9.0")
        print(flush=True)
    """
)


def test_external_restorer_protocol(tmp_path):
    script = tmp_path / "plugin.py"
    script.write_text(PLUGIN, encoding="utf-8")
    r = ExternalRestorer([sys.executable, str(script)])
    try:
        got = r.propose(R("", "がんばれ", "！"), 4, 2.0)
        assert got == [Candidate("頑張れ", 0.5), Candidate("がんばれ", 1.0)]
        assert r.propose(R("", "て", ""), 4, 2.0) == [Candidate("て", 1.0)]
    finally:
        r.close()
