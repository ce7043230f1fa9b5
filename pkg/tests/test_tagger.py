import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latinkit.conllu import SentenceRecord, TokenRecord, Treebank
from latinkit.tagger import FrequencyTagger, tag, train_tagger
from latinkit.text import tokenize

NOUN_ACC = ("NOUN", "_", "Case=Acc|Gender=Fem|Number=Sing")
VERB_3SG = ("VERB", "_", "Mood=Ind|Number=Sing|Person=3")


def test_one_token_treebank():
    tb = Treebank("t", "train", [SentenceRecord("1", (
        TokenRecord(1, "Aquam", "aqua", "NOUN", "_", (("Case", "Acc"),), 0, "root"),))])
    m = train_tagger(tb)
    assert m.lookup("aquam") == ("NOUN", "_", "Case=Acc")


def test_empty_treebank_is_an_error():
    with pytest.raises(ValueError, match="empty"):
        train_tagger(Treebank("t", "train"))


def test_equal_counts_break_lexicographically():
    m = FrequencyTagger().fit(["cum", "cum"], [("SCONJ", "_", "_"), ("ADP", "_", "_")])
    assert m.lookup("cum") == ("ADP", "_", "_")
    m = FrequencyTagger().fit(["cum"] * 3, [("SCONJ", "_", "_")] * 2 + [("ADP", "_", "_")])
    assert m.lookup("cum") == ("SCONJ", "_", "_")


def test_suffix_fallback_chain():
    m = FrequencyTagger().fit(["aquam", "amat", "amat", "rosas"], [NOUN_ACC, VERB_3SG, VERB_3SG,
                                                                  ("NOUN", "_", "Case=Acc|Number=Plur")])
    assert m.lookup("puellam") == NOUN_ACC          # "lam" unseen, "am" seen
    assert m.lookup("laudat") == VERB_3SG           # "mat" unseen, "at" seen
    assert m.lookup("curas") == ("NOUN", "_", "Case=Acc|Number=Plur")
    assert m.lookup("xyz") == VERB_3SG              # global majority


def test_three_suffix_preferred_over_shorter():
    m = FrequencyTagger().fit(["rosam", "rosam", "donum", "templum", "bellum"],
                              [NOUN_ACC, NOUN_ACC] + [("NOUN", "_", "Case=Acc|Gender=Neut")] * 3)
    assert m.lookup("nouam") == NOUN_ACC  # "uam" unseen, "am" seen twice
    assert m.lookup("serum") == ("NOUN", "_", "Case=Acc|Gender=Neut")


def test_enclitic_que_is_cconj():
    m = FrequencyTagger().fit(["que", "que", "et"], [("PRON", "_", "_")] * 2 + [("CCONJ", "C-", "_")])
    toks = tokenize("arma uirumque que")
    out = m.tag(toks)
    assert [t.upos for t in out] == ["PRON", "PRON", "CCONJ", "PRON"]
    assert out[2].xpos == "C-" and out[2].is_enclitic_part
    bare = FrequencyTagger().fit(["a"], [("NOUN", "_", "_")])
    assert bare.enclitic_triple() == ("CCONJ", "_", "_")


def test_tag_keeps_offsets_and_feats():
    m = FrequencyTagger().fit(["aquam"], [NOUN_ACC])
    (t,) = tag(m, tokenize("  Aquam"))
    assert (t.start, t.end, t.surface, t.norm) == (2, 7, "Aquam", "aquam")
    assert t.feats == (("Case", "Acc"), ("Gender", "Fem"), ("Number", "Sing"))


def test_partial_fit_and_serialization(tmp_path):
    m = FrequencyTagger().fit(["amat"], [VERB_3SG])
    m.partial_fit(["amat", "amat"], [NOUN_ACC, NOUN_ACC])
    assert m.lookup("amat") == NOUN_ACC
    m.save(tmp_path / "t.json")
    back = FrequencyTagger.load(tmp_path / "t.json")
    assert back.to_dict() == m.to_dict()
    assert back.predict(["amat", "zz", "at"]) == m.predict(["amat", "zz", "at"])
    with pytest.raises(ValueError, match="not a tagger"):
        FrequencyTagger.from_dict({"format": "latinkit.edit-tree-lemmatizer"})


def test_custom_suffix_lengths():
    m = FrequencyTagger(suffix_lengths=(2,)).fit(["amat"], [VERB_3SG])
    assert m.get_params() == {"suffix_lengths": (2,)}
    assert m.lookup("mat") == VERB_3SG
    assert m.to_dict()["params"] == {"suffix_lengths": [2]}


_norm = st.text(alphabet="aemnorstu", min_size=1, max_size=7)
_triple = st.tuples(st.sampled_from(["NOUN", "VERB", "ADJ"]), st.sampled_from(["_", "x"]),
                    st.sampled_from(["_", "Case=Nom", "Case=Acc"]))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(_norm, _triple), min_size=1, max_size=30), st.lists(_norm, max_size=10))
def test_total_and_deterministic(data, queries):
    X = [n for n, _ in data]
    y = [t for _, t in data]
    m = FrequencyTagger().fit(X, y)
    again = FrequencyTagger().fit(X, y)
    for q in queries + X:
        out = m.lookup(q)
        assert out[0] and out == again.lookup(q)
    # a known norm gets its majority triple
    for norm in set(X):
        seen = [t for n, t in data if n == norm]
        best = min(set(seen), key=lambda t: (-seen.count(t), t))
        assert m.lookup(norm) == best
