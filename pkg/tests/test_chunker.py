from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latinkit.chunker import noun_chunks
from latinkit.conllu import SentenceRecord, TokenRecord, read_conllu
from latinkit.text import normalize_orthography

GOLD = Path(__file__).parent / "fixtures" / "ritchie-gold.conllu"
EXPECTED = {"maximi deorum", "auus eius", "nepotem suum", "arca lignea", "arcam ipsam", "magna mare",
            "sinu matris", "persei mater"}


def gold_chunks(**kw):
    tb = read_conllu(GOLD)
    return [c for s in tb.sentences for c in noun_chunks(s, **kw)]


def test_paragraph_multiword_chunks():
    multi = {normalize_orthography(c.text) for c in gold_chunks() if len(c) >= 2}
    assert multi == EXPECTED


def test_paragraph_flat_and_contiguous():
    for s in read_conllu(GOLD).sentences:
        seen = set()
        for c in noun_chunks(s):
            ids = c.token_indices
            assert list(ids) == list(range(ids[0], ids[-1] + 1))
            assert not seen & set(ids)
            seen |= set(ids)


def tok(i, form, upos, head, deprel):
    return TokenRecord(i, form, form.lower(), upos, "_", (), head, deprel)


def test_appos_is_not_absorbed():
    s = read_conllu(GOLD).sentences[5]
    texts = [c.text for c in noun_chunks(s)]
    assert "Danae" in texts and "Persei mater" in texts


def test_allowed_deprels_are_configurable():
    s = read_conllu(GOLD).sentences[2]
    assert "nepotem suum" in [c.text for c in noun_chunks(s)]
    texts = [c.text for c in noun_chunks(s, allowed_deprels={"det", "amod", "nmod", "appos"})]
    assert "Perseum nepotem suum" in texts and "nepotem suum" not in texts
    # across a comma the apposition is trimmed away and stays a chunk of its own
    s = read_conllu(GOLD).sentences[5]
    texts = [c.text for c in noun_chunks(s, allowed_deprels={"det", "amod", "nmod", "appos"})]
    assert "Danae" in texts and "Persei mater" in texts


def test_subtyped_relations_match_on_base_label():
    s = SentenceRecord("x", (tok(1, "liber", "NOUN", 0, "root"), tok(2, "Marci", "PROPN", 1, "nmod:poss")))
    assert [c.text for c in noun_chunks(s)] == ["liber Marci"]


def test_discontinuous_dependent_is_trimmed():
    # hyperbaton: "magnam ... urbem" with a verb in between
    s = SentenceRecord("x", (tok(1, "magnam", "ADJ", 3, "amod"), tok(2, "uidit", "VERB", 0, "root"),
                             tok(3, "urbem", "NOUN", 2, "obj")))
    assert [c.text for c in noun_chunks(s)] == ["urbem"]


def test_pronoun_heads_toggle():
    s = read_conllu(GOLD).sentences[0]
    assert "Haec" in [c.text for c in noun_chunks(s)]
    assert "Haec" not in [c.text for c in noun_chunks(s, include_pron=False)]


def test_missing_annotation_is_an_error():
    s = SentenceRecord("bad", (TokenRecord(1, "rosa", "rosa", "NOUN", "_", (), None, None),))
    with pytest.raises(ValueError, match="bad"):
        noun_chunks(s)


def test_empty_sentence():
    assert noun_chunks(SentenceRecord("e", ())) == []


_UPOS = ["NOUN", "PROPN", "PRON", "ADJ", "DET", "VERB", "ADP"]
_REL = ["det", "amod", "nmod", "nmod:poss", "nummod", "obj", "nsubj", "appos", "case", "obl"]


@st.composite
def trees(draw):
    n = draw(st.integers(1, 12))
    root = draw(st.integers(1, n))
    order = [root] + draw(st.permutations([i for i in range(1, n + 1) if i != root]))
    heads = {root: 0}
    for k, node in enumerate(order[1:], start=1):
        heads[node] = order[draw(st.integers(0, k - 1))]
    toks = tuple(tok(i, f"w{i}", draw(st.sampled_from(_UPOS)), heads[i],
                     "root" if heads[i] == 0 else draw(st.sampled_from(_REL))) for i in range(1, n + 1))
    return SentenceRecord("p", toks)


@settings(max_examples=300, deadline=None)
@given(trees(), st.booleans())
def test_chunks_are_flat_contiguous_and_ordered(sent, pron):
    chunks = noun_chunks(sent, include_pron=pron)
    by_id = {w.id: w for w in sent.words}
    used = set()
    for c in chunks:
        ids = c.token_indices
        assert list(ids) == list(range(ids[0], ids[-1] + 1))
        assert c.head_index in ids
        assert not used & set(ids)
        used |= set(ids)
        # every member reaches the head without leaving the chunk
        for t in ids:
            while t != c.head_index:
                t = by_id[t].head
                assert t in ids
    assert [c.start for c in chunks] == sorted(c.start for c in chunks)
