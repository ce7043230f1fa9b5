from latinkit.conllu import parse_conllu
from latinkit.lemmatizer import train_lemmatizer
from latinkit.pipeline import annotate_text, annotate_treebank, enclitic_flags, lemma_training_pairs
from latinkit.tagger import FrequencyTagger

from synth import make_treebank

SPACE_AFTER = (
    "1\tarma\tarma\tNOUN\t_\t_\t0\troot\t_\t_\n"
    "2\tuirum\tuir\tNOUN\t_\t_\t1\tconj\t_\tSpaceAfter=No\n"
    "3\tque\tque\tCCONJ\t_\t_\t2\tcc\t_\t_\n"
    "4\tque\tqui\tPRON\t_\t_\t1\tdep\t_\t_\n\n"
)
MWT = (
    "1-2\tuirumque\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "1\tuirum\tuir\tNOUN\t_\t_\t0\troot\t_\t_\n"
    "2\tque\tque\tCCONJ\t_\t_\t1\tcc\t_\t_\n\n"
)


def test_enclitic_flags():
    assert enclitic_flags(parse_conllu(SPACE_AFTER).sentences[0]) == [False, False, True, False]
    assert enclitic_flags(parse_conllu(MWT).sentences[0]) == [False, True]


def test_training_pairs_skip_missing_lemmas():
    tb = parse_conllu("1\tIovis\t_\tPROPN\t_\t_\t0\troot\t_\t_\n2\tVrbs\turbs\tNOUN\t_\t_\t1\tdep\t_\t_\n\n")
    assert lemma_training_pairs(tb) == [("Vrbs", "urbs", "NOUN", "urbs")]


def test_fixer_applied_after_lemmatizer():
    tagger = FrequencyTagger().fit(["arma", "uirum", "cano", ","],
                                   [("NOUN", "_", "_"), ("NOUN", "_", "_"), ("VERB", "_", "_"), ("PUNCT", "_", "_")])
    # a lemmatizer that maps every "que" to "qui" and every comma to "x"
    lem = train_lemmatizer([("que", "que", "CCONJ", "qui"), (",", ",", "PUNCT", "x")] * 2)
    tb = annotate_text("arma uirumque cano, arma.", tagger, lem)
    (sent,) = tb.sentences
    rows = [(w.form, w.upos, w.lemma, w.misc) for w in sent.words]
    assert rows[1:4] == [("uirum", "NOUN", "uirum", "SpaceAfter=No"), ("que", "CCONJ", "que", "_"),
                         ("cano", "VERB", "cano", "SpaceAfter=No")]
    assert rows[4][:3] == (",", "PUNCT", ",")
    assert sent.text == "arma uirumque cano, arma."


def test_annotate_text_segments():
    tagger = FrequencyTagger().fit(["a"], [("NOUN", "_", "_")])
    tb = annotate_text("Perseus dormit. Danae timet.", tagger, name="doc")
    assert [s.sent_id for s in tb.sentences] == ["doc-1", "doc-2"]
    assert [s.text for s in tb.sentences] == ["Perseus dormit.", "Danae timet."]


def test_annotate_treebank_keeps_tokenization():
    gold = make_treebank("ittb", "dev", 10, seed=1)
    tagger = FrequencyTagger().fit([w.form.lower() for _, w in gold.words()],
                                   [(w.upos, w.xpos, w.feats_str) for _, w in gold.words()])
    pred = annotate_treebank(gold, tagger)
    assert [len(s.words) for s in pred.sentences] == [len(s.words) for s in gold.sentences]
    assert all(w.head is None for _, w in pred.words())
    kept = annotate_treebank(gold, None, None, keep_syntax=True)
    assert [(w.head, w.upos, w.lemma) for _, w in kept.words()] == [(w.head, w.upos, w.lemma)
                                                                     for _, w in gold.words()]
    # split-off que in gold is tagged as the conjunction
    for (_, g), (_, p) in zip(gold.words(), pred.words()):
        if g.form == "que":
            assert p.upos == "CCONJ"
