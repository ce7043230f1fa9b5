"""Run the tagger, lemmatizer and lemma fixer over treebanks or raw text."""
from __future__ import annotations

from dataclasses import replace

from .conllu import SentenceRecord, TokenRecord, Treebank, parse_misc
from .lemmatizer import EditTreeLemmatizer, fix_lemma
from .tagger import FrequencyTagger, TaggedToken
from .text import QueExceptionList, SurfaceToken, normalize_orthography, segment_sentences, tokenize


def enclitic_flags(sentence: SentenceRecord) -> list[bool]:
    """Mark word lines that are a split-off ``que``.

    Evidence is ``SpaceAfter=No`` on the preceding word, or a multiword token
    covering both words.
    """
    words = sentence.words
    owner = {}
    for t in sentence.tokens:
        if t.is_multiword:
            for i in range(t.mwt_range[0], t.mwt_range[1] + 1):
                owner[i] = t.mwt_range
    flags = []
    for i, w in enumerate(words):
        flag = False
        if w.form.lower() == "que" and i > 0:
            prev = words[i - 1]
            same_mwt = w.id in owner and owner.get(prev.id) == owner[w.id]
            flag = same_mwt or parse_misc(prev.misc).get("SpaceAfter") == "No"
        flags.append(flag)
    return flags


def lemma_training_pairs(tb: Treebank, normalize_ij: bool = False) -> list[tuple[str, str, str, str]]:
    """``(form, norm, upos, lemma)`` for every word with a real lemma."""
    pairs = []
    for _, tok in tb.words():
        if tok.lemma in ("", "_") or not tok.form:
            continue
        pairs.append((tok.form, normalize_orthography(tok.form, normalize_ij), tok.upos, tok.lemma))
    return pairs


def annotate_tokens(tokens: list[SurfaceToken], tagger: FrequencyTagger,
                    lemmatizer: EditTreeLemmatizer | None) -> list[TaggedToken]:
    tagged = tagger.tag(tokens)
    out = []
    for t in tagged:
        lemma = lemmatizer.lemmatize(t.surface, t.norm, t.upos) if lemmatizer is not None else t.norm
        out.append(fix_lemma(replace(t, lemma=lemma)))
    return out


def annotate_treebank(tb: Treebank, tagger: FrequencyTagger | None = None,
                      lemmatizer: EditTreeLemmatizer | None = None,
                      normalize_ij: bool = False, keep_syntax: bool = False) -> Treebank:
    """Predict tags and/or lemmas on the gold tokenization of ``tb``.

    Components left as ``None`` keep the input's columns. Heads and relations
    are cleared unless ``keep_syntax``.
    """
    sentences = []
    for sent in tb.sentences:
        words = sent.words
        flags = enclitic_flags(sent)
        surface = [SurfaceToken(w.form, -1, -1, normalize_orthography(w.form, normalize_ij), f)
                   for w, f in zip(words, flags)]
        if tagger is not None:
            tagged = tagger.tag(surface)
        else:
            tagged = [TaggedToken(s.surface, s.norm, w.upos, w.xpos, w.feats, w.lemma, s.is_enclitic_part)
                      for s, w in zip(surface, words)]
        new_words = []
        for w, t in zip(words, tagged):
            if lemmatizer is not None:
                t = fix_lemma(replace(t, lemma=lemmatizer.lemmatize(t.surface, t.norm, t.upos)))
            new = replace(w, upos=t.upos, xpos=t.xpos, feats=t.feats, lemma=t.lemma)
            if not keep_syntax:
                new = replace(new, head=None, deprel=None)
            new_words.append(new)
        sentences.append(sent.with_words(new_words))
    return Treebank(name=tb.name, split=tb.split, sentences=sentences)


def annotate_text(text: str, tagger: FrequencyTagger, lemmatizer: EditTreeLemmatizer | None = None,
                  exceptions: QueExceptionList | None = None, normalize_ij: bool = False,
                  name: str = "text") -> Treebank:
    """Segment, tokenize, tag and lemmatize plain text into a CoNLL-U treebank."""
    sentences = []
    for n, (a, b) in enumerate(segment_sentences(text), start=1):
        chunk = text[a:b]
        tokens = tokenize(chunk, exceptions, normalize_ij)
        tagged = annotate_tokens(tokens, tagger, lemmatizer)
        records = []
        for i, (tok, tt) in enumerate(zip(tokens, tagged), start=1):
            glued = i < len(tokens) and tokens[i].start == tok.end
            records.append(TokenRecord(id=i, form=tok.surface, lemma=tt.lemma, upos=tt.upos,
                                       xpos=tt.xpos, feats=tt.feats,
                                       misc="SpaceAfter=No" if glued else "_"))
        sent_id = f"{name}-{n}"
        sentences.append(SentenceRecord(sent_id=sent_id, tokens=tuple(records),
                                        comments=(f"# sent_id = {sent_id}", f"# text = {chunk}"),
                                        text=chunk))
    return Treebank(name=name, split="unsplit", sentences=sentences)
