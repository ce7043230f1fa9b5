"""Pipeline metrics: tag/lemma/morph accuracy, UAS/LAS, segmentation F, NER span F.

All token-level scores assume gold and predicted treebanks share the gold
tokenization. Scores over zero items are 1.0.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .conllu import Treebank, format_feats, sort_feats
from .ner import LABELS, NerExample
from .validation import check_aligned

REPORT_FORMAT = "latinkit.eval-report/1"
FIELDS = ("upos", "xpos", "feats", "lemma")

TABLE_ROWS = (
    ("sentence segmentation f-score", "sentence_seg_f"),
    ("tagger accuracy (XPOS)", "xpos_acc"),
    ("tagger accuracy (UPOS)", "upos_acc"),
    ("morphologizer accuracy", "morph_acc"),
    ("trainable_lemmatizer accuracy", "lemma_acc"),
    ("parser accuracy (UAS)", "uas"),
    ("parser accuracy (LAS)", "las"),
    ("ner f-score", "ner_f"),
)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 1.0


def _pairs(gold: Treebank, pred: Treebank):
    check_aligned(gold, pred)
    for g, p in zip(gold.sentences, pred.sentences):
        yield from zip(g.words, p.words)


def _value(tok, name: str) -> str:
    if name == "feats":
        return format_feats(sort_feats(tok.feats))
    return getattr(tok, name)


def token_accuracy(gold: Treebank, pred: Treebank, field: str) -> float:
    if field not in FIELDS:
        raise ValueError(f"field must be one of {FIELDS}")
    hits = total = 0
    for g, p in _pairs(gold, pred):
        total += 1
        hits += _value(g, field) == _value(p, field)
    return _ratio(hits, total)


def attachment_scores(gold: Treebank, pred: Treebank, include_punct: bool = True) -> tuple[float, float]:
    """``(uas, las)``; with ``include_punct=False`` gold PUNCT tokens are skipped."""
    total = head_ok = label_ok = 0
    for g, p in _pairs(gold, pred):
        if not include_punct and g.upos == "PUNCT":
            continue
        total += 1
        if g.head == p.head and g.head is not None:
            head_ok += 1
            if g.deprel == p.deprel:
                label_ok += 1
    return _ratio(head_ok, total), _ratio(label_ok, total)


def per_deprel_f1(gold: Treebank, pred: Treebank) -> dict[str, float]:
    """Labeled-attachment F-score per relation label."""
    n_gold: Counter = Counter()
    n_pred: Counter = Counter()
    correct: Counter = Counter()
    for g, p in _pairs(gold, pred):
        if g.deprel is not None:
            n_gold[g.deprel] += 1
        if p.deprel is not None:
            n_pred[p.deprel] += 1
        if g.deprel is not None and g.head == p.head and g.deprel == p.deprel:
            correct[g.deprel] += 1
    out = {}
    for rel in sorted(set(n_gold) | set(n_pred)):
        out[rel] = prf(correct[rel], n_pred[rel], n_gold[rel])[2]
    return out


def per_feature_accuracy(gold: Treebank, pred: Treebank) -> dict[str, float]:
    hits: Counter = Counter()
    total: Counter = Counter()
    for g, p in _pairs(gold, pred):
        pf = p.feats_dict
        for name, value in g.feats:
            total[name] += 1
            hits[name] += pf.get(name) == value
    return {name: hits[name] / total[name] for name in sorted(total)}


def prf(tp: int, n_pred: int, n_gold: int) -> tuple[float, float, float]:
    """Precision, recall, F1 with the empty-set conventions used throughout.

    Both sides empty scores 1.0; a zero denominator facing a nonempty other
    side scores 0.0.
    """
    if n_pred == 0 and n_gold == 0:
        return 1.0, 1.0, 1.0
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def _check_spans(spans: Sequence[tuple[int, int]], text_length: int | None, what: str) -> None:
    for a, b in spans:
        if a < 0 or b <= a or (text_length is not None and b > text_length):
            raise ValueError(f"{what} span ({a}, {b}) out of bounds")


def sentence_seg_prf(gold_spans, pred_spans, text_length: int | None = None) -> tuple[float, float, float]:
    gold_spans = [tuple(s) for s in gold_spans]
    pred_spans = [tuple(s) for s in pred_spans]
    _check_spans(gold_spans, text_length, "gold")
    _check_spans(pred_spans, text_length, "pred")
    tp = len(set(gold_spans) & set(pred_spans))
    return prf(tp, len(set(pred_spans)), len(set(gold_spans)))


def sentence_seg_f1(gold_spans, pred_spans, text_length: int | None = None) -> float:
    """Exact-span F1: a predicted sentence counts only if both ends match."""
    return sentence_seg_prf(gold_spans, pred_spans, text_length)[2]


def treebank_sentence_spans(tb: Treebank) -> tuple[str, list[tuple[int, int]]]:
    """Space-join every word form into one document and return sentence spans in it."""
    parts, spans = [], []
    offset = 0
    for sent in tb.sentences:
        text = " ".join(w.form for w in sent.words)
        spans.append((offset, offset + len(text)))
        parts.append(text)
        offset += len(text) + 1
    return " ".join(parts), spans


@dataclass
class SpanScores:
    per_label: dict[str, tuple[float, float, float]]
    micro: tuple[float, float, float]


def span_f1(gold: Sequence[NerExample], pred: Sequence[NerExample],
            labels: Iterable[str] = LABELS) -> SpanScores:
    """Exact (start, end, label) matching, per label and micro-averaged."""
    if len(gold) != len(pred):
        raise ValueError(f"gold has {len(gold)} examples, pred has {len(pred)}")
    tp: Counter = Counter()
    n_gold: Counter = Counter()
    n_pred: Counter = Counter()
    for i, (g, p) in enumerate(zip(gold, pred)):
        if g.text != p.text:
            raise ValueError(f"example {i}: gold and pred texts differ")
        gs = {(s.start, s.end, s.label) for s in g.spans}
        ps = {(s.start, s.end, s.label) for s in p.spans}
        for s in gs:
            n_gold[s[2]] += 1
        for s in ps:
            n_pred[s[2]] += 1
        for s in gs & ps:
            tp[s[2]] += 1
    labels = list(labels) + sorted((set(n_gold) | set(n_pred)) - set(labels))
    per_label = {lab: prf(tp[lab], n_pred[lab], n_gold[lab]) for lab in labels}
    micro = prf(sum(tp.values()), sum(n_pred.values()), sum(n_gold.values()))
    return SpanScores(per_label, micro)


@dataclass
class EvalReport:
    sentence_seg_f: float | None = None
    xpos_acc: float | None = None
    upos_acc: float | None = None
    morph_acc: float | None = None
    lemma_acc: float | None = None
    uas: float | None = None
    las: float | None = None
    ner_f: float | None = None
    ner_p: float | None = None
    ner_r: float | None = None
    ner_per_label: dict[str, dict[str, float]] = field(default_factory=dict)
    per_feature_acc: dict[str, float] = field(default_factory=dict)
    per_deprel_f: dict[str, float] = field(default_factory=dict)
    n_sentences: int = 0
    n_tokens: int = 0
    punct_in_attachment: bool = True

    def scores(self) -> dict[str, float]:
        return {key: getattr(self, key) for _, key in TABLE_ROWS if getattr(self, key) is not None}

    def to_dict(self) -> dict:
        data = asdict(self)
        data["format"] = REPORT_FORMAT
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        punct = "included" if self.punct_in_attachment else "excluded"
        lines = [f"# sentences={self.n_sentences} tokens={self.n_tokens} punctuation in UAS/LAS: {punct}",
                 f"{'Type':<32}score"]
        for label, key in TABLE_ROWS:
            value = getattr(self, key)
            lines.append(f"{label:<32}{'n/a' if value is None else f'{value:.3f}'}")
        return "\n".join(lines) + "\n"


def _has_heads(tb: Treebank) -> bool:
    return any(w.head is not None for _, w in tb.words())


def evaluate(gold: Treebank, pred: Treebank, gold_ner: Sequence[NerExample] | None = None,
             pred_ner: Sequence[NerExample] | None = None, include_punct: bool = True,
             pred_seg_spans: Sequence[tuple[int, int]] | None = None) -> EvalReport:
    """Score ``pred`` against ``gold``.

    Segmentation is scored over the space-joined gold word forms: by default
    the predicted sentences are pred's own sentence boundaries, or the spans
    passed as ``pred_seg_spans``.
    """
    check_aligned(gold, pred)
    report = EvalReport(n_sentences=len(gold.sentences), n_tokens=gold.n_words,
                        punct_in_attachment=include_punct)
    doc, gold_spans = treebank_sentence_spans(gold)
    if pred_seg_spans is None:
        pred_doc, pred_seg_spans = treebank_sentence_spans(pred)
        if pred_doc != doc:
            raise ValueError("gold and pred word forms differ; cannot score segmentation")
    report.sentence_seg_f = sentence_seg_f1(gold_spans, pred_seg_spans, len(doc))
    report.upos_acc = token_accuracy(gold, pred, "upos")
    report.xpos_acc = token_accuracy(gold, pred, "xpos")
    report.morph_acc = token_accuracy(gold, pred, "feats")
    report.lemma_acc = token_accuracy(gold, pred, "lemma")
    report.per_feature_acc = per_feature_accuracy(gold, pred)
    if _has_heads(gold) and _has_heads(pred):
        report.uas, report.las = attachment_scores(gold, pred, include_punct)
        report.per_deprel_f = per_deprel_f1(gold, pred)
    if gold_ner is not None and pred_ner is not None:
        scores = span_f1(gold_ner, pred_ner)
        report.ner_p, report.ner_r, report.ner_f = scores.micro
        report.ner_per_label = {lab: {"p": p, "r": r, "f": f} for lab, (p, r, f) in scores.per_label.items()}
    return report
