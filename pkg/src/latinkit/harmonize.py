"""Merge the Latin UD treebanks into one consistently annotated corpus.

Per sentence the steps run in a fixed order: lemma u/v + i/j normalization,
UDante ``nos``/``uos`` relemmatization, removal of sentences with a split
``nec``/``neque``, and UPOS/XPOS/FEATS remapping.
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from fnmatch import fnmatchcase
from importlib import resources
from pathlib import Path
from typing import Iterable

import yaml
from sklearn.base import BaseEstimator, TransformerMixin

from .conllu import SPLITS, UPOS_TAGS, SentenceRecord, TokenRecord, Treebank, sort_feats

TREEBANK_ORDER = ("perseus", "proiel", "ittb", "udante", "llct")
REPORT_FORMAT = "latinkit.harmonization-report/1"

NOMINAL_FEATURES = frozenset({"Gender", "Number", "Case"})
VERBAL_FEATURES = frozenset({"Person", "Number", "Tense", "Mood", "Voice"})

_LEMMA_MAP = str.maketrans("vVjJ", "uUiI")

PLURAL_PRONOUNS = {
    "ego": ("nos", frozenset({"nos", "nobis", "nostri", "nostrum"})),
    "tu": ("uos", frozenset({"uos", "uobis", "uestri", "uestrum"})),
}

SPLIT_NEGATIONS = (frozenset({"ne", "c"}), frozenset({"ne", "que"}))


class TagMapError(ValueError):
    pass


@dataclass
class TagMapConfig:
    """Declarative remapping tables; see ``data/tagmap.yaml`` for the schema."""

    upos_map: list[tuple[str, str, str | None, str]] = field(default_factory=list)
    xpos_map: list[tuple[str, str, str]] = field(default_factory=list)
    xpos_feature_rules: list[tuple[str, str, str, str]] = field(default_factory=list)
    xpos_from_upos: dict[str, str] = field(default_factory=dict)
    feature_retention: dict[str, frozenset[str]] = field(default_factory=dict)
    feature_value_map: dict[tuple[str, str], str] = field(default_factory=dict)
    fall_through: bool = True

    def __post_init__(self):
        for tb, upos, xpos, target in self.upos_map:
            if target not in UPOS_TAGS:
                raise TagMapError(f"upos rule ({tb}, {upos}, {xpos}) targets non-universal tag {target!r}")
        for upos in ("NOUN", "ADJ", "DET", "PRON"):
            extra = self.feature_retention.get(upos, NOMINAL_FEATURES) - NOMINAL_FEATURES
            if extra:
                raise TagMapError(f"{upos} may only retain {sorted(NOMINAL_FEATURES)}, not {sorted(extra)}")
        extra = self.feature_retention.get("VERB", VERBAL_FEATURES) - VERBAL_FEATURES
        if extra:
            raise TagMapError(f"VERB may only retain {sorted(VERBAL_FEATURES)}, not {sorted(extra)}")
        # most specific first: own treebank before "*", xpos-conditioned before bare
        ranked = sorted(enumerate(self.upos_map),
                        key=lambda ir: (ir[1][0] == "*", ir[1][2] is None, ir[0]))
        self._upos_rules = [r for _, r in ranked]
        self._xpos_rules = [r for _, r in sorted(enumerate(self.xpos_map),
                                                 key=lambda ir: (ir[1][0] == "*", ir[0]))]
        self._upos_cache: dict = {}

    @classmethod
    def from_dict(cls, data: dict) -> "TagMapConfig":
        if data.get("format", "latinkit.tagmap") != "latinkit.tagmap":
            raise TagMapError(f"not a tag map: format={data.get('format')!r}")
        try:
            return cls(
                upos_map=[(str(r["treebank"]), str(r["upos"]), r.get("xpos"), str(r["target"]))
                          for r in data.get("upos") or []],
                xpos_map=[(str(r["treebank"]), str(r["xpos"]), str(r["target"]))
                          for r in data.get("xpos") or []],
                xpos_feature_rules=[(r["upos"], r["feature"], str(r["value"]), r["target"])
                                    for r in data.get("xpos_feature_rules") or []],
                xpos_from_upos=dict(data.get("xpos_from_upos") or {}),
                feature_retention={k: frozenset(v) for k, v in (data.get("feature_retention") or {}).items()},
                feature_value_map={(r["feature"], str(r["value"])): str(r["target"])
                                   for r in data.get("feature_values") or []},
                fall_through=bool(data.get("fall_through", True)),
            )
        except (KeyError, TypeError) as exc:
            raise TagMapError(f"malformed tag map: {exc!r}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "TagMapConfig":
        return cls.from_dict(yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {})

    @classmethod
    def default(cls) -> "TagMapConfig":
        text = resources.files("latinkit").joinpath("data/tagmap.yaml").read_text(encoding="utf-8")
        return cls.from_dict(yaml.safe_load(text))

    def target_upos(self, treebank: str, upos: str, xpos: str) -> str | None:
        key = (treebank, upos, xpos)
        if key in self._upos_cache:
            return self._upos_cache[key]
        found = None
        for tb, src, pattern, target in self._upos_rules:
            if tb not in ("*", treebank) or src != upos:
                continue
            if pattern is None or fnmatchcase(xpos, pattern):
                found = target
                break
        if found is None and self.fall_through and upos in UPOS_TAGS:
            found = upos
        self._upos_cache[key] = found
        return found

    def target_xpos(self, treebank: str, xpos: str, target_upos: str,
                    feats: dict[str, str]) -> str | None:
        for tb, pattern, target in self._xpos_rules:
            if tb in ("*", treebank) and fnmatchcase(xpos, pattern):
                return target
        for upos, feat, value, target in self.xpos_feature_rules:
            if upos == target_upos and feats.get(feat) == value:
                return target
        if target_upos in self.xpos_from_upos:
            return self.xpos_from_upos[target_upos]
        return xpos if self.fall_through else None


def normalize_lemma(lemma: str) -> str:
    """Map v->u, V->U, j->i, J->I; every other character is left alone."""
    return lemma.translate(_LEMMA_MAP)


def relemmatize_plural_pronouns(sentence: SentenceRecord, treebank: str) -> SentenceRecord:
    """UDante only: plural forms lemmatized as ``ego``/``tu`` become ``nos``/``uos``.

    The trigger is ``Number=Plur``; tokens without FEATS fall back to a
    closed list of plural forms.
    """
    if treebank != "udante":
        return sentence
    words = []
    changed = False
    for tok in sentence.words:
        rule = PLURAL_PRONOUNS.get(tok.lemma)
        if rule is not None:
            target, forms = rule
            number = tok.feats_dict.get("Number")
            plural = number == "Plur" if tok.feats else normalize_lemma(tok.form.lower()) in forms
            if plural:
                tok = replace(tok, lemma=target)
                changed = True
        words.append(tok)
    return sentence.with_words(words) if changed else sentence


def _has_split_negation(sentence: SentenceRecord) -> bool:
    words = sentence.words
    for a, b in zip(words, words[1:]):
        if frozenset({a.form.lower(), b.form.lower()}) in SPLIT_NEGATIONS:
            return True
    return False


def filter_mistokenized(tb: Treebank) -> tuple[Treebank, list[str]]:
    """Drop sentences where ``nec``/``neque`` was split into ``ne`` + ``c``/``que``.

    Both surface orders are matched.
    """
    kept, removed = [], []
    for s in tb.sentences:
        if _has_split_negation(s):
            removed.append(s.sent_id)
        else:
            kept.append(s)
    return Treebank(name=tb.name, split=tb.split, sentences=kept), removed


def remap_token(token: TokenRecord, treebank: str, cfg: TagMapConfig,
                sent_id: str | None = None) -> TokenRecord:
    if not token.is_word:
        return token
    where = f"treebank {treebank!r}, sentence {sent_id!r}"
    upos = cfg.target_upos(treebank, token.upos, token.xpos)
    if upos is None:
        raise TagMapError(f"no UPOS mapping for {token.upos!r} (xpos {token.xpos!r}) in {where}")
    source_feats = token.feats_dict
    xpos = cfg.target_xpos(treebank, token.xpos, upos, source_feats)
    if xpos is None:
        raise TagMapError(f"no XPOS mapping for {token.xpos!r} in {where}")
    keep = cfg.feature_retention.get(upos)
    feats = [(k, cfg.feature_value_map.get((k, v), v)) for k, v in token.feats
             if keep is None or k in keep]
    return replace(token, upos=upos, xpos=xpos, feats=tuple(sort_feats(feats)))


@dataclass
class HarmonizationReport:
    """Counts keyed by ``"<treebank>:<split>"``."""

    sentences_in: dict[str, int] = field(default_factory=dict)
    sentences_out: dict[str, int] = field(default_factory=dict)
    tokens_in: dict[str, int] = field(default_factory=dict)
    tokens_out: dict[str, int] = field(default_factory=dict)
    removed_sentence_ids: list[str] = field(default_factory=list)
    remap_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    lemma_edit_count: int = 0

    @property
    def total_sentences_in(self) -> int:
        return sum(self.sentences_in.values())

    @property
    def total_sentences_out(self) -> int:
        return sum(self.sentences_out.values())

    @property
    def total_tokens_in(self) -> int:
        return sum(self.tokens_in.values())

    @property
    def total_tokens_out(self) -> int:
        return sum(self.tokens_out.values())

    def to_dict(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "sentences_in": dict(sorted(self.sentences_in.items())),
            "sentences_out": dict(sorted(self.sentences_out.items())),
            "tokens_in": dict(sorted(self.tokens_in.items())),
            "tokens_out": dict(sorted(self.tokens_out.items())),
            "totals": {
                "sentences_in": self.total_sentences_in,
                "sentences_out": self.total_sentences_out,
                "tokens_in": self.total_tokens_in,
                "tokens_out": self.total_tokens_out,
            },
            "removed_sentence_ids": list(self.removed_sentence_ids),
            "remap_counts": {k: dict(sorted(v.items())) for k, v in sorted(self.remap_counts.items())},
            "lemma_edit_count": self.lemma_edit_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    def to_text(self) -> str:
        lines = ["Harmonization report", ""]
        lines.append(f"{'treebank:split':<20}{'sent in':>10}{'sent out':>10}{'tok in':>10}{'tok out':>10}")
        for key in sorted(self.sentences_in):
            lines.append(f"{key:<20}{self.sentences_in[key]:>10}{self.sentences_out.get(key, 0):>10}"
                         f"{self.tokens_in.get(key, 0):>10}{self.tokens_out.get(key, 0):>10}")
        lines.append(f"{'total':<20}{self.total_sentences_in:>10}{self.total_sentences_out:>10}"
                     f"{self.total_tokens_in:>10}{self.total_tokens_out:>10}")
        lines += ["", f"lemmas edited: {self.lemma_edit_count}",
                  f"sentences removed: {len(self.removed_sentence_ids)}"]
        lines += [f"  {sid}" for sid in self.removed_sentence_ids]
        lines += ["", "UPOS remapping (source -> target: count)"]
        for src, targets in sorted(self.remap_counts.items()):
            for tgt, n in sorted(targets.items()):
                lines.append(f"  {src} -> {tgt}: {n}")
        return "\n".join(lines) + "\n"


def _treebank_rank(name: str) -> tuple[int, str]:
    if name in TREEBANK_ORDER:
        return TREEBANK_ORDER.index(name), name
    return len(TREEBANK_ORDER), name


def harmonize_treebank(tb: Treebank, cfg: TagMapConfig, report: HarmonizationReport) -> list[SentenceRecord]:
    """Harmonize one treebank, updating ``report`` in place; sent_ids get a ``name:`` prefix."""
    key = f"{tb.name}:{tb.split}"
    report.sentences_in[key] = report.sentences_in.get(key, 0) + len(tb.sentences)
    report.tokens_in[key] = report.tokens_in.get(key, 0) + tb.n_words

    stage = []
    for sent in tb.sentences:
        words = []
        for tok in sent.words:
            lemma = normalize_lemma(tok.lemma)
            if lemma != tok.lemma:
                report.lemma_edit_count += 1
                tok = replace(tok, lemma=lemma)
            words.append(tok)
        sent = sent.with_words(words)
        before = [t.lemma for t in sent.words]
        sent = relemmatize_plural_pronouns(sent, tb.name)
        report.lemma_edit_count += sum(a != b.lemma for a, b in zip(before, sent.words))
        stage.append(sent)

    kept, removed = filter_mistokenized(Treebank(tb.name, tb.split, stage))
    report.removed_sentence_ids.extend(f"{tb.name}:{sid}" for sid in removed)

    counts = report.remap_counts
    out = []
    n_tokens = 0
    for sent in kept.sentences:
        words = []
        for tok in sent.words:
            new = remap_token(tok, tb.name, cfg, sent.sent_id)
            counts.setdefault(tok.upos, {})
            counts[tok.upos][new.upos] = counts[tok.upos].get(new.upos, 0) + 1
            words.append(new)
        n_tokens += len(words)
        out.append(sent.with_words(words).with_sent_id(f"{tb.name}:{sent.sent_id}"))
    report.sentences_out[key] = report.sentences_out.get(key, 0) + len(out)
    report.tokens_out[key] = report.tokens_out.get(key, 0) + n_tokens
    return out


def harmonize(treebanks: Iterable[Treebank], cfg: TagMapConfig | None = None
              ) -> tuple[dict[str, Treebank], HarmonizationReport]:
    """Harmonize and merge treebanks into one corpus per split.

    Treebanks are concatenated in the order perseus, proiel, ittb, udante,
    llct, then any other names alphabetically.
    """
    cfg = cfg or TagMapConfig.default()
    report = HarmonizationReport()
    by_split: dict[str, list[SentenceRecord]] = defaultdict(list)
    for tb in sorted(treebanks, key=lambda t: (_treebank_rank(t.name), SPLITS.index(t.split))):
        by_split[tb.split].extend(harmonize_treebank(tb, cfg, report))
    merged = {split: Treebank(name="merged", split=split, sentences=sents)
              for split, sents in sorted(by_split.items(), key=lambda kv: SPLITS.index(kv[0]))}
    return merged, report


class TreebankHarmonizer(BaseEstimator, TransformerMixin):
    """Transformer form of :func:`harmonize`.

    ``fit`` records the (treebank, UPOS, XPOS) inventory and any tags the
    config cannot map; ``transform`` returns the merged corpora per split and
    keeps the report of the last call in ``report_``.
    """

    def __init__(self, tagmap_path=None, fall_through=True):
        self.tagmap_path = tagmap_path
        self.fall_through = fall_through

    def _config(self) -> TagMapConfig:
        cfg = TagMapConfig.default() if self.tagmap_path is None else TagMapConfig.from_file(self.tagmap_path)
        if cfg.fall_through != self.fall_through:
            cfg = replace(cfg, fall_through=self.fall_through)
        return cfg

    def fit(self, X, y=None):
        cfg = self._config()
        inventory = Counter()
        for tb in X:
            for _, tok in tb.words():
                inventory[(tb.name, tok.upos, tok.xpos)] += 1
        self.inventory_ = dict(sorted(inventory.items()))
        self.unmapped_ = sorted(k for k in inventory if cfg.target_upos(*k) is None)
        return self

    def transform(self, X):
        merged, self.report_ = harmonize(list(X), self._config())
        return merged
