"""Majority-class UPOS/XPOS/FEATS tagger keyed on the normalized form."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .conllu import Treebank, format_feats, parse_feats
from .lemmatizer import read_model_json, write_model_json
from .text import SurfaceToken, normalize_orthography
from .validation import check_tag_targets

MODEL_FORMAT = "latinkit.frequency-tagger"
MODEL_VERSION = 1

Triple = tuple[str, str, str]


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    norm: str
    upos: str
    xpos: str = "_"
    feats: tuple[tuple[str, str], ...] = ()
    lemma: str = "_"
    is_enclitic_part: bool = False
    start: int = -1
    end: int = -1


def _best(counter: Counter) -> tuple[Triple, int]:
    # highest count, then lexicographically smallest triple
    triple = min(counter, key=lambda t: (-counter[t], t))
    return triple, counter[triple]


class FrequencyTagger(BaseEstimator):
    """Predict the majority ``(upos, xpos, feats)`` triple for a norm.

    Unknown norms back off through the suffixes in ``suffix_lengths`` and
    finally to the corpus-wide majority triple. Feats are compared and
    returned as serialized ``A=B|C=D`` strings.
    """

    def __init__(self, suffix_lengths=(3, 2, 1)):
        self.suffix_lengths = suffix_lengths

    def fit(self, X, y):
        for attr in ("norm_counts_", "suffix_counts_", "global_counts_"):
            self.__dict__.pop(attr, None)
        norms, targets = check_tag_targets(X, y)
        if not norms:
            raise ValueError("cannot train a tagger on an empty treebank")
        return self.partial_fit(norms, targets)

    def partial_fit(self, X, y):
        norms, targets = check_tag_targets(X, y)
        if not hasattr(self, "norm_counts_"):
            self.norm_counts_: dict[str, Counter] = defaultdict(Counter)
            self.suffix_counts_: dict[tuple[int, str], Counter] = defaultdict(Counter)
            self.global_counts_: Counter = Counter()
        for norm, triple in zip(norms, targets):
            self.norm_counts_[norm][triple] += 1
            for k in self.suffix_lengths:
                if len(norm) >= k:
                    self.suffix_counts_[(k, norm[-k:])][triple] += 1
            self.global_counts_[triple] += 1
        self._cache = {}
        return self

    def lookup(self, norm: str) -> Triple:
        check_is_fitted(self, "norm_counts_")
        hit = self._cache.get(norm)
        if hit is not None:
            return hit
        if norm in self.norm_counts_:
            triple = _best(self.norm_counts_[norm])[0]
        else:
            triple = None
            for k in self.suffix_lengths:
                c = self.suffix_counts_.get((k, norm[-k:])) if len(norm) >= k else None
                if c:
                    triple = _best(c)[0]
                    break
            if triple is None:
                triple = _best(self.global_counts_)[0]
        self._cache[norm] = triple
        return triple

    def enclitic_triple(self) -> Triple:
        """Tags for a split-off ``que``: always CCONJ, with the usual CCONJ xpos."""
        c = self.norm_counts_.get("que")
        if c:
            cconj = Counter({t: n for t, n in c.items() if t[0] == "CCONJ"})
            if cconj:
                return _best(cconj)[0]
        cconj = Counter({t: n for t, n in self.global_counts_.items() if t[0] == "CCONJ"})
        if cconj:
            return _best(cconj)[0]
        return ("CCONJ", "_", "_")

    def predict(self, X) -> list[Triple]:
        return [self.lookup(norm) for norm in X]

    def tag(self, tokens: Iterable[SurfaceToken]) -> list[TaggedToken]:
        out = []
        for tok in tokens:
            if tok.is_enclitic_part:
                upos, xpos, feats = self.enclitic_triple()
            else:
                upos, xpos, feats = self.lookup(tok.norm)
            out.append(TaggedToken(surface=tok.surface, norm=tok.norm, upos=upos, xpos=xpos,
                                   feats=tuple(parse_feats(feats)),
                                   is_enclitic_part=tok.is_enclitic_part,
                                   start=tok.start, end=tok.end))
        return out

    def to_dict(self) -> dict:
        check_is_fitted(self, "norm_counts_")

        def dump(counter):
            return [[list(t), n] for t, n in sorted(counter.items())]

        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "params": {"suffix_lengths": list(self.suffix_lengths)},
            "norms": [[norm, dump(c)] for norm, c in sorted(self.norm_counts_.items())],
            "suffixes": [[k, s, dump(c)] for (k, s), c in sorted(self.suffix_counts_.items())],
            "global": dump(self.global_counts_),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FrequencyTagger":
        if data.get("format") != MODEL_FORMAT:
            raise ValueError(f"not a tagger model: format={data.get('format')!r}")
        if data.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported tagger model version {data.get('version')!r}")

        def load(rows):
            return Counter({tuple(t): n for t, n in rows})

        model = cls(suffix_lengths=tuple(data["params"]["suffix_lengths"]))
        model.norm_counts_ = defaultdict(Counter, {n: load(rows) for n, rows in data["norms"]})
        model.suffix_counts_ = defaultdict(
            Counter, {(k, s): load(rows) for k, s, rows in data["suffixes"]})
        model.global_counts_ = load(data["global"])
        model._cache = {}
        return model

    def save(self, path: str | Path) -> None:
        write_model_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: str | Path) -> "FrequencyTagger":
        return cls.from_dict(read_model_json(path))


def treebank_tag_data(tb: Treebank, normalize_ij: bool = False) -> tuple[list[str], list[Triple]]:
    X, y = [], []
    for _, tok in tb.words():
        X.append(normalize_orthography(tok.form, normalize_ij))
        y.append((tok.upos, tok.xpos, format_feats(tok.feats)))
    return X, y


def train_tagger(tb: Treebank, suffix_lengths=(3, 2, 1), normalize_ij: bool = False) -> FrequencyTagger:
    X, y = treebank_tag_data(tb, normalize_ij)
    return FrequencyTagger(suffix_lengths=suffix_lengths).fit(X, y)


def tag(model: FrequencyTagger, tokens: Iterable[SurfaceToken]) -> list[TaggedToken]:
    return model.tag(tokens)
