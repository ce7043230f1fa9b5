"""Frequency-ranked edit-tree lemmatizer with norm backoff, plus the lemma fixer."""
from __future__ import annotations

import gzip
import json
from collections import Counter, defaultdict
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .edit_tree import EditTree, apply_edit_tree, build_edit_tree, tree_from_obj, tree_to_obj
from .validation import check_lemma_rows

MODEL_FORMAT = "latinkit.edit-tree-lemmatizer"
MODEL_VERSION = 1
SUFFIX_LEN = 4


def conditioning_key(form: str, upos: str) -> tuple[str, str]:
    return form[-SUFFIX_LEN:], upos


class EditTreeLemmatizer(BaseEstimator):
    """Lemmatize by the most frequent applicable edit tree for (form suffix, UPOS).

    ``X`` rows are ``(form, norm, upos)`` triples and ``y`` the gold lemmas.
    Trees seen fewer than ``min_tree_freq`` times in the whole training data
    are never proposed; at most ``top_k`` candidates are tried before falling
    back to the norm. ``top_k=None`` tries every candidate.
    """

    def __init__(self, min_tree_freq=2, top_k=3):
        self.min_tree_freq = min_tree_freq
        self.top_k = top_k

    def fit(self, X, y):
        for attr in ("trees_", "tree_index_", "counts_", "tree_freq_"):
            self.__dict__.pop(attr, None)
        rows, lemmas = check_lemma_rows(X, y)
        if not rows:
            raise ValueError("cannot train a lemmatizer on an empty training set")
        return self._accumulate(rows, lemmas)

    def partial_fit(self, X, y):
        """Add counts from more data to an already fitted model."""
        rows, lemmas = check_lemma_rows(X, y)
        return self._accumulate(rows, lemmas)

    def _accumulate(self, rows, lemmas):
        if not hasattr(self, "trees_"):
            self.trees_: list[EditTree] = []
            self.tree_index_: dict[EditTree, int] = {}
            self.counts_: dict[tuple[str, str], Counter] = defaultdict(Counter)
            self.tree_freq_: Counter = Counter()
        cache: dict[tuple[str, str], int] = {}
        for (form, _norm, upos), lemma in zip(rows, lemmas):
            tid = cache.get((form, lemma))
            if tid is None:
                tree = build_edit_tree(form, lemma)
                tid = self.tree_index_.get(tree)
                if tid is None:
                    tid = len(self.trees_)
                    self.trees_.append(tree)
                    self.tree_index_[tree] = tid
                cache[(form, lemma)] = tid
            self.counts_[conditioning_key(form, upos)][tid] += 1
            self.tree_freq_[tid] += 1
        self._ranked = {}
        return self

    def candidates(self, form: str, upos: str) -> list[int]:
        """Tree ids for the key, best first, after the frequency cut and ``top_k``."""
        check_is_fitted(self, "trees_")
        key = conditioning_key(form, upos)
        # cache keyed on min_tree_freq so set_params after fit stays correct
        cache_key = (key, self.min_tree_freq)
        ranked = self._ranked.get(cache_key)
        if ranked is None:
            counts = self.counts_.get(key, {})
            ranked = sorted(
                (tid for tid in counts if self.tree_freq_[tid] >= self.min_tree_freq),
                key=lambda tid: (-counts[tid], tid),
            )
            self._ranked[cache_key] = ranked
        return ranked if self.top_k is None else ranked[: self.top_k]

    def lemmatize(self, form: str, norm: str, upos: str) -> str:
        for tid in self.candidates(form, upos):
            lemma = apply_edit_tree(self.trees_[tid], form)
            if lemma:
                return lemma
        return norm if norm else form

    def predict(self, X) -> list[str]:
        rows = [tuple(r) for r in X]
        return [self.lemmatize(form, norm, upos) for form, norm, upos in rows]

    def to_dict(self) -> dict:
        check_is_fitted(self, "trees_")
        counts = [
            [suffix, upos, [[tid, n] for tid, n in sorted(c.items())]]
            for (suffix, upos), c in sorted(self.counts_.items())
        ]
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "params": {"min_tree_freq": self.min_tree_freq, "top_k": self.top_k},
            "suffix_len": SUFFIX_LEN,
            "trees": [tree_to_obj(t) for t in self.trees_],
            "counts": counts,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EditTreeLemmatizer":
        if data.get("format") != MODEL_FORMAT:
            raise ValueError(f"not a lemmatizer model: format={data.get('format')!r}")
        if data.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported lemmatizer model version {data.get('version')!r}")
        model = cls(**data["params"])
        model.trees_ = [tree_from_obj(o) for o in data["trees"]]
        model.tree_index_ = {t: i for i, t in enumerate(model.trees_)}
        model.counts_ = defaultdict(Counter)
        model.tree_freq_ = Counter()
        for suffix, upos, pairs in data["counts"]:
            for tid, n in pairs:
                model.counts_[(suffix, upos)][tid] = n
                model.tree_freq_[tid] += n
        model._ranked = {}
        return model

    def save(self, path: str | Path) -> None:
        write_model_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: str | Path) -> "EditTreeLemmatizer":
        return cls.from_dict(read_model_json(path))


def write_model_json(data: dict, path: str | Path) -> None:
    text = json.dumps(data, ensure_ascii=False, sort_keys=True, separators=(",", ":")) + "\n"
    path = Path(path)
    if path.suffix == ".gz":
        # mtime=0 keeps the archive byte-identical across runs
        with open(path, "wb") as fh, gzip.GzipFile(fileobj=fh, mode="wb", mtime=0) as gz:
            gz.write(text.encode("utf-8"))
    else:
        path.write_text(text, encoding="utf-8")


def read_model_json(path: str | Path) -> dict:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(path.read_text(encoding="utf-8"))


def train_lemmatizer(pairs: Iterable[Sequence[str]], min_tree_freq: int = 2,
                     top_k: int | None = 3) -> EditTreeLemmatizer:
    """Train from ``(form, norm, upos, lemma)`` tuples."""
    pairs = list(pairs)
    X = [(f, n, u) for f, n, u, _ in pairs]
    y = [lem for *_, lem in pairs]
    return EditTreeLemmatizer(min_tree_freq=min_tree_freq, top_k=top_k).fit(X, y)


def lemmatize(model: EditTreeLemmatizer, form: str, norm: str, upos: str) -> str:
    return model.lemmatize(form, norm, upos)


def fix_lemma(token):
    """Apply the post-lemmatization overrides to a tagged token.

    A split-off ``que`` tagged CCONJ keeps ``que`` as its lemma, and PUNCT
    tokens keep their surface form. ``token`` is any dataclass with
    ``surface``, ``upos``, ``lemma`` and ``is_enclitic_part`` fields.
    """
    if token.upos == "PUNCT":
        return replace(token, lemma=token.surface)
    if token.is_enclitic_part and token.surface == "que" and token.upos == "CCONJ":
        return replace(token, lemma="que")
    return token


class LemmaFixer(BaseEstimator, TransformerMixin):
    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        return [fix_lemma(t) for t in X]
