"""Plaintext sentence corpora for vector training: extraction, dedupe, boilerplate filter.

Both cleaning steps are single-pass generators. Dedupe keeps one key per
distinct sentence, so memory grows with the number of distinct sentences and
not with the input length.
"""
from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from sklearn.base import BaseEstimator, TransformerMixin

from .conllu import Treebank, parse_misc

DEFAULT_PATTERNS = ("lorem ipsum",)


@dataclass
class SentenceCorpus:
    sentences: list[str] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.provenance:
            self.provenance = ["unknown"] * len(self.sentences)
        if len(self.provenance) != len(self.sentences):
            raise ValueError("provenance must have one tag per sentence")

    def __len__(self):
        return len(self.sentences)

    def add(self, sentences: Iterable[str], source: str) -> None:
        for s in sentences:
            if s.strip():
                self.sentences.append(s)
                self.provenance.append(source)

    def composition(self) -> dict[str, int]:
        return dict(sorted(Counter(self.provenance).items()))


def detokenize(sentence) -> str:
    """Rebuild sentence text from forms, honoring ``SpaceAfter=No``.

    Multiword token lines replace the words they cover.
    """
    parts = []
    covered_until = 0
    for tok in sentence.tokens:
        if tok.empty_index is not None:
            continue
        if tok.is_multiword:
            covered_until = tok.mwt_range[1]
        elif tok.id <= covered_until:
            continue
        parts.append(tok.form)
        if parse_misc(tok.misc).get("SpaceAfter") != "No":
            parts.append(" ")
    return "".join(parts).strip()


def extract_sentences(tb: Treebank) -> list[str]:
    return [s.text if s.text is not None else detokenize(s) for s in tb.sentences]


def dedup_key(sentence: str) -> str:
    return " ".join(sentence.split())


def iter_dedupe(lines: Iterable[str], hash_keys: bool = False) -> Iterator[str]:
    """Yield each sentence whose whitespace-collapsed key has not been seen.

    ``hash_keys`` stores 16-byte BLAKE2 digests instead of the keys, trading
    exactness (collisions are astronomically unlikely) for memory.
    """
    seen: set = set()
    add = seen.add
    for line in lines:
        key = dedup_key(line)
        if hash_keys:
            key = hashlib.blake2b(key.encode("utf-8"), digest_size=16).digest()
        if key in seen:
            continue
        add(key)
        yield line


def compile_patterns(patterns: Iterable[str]) -> list[re.Pattern]:
    compiled = []
    for p in patterns:
        try:
            compiled.append(re.compile(p, re.IGNORECASE))
        except re.error as exc:
            raise ValueError(f"invalid boilerplate pattern {p!r}: {exc}") from None
    return compiled


def iter_filter(lines: Iterable[str], patterns: Iterable[str] = DEFAULT_PATTERNS,
                counts: Counter | None = None) -> Iterator[str]:
    """Drop lines matching any pattern (case-insensitive regex search).

    Patterns are matched against the whitespace-collapsed sentence, so the
    filter gives the same answer for every member of a dedupe class.
    Removals are tallied in ``counts`` under the first matching pattern.
    """
    compiled = compile_patterns(patterns)
    for line in lines:
        key = dedup_key(line)
        hit = next((p for p in compiled if p.search(key)), None)
        if hit is None:
            yield line
        elif counts is not None:
            counts[hit.pattern] += 1


def dedupe(corpus: SentenceCorpus, hash_keys: bool = False) -> SentenceCorpus:
    seen: set = set()
    out = SentenceCorpus()
    for s, src in zip(corpus.sentences, corpus.provenance):
        key = dedup_key(s)
        if hash_keys:
            key = hashlib.blake2b(key.encode("utf-8"), digest_size=16).digest()
        if key not in seen:
            seen.add(key)
            out.sentences.append(s)
            out.provenance.append(src)
    return out


def filter_boilerplate(corpus: SentenceCorpus, patterns: Iterable[str] = DEFAULT_PATTERNS
                       ) -> tuple[SentenceCorpus, dict[str, int]]:
    patterns = list(patterns)
    compiled = compile_patterns(patterns)
    counts = dict.fromkeys(patterns, 0)
    out = SentenceCorpus()
    for s, src in zip(corpus.sentences, corpus.provenance):
        key = dedup_key(s)
        hit = next((p for p in compiled if p.search(key)), None)
        if hit is None:
            out.sentences.append(s)
            out.provenance.append(src)
        else:
            counts[hit.pattern] += 1
    return out, counts


def read_patterns(path: str | Path) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ln for ln in lines if ln.strip() and not ln.startswith("#")]


def iter_lines(path: str | Path) -> Iterator[str]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.strip():
                yield line


@dataclass
class CleanStats:
    lines_in: int = 0
    lines_out: int = 0
    duplicates: int = 0
    removed_by_pattern: Counter = field(default_factory=Counter)


def iter_clean(items: Iterable, patterns: Iterable[str] = DEFAULT_PATTERNS, stats: CleanStats | None = None,
               text=lambda item: item, hash_keys: bool = False) -> Iterator:
    """Filter then dedupe in one pass over ``items``.

    ``text`` extracts the sentence from an item, so provenance-tagged pairs
    can flow through unchanged.
    """
    compiled = compile_patterns(patterns)
    stats = stats if stats is not None else CleanStats()
    seen: set = set()
    for item in items:
        stats.lines_in += 1
        key = dedup_key(text(item))
        hit = next((p for p in compiled if p.search(key)), None)
        if hit is not None:
            stats.removed_by_pattern[hit.pattern] += 1
            continue
        if hash_keys:
            key = hashlib.blake2b(key.encode("utf-8"), digest_size=16).digest()
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        stats.lines_out += 1
        yield item


class CorpusCleaner(BaseEstimator, TransformerMixin):
    """Filter then dedupe an iterable of sentences; stateless."""

    def __init__(self, patterns=DEFAULT_PATTERNS, hash_keys=False):
        self.patterns = patterns
        self.hash_keys = hash_keys

    def fit(self, X=None, y=None):
        compile_patterns(self.patterns)
        return self

    def transform(self, X):
        self.stats_ = CleanStats()
        return list(iter_clean(X, self.patterns, self.stats_, hash_keys=self.hash_keys))
