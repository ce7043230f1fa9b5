"""Rule-based Latin tokenization, orthographic normalization and sentence splitting."""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from sklearn.base import BaseEstimator, TransformerMixin

PUNCTUATION = frozenset(".,;:?!\"'()[]—–-…“”‘’«»")
ENCLITIC = "que"

_WS_RE = re.compile(r"\S+")
_UV = str.maketrans("vV", "uU")
_IJ = str.maketrans("jJ", "iI")


@dataclass(frozen=True)
class SurfaceToken:
    surface: str
    start: int
    end: int
    norm: str
    is_enclitic_part: bool = False

    @property
    def is_punct(self) -> bool:
        return all(ch in PUNCTUATION for ch in self.surface)


def normalize_orthography(surface: str, normalize_ij: bool = False) -> str:
    """Lowercase, then map v to u (and j to i when ``normalize_ij``).

    >>> normalize_orthography("Vrbs")
    'urbs'
    """
    out = surface.lower().translate(_UV)
    if normalize_ij:
        out = out.translate(_IJ)
    return out


def _exception_key(word: str) -> str:
    return word.lower().translate(_UV).translate(_IJ)


class QueExceptionList:
    """Lowercase words ending in -que that must never be split."""

    def __init__(self, entries: Iterable[str]):
        cleaned = set()
        for e in entries:
            e = e.strip().lower()
            if not e or e.startswith("#"):
                continue
            if not e.endswith(ENCLITIC):
                raise ValueError(f"exception entry {e!r} does not end in '{ENCLITIC}'")
            cleaned.add(e)
        self.entries = frozenset(cleaned)
        self._keys = frozenset(_exception_key(e) for e in cleaned)

    def __contains__(self, word: str) -> bool:
        return _exception_key(word) in self._keys

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(sorted(self.entries))

    @classmethod
    def from_file(cls, path: str | Path) -> "QueExceptionList":
        return cls(Path(path).read_text(encoding="utf-8").splitlines())

    @classmethod
    def default(cls) -> "QueExceptionList":
        text = resources.files("latinkit").joinpath("data/que_exceptions.txt").read_text(encoding="utf-8")
        return cls(text.splitlines())


def _split_enclitic(word: str, start: int, exceptions: QueExceptionList):
    if (
        len(word) > len(ENCLITIC)
        and word.endswith(ENCLITIC)
        and word.isalpha()
        and word not in exceptions
    ):
        cut = len(word) - len(ENCLITIC)
        return [(word[:cut], start, start + cut, False),
                (ENCLITIC, start + cut, start + len(word), True)]
    return [(word, start, start + len(word), False)]


def tokenize(text: str, exceptions: QueExceptionList | None = None,
             normalize_ij: bool = False) -> list[SurfaceToken]:
    """Split ``text`` into surface tokens with character offsets.

    Leading and trailing punctuation characters become one-character tokens;
    an alphabetic word longer than three characters ending in ``que`` is split
    into stem and enclitic unless listed in ``exceptions``.

    >>> [t.surface for t in tokenize("arma uirumque cano,")]
    ['arma', 'uirum', 'que', 'cano', ',']
    """
    if exceptions is None:
        exceptions = _default_exceptions()
    pieces = []
    for m in _WS_RE.finditer(text):
        chunk, base = m.group(), m.start()
        lo, hi = 0, len(chunk)
        while lo < hi and chunk[lo] in PUNCTUATION:
            lo += 1
        while hi > lo and chunk[hi - 1] in PUNCTUATION:
            hi -= 1
        pieces.extend((chunk[i], base + i, base + i + 1, False) for i in range(lo))
        if lo < hi:
            pieces.extend(_split_enclitic(chunk[lo:hi], base + lo, exceptions))
        pieces.extend((chunk[i], base + i, base + i + 1, False) for i in range(hi, len(chunk)))
    return [SurfaceToken(s, a, b, normalize_orthography(s, normalize_ij), enc)
            for s, a, b, enc in pieces]


_DEFAULT_EXCEPTIONS: QueExceptionList | None = None


def _default_exceptions() -> QueExceptionList:
    global _DEFAULT_EXCEPTIONS
    if _DEFAULT_EXCEPTIONS is None:
        _DEFAULT_EXCEPTIONS = QueExceptionList.default()
    return _DEFAULT_EXCEPTIONS


_TERMINAL_RE = re.compile(r"[.?!]+[\"'”’»)\]]*")


def segment_sentences(text: str) -> list[tuple[int, int]]:
    """Character spans of sentences.

    A sentence ends after ``.``, ``?`` or ``!`` (plus any closing quotes) when
    whitespace and then an uppercase letter, or the end of the text, follows.
    """
    spans = []
    start = None
    pos = 0
    n = len(text)
    while pos < n:
        if start is None:
            while pos < n and text[pos].isspace():
                pos += 1
            if pos == n:
                break
            start = pos
        m = _TERMINAL_RE.search(text, pos)
        if m is None:
            break
        end = m.end()
        nxt = end
        while nxt < n and text[nxt].isspace():
            nxt += 1
        if nxt == n or (nxt > end and text[nxt].isupper()):
            spans.append((start, end))
            start = None
        pos = end
    if start is not None:
        end = len(text.rstrip())
        if end > start:
            spans.append((start, end))
    return spans


class LatinTokenizer(BaseEstimator, TransformerMixin):
    """Stateless transformer: texts in, lists of :class:`SurfaceToken` out."""

    def __init__(self, exceptions_path=None, normalize_ij=False):
        self.exceptions_path = exceptions_path
        self.normalize_ij = normalize_ij

    def _exceptions(self) -> QueExceptionList:
        if self.exceptions_path is None:
            return _default_exceptions()
        return QueExceptionList.from_file(self.exceptions_path)

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        exc = self._exceptions()
        return [tokenize(text, exc, self.normalize_ij) for text in X]


class Normer(BaseEstimator, TransformerMixin):
    """Maps surface strings to their normalized form."""

    def __init__(self, normalize_ij=False):
        self.normalize_ij = normalize_ij

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        return [normalize_orthography(s, self.normalize_ij) for s in X]
