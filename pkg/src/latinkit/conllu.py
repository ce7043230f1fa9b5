"""CoNLL-U reading, writing and TSV export.

The object model keeps every column of the source file. DEPS and MISC are
never interpreted, so a canonical file survives ``serialize(parse(x)) == x``.
See https://universaldependencies.org/format.html for the format itself.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator

SPLITS = ("train", "dev", "test", "unsplit")

UPOS_TAGS = frozenset(
    "ADJ ADP ADV AUX CCONJ DET INTJ NOUN NUM PART PRON PROPN PUNCT SCONJ SYM VERB X".split()
)

TSV_COLUMNS = (
    "treebank", "split", "sent_id", "id", "form", "lemma",
    "upos", "xpos", "feats", "head", "deprel",
)

_RANGE_RE = re.compile(r"^(\d+)-(\d+)$")
_EMPTY_RE = re.compile(r"^(\d+)\.(\d+)$")
_WORD_RE = re.compile(r"^[1-9]\d*$")


class ConlluError(ValueError):
    """Malformed CoNLL-U input. ``lineno`` is 1-based."""

    def __init__(self, reason: str, lineno: int | None = None, path: str | Path | None = None):
        self.reason = reason
        self.lineno = lineno
        self.path = path
        if path is not None:
            where = f"{path}:{lineno}: " if lineno is not None else f"{path}: "
        else:
            where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + reason)


def parse_feats(value: str) -> list[tuple[str, str]]:
    if value in ("_", ""):
        return []
    pairs = []
    for item in value.split("|"):
        name, sep, val = item.partition("=")
        if not sep or not name:
            raise ValueError(f"bad feature {item!r}")
        pairs.append((name, val))
    return pairs


def format_feats(feats: Iterable[tuple[str, str]]) -> str:
    text = "|".join(f"{k}={v}" for k, v in feats)
    return text or "_"


def sort_feats(feats: Iterable[tuple[str, str]]) -> list[tuple[str, str]]:
    return sorted(feats, key=lambda kv: (kv[0].lower(), kv[0]))


def parse_misc(value: str) -> dict[str, str]:
    """Read-only view of a MISC column. The column itself stays opaque."""
    if value in ("_", ""):
        return {}
    out = {}
    for item in value.split("|"):
        k, _, v = item.partition("=")
        out[k] = v
    return out


@dataclass(frozen=True)
class TokenRecord:
    """One line of a sentence block.

    Word lines have ``mwt_range is None and empty_index is None``. A multiword
    token line (``3-4``) stores its first id in ``id`` and carries only a form;
    an empty node (``8.1``) is kept verbatim but ignored by every consumer.
    """

    id: int
    form: str
    lemma: str = "_"
    upos: str = "_"
    xpos: str = "_"
    feats: tuple[tuple[str, str], ...] = ()
    head: int | None = None
    deprel: str | None = None
    deps: str = "_"
    misc: str = "_"
    mwt_range: tuple[int, int] | None = None
    empty_index: int | None = None

    @property
    def is_word(self) -> bool:
        return self.mwt_range is None and self.empty_index is None

    @property
    def is_multiword(self) -> bool:
        return self.mwt_range is not None

    @property
    def feats_str(self) -> str:
        return format_feats(self.feats)

    @property
    def feats_dict(self) -> dict[str, str]:
        return dict(self.feats)

    @property
    def space_after(self) -> bool:
        return parse_misc(self.misc).get("SpaceAfter") != "No"

    def id_str(self) -> str:
        if self.mwt_range is not None:
            return f"{self.mwt_range[0]}-{self.mwt_range[1]}"
        if self.empty_index is not None:
            return f"{self.id}.{self.empty_index}"
        return str(self.id)

    def to_line(self) -> str:
        head = "_" if self.head is None else str(self.head)
        deprel = "_" if self.deprel is None else self.deprel
        cols = (self.id_str(), self.form, self.lemma, self.upos, self.xpos,
                self.feats_str, head, deprel, self.deps, self.misc)
        return "\t".join(cols)


@dataclass(frozen=True)
class SentenceRecord:
    """A sentence block.

    ``comments`` hold the comment lines verbatim (without the leading ``#``
    stripped), so ``sent_id`` and ``text`` are views derived from them unless
    the file had no ``# sent_id`` line, in which case the parser assigns one.
    """

    sent_id: str
    tokens: tuple[TokenRecord, ...]
    comments: tuple[str, ...] = ()
    text: str | None = None

    @property
    def words(self) -> list[TokenRecord]:
        return [t for t in self.tokens if t.is_word]

    def with_words(self, words: Iterable[TokenRecord]) -> "SentenceRecord":
        """Replace the word lines, keeping multiword and empty lines in place."""
        it = iter(words)
        tokens = tuple(next(it) if t.is_word else t for t in self.tokens)
        if next(it, None) is not None:
            raise ValueError("more words supplied than the sentence holds")
        return replace(self, tokens=tokens)

    def with_sent_id(self, sent_id: str) -> "SentenceRecord":
        comments = []
        seen = False
        for c in self.comments:
            if _comment_key(c) == "sent_id":
                comments.append(f"# sent_id = {sent_id}")
                seen = True
            else:
                comments.append(c)
        if not seen:
            comments.insert(0, f"# sent_id = {sent_id}")
        return replace(self, sent_id=sent_id, comments=tuple(comments))

    def to_block(self) -> str:
        lines = list(self.comments)
        lines.extend(t.to_line() for t in self.tokens)
        return "\n".join(lines) + "\n"


@dataclass
class Treebank:
    name: str
    split: str = "unsplit"
    sentences: list[SentenceRecord] = field(default_factory=list)

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}; expected one of {SPLITS}")

    def __len__(self):
        return len(self.sentences)

    def __iter__(self) -> Iterator[SentenceRecord]:
        return iter(self.sentences)

    @property
    def n_words(self) -> int:
        return sum(len(s.words) for s in self.sentences)

    def words(self) -> Iterator[tuple[SentenceRecord, TokenRecord]]:
        for sent in self.sentences:
            for tok in sent.words:
                yield sent, tok


def _comment_key(line: str) -> str | None:
    body = line[1:].strip()
    key, sep, _ = body.partition("=")
    return key.strip() if sep else None


def _comment_value(line: str) -> str:
    return line[1:].partition("=")[2].strip()


def _parse_token_line(line: str, lineno: int) -> TokenRecord:
    cols = line.split("\t")
    if len(cols) != 10:
        raise ConlluError(f"expected 10 tab-separated columns, found {len(cols)}", lineno)
    tid, form, lemma, upos, xpos, feats, head, deprel, deps, misc = cols
    try:
        feat_pairs = tuple(parse_feats(feats))
    except ValueError as exc:
        raise ConlluError(str(exc), lineno) from None

    m = _RANGE_RE.match(tid)
    if m:
        start, end = int(m.group(1)), int(m.group(2))
        if start < 1 or end <= start:
            raise ConlluError(f"invalid multiword range {tid!r}", lineno)
        if head != "_" or deprel != "_":
            raise ConlluError(f"multiword token {tid} must not carry head or deprel", lineno)
        return TokenRecord(id=start, form=form, lemma=lemma, upos=upos, xpos=xpos,
                           feats=feat_pairs, deps=deps, misc=misc, mwt_range=(start, end))
    m = _EMPTY_RE.match(tid)
    if m:
        return TokenRecord(id=int(m.group(1)), form=form, lemma=lemma, upos=upos, xpos=xpos,
                           feats=feat_pairs, head=None, deprel=None if deprel == "_" else deprel,
                           deps=deps, misc=misc, empty_index=int(m.group(2)))
    if not _WORD_RE.match(tid):
        raise ConlluError(f"invalid token id {tid!r}", lineno)
    if head == "_":
        head_val = None
    elif head.isdigit():
        head_val = int(head)
    else:
        raise ConlluError(f"invalid head {head!r}", lineno)
    return TokenRecord(id=int(tid), form=form, lemma=lemma, upos=upos, xpos=xpos,
                       feats=feat_pairs, head=head_val,
                       deprel=None if deprel == "_" else deprel, deps=deps, misc=misc)


def _check_sentence(tokens: list[TokenRecord], linenos: list[int], first_line: int) -> None:
    word_ids = [(t.id, n) for t, n in zip(tokens, linenos) if t.is_word]
    if not word_ids:
        raise ConlluError("sentence has no word lines", first_line)
    for expected, (tid, n) in enumerate(word_ids, start=1):
        if tid != expected:
            raise ConlluError(f"non-contiguous token ids: expected {expected}, found {tid}", n)
    n_words = len(word_ids)
    last_end = 0
    for t, n in zip(tokens, linenos):
        if t.mwt_range is not None:
            start, end = t.mwt_range
            if end > n_words:
                raise ConlluError(f"multiword range {start}-{end} exceeds sentence length", n)
            if start <= last_end:
                raise ConlluError(f"overlapping multiword range {start}-{end}", n)
            last_end = end
        elif t.is_word and t.head is not None:
            if t.head > n_words:
                raise ConlluError(f"dangling head {t.head} (sentence has {n_words} words)", n)
            if t.head == t.id:
                raise ConlluError(f"token {t.id} is its own head", n)


def iter_sentences(text: str) -> Iterator[SentenceRecord]:
    """Lazily parse sentence blocks from CoNLL-U text."""
    comments: list[str] = []
    tokens: list[TokenRecord] = []
    linenos: list[int] = []
    first_line = 1
    index = 0

    def finish():
        nonlocal index
        _check_sentence(tokens, linenos, first_line)
        index += 1
        sent_id = None
        sent_text = None
        for c in comments:
            key = _comment_key(c)
            if key == "sent_id" and sent_id is None:
                sent_id = _comment_value(c)
            elif key == "text" and sent_text is None:
                sent_text = _comment_value(c)
        return SentenceRecord(sent_id=sent_id if sent_id is not None else str(index),
                              tokens=tuple(tokens), comments=tuple(comments), text=sent_text)

    lineno = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line.strip():
            if tokens:
                yield finish()
            elif comments:
                raise ConlluError("comment block without token lines", lineno)
            comments, tokens, linenos = [], [], []
            first_line = lineno + 1
            continue
        if line.startswith("#"):
            if tokens:
                raise ConlluError("comment line inside token block", lineno)
            comments.append(line)
            continue
        tokens.append(_parse_token_line(line, lineno))
        linenos.append(lineno)
    if tokens:
        yield finish()
    elif comments:
        raise ConlluError("comment block without token lines", lineno)


def parse_conllu(text: str, name: str = "unnamed", split: str = "unsplit") -> Treebank:
    """Parse CoNLL-U text into a :class:`Treebank`.

    Raises :class:`ConlluError` with the offending line number on wrong column
    counts, non-contiguous ids, bad multiword ranges or dangling heads.
    """
    tb = Treebank(name=name, split=split, sentences=list(iter_sentences(text)))
    seen = set()
    for s in tb.sentences:
        if s.sent_id in seen:
            raise ConlluError(f"duplicate sent_id {s.sent_id!r}")
        seen.add(s.sent_id)
    return tb


def read_conllu(path: str | Path, name: str | None = None, split: str | None = None) -> Treebank:
    """Read a file; name and split default to what the UD file name implies."""
    path = Path(path)
    guess_name, guess_split = guess_treebank(path)
    text = path.read_text(encoding="utf-8")
    try:
        return parse_conllu(text, name or guess_name, split or guess_split)
    except ConlluError as exc:
        raise ConlluError(exc.reason, exc.lineno, path) from None


def guess_treebank(path: Path) -> tuple[str, str]:
    """``la_perseus-ud-train.conllu`` -> ``("perseus", "train")``."""
    stem = path.name.split(".")[0]
    m = re.match(r"^[a-z]+_([a-z0-9]+)-ud-(train|dev|test)$", stem)
    if m:
        return m.group(1), m.group(2)
    return stem, "unsplit"


def serialize_conllu(tb: Treebank | Iterable[SentenceRecord]) -> str:
    sentences = tb.sentences if isinstance(tb, Treebank) else tb
    return "".join(s.to_block() + "\n" for s in sentences)


def write_conllu(tb: Treebank, path: str | Path) -> None:
    Path(path).write_text(serialize_conllu(tb), encoding="utf-8", newline="\n")


def canonicalize(tb: Treebank) -> Treebank:
    """Sort every FEATS column by feature name (case-insensitive).

    Blank-line spacing is normalized as a side effect of serialization, which
    always emits exactly one blank line after each sentence.
    """
    sentences = []
    for s in tb.sentences:
        tokens = tuple(replace(t, feats=tuple(sort_feats(t.feats))) for t in s.tokens)
        sentences.append(replace(s, tokens=tokens))
    return Treebank(name=tb.name, split=tb.split, sentences=sentences)


def treebank_to_tsv(tb: Treebank) -> str:
    """One header row, then one row per word line (multiword ranges skipped)."""
    rows = ["\t".join(TSV_COLUMNS)]
    for sent, tok in tb.words():
        row = (tb.name, tb.split, sent.sent_id, str(tok.id), tok.form, tok.lemma,
               tok.upos, tok.xpos, tok.feats_str,
               "_" if tok.head is None else str(tok.head),
               "_" if tok.deprel is None else tok.deprel)
        for value in row:
            if "\t" in value or "\n" in value:
                raise ValueError(f"tab or newline inside field in sentence {sent.sent_id!r}")
        rows.append("\t".join(row))
    return "\n".join(rows) + "\n"
