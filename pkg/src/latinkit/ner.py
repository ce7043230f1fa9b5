"""NER training data: Herodotos ``.crf`` conversion, the JSON span format, label counts.

JSON layout (one object per example)::

    [{"text": "Caesar uenit", "entities": [[0, 6, "PERSON"]], "source": "ud"}]

Offsets are character offsets into ``text``, end exclusive. ``spans`` is
accepted as an alias of ``entities`` on input; ``source`` defaults to ``ud``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

import yaml

from .text import tokenize

LABELS = ("PERSON", "LOC", "NORP")
SOURCES = ("ud", "herodotos")


class NerFormatError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class EntitySpan:
    start: int
    end: int
    label: str


@dataclass(frozen=True)
class NerExample:
    text: str
    spans: tuple[EntitySpan, ...] = ()
    source: str = "ud"

    def span_texts(self) -> list[tuple[str, str]]:
        return [(self.text[s.start:s.end], s.label) for s in self.spans]


def load_label_map(path: str | Path | None = None) -> dict[str, str]:
    if path is None:
        raw = resources.files("latinkit").joinpath("data/ner_labels.yaml").read_text(encoding="utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    data = yaml.safe_load(raw) or {}
    labels = {str(k): str(v) for k, v in (data.get("labels") or {}).items()}
    bad = sorted(v for v in labels.values() if v not in LABELS)
    if bad:
        raise NerFormatError(f"label map targets unknown labels {bad}; allowed: {LABELS}")
    return labels


def map_label(source_label: str, label_map: dict[str, str] | None = None) -> str:
    table = label_map if label_map is not None else _default_label_map()
    try:
        return table[source_label]
    except KeyError:
        raise NerFormatError(
            f"unknown source label {source_label!r}; known: {sorted(table)}") from None


_LABEL_MAP: dict[str, str] | None = None


def _default_label_map() -> dict[str, str]:
    global _LABEL_MAP
    if _LABEL_MAP is None:
        _LABEL_MAP = load_label_map()
    return _LABEL_MAP


def _split_tag(tag: str) -> tuple[str, str | None]:
    if tag == "O":
        return "O", None
    if len(tag) > 2 and tag[1] == "-" and tag[0] in "BI":
        return tag[0], tag[2:]
    # bare label: IO scheme, consecutive tokens with the same label form one span
    return "I", tag


def parse_crf(text: str, token_col: int = 0, tag_col: int = -1,
              dangling: str = "repair", source: str = "herodotos") -> list[NerExample]:
    """Convert token-per-line BIO data to examples with the source labels.

    Sentence text is the tokens joined by single spaces, so offsets refer to
    that reconstruction, not to any original spacing. An ``I-`` tag that does
    not continue a span of the same label starts a new span when
    ``dangling="repair"`` and raises when ``dangling="error"``.
    """
    if dangling not in ("repair", "error"):
        raise ValueError("dangling must be 'repair' or 'error'")
    examples = []
    tokens: list[tuple[str, str, int]] = []

    def flush():
        if not tokens:
            return
        pieces, spans = [], []
        offset = 0
        open_span: list | None = None
        for form, tag, lineno in tokens:
            start, end = offset, offset + len(form)
            pieces.append(form)
            offset = end + 1
            kind, label = _split_tag(tag)
            if kind == "O":
                open_span = None
                continue
            if kind == "I" and open_span is not None and open_span[2] == label:
                open_span[1] = end
                continue
            if kind == "I" and dangling == "error" and "-" in tag:
                raise NerFormatError(f"line {lineno}: {tag} does not continue a {label} span")
            open_span = [start, end, label]
            spans.append(open_span)
        examples.append(NerExample(text=" ".join(pieces),
                                   spans=tuple(EntitySpan(*s) for s in spans),
                                   source=source))
        tokens.clear()

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            flush()
            continue
        if stripped.startswith("#") or stripped.startswith("-DOCSTART-"):
            continue
        cols = stripped.split()
        try:
            if len(cols) < 2:
                raise IndexError
            form, tag = cols[token_col], cols[tag_col]
        except IndexError:
            raise NerFormatError(f"line {lineno}: expected token and tag columns, got {line!r}") from None
        tokens.append((form, tag, lineno))
    flush()
    return examples


def relabel(examples: Iterable[NerExample], label_map: dict[str, str] | None = None) -> list[NerExample]:
    return [NerExample(ex.text, tuple(EntitySpan(s.start, s.end, map_label(s.label, label_map))
                                      for s in ex.spans), ex.source)
            for ex in examples]


def convert_crf(text: str, label_map: dict[str, str] | None = None, **kwargs) -> list[NerExample]:
    """``parse_crf`` followed by mapping onto PERSON/LOC/NORP."""
    return relabel(parse_crf(text, **kwargs), label_map)


def validate_example(ex: NerExample, index: int = 0) -> None:
    prev_end = -1
    prev_start = -1
    for s in ex.spans:
        if not (0 <= s.start < s.end <= len(ex.text)):
            raise NerFormatError(f"example {index}: span ({s.start}, {s.end}) outside text of length {len(ex.text)}")
        if s.label not in LABELS:
            raise NerFormatError(f"example {index}: unknown label {s.label!r}")
        if s.start < prev_start:
            raise NerFormatError(f"example {index}: spans not sorted by start")
        if s.start < prev_end:
            raise NerFormatError(f"example {index}: overlapping spans at {s.start}")
        prev_start, prev_end = s.start, s.end
    if ex.source not in SOURCES:
        raise NerFormatError(f"example {index}: unknown source {ex.source!r}")


def misaligned_spans(ex: NerExample) -> list[EntitySpan]:
    """Spans whose boundaries do not coincide with token boundaries."""
    toks = tokenize(ex.text)
    starts = {t.start for t in toks}
    ends = {t.end for t in toks}
    return [s for s in ex.spans if s.start not in starts or s.end not in ends]


def examples_from_json(data) -> list[NerExample]:
    if not isinstance(data, list):
        raise NerFormatError("top level of a NER file must be a list")
    out = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict) or not isinstance(obj.get("text"), str):
            raise NerFormatError(f"example {i}: expected an object with a 'text' string")
        raw = obj.get("entities", obj.get("spans", []))
        try:
            spans = tuple(sorted(EntitySpan(int(s), int(e), str(lab)) for s, e, lab in raw))
        except (TypeError, ValueError):
            raise NerFormatError(f"example {i}: entities must be [start, end, label] triples") from None
        ex = NerExample(obj["text"], spans, obj.get("source", "ud"))
        validate_example(ex, i)
        out.append(ex)
    return out


def examples_to_json(examples: Iterable[NerExample]) -> list[dict]:
    out = []
    for i, ex in enumerate(examples):
        validate_example(ex, i)
        out.append({"text": ex.text,
                    "entities": [[s.start, s.end, s.label] for s in ex.spans],
                    "source": ex.source})
    return out


def read_ner_file(path: str | Path) -> list[NerExample]:
    return examples_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def write_ner_file(examples: Iterable[NerExample], path: str | Path) -> None:
    payload = examples_to_json(examples)
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


@dataclass
class LabelBalance:
    counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(LABELS, 0))
    by_source: dict[str, dict[str, int]] = field(default_factory=dict)

    def most_common(self) -> str | None:
        if not any(self.counts.values()):
            return None
        return max(LABELS, key=lambda lab: self.counts[lab])


def label_balance(examples: Iterable[NerExample]) -> LabelBalance:
    counts: Counter = Counter()
    per_source: dict[str, Counter] = {}
    for ex in examples:
        c = per_source.setdefault(ex.source, Counter())
        for s in ex.spans:
            counts[s.label] += 1
            c[s.label] += 1
    return LabelBalance(
        counts={lab: counts[lab] for lab in LABELS},
        by_source={src: {lab: c[lab] for lab in LABELS} for src, c in sorted(per_source.items())},
    )
