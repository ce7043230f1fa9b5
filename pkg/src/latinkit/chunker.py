"""Flat noun chunks from dependency trees."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .conllu import SentenceRecord

DEFAULT_DEPRELS = frozenset({"det", "amod", "nmod", "nummod"})
NOMINAL_UPOS = frozenset({"NOUN", "PROPN", "PRON"})
# an ADJ in one of these relations stands for a noun ("maximus deorum")
SUBSTANTIVE_DEPRELS = frozenset({"nsubj", "obj", "iobj", "obl", "appos", "nmod", "vocative"})


@dataclass(frozen=True)
class Chunk:
    head_index: int
    token_indices: tuple[int, ...]
    text: str

    @property
    def start(self) -> int:
        return self.token_indices[0]

    @property
    def end(self) -> int:
        return self.token_indices[-1]

    def __len__(self):
        return len(self.token_indices)


def _base(deprel: str) -> str:
    return deprel.split(":", 1)[0]


def _run_around(ids: set[int], head: int) -> set[int]:
    lo = hi = head
    while lo - 1 in ids:
        lo -= 1
    while hi + 1 in ids:
        hi += 1
    return set(range(lo, hi + 1))


def noun_chunks(sentence: SentenceRecord, allowed_deprels: Iterable[str] = DEFAULT_DEPRELS,
                include_pron: bool = True, substantive_adj: bool = True) -> list[Chunk]:
    """Base noun phrases of ``sentence``, ordered by position.

    Each nominal head collects dependents reachable through
    ``allowed_deprels`` (matched on the relation before any ``:`` subtype),
    trimmed to the largest contiguous window around the head in which every
    member's path to the head stays inside the window. Chunks whose head lies
    inside another chunk are dropped, so emitted chunks never overlap.
    """
    words = sentence.words
    for w in words:
        if w.head is None or w.deprel is None:
            raise ValueError(f"sentence {sentence.sent_id!r}: token {w.id} lacks head/deprel annotation")
    allowed = frozenset(allowed_deprels)
    by_id = {w.id: w for w in words}
    children: dict[int, list[int]] = {}
    for w in words:
        children.setdefault(w.head, []).append(w.id)

    heads = set(NOMINAL_UPOS if include_pron else NOMINAL_UPOS - {"PRON"})

    def is_head(w) -> bool:
        if w.upos in heads:
            return True
        return substantive_adj and w.upos == "ADJ" and _base(w.deprel) in SUBSTANTIVE_DEPRELS

    candidates: dict[int, set[int]] = {}
    for w in words:
        if not is_head(w):
            continue
        members = {w.id}
        stack = [w.id]
        while stack:
            for c in children.get(stack.pop(), ()):
                if _base(by_id[c].deprel) in allowed and c not in members:
                    members.add(c)
                    stack.append(c)
        while True:
            window = _run_around(members, w.id)
            closed = {t for t in window if _path_inside(t, w.id, window, by_id)}
            if closed == members:
                break
            members = closed
        candidates[w.id] = members

    chunks = []
    for h, members in candidates.items():
        if any(h in other for oh, other in candidates.items() if oh != h):
            continue
        ids = tuple(sorted(members))
        chunks.append(Chunk(h, ids, " ".join(by_id[i].form for i in ids)))
    chunks.sort(key=lambda c: c.start)
    return chunks


def _path_inside(tok: int, head: int, window: set[int], by_id) -> bool:
    while tok != head:
        if tok not in window:
            return False
        tok = by_id[tok].head
        if tok == 0:
            return False
    return True
