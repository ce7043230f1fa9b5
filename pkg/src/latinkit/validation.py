"""Input checks shared by the estimators and the evaluator."""
from __future__ import annotations


def _as_rows(X, width: int, what: str) -> list[tuple]:
    rows = []
    for i, row in enumerate(X):
        row = tuple(row)
        if len(row) != width:
            raise ValueError(f"{what} row {i} has {len(row)} fields, expected {width}")
        if not all(isinstance(v, str) for v in row):
            raise TypeError(f"{what} row {i} must contain only strings: {row!r}")
        rows.append(row)
    return rows


def check_lemma_rows(X, y) -> tuple[list[tuple[str, str, str]], list[str]]:
    """Validate ``(form, norm, upos)`` rows against their lemmas."""
    rows = _as_rows(X, 3, "lemmatizer input")
    lemmas = list(y)
    if len(lemmas) != len(rows):
        raise ValueError(f"X has {len(rows)} rows but y has {len(lemmas)} lemmas")
    for i, ((form, _, _), lemma) in enumerate(zip(rows, lemmas)):
        if not form or not lemma:
            raise ValueError(f"row {i}: form and lemma must be nonempty")
    return rows, lemmas


def check_tag_targets(X, y) -> tuple[list[str], list[tuple[str, str, str]]]:
    """Validate norms against ``(upos, xpos, feats)`` targets."""
    norms = [str(x) for x in X]
    targets = _as_rows(y, 3, "tagger target")
    if len(norms) != len(targets):
        raise ValueError(f"X has {len(norms)} rows but y has {len(targets)} targets")
    for i, (upos, _, _) in enumerate(targets):
        if not upos:
            raise ValueError(f"row {i}: empty UPOS")
    return norms, targets


def check_aligned(gold, pred) -> None:
    """Require identical sentence and word counts in two treebanks."""
    if len(gold.sentences) != len(pred.sentences):
        raise ValueError(
            f"tokenization mismatch: gold has {len(gold.sentences)} sentences, "
            f"pred has {len(pred.sentences)}"
        )
    for i, (g, p) in enumerate(zip(gold.sentences, pred.sentences)):
        gw, pw = g.words, p.words
        if len(gw) != len(pw):
            raise ValueError(
                f"tokenization mismatch in sentence {i} ({g.sent_id!r}): "
                f"gold has {len(gw)} words, pred has {len(pw)}"
            )
