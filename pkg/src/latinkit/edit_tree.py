"""Edit trees: form-to-lemma transformations built around longest common substrings.

A tree for ``("amauit", "amo")`` keeps the shared ``am`` (or any stem in the
same position) and rewrites the ending ``auit`` to ``o``, so it also turns
``laudauit`` into ``laudo``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Leaf:
    """Replace a whole segment; applies only if the segment equals ``replace_from``."""

    replace_from: str
    replace_to: str


@dataclass(frozen=True)
class Interior:
    """Keep the middle of the form, recurse on the prefix and suffix segments."""

    prefix_len: int
    suffix_len: int
    left: "EditTree"
    right: "EditTree"


EditTree = Union[Leaf, Interior]


def longest_common_substring(a: str, b: str) -> tuple[int, int, int]:
    """Return ``(start_a, start_b, length)``.

    Ties go to the leftmost match in ``a``, then the leftmost in ``b``.
    """
    best = (0, 0, 0)
    if not a or not b:
        return best
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                k = prev[j - 1] + 1
                cur[j] = k
                start_a, start_b = i - k, j - k
                if k > best[2] or (k == best[2] and (start_a, start_b) < best[:2]):
                    best = (start_a, start_b, k)
        prev = cur
    return best


def build_edit_tree(form: str, lemma: str) -> EditTree:
    sa, sb, length = longest_common_substring(form, lemma)
    if length == 0:
        return Leaf(form, lemma)
    return Interior(
        prefix_len=sa,
        suffix_len=len(form) - sa - length,
        left=build_edit_tree(form[:sa], lemma[:sb]),
        right=build_edit_tree(form[sa + length:], lemma[sb + length:]),
    )


def apply_edit_tree(tree: EditTree, form: str) -> str | None:
    """Lemma for ``form``, or ``None`` when the tree does not apply."""
    if isinstance(tree, Leaf):
        return tree.replace_to if form == tree.replace_from else None
    if tree.prefix_len + tree.suffix_len > len(form):
        return None
    mid_end = len(form) - tree.suffix_len
    left = apply_edit_tree(tree.left, form[:tree.prefix_len])
    if left is None:
        return None
    right = apply_edit_tree(tree.right, form[mid_end:])
    if right is None:
        return None
    return left + form[tree.prefix_len:mid_end] + right


def tree_to_obj(tree: EditTree) -> list:
    if isinstance(tree, Leaf):
        return ["L", tree.replace_from, tree.replace_to]
    return ["I", tree.prefix_len, tree.suffix_len, tree_to_obj(tree.left), tree_to_obj(tree.right)]


def tree_from_obj(obj) -> EditTree:
    if obj[0] == "L":
        return Leaf(obj[1], obj[2])
    if obj[0] == "I":
        return Interior(int(obj[1]), int(obj[2]), tree_from_obj(obj[3]), tree_from_obj(obj[4]))
    raise ValueError(f"not an edit tree: {obj!r}")


def tree_to_str(tree: EditTree) -> str:
    """Compact human-readable rendering, e.g. ``(0|2 ''>'' 'is'>'a')``."""
    if isinstance(tree, Leaf):
        return f"{tree.replace_from!r}>{tree.replace_to!r}"
    return f"({tree.prefix_len}|{tree.suffix_len} {tree_to_str(tree.left)} {tree_to_str(tree.right)})"
