"""Large synthetic plaintext corpus for the dedupe/filter scale check.

Line ``i`` is rendered from three arrays so the expected survivors can be
computed with numpy without materializing any text. Run as a script to clean
the stream with the library and print measurements as JSON.
"""
from __future__ import annotations

import hashlib
import json
import resource
import sys
import time

import numpy as np

VARIANTS = ("sententia {k} de rebus gestis", "sententia  {k} de rebus gestis", " sententia {k}\tde rebus gestis ",
            "sententia {k} de  rebus gestis")


def make_arrays(n_lines: int, n_distinct: int, lorem_rate: float = 0.01, seed: int = 0):
    rng = np.random.default_rng(seed)
    ids = rng.integers(0, n_distinct, size=n_lines, dtype=np.int64)
    variants = rng.integers(0, len(VARIANTS), size=n_lines, dtype=np.int8)
    lorem = rng.random(n_lines) < lorem_rate
    return ids, variants, lorem


def render(k: int, variant: int, is_lorem: bool) -> str:
    if is_lorem:
        return f"Lorem ipsum dolor {k} sit amet"
    return VARIANTS[variant].format(k=k)


def iter_lines(ids, variants, lorem, block: int = 1 << 16):
    # convert block-wise so the generator itself holds O(block) Python objects
    for a in range(0, len(ids), block):
        b = a + block
        for k, v, bad in zip(ids[a:b].tolist(), variants[a:b].tolist(), lorem[a:b].tolist()):
            yield render(k, v, bad)


def expected_positions(ids, lorem):
    """Indices of the first occurrence of each distinct non-lorem key, in input order."""
    keep = np.flatnonzero(~lorem)
    _, first = np.unique(ids[keep], return_index=True)
    return np.sort(keep[first])


def digest(lines) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def _peak_rss_bytes() -> int:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024  # kilobytes on Linux


def main(n_lines: int, n_distinct: int, seed: int) -> dict:
    from latinkit.corpus import CleanStats, iter_clean

    ids, variants, lorem = make_arrays(n_lines, n_distinct, seed=seed)
    consumed = 0

    def source():
        nonlocal consumed
        for line in iter_lines(ids, variants, lorem):
            consumed += 1
            yield line

    baseline = _peak_rss_bytes()
    stats = CleanStats()
    start = time.perf_counter()
    out_digest = digest(iter_clean(source(), stats=stats))
    seconds = time.perf_counter() - start
    return {"seconds": seconds, "baseline_rss": baseline, "peak_rss": _peak_rss_bytes(), "digest": out_digest,
            "consumed": consumed, "lines_in": stats.lines_in, "lines_out": stats.lines_out,
            "duplicates": stats.duplicates, "removed": dict(stats.removed_by_pattern)}


if __name__ == "__main__":
    n, d, s = (int(a) for a in sys.argv[1:4])
    print(json.dumps(main(n, d, s)))
