"""Manifest: a YAML file naming every input of a pipeline run.

Relative paths resolve against the manifest's directory. Example::

    version: 1
    output_dir: out
    treebanks:
      - name: perseus
        train: ud/la_perseus-ud-train.conllu
        test: ud/la_perseus-ud-test.conllu
    tagmap: tagmap.yaml            # optional, packaged default otherwise
    que_exceptions: que.txt        # optional
    ner:
      crf: [herodotos/a.crf]
      json: [ner/ud_ner.json]
      label_map: labels.yaml       # optional
    corpus:
      inputs:
        - {path: cc100.txt, source: cc100}
      patterns: boilerplate.txt    # optional, "lorem ipsum" otherwise
    lemmatizer: {min_tree_freq: 2, top_k: 3}
    options:
      normalize_ij: false
      punct_in_uas: true
      chunk_deprels: [det, amod, nmod, nummod]
      min_chunk_len: 2
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .chunker import DEFAULT_DEPRELS
from .conllu import SPLITS


class ManifestError(ValueError):
    pass


@dataclass
class TreebankEntry:
    name: str
    files: dict[str, Path]


@dataclass
class Manifest:
    root: Path
    output_dir: Path
    treebanks: list[TreebankEntry] = field(default_factory=list)
    tagmap: Path | None = None
    que_exceptions: Path | None = None
    ner_crf: list[Path] = field(default_factory=list)
    ner_json: list[Path] = field(default_factory=list)
    ner_label_map: Path | None = None
    corpus_inputs: list[tuple[Path, str]] = field(default_factory=list)
    corpus_patterns: Path | None = None
    min_tree_freq: int = 2
    top_k: int = 3
    normalize_ij: bool = False
    punct_in_uas: bool = True
    chunk_deprels: tuple[str, ...] = tuple(sorted(DEFAULT_DEPRELS))
    min_chunk_len: int = 2

    def treebank_files(self, split: str | None = None) -> list[tuple[str, str, Path]]:
        out = []
        for entry in self.treebanks:
            for sp, path in entry.files.items():
                if split is None or sp == split:
                    out.append((entry.name, sp, path))
        return out


def _path(root: Path, value, what: str, must_exist: bool = True) -> Path:
    if not isinstance(value, str) or not value:
        raise ManifestError(f"{what}: expected a path string, got {value!r}")
    p = Path(value)
    if not p.is_absolute():
        p = root / p
    if must_exist and not p.exists():
        raise ManifestError(f"{what}: {p} does not exist")
    return p


def _positive_int(value, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ManifestError(f"{what} must be a positive integer, got {value!r}")
    return value


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ManifestError(f"{path}: invalid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ManifestError(f"{path}: top level must be a mapping")
    if data.get("version", 1) != 1:
        raise ManifestError(f"{path}: unsupported manifest version {data.get('version')!r}")
    root = path.resolve().parent
    m = Manifest(root=root, output_dir=_path(root, data.get("output_dir", "out"), "output_dir", False))

    for i, tb in enumerate(data.get("treebanks") or []):
        if "name" not in tb:
            raise ManifestError(f"treebanks[{i}] needs a name")
        files = {sp: _path(root, tb[sp], f"treebanks[{i}].{sp}") for sp in SPLITS if sp in tb}
        if not files:
            raise ManifestError(f"treebanks[{i}] lists no split files")
        m.treebanks.append(TreebankEntry(str(tb["name"]), files))

    if data.get("tagmap"):
        m.tagmap = _path(root, data["tagmap"], "tagmap")
    if data.get("que_exceptions"):
        m.que_exceptions = _path(root, data["que_exceptions"], "que_exceptions")

    ner = data.get("ner") or {}
    m.ner_crf = [_path(root, p, "ner.crf") for p in ner.get("crf") or []]
    m.ner_json = [_path(root, p, "ner.json") for p in ner.get("json") or []]
    if ner.get("label_map"):
        m.ner_label_map = _path(root, ner["label_map"], "ner.label_map")

    corpus = data.get("corpus") or {}
    for i, item in enumerate(corpus.get("inputs") or []):
        if isinstance(item, str):
            item = {"path": item}
        p = _path(root, item.get("path"), f"corpus.inputs[{i}]")
        m.corpus_inputs.append((p, str(item.get("source", p.stem))))
    if corpus.get("patterns"):
        m.corpus_patterns = _path(root, corpus["patterns"], "corpus.patterns")

    lem = data.get("lemmatizer") or {}
    m.min_tree_freq = _positive_int(lem.get("min_tree_freq", 2), "lemmatizer.min_tree_freq")
    m.top_k = _positive_int(lem.get("top_k", 3), "lemmatizer.top_k")

    opts = data.get("options") or {}
    m.normalize_ij = bool(opts.get("normalize_ij", False))
    m.punct_in_uas = bool(opts.get("punct_in_uas", True))
    if "chunk_deprels" in opts:
        m.chunk_deprels = tuple(opts["chunk_deprels"])
    m.min_chunk_len = _positive_int(opts.get("min_chunk_len", 2), "options.min_chunk_len")
    return m
