"""Command-line entry point: ``latinkit [--manifest M] [--out DIR] <verb> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .chunker import DEFAULT_DEPRELS, noun_chunks
from .conllu import ConlluError, Treebank, read_conllu, serialize_conllu, treebank_to_tsv, write_conllu
from .corpus import DEFAULT_PATTERNS, CleanStats, extract_sentences, iter_clean, iter_lines, read_patterns
from .evaluate import evaluate, treebank_sentence_spans
from .harmonize import TagMapConfig, TagMapError, harmonize
from .lemmatizer import EditTreeLemmatizer, train_lemmatizer
from .manifest import Manifest, ManifestError, load_manifest
from .ner import NerFormatError, convert_crf, label_balance, load_label_map, read_ner_file, write_ner_file
from .pipeline import annotate_text, annotate_treebank, lemma_training_pairs
from .tagger import FrequencyTagger, train_tagger
from .text import QueExceptionList, segment_sentences


class CliError(Exception):
    pass


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _write_json(path: Path, data) -> None:
    _write(path, json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n")


def _read_one(args: tuple[str, str | None, str | None]) -> Treebank:
    path, name, split = args
    return read_conllu(path, name, split)


def read_many(specs: list[tuple[str, str | None, str | None]], jobs: int = 1) -> list[Treebank]:
    """Parse files, in parallel when ``jobs > 1``; results keep the input order."""
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_read_one, specs))
    return [_read_one(s) for s in specs]


def _manifest(args) -> Manifest | None:
    return load_manifest(args.manifest) if args.manifest else None


def _out_dir(args, manifest: Manifest | None) -> Path:
    if args.out:
        return Path(args.out)
    if manifest is not None:
        return manifest.output_dir
    return Path(".")


def _treebank_specs(args, manifest, split=None) -> list[tuple[str, str | None, str | None]]:
    if getattr(args, "treebank", None):
        return [(p, None, None) for p in args.treebank]
    if manifest is None:
        raise CliError("no treebank files given (use --treebank or --manifest)")
    return [(str(p), name, sp) for name, sp, p in manifest.treebank_files(split)]


def _tagmap(args, manifest) -> TagMapConfig:
    path = getattr(args, "tagmap", None) or (manifest.tagmap if manifest else None)
    cfg = TagMapConfig.from_file(path) if path else TagMapConfig.default()
    if getattr(args, "no_fall_through", False):
        cfg = replace(cfg, fall_through=False)
    return cfg


def _exceptions(args, manifest) -> QueExceptionList | None:
    path = getattr(args, "exceptions", None) or (manifest.que_exceptions if manifest else None)
    return QueExceptionList.from_file(path) if path else None


def _opt(args, name, manifest, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if manifest is not None:
        return getattr(manifest, name)
    return default


# --- verbs -----------------------------------------------------------------

def cmd_convert(args, manifest):
    out = _out_dir(args, manifest)
    for tb in read_many(_treebank_specs(args, manifest), args.jobs):
        target = out / f"{tb.name}-{tb.split}.tsv"
        _write(target, treebank_to_tsv(tb))
        print(f"{target}\t{tb.n_words} rows", file=sys.stderr)


def cmd_harmonize(args, manifest):
    out = _out_dir(args, manifest)
    treebanks = read_many(_treebank_specs(args, manifest), args.jobs)
    merged, report = harmonize(treebanks, _tagmap(args, manifest))
    out.mkdir(parents=True, exist_ok=True)
    for split, tb in merged.items():
        write_conllu(tb, out / f"merged-{split}.conllu")
    _write(out / "harmonization-report.json", report.to_json())
    _write(out / "harmonization-report.txt", report.to_text())
    print(f"sentences {report.total_sentences_out} tokens {report.total_tokens_out}", file=sys.stderr)
    return merged, report


def cmd_train_lemmatizer(args, manifest):
    tb = read_conllu(args.train)
    normalize_ij = _opt(args, "normalize_ij", manifest, False)
    pairs = lemma_training_pairs(tb, normalize_ij)
    min_tree_freq = _opt(args, "min_tree_freq", manifest, 2)
    top_k = _opt(args, "top_k", manifest, 3)
    if args.update:
        model = EditTreeLemmatizer.load(args.update)
        model.set_params(min_tree_freq=min_tree_freq, top_k=top_k)
        model.partial_fit([p[:3] for p in pairs], [p[3] for p in pairs])
    else:
        model = train_lemmatizer(pairs, min_tree_freq, top_k)
    model.save(args.model)
    print(f"{len(model.trees_)} edit trees from {len(pairs)} pairs", file=sys.stderr)


def cmd_train_tagger(args, manifest):
    tb = read_conllu(args.train)
    model = train_tagger(tb, normalize_ij=_opt(args, "normalize_ij", manifest, False))
    model.save(args.model)
    print(f"{len(model.norm_counts_)} norms", file=sys.stderr)


def _emit(text: str, output: str | None) -> None:
    if output:
        _write(Path(output), text)
    else:
        sys.stdout.write(text)


def cmd_lemmatize(args, manifest):
    model = EditTreeLemmatizer.load(args.model)
    tb = read_conllu(args.input)
    pred = annotate_treebank(tb, None, model, _opt(args, "normalize_ij", manifest, False), keep_syntax=True)
    _emit(serialize_conllu(pred), args.output)


def cmd_tag(args, manifest):
    tagger = FrequencyTagger.load(args.model)
    lemmatizer = EditTreeLemmatizer.load(args.lemmatizer) if args.lemmatizer else None
    normalize_ij = _opt(args, "normalize_ij", manifest, False)
    if args.text:
        text = Path(args.text).read_text(encoding="utf-8")
        pred = annotate_text(text, tagger, lemmatizer, _exceptions(args, manifest), normalize_ij,
                             name=Path(args.text).stem)
    elif args.input:
        pred = annotate_treebank(read_conllu(args.input), tagger, lemmatizer, normalize_ij)
    else:
        raise CliError("tag needs --input CONLLU or --text FILE")
    _emit(serialize_conllu(pred), args.output)


def cmd_ner_convert(args, manifest):
    out = _out_dir(args, manifest)
    label_path = args.label_map or (manifest.ner_label_map if manifest else None)
    labels = load_label_map(label_path)
    crf = args.crf or ([str(p) for p in manifest.ner_crf] if manifest else [])
    js = args.json or ([str(p) for p in manifest.ner_json] if manifest else [])
    examples = []
    for p in js:
        examples.extend(read_ner_file(p))
    for p in crf:
        text = Path(p).read_text(encoding="utf-8")
        examples.extend(convert_crf(text, labels, token_col=args.token_col, tag_col=args.tag_col,
                                    dangling=args.dangling))
    out.mkdir(parents=True, exist_ok=True)
    write_ner_file(examples, out / "ner.json")
    bal = label_balance(examples)
    _write_json(out / "ner-balance.json", {"format": "latinkit.ner-balance/1", "counts": bal.counts,
                                           "by_source": bal.by_source})
    print(" ".join(f"{k}={v}" for k, v in bal.counts.items()), file=sys.stderr)


def cmd_corpus_prep(args, manifest):
    out = _out_dir(args, manifest)
    pattern_path = args.patterns or (manifest.corpus_patterns if manifest else None)
    patterns = read_patterns(pattern_path) if pattern_path else list(DEFAULT_PATTERNS)
    sources: list[tuple[object, str]] = []
    for tb in read_many(_treebank_specs(args, manifest) if (args.treebank or manifest) else [], args.jobs):
        sources.append((extract_sentences(tb), "ud"))
    inputs = [(p, None) for p in args.corpus] if args.corpus else (
        [(str(p), s) for p, s in manifest.corpus_inputs] if manifest else [])
    for p, source in inputs:
        sources.append((iter_lines(p), source or Path(p).stem))

    def tagged():
        for lines, source in sources:
            for line in lines:
                if line.strip():
                    yield source, line

    stats = CleanStats()
    provenance: Counter = Counter()
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "corpus.txt", "w", encoding="utf-8", newline="\n") as fh:
        for source, line in iter_clean(tagged(), patterns, stats, text=lambda item: item[1]):
            fh.write(line + "\n")
            provenance[source] += 1
    _write_json(out / "corpus-report.json", {
        "format": "latinkit.corpus-report/1",
        "lines_in": stats.lines_in,
        "lines_out": stats.lines_out,
        "duplicates_removed": stats.duplicates,
        "removed_by_pattern": {p: stats.removed_by_pattern.get(p, 0) for p in patterns},
        "composition": dict(sorted(provenance.items())),
    })
    print(f"{stats.lines_in} lines in, {stats.lines_out} out", file=sys.stderr)


def cmd_chunk(args, manifest):
    deprels = args.deprels.split(",") if args.deprels else list(
        manifest.chunk_deprels if manifest else sorted(DEFAULT_DEPRELS))
    min_len = _opt(args, "min_chunk_len", manifest, 1)
    tb = read_conllu(args.input)
    lines = []
    for sent in tb.sentences:
        for c in noun_chunks(sent, deprels, include_pron=not args.no_pron):
            if len(c) >= min_len:
                lines.append(f"{sent.sent_id}\t{c.start}\t{c.end}\t{c.text}")
    _emit("".join(line + "\n" for line in lines), args.output)


def cmd_evaluate(args, manifest):
    out = _out_dir(args, manifest)
    gold = read_conllu(args.gold)
    pred = read_conllu(args.pred)
    gold_ner = read_ner_file(args.gold_ner) if args.gold_ner else None
    pred_ner = read_ner_file(args.pred_ner) if args.pred_ner else None
    punct = False if args.exclude_punct else _opt(args, "punct_in_uas", manifest, True)
    seg = None
    if args.resegment:
        doc, _ = treebank_sentence_spans(gold)
        seg = segment_sentences(doc)
    report = evaluate(gold, pred, gold_ner, pred_ner, include_punct=punct, pred_seg_spans=seg)
    name = args.name or Path(args.pred).stem
    _write(out / f"{name}.eval.json", report.to_json())
    _write(out / f"{name}.eval.txt", report.to_table())
    sys.stdout.write(report.to_table())
    return report


def cmd_pipeline(args, manifest):
    """Every step the manifest has inputs for, into ``<out>/``."""
    if manifest is None:
        raise CliError("pipeline needs --manifest")
    out = _out_dir(args, manifest)
    ns = argparse.Namespace(**vars(args))
    ns.treebank = None

    if manifest.treebanks:
        ns.out = str(out / "tsv")
        cmd_convert(ns, manifest)
        ns.out = str(out / "merged")
        merged, _ = cmd_harmonize(ns, manifest)
        if "train" in merged:
            train = merged["train"]
            pairs = lemma_training_pairs(train, manifest.normalize_ij)
            lem = train_lemmatizer(pairs, manifest.min_tree_freq, manifest.top_k)
            tagger = train_tagger(train, normalize_ij=manifest.normalize_ij)
            (out / "models").mkdir(parents=True, exist_ok=True)
            lem.save(out / "models" / "lemmatizer.json")
            tagger.save(out / "models" / "tagger.json")
            for split in ("dev", "test"):
                if split not in merged:
                    continue
                gold = merged[split]
                pred = annotate_treebank(gold, tagger, lem, manifest.normalize_ij)
                (out / "pred").mkdir(parents=True, exist_ok=True)
                write_conllu(pred, out / "pred" / f"merged-{split}.conllu")
                doc, _ = treebank_sentence_spans(gold)
                report = evaluate(gold, pred, include_punct=manifest.punct_in_uas,
                                  pred_seg_spans=segment_sentences(doc))
                _write(out / "eval" / f"{split}.json", report.to_json())
                _write(out / "eval" / f"{split}.txt", report.to_table())
        if "dev" in merged:
            lines = []
            for sent in merged["dev"].sentences:
                for c in noun_chunks(sent, manifest.chunk_deprels):
                    if len(c) >= manifest.min_chunk_len:
                        lines.append(f"{sent.sent_id}\t{c.start}\t{c.end}\t{c.text}\n")
            _write(out / "chunks" / "merged-dev.tsv", "".join(lines))

    if manifest.ner_crf or manifest.ner_json:
        ns.out, ns.crf, ns.json, ns.label_map = str(out / "ner"), None, None, None
        ns.token_col, ns.tag_col, ns.dangling = 0, -1, "repair"
        cmd_ner_convert(ns, manifest)

    if manifest.corpus_inputs or manifest.treebanks:
        ns.out, ns.corpus, ns.patterns = str(out / "corpus"), None, None
        cmd_corpus_prep(ns, manifest)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latinkit", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--manifest", help="YAML manifest naming inputs and options")
    p.add_argument("--out", help="output directory (overrides the manifest)")
    p.add_argument("--jobs", type=int, default=1, help="parallel file parsing")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("convert", help="CoNLL-U to TSV")
    s.add_argument("treebank", nargs="*")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("harmonize", help="merge treebanks under one annotation scheme")
    s.add_argument("treebank", nargs="*")
    s.add_argument("--tagmap")
    s.add_argument("--no-fall-through", action="store_true")
    s.set_defaults(func=cmd_harmonize)

    s = sub.add_parser("train-lemmatizer")
    s.add_argument("--train", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--min-tree-freq", type=int)
    s.add_argument("--top-k", type=int)
    s.add_argument("--update", help="existing model to extend with more counts")
    s.add_argument("--normalize-ij", action="store_true", default=None)
    s.set_defaults(func=cmd_train_lemmatizer)

    s = sub.add_parser("lemmatize")
    s.add_argument("--model", required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--output")
    s.add_argument("--normalize-ij", action="store_true", default=None)
    s.set_defaults(func=cmd_lemmatize)

    s = sub.add_parser("train-tagger")
    s.add_argument("--train", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--normalize-ij", action="store_true", default=None)
    s.set_defaults(func=cmd_train_tagger)

    s = sub.add_parser("tag")
    s.add_argument("--model", required=True)
    s.add_argument("--lemmatizer")
    s.add_argument("--input", help="CoNLL-U input (gold tokenization)")
    s.add_argument("--text", help="plain-text input")
    s.add_argument("--exceptions", help="alternate -que exception list")
    s.add_argument("--output")
    s.add_argument("--normalize-ij", action="store_true", default=None)
    s.set_defaults(func=cmd_tag)

    s = sub.add_parser("ner-convert")
    s.add_argument("--crf", nargs="*")
    s.add_argument("--json", nargs="*")
    s.add_argument("--label-map")
    s.add_argument("--token-col", type=int, default=0)
    s.add_argument("--tag-col", type=int, default=-1)
    s.add_argument("--dangling", choices=("repair", "error"), default="repair")
    s.set_defaults(func=cmd_ner_convert)

    s = sub.add_parser("corpus-prep")
    s.add_argument("--treebank", nargs="*")
    s.add_argument("--corpus", nargs="*")
    s.add_argument("--patterns")
    s.set_defaults(func=cmd_corpus_prep)

    s = sub.add_parser("chunk")
    s.add_argument("--input", required=True)
    s.add_argument("--deprels", help="comma-separated dependent relations")
    s.add_argument("--min-chunk-len", type=int)
    s.add_argument("--no-pron", action="store_true")
    s.add_argument("--output")
    s.set_defaults(func=cmd_chunk)

    s = sub.add_parser("evaluate")
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--gold-ner")
    s.add_argument("--pred-ner")
    s.add_argument("--exclude-punct", action="store_true")
    s.add_argument("--resegment", action="store_true",
                   help="score the rule-based segmenter instead of pred's sentence breaks")
    s.add_argument("--name")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("pipeline", help="run every step the manifest has inputs for")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = _manifest(args)
        args.func(args, manifest)
    except (CliError, ConlluError, ManifestError, TagMapError, NerFormatError, ValueError, OSError) as exc:
        print(f"latinkit {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
