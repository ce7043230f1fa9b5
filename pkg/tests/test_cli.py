import json
from pathlib import Path

import pytest

from latinkit.cli import main
from latinkit.conllu import read_conllu
from latinkit.ner import read_ner_file

from synth import write_synthetic_project

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def project(tmp_path_factory):
    root = tmp_path_factory.mktemp("proj")
    return root, write_synthetic_project(root, {"train": 80, "dev": 20, "test": 20})


def run(*argv):
    return main([str(a) for a in argv])


def test_convert(project, tmp_path):
    root, _ = project
    src = root / "ud" / "la_proiel-ud-dev.conllu"
    assert run("--out", tmp_path, "convert", src) == 0
    rows = (tmp_path / "proiel-dev.tsv").read_text().splitlines()
    assert len(rows) == read_conllu(src).n_words + 1  # header


def test_malformed_file_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.conllu"
    bad.write_text("1\tarma\tarma\tNOUN\t_\t_\t0\troot\t_\t_\n2\tbad\n\n")
    assert run("--out", tmp_path, "convert", bad) == 1
    err = capsys.readouterr().err
    assert f"{bad}:2:" in err and "10 tab-separated columns" in err


def test_manifest_errors(tmp_path, capsys):
    m = tmp_path / "m.yaml"
    m.write_text("treebanks:\n  - name: x\n    train: missing.conllu\n")
    assert run("--manifest", m, "convert") == 1
    assert "does not exist" in capsys.readouterr().err
    m.write_text("lemmatizer: {top_k: -1}\n")
    assert run("--manifest", m, "convert") == 1
    assert "positive integer" in capsys.readouterr().err
    m.write_text("version: 7\n")
    assert run("--manifest", m, "convert") == 1
    assert run("convert") == 1
    assert "no treebank files" in capsys.readouterr().err


def test_harmonize_train_tag_lemmatize_evaluate(project, tmp_path, capsys):
    root, manifest = project
    out = tmp_path / "h"
    assert run("--manifest", manifest, "--out", out, "harmonize") == 0
    for split in ("train", "dev", "test"):
        assert (out / f"merged-{split}.conllu").exists()
    report = json.loads((out / "harmonization-report.json").read_text())
    assert "format" in report
    train, dev = out / "merged-train.conllu", out / "merged-dev.conllu"

    assert run("train-lemmatizer", "--train", train, "--model", tmp_path / "lem.json") == 0
    assert run("train-tagger", "--train", train, "--model", tmp_path / "tag.json") == 0
    assert run("lemmatize", "--model", tmp_path / "lem.json", "--input", dev,
               "--output", tmp_path / "lem.conllu") == 0
    assert run("tag", "--model", tmp_path / "tag.json", "--lemmatizer", tmp_path / "lem.json",
               "--input", dev, "--output", tmp_path / "pred.conllu") == 0
    pred = read_conllu(tmp_path / "pred.conllu")
    assert pred.n_words == read_conllu(dev).n_words

    # lemmatizer trained further with --update keeps its params
    assert run("train-lemmatizer", "--train", dev, "--model", tmp_path / "lem2.json",
               "--update", tmp_path / "lem.json", "--top-k", "5") == 0
    assert json.loads((tmp_path / "lem2.json").read_text())["params"]["top_k"] == 5

    capsys.readouterr()
    assert run("--out", tmp_path / "ev", "evaluate", "--gold", dev, "--pred", dev, "--name", "self") == 0
    assert "ner f-score" in capsys.readouterr().out
    doc = json.loads((tmp_path / "ev" / "self.eval.json").read_text())
    for key in ("sentence_seg_f", "xpos_acc", "upos_acc", "morph_acc", "lemma_acc", "uas", "las"):
        assert doc[key] == 1.0
    assert doc["ner_f"] is None

    assert run("--out", tmp_path / "ev", "evaluate", "--gold", dev, "--pred", tmp_path / "pred.conllu",
               "--name", "pred", "--exclude-punct", "--resegment") == 0
    doc = json.loads((tmp_path / "ev" / "pred.eval.json").read_text())
    assert doc["punct_in_attachment"] is False and 0 < doc["upos_acc"] <= 1
    assert doc["uas"] is None  # tagger output has no syntax

    # a prediction with different tokenization is an error
    assert run("--out", tmp_path / "ev", "evaluate", "--gold", dev, "--pred", train) == 1


def test_tag_plain_text(project, tmp_path):
    root, manifest = project
    assert run("train-tagger", "--train", root / "ud" / "la_ittb-ud-train.conllu",
               "--model", tmp_path / "t.json") == 0
    text = tmp_path / "in.txt"
    text.write_text("Puella aquam portat. Arma uirumque cano.")
    assert run("tag", "--model", tmp_path / "t.json", "--text", text, "--output", tmp_path / "o.conllu") == 0
    tb = read_conllu(tmp_path / "o.conllu")
    assert [s.text for s in tb.sentences] == ["Puella aquam portat.", "Arma uirumque cano."]
    words = [w for _, w in tb.words()]
    que = next(w for w in words if w.form == "que")
    assert (que.upos, que.lemma) == ("CCONJ", "que")
    assert run("tag", "--model", tmp_path / "t.json") == 1


def test_ner_convert(project, tmp_path):
    root, _ = project
    assert run("--out", tmp_path, "ner-convert", "--crf", root / "ner" / "sample.crf") == 0
    exs = read_ner_file(tmp_path / "ner.json")
    assert exs[0].span_texts() == [("Caesar", "PERSON"), ("Galliam", "LOC")]
    assert exs[1].span_texts() == [("Heluetii", "NORP"), ("Marcus Tullius", "PERSON")]
    bal = json.loads((tmp_path / "ner-balance.json").read_text())
    assert bal["counts"] == {"PERSON": 2, "LOC": 1, "NORP": 1}
    bad = tmp_path / "bad.crf"
    bad.write_text("Roma B-CITY\n")
    assert run("--out", tmp_path, "ner-convert", "--crf", bad) == 1


def test_corpus_prep(project, tmp_path):
    root, _ = project
    pat = tmp_path / "pat.txt"
    pat.write_text("lorem ipsum\n^Arma\n")
    assert run("--out", tmp_path, "corpus-prep", "--corpus", root / "web.txt", "--patterns", pat) == 0
    assert (tmp_path / "corpus.txt").read_text() == "Gallia est omnis diuisa in partes tres.\n"
    rep = json.loads((tmp_path / "corpus-report.json").read_text())
    assert rep["lines_in"] == 12 and rep["lines_out"] == 1 and rep["duplicates_removed"] == 5
    assert rep["removed_by_pattern"] == {"lorem ipsum": 3, "^Arma": 3}
    assert rep["composition"] == {"web": 1}
    pat.write_text("(\n")
    assert run("--out", tmp_path, "corpus-prep", "--corpus", root / "web.txt", "--patterns", pat) == 1


def test_chunk(tmp_path, capsys):
    gold = FIXTURES / "ritchie-gold.conllu"
    assert run("chunk", "--input", gold, "--min-chunk-len", "2") == 0
    lines = capsys.readouterr().out.splitlines()
    assert "ritchie-2\t6\t7\tmaximi deorum" in lines and len(lines) == 8
    assert run("chunk", "--input", gold, "--deprels", "det", "--output", tmp_path / "c.tsv",
               "--min-chunk-len", "2") == 0
    assert (tmp_path / "c.tsv").read_text().splitlines() == ["ritchie-3\t4\t5\tnepotem suum",
                                                             "ritchie-5\t2\t3\tarcam ipsam"]


def _snapshot(directory: Path) -> dict[str, bytes]:
    return {str(p.relative_to(directory)): p.read_bytes() for p in sorted(directory.rglob("*")) if p.is_file()}


def test_pipeline_is_deterministic_across_job_counts(project, tmp_path):
    _, manifest = project
    assert run("--manifest", manifest, "--out", tmp_path / "a", "pipeline") == 0
    assert run("--manifest", manifest, "--out", tmp_path / "b", "--jobs", "2", "pipeline") == 0
    a, b = _snapshot(tmp_path / "a"), _snapshot(tmp_path / "b")
    assert a == b
    for name in ("merged/merged-train.conllu", "models/lemmatizer.json", "models/tagger.json",
                 "pred/merged-dev.conllu", "eval/dev.json", "eval/test.txt", "chunks/merged-dev.tsv",
                 "ner/ner.json", "corpus/corpus.txt", "corpus/corpus-report.json", "tsv/perseus-train.tsv"):
        assert name in a


def test_pipeline_needs_manifest(capsys):
    assert run("pipeline") == 1
    assert "needs --manifest" in capsys.readouterr().err
