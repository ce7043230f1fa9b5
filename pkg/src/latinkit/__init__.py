"""Latin NLP data preparation and light-weight annotation components."""
from .chunker import Chunk, noun_chunks
from .conllu import ConlluError, SentenceRecord, TokenRecord, Treebank, parse_conllu, read_conllu, write_conllu
from .edit_tree import apply_edit_tree, build_edit_tree
from .evaluate import EvalReport, evaluate
from .harmonize import TagMapConfig, TreebankHarmonizer, harmonize
from .lemmatizer import EditTreeLemmatizer, LemmaFixer, fix_lemma
from .ner import EntitySpan, NerExample, parse_crf
from .tagger import FrequencyTagger
from .text import LatinTokenizer, segment_sentences, tokenize

__version__ = "0.1.0"

__all__ = [
    "Chunk", "ConlluError", "EditTreeLemmatizer", "EntitySpan", "EvalReport", "FrequencyTagger",
    "LatinTokenizer", "LemmaFixer", "NerExample", "SentenceRecord", "TagMapConfig", "TokenRecord",
    "Treebank", "TreebankHarmonizer", "apply_edit_tree", "build_edit_tree", "evaluate", "fix_lemma",
    "harmonize", "noun_chunks", "parse_conllu", "parse_crf", "read_conllu", "segment_sentences",
    "tokenize", "write_conllu",
]
