"""Syllable subword tokenization, lexicons and n-gram LMs for Malayalam ASR."""

from .errors import MlsubwordError, UnsegmentableWord
from .evaluation import align, dedup_corpus, oov_rate, score_subword_hypothesis, wer
from .lexicon import build_word_lexicon, derive_syllable_lexicon, verify_pronunciation_consistency
from .ngram_lm import count_ngrams, estimate_model, perplexity, read_arpa, write_arpa
from .script_core import classify_char, normalize
from .syllabifier import detokenize, syllabify, tokenize_sentence, tokenize_word

__version__ = "0.1.0"
