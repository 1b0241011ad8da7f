"""Acceptance suite: one test per criterion, with a PASS/FAIL summary line each."""

import functools
import itertools
import time
from functools import lru_cache

import pytest

from conftest import ACCEPTANCE_RESULTS, SENTENCE, SENTENCE_TOKENS, SENTENCE_WORDS, seed_lines
from mlsubword.errors import UnsegmentableWord
from mlsubword.evaluation import (FrequencyTable, align, mean_word_length_syllables, oov_rate,
                                  score_subword_hypothesis, score_words, wer)
from mlsubword.lexicon import (build_word_lexicon, derive_syllable_lexicon,
                               verify_pronunciation_consistency)
from mlsubword.ngram_lm import (model_footprint, normalization_errors, read_arpa, train,
                                write_arpa)
from mlsubword.pipeline import simulate_errors
from mlsubword.script_core import is_malayalam_word, normalize_string
from mlsubword.syllabifier import detokenize, syllabify, tokenize_corpus, tokenize_sentence, tokenize_word

SEED_FILES = ["lm_corpus.txt", "train_transcripts.txt", "test_in_domain.txt", "test_out_of_domain.txt"]
THRESHOLDS = [None, 5, 4, 3]


def criterion(num, title, limit):
    """Record PASS/FAIL for the summary and enforce the time limit."""
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = fn(*args, **kwargs) or ""
                elapsed = time.perf_counter() - start
                assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
            except BaseException as exc:
                ACCEPTANCE_RESULTS[num] = (title, False, str(exc).splitlines()[0][:120] if str(exc) else "")
                raise
            ACCEPTANCE_RESULTS[num] = (title, True, f"{detail}; {elapsed:.2f}s".lstrip("; "))
        return run
    return wrap


@lru_cache(maxsize=None)
def seed_text():
    return {name: seed_lines(name) for name in SEED_FILES}


@lru_cache(maxsize=None)
def seed_lexicons():
    """PL1..PL4 word and syllable lexicons built from the seed corpus."""
    text = seed_text()
    base = FrequencyTable.from_lines(text["train_transcripts.txt"]).keys()
    freqs = FrequencyTable.from_lines(text["lm_corpus.txt"])
    out = []
    for t in THRESHOLDS:
        words = build_word_lexicon(base, freqs, t)
        out.append((t, words, derive_syllable_lexicon(words)))
    return out


@criterion(1, "reference sentence tokenizes and detokenizes exactly", 1.0)
def test_ac01_reference_sentence():
    toks = tokenize_sentence(SENTENCE)
    assert " ".join(toks) == SENTENCE_TOKENS
    assert detokenize(toks).split() == SENTENCE_WORDS


@criterion(2, "reference lexicon rows and 9-entry syllable lexicon", 1.0)
def test_ac02_reference_lexicons():
    words = build_word_lexicon(SENTENCE_WORDS, {}, None)
    assert words["അവൻ"] == ("a", "v", "a", "n")
    syl = derive_syllable_lexicon(words)
    expected = {"അ+": "a", "വൻ": "v a n", "വ+": "v a", "ഇ+": "i", "ടു+": "t u",
                "ക+": "k a", "യി+": "j i", "ല്ല": "l l a", "ള": "ɭ a"}
    assert {t: " ".join(p) for t, p in syl.entries.items()} == expected
    return "ള → ɭ a"


@criterion(3, "round trip over every seed word type; unsegmentable < 0.5%", 10.0)
def test_ac03_round_trip_seed():
    types = set()
    for lines in seed_text().values():
        for line in lines:
            types.update(normalize_string(line).split())
    words = sorted(w for w in types if is_malayalam_word(w))
    assert sum(len(l.split()) for l in seed_text()["lm_corpus.txt"]) >= 10_000
    failures = []
    for w in words:
        try:
            toks = tokenize_word(w)
        except UnsegmentableWord as exc:
            assert exc.word == w and 0 <= exc.offset < len(w) and exc.reason
            failures.append(exc)
            continue
        assert detokenize(toks) == w, w
        assert "".join(s.text for s in syllabify(w)) == w
    rate = len(failures) / len(words)
    assert rate < 0.005, f"{len(failures)} of {len(words)} types unsegmentable"
    return f"{len(words)} types, {len(failures)} unsegmentable ({100 * rate:.2f}%)"


@criterion(4, "zero pronunciation violations for every PL pair", 10.0)
def test_ac04_compositionality():
    checked = 0
    for t, words, syls in seed_lexicons():
        rep = verify_pronunciation_consistency(words, syls)
        assert rep.ok, f"threshold {t}: {len(rep.violations)} violations"
        checked += rep.checked
    return f"{checked} words checked"


@criterion(5, "syllable lexicon < 0.3 x word lexicon; sizes monotone in threshold", 30.0)
def test_ac05_lexicon_trend():
    sizes = [(len(w), len(s)) for _, w, s in seed_lexicons()]
    for nw, ns in sizes:
        assert ns < 0.3 * nw, (nw, ns)
    # thresholds none, 5, 4, 3: each lower min-count admits more words
    for (w1, s1), (w2, s2) in zip(sizes, sizes[1:]):
        assert w1 < w2 and s1 <= s2
    return " ".join(f"{nw}/{ns}" for nw, ns in sizes)


@criterion(6, "OOV rate monotone under lexicon growth; syllables recover unseen words", 5.0)
def test_ac06_oov_properties():
    test = ["കലമല വലകല മലവല", "കടൽ കലമല പുലി", "അവൻ വള ഇടുകയില്ല"]
    pool = ["കലമല", "വലകല", "കടൽ", "പുലി", "അവൻ", "വള"]
    for unit in ("word", "syllable"):
        for perm in itertools.permutations(pool):
            grown = []
            prev = 1.0
            for w in perm:
                grown.append(w)
                lex = set(grown) if unit == "word" else derive_syllable_lexicon(
                    build_word_lexicon(grown, {}, None)).tokens
                rate = oov_rate(lex, test, unit=unit).oov_rate
                assert rate <= prev
                prev = rate
    # nested seed lexicons, both units, both counting modes
    tests = seed_text()["test_out_of_domain.txt"]
    for by in ("token", "type"):
        for unit, pick in (("word", 1), ("syllable", 2)):
            rates = [oov_rate(lx[pick], tests, unit=unit, by=by).oov_rate for lx in seed_lexicons()]
            assert rates == sorted(rates, reverse=True), (unit, by, rates)
    words = build_word_lexicon(["കലമല", "വലകല"], {}, None)
    syls = derive_syllable_lexicon(words)
    assert "മലവല" not in words
    assert oov_rate(syls, ["മലവല"], unit="syllable").oov_tokens == 0
    return "720 chains x 2 units"


@criterion(7, "align distance equals brute-force edit distance, exhaustive to length 5", 60.0)
def test_ac07_wer_oracle():
    seqs = [p for n in range(6) for p in itertools.product("abc", repeat=n)]

    def brute(a, b):
        @lru_cache(maxsize=None)
        def d(i, j):
            if not i or not j:
                return i + j
            return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
        return d(len(a), len(b))

    pairs = 0
    for ref in seqs:
        for hyp in seqs:
            al = align(ref, hyp)
            i, d, s = al.count("insertion"), al.count("deletion"), al.count("substitution")
            assert i + d + s == brute(ref, hyp), (ref, hyp)
            if ref:
                rep = wer(al, len(ref))
                assert rep.wer == (i + d + s) / len(ref)
                assert rep.N == rep.matches + rep.S + rep.D
            pairs += 1
    big = score_words(["a"], ["x", "y"])
    assert big.wer == 2.0
    return f"{pairs} pairs"


@criterion(8, "LM normalization, exact MLE, ARPA round trip", 10.0)
def test_ac08_lm_laws(tmp_path):
    corpora = [
        ["a b", "a b"], ["a b", "a c"], ["a b c a", "b c", "c c a b"],
        ["x m c", "y m d", "x m c c"], [" ".join("abcabdab")] * 3,
    ]
    models = 0
    for corpus in corpora:
        assert sum(len(l.split()) for l in corpus) <= 100
        for order in (1, 2, 3, 4):
            for smoothing in ("witten_bell", "add_k:0", "add_k:1"):
                m = train(corpus, order, smoothing)
                assert max(normalization_errors(m).values()) <= 1e-6
                path = tmp_path / "m.arpa"
                write_arpa(m, path)
                back = read_arpa(path)
                assert back.logprob.keys() == m.logprob.keys()
                assert all(abs(back.logprob[g] - v) <= 1e-6 for g, v in m.logprob.items())
                assert all(abs(back.backoff[g] - v) <= 1e-6 for g, v in m.backoff.items())
                models += 1
    mle = train(["a b", "a c"], 2, "add_k:0")
    assert mle.prob("b", ["a"]) == 1 / 2 and mle.prob("c", ["a"]) == 1 / 2
    assert mle.prob("a", ["<s>"]) == 1.0
    mle = train(["a b c a", "b c", "c c a b"], 2, "add_k:0")
    # hand counts: c is followed by a twice, by </s> once, by c once
    assert mle.prob("a", ["c"]) == 2 / 4 and mle.prob("</s>", ["c"]) == 1 / 4
    return f"{models} models"


@criterion(9, "syllable LM smaller at order 2 and grows faster with order", 60.0)
def test_ac09_footprint_trend():
    lm = seed_text()["lm_corpus.txt"]
    sizes = {}
    for mode in ("word", "syllable"):
        toks = list(tokenize_corpus(lm, mode))
        sizes[mode] = [model_footprint(train(toks, n)).byte_size for n in (2, 3, 4)]
    w, s = sizes["word"], sizes["syllable"]
    assert s[0] < w[0]
    for k in (1, 2):
        assert s[k] / s[k - 1] > w[k] / w[k - 1], (w, s)
    return f"word {w}, syllable {s}"


@criterion(10, "seeded corruption is deterministic; word WER >= syllable WER at >= 30% OOV", 30.0)
def test_ac10_simulated_recovery():
    lexicons = seed_lexicons()
    _, words, syls = lexicons[0]
    refs = seed_text()["test_out_of_domain.txt"]
    word_oov = oov_rate(words, refs, unit="word").oov_rate
    assert word_oov >= 0.3

    syl_lines = list(tokenize_corpus(refs, "syllable"))
    word_lines = list(tokenize_corpus(refs, "word"))

    def syllable_run():
        hyp = simulate_errors(syl_lines, 0.10, seed=2024, unit="syllable",
                              vocabulary=sorted(syls.tokens), lexicon=syls.tokens)
        return sum_reports(score_subword_hypothesis(r, h) for r, h in zip(refs, hyp))

    def word_run():
        hyp = simulate_errors(word_lines, 0.10, seed=2024, unit="word",
                              vocabulary=sorted(words.tokens), lexicon=words.tokens)
        return sum_reports(score_words(r.split(), h.split()) for r, h in zip(word_lines, hyp))

    syl_a, syl_b = syllable_run(), syllable_run()
    assert syl_a == syl_b
    word_rep = word_run()
    assert word_rep == word_run()
    assert word_rep.wer >= syl_a.wer
    return f"word OOV {word_oov:.2f}, WER word {word_rep.wer:.3f} vs syllable {syl_a.wer:.3f}"


def sum_reports(reports):
    reports = list(reports)
    total = reports[0]
    for r in reports[1:]:
        total = total + r
    return total


@criterion(11, "mean word length of the reference sentence is 3.0 syllables", 1.0)
def test_ac11_mean_word_length():
    assert mean_word_length_syllables([SENTENCE]) == 3.0


@pytest.mark.skip(reason="needs the original speech-corpus transcripts, which are not distributed")
def test_optional_original_dataset_ratios():
    """Lexicon ratios (about 0.14 down to 0.08) and 3.2 syllables per word."""
