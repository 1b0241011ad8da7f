"""Scoring and corpus statistics: WER, OOV rates, frequency profiles, dedup."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

from .errors import EmptyCorpus, EmptyReference, NoTokenizableWords, UnsegmentableWord
from .lexicon import Lexicon, LexiconKind
from .script_core import is_malayalam_word, normalize_string
from .syllabifier import Diagnostics, detokenize, syllabify, tokenize_sentence


def _words(line: str) -> list[str]:
    return normalize_string(line).split()


class FrequencyTable(Mapping[str, int]):
    def __init__(self, counts: Mapping[str, int] | None = None):
        self._counts = Counter({t: c for t, c in (counts or {}).items() if c > 0})
        self.total = sum(self._counts.values())

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "FrequencyTable":
        counts: Counter = Counter()
        for line in lines:
            counts.update(_words(line))
        return cls(counts)

    def __getitem__(self, token):
        return self._counts[token]

    def __iter__(self):
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def ranked(self) -> list[tuple[str, int]]:
        """Descending count; ties in codepoint order."""
        return sorted(self._counts.items(), key=lambda tc: (-tc[1], tc[0]))


MATCH, SUB, DEL, INS = "match", "substitution", "deletion", "insertion"


@dataclass(frozen=True)
class EditOp:
    tag: str
    ref: str | None
    hyp: str | None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[EditOp, ...]

    def count(self, tag: str) -> int:
        return sum(1 for op in self.ops if op.tag == tag)

    @property
    def distance(self) -> int:
        return sum(1 for op in self.ops if op.tag != MATCH)

    @property
    def ref_len(self) -> int:
        return sum(1 for op in self.ops if op.tag != INS)


def align(reference: Sequence[str], hypothesis: Sequence[str]) -> Alignment:
    """Minimum edit alignment with unit costs.

    Among optimal paths the backtrace (run from the end) prefers
    match, then substitution, then deletion, then insertion.
    """
    ref, hyp = list(reference), list(hypothesis)
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        d[i][0] = i
    for j in range(1, m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        ri = ref[i - 1]
        row, prev = d[i], d[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (ri != hyp[j - 1])
            row[j] = min(diag, prev[j] + 1, row[j - 1] + 1)
    ops = []
    i, j = n, m
    while i or j:
        if i and j and d[i][j] == d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]):
            tag = MATCH if ref[i - 1] == hyp[j - 1] else SUB
            ops.append(EditOp(tag, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i and d[i][j] == d[i - 1][j] + 1:
            ops.append(EditOp(DEL, ref[i - 1], None))
            i -= 1
        else:
            ops.append(EditOp(INS, None, hyp[j - 1]))
            j -= 1
    return Alignment(tuple(reversed(ops)))


@dataclass(frozen=True)
class WerReport:
    I: int
    D: int
    S: int
    N: int

    @property
    def errors(self) -> int:
        return self.I + self.D + self.S

    @property
    def wer(self) -> float:
        return self.errors / self.N

    @property
    def matches(self) -> int:
        return self.N - self.S - self.D

    def __add__(self, other: "WerReport") -> "WerReport":
        return WerReport(self.I + other.I, self.D + other.D, self.S + other.S, self.N + other.N)

    def __str__(self):
        return (f"WER {self.wer:.4f} ({100 * self.wer:.2f}%) "
                f"[I={self.I} D={self.D} S={self.S} N={self.N}]")


def wer(alignment: Alignment, n: int | None = None) -> WerReport:
    n = alignment.ref_len if n is None else n
    if n == 0:
        raise EmptyReference("reference has no words")
    return WerReport(alignment.count(INS), alignment.count(DEL), alignment.count(SUB), n)


def score_words(reference: Sequence[str], hypothesis: Sequence[str]) -> WerReport:
    return wer(align(reference, hypothesis), len(reference))


def score_subword_hypothesis(reference_text: str, hypothesis_tokens: Iterable[str] | str,
                             diagnostics: Diagnostics | None = None) -> WerReport:
    """Glue '+'-marked tokens back into words, then score at word level."""
    if isinstance(hypothesis_tokens, str):
        hypothesis_tokens = hypothesis_tokens.split()
    hyp = _words(detokenize(hypothesis_tokens, diagnostics))
    return score_words(_words(reference_text), hyp)


def score_corpus(references: Iterable[str], hypotheses: Iterable[str],
                 subword: bool = False) -> WerReport:
    """Pooled WER over parallel line streams."""
    total = None
    for ref, hyp in zip(references, hypotheses, strict=True):
        hyp_words = _words(detokenize(hyp.split())) if subword else _words(hyp)
        ref_words = _words(ref)
        al = align(ref_words, hyp_words)
        rep = WerReport(al.count(INS), al.count(DEL), al.count(SUB), len(ref_words))
        total = rep if total is None else total + rep
    if total is None or total.N == 0:
        raise EmptyReference("reference has no words")
    return total


@dataclass(frozen=True)
class OovReport:
    lexicon_size: int
    test_tokens: int
    oov_tokens: int
    unit: str = "word"
    count_by: str = "token"

    @property
    def oov_rate(self) -> float:
        return self.oov_tokens / self.test_tokens

    def __str__(self):
        return (f"unit={self.unit} by={self.count_by} lexicon={self.lexicon_size} "
                f"test={self.test_tokens} oov={self.oov_tokens} rate={self.oov_rate:.4f}")


def iter_units(lines: Iterable[str], unit: str = "word") -> Iterator[str]:
    if unit not in ("word", "syllable"):
        raise ValueError(f"unknown unit {unit!r}")
    for line in lines:
        if unit == "word":
            yield from _words(line)
        else:
            yield from tokenize_sentence(line)


def oov_rate(lexicon: Lexicon | Iterable[str], test_corpus: Iterable[str],
             unit: str = "word", by: str = "token") -> OovReport:
    """Share of test words (or syllable tokens) missing from the lexicon.

    ``by="token"`` counts running tokens; ``by="type"`` counts each
    distinct token once.
    """
    if by not in ("token", "type"):
        raise ValueError(f"unknown count mode {by!r}")
    if isinstance(lexicon, Lexicon):
        want = LexiconKind.Word if unit == "word" else LexiconKind.Syllable
        if lexicon.kind is not want:
            raise ValueError(f"a {lexicon.kind.value} lexicon cannot score unit {unit!r}")
        vocab = lexicon.tokens
    else:
        vocab = frozenset(lexicon)
    units = list(iter_units(test_corpus, unit))
    if by == "type":
        units = sorted(set(units))
    if not units:
        raise EmptyCorpus("test corpus has no tokens")
    missing = sum(1 for u in units if u not in vocab)
    return OovReport(len(vocab), len(units), missing, unit, by)


@dataclass(frozen=True)
class FrequencyProfile:
    table: FrequencyTable
    rows: tuple[tuple[int, str, int, float], ...]

    def write(self, out: TextIO) -> None:
        out.write("rank\ttoken\tcount\tcumulative_coverage\n")
        for rank, tok, c, cov in self.rows:
            out.write(f"{rank}\t{tok}\t{c}\t{cov:.6f}\n")


def frequency_profile(corpus: Iterable[str]) -> FrequencyProfile:
    table = FrequencyTable.from_lines(corpus)
    if not table.total:
        raise EmptyCorpus("corpus has no tokens")
    rows = []
    running = 0
    for rank, (tok, c) in enumerate(table.ranked(), 1):
        running += c
        rows.append((rank, tok, c, running / table.total))
    return FrequencyProfile(table, tuple(rows))


def mean_word_length_syllables(corpus: Iterable[str],
                               diagnostics: Diagnostics | None = None) -> float:
    """Mean syllables per Malayalam word; other words are skipped and logged."""
    total = words = 0
    for line in corpus:
        for w in _words(line):
            if not is_malayalam_word(w):
                if diagnostics is not None:
                    diagnostics.add("excluded", w, message="not Malayalam")
                continue
            try:
                total += len(syllabify(w))
            except UnsegmentableWord as exc:
                if diagnostics is not None:
                    diagnostics.add("excluded", w, exc.offset, message=exc.reason)
                continue
            words += 1
    if not words:
        raise NoTokenizableWords("no word could be syllabified")
    return total / words


def line_key(line: str) -> str:
    return " ".join(_words(line))


@dataclass
class DedupResult:
    lines: list[str] = field(default_factory=list)
    removed: int = 0


def dedup_corpus(lm_corpus: Iterable[str], test_transcripts: Iterable[str]) -> DedupResult:
    """Drop LM lines whose normalized text equals some test line."""
    banned = {line_key(t) for t in test_transcripts}
    banned.discard("")
    out = DedupResult()
    for line in lm_corpus:
        if line_key(line) in banned:
            out.removed += 1
        else:
            out.lines.append(line)
    return out
