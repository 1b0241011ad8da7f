"""Back-off n-gram language models over word or syllable tokens.

Probabilities are stored ARPA-style: log10 probabilities for every kept
k-gram and log10 back-off weights for every history. A zero probability is
written as -99, the usual ARPA stand-in for log(0).
"""

from __future__ import annotations

import io
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, TextIO

from .errors import DegenerateCorpus, EmptyCorpus, InvalidOrder, MalformedArpa

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
LOG_ZERO = -99.0


def log10(p: float) -> float:
    return math.log10(p) if p > 0 else LOG_ZERO


@dataclass
class CountTable:
    order: int
    counts: Counter = field(default_factory=Counter)

    def __add__(self, other: "CountTable") -> "CountTable":
        if other.order != self.order:
            raise ValueError("cannot merge count tables of different order")
        return CountTable(self.order, self.counts + other.counts)

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, gram):
        if isinstance(gram, str):
            gram = (gram,)
        return self.counts.get(tuple(gram), 0)

    def of_order(self, k: int) -> dict[tuple[str, ...], int]:
        return {g: c for g, c in self.counts.items() if len(g) == k}


def _sentences(corpus: Iterable[str | Iterable[str]]):
    for line in corpus:
        toks = line.split() if isinstance(line, str) else list(line)
        if toks:
            yield toks


def count_ngrams(corpus: Iterable[str | Iterable[str]], order: int) -> CountTable:
    """Count all k-grams, k = 1..order, with <s>/</s> around each line.

    Blank lines are ignored.
    """
    if order < 1:
        raise InvalidOrder(f"order must be >= 1, got {order}")
    counts: Counter = Counter()
    for toks in _sentences(corpus):
        seq = [BOS, *toks, EOS]
        n = len(seq)
        for i in range(n):
            for k in range(1, order + 1):
                if i + k > n:
                    break
                counts[tuple(seq[i:i + k])] += 1
    return CountTable(order, counts)


@dataclass(frozen=True)
class WittenBell:
    name = "witten_bell"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class AddK:
    k: float = 1.0
    name = "add_k"

    def __str__(self):
        return f"add_k:{self.k:g}"


def parse_smoothing(value) -> WittenBell | AddK:
    """Accept ``witten_bell``, ``add_k`` (k = 1) or ``add_k:K``."""
    if isinstance(value, (WittenBell, AddK)):
        return value
    text = str(value).strip()
    if text == "witten_bell":
        return WittenBell()
    if text.startswith("add_k"):
        _, _, k = text.partition(":")
        k = float(k) if k else 1.0
        if k < 0:
            raise ValueError("add_k constant must be >= 0")
        return AddK(k)
    raise ValueError(f"unknown smoothing {value!r}")


class NgramModel:
    def __init__(self, order: int, logprob: Mapping[tuple, float],
                 backoff: Mapping[tuple, float] | None = None,
                 linear: Mapping[tuple, float] | None = None):
        self.order = order
        self.logprob = dict(logprob)
        self.backoff = dict(backoff or {})
        # probabilities as estimated, before the log10 round trip
        self.linear = dict(linear or {})
        self.vocabulary = frozenset(g[0] for g in self.logprob if len(g) == 1)

    @property
    def predictable(self) -> list[str]:
        """Tokens that can be predicted (everything but <s>)."""
        return sorted(self.vocabulary - {BOS})

    def map_token(self, tok: str) -> str:
        return tok if tok in self.vocabulary else UNK

    def cond_logprob(self, word: str, history: Iterable[str] = ()) -> float:
        """log10 P(word | history), backing off through shorter histories."""
        word = self.map_token(word)
        h = tuple(self.map_token(t) for t in history)
        if self.order > 1:
            h = h[len(h) - (self.order - 1):] if len(h) > self.order - 1 else h
        else:
            h = ()
        total = 0.0
        while True:
            lp = self.logprob.get(h + (word,))
            if lp is not None:
                return max(total + lp, LOG_ZERO) if lp > LOG_ZERO else LOG_ZERO
            if not h:
                return LOG_ZERO
            total += self.backoff.get(h, 0.0)
            h = h[1:]

    def prob(self, word: str, history: Iterable[str] = ()) -> float:
        h = tuple(self.map_token(t) for t in history)[-(self.order - 1):] if self.order > 1 else ()
        direct = self.linear.get(h + (self.map_token(word),))
        if direct is not None:
            return direct
        lp = self.cond_logprob(word, history)
        return 0.0 if lp <= LOG_ZERO else 10.0 ** lp

    def grams(self, k: int) -> list[tuple[str, ...]]:
        return sorted(g for g in self.logprob if len(g) == k)

    def counts_by_order(self) -> dict[int, int]:
        out = Counter(len(g) for g in self.logprob)
        return {k: out.get(k, 0) for k in range(1, self.order + 1)}

    def contexts(self) -> list[tuple[str, ...]]:
        """Histories with at least one stored continuation."""
        hs = {g[:-1] for g in self.logprob if len(g) > 1}
        return sorted(hs)

    def __eq__(self, other):
        return (isinstance(other, NgramModel) and self.order == other.order
                and self.logprob == other.logprob and self.backoff == other.backoff)


def estimate_model(counts: CountTable, smoothing="witten_bell",
                   cutoffs: Mapping[int, int] | None = None) -> NgramModel:
    """Estimate a back-off model from ``counts``.

    Each history h keeps discounted probabilities for its continuations; the
    mass left over is handed to the shorter history through a back-off
    weight chosen so that P(. | h) sums to one over the vocabulary.

    ``cutoffs`` maps an order k >= 2 to the minimum count a k-gram needs to
    be stored; dropped mass also goes to back-off.
    """
    smoothing = parse_smoothing(smoothing)
    cutoffs = dict(cutoffs or {})
    n = counts.order
    unigrams = {g[0]: c for g, c in counts.counts.items() if len(g) == 1 and g[0] != BOS}
    if not unigrams:
        raise DegenerateCorpus("no tokens to estimate a model from")
    vocab = sorted(set(unigrams) | {EOS, UNK})
    nv = len(vocab)

    logprob: dict[tuple, float] = {(BOS,): LOG_ZERO}
    linear: dict[tuple, float] = {}
    backoff: dict[tuple, float] = {}
    total = sum(unigrams.values())
    types = len(unigrams)
    for w in vocab:
        c = unigrams.get(w, 0)
        if isinstance(smoothing, WittenBell):
            p = (c + types / nv) / (total + types)
        else:
            p = (c + smoothing.k) / (total + smoothing.k * nv)
        logprob[(w,)] = log10(p)
        linear[(w,)] = p

    model = NgramModel(n, logprob, linear=linear)
    for k in range(2, n + 1):
        cont: dict[tuple, dict[str, int]] = defaultdict(dict)
        for g, c in counts.counts.items():
            if len(g) == k:
                cont[g[:-1]][g[-1]] = c
        min_count = cutoffs.get(k, 1)
        for h in sorted(cont):
            follow = cont[h]
            if h not in model.logprob:
                continue  # history itself was cut
            c_h = sum(follow.values())
            t_h = len(follow)
            kept = {w: c for w, c in follow.items() if c >= min_count}
            if isinstance(smoothing, WittenBell):
                alpha = {w: c / (c_h + t_h) for w, c in kept.items()}
            else:
                alpha = {w: (c + smoothing.k) / (c_h + smoothing.k * nv) for w, c in kept.items()}
            reserved = max(0.0, 1.0 - sum(alpha.values()))
            lower = sum(model.prob(w, h[1:]) for w in kept)
            if reserved <= 1e-15 or not kept:
                bow = 0.0 if kept else 1.0
            elif 1.0 - lower <= 1e-12:
                # nothing left to back off to: give the reserve to seen words
                s = sum(alpha.values())
                alpha = {w: a / s for w, a in alpha.items()}
                bow = 0.0
            else:
                bow = reserved / (1.0 - lower)
            for w, a in alpha.items():
                model.logprob[h + (w,)] = log10(a)
                model.linear[h + (w,)] = a
            if kept:
                model.backoff[h] = log10(bow)
    return model


def train(corpus: Iterable[str], order: int, smoothing="witten_bell",
          cutoffs: Mapping[int, int] | None = None) -> NgramModel:
    return estimate_model(count_ngrams(corpus, order), smoothing, cutoffs)


def sentence_logprob(model: NgramModel, tokens: Iterable[str] | str) -> float:
    if isinstance(tokens, str):
        tokens = tokens.split()
    seq = [BOS, *tokens, EOS]
    total = 0.0
    for i in range(1, len(seq)):
        total += model.cond_logprob(seq[i], seq[max(0, i - model.order + 1):i])
    return total


def corpus_logprob(model: NgramModel, corpus: Iterable[str]) -> tuple[float, int]:
    """Total log10 probability and number of predicted tokens (incl. </s>)."""
    total = 0.0
    predicted = 0
    for toks in _sentences(corpus):
        total += sentence_logprob(model, toks)
        predicted += len(toks) + 1
    return total, predicted


def perplexity(model: NgramModel, corpus: Iterable[str]) -> float:
    total, predicted = corpus_logprob(model, corpus)
    if predicted == 0:
        raise EmptyCorpus("no sentences to evaluate")
    return 10.0 ** (-total / predicted)


class _MassTable:
    """Per-history probability mass, computed from the stored tables.

    The mass at h is what is stored directly plus the back-off weight times
    whatever the shorter history gives the tokens not stored at h.
    """

    def __init__(self, model: NgramModel):
        self.model = model
        self.memo: dict[tuple, float] = {}
        self.by_ctx: dict[tuple, list[str]] = defaultdict(list)
        for g in model.logprob:
            if len(g) > 1:
                self.by_ctx[g[:-1]].append(g[-1])

    def __call__(self, h: tuple[str, ...]) -> float:
        if h in self.memo:
            return self.memo[h]
        model = self.model
        if not h:
            m = sum(model.prob(w) for w in model.predictable)
        else:
            seen = self.by_ctx.get(h, [])
            direct = sum(10.0 ** model.logprob[h + (w,)] for w in seen
                         if model.logprob[h + (w,)] > LOG_ZERO)
            lower_seen = sum(model.prob(w, h[1:]) for w in seen)
            bow = model.backoff.get(h, 0.0)
            bw = 0.0 if bow <= LOG_ZERO else 10.0 ** bow
            m = direct + bw * (self(h[1:]) - lower_seen)
        self.memo[h] = m
        return m


def context_mass(model: NgramModel, history: Iterable[str]) -> float:
    """Sum of P(v | history) over every predictable token v."""
    return _MassTable(model)(tuple(history))


def normalization_errors(model: NgramModel) -> dict[tuple, float]:
    """|sum_v P(v|h) - 1| for the empty history and every stored history."""
    mass = _MassTable(model)
    return {h: abs(mass(h) - 1.0) for h in [(), *model.contexts()]}


def _fmt(x: float) -> str:
    return f"{x:.7f}"


def format_arpa(model: NgramModel) -> str:
    buf = io.StringIO()
    counts = model.counts_by_order()
    buf.write("\n\\data\\\n")
    for k in range(1, model.order + 1):
        buf.write(f"ngram {k}={counts[k]}\n")
    for k in range(1, model.order + 1):
        buf.write(f"\n\\{k}-grams:\n")
        for g in model.grams(k):
            line = f"{_fmt(model.logprob[g])}\t{' '.join(g)}"
            if k < model.order and g in model.backoff:
                line += f"\t{_fmt(model.backoff[g])}"
            buf.write(line + "\n")
    buf.write("\n\\end\\\n")
    return buf.getvalue()


def write_arpa(model: NgramModel, out: str | Path | TextIO) -> None:
    text = format_arpa(model)
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        out.write(text)


def read_arpa(src: str | Path | TextIO) -> NgramModel:
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8") as f:
            return read_arpa(f)
    lines = src.read().split("\n")
    i = 0

    def err(msg):
        raise MalformedArpa(i + 1, msg)

    while i < len(lines) and lines[i].strip() != "\\data\\":
        if lines[i].strip():
            err("expected \\data\\")
        i += 1
    if i == len(lines):
        err("missing \\data\\ header")
    i += 1
    declared: dict[int, int] = {}
    while i < len(lines) and lines[i].strip().startswith("ngram "):
        key, _, val = lines[i].strip()[6:].partition("=")
        try:
            declared[int(key)] = int(val)
        except ValueError:
            err(f"bad count line {lines[i]!r}")
        i += 1
    if not declared:
        err("no ngram counts declared")
    order = max(declared)
    logprob: dict[tuple, float] = {}
    backoff: dict[tuple, float] = {}
    seen_end = False
    k = None
    got: Counter = Counter()
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if line == "\\end\\":
            seen_end = True
            break
        if line.startswith("\\") and line.endswith("-grams:"):
            try:
                k = int(line[1:-7])
            except ValueError:
                err(f"bad section header {line!r}")
            if k not in declared:
                err(f"undeclared section {line!r}")
            i += 1
            continue
        if k is None:
            err(f"entry outside any section: {line!r}")
        parts = lines[i].rstrip().split("\t")
        if len(parts) == 1:
            parts = line.split()
            parts = [parts[0], " ".join(parts[1:1 + k])] + parts[1 + k:]
        if len(parts) not in (2, 3):
            err(f"bad entry {line!r}")
        gram = tuple(parts[1].split())
        if len(gram) != k:
            err(f"expected a {k}-gram, got {parts[1]!r}")
        try:
            logprob[gram] = float(parts[0])
            if len(parts) == 3:
                backoff[gram] = float(parts[2])
        except ValueError:
            err(f"bad number in {line!r}")
        got[k] += 1
        i += 1
    if not seen_end:
        raise MalformedArpa(len(lines), "missing \\end\\ (truncated file?)")
    for kk, c in declared.items():
        if got[kk] != c:
            raise MalformedArpa(i + 1, f"declared {c} {kk}-grams, found {got[kk]}")
    return NgramModel(order, logprob, backoff)


@dataclass(frozen=True)
class ModelFootprint:
    ngram_counts: Mapping[int, int]
    byte_size: int

    @property
    def total_ngrams(self) -> int:
        return sum(self.ngram_counts.values())


def model_footprint(model: NgramModel) -> ModelFootprint:
    size = len(format_arpa(model).encode("utf-8"))
    return ModelFootprint(model.counts_by_order(), size)
