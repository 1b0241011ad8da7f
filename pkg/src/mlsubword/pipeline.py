"""Experiment grid: dedup, tokenize, build lexicons, train LMs, report.

A config is a ``key = value`` text file::

    lm_corpus = data/lm.txt
    train_transcripts = data/train.txt
    tests = data/test_a.txt, data/test_b.txt
    modes = word, syllable
    orders = 2, 3, 4
    thresholds = none, 5, 4, 3
    smoothing = witten_bell
    output_dir = out/

Optional keys: ``word_hypotheses`` and ``syllable_hypotheses`` (one file per
test set, same order as ``tests``; ``-`` skips a set). Relative paths are
taken relative to the config file.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import ngram_lm
from .errors import ConfigError, MlsubwordError
from .evaluation import FrequencyTable, dedup_corpus, frequency_profile, oov_rate, score_corpus
from .lexicon import Lexicon, build_word_lexicon, derive_syllable_lexicon, format_lexicon
from .syllabifier import MARKER, Diagnostics, decode_lines, tokenize_corpus

MODES = ("word", "syllable")
FAILED = "\u2014"  # em dash marks a failed cell


def _parse_threshold(text: str) -> int | None:
    text = text.strip().lower()
    if text in ("none", "-", ""):
        return None
    value = int(text)
    if value < 1:
        raise ValueError
    return value


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


@dataclass
class ExperimentConfig:
    lm_corpus: Path | None = None
    train_transcripts: Path | None = None
    tests: list[Path] = field(default_factory=list)
    word_hypotheses: list[Path | None] = field(default_factory=list)
    syllable_hypotheses: list[Path | None] = field(default_factory=list)
    modes: list[str] = field(default_factory=lambda: list(MODES))
    orders: list[int] = field(default_factory=lambda: [2, 3, 4])
    thresholds: list[int | None] = field(default_factory=lambda: [None, 5, 4, 3])
    smoothing: str = "witten_bell"
    output_dir: Path | None = None

    KEYS = ("lm_corpus", "train_transcripts", "tests", "word_hypotheses",
            "syllable_hypotheses", "modes", "orders", "thresholds", "smoothing", "output_dir")

    @classmethod
    def from_pairs(cls, pairs: dict[str, str], base: Path = Path("."),
                   into: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        cfg = into or cls()
        for key, value in pairs.items():
            if key not in cls.KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                cfg._set(key, value, base)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {value!r}") from None
        return cfg

    def _set(self, key: str, value: str, base: Path):
        def path(v):
            return None if v == "-" else (base / v)

        if key in ("lm_corpus", "train_transcripts", "output_dir"):
            setattr(self, key, base / value.strip())
        elif key == "tests":
            self.tests = [base / v for v in _split(value)]
        elif key in ("word_hypotheses", "syllable_hypotheses"):
            setattr(self, key, [path(v) for v in _split(value)])
        elif key == "modes":
            self.modes = _split(value)
        elif key == "orders":
            self.orders = [int(v) for v in _split(value)]
        elif key == "thresholds":
            self.thresholds = [_parse_threshold(v) for v in _split(value)]
        elif key == "smoothing":
            self.smoothing = value.strip()

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_pairs(parse_config_text(text), path.parent)

    @property
    def test_names(self) -> list[str]:
        return [p.stem for p in self.tests]

    def validate(self) -> None:
        """Raise ConfigError on anything that would fail before real work."""
        for name in ("lm_corpus", "train_transcripts", "output_dir"):
            if getattr(self, name) is None:
                raise ConfigError(f"missing required key {name}")
        if not self.tests:
            raise ConfigError("no test sets configured")
        if len(set(self.test_names)) != len(self.tests):
            raise ConfigError("test set file names must be distinct")
        bad = [m for m in self.modes if m not in MODES]
        if bad or not self.modes:
            raise ConfigError(f"modes must be a subset of {MODES}, got {self.modes}")
        if not self.orders or any(o < 1 for o in self.orders):
            raise ConfigError(f"orders must be >= 1, got {self.orders}")
        if not self.thresholds:
            raise ConfigError("no lexicon thresholds configured")
        try:
            ngram_lm.parse_smoothing(self.smoothing)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        out = self.output_dir.resolve()
        inputs = [self.lm_corpus, self.train_transcripts, *self.tests,
                  *(p for p in self.word_hypotheses + self.syllable_hypotheses if p)]
        for p in inputs:
            if not p.is_file():
                raise ConfigError(f"input file not found: {p}")
            rp = p.resolve()
            if rp == out or out in rp.parents:
                raise ConfigError(f"input {p} lies inside the output directory")
        for key in ("word_hypotheses", "syllable_hypotheses"):
            hyps = getattr(self, key)
            if hyps and len(hyps) != len(self.tests):
                raise ConfigError(f"{key} needs one entry per test set")


def parse_config_text(text: str) -> dict[str, str]:
    pairs = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {no}: expected 'key = value'")
        pairs[key.strip()] = value.strip()
    return pairs


@dataclass
class Cell:
    mode: str
    threshold: int | None
    order: int
    lexicon_size: int | None = None
    lexicon_path: str | None = None
    model_path: str | None = None
    ngram_counts: dict[int, int] | None = None
    model_bytes: int | None = None
    oov: dict[str, float] = field(default_factory=dict)
    perplexity: dict[str, float] = field(default_factory=dict)
    wer: dict[str, float] = field(default_factory=dict)
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class ExperimentReport:
    test_names: list[str] = field(default_factory=list)
    thresholds: list[int | None] = field(default_factory=list)
    cells: list[Cell] = field(default_factory=list)
    dedup_removed: int = 0
    diagnostics: list[str] = field(default_factory=list)

    @property
    def failures(self) -> list[Cell]:
        return [c for c in self.cells if c.failed]


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class _Store:
    """Writes artifacts under content-derived names; repeated content is stored once."""

    def __init__(self, root: Path):
        self.root = root

    def put(self, kind: str, text: str, suffix: str = ".txt") -> Path:
        path = self.root / kind / f"{kind}-{_digest(text)}{suffix}"
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(path.suffix + ".tmp")
            tmp.write_text(text, encoding="utf-8", newline="\n")
            tmp.replace(path)
        return path


def _read(path: Path, diag: Diagnostics) -> list[str]:
    return list(decode_lines(path, diag))


def threshold_label(t: int | None) -> str:
    return "none" if t is None else str(t)


def restrict_to_vocab(lines: Iterable[str], vocab) -> list[str]:
    """Replace tokens outside ``vocab`` with the unknown-word sentinel."""
    return [" ".join(t if t in vocab else ngram_lm.UNK for t in line.split()) for line in lines]


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run the (mode, threshold, order) grid and write every artifact.

    LMs are trained on the deduplicated corpus with tokens outside the
    cell's lexicon mapped to <unk>, so a model never knows words its
    lexicon cannot pronounce.
    """
    config.validate()
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    store = _Store(out / "artifacts")
    diag = Diagnostics()
    report = ExperimentReport(config.test_names, list(config.thresholds))

    lm_lines = _read(config.lm_corpus, diag)
    train_lines = _read(config.train_transcripts, diag)
    tests = {name: _read(p, diag) for name, p in zip(config.test_names, config.tests)}
    all_test_lines = [line for lines in tests.values() for line in lines]
    dedup = dedup_corpus(lm_lines, all_test_lines)
    report.dedup_removed = dedup.removed
    corpus = dedup.lines
    store.put("corpus", "".join(line + "\n" for line in corpus))

    freqs = FrequencyTable.from_lines(corpus)
    profile = frequency_profile(corpus)
    with open(out / "frequency_profile.tsv", "w", encoding="utf-8", newline="\n") as f:
        profile.write(f)

    base_words = FrequencyTable.from_lines(train_lines).keys()
    streams = {m: list(tokenize_corpus(corpus, m)) for m in config.modes}
    for m, toks in streams.items():
        store.put(f"tokens-{m}", "".join(t + "\n" for t in toks))
    test_streams = {m: {n: list(tokenize_corpus(lines, m)) for n, lines in tests.items()}
                    for m in config.modes}

    hyps = {"word": config.word_hypotheses, "syllable": config.syllable_hypotheses}
    wer_by_mode: dict[str, dict[str, float]] = {}
    for mode in config.modes:
        wer_by_mode[mode] = {}
        for name, hp in zip(config.test_names, hyps[mode] or []):
            if hp is None:
                continue
            try:
                rep = score_corpus(tests[name], _read(hp, diag), subword=mode == "syllable")
                wer_by_mode[mode][name] = rep.wer
            except (MlsubwordError, ValueError) as exc:
                report.diagnostics.append(f"wer {mode}/{name}: {exc}")

    lexicons: dict[tuple[str, int | None], Lexicon | Exception] = {}
    for t in config.thresholds:
        try:
            wl = build_word_lexicon(base_words, freqs, t)
            lexicons[("word", t)] = wl
            if "syllable" in config.modes:
                lexicons[("syllable", t)] = derive_syllable_lexicon(wl)
        except MlsubwordError as exc:
            lexicons[("word", t)] = lexicons[("syllable", t)] = exc

    for mode in config.modes:
        for t in config.thresholds:
            lex = lexicons[(mode, t)]
            lex_path = None
            restricted = None
            if not isinstance(lex, Exception):
                lex_path = store.put(f"lexicon-{mode}", format_lexicon(lex))
                restricted = restrict_to_vocab(streams[mode], lex.tokens)
            for order in sorted(config.orders):
                cell = Cell(mode, t, order)
                report.cells.append(cell)
                if isinstance(lex, Exception):
                    cell.error = f"lexicon: {lex}"
                    continue
                try:
                    cell.lexicon_size = len(lex)
                    cell.lexicon_path = str(lex_path.relative_to(out))
                    counts = ngram_lm.count_ngrams(restricted, order)
                    model = ngram_lm.estimate_model(counts, config.smoothing)
                    arpa = ngram_lm.format_arpa(model)
                    cell.model_path = str(store.put(f"lm-{mode}", arpa, ".arpa").relative_to(out))
                    fp = ngram_lm.model_footprint(model)
                    cell.ngram_counts = dict(fp.ngram_counts)
                    cell.model_bytes = fp.byte_size
                    for name, lines in tests.items():
                        unit_lines = test_streams[mode][name]
                        cell.oov[name] = oov_rate(lex, lines, unit=mode).oov_rate
                        cell.perplexity[name] = ngram_lm.perplexity(model, unit_lines)
                    cell.wer = dict(wer_by_mode.get(mode, {}))
                except MlsubwordError as exc:
                    cell.error = f"{type(exc).__name__}: {exc}"

    report.diagnostics += [str(d) for d in diag]
    for fmt, name in (("tsv", "report.tsv"), ("markdown", "report.md")):
        (out / name).write_text(render_report(report, fmt), encoding="utf-8", newline="\n")
    return report


def _columns(report: ExperimentReport) -> list[str]:
    cols = ["mode", "lexicon", "threshold", "order", "lexicon_size", "ngrams", "model_bytes"]
    for metric in ("oov", "ppl", "wer"):
        cols += [f"{metric}:{n}" for n in report.test_names]
    return cols


def _row(report: ExperimentReport, cell: Cell) -> list[str]:
    try:
        pl = f"PL{report.thresholds.index(cell.threshold) + 1}"
    except ValueError:
        pl = "?"
    head = [cell.mode, pl, threshold_label(cell.threshold), str(cell.order)]
    if cell.failed:
        return head + [FAILED] * (len(_columns(report)) - len(head))
    ngrams = "/".join(str(cell.ngram_counts[k]) for k in sorted(cell.ngram_counts))
    row = head + [str(cell.lexicon_size), ngrams, str(cell.model_bytes)]
    row += [f"{cell.oov[n]:.4f}" for n in report.test_names]
    row += [f"{cell.perplexity[n]:.2f}" for n in report.test_names]
    row += [f"{cell.wer[n]:.4f}" if n in cell.wer else "" for n in report.test_names]
    return row


def render_report(report: ExperimentReport, fmt: str = "tsv") -> str:
    """Serialize the grid; cells keep (mode, threshold, order) order."""
    cols = _columns(report)
    rank = {m: i for i, m in enumerate(MODES)}
    tpos = {t: i for i, t in enumerate(report.thresholds)}
    cells = sorted(report.cells, key=lambda c: (rank.get(c.mode, 9), tpos.get(c.threshold, 99), c.order))
    rows = [_row(report, c) for c in cells]
    notes = [f"{c.mode}/{threshold_label(c.threshold)}/{c.order}: {c.error}" for c in cells if c.failed]
    if fmt == "tsv":
        text = "".join("\t".join(r) + "\n" for r in [cols, *rows])
        return text + "".join(f"# failed {n}\n" for n in notes)
    if fmt == "markdown":
        lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        lines += ["| " + " | ".join(r) + " |" for r in rows]
        if notes:
            lines.append("")
            lines += [f"[{i}] failed {n}" for i, n in enumerate(notes, 1)]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def simulate_errors(lines: Iterable[str], rate: float, seed: int, unit: str = "word",
                    deletion_rate: float = 0.0, insertion_rate: float = 0.0,
                    vocabulary: Sequence[str] | None = None,
                    lexicon: Iterable[str] | None = None) -> list[str]:
    """Corrupt a token stream the way a recognizer might.

    Each token is substituted with probability ``rate``, deleted with
    ``deletion_rate``, and followed by an inserted token with
    ``insertion_rate``. Replacement tokens come from ``vocabulary`` (by
    default the tokens of the input) and keep the marker class of the token
    they stand for, so syllable corruption never merges or splits words by
    substitution alone.

    If ``lexicon`` is given, tokens outside it are always substituted by a
    lexicon token first: a closed-vocabulary recognizer cannot emit them.
    """
    if unit not in MODES:
        raise ValueError(f"unknown unit {unit!r}")
    for r in (rate, deletion_rate, insertion_rate):
        if not 0.0 <= r <= 1.0:
            raise ValueError("rates must lie in [0, 1]")
    lines = list(lines)
    rng = random.Random(seed)
    vocab = sorted(set(vocabulary) if vocabulary is not None else {t for l in lines for t in l.split()})
    lex = frozenset(lexicon) if lexicon is not None else None

    def pools(tokens):
        joined = [t for t in tokens if t.endswith(MARKER) and len(t) > 1]
        final = [t for t in tokens if not (t.endswith(MARKER) and len(t) > 1)]
        return joined, final

    vocab_pools = pools(vocab)
    lex_pools = pools(sorted(lex)) if lex is not None else None

    def draw(tok, pool_pair):
        joined, final = pool_pair
        pool = joined if unit == "syllable" and tok.endswith(MARKER) and len(tok) > 1 else final
        if unit == "word":
            pool = final + joined
        if not pool or pool == [tok]:
            return tok
        while True:
            cand = pool[rng.randrange(len(pool))]
            if cand != tok:
                return cand

    out = []
    for line in lines:
        toks = []
        for tok in line.split():
            if lex is not None and tok not in lex:
                tok = draw(tok, lex_pools)
            x = rng.random()
            if x < deletion_rate:
                continue
            if x < deletion_rate + rate:
                tok = draw(tok, vocab_pools)
            toks.append(tok)
            if rng.random() < insertion_rate:
                ins_pool = vocab_pools[1] or vocab_pools[0]
                if toks[-1].endswith(MARKER) and unit == "syllable":
                    ins_pool = vocab_pools[0] or ins_pool
                toks.append(ins_pool[rng.randrange(len(ins_pool))])
        out.append(" ".join(toks))
    return out


def override(config: ExperimentConfig, **values) -> ExperimentConfig:
    """Copy of ``config`` with the non-None values replaced."""
    return replace(config, **{k: v for k, v in values.items() if v is not None})


__all__ = [
    "ExperimentConfig", "ExperimentReport", "Cell", "run_experiment", "render_report",
    "simulate_errors", "parse_config_text", "restrict_to_vocab",
]
