"""Pronunciation lexicons for words and syllable tokens.

A word lexicon is built from a base vocabulary (e.g. the unique words of the
training transcripts) plus every corpus word whose count reaches a threshold.
The matching syllable lexicon holds the unique '+'-marked syllable tokens of
those words. Pronunciations come from a small rule-based G2P driven by a phone
table.
"""

from __future__ import annotations

import enum
import functools
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, TextIO

from .errors import DuplicateToken, EmptyBase, MalformedLine, UnmappedCodepoint, UnsegmentableWord
from .script_core import CharClass, CharTable, default_table, normalize_string
from .syllabifier import MARKER, tokenize_word


class PhoneTable:
    """Codepoint -> phone sequence map plus the inherent vowel."""

    def __init__(self, phones: Mapping[str, tuple[str, ...]], inherent: tuple[str, ...],
                 chars: CharTable | None = None):
        self.phones = dict(phones)
        self.inherent = tuple(inherent)
        self.chars = chars or default_table()

    @classmethod
    def from_lines(cls, lines: Iterable[str], chars: CharTable | None = None) -> "PhoneTable":
        phones = {}
        inherent = None
        for no, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("\t")
            value = tuple(value.split())
            if not value:
                raise MalformedLine(no, f"no phones for {key!r}")
            if key == "inherent":
                inherent = value
            elif key.upper().startswith("U+"):
                try:
                    phones[chr(int(key[2:], 16))] = value
                except ValueError:
                    raise MalformedLine(no, f"bad codepoint {key!r}") from None
            elif len(key) == 1:
                phones[key] = value
            else:
                raise MalformedLine(no, f"bad key {key!r}")
        if inherent is None:
            raise MalformedLine(0, "phone table lacks an 'inherent' row")
        return cls(phones, inherent, chars)

    @classmethod
    def from_file(cls, path: str | Path, chars: CharTable | None = None) -> "PhoneTable":
        with open(path, encoding="utf-8") as f:
            return cls.from_lines(f, chars)

    def missing(self) -> list[str]:
        """Malayalam letters/signs (other than virama) without a phone."""
        out = []
        for c in CharClass:
            if c in (CharClass.Virama, CharClass.NonMalayalam):
                continue
            out += [ch for ch in self.chars.codepoints(c) if ch not in self.phones]
        return out

    @property
    def inventory(self) -> frozenset[str]:
        inv = set(self.inherent)
        for v in self.phones.values():
            inv.update(v)
        return frozenset(inv)


@functools.lru_cache(maxsize=None)
def default_phone_table() -> PhoneTable:
    text = resources.files("mlsubword").joinpath("data/phones.tsv").read_text("utf-8")
    return PhoneTable.from_lines(text.splitlines())


def grapheme_to_phonemes(token: str, table: PhoneTable | None = None) -> list[str]:
    table = table or default_phone_table()
    chars = table.chars
    if token.endswith(MARKER) and len(token) > 1:
        token = token[:-1]
    text = normalize_string(token)
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        cls = chars.classify(ch)
        if cls is CharClass.Virama:
            # only meaningful right after a consonant, handled below
            i += 1
            continue
        if cls is CharClass.NonMalayalam or ch not in table.phones:
            raise UnmappedCodepoint(ch, token)
        out.extend(table.phones[ch])
        i += 1
        if cls is not CharClass.Consonant:
            continue
        nxt = chars.classify(text[i]) if i < n else None
        if nxt is CharClass.Virama:
            i += 1
        elif nxt is CharClass.VowelSign:
            if text[i] not in table.phones:
                raise UnmappedCodepoint(text[i], token)
            out.extend(table.phones[text[i]])
            i += 1
        else:
            out.extend(table.inherent)
    return out


class LexiconKind(enum.Enum):
    Word = "word"
    Syllable = "syllable"


@dataclass(frozen=True)
class LexiconEntry:
    token: str
    phones: tuple[str, ...]


@dataclass(frozen=True)
class Lexicon:
    kind: LexiconKind
    entries: Mapping[str, tuple[str, ...]]
    source_threshold: int | None = field(default=None, compare=False)

    def __post_init__(self):
        # keep entries sorted by codepoint order
        object.__setattr__(self, "entries", dict(sorted(self.entries.items())))

    def __len__(self):
        return len(self.entries)

    def __contains__(self, token):
        return token in self.entries

    def __iter__(self):
        return (LexiconEntry(t, p) for t, p in self.entries.items())

    def __getitem__(self, token):
        return self.entries[token]

    @property
    def tokens(self) -> frozenset[str]:
        return frozenset(self.entries)


@dataclass
class Rejection:
    token: str
    reason: str


def build_word_lexicon(base_words: Iterable[str], corpus_freqs: Mapping[str, int],
                       min_count: int | None = None, table: PhoneTable | None = None,
                       rejected: list[Rejection] | None = None) -> Lexicon:
    """Base vocabulary plus all corpus words seen at least ``min_count`` times.

    Words the G2P cannot handle are left out and appended to ``rejected``.
    """
    base = {normalize_string(w) for w in base_words} - {""}
    if not base:
        raise EmptyBase("base vocabulary is empty")
    words = set(base)
    if min_count is not None:
        if min_count < 1:
            raise ValueError("min_count must be positive")
        words |= {normalize_string(w) for w, c in corpus_freqs.items() if c >= min_count}
    entries = {}
    for w in sorted(words):
        try:
            entries[w] = tuple(grapheme_to_phonemes(w, table))
        except UnmappedCodepoint as exc:
            if rejected is not None:
                rejected.append(Rejection(w, str(exc)))
    return Lexicon(LexiconKind.Word, entries, min_count)


def derive_syllable_lexicon(word_lexicon: Lexicon, table: PhoneTable | None = None,
                            rejected: list[Rejection] | None = None) -> Lexicon:
    if word_lexicon.kind is not LexiconKind.Word:
        raise ValueError("expected a word lexicon")
    entries = {}
    for word in word_lexicon.entries:
        try:
            toks = tokenize_word(word)
        except UnsegmentableWord as exc:
            if rejected is not None:
                rejected.append(Rejection(word, str(exc)))
            continue
        for tok in toks:
            if tok not in entries:
                entries[tok] = tuple(grapheme_to_phonemes(tok, table))
    return Lexicon(LexiconKind.Syllable, entries, word_lexicon.source_threshold)


@dataclass
class Violation:
    word: str
    word_phones: tuple[str, ...]
    syllable_phones: tuple[str, ...]
    missing_tokens: tuple[str, ...] = ()


@dataclass
class ConsistencyReport:
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_pronunciation_consistency(word_lexicon: Lexicon, syllable_lexicon: Lexicon) -> ConsistencyReport:
    """Check that each word's phones equal the concatenation of its syllables' phones."""
    report = ConsistencyReport()
    for word, phones in word_lexicon.entries.items():
        try:
            toks = tokenize_word(word)
        except UnsegmentableWord:
            report.skipped.append(word)
            continue
        report.checked += 1
        missing = tuple(t for t in toks if t not in syllable_lexicon)
        joined: tuple[str, ...] = ()
        for t in toks:
            joined += syllable_lexicon.entries.get(t, ())
        if missing or joined != phones:
            report.violations.append(Violation(word, phones, joined, missing))
    return report


def format_lexicon(lexicon: Lexicon) -> str:
    return "".join(f"{tok}\t{' '.join(ph)}\n" for tok, ph in lexicon.entries.items())


def write_lexicon(lexicon: Lexicon, out: str | Path | TextIO) -> None:
    text = format_lexicon(lexicon)
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        out.write(text)


def read_lexicon(src: str | Path | TextIO, kind: LexiconKind | None = None) -> Lexicon:
    """Read ``token<TAB>phones`` lines.

    Without an explicit ``kind``, a lexicon with any '+'-marked token is a
    syllable lexicon.
    """
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8") as f:
            return read_lexicon(f, kind)
    entries: dict[str, tuple[str, ...]] = {}
    for no, line in enumerate(src, 1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        tok, sep, phones = line.partition("\t")
        if not sep or not tok or not phones.split():
            raise MalformedLine(no, f"expected 'token<TAB>phones', got {line!r}")
        if tok in entries:
            raise DuplicateToken(no, f"duplicate token {tok!r}")
        entries[tok] = tuple(phones.split())
    if kind is None:
        marked = any(t.endswith(MARKER) and len(t) > 1 for t in entries)
        kind = LexiconKind.Syllable if marked else LexiconKind.Word
    return Lexicon(kind, entries)


def lexicon_from_text(text: str, kind: LexiconKind | None = None) -> Lexicon:
    return read_lexicon(io.StringIO(text), kind)
