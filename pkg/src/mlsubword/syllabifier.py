"""Rule-based Malayalam syllabification and '+'-marker subword tokens.

A word is cut left to right into syllables of four shapes (C = consonant,
H = virama, M = vowel sign, S = anuswara/visarga/chillu, V = vowel)::

    Type1   V S?                 word-initial only
    Type2   C M? S?
    Type3   (C H)+ C M? S?
    Type4   (C H)* C (u)? H      word-final only

Each step takes the longest match. Every syllable but the last of a word
is emitted with a trailing ``+`` so that words can be glued back together
after decoding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InvalidEncoding, UnsegmentableWord
from .script_core import CharClass, CharTable, default_table, is_malayalam_word, normalize_string

MARKER = "+"
VOWEL_SIGN_U = "\u0d41"


class SyllableType(enum.IntEnum):
    Type1 = 1
    Type2 = 2
    Type3 = 3
    Type4 = 4


@dataclass(frozen=True)
class Syllable:
    text: str
    stype: SyllableType
    joins_next: bool

    @property
    def token(self) -> str:
        return self.text + MARKER if self.joins_next else self.text


@dataclass(frozen=True)
class BoundaryMarkers:
    """Sentinels used when rendering tagged words; never part of token text."""

    bow: str = "<BoW>"
    eow: str = "<EoW>"
    bos: str = "<BoS>"
    eos: str = "<EoS>"


BOUNDARIES = BoundaryMarkers()


def _scan(word: str, table: CharTable) -> list[tuple[int, int, SyllableType]]:
    cls = [table.classify(c) for c in word]
    n = len(word)
    spans = []
    i = 0
    while i < n:
        c = cls[i]
        if c is CharClass.Vowel:
            if i != 0:
                raise UnsegmentableWord(word, i, "independent vowel inside a word")
            k = i + 1
            if k < n and cls[k].is_special_consonant:
                k += 1
            spans.append((i, k, SyllableType.Type1))
            i = k
            continue
        if c is not CharClass.Consonant:
            raise UnsegmentableWord(word, i, f"{c.value} cannot start a syllable")

        j = i
        clusters = 0
        while j + 2 < n and cls[j + 1] is CharClass.Virama and cls[j + 2] is CharClass.Consonant:
            j += 2
            clusters += 1
        k = j + 1
        if k < n and cls[k] is CharClass.Virama:
            if k + 1 == n:
                spans.append((i, n, SyllableType.Type4))
                break
            raise UnsegmentableWord(word, k + 1, "dead consonant not followed by a consonant")
        if k < n and cls[k] is CharClass.VowelSign:
            k += 1
            # samvruthokaram: consonant + u sign + virama closing the word
            if word[k - 1] == VOWEL_SIGN_U and k + 1 == n and cls[k] is CharClass.Virama:
                spans.append((i, n, SyllableType.Type4))
                break
        if k < n and cls[k].is_special_consonant:
            k += 1
        spans.append((i, k, SyllableType.Type3 if clusters else SyllableType.Type2))
        i = k
    return spans


def syllabify(word: str, table: CharTable | None = None) -> list[Syllable]:
    """Split one word into syllables.

    Raises UnsegmentableWord (with the failing offset) when some part of the
    word fits none of the four syllable shapes.
    """
    table = table or default_table()
    word = normalize_string(word)
    if not word:
        return []
    spans = _scan(word, table)
    last = len(spans) - 1
    return [Syllable(word[a:b], t, idx != last) for idx, (a, b, t) in enumerate(spans)]


def tag_boundaries(word: str, table: CharTable | None = None) -> str:
    """Render a word with explicit syllable sentinels (for inspection)."""
    syls = syllabify(word, table)
    inner = "".join(f"{BOUNDARIES.bos}{s.text}{BOUNDARIES.eos}" for s in syls)
    return f"{BOUNDARIES.bow}{inner}{BOUNDARIES.eow}"


def tokenize_word(word: str, table: CharTable | None = None) -> list[str]:
    table = table or default_table()
    word = normalize_string(word)
    if not is_malayalam_word(word, table):
        return [word] if word else []
    return [s.token for s in syllabify(word, table)]


@dataclass
class Diagnostic:
    kind: str
    item: str
    offset: int | None = None
    line_no: int | None = None
    message: str = ""

    def __str__(self):
        loc = f"line {self.line_no}: " if self.line_no is not None else ""
        off = f" @{self.offset}" if self.offset is not None else ""
        return f"{loc}{self.kind}\t{self.item}{off}\t{self.message}".rstrip()


@dataclass
class Diagnostics:
    entries: list[Diagnostic] = field(default_factory=list)

    def add(self, *args, **kwargs):
        self.entries.append(Diagnostic(*args, **kwargs))

    def count(self, kind: str | None = None) -> int:
        return sum(1 for d in self.entries if kind is None or d.kind == kind)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def tokenize_sentence(sentence: str, table: CharTable | None = None,
                      diagnostics: Diagnostics | None = None) -> list[str]:
    table = table or default_table()
    out: list[str] = []
    for word in normalize_string(sentence).split():
        if not is_malayalam_word(word, table):
            out.append(word)
            if diagnostics is not None:
                diagnostics.add("pass_through", word)
            continue
        try:
            out.extend(tokenize_word(word, table))
        except UnsegmentableWord as exc:
            out.append(word)
            if diagnostics is not None:
                diagnostics.add("unsegmentable", word, exc.offset, message=exc.reason)
    return out


def detokenize(tokens: Iterable[str], diagnostics: Diagnostics | None = None) -> str:
    words = []
    pending = ""
    for tok in tokens:
        if tok.endswith(MARKER) and len(tok) > 1:
            pending += tok[:-1]
        else:
            words.append(pending + tok)
            pending = ""
    if pending:
        words.append(pending)
        if diagnostics is not None:
            diagnostics.add("dangling_marker", pending)
    return " ".join(words)


def tokenize_corpus(lines: Iterable[str | bytes], mode: str = "syllable",
                    table: CharTable | None = None,
                    diagnostics: Diagnostics | None = None) -> Iterator[str]:
    """Yield one output line per input line (without newline).

    Lines that are not valid UTF-8 come out empty so that line numbering of
    parallel files stays aligned; each one is recorded as a diagnostic.
    """
    if mode not in ("word", "syllable"):
        raise ValueError(f"unknown mode {mode!r}")
    table = table or default_table()
    for no, line in enumerate(lines, 1):
        if isinstance(line, (bytes, bytearray)):
            try:
                line = bytes(line).decode("utf-8")
            except UnicodeDecodeError as exc:
                if diagnostics is not None:
                    diagnostics.add("invalid_encoding", "", line_no=no, message=str(exc))
                yield ""
                continue
        if mode == "word":
            yield " ".join(normalize_string(line).split())
            continue
        sub = Diagnostics() if diagnostics is not None else None
        toks = tokenize_sentence(line, table, sub)
        if sub is not None:
            for d in sub:
                d.line_no = no
                diagnostics.entries.append(d)
        yield " ".join(toks)


def read_encoded_lines(path) -> Iterator[bytes]:
    with open(path, "rb") as f:
        for raw in f:
            yield raw.rstrip(b"\r\n")


def decode_lines(path, diagnostics: Diagnostics | None = None) -> Iterator[str]:
    """Decode a file line by line, dropping undecodable lines."""
    for no, raw in enumerate(read_encoded_lines(path), 1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            if diagnostics is not None:
                diagnostics.add("invalid_encoding", "", line_no=no, message=str(exc))


__all__ = [
    "MARKER", "SyllableType", "Syllable", "BoundaryMarkers", "syllabify", "tokenize_word",
    "tokenize_sentence", "detokenize", "tokenize_corpus", "Diagnostic", "Diagnostics",
    "tag_boundaries", "InvalidEncoding",
]
