"""Malayalam character classes and text normalization.

The class of every codepoint comes from a tab-separated table
(``data/char_classes.tsv`` by default); anything the table does not list is
``NonMalayalam``.
"""

from __future__ import annotations

import enum
import functools
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import InvalidEncoding, MalformedLine

ZWJ = "\u200d"
ZWNJ = "\u200c"
VIRAMA = "\u0d4d"
# Zero-width code points that carry no phonemic content.
ZERO_WIDTH = frozenset("\u200b\u200c\u200d\u2060\ufeff")


class CharClass(enum.Enum):
    Vowel = "Vowel"
    VowelSign = "VowelSign"
    Consonant = "Consonant"
    Anuswara = "Anuswara"
    Visarga = "Visarga"
    Chillu = "Chillu"
    Virama = "Virama"
    NonMalayalam = "NonMalayalam"

    @property
    def is_special_consonant(self) -> bool:
        return self in _SPECIAL


_SPECIAL = frozenset({CharClass.Anuswara, CharClass.Visarga, CharClass.Chillu})


def is_special_consonant(cls: CharClass) -> bool:
    return cls in _SPECIAL


class CharTable:
    """Immutable codepoint -> CharClass map."""

    def __init__(self, mapping: dict[int, CharClass]):
        self._map = dict(mapping)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "CharTable":
        mapping = {}
        for no, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].upper().startswith("U+"):
                raise MalformedLine(no, f"expected 'U+XXXX<TAB>Class', got {raw!r}")
            try:
                cp = int(parts[0][2:], 16)
                mapping[cp] = CharClass(parts[1].strip())
            except ValueError as exc:
                raise MalformedLine(no, str(exc)) from None
        return cls(mapping)

    @classmethod
    def from_file(cls, path: str | Path) -> "CharTable":
        with open(path, encoding="utf-8") as f:
            return cls.from_lines(f)

    def classify(self, ch: str | int) -> CharClass:
        cp = ch if isinstance(ch, int) else ord(ch)
        return self._map.get(cp, CharClass.NonMalayalam)

    def codepoints(self, cls: CharClass) -> list[str]:
        return [chr(cp) for cp, c in sorted(self._map.items()) if c is cls]

    def __eq__(self, other):
        return isinstance(other, CharTable) and self._map == other._map

    def __len__(self):
        return len(self._map)


@functools.lru_cache(maxsize=None)
def default_table() -> CharTable:
    text = resources.files("mlsubword").joinpath("data/char_classes.tsv").read_text("utf-8")
    return CharTable.from_lines(text.splitlines())


def classify_char(ch: str | int, table: CharTable | None = None) -> CharClass:
    return (table or default_table()).classify(ch)


def is_malayalam_word(word: str, table: CharTable | None = None) -> bool:
    if not word:
        return False
    table = table or default_table()
    return all(table.classify(c) is not CharClass.NonMalayalam for c in word)


# Consonant + virama + ZWJ (pre-Unicode-5.1 encoding) -> atomic chillu.
LEGACY_CHILLU = {
    "\u0d23": "\u0d7a",  # NNA -> chillu NN
    "\u0d28": "\u0d7b",  # NA -> chillu N
    "\u0d30": "\u0d7c",  # RA -> chillu RR
    "\u0d32": "\u0d7d",  # LA -> chillu L
    "\u0d33": "\u0d7e",  # LLA -> chillu LL
    "\u0d15": "\u0d7f",  # KA -> chillu K
    "\u0d2e": "\u0d54",  # MA -> chillu M
    "\u0d2f": "\u0d55",  # YA -> chillu Y
    "\u0d34": "\u0d56",  # LLLA -> chillu LLL
}
_LEGACY_RE = re.compile("([" + "".join(LEGACY_CHILLU) + "])" + VIRAMA + ZWJ)
_ZW_RE = re.compile("[" + "".join(sorted(ZERO_WIDTH)) + "]")
# chillu N + virama + RRA is an alternate spelling of the conjunct NA virama RRA.
_NTA_RE = re.compile("\u0d7b" + VIRAMA + "\u0d31")


@dataclass(frozen=True)
class NormalizedText:
    text: str
    word_flags: tuple[frozenset[str], ...] = ()

    @property
    def words(self) -> list[str]:
        return self.text.split()

    @property
    def flags(self) -> frozenset[str]:
        out: set[str] = set()
        for f in self.word_flags:
            out |= f
        return frozenset(out)

    def __str__(self):
        return self.text


def _canonical(text: str) -> str:
    text = unicodedata.normalize("NFC", text)
    text = _LEGACY_RE.sub(lambda m: LEGACY_CHILLU[m.group(1)], text)
    text = _ZW_RE.sub("", text)
    text = _NTA_RE.sub("\u0d28" + VIRAMA + "\u0d31", text)
    return unicodedata.normalize("NFC", text)


def normalize_string(text: str) -> str:
    """Canonical form of ``text`` without the per-word bookkeeping."""
    return _canonical(text)


def normalize(text: str | bytes, table: CharTable | None = None) -> NormalizedText:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InvalidEncoding(str(exc)) from None
    table = table or default_table()
    flags = []
    for raw in unicodedata.normalize("NFC", text).split():
        f = set()
        if _LEGACY_RE.search(raw):
            f.add("had_legacy_chillu")
        if _ZW_RE.search(raw):
            f.add("had_zero_width_chars")
        word = _canonical(raw)
        if not word:
            continue
        if not is_malayalam_word(word, table):
            f.add("contains_non_malayalam")
        flags.append(frozenset(f))
    canon = _canonical(text)
    return NormalizedText(canon, tuple(flags))
