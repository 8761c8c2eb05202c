"""Phonetic dictionary: word -> phoneme label sequence."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (DuplicateWord, EmptyPronunciation, LexiconError,
                     UnknownPhoneme)
from .phones import ALL_LABELS


@dataclass(frozen=True)
class Lexicon:
    entries: dict

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def pronunciation(self, word: str) -> tuple[str, ...]:
        return self.entries[word]

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(self.entries)

    @property
    def phoneme_labels(self) -> set[str]:
        used = set()
        for phones in self.entries.values():
            used.update(phones)
        return used


def parse_lexicon(text: str) -> Lexicon:
    """Parse `word: ph1 ph2 ...` lines; `#` comments and blanks skipped."""
    entries: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise LexiconError(f"line {lineno}: expected `word: phonemes`")
        word, _, rest = line.partition(":")
        word = word.strip()
        if not word:
            raise LexiconError(f"line {lineno}: empty word")
        if word in entries:
            raise DuplicateWord(f"line {lineno}: duplicate word {word!r}")
        phones = tuple(rest.split())
        if not phones:
            raise EmptyPronunciation(f"line {lineno}: {word!r} has no phonemes")
        for ph in phones:
            if ph not in ALL_LABELS:
                raise UnknownPhoneme(
                    f"line {lineno}: {ph!r} is not in the phoneme inventory")
        entries[word] = phones
    return Lexicon(entries=entries)


def format_lexicon(lexicon: Lexicon) -> str:
    return "".join(f"{word}: {' '.join(phones)}\n"
                   for word, phones in lexicon.entries.items())


def load_lexicon(path) -> Lexicon:
    with open(path, encoding="utf-8") as fobj:
        return parse_lexicon(fobj.read())


def save_lexicon(lexicon: Lexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fobj:
        fobj.write(format_lexicon(lexicon))
