"""Braid words: parsing, rendering, crossing census.

Two input syntaxes are accepted: letters (``A``..``Y`` for sigma_1..sigma_25,
lowercase for inverses) or whitespace-separated signed integers.
"""
from __future__ import annotations

import re
import string
from dataclasses import dataclass

from .errors import EmptyWord, IndexTooLarge, InvalidCharacter, ZeroGenerator

DEFAULT_STRAND_CAP = 8

_LETTERS_RE = re.compile(r"[A-Ya-y]+")
_INTS_RE = re.compile(r"[+-]?\d+(?:\s+[+-]?\d+)*")
_INT_TOKEN_RE = re.compile(r"[+-]?\d+")


@dataclass(frozen=True)
class BraidWord:
    letters: tuple[int, ...]
    index: int

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        object.__setattr__(self, "letters", letters)
        if self.index < 1:
            raise ValueError("a braid needs at least one strand")
        for x in letters:
            if x == 0:
                raise ZeroGenerator("generator 0 does not exist")
            if abs(x) > self.index - 1:
                raise ValueError(f"generator {x} needs more than {self.index} strands")

    @classmethod
    def from_letters(cls, letters, index: int | None = None):
        letters = tuple(letters)
        needed = 1 + max((abs(x) for x in letters), default=0)
        if index is None:
            index = needed
        elif index < needed:
            raise ValueError(f"index {index} below the inferred {needed}")
        return cls(letters, index)

    @property
    def k(self) -> int:
        return self.index

    @property
    def n_plus(self) -> int:
        return sum(1 for x in self.letters if x > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for x in self.letters if x < 0)

    def __len__(self):
        return len(self.letters)

    def mirror(self) -> "BraidWord":
        return BraidWord(tuple(-x for x in self.letters), self.index)

    def positive(self) -> "BraidWord":
        return BraidWord(tuple(abs(x) for x in self.letters), self.index)

    def __str__(self):
        return render(self)


def parse_braid(text: str, strand_cap: int = DEFAULT_STRAND_CAP, index: int | None = None) -> BraidWord:
    """Parse either syntax; the strand count is inferred unless ``index`` is given."""
    stripped = text.strip()
    if not stripped:
        raise EmptyWord("empty braid word")
    for token in _INT_TOKEN_RE.findall(stripped):
        if int(token) == 0:
            raise ZeroGenerator(f"generator 0 in {text!r}")
    if _LETTERS_RE.fullmatch(stripped):
        letters = [
            string.ascii_uppercase.index(ch) + 1 if ch.isupper() else -(string.ascii_lowercase.index(ch) + 1)
            for ch in stripped
        ]
    elif _INTS_RE.fullmatch(stripped):
        letters = [int(tok) for tok in stripped.split()]
    else:
        bad = next(
            (i for i, ch in enumerate(stripped) if not (ch.isalnum() or ch.isspace() or ch in "+-")),
            None,
        )
        where = f" at position {bad}" if bad is not None else ""
        raise InvalidCharacter(f"cannot parse braid word {text!r}{where} (mixed or unknown syntax)")
    needed = 1 + max(abs(x) for x in letters)
    k = needed if index is None else index
    if k < needed:
        raise ValueError(f"index {index} below the inferred {needed}")
    if k > strand_cap:
        raise IndexTooLarge(f"braid needs {k} strands, cap is {strand_cap}")
    return BraidWord(tuple(letters), k)


def render(word: BraidWord, syntax: str = "letters") -> str:
    if syntax == "letters":
        if any(abs(x) > 25 for x in word.letters):
            raise ValueError("letter syntax only covers generators 1..25")
        return "".join(
            string.ascii_uppercase[x - 1] if x > 0 else string.ascii_lowercase[-x - 1] for x in word.letters
        )
    if syntax == "ints":
        return " ".join(str(x) for x in word.letters)
    raise ValueError(f"unknown syntax {syntax!r}")
