"""Complete resolutions of a braid closure.

Slice ``s`` (1-based) of a resolution is either the identity on ``k`` strands
or a dumbbell joining strands ``p`` and ``p+1``.  Horizontal levels between
slices are called gaps; gap ``g`` lies directly above slice ``g`` and gap 0
is both below slice 1 and, through the closure, above slice ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .braid import BraidWord
from .errors import LengthMismatch

IDENTITY = None


@dataclass(frozen=True)
class DotPlacement:
    gap: int
    strand: int
    exponent: int = 1

    def __post_init__(self):
        if self.exponent < 1:
            raise ValueError("dot exponents are positive")
        if self.strand < 1:
            raise ValueError("strands are numbered from 1")


@dataclass(frozen=True)
class Resolution:
    braid: BraidWord
    v: tuple[int, ...]

    def __post_init__(self):
        v = tuple(int(b) for b in self.v)
        if len(v) != len(self.braid.letters):
            raise LengthMismatch(f"{len(v)} bits for {len(self.braid.letters)} crossings")
        if any(b not in (0, 1) for b in v):
            raise ValueError("resolution bits must be 0 or 1")
        object.__setattr__(self, "v", v)

    @property
    def k(self) -> int:
        return self.braid.index

    @property
    def n(self) -> int:
        return len(self.v)

    @cached_property
    def slices(self) -> tuple:
        """Per slice: ``None`` for identity, else the dumbbell position ``p``."""
        out = []
        for letter, bit in zip(self.braid.letters, self.v):
            dumbbell = (letter > 0 and bit == 1) or (letter < 0 and bit == 0)
            out.append(abs(letter) if dumbbell else IDENTITY)
        return tuple(out)

    @cached_property
    def dumbbell_slices(self) -> tuple[int, ...]:
        """0-based slice indices carrying a dumbbell, bottom to top."""
        return tuple(i for i, s in enumerate(self.slices) if s is not IDENTITY)

    @property
    def t(self) -> int:
        return len(self.dumbbell_slices)

    dumbbell_count = t

    @cached_property
    def signature(self) -> tuple[int, tuple[int, ...]]:
        """Evaluation-relevant data: level and dumbbell positions in order."""
        return (self.k, tuple(self.slices[i] for i in self.dumbbell_slices))

    @property
    def weight(self) -> int:
        return sum(self.v)

    def dumbbell_index(self, crossing: int) -> int:
        """Index among the dumbbells of the dumbbell sitting at ``crossing``."""
        return self.dumbbell_slices.index(crossing)


def resolve(braid: BraidWord, v) -> Resolution:
    return Resolution(braid, tuple(v))


def all_resolutions(braid: BraidWord):
    for v in product((0, 1), repeat=len(braid.letters)):
        yield Resolution(braid, v)


def gap_above(res: Resolution, slice_index: int) -> int:
    """Gap directly above the 0-based slice ``slice_index``."""
    return (slice_index + 1) % max(res.n, 1)


def gap_below(res: Resolution, slice_index: int) -> int:
    """Gap directly below the 0-based slice ``slice_index``."""
    return slice_index % max(res.n, 1)


def dur_positions(res: Resolution) -> list[tuple[int, int]]:
    """(gap, strand) of the upper-right edge of each dumbbell, bottom to top."""
    return [(gap_above(res, s), res.slices[s] + 1) for s in res.dumbbell_slices]


def upper_left_positions(res: Resolution) -> list[tuple[int, int]]:
    return [(gap_above(res, s), res.slices[s]) for s in res.dumbbell_slices]


def lower_left_positions(res: Resolution) -> list[tuple[int, int]]:
    return [(gap_below(res, s), res.slices[s]) for s in res.dumbbell_slices]
