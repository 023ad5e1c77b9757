"""Decorations and the d.u.r. basis of an elementary resolution.

For a dumbbell the only Schur decorations of its upper-right edge are
``x^0`` and ``x^1``, so a d.u.r. element is a bit per dumbbell.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from types import MappingProxyType

from .errors import ResolutionMismatch
from .resolution import DotPlacement, Resolution, dur_positions


@dataclass(frozen=True)
class Decoration:
    resolution: Resolution
    dots: MappingProxyType  # (gap, strand) -> exponent

    def __init__(self, resolution: Resolution, dots=()):
        merged: dict[tuple[int, int], int] = {}
        items = dots.items() if hasattr(dots, "items") else (
            ((d.gap, d.strand), d.exponent) if isinstance(d, DotPlacement) else (tuple(d[:2]), d[2])
            for d in dots
        )
        for (gap, strand), e in items:
            if e <= 0:
                raise ValueError("dot exponents are positive")
            if not (0 <= gap < max(resolution.n, 1)) or not (1 <= strand <= resolution.k):
                raise ValueError(f"dot position {(gap, strand)} outside the resolution")
            merged[(gap, strand)] = merged.get((gap, strand), 0) + e
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "dots", MappingProxyType(dict(sorted(merged.items()))))

    def __hash__(self):
        return hash((self.resolution, tuple(self.dots.items())))

    def __eq__(self, other):
        return (
            isinstance(other, Decoration)
            and self.resolution == other.resolution
            and dict(self.dots) == dict(other.dots)
        )

    @property
    def degree(self) -> int:
        return sum(self.dots.values())

    def placements(self) -> list[DotPlacement]:
        return [DotPlacement(g, s, e) for (g, s), e in self.dots.items()]

    def on(self, resolution: Resolution) -> "Decoration":
        """The same dot multiset read on another resolution of the braid."""
        return Decoration(resolution, self.dots)

    def with_dot(self, gap: int, strand: int, exponent: int = 1) -> "Decoration":
        dots = dict(self.dots)
        dots[(gap, strand)] = dots.get((gap, strand), 0) + exponent
        return Decoration(self.resolution, dots)


@dataclass(frozen=True)
class DurElement:
    resolution: Resolution
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.resolution.t:
            raise ValueError(f"{len(self.bits)} bits for {self.resolution.t} dumbbells")

    @property
    def dot_degree(self) -> int:
        return sum(self.bits)

    @property
    def graph_degree(self) -> int:
        return 2 * self.dot_degree - self.resolution.t


def dur_basis(res: Resolution) -> list[DurElement]:
    """All 2^t elements in lexicographic bit order."""
    return [DurElement(res, bits) for bits in product((0, 1), repeat=res.t)]


def to_decoration(u: DurElement) -> Decoration:
    positions = dur_positions(u.resolution)
    return Decoration(u.resolution, {pos: 1 for pos, bit in zip(positions, u.bits) if bit})


def merge_decorations(a: Decoration, b: Decoration) -> Decoration:
    if a.resolution != b.resolution:
        raise ResolutionMismatch("decorations live on different resolutions")
    dots = dict(a.dots)
    for pos, e in b.dots.items():
        dots[pos] = dots.get(pos, 0) + e
    return Decoration(a.resolution, dots)


def degree_census(res: Resolution) -> dict[int, int]:
    census: dict[int, int] = {}
    for u in dur_basis(res):
        census[u.graph_degree] = census.get(u.graph_degree, 0) + 1
    return census
