"""Exact arithmetic: rationals, prime fields, sparse integer matrices.

Rationals are :class:`fractions.Fraction`.  Ranks over Q use fraction-free
elimination on Python integers; ranks over F_p reduce the integer entries
first and eliminate in F_p directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import NonIntegral, NotPrime, Singular

Rational = Fraction

DENSE_THRESHOLD = 64


def _small_prime(n: int) -> bool:
    """Trial division; only used for the word-sized moduli of the fast engine."""
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def check_prime(p: int) -> int:
    from sympy import isprime  # deferred: sympy is slow to import

    if not isinstance(p, (int, np.integer)) or p < 2 or not isprime(int(p)):
        raise NotPrime(f"{p!r} is not a prime")
    return int(p)


@dataclass(frozen=True)
class PrimeFieldElement:
    residue: int
    modulus: int

    def __post_init__(self):
        check_prime(self.modulus)
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElement):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other.residue
        return int(other) % self.modulus

    def __add__(self, other):
        return PrimeFieldElement(self.residue + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return PrimeFieldElement(self.residue - self._coerce(other), self.modulus)

    def __rsub__(self, other):
        return PrimeFieldElement(self._coerce(other) - self.residue, self.modulus)

    def __mul__(self, other):
        return PrimeFieldElement(self.residue * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElement(-self.residue, self.modulus)

    def inverse(self):
        if self.residue == 0:
            raise ZeroDivisionError("zero has no inverse")
        return PrimeFieldElement(pow(self.residue, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        return self * PrimeFieldElement(self._coerce(other), self.modulus).inverse()

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElement):
            return self.modulus == other.modulus and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.modulus))

    def __int__(self):
        return self.residue


@dataclass(frozen=True)
class SparseIntMatrix:
    """Integer matrix stored as ``{(row, col): value}`` without zeros."""

    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"entry {(r, c)} outside {self.rows}x{self.cols}")
            v = int(v)
            if v:
                clean[(int(r), int(c))] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_triples(cls, rows, cols, triples: Iterable[tuple[int, int, int]]):
        entries = {}
        for r, c, v in triples:
            if (r, c) in entries:
                raise ValueError(f"duplicate entry {(r, c)}")
            entries[(r, c)] = v
        return cls(rows, cols, entries)

    @classmethod
    def from_dense(cls, dense):
        dense = [list(map(int, row)) for row in dense]
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        entries = {(i, j): v for i, row in enumerate(dense) for j, v in enumerate(row) if v}
        return cls(rows, cols, entries)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def triples(self):
        return sorted((r, c, v) for (r, c), v in self.entries.items())

    def row_dicts(self) -> list[dict]:
        rows = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def transpose(self):
        return SparseIntMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    @property
    def nnz(self):
        return len(self.entries)

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        other_rows = other.row_dicts()
        acc: dict = {}
        for (r, k), v in self.entries.items():
            for c, w in other_rows[k].items():
                acc[(r, c)] = acc.get((r, c), 0) + v * w
        return SparseIntMatrix(self.rows, other.cols, acc)


def _as_sparse(m) -> SparseIntMatrix:
    if isinstance(m, SparseIntMatrix):
        return m
    return SparseIntMatrix.from_dense(m)


# --------------------------------------------------------------------------
# dense routines (small matrices, oracles)

def bareiss_rank(dense: Sequence[Sequence[int]]) -> int:
    """Rank over Q of a dense integer matrix by Bareiss elimination."""
    a = [list(map(int, row)) for row in dense]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    rank = 0
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        piv = next((r for r in range(rank, nrows) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, nrows):
            f = a[r][col]
            row_r, row_p = a[r], a[rank]
            for c in range(col + 1, ncols):
                row_r[c] = (p * row_r[c] - f * row_p[c]) // prev
            row_r[col] = 0
        prev = p
        rank += 1
    return rank


def dense_rank_modp(dense, p: int) -> int:
    a = np.array(dense, dtype=object) if not isinstance(dense, np.ndarray) else dense
    a = np.asarray(a, dtype=np.int64) % p if a.size else np.zeros((0, 0), dtype=np.int64)
    return _np_rank_modp(a, p)


def _np_rank_modp(a: np.ndarray, p: int) -> int:
    """Row-reduce a non-negative int64 array mod p (p < 2**31) in place."""
    a = a.copy()
    nrows, ncols = a.shape
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(a[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, col]), -1, p)
        a[rank] = (a[rank] * inv) % p
        below = rank + 1 + np.nonzero(a[rank + 1:, col])[0]
        if below.size:
            f = a[below, col][:, None]
            a[below] = (a[below] - f * a[rank][None, :]) % p
        rank += 1
    return rank


# --------------------------------------------------------------------------
# sparse elimination

def _sparse_rank(rows: list[dict], reduce_pair, normalize) -> int:
    """Markowitz-style sparse elimination shared by Q and F_p.

    ``reduce_pair(target, pivot_row, col)`` returns the target row with the
    entry in ``col`` eliminated; ``normalize`` tidies a freshly picked pivot
    row (content removal or scaling to a unit pivot).
    """
    live = {i: r for i, r in enumerate(rows) if r}
    col_rows: dict[int, set] = {}
    for i, r in live.items():
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    rank = 0
    while live:
        # sparsest row, then sparsest column inside it; prefer unit pivots
        i = min(live, key=lambda k: len(live[k]))
        row = live.pop(i)
        for c in row:
            col_rows[c].discard(i)
        col = min(row, key=lambda c: (len(col_rows[c]), abs(row[c]) != 1, c))
        row = normalize(row, col)
        rank += 1
        for j in list(col_rows[col]):
            target = live[j]
            before = set(target)
            target = reduce_pair(target, row, col)
            after = set(target)
            for c in before - after:
                col_rows[c].discard(j)
            for c in after - before:
                col_rows.setdefault(c, set()).add(j)
            if target:
                live[j] = target
            else:
                del live[j]
        del col_rows[col]
    return rank


def _content_normalize(row, col):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    return row


def _ff_reduce(target, pivot, col):
    a = pivot[col]
    b = target[col]
    g = gcd(a, b)
    a, b = a // g, b // g
    out = {}
    for c, v in target.items():
        if c != col:
            out[c] = a * v
    for c, v in pivot.items():
        if c == col:
            continue
        w = out.get(c, 0) - b * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return _content_normalize(out, None) if out else out


def rank_rational(m, dense_threshold: int = DENSE_THRESHOLD) -> int:
    """Exact rank over Q of an integer matrix (fraction-free, no floats)."""
    m = _as_sparse(m)
    if m.nnz == 0:
        return 0
    if max(m.rows, m.cols) <= dense_threshold:
        return bareiss_rank(m.to_dense())
    return _sparse_rank(m.row_dicts(), _ff_reduce, _content_normalize)


def rank_modp(m, p: int, dense_threshold: int = DENSE_THRESHOLD) -> int:
    """Rank over F_p of an integer matrix, reduced entrywise mod p."""
    p = check_prime(p)
    m = _as_sparse(m)
    reduced = {k: v % p for k, v in m.entries.items() if v % p}
    if not reduced:
        return 0
    if max(m.rows, m.cols) <= dense_threshold and p < 2 ** 31:
        a = np.zeros((m.rows, m.cols), dtype=np.int64)
        for (r, c), v in reduced.items():
            a[r, c] = v
        return _np_rank_modp(a, p)
    rows = [dict() for _ in range(m.rows)]
    for (r, c), v in reduced.items():
        rows[r][c] = v

    def normalize(row, col):
        inv = pow(row[col], -1, p)
        return {c: (v * inv) % p for c, v in row.items()}

    def reduce_pair(target, pivot, col):
        f = target[col]
        out = dict(target)
        del out[col]
        for c, v in pivot.items():
            if c == col:
                continue
            w = (out.get(c, 0) - f * v) % p
            if w:
                out[c] = w
            else:
                out.pop(c, None)
        return out

    return _sparse_rank(rows, reduce_pair, normalize)


# --------------------------------------------------------------------------
# linear solves

def solve_rational(g, y) -> list[Fraction]:
    """Unique rational solution of g x = y; raises Singular."""
    dense = g.to_dense() if isinstance(g, SparseIntMatrix) else [list(r) for r in g]
    n = len(dense)
    if any(len(r) != n for r in dense):
        raise ValueError("matrix must be square")
    if len(y) != n:
        raise ValueError("right-hand side has wrong length")
    a = [[Fraction(v) for v in row] + [Fraction(int(b))] for row, b in zip(dense, y)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise Singular("matrix is singular over Q")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [row[n] for row in a]


def solve_integral(g, y) -> list[int]:
    """Solve g x = y over Q and insist that x is integral."""
    x = solve_rational(g, y)
    bad = [i for i, v in enumerate(x) if v.denominator != 1]
    if bad:
        raise NonIntegral(f"non-integral coordinates at {bad}: {[str(x[i]) for i in bad]}")
    out = [int(v) for v in x]
    dense = g.to_dense() if isinstance(g, SparseIntMatrix) else g
    for row, b in zip(dense, y):
        assert sum(int(a) * v for a, v in zip(row, out)) == int(b)
    return out


# --------------------------------------------------------------------------
# multi-modular helpers used by the differential pipeline

def primes_below(bound: int, count: int, skip: int = 0) -> list[int]:
    out = []
    q = bound - 1
    while len(out) < count + skip:
        if _small_prime(q):
            out.append(q)
        q -= 1
    return out[skip:]


def inverse_modp(a: np.ndarray, p: int) -> np.ndarray | None:
    """Inverse of a square int64 matrix mod p, or None if singular mod p."""
    n = a.shape[0]
    aug = np.concatenate([a % p, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        nz = np.nonzero(aug[col:, col])[0]
        if nz.size == 0:
            return None
        piv = col + nz[0]
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        inv = pow(int(aug[col, col]), -1, p)
        aug[col] = (aug[col] * inv) % p
        others = np.nonzero(aug[:, col])[0]
        others = others[others != col]
        if others.size:
            f = aug[others, col][:, None]
            aug[others] = (aug[others] - f * aug[col][None, :]) % p
    return aug[:, n:]


def matmul_modp(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """(a @ b) mod p for entries in [0, p), exact through float64 when safe."""
    inner = a.shape[1]
    if inner * (p - 1) ** 2 < 2 ** 53:
        r = np.fmod(a.astype(np.float64) @ b.astype(np.float64), p)
        return r.astype(np.int64)
    if inner * (p - 1) ** 2 < 2 ** 63:
        return (a @ b) % p
    return np.array((a.astype(object) @ b.astype(object)) % p, dtype=np.int64)


def crt_symmetric(residues: list[np.ndarray], primes: list[int]) -> np.ndarray:
    """Garner reconstruction into the symmetric range of prod(primes).

    Returns int64 when the modulus fits comfortably, else an object array.
    """
    modulus = math.prod(primes)
    if modulus < 2 ** 62:
        x = residues[0].astype(np.int64) % primes[0]
        m = primes[0]
        for r, p in zip(residues[1:], primes[1:]):
            inv = pow(m % p, -1, p)
            h = ((r - x % p) % p) * inv % p
            x = x + h * m
            m *= p
        return np.where(x > modulus // 2, x - modulus, x)
    x = residues[0].astype(object)
    m = primes[0]
    for r, p in zip(residues[1:], primes[1:]):
        inv = pow(m % p, -1, p)
        x_mod_p = np.array([int(v) % p for v in x.ravel()], dtype=np.int64).reshape(x.shape)
        h = ((r - x_mod_p) % p) * inv % p
        x = x + h.astype(object) * m
        m *= p
    half = modulus // 2
    return np.where(x > half, x - modulus, x)
