"""Hypercube of resolutions and the flattened chain complex.

A positive crossing is zipped (identity -> dumbbell) along its edge, a
negative crossing unzipped (dumbbell -> identity).  Edge maps are expressed
in d.u.r. coordinates by pairing images against the target basis and
solving against the target Gram matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .arith import SparseIntMatrix, crt_symmetric, inverse_modp, matmul_modp, primes_below, solve_integral
from .braid import BraidWord
from .durbasis import Decoration, DurElement, dur_basis, to_decoration
from .errors import DSquareNonzero, GradingViolation, NonIntegral, Singular, WrongEdge
from .evaluation import _basis_index, gram, gram_from_signature, pairing, zip_pairing
from .resolution import Resolution, gap_above, gap_below

ZIP = "zip"
UNZIP = "unzip"

# debug hook: -1 flips the zip sign
zip_sign = 1


def set_zip_sign(sign: int):
    global zip_sign
    if sign not in (1, -1):
        raise ValueError("zip sign is +1 or -1")
    zip_sign = sign
    _edge_cache.clear()


@dataclass(frozen=True)
class HypercubeEdge:
    braid: BraidWord
    source: tuple[int, ...]
    crossing: int

    def __post_init__(self):
        if self.source[self.crossing] != 0:
            raise WrongEdge("edges leave vertices with bit 0 at the crossing")

    @property
    def target(self) -> tuple[int, ...]:
        v = list(self.source)
        v[self.crossing] = 1
        return tuple(v)

    @property
    def kind(self) -> str:
        return ZIP if self.braid.letters[self.crossing] > 0 else UNZIP

    @property
    def sign(self) -> int:
        return -1 if sum(self.source[: self.crossing]) % 2 else 1


def hypercube_edges(braid: BraidWord):
    n = len(braid.letters)
    for v in product((0, 1), repeat=n):
        for i in range(n):
            if v[i] == 0:
                yield HypercubeEdge(braid, v, i)


@dataclass(frozen=True)
class Calibration:
    """Grading convention of the flattened hypercube.

    Internal degrees of a generator (v, u) are ``|v|`` and
    ``2|u| - t(v) + v_weight * |v|``.  With ``mirror`` both are negated
    before the affine shifts in (n_plus, n_minus, k - 1, 1) are added.
    """

    q_shift: tuple[int, int, int, int] = (-2, 1, 0, 0)
    hom_shift: tuple[int, int, int, int] = (1, 0, 0, 0)
    v_weight: int = -1
    mirror: bool = True

    @classmethod
    def zero(cls) -> "Calibration":
        return cls((0, 0, 0, 0), (0, 0, 0, 0), 0, False)

    @property
    def step(self) -> int:
        """Homological degree change along the differential."""
        return -1 if self.mirror else 1

    @staticmethod
    def _features(braid: BraidWord):
        return (braid.n_plus, braid.n_minus, braid.index - 1, 1)

    def q_offset(self, braid: BraidWord) -> int:
        return sum(a * f for a, f in zip(self.q_shift, self._features(braid)))

    def hom_offset(self, braid: BraidWord) -> int:
        return sum(a * f for a, f in zip(self.hom_shift, self._features(braid)))

    def as_dict(self) -> dict:
        return {
            "q_shift": list(self.q_shift),
            "hom_shift": list(self.hom_shift),
            "v_weight": self.v_weight,
            "mirror": self.mirror,
        }


# --------------------------------------------------------------------------
# Reference edge maps (decoration level)
# --------------------------------------------------------------------------


def _check_edge(u: DurElement, crossing: int, want_source_dumbbell: bool) -> Resolution:
    src = u.resolution
    is_db = src.slices[crossing] is not None
    if is_db != want_source_dumbbell:
        raise WrongEdge(f"crossing {crossing} has the wrong resolution for this map")
    v = list(src.v)
    if v[crossing] != 0:
        raise WrongEdge("edge maps raise the resolution bit")
    v[crossing] = 1
    return Resolution(src.braid, tuple(v))


def unzip_image(u: DurElement, crossing: int) -> list[tuple[int, Decoration]]:
    target = _check_edge(u, crossing, True)
    return [(1, to_decoration(u).on(target))]


def zip_image(u: DurElement, crossing: int) -> list[tuple[int, Decoration]]:
    target = _check_edge(u, crossing, False)
    base = to_decoration(u).on(target)
    p = target.slices[crossing]
    return [
        (zip_sign, base.with_dot(gap_above(target, crossing), p + 1)),
        (-zip_sign, base.with_dot(gap_below(target, crossing), p)),
    ]


def image_pairings(target: Resolution, image) -> list[int]:
    basis = [to_decoration(w) for w in dur_basis(target)]
    return [sum(s * pairing(d, b) for s, d in image) for b in basis]


def coordinates(target: Resolution, image) -> list[int]:
    for _, d in image:
        if d.resolution != target:
            raise WrongEdge("image does not live on the target resolution")
    y = image_pairings(target, image)
    g = gram(target).tolist()
    return solve_integral(g, y)


# --------------------------------------------------------------------------
# Exact block solves against Gram matrices
# --------------------------------------------------------------------------

_SOLVE_PRIMES = primes_below(2 ** 21, 12)
_inverse_cache: dict = {}


def _block_inverse(key, block: np.ndarray, p: int):
    ck = key + (p,)
    if ck not in _inverse_cache:
        _inverse_cache[ck] = inverse_modp(block.astype(np.int64) % p, p)
    return _inverse_cache[ck]


def _exact_product_equals(a: np.ndarray, x: np.ndarray, y: np.ndarray) -> bool:
    if a.dtype != object and x.dtype != object and y.dtype != object:
        amax = int(np.abs(a).max()) if a.size else 0
        xmax = int(np.abs(x).max()) if x.size else 0
        if a.shape[1] * amax * xmax < 2 ** 62:
            return bool(np.array_equal(a @ x, y))
    return bool(np.all(a.astype(object) @ x.astype(object) == y.astype(object)))


def solve_block(key, block: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Integral X with block @ X == rhs, by CRT over cached modular inverses."""
    if rhs.shape[1] == 0 or not rhs.any():
        return np.zeros((block.shape[1], rhs.shape[1]), dtype=np.int64)
    residues, used = [], []
    for p in _SOLVE_PRIMES:
        inv = _block_inverse(key, block, p)
        if inv is None:
            continue
        r = rhs % p if rhs.dtype != object else np.array(rhs % p, dtype=np.int64)
        residues.append(matmul_modp(inv, r.astype(np.int64), p))
        used.append(p)
        if len(used) >= 2:
            x = crt_symmetric(residues, used)
            if _exact_product_equals(block, x, rhs):
                return x
    # slow exact fallback; raises Singular / NonIntegral
    cols = [solve_integral(block.tolist(), [int(v) for v in rhs[:, j]]) for j in range(rhs.shape[1])]
    return np.array(cols, dtype=object).T


def gram_solve(k: int, positions, rhs: np.ndarray) -> np.ndarray:
    """Solve gram(k, positions) @ X = rhs exactly, block by degree."""
    positions = tuple(positions)
    t = len(positions)
    g = gram_from_signature(k, positions)
    _, pc = _basis_index(t)
    out = np.zeros((g.shape[0], rhs.shape[1]), dtype=np.int64)
    for e in range(t + 1):
        cols = np.nonzero(pc == e)[0]
        rows = np.nonzero(pc == t - e)[0]
        block = g[np.ix_(rows, cols)]
        x = solve_block((k, positions, e), block, rhs[rows])
        if x.dtype == object:
            out = out.astype(object)
        out[cols] = x
    return out


# --------------------------------------------------------------------------
# Edge maps in coordinates
# --------------------------------------------------------------------------

_edge_cache: dict = {}


def edge_matrix(kind: str, k: int, positions, m: int) -> np.ndarray:
    """Coordinate matrix (target basis x source basis) of one edge map.

    ``positions`` is the dumbbell sequence of the graph that has the dumbbell
    (target for a zip, source for an unzip); ``m`` is its index there.
    """
    key = (kind, k, tuple(positions), m)
    c = _edge_cache.get(key)
    if c is not None:
        return c
    positions = tuple(positions)
    y = zip_pairing(k, positions, m) * zip_sign  # rows: small graph basis, cols: big graph basis
    if kind == ZIP:
        c = gram_solve(k, positions, y.T)
    else:
        small = positions[:m] + positions[m + 1:]
        c = -gram_solve(k, small, y)
    _edge_cache[key] = c
    return c


def edge_coordinates(edge: HypercubeEdge) -> np.ndarray:
    braid = edge.braid
    src = Resolution(braid, edge.source)
    tgt = Resolution(braid, edge.target)
    if edge.kind == ZIP:
        big = tgt
    else:
        big = src
    m = big.dumbbell_index(edge.crossing)
    k, positions = big.signature
    return edge_matrix(edge.kind, k, positions, m)


def edge_coordinates_reference(edge: HypercubeEdge) -> np.ndarray:
    braid = edge.braid
    src = Resolution(braid, edge.source)
    tgt = Resolution(braid, edge.target)
    image_fn = zip_image if edge.kind == ZIP else unzip_image
    cols = [coordinates(tgt, image_fn(u, edge.crossing)) for u in dur_basis(src)]
    return np.array(cols, dtype=object).reshape(len(cols), 2 ** tgt.t).T


def edge_pairing_matrix(edge: HypercubeEdge) -> np.ndarray:
    """Pairings (source basis x target basis) of the edge images, by reference evaluation."""
    src = Resolution(edge.braid, edge.source)
    tgt = Resolution(edge.braid, edge.target)
    image_fn = zip_image if edge.kind == ZIP else unzip_image
    return np.array(
        [image_pairings(tgt, image_fn(u, edge.crossing)) for u in dur_basis(src)], dtype=object
    ).reshape(2 ** src.t, 2 ** tgt.t)


# --------------------------------------------------------------------------
# The complex
# --------------------------------------------------------------------------


@dataclass
class GradedComplex:
    braid: BraidWord
    calibration: Calibration
    # (hom, q) -> list of (vertex, basis index)
    generators: dict = field(default_factory=dict)
    # (hom, q) -> SparseIntMatrix from block (hom, q) to (hom + step, q)
    differentials: dict = field(default_factory=dict)
    step: int = 1

    def dim(self, i: int, q: int) -> int:
        return len(self.generators.get((i, q), ()))

    def q_degrees(self) -> list[int]:
        return sorted({q for _, q in self.generators})

    def hom_degrees(self, q: int) -> list[int]:
        return sorted(i for i, qq in self.generators if qq == q)

    def differential(self, i: int, q: int) -> SparseIntMatrix:
        m = self.differentials.get((i, q))
        if m is None:
            return SparseIntMatrix(self.dim(i + self.step, q), self.dim(i, q), {})
        return m

    @property
    def size(self) -> int:
        return sum(len(g) for g in self.generators.values())


def graded_degrees(res: Resolution, cal: Calibration):
    """(hom, q array over the d.u.r. basis) of one resolution."""
    _, pc = _basis_index(res.t)
    w = res.weight
    sgn = -1 if cal.mirror else 1
    braid = res.braid
    return sgn * w + cal.hom_offset(braid), sgn * (2 * pc - res.t + cal.v_weight * w) + cal.q_offset(braid)


def build_complex(braid: BraidWord, cal: Calibration, check_gradings: bool = True) -> GradedComplex:
    n = len(braid.letters)
    gens: dict = {}
    where: dict = {}  # vertex -> (hom, q array, position array)
    for v in product((0, 1), repeat=n):
        res = Resolution(braid, v)
        hom, q = graded_degrees(res, cal)
        pos = np.empty(len(q), dtype=np.int64)
        for j, qq in enumerate(q.tolist()):
            bucket = gens.setdefault((hom, qq), [])
            pos[j] = len(bucket)
            bucket.append((v, j))
        where[v] = (hom, q, pos)
    triples: dict = {}
    for edge in hypercube_edges(braid):
        c = edge_coordinates(edge)
        if not c.any():
            continue
        hom, qs, ps = where[edge.source]
        _, qt, pt = where[edge.target]
        rows, cols = np.nonzero(c)
        vals = c[rows, cols]
        if check_gradings and np.any(qt[rows] != qs[cols]):
            raise GradingViolation(f"edge {edge.source}->{edge.target} breaks q-degree")
        s = edge.sign
        for r, cc, val in zip(rows.tolist(), cols.tolist(), vals.tolist()):
            key = (hom, int(qs[cc]))
            triples.setdefault(key, []).append((int(pt[r]), int(ps[cc]), s * int(val)))
    diffs = {}
    for (i, q), tr in triples.items():
        diffs[(i, q)] = SparseIntMatrix.from_triples(len(gens.get((i + cal.step, q), ())), len(gens[(i, q)]), tr)
    return GradedComplex(braid, cal, gens, diffs, cal.step)


def check_d_squared(c: GradedComplex) -> bool:
    for (i, q), d in c.differentials.items():
        nxt = c.differentials.get((i + c.step, q))
        if nxt is None:
            continue
        if (nxt @ d).nnz:
            return False
    return True


def assert_d_squared(c: GradedComplex):
    if not check_d_squared(c):
        raise DSquareNonzero(f"d^2 != 0 for {c.braid}")
