"""1-evaluation of decorated elementary resolutions, pairings and Gram matrices.

Colorings of an elementary resolution are walks: a permutation of pigments
at gap 0, and at each dumbbell a choice of exit order.  A walk contributes
``prod x^dots / prod (x_left - x_right)`` (exit pigments of each split
vertex) when it returns to its starting permutation.

Three evaluators live here:

* ``evaluate1``: exact transfer over ``Fraction`` at a generic point.
* ``evaluate_inf_oracle``: symbolic brute force over all walks (slow, small
  cases only), used to cross-check the former.
* ``SignatureTables``: a modular meet-in-the-middle engine computing every
  evaluation needed by one dumbbell signature at once; it backs ``gram`` and
  the differential coordinates.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product

import numpy as np

from .arith import crt_symmetric, inverse_modp, matmul_modp, primes_below
from .durbasis import Decoration, dur_basis, merge_decorations, to_decoration
from .errors import NonIntegerEvaluation, NotPolynomial, NotSymmetric, WrongDegree
from .resolution import Resolution, gap_above, gap_below


def default_point(k: int) -> list[Fraction]:
    return [Fraction(i) for i in range(1, k + 1)]


def prime_point(k: int) -> list[Fraction]:
    """x_i = i-th prime."""
    out, q = [], 1
    while len(out) < k:
        q += 1
        if all(q % d for d in range(2, int(q ** 0.5) + 1)):
            out.append(Fraction(q))
    return out


def _slice_program(dec: Decoration):
    """Per step: ('dots', {strand: exp}) or ('dumbbell', p), bottom to top.

    Dots of gap g are applied right after slice g; dots of gap 0 first.
    """
    res = dec.resolution
    by_gap: dict[int, dict[int, int]] = {}
    for (gap, strand), e in dec.dots.items():
        by_gap.setdefault(gap, {})[strand] = e
    prog = []
    if 0 in by_gap:
        prog.append(("dots", by_gap[0]))
    for s, p in enumerate(res.slices):
        if p is not None:
            prog.append(("dumbbell", p))
        g = gap_above(res, s)
        if g != 0 and g in by_gap:
            prog.append(("dots", by_gap[g]))
    return prog


def evaluate1(dec: Decoration, point=None) -> int:
    res = dec.resolution
    if dec.degree != res.t:
        return 0
    k = res.k
    x = default_point(k) if point is None else [Fraction(v) for v in point]
    if len(set(x)) != k:
        raise ValueError("evaluation point needs pairwise distinct coordinates")
    prog = _slice_program(dec)
    # states: (start, current) -> weight
    states = {(perm, perm): Fraction(1) for perm in permutations(range(k))}
    for kind, data in prog:
        nxt: dict = {}
        if kind == "dots":
            for (start, cur), w in states.items():
                f = w
                for strand, e in data.items():
                    f *= x[cur[strand - 1]] ** e
                nxt[(start, cur)] = f
        else:
            p = data
            for (start, cur), w in states.items():
                a, b = cur[p - 1], cur[p]
                for left, right in ((a, b), (b, a)):
                    new = cur[: p - 1] + (left, right) + cur[p + 1:]
                    key = (start, new)
                    nxt[key] = nxt.get(key, 0) + w / (x[left] - x[right])
        states = nxt
    total = sum((w for (start, cur), w in states.items() if start == cur), Fraction(0))
    if total.denominator != 1:
        raise NonIntegerEvaluation(f"evaluation {total} is not an integer")
    return int(total)


def evaluate_inf_oracle(dec: Decoration):
    """Symbolic sum over all walks; returns a sympy ``PolyElement`` in x_1..x_k."""
    from sympy import QQ, field

    res = dec.resolution
    k = res.k
    K, *xs = field(",".join(f"x{i}" for i in range(1, k + 1)), QQ)
    prog = _slice_program(dec)
    total = K(0)
    n_db = sum(1 for kind, _ in prog if kind == "dumbbell")
    for start in permutations(range(k)):
        for choice in product((0, 1), repeat=n_db):
            cur = list(start)
            num = K(1)
            den = K(1)
            c = 0
            for kind, data in prog:
                if kind == "dots":
                    for strand, e in data.items():
                        num *= xs[cur[strand - 1]] ** e
                else:
                    p = data
                    if choice[c]:
                        cur[p - 1], cur[p] = cur[p], cur[p - 1]
                    c += 1
                    den *= xs[cur[p - 1]] - xs[cur[p]]
            if tuple(cur) == start:
                total += num / den
    numer, denom = total.numer, total.denom
    if not denom.is_ground:
        raise NotPolynomial("walk sum does not clear its denominators")
    poly = numer.quo_ground(denom.LC) if numer else numer
    ring = poly.ring
    gens = ring.gens
    for i in range(k - 1):
        swapped = poly.compose([(gens[i], gens[i + 1]), (gens[i + 1], gens[i])])
        if swapped != poly:
            raise NotSymmetric("walk sum is not symmetric")
    expected = dec.degree - res.t
    degrees = {sum(m) for m in poly.keys()} if poly else set()
    if degrees and degrees != {expected}:
        raise WrongDegree(f"degrees {sorted(degrees)} differ from {expected}")
    return poly


def oracle_constant(dec: Decoration) -> int:
    """Constant term of the oracle polynomial as an integer."""
    poly = evaluate_inf_oracle(dec)
    c = poly.coeff(1) if poly else 0
    c = Fraction(int(c.numerator), int(c.denominator)) if c else Fraction(0)
    if c.denominator != 1:
        raise NonIntegerEvaluation(f"oracle constant {c} is not an integer")
    return int(c)


def pairing(u: Decoration, w: Decoration, point=None) -> int:
    return evaluate1(merge_decorations(u, w), point)


# --------------------------------------------------------------------------
# Modular table engine
# --------------------------------------------------------------------------

_ENGINE_MAX_STATES = 120  # k <= 5


@lru_cache(maxsize=None)
def _state_space(k: int):
    perms = list(permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    return np.array(perms, dtype=np.int64), index


@lru_cache(maxsize=None)
def _swap_index(k: int, p: int) -> np.ndarray:
    perms, index = _state_space(k)
    out = np.empty(len(perms), dtype=np.int64)
    for i, perm in enumerate(perms):
        q = list(perm)
        q[p - 1], q[p] = q[p], q[p - 1]
        out[i] = index[tuple(q)]
    return out


def _engine_point(k: int) -> np.ndarray:
    # symmetric integers keep the CRT bound at k! (k-1)^t
    return np.array([2 * i - k - 1 for i in range(1, k + 1)], dtype=np.int64)


def _engine_primes(k: int, count: int, skip: int = 0) -> list[int]:
    s2 = math.factorial(k) ** 2
    bound = min(int(math.isqrt(2 ** 53 // s2)), 2 ** 21)
    return primes_below(bound, count, skip)


@lru_cache(maxsize=None)
def _site_factors(k, p, prime, exponents):
    """Per exponent e: vector over exit states of x_right^e / (x_left - x_right)."""
    x = _engine_point(k)
    perms, _ = _state_space(k)
    left = x[perms[:, p - 1]]
    right = x[perms[:, p]]
    inv = np.array([pow(int(d) % prime, -1, prime) for d in (left - right)], dtype=np.int64)
    return np.stack([
        inv * np.array([pow(int(v), e, prime) for v in right], dtype=np.int64) % prime
        for e in exponents
    ])


_EXPONENTS = (0, 1, 2)


def _transfer(k, positions, lower_left, prime, x):
    """Batched transfer matrices, shape (3^len(positions), S, S), mod prime.

    Batch index is base 3 (upper-right exponent per dumbbell) with the first
    dumbbell most significant; ``lower_left`` marks the dumbbells that also
    carry one dot on their lower-left edge.
    """
    s = math.factorial(k)
    perms, _ = _state_space(k)
    t_mat = np.eye(s, dtype=np.int64)[None, :, :]
    for p, ll in zip(positions, lower_left):
        sw = _swap_index(k, p)
        if ll:
            # entering left pigment: unswapped walks keep it at p, swapped ones at p + 1
            stay = x[perms[:, p - 1]] % prime
            moved = x[perms[:, p]] % prime
            base = (t_mat * stay[None, None, :] + t_mat[:, :, sw] * moved[None, None, :]) % prime
        else:
            base = (t_mat + t_mat[:, :, sw]) % prime
        factors = _site_factors(k, p, prime, _EXPONENTS)  # (3, S)
        t_mat = (base[:, None, :, :] * factors[None, :, None, :] % prime).reshape(-1, s, s)
    return t_mat


class SignatureTables:
    """All exact evaluations a signature (k, dumbbell positions) needs.

    ``upper[idx]`` is the 1-evaluation with exponent ``e_i in {0,1,2}`` on the
    upper-right edge of dumbbell ``i`` (base-3 index, first dumbbell most
    significant); ``lower_left(m)`` is the same table with one extra dot on
    the lower-left edge of dumbbell ``m``.  Only entries passing the degree
    gate are meaningful.
    """

    def __init__(self, k: int, positions: tuple[int, ...]):
        self.k = k
        self.positions = tuple(positions)
        self.t = len(self.positions)
        self.h = self.t // 2
        self.x = _engine_point(k)
        self.bound = math.factorial(k) * max(k - 1, 1) ** self.t
        count = 1
        primes = _engine_primes(k, 1)
        while math.prod(primes) <= 2 * self.bound:
            count += 1
            primes = _engine_primes(k, count)
        self.primes = primes
        self._prefix = {}
        self._suffix = {}
        self.upper = self._table(None)
        self._left_cache: dict[int, np.ndarray] = {}

    def _half(self, which, prime, m):
        lo, hi = (0, self.h) if which == "pre" else (self.h, self.t)
        flags = [i == m for i in range(lo, hi)]
        tr = _transfer(self.k, self.positions[lo:hi], flags, prime, self.x)
        if which == "suf":
            tr = np.transpose(tr, (0, 2, 1))
        return tr.reshape(tr.shape[0], -1)

    def _table(self, m):
        residues = []
        for prime in self.primes:
            if m is None or m >= self.h:
                pre = self._prefix.get(prime)
                if pre is None:
                    pre = self._prefix[prime] = self._half("pre", prime, None)
            else:
                pre = self._half("pre", prime, m)
            if m is None or m < self.h:
                suf = self._suffix.get(prime)
                if suf is None:
                    suf = self._suffix[prime] = self._half("suf", prime, None)
            else:
                suf = self._half("suf", prime, m)
            residues.append(matmul_modp(pre, suf.T, prime).reshape(-1))
        table = crt_symmetric(residues, self.primes)
        return _to_int_array(table)

    def lower_left(self, m: int) -> np.ndarray:
        if m not in self._left_cache:
            self._left_cache[m] = self._table(m)
        return self._left_cache[m]


def _to_int_array(obj: np.ndarray) -> np.ndarray:
    if obj.dtype != object:
        return obj
    if obj.size == 0 or max(abs(int(v)) for v in obj.ravel()) < 2 ** 62:
        return obj.astype(np.int64)
    return obj


@lru_cache(maxsize=None)
def _basis_index(t: int):
    """Base-3 offsets and popcounts of all 2^t bit vectors in lexicographic order."""
    bits = np.array(list(product((0, 1), repeat=t)), dtype=np.int64).reshape(2 ** t, t)
    weights = 3 ** np.arange(t - 1, -1, -1, dtype=np.int64)
    return bits @ weights, bits.sum(axis=1)


_tables_lock = threading.Lock()
_tables: dict = {}


def signature_tables(k: int, positions) -> SignatureTables:
    key = (k, tuple(positions))
    with _tables_lock:
        tab = _tables.get(key)
    if tab is None:
        tab = SignatureTables(k, key[1])
        with _tables_lock:
            tab = _tables.setdefault(key, tab)
    return tab


def engine_supports(k: int) -> bool:
    return math.factorial(k) <= _ENGINE_MAX_STATES


def clear_caches():
    with _tables_lock:
        _tables.clear()
    _gram_cache.clear()


# --------------------------------------------------------------------------
# Gram matrices
# --------------------------------------------------------------------------

_gram_cache: dict = {}
_gram_store = None  # optional persistent cache, set by the cli


def set_gram_store(store):
    global _gram_store
    _gram_store = store


def gram_from_signature(k: int, positions) -> np.ndarray:
    key = (k, tuple(positions))
    g = _gram_cache.get(key)
    if g is not None:
        return g
    if _gram_store is not None:
        g = _gram_store.get(key)
        if g is not None:
            _gram_cache[key] = g
            return g
    t = len(key[1])
    if engine_supports(k):
        tab = signature_tables(k, key[1])
        idx, pc = _basis_index(t)
        g = tab.upper[idx[:, None] + idx[None, :]]
        g = np.where(pc[:, None] + pc[None, :] == t, g, 0)
    else:
        g = _gram_reference(k, key[1])
    _gram_cache.setdefault(key, g)
    if _gram_store is not None:
        _gram_store.put(key, g)
    return _gram_cache[key]


def _gram_reference(k, positions) -> np.ndarray:
    from .braid import BraidWord

    braid = BraidWord(tuple(positions), k) if positions else BraidWord((), k)
    res = Resolution(braid, (1,) * len(positions))
    basis = [to_decoration(u) for u in dur_basis(res)]
    n = len(basis)
    g = np.zeros((n, n), dtype=object)
    t = res.t
    for i, a in enumerate(basis):
        for j in range(i, n):
            if a.degree + basis[j].degree == t:
                g[i, j] = g[j, i] = pairing(a, basis[j])
    return _to_int_array(g)


def gram(res: Resolution) -> np.ndarray:
    """Pairing matrix over the d.u.r. basis, memoized by signature."""
    k, positions = res.signature
    return gram_from_signature(k, positions)


def gram_reference(res: Resolution) -> np.ndarray:
    """Gram matrix straight from ``pairing``; slow, for cross-checks."""
    basis = [to_decoration(u) for u in dur_basis(res)]
    return np.array(
        [[pairing(a, b) for b in basis] for a in basis], dtype=object
    ).reshape(len(basis), len(basis))


def zip_pairing(k: int, positions, m: int) -> np.ndarray:
    """Pairings of zip images with the target basis.

    Target signature ``(k, positions)`` with the new dumbbell at index ``m``.
    Rows are source d.u.r. elements (bits on the other dumbbells, in
    lexicographic order), columns target basis elements.  The image of a
    source element ``b`` is ``b + dot(UR_m) - b + dot(LL_m)``.
    """
    positions = tuple(positions)
    t = len(positions)
    idx, pc = _basis_index(t)
    src = np.nonzero(idx // 3 ** (t - 1 - m) % 3 == 0)[0]
    if engine_supports(k):
        tab = signature_tables(k, positions)
        comb = idx[src][:, None] + idx[None, :]
        y = tab.upper[comb + 3 ** (t - 1 - m)] - tab.lower_left(m)[comb]
    else:
        y = _zip_pairing_reference(k, positions, m, src)
    mask = pc[src][:, None] + pc[None, :] + 1 == t
    return np.where(mask, y, 0)


def _zip_pairing_reference(k, positions, m, src):
    from .braid import BraidWord

    braid = BraidWord(tuple(positions), k)
    res = Resolution(braid, (1,) * len(positions))
    basis = [to_decoration(u) for u in dur_basis(res)]
    ur = (gap_above(res, m), positions[m] + 1)
    ll = (gap_below(res, m), positions[m])
    y = np.zeros((len(src), len(basis)), dtype=object)
    for r, si in enumerate(src):
        b = basis[si]
        for c, w in enumerate(basis):
            if b.degree + w.degree + 1 != res.t:
                continue
            y[r, c] = pairing(b.with_dot(*ur), w) - pairing(b.with_dot(*ll), w)
    return _to_int_array(y)
