"""Bigraded homology of a graded complex over Q or F_p."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .arith import check_prime, rank_modp, rank_rational
from .braid import BraidWord
from .chaincomplex import Calibration, GradedComplex, assert_d_squared, build_complex
from .errors import InternalFault

# blocks smaller than this are not worth shipping to a worker process
PARALLEL_MIN_NNZ = 2000


@dataclass(frozen=True)
class PoincarePolynomial:
    terms: dict = field(default_factory=dict)  # (hom, q) -> dim

    def __post_init__(self):
        clean = {}
        for (i, q), d in self.terms.items():
            if d < 0:
                raise ValueError("dimensions are nonnegative")
            if d:
                clean[(int(i), int(q))] = int(d)
        object.__setattr__(self, "terms", clean)

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __eq__(self, other):
        return isinstance(other, PoincarePolynomial) and self.terms == other.terms

    @property
    def total_rank(self) -> int:
        return sum(self.terms.values())

    def ordered(self) -> list[tuple[int, int, int]]:
        """(hom, q, dim), descending q then descending hom."""
        return [(i, q, d) for (i, q), d in sorted(self.terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0]))]

    def __str__(self):
        from .polyformat import format_poly

        return format_poly(self)


def total_rank(p: PoincarePolynomial) -> int:
    return p.total_rank


def block_rank(m, characteristic: int) -> int:
    if m.nnz == 0:
        return 0
    if characteristic == 0:
        return rank_rational(m)
    return rank_modp(m, characteristic)


def differential_ranks(c: GradedComplex, characteristic: int = 0, threads: int = 1) -> dict:
    """(hom, q) -> rank of the differential leaving that block."""
    big = [key for key, d in c.differentials.items() if d.nnz >= PARALLEL_MIN_NNZ]
    ranks = {}
    if threads > 1 and len(big) > 1:
        big.sort(key=lambda key: -c.differentials[key].nnz)
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = {key: pool.submit(block_rank, c.differentials[key], characteristic) for key in big}
            ranks = {key: f.result() for key, f in futures.items()}
    for key, d in c.differentials.items():
        if key not in ranks:
            ranks[key] = block_rank(d, characteristic)
    return ranks


def poincare(c: GradedComplex, characteristic: int = 0, threads: int = 1) -> PoincarePolynomial:
    if characteristic != 0:
        check_prime(characteristic)
    ranks = differential_ranks(c, characteristic, threads)
    terms = {}
    for (i, q), gens in c.generators.items():
        betti = len(gens) - ranks.get((i, q), 0) - ranks.get((i - c.step, q), 0)
        if betti:
            terms[(i, q)] = betti
    return PoincarePolynomial(terms)


def euler_by_q(terms: dict) -> dict:
    """q -> alternating sum over hom degrees of a (hom, q) -> count map."""
    out: dict = {}
    for (i, q), n in terms.items():
        out[q] = out.get(q, 0) + (-1) ** (i % 2) * n
    return {q: v for q, v in out.items() if v}


def euler_consistent(c: GradedComplex, p: PoincarePolynomial) -> bool:
    chain = {key: len(g) for key, g in c.generators.items()}
    return euler_by_q(chain) == euler_by_q(p.terms)


def compute(
    braid: BraidWord,
    characteristic: int = 0,
    calibration: Calibration | None = None,
    threads: int = 1,
    check: bool = True,
) -> PoincarePolynomial:
    """Poincare polynomial of the closure of ``braid``.

    With ``check`` the complex is verified to square to zero and the result
    to have the Euler characteristic of the chain groups in every q-degree.
    """
    if characteristic != 0:
        check_prime(characteristic)
    c = build_complex(braid, calibration or Calibration())
    if check:
        assert_d_squared(c)
    p = poincare(c, characteristic, threads)
    if check and not euler_consistent(c, p):
        raise InternalFault(f"Euler characteristic mismatch for {braid}")
    return p
