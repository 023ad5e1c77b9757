import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gl1hom import chaincomplex as cx
from gl1hom.braid import BraidWord, parse_braid
from gl1hom.durbasis import Decoration, dur_basis, to_decoration
from gl1hom.errors import GradingViolation, WrongEdge
from gl1hom.resolution import resolve

TWO_CIRCLES = resolve(BraidWord((1,), 2), (0,))
THETA = resolve(BraidWord((1,), 2), (1,))


def test_unzip_images():
    neg_theta = resolve(BraidWord((-1,), 2), (0,))
    g0, g1 = dur_basis(neg_theta)
    ((s0, d0),) = cx.unzip_image(g0, 0)
    ((s1, d1),) = cx.unzip_image(g1, 0)
    assert s0 == s1 == 1
    assert d0.resolution.t == 0 and dict(d0.dots) == {}
    assert dict(d1.dots) == {(0, 2): 1}


def test_unzip_keeps_other_dots():
    res = resolve(BraidWord((-1, 1), 2), (0, 1))
    u = dur_basis(res)[3]
    ((_, d),) = cx.unzip_image(u, 0)
    assert dict(d.dots) == dict(to_decoration(u).dots)


def test_zip_image_theta():
    (u,) = dur_basis(TWO_CIRCLES)
    image = cx.zip_image(u, 0)
    assert [s for s, _ in image] == [1, -1]
    assert cx.coordinates(THETA, image) == [0, 2]


def test_coordinates_examples():
    g0, g1 = dur_basis(THETA)
    assert cx.coordinates(THETA, [(1, to_decoration(g1))]) == [0, 1]
    assert cx.coordinates(THETA, [(1, Decoration(THETA, {(0, 1): 1}))]) == [0, -1]
    assert cx.coordinates(THETA, [(1, Decoration(THETA, {(0, 1): 2}))]) == [0, 0]
    with pytest.raises(WrongEdge):
        cx.coordinates(THETA, [(1, Decoration(TWO_CIRCLES))])


def test_edges():
    b = parse_braid("Ab")
    edges = list(cx.hypercube_edges(b))
    assert len(edges) == 4
    e = cx.HypercubeEdge(b, (1, 0), 1)
    assert e.target == (1, 1) and e.kind == cx.UNZIP and e.sign == -1
    with pytest.raises(WrongEdge):
        cx.HypercubeEdge(b, (1, 0), 0)


def test_build_complex_single_crossing():
    c = cx.build_complex(parse_braid("A"), cx.Calibration())
    sizes = sorted(len(g) for g in c.generators.values())
    assert sum(sizes) == 3
    (d,) = c.differentials.values()
    assert d.to_dense() == [[2]]


def test_generator_count_trefoil():
    c = cx.build_complex(parse_braid("AAA"), cx.Calibration())
    assert sum(len(g) for g in c.generators.values()) == 27


def test_empty_braid_complex():
    c = cx.build_complex(BraidWord((), 1), cx.Calibration())
    assert sum(len(g) for g in c.generators.values()) == 1
    assert all(d.nnz == 0 for d in c.differentials.values())


@pytest.mark.parametrize("word", ["A", "AA", "AbAb", "aBcAbC", "AbCbAbCa"])
def test_d_squared_zero(word):
    assert cx.check_d_squared(cx.build_complex(parse_braid(word), cx.Calibration()))


def test_zero_calibration_breaks_grading():
    with pytest.raises(GradingViolation):
        cx.build_complex(parse_braid("A"), cx.Calibration.zero())


def test_calibration_offsets():
    cal = cx.Calibration()
    b = parse_braid("AbAb")
    assert cal.q_offset(b) == -2 * 2 + 2
    assert cal.hom_offset(b) == 2
    assert cal.step == -1
    assert cx.Calibration(mirror=False).step == 1
    assert cal.as_dict()["mirror"] is True


def _edge_pair(rng, max_k=4, max_len=5):
    k = rng.randint(2, max_k)
    n = rng.randint(1, max_len)
    letters = [rng.randint(1, k - 1) * rng.choice((1, -1)) for _ in range(n)]
    i = rng.randrange(n)
    pos, neg = letters[:], letters[:]
    pos[i], neg[i] = abs(letters[i]), -abs(letters[i])
    v = [rng.randint(0, 1) for _ in range(n)]
    v[i] = 0
    return (
        cx.HypercubeEdge(BraidWord(tuple(pos), k), tuple(v), i),
        cx.HypercubeEdge(BraidWord(tuple(neg), k), tuple(v), i),
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_unzip_pairing_is_minus_zip_transpose(seed):
    z, u = _edge_pair(random.Random(seed))
    assert z.kind == cx.ZIP and u.kind == cx.UNZIP
    assert np.array_equal(cx.edge_pairing_matrix(u), -cx.edge_pairing_matrix(z).T)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_fast_edges_match_reference(seed):
    for e in _edge_pair(random.Random(seed)):
        assert np.array_equal(cx.edge_coordinates(e), cx.edge_coordinates_reference(e))


def test_flipped_zip_sign_breaks_transpose():
    z, u = _edge_pair(random.Random(7))
    try:
        cx.set_zip_sign(-1)
        assert not np.array_equal(cx.edge_pairing_matrix(u), -cx.edge_pairing_matrix(z).T)
    finally:
        cx.set_zip_sign(1)
    assert np.array_equal(cx.edge_pairing_matrix(u), -cx.edge_pairing_matrix(z).T)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 3).flatmap(lambda g: st.sampled_from([g, -g])), min_size=1, max_size=6))
def test_d_squared_random(letters):
    c = cx.build_complex(BraidWord.from_letters(letters, 4), cx.Calibration())
    assert cx.check_d_squared(c)
