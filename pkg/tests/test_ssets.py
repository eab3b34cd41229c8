import random

import pytest
from hypothesis import given, settings, strategies as st

from homstab import chains, ssets
from homstab.chains import ChainMap
from homstab.injwords import build_injective_words
from homstab.linalg import AbelianGroupInvariants as G, IntegerMatrix
from homstab.ssets import LevelwiseMap, PointedSemiSimplicialSet, SemiSimplicialSet
from homstab.verify import random_sset

EMPTY = SemiSimplicialSet((), ())


def two_simplex(d1_edge="e12"):
    faces = {"e01": (1, 0), "e02": (2, 0), "e12": (2, 1)}
    edges = ("e01", "e02", "e12")
    top = (edges.index("e12"), edges.index(d1_edge), edges.index("e01"))
    return SemiSimplicialSet(((0, 1, 2), edges, ("s",)), ((), tuple(faces[e] for e in edges), (top,)))


def betti(c):
    return [str(g) for g in chains.homology_all(c).values()]


def test_validate_examples():
    assert ssets.validate(ssets.circle()) is None
    assert ssets.validate(EMPTY) is None
    assert ssets.validate(two_simplex("e02")) is None
    assert ssets.validate(two_simplex("e01")) == (2, 0, 1)
    with pytest.raises(ssets.InvalidSimplicialSetError):
        ssets.chain_complex_of(two_simplex("e01"))


def test_chain_complex_examples():
    assert betti(ssets.chain_complex_of(ssets.circle())) == ["Z", "Z"]
    assert betti(ssets.chain_complex_of(ssets.simplex_boundary(2))) == ["Z", "Z"]
    assert betti(ssets.chain_complex_of(ssets.simplex_boundary(3))) == ["Z", "0", "Z"]
    two_points = ssets.disjoint_union(ssets.point(), ssets.point())
    assert betti(ssets.chain_complex_of(two_points)) == ["Z^2"]
    assert betti(ssets.chain_complex_of(two_simplex("e02"))) == ["Z", "0", "0"]


def test_disjoint_union_of_mixed_dimensions():
    x = ssets.disjoint_union(ssets.point(), ssets.circle(), ssets.simplex_boundary(2))
    assert ssets.validate(x) is None
    assert betti(ssets.chain_complex_of(x)) == ["Z^3", "Z^2"]


def test_reduced_chain_examples():
    only_base = PointedSemiSimplicialSet(ssets.point(), (0,))
    assert ssets.reduced_chain_complex_of(only_base).ranks == (0,)
    # a disjoint basepoint gives back the unreduced homology
    c = ssets.reduced_chain_complex_of(ssets.add_basepoint(ssets.circle()))
    assert [str(g) for g in chains.homology_all(c).values()] == ["Z", "Z"]
    pointed_circle = SemiSimplicialSet((("v",), ("*", "e")), ((), ((0, 0), (0, 0))))
    c = ssets.reduced_chain_complex_of(PointedSemiSimplicialSet(pointed_circle, (0, 0)))
    assert [str(g) for g in chains.homology_all(c).values()] == ["0", "Z"]
    three = SemiSimplicialSet(((0, 1, "*"),), ((),))
    c = ssets.reduced_chain_complex_of(PointedSemiSimplicialSet(three, (2,)))
    assert str(chains.homology_integral(c, 0)) == "Z^2"


def test_pointed_validation_detects_unpointed_faces():
    x = SemiSimplicialSet(((0, 1), ("e",)), ((), ((1, 0),)))
    assert ssets.validate_pointed(PointedSemiSimplicialSet(x, (0, 0))) is not None


def test_half_smash_of_point():
    hs = ssets.half_smash_construction(ssets.point())
    assert [len(lv) for lv in hs.underlying.levels] == [2, 3]
    assert ssets.validate_pointed(hs) is None
    c = ssets.reduced_chain_complex_of(hs)
    assert [str(g) for g in chains.homology_all(c).values()] == ["0", "Z"]

    lit = ssets.half_smash_construction(ssets.point(), augmented=False)
    assert [len(lv) for lv in lit.underlying.levels] == [1, 3]
    c = ssets.reduced_chain_complex_of(lit)
    assert chains.homology_integral(c, 0).is_trivial()
    assert str(chains.homology_integral(c, 1)) == "Z^2"


@pytest.mark.parametrize("n,top", [(1, 1), (2, 3), (3, 11), (4, 53)])
def test_half_smash_of_injective_words(n, top):
    hs = ssets.half_smash_construction(build_injective_words(n).sset)
    hom = chains.homology_all(ssets.reduced_chain_complex_of(hs))
    assert all(hom[k].is_trivial() for k in range(n))
    assert hom[n] == G(top, ())


def inclusion(n):
    """Chain map F(n) -> F(n+1) induced by the inclusion of alphabets."""
    small, big = build_injective_words(n).sset, build_injective_words(n + 1).sset
    cs, cb = ssets.chain_complex_of(small), ssets.chain_complex_of(big)
    blocks = {}
    for k in cs.degrees():
        pos = {w: i for i, w in enumerate(big.levels[k])}
        blocks[k] = IntegerMatrix(cb.rank(k), cs.rank(k), [{pos[w]: 1} for w in small.levels[k]])
    return ChainMap(cs, cb, blocks)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_half_smash_is_relative_homology(n):
    # the augmented construction on F(n) is levelwise F(n+1) / F(n)
    hs = ssets.half_smash_construction(build_injective_words(n).sset)
    lhs = chains.homology_all(ssets.reduced_chain_complex_of(hs))
    f = inclusion(n)
    assert chains.validate_chain_map(f) is None
    rhs = chains.homology_all(chains.mapping_cone(f))
    assert all(lhs.get(k, G(0, ())) == rhs.get(k, G(0, ())) for k in set(lhs) | set(rhs))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_filtration_zero_inclusion_is_chain_map(n):
    f = ssets.filtration_zero_inclusion(build_injective_words(n).sset)
    assert chains.validate_chain_map(f) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_sset_properties(seed):
    x = random_sset(random.Random(seed))
    assert ssets.validate(x) is None
    assert chains.validate_complex(ssets.chain_complex_of(x)) is None
    for aug in (True, False):
        hs = ssets.half_smash_construction(x, augmented=aug)
        assert ssets.validate_pointed(hs) is None
        assert chains.validate_complex(ssets.reduced_chain_complex_of(hs)) is None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_skeletal_filtration_pages(seed, p):
    x = random_sset(random.Random(seed))
    fc = ssets.skeletal_filtration(x)
    pages = chains.spectral_pages(fc, p, x.dimension + 2)
    for k in range(len(x.levels)):
        assert pages[0].dims.get((k, 0), 0) == x.size(k)
    h = chains.homology_field_dims(fc.ambient, p)
    assert all(pages[-1].total(n) == h[n] for n in fc.ambient.degrees())


def test_skeletal_filtration_examples():
    pages = chains.spectral_pages(ssets.skeletal_filtration(ssets.circle()), 2, 2)
    assert (pages[0].dims.get((0, 0)), pages[0].dims.get((1, 0))) == (1, 1)
    empty = chains.spectral_pages(ssets.skeletal_filtration(EMPTY), 2, 2)
    assert all(v == 0 for pg in empty for v in pg.dims.values())


def double_cover():
    e = SemiSimplicialSet((("u0", "u1"), ("f0", "f1")), ((), ((1, 0), (0, 1))))
    return LevelwiseMap(e, ssets.circle(), ((0, 0), (0, 0)))


def test_covering_transfer_double_cover():
    p = double_cover()
    assert ssets.check_covering(p) == 2
    trf = ssets.covering_transfer(p)
    assert trf.at(1).to_rows() == [[1], [1]]
    assert chains.validate_chain_map(trf) is None
    comp = ssets.projection_map(p).compose(trf)
    assert all(comp.at(k) == IntegerMatrix.identity(1, 2) for k in (0, 1))
    # on H_1 both circles are generated by the sum of their edges
    assert ssets.projection_map(p).at(1).to_rows() == [[1, 1]]


def test_covering_transfer_trivial_covers():
    b = ssets.simplex_boundary(2)
    ident = LevelwiseMap(b, b, tuple(tuple(range(b.size(k))) for k in range(len(b.levels))))
    assert ssets.check_covering(ident) == 1
    trf = ssets.covering_transfer(ident)
    assert all(trf.at(k) == IntegerMatrix.identity(b.size(k)) for k in range(2))

    e = ssets.disjoint_union(b, b, b)
    images = tuple(tuple(list(range(b.size(k))) * 3) for k in range(len(b.levels)))
    p = LevelwiseMap(e, b, images)
    assert ssets.check_covering(p) == 3
    comp = ssets.projection_map(p).compose(ssets.covering_transfer(p))
    assert all(comp.at(k) == IntegerMatrix.identity(b.size(k), 3) for k in range(2))


def test_covering_errors():
    e = ssets.disjoint_union(ssets.point(), ssets.circle())
    with pytest.raises(ssets.CoveringError):
        ssets.check_covering(LevelwiseMap(e, ssets.circle(), ((0, 0), (0,))))
    # faces that do not commute with the projection
    x = SemiSimplicialSet(((0, 1), ("a", "b")), ((), ((0, 0), (1, 1))))
    bad = LevelwiseMap(x, ssets.circle(), ((0, 0), (0, 0)))
    assert ssets.check_covering(bad) == 2  # two disjoint loops do cover the circle
    y = SemiSimplicialSet(((0, 1), ("a", "b")), ((), ((0, 0), (0, 0))))
    with pytest.raises(ssets.CoveringError):
        ssets.check_covering(LevelwiseMap(y, ssets.circle(), ((0, 0), (0, 0))))
