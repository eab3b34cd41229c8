from math import factorial

import pytest

from homstab import chains, injwords, ssets


def test_small_complexes():
    assert injwords.build_injective_words(0).sset.levels == ()
    assert [len(lv) for lv in injwords.build_injective_words(1).sset.levels] == [1]
    x = injwords.build_injective_words(2).sset
    assert [len(lv) for lv in x.levels] == [2, 2]
    assert [len(lv) for lv in injwords.build_injective_words(3).sset.levels] == [3, 6, 6]


@pytest.mark.parametrize("n", range(1, 6))
def test_level_sizes_and_identities(n):
    x = injwords.build_injective_words(n).sset
    assert [len(lv) for lv in x.levels] == [factorial(n) // factorial(n - k - 1) for k in range(n)]
    assert [injwords.level_size(n, k) for k in range(n + 1)] == [len(lv) for lv in x.levels] + [0]
    assert ssets.validate(x) is None


def test_words_ordered_by_length_then_lexicographically():
    x = injwords.build_injective_words(3).sset
    assert x.levels[1][:3] == ((1, 2), (1, 3), (2, 1))
    assert x.faces[2][0] == (x.levels[1].index((2, 3)), x.levels[1].index((1, 3)), x.levels[1].index((1, 2)))


@pytest.mark.parametrize("n,expected", [(2, 1), (3, 2), (4, 9), (5, 44), (6, 265), (7, 1854)])
def test_expected_top_rank_matches_derangements(n, expected):
    assert injwords.expected_top_rank(n) == expected == injwords.derangements(n)


def test_derangement_recurrence_start():
    assert [injwords.derangements(n) for n in range(6)] == [1, 0, 1, 2, 9, 44]


@pytest.mark.parametrize("n", range(1, 7))
def test_certify_wedge(n):
    rep = injwords.certify_wedge(n)
    assert rep.torsion_free and not rep.torsion
    assert rep.reduced_betti == (0,) * (n - 1) + (injwords.expected_top_rank(n),)


def test_certify_examples():
    assert injwords.certify_wedge(2).reduced_betti == (0, 1)
    assert injwords.certify_wedge(3).top_rank == 2
    assert injwords.certify_wedge(4).top_rank == 9


def test_euler_characteristic_agrees():
    for n in range(1, 6):
        c = ssets.chain_complex_of(injwords.build_injective_words(n).sset)
        assert chains.euler_characteristic(c) - 1 == (-1) ** (n - 1) * injwords.expected_top_rank(n)


def test_bad_arguments():
    with pytest.raises(ValueError):
        injwords.build_injective_words(-1)
    with pytest.raises(ValueError):
        injwords.certify_wedge(0)
