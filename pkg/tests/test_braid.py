"""Tests of braid words, permutations and the closure invariants."""

import math
import random

import pytest

from linkforge.braid import (
    BraidWord, LaurentPoly, Permutation, SingularBraidWord, components, invariants, kauffman_jones, linking_matrix,
    markov_stabilize, parse_braid_word, permutation, project_to_singular
)
from linkforge.exceptions import (
    BusinessError, IndexOutOfRange, LengthMismatch, ParseError, TimeAtPi, TooManyCrossings, ZeroLetter
)


def _random_word(rng: random.Random, strands: int, length: int) -> BraidWord:
    return BraidWord(strands, tuple((rng.randint(1, strands - 1), rng.choice((1, -1))) for _ in range(length)))


def test_parse_braid_word():
    assert parse_braid_word("1 1 1", 2).letters == ((1, 1), (1, 1), (1, 1))
    assert parse_braid_word("1 -2 1 -2", 3).letters == ((1, 1), (2, -1), (1, 1), (2, -1))
    assert parse_braid_word("  ", 4) == BraidWord(4)


def test_parse_braid_word_errors():
    with pytest.raises(IndexOutOfRange):
        parse_braid_word("3", 2)
    with pytest.raises(ZeroLetter):
        parse_braid_word("1 0", 3)
    with pytest.raises(ParseError):
        parse_braid_word("1 a", 3)

    with pytest.raises(BusinessError) as error:
        parse_braid_word("-5", 3)
    assert str(error.value).startswith("braid: ")


def test_word_str_and_mirror():
    word = parse_braid_word("1 -2 1 -2", 3)
    assert str(word) == "1 -2 1 -2"
    assert str(word.mirror()) == "-1 2 -1 2"
    assert word.exponent_sum == 0
    assert (word + word).length == 8


def test_permutation_examples():
    assert permutation(parse_braid_word("1 1 1", 2)) == Permutation((2, 1))
    assert permutation(parse_braid_word("1 1", 2)).is_identity()

    figure_eight = permutation(parse_braid_word("1 -2 1 -2", 3))
    assert figure_eight.images == (2, 3, 1)
    assert len(figure_eight.cycles()) == 1


def test_permutation_composition_order():
    rng = random.Random(11)
    for _ in range(25):
        first = _random_word(rng, 4, rng.randint(0, 6))
        second = _random_word(rng, 4, rng.randint(0, 6))
        assert permutation(first + second) == permutation(second) * permutation(first)


def test_components():
    assert components(parse_braid_word("1 1 1", 2)) == [(1, 2)]
    assert components(parse_braid_word("1 1", 2)) == [(1,), (2,)]
    assert components(BraidWord(3)) == [(1,), (2,), (3,)]

    cycles = components(parse_braid_word("1 -2 1 -2", 3))
    assert sum(len(cycle) for cycle in cycles) == 3


def test_linking_matrix():
    assert linking_matrix(parse_braid_word("1 1", 2)) == ((0, 1), (1, 0))
    assert linking_matrix(parse_braid_word("-1 -1", 2)) == ((0, -1), (-1, 0))
    assert linking_matrix(parse_braid_word("1 1 1", 2)) == ((0,),)

    chain = linking_matrix(parse_braid_word("1 1 2 2", 3))
    assert chain == ((0, 1, 0), (1, 0, 1), (0, 1, 0))


def test_linking_matrix_ignores_intra_component_signs():
    word = parse_braid_word("1 1 1 2 2", 3)
    flipped = BraidWord(3, ((1, -1),) + word.letters[1:])
    assert components(word) == components(flipped)
    assert linking_matrix(word) == linking_matrix(flipped)


def test_kauffman_jones_known_values():
    assert kauffman_jones(BraidWord(1)) == LaurentPoly.monomial(0)
    assert kauffman_jones(parse_braid_word("1", 2)) == LaurentPoly.monomial(0)
    assert kauffman_jones(BraidWord(2)) == LaurentPoly.from_mapping({2: -1, -2: -1})
    assert kauffman_jones(parse_braid_word("1 1", 2)) == LaurentPoly.from_mapping({-2: -1, -10: -1})
    assert kauffman_jones(parse_braid_word("1 1 1", 2)) == LaurentPoly.from_mapping({-4: 1, -12: 1, -16: -1})


def test_kauffman_jones_mirror_and_amphichirality():
    trefoil = parse_braid_word("1 1 1", 2)
    assert kauffman_jones(trefoil.mirror()) == kauffman_jones(trefoil).substitute_inverse()

    figure_eight = kauffman_jones(parse_braid_word("1 -2 1 -2", 3))
    assert figure_eight == figure_eight.substitute_inverse()
    assert figure_eight != LaurentPoly.monomial(0)


def test_kauffman_jones_reidemeister_two():
    rng = random.Random(5)
    for _ in range(10):
        word = _random_word(rng, 3, rng.randint(1, 5))
        position = rng.randint(0, word.length)
        index = rng.randint(1, 2)
        padded = BraidWord(3, word.letters[:position] + ((index, 1), (index, -1)) + word.letters[position:])
        assert kauffman_jones(padded) == kauffman_jones(word)


def test_kauffman_jones_limit():
    with pytest.raises(TooManyCrossings):
        kauffman_jones(BraidWord(2, ((1, 1),) * 25))


def test_markov_stabilize():
    assert markov_stabilize(BraidWord(1)) == parse_braid_word("1", 2)
    assert markov_stabilize(parse_braid_word("1", 2)) == parse_braid_word("1 2", 3)
    assert markov_stabilize(parse_braid_word("1 1 1", 2)) == parse_braid_word("1 1 1 2", 3)

    trefoil = parse_braid_word("1 1 1", 2)
    stabilized = markov_stabilize(trefoil)
    assert kauffman_jones(stabilized) == kauffman_jones(trefoil)
    assert len(components(stabilized)) == 1


def test_project_to_singular():
    b_sing = project_to_singular(parse_braid_word("1 1", 2), [math.pi / 3, 2 * math.pi / 3])
    assert b_sing == SingularBraidWord(2, (1, 1), (math.pi / 3, 2 * math.pi / 3))
    assert project_to_singular(parse_braid_word("1 -2", 3), [1.0, 2.0]).letters == (1, 2)

    with pytest.raises(TimeAtPi):
        project_to_singular(parse_braid_word("1 1", 2), [math.pi / 2, math.pi])
    with pytest.raises(LengthMismatch):
        project_to_singular(parse_braid_word("1 1", 2), [1.0])


def test_invariants():
    hopf = invariants(parse_braid_word("1 1", 2))
    assert hopf.component_count == 2
    assert hopf.canonical_linking() == (0, 1, 1, 0)
    assert hopf.jones == kauffman_jones(parse_braid_word("1 1", 2))

    trefoil = invariants(parse_braid_word("1 1 1", 2))
    assert trefoil.component_count == 1
    assert trefoil.exponent_sum == 3
    assert not trefoil.is_unknot()

    unlink = invariants(BraidWord(2))
    assert unlink.component_count == 2
    assert unlink.linking_matrix == ((0, 0), (0, 0))

    assert invariants(parse_braid_word("1", 2)).is_unknot()


def test_same_closure_distinguishes_corpus():
    words = [("1 1", 2), ("1 1 1", 2), ("-1 -1 -1", 2), ("1 -2 1 -2", 3), ("1 1 1 2", 3), ("1 1 2 2", 3)]
    found = [invariants(parse_braid_word(text, strands)) for text, strands in words]
    for i, first in enumerate(found):
        for j, second in enumerate(found):
            if {i, j} == {1, 4}:
                # the trefoil and its stabilization differ only in strand count
                assert first.jones == second.jones
                continue
            assert first.same_closure(second) == (i == j)


def test_same_closure_ignores_component_order():
    first = invariants(parse_braid_word("1 1 2 2", 3))
    second = invariants(parse_braid_word("2 2 1 1", 3))
    assert first.same_closure(second)
