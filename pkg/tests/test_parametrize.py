"""Tests of the strand functions built from a braid word."""

import math

import numpy as np
import pytest

from linkforge import trigpoly
from linkforge.braid import BraidWord, parse_braid_word
from linkforge.exceptions import PreconditionError
from linkforge.sub_process import parametrize
from linkforge.trigpoly import TAU

from conftest import CORPUS


def test_layout_diagram_hopf():
    grid = parametrize.layout_diagram(parse_braid_word("1 1", 2))
    assert grid.crossing_times == pytest.approx((math.pi / 2, 3 * math.pi / 2))
    assert grid.sample_times == pytest.approx((0.0, math.pi))
    assert grid.positions == ((1.25, 1.75), (1.75, 1.25))


def test_layout_diagram_needs_letters():
    with pytest.raises(PreconditionError):
        parametrize.layout_diagram(BraidWord(2))


def test_build_f_hopf():
    system = parametrize.build_F(parse_braid_word("1 1", 2))
    assert [component.lanes for component in system.components] == [(1,), (2,)]
    assert system.strands == 2

    theta = np.linspace(0, TAU, 9)
    first, second = (trigpoly.evaluate(component.poly, theta).real for component in system.components)
    assert np.allclose(first, 1.5 - 0.25 * np.cos(theta))
    assert np.allclose(second, 1.5 + 0.25 * np.cos(theta))


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_build_f_corpus(name):
    word = parse_braid_word(*CORPUS[name])
    system = parametrize.build_F(word)

    assert system.strands == word.strands
    assert sum(len(component.lanes) for component in system.components) == word.strands
    for component in system.components:
        assert component.poly.is_real
        assert component.poly.degree() <= component.nominal_degree
    assert parametrize.interpolation_residual(word, system) <= 1e-9

    ok, report = parametrize.check_perm_condition(system, word)
    assert ok
    assert len(report) == word.length


def test_strand_value_wraps_around_component():
    system = parametrize.build_F(parse_braid_word("1 1 1", 2))
    # strand 1 at 2 pi continues as strand 2 at 0
    assert parametrize.strand_value(system, 0, 1, TAU) == pytest.approx(parametrize.strand_value(system, 0, 2, 0.0))
    assert parametrize.strand_value(system, 0, 2, TAU) == pytest.approx(parametrize.strand_value(system, 0, 1, 0.0))

    with pytest.raises(PreconditionError):
        parametrize.strand_value(system, 0, 3, 0.0)


def test_strand_poly_matches_strand_value():
    system = parametrize.build_F(parse_braid_word("1 -2 1 -2", 3))
    t = np.linspace(0, TAU, 7)
    for label in system.labels():
        poly = parametrize.strand_poly(system, label)
        assert np.allclose(trigpoly.evaluate(poly, t).real, parametrize.strand_value(system, *label, t))


def test_check_perm_condition_rejects_other_word():
    system = parametrize.build_F(parse_braid_word("1 -2 1 -2", 3))
    ok, report = parametrize.check_perm_condition(system, parse_braid_word("2 -1 2 -1", 3))
    assert not ok
    assert not all(check.ok for check in report)
