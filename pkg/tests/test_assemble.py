"""Tests of g, its lift p_k, the resolving term A and the assembled polynomial."""

import math

import numpy as np
import pytest

from linkforge import trigpoly
from linkforge.braid import parse_braid_word
from linkforge.exceptions import BoundViolated, EvenFrequencyPresent, NegativeExponent, ParseError
from linkforge.sub_process import assemble
from linkforge.sub_process.assemble import CrossingDatum, MixedPoly
from linkforge.sub_process.parametrize import build_F, strand_value
from linkforge.trigpoly import TAU

from conftest import CORPUS


def test_hopf_build_values(built):
    trace = built("hopf").trace
    assert trace["k"] == 2
    assert trace["m"] == 9
    assert trace["degree"] == 9
    assert trace["degree_bound"] == 21
    assert trace["p_k"] == {"homogeneous": True, "weighted_degree": 8}
    assert trace["resolved"]["braid"] == "1 1"


def test_build_g_is_real_and_even(built):
    result = built("hopf")
    g = [trigpoly.TrigPoly.from_json(data) for data in result.trace["g"]]
    assert len(g) == 3
    assert g[2].coeffs == {0: 1}
    for coefficient in g:
        assert coefficient.is_real
        assert all(q % 2 == 0 for q in coefficient.coeffs)
        assert coefficient.base_den == 1


def test_g_vanishes_on_the_strands():
    word = parse_braid_word("1 1", 2)
    system = build_F(word)
    g = assemble.build_g(system)
    for tau in np.linspace(0, math.pi, 5):
        coefficients = g.coefficients_at(tau)
        for c, j in system.labels():
            root = strand_value(system, c, j, 2 * tau)
            assert np.polynomial.polynomial.polyval(root, coefficients) == pytest.approx(0.0, abs=1e-12)


def test_p_k_restricts_to_g(built):
    f = built("hopf").f
    p_k = MixedPoly({key: c for key, c in f.monomials.items() if key[0] > 0 or sum(key) <= 2 * f.k * f.s}, f.s, f.k)
    r, t, u = 0.3, 1.1, 0.7 + 0.2j
    g = [trigpoly.TrigPoly.from_json(data) for data in built("hopf").trace["g"]]
    expected = r ** (2 * f.k * f.s) * sum(
        trigpoly.evaluate(coefficient, t) * (u / r ** (2 * f.k)) ** a for a, coefficient in enumerate(g)
    )
    assert p_k.evaluate(u, r * np.exp(1j * t)) == pytest.approx(expected, rel=1e-9)


def test_choose_k():
    g = assemble.UPolyTrig((trigpoly.cosine(2), trigpoly.constant(0.0), trigpoly.constant(1.0)))
    assert assemble.choose_k(g, 2) == 1
    g = assemble.UPolyTrig((trigpoly.cosine(6), trigpoly.cosine(2), trigpoly.constant(1.0)))
    assert assemble.choose_k(g, 2) == 2
    with pytest.raises(BoundViolated):
        assemble.choose_k(g, 2, length=1)


def test_lift_to_pk_rejects_odd_frequency():
    g = assemble.UPolyTrig((trigpoly.cosine(1), trigpoly.constant(1.0)))
    with pytest.raises(NegativeExponent):
        assemble.lift_to_pk(g, 1, 1)


def test_solve_star_contract():
    data = [
        CrossingDatum(1.0, 1, 1, math.cos(0.5), 0.01),
        CrossingDatum(4.0, -1, -1, -math.cos(2.0), 0.01),
    ]
    a_tilde = assemble.solve_star(data)
    values = trigpoly.evaluate(a_tilde, np.array([1.0, 4.0]))
    assert values == pytest.approx([1.0, -1.0], abs=1e-9)
    assert assemble.argument_rate(a_tilde, [1.0, 4.0]) == pytest.approx([1.0, -1.0], abs=1e-8)


def test_build_a_has_odd_frequencies_only(built):
    a = trigpoly.TrigPoly.from_json(built("hopf").trace["a"])
    assert a.base_den == 1
    assert all(q % 2 for q in a.coeffs)

    t = np.linspace(0, TAU, 11)
    assert np.allclose(trigpoly.evaluate(a, t + math.pi), -trigpoly.evaluate(a, t))


def test_build_a_rejects_half_frequencies():
    with pytest.raises(EvenFrequencyPresent):
        assemble.build_A(trigpoly.TrigPoly.create({1: 1.0}, base_den=4))


def test_crossing_data_hopf(built):
    crossings = built("hopf").trace["crossings"]
    assert [datum["t"] for datum in crossings] == pytest.approx([math.pi / 2, 3 * math.pi / 2])
    for datum in crossings:
        assert datum["z"] == 1
        assert datum["critical_sign"] in (1, -1)
        assert datum["y"] == pytest.approx(datum["critical_sign"] * math.cos(datum["t"] / 2))


@pytest.mark.parametrize(("name", "bound"), [("hopf", 21), ("trefoil", 37), ("figure_eight", 97),
                                             ("stabilized_trefoil", 97), ("chain", 73)])
def test_degree_bound(name, bound):
    assert assemble.degree_bound(parse_braid_word(*CORPUS[name])) == bound


def test_choose_m():
    a = trigpoly.cosine(3)
    assert assemble.choose_m(a, 2, 2) == 9
    assert assemble.choose_m(trigpoly.cosine(11), 1, 2) == 13
    with pytest.raises(BoundViolated):
        assemble.choose_m(a, 2, 2, bound=7)


def test_assemble_f():
    p_k = MixedPoly({(2, 0, 0): 1, (0, 2, 2): -1}, 2, 1)
    f = assemble.assemble_f(p_k, trigpoly.cosine(1), 5)
    assert f.monomials[(0, 3, 2)] == pytest.approx(0.5)
    assert f.monomials[(0, 2, 3)] == pytest.approx(0.5)
    assert f.m == 5
    assert f.total_degree() == 5

    with pytest.raises(NegativeExponent):
        assemble.assemble_f(p_k, trigpoly.cosine(1), 4)
    with pytest.raises(NegativeExponent):
        assemble.assemble_f(p_k, trigpoly.cosine(7), 5)


def test_radial_weighted_degree():
    p_k = MixedPoly({(2, 0, 0): 1, (0, 2, 2): -1, (1, 1, 1): 0.5}, 2, 1)
    assert assemble.radial_weighted_degree(p_k, (2, 1)) == (True, 4)
    f = assemble.assemble_f(p_k, trigpoly.cosine(1), 5)
    assert assemble.radial_weighted_degree(f, (2, 1)) == (False, 5)


def test_mixed_poly_evaluate():
    f = MixedPoly({(2, 0, 0): 1, (0, 3, 1): -1}, 2, 1)
    v = 0.5 * np.exp(0.3j)
    u = 0.25 * np.exp(0.3j)
    assert f.evaluate(u, v) == pytest.approx(0.0, abs=1e-15)
    assert f.coefficients_at([v, 2 * v]).shape == (2, 3)
    assert f.u_degree() == 2


def test_mixed_poly_json(built):
    f = built("hopf").f
    assert MixedPoly.from_json(f.to_json()) == f


@pytest.mark.parametrize("data", [
    {"s": 2, "k": 1},
    {"s": 2, "k": 1, "monomials": [{"u": 2, "v": 0}]},
    {"s": 2, "k": 1, "monomials": [{"u": 2, "v": -1, "vbar": 0, "re": 1, "im": 0}]},
    {"s": "two", "k": 1, "monomials": []},
    {"s": 2, "k": 1, "monomials": [{"u": 2, "v": 0, "vbar": 0, "re": "x", "im": 0}]},
])
def test_mixed_poly_json_errors(data):
    with pytest.raises(ParseError):
        MixedPoly.from_json(data)

