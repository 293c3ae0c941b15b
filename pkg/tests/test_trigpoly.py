"""Tests of trigonometric polynomials, their interpolation and their zeros on the circle."""

from fractions import Fraction
import math

import numpy as np
import pytest

from linkforge import trigpoly
from linkforge.exceptions import IdenticallyZero, IllConditioned
from linkforge.trigpoly import TAU, TrigPoly


def test_create_normalizes():
    poly = TrigPoly.create({2: 1, -2: 1, 4: 0}, base_den=2, is_real=True)
    assert poly.base_den == 1
    assert poly.coeffs == {-1: 1, 1: 1}
    assert poly.degree() == 1
    assert TrigPoly().degree() == 0


def test_evaluate_cosine_and_sine():
    t = np.linspace(0, TAU, 17)
    assert np.allclose(trigpoly.evaluate(trigpoly.cosine(3, 0.4, 2.0), t), 2.0 * np.cos(3 * t - 0.4))
    assert np.allclose(trigpoly.evaluate(trigpoly.sine(2), t), np.sin(2 * t))
    assert trigpoly.evaluate(trigpoly.constant(1.5), 0.3) == pytest.approx(1.5)


def test_arithmetic():
    cos = trigpoly.cosine(1)
    square = trigpoly.multiply(cos, cos)
    t = np.linspace(0, TAU, 9)
    assert np.allclose(trigpoly.evaluate(square, t), np.cos(t) ** 2)
    assert square.degree() == 2
    assert square.is_real

    difference = trigpoly.subtract(square, trigpoly.constant(0.5))
    assert np.allclose(trigpoly.evaluate(difference, t), np.cos(2 * t) / 2)

    slope = trigpoly.derivative(trigpoly.sine(3))
    assert np.allclose(trigpoly.evaluate(slope, t), 3 * np.cos(3 * t))


def test_shift_scale_keeps_frequencies_exact():
    poly = trigpoly.cosine(1)
    scaled = trigpoly.shift_scale(poly, Fraction(1, 3), 2 * math.pi / 3)
    assert scaled.base_den == 3
    assert scaled.degree() == Fraction(1, 3)

    t = np.linspace(0, 3 * TAU, 13)
    assert np.allclose(trigpoly.evaluate(scaled, t), np.cos(t / 3 + 2 * math.pi / 3))


def test_truncate():
    poly = TrigPoly.create({0: 1.0, 5: 1e-14})
    assert trigpoly.truncate(poly).coeffs == {0: 1.0}


def test_interpolate_hits_samples():
    nodes = TAU * np.arange(7) / 7
    values = np.cos(2 * nodes) + 0.3 * np.sin(nodes)
    poly = trigpoly.interpolate(nodes, values)
    assert poly.is_real
    assert poly.degree() <= 3
    assert np.max(np.abs(trigpoly.evaluate(poly, nodes) - values)) <= 1e-9


def test_interpolate_even_node_count():
    poly = trigpoly.interpolate([0.0, math.pi], [1.25, 1.75])
    assert poly.degree() == 1
    t = np.linspace(0, TAU, 11)
    assert np.allclose(trigpoly.evaluate(poly, t).real, 1.5 - 0.25 * np.cos(t))


def test_interpolate_rejects_repeated_nodes():
    with pytest.raises(IllConditioned):
        trigpoly.interpolate([0.0, 1.0, 1.0], [0.0, 1.0, 2.0])


def test_hermite_interpolate_contract():
    nodes = [0.5, 2.0, 4.0]
    values = [1.0, -1.0, 1.0j]
    derivatives = [1j * value for value in values]
    poly = trigpoly.hermite_interpolate(nodes, values, derivatives)

    assert poly.degree() <= 3
    assert np.allclose(trigpoly.evaluate(poly, np.array(nodes)), values, atol=1e-9)
    slope = trigpoly.derivative(poly)
    assert np.allclose(trigpoly.evaluate(slope, np.array(nodes)), derivatives, atol=1e-9)


def test_hermite_single_node():
    poly = trigpoly.hermite_interpolate([1.0], [1.0], [1j])
    assert trigpoly.evaluate(poly, 1.0) == pytest.approx(1.0)
    assert trigpoly.evaluate(trigpoly.derivative(poly), 1.0) == pytest.approx(1j)
    assert poly.degree() <= 1


def test_real_roots_on_circle_simple():
    roots = trigpoly.real_roots_on_circle(trigpoly.cosine(1))
    assert [root.t for root in roots] == pytest.approx([math.pi / 2, 3 * math.pi / 2], abs=1e-12)
    assert not any(root.tangential for root in roots)

    roots = trigpoly.real_roots_on_circle(trigpoly.cosine(3))
    assert len(roots) == 6


def test_real_roots_on_circle_tangential():
    poly = trigpoly.add(trigpoly.cosine(1), trigpoly.constant(1.0))
    roots = trigpoly.real_roots_on_circle(poly)
    assert len(roots) == 1
    assert roots[0].t == pytest.approx(math.pi, abs=1e-6)
    assert roots[0].tangential


def test_real_roots_on_circle_interval_is_half_open():
    roots = trigpoly.real_roots_on_circle(trigpoly.sine(1))
    assert [root.t for root in roots] == pytest.approx([0.0, math.pi], abs=1e-12)


def test_real_roots_of_zero_series():
    with pytest.raises(IdenticallyZero):
        trigpoly.real_roots_on_circle(TrigPoly())


def test_json_round_trip_preserves_series():
    poly = trigpoly.shift_scale(trigpoly.cosine(2, 0.3), Fraction(1, 2), 0.1)
    assert TrigPoly.from_json(poly.to_json()) == poly


def _random_series(rng, degree, base_den=1, real=False):
    coeffs = {q: complex(*rng.uniform(-1, 1, 2)) for q in range(-degree, degree + 1)}
    return TrigPoly.create(coeffs, base_den=base_den, is_real=real)


@pytest.mark.parametrize("base_den", [1, 3])
def test_derivative_matches_finite_differences(base_den):
    rng = np.random.default_rng(11)
    poly = _random_series(rng, 5, base_den)
    t = rng.uniform(0, TAU * base_den, 25)
    step = 1e-6
    difference = (trigpoly.evaluate(poly, t + step) - trigpoly.evaluate(poly, t - step)) / (2 * step)
    assert np.allclose(trigpoly.evaluate(trigpoly.derivative(poly), t), difference, atol=1e-6)


def test_multiply_is_commutative_and_associative():
    rng = np.random.default_rng(12)
    first, second, third = _random_series(rng, 3), _random_series(rng, 2, 2), _random_series(rng, 4, 3)
    t = rng.uniform(0, 6 * TAU, 40)

    product = trigpoly.evaluate(trigpoly.multiply(first, second), t)
    assert np.allclose(product, trigpoly.evaluate(trigpoly.multiply(second, first), t))
    assert np.allclose(product, trigpoly.evaluate(first, t) * trigpoly.evaluate(second, t))

    left = trigpoly.multiply(trigpoly.multiply(first, second), third)
    right = trigpoly.multiply(first, trigpoly.multiply(second, third))
    assert np.allclose(trigpoly.evaluate(left, t), trigpoly.evaluate(right, t))


@pytest.mark.parametrize("count", [1, 2, 5, 16, 33, 50])
def test_interpolate_hits_jittered_nodes(count):
    rng = np.random.default_rng(count)
    nodes = TAU * (np.arange(count) + rng.uniform(-0.1, 0.1, count)) / count
    values = rng.uniform(-1, 1, count)
    poly = trigpoly.interpolate(nodes, values)
    assert poly.degree() <= count // 2
    assert poly.is_real
    assert np.max(np.abs(trigpoly.evaluate(poly, nodes) - values)) <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_real_roots_agree_with_dense_sampling(seed):
    rng = np.random.default_rng(100 + seed)
    poly = _random_series(rng, 6, real=True)
    grid = np.linspace(0, TAU, 200001)
    values = trigpoly.evaluate(poly, grid).real
    changes = int(np.count_nonzero(values[:-1] * values[1:] < 0))

    roots = trigpoly.real_roots_on_circle(poly)
    assert len(roots) == changes
    assert len(roots) <= 2 * 6
    assert all(abs(trigpoly.evaluate(poly, root.t).real) <= 1e-9 for root in roots)


def test_real_roots_reach_twice_the_degree():
    angles = [0.3, 1.1, 2.5]
    poly = trigpoly.constant(1.0)
    for angle in angles:
        poly = trigpoly.multiply(poly, trigpoly.cosine(1, angle + math.pi / 2))
    roots = trigpoly.real_roots_on_circle(poly)
    expected = sorted(angles + [angle + math.pi for angle in angles])
    assert [root.t for root in roots] == pytest.approx(expected, abs=1e-9)


def test_real_roots_merge_across_the_end_of_the_turn():
    poly = trigpoly.shift_scale(trigpoly.sine(1), 1, 1e-11)
    roots = trigpoly.real_roots_on_circle(poly)
    assert [root.t for root in roots] == pytest.approx([math.pi, TAU], abs=1e-9)
