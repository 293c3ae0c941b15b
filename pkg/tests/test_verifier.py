"""Tests of root tracking, word extraction and the verification sections."""

import math

import numpy as np
import pytest

from linkforge import config, process
from linkforge.braid import parse_braid_word
from linkforge.exceptions import NoStabilization, StructuralFailure
from linkforge.sub_process import verifier
from linkforge.sub_process.assemble import MixedPoly, build_g, choose_k, lift_to_pk
from linkforge.sub_process.genericity import make_generic
from linkforge.sub_process.parametrize import build_F

from conftest import CORPUS

# u^2 - v^3 vbar has the roots +-r^2 e^{it} on the torus of radius r, a Hopf link.
HOPF_SQUARE = MixedPoly({(2, 0, 0): 1, (0, 3, 1): -1}, 2, 1)
HOPF = parse_braid_word("1 1", 2)


def test_roots_at():
    roots = verifier.roots_at(HOPF_SQUARE, 0.5 * np.exp(0.7j))
    expected = 0.25 * np.exp(0.7j) * np.array([1, -1])
    assert sorted(roots, key=lambda z: z.real) == pytest.approx(sorted(expected, key=lambda z: z.real), abs=1e-12)


def test_roots_batch_scales_rows():
    vs = np.array([1e-3, 0.5j, 0.9])
    roots = verifier.roots_batch(HOPF_SQUARE, vs)
    assert roots.shape == (3, 2)
    for v, row in zip(vs, roots):
        assert np.allclose(np.abs(row), abs(v) ** 2, rtol=1e-9)


def test_roots_batch_at_origin():
    assert np.all(verifier.roots_batch(HOPF_SQUARE, [0.0]) == 0)


def test_track_braid():
    tb = verifier.track_braid(HOPF_SQUARE, 0.1, 256)
    assert tb.strands == 2
    assert tb.times[0] == 0.0
    assert tb.times[-1] == pytest.approx(2 * math.pi)
    assert tb.closure == (0, 1)
    assert tb.min_separation() == pytest.approx(2 * 0.1 ** 2, rel=1e-6)


def test_extract_word():
    tb = verifier.track_braid(HOPF_SQUARE, 0.1, 256)
    word = verifier.extract_word(tb)
    assert word == HOPF
    assert [crossing.t for crossing in tb.crossings] == pytest.approx([math.pi / 2, 3 * math.pi / 2], abs=1e-9)
    assert all(crossing.sign == 1 for crossing in tb.crossings)


def test_extract_word_of_conjugate_is_mirror():
    conjugate = MixedPoly({(2, 0, 0): 1, (0, 1, 3): -1}, 2, 1)
    tb = verifier.track_braid(conjugate, 0.1, 256)
    assert verifier.extract_word(tb) == HOPF.mirror()


def test_trajectory():
    tb = verifier.track_braid(HOPF_SQUARE, 0.1, 256)
    verifier.extract_word(tb)
    trajectory = tb.trajectory(50)
    assert len(trajectory["times"]) == 50
    assert len(trajectory["re"]) == 2
    assert np.allclose(np.hypot(trajectory["re"][0], trajectory["im"][0]), 1.0)
    assert len(trajectory["crossings"]) == 2


def test_radius_schedule():
    assert verifier.radius_schedule(HOPF_SQUARE)[:3] == [0.2, 0.1, 0.05]
    assert min(verifier.radius_schedule(HOPF_SQUARE)) >= config.RADIUS_FLOOR

    resolved = MixedPoly(HOPF_SQUARE.monomials, 2, 2, 9)
    assert verifier.radius_schedule(resolved)[:3] == pytest.approx([0.2 / 2 ** 8, 0.2 / 2 ** 9, 0.2 / 2 ** 10])


def test_predicted_crossing_times():
    assert verifier.predicted_crossing_times([math.pi / 2, 3 * math.pi / 2]) == pytest.approx(
        [3 * math.pi / 4, 5 * math.pi / 4]
    )


def test_verify_link():
    section = verifier.verify_link(HOPF_SQUARE, HOPF)
    assert section.passed
    assert section.certified_radius == pytest.approx(0.1)
    assert section.word == HOPF
    assert len(section.attempts) == 2
    assert section.schedule_matches is None

    section = verifier.verify_link(HOPF_SQUARE, HOPF, predicted_times=[math.pi / 2, 3 * math.pi / 2])
    assert section.schedule_matches

    assert not verifier.verify_link(HOPF_SQUARE, parse_braid_word("1 1 1", 2)).passed


def test_verify_weak_isolation():
    section = verifier.verify_weak_isolation(HOPF_SQUARE, [0.1, 0.05], 256)
    assert section.passed
    assert section.structural
    assert [margin["normalized"] for margin in section.margins] == pytest.approx([2.0, 2.0], rel=1e-6)

    assert not verifier.verify_weak_isolation(HOPF_SQUARE, []).passed


@pytest.mark.parametrize("poly", [
    MixedPoly({(1, 0, 0): 1}, 1, 1),
    MixedPoly({(2, 0, 0): 1, (0, 1, 0): 1}, 2, 1),
    MixedPoly({(2, 0, 0): 1, (3, 0, 0): 1, (0, 3, 1): -1}, 2, 1),
    MixedPoly({(2, 0, 0): 2, (0, 3, 1): -1}, 2, 1),
])
def test_verify_weak_isolation_structure(poly):
    with pytest.raises(StructuralFailure):
        verifier.verify_weak_isolation(poly, [0.1])


def test_verify_degree_bounds():
    section = verifier.verify_degree_bounds(HOPF_SQUARE, HOPF)
    assert section.passed
    assert (section.degree, section.bound, section.knot_bound, section.u_degree) == (4, 21, None, 2)

    trefoil = verifier.verify_degree_bounds(HOPF_SQUARE, parse_braid_word("1 1 1", 2))
    assert trefoil.knot_bound == 37

    unknot = verifier.verify_degree_bounds(HOPF_SQUARE, parse_braid_word("1", 2))
    assert unknot.skipped and unknot.passed


def test_p_k_alone_does_not_verify():
    word = parse_braid_word("1 1", 2)
    system, _, _ = make_generic(build_F(word), word)
    g = build_g(system)
    p_k = lift_to_pk(g, choose_k(g, 2), 2)
    with pytest.raises(NoStabilization):
        verifier.verify_link(p_k, word, samples=128)


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_builds_and_verifies(name, built, connection):
    result = built(name)
    report = process.verify(result.f, result.word, connection, predicted_times=result.predicted_times)
    assert report.link.passed, report.link.error
    assert report.isolation.passed
    assert report.degrees.passed
    assert report.link.schedule_matches
    assert result.trace["degree"] <= result.trace["degree_bound"]


@pytest.mark.slow
def test_trefoil_chirality(built, connection):
    for name, exponent_sum in (("trefoil", 3), ("mirror_trefoil", -3)):
        result = built(name)
        report = process.verify(result.f, result.word, connection)
        assert report.link.word.exponent_sum == exponent_sum


@pytest.mark.slow
def test_trefoil_does_not_verify_as_hopf(built, connection):
    report = process.verify(built("trefoil").f, HOPF, connection)
    assert not report.passed
    assert not report.link.passed
