"""This module contains Step 1: trigonometric strand functions that realize the crossing schedule of a braid word."""

from dataclasses import dataclass, field, replace
from fractions import Fraction
import math

import numpy as np

from linkforge import config
from linkforge import trigpoly
from linkforge.braid import BraidWord, Permutation, components
from linkforge.exceptions import EndpointOnCrossing, PermConditionFailed, PreconditionError
from linkforge.trigpoly import TAU, TrigPoly

StrandLabel = tuple[int, int]


@dataclass(frozen=True)
class Component:
    """One closure component.

    Attributes:
        poly: The real function F_C of the component parameter.
        strands: The number of strands s_C.
        lanes: The lanes the component passes through at t = 0, in orbit order.
        nominal_degree: floor(s_C * length / 2), the degree the interpolation space allows.
    """
    poly: TrigPoly
    strands: int
    lanes: tuple[int, ...] = ()
    nominal_degree: int = 0


@dataclass(frozen=True)
class StrandSystem:
    """Strand (c, j) at time t has the value F_c((t + 2 pi j) / s_c), 1 <= j <= s_c.

    Attributes:
        components: The components with their functions.
        schedule: Interval endpoints; interval n carries letter n of the word.
        word: The word the schedule belongs to, if any.
    """
    components: tuple[Component, ...]
    schedule: tuple[float, ...] = ()
    word: BraidWord | None = None

    @property
    def strands(self) -> int:
        """The total number of strands s."""
        return sum(component.strands for component in self.components)

    def labels(self) -> list[StrandLabel]:
        """All strand labels (c, j) in component order."""
        return [(c, j) for c, component in enumerate(self.components) for j in range(1, component.strands + 1)]

    def with_poly(self, c: int, poly: TrigPoly) -> "StrandSystem":
        """A copy with the function of component c replaced."""
        updated = list(self.components)
        updated[c] = replace(updated[c], poly=poly)
        return replace(self, components=tuple(updated))


@dataclass(frozen=True)
class SampleGrid:
    """The data points of Step 1.

    Attributes:
        crossing_times: Times of the diagram crossings, 2 pi (j - 1/2) / length.
        sample_times: Times midway between crossings, 2 pi i / length.
        positions: positions[i][p - 1] is the value of the strand that starts in lane p, at sample i.
        orbits: Per component the component parameters and the values sampled along its orbit.
    """
    crossing_times: tuple[float, ...]
    sample_times: tuple[float, ...]
    positions: tuple[tuple[float, ...], ...]
    orbits: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...] = field(default=())


@dataclass(frozen=True)
class IntervalCheck:
    """The permutation induced by one schedule interval."""
    start: float
    end: float
    required: int
    observed: tuple[int, ...]
    ok: bool

    def to_json(self) -> dict:
        """The check as a JSON compatible dict."""
        return {"start": self.start, "end": self.end, "required": self.required, "observed": list(self.observed), "ok": self.ok}


def layout_diagram(word: BraidWord) -> SampleGrid:
    """Follow the lanes of the braid diagram and sample them between the crossings.
    Each strand sits on its integer lane; the two lanes of a neighbouring crossing are pulled
    LANE_OFFSET towards each other so the interpolation crosses cleanly.

    Raises:
        PreconditionError: If the word is empty.
    """
    length, strands = word.length, word.strands
    if length == 0:
        raise PreconditionError("The layout needs at least one letter; stabilize first.", module="parametrize")

    crossing_times = tuple(TAU * (j + 0.5) / length for j in range(length))
    sample_times = tuple(TAU * i / length for i in range(length))

    lane_of = list(range(1, strands + 1))
    positions = []
    for i in range(length):
        pull = [0] * (strands + 2)
        for index, _ in (word.letters[i - 1], word.letters[i]):
            pull[index] += 1
            pull[index + 1] -= 1
        positions.append(tuple(lane + config.LANE_OFFSET * float(np.clip(pull[lane], -1, 1)) for lane in lane_of))

        index = word.letters[i][0]
        for strand, lane in enumerate(lane_of):
            if lane == index:
                lane_of[strand] = index + 1
            elif lane == index + 1:
                lane_of[strand] = index

    orbits = []
    for cycle in components(word):
        size = len(cycle)
        nodes, values = [], []
        for j in range(1, size + 1):
            start_lane = cycle[j % size]
            for i, tau in enumerate(sample_times):
                nodes.append(math.fmod((tau + TAU * j) / size, TAU))
                values.append(positions[i][start_lane - 1])
        orbits.append((tuple(nodes), tuple(values)))

    return SampleGrid(crossing_times, sample_times, tuple(positions), tuple(orbits))


def build_F(word: BraidWord) -> StrandSystem:  # pylint: disable=invalid-name
    """Interpolate every component's orbit samples.

    Raises:
        PermConditionFailed: If the built system does not realize the word's interval permutations.
    """
    grid = layout_diagram(word)
    built = []
    for cycle, (nodes, values) in zip(components(word), grid.orbits):
        poly = trigpoly.interpolate(nodes, values)
        built.append(Component(poly, len(cycle), cycle, len(nodes) // 2))

    schedule = grid.sample_times + (TAU,)
    system = StrandSystem(tuple(built), schedule, word)
    ok, report = check_perm_condition(system, word)
    if not ok:
        failing = [check.to_json() for check in report if not check.ok]
        raise PermConditionFailed(f"Interval permutations do not match the word: {failing}")
    return system


def interpolation_residual(word: BraidWord, system: StrandSystem) -> float:
    """The largest deviation of the built functions from their samples."""
    grid = layout_diagram(word)
    residual = 0.0
    for component, (nodes, values) in zip(system.components, grid.orbits):
        fitted = trigpoly.evaluate(component.poly, np.array(nodes)).real
        residual = max(residual, float(np.max(np.abs(fitted - np.array(values)))))
    return residual


def strand_value(system: StrandSystem, c: int, j: int, t):
    """The value F_c((t + 2 pi j) / s_c) of strand (c, j).

    Raises:
        PreconditionError: If j is not between 1 and s_c.
    """
    component = system.components[c]
    if not 1 <= j <= component.strands:
        raise PreconditionError(f"Strand {j} does not exist on a component with {component.strands} strands.", module="parametrize")
    result = trigpoly.evaluate(component.poly, (np.asarray(t, dtype=float) + TAU * j) / component.strands)
    return result.real


def strand_poly(system: StrandSystem, label: StrandLabel, speed: int = 1) -> TrigPoly:
    """Strand (c, j) as a series in t, run at the given speed: t -> F_c((speed t + 2 pi j) / s_c)."""
    c, j = label
    component = system.components[c]
    return trigpoly.shift_scale(component.poly, Fraction(speed, component.strands), TAU * j / component.strands)


def strand_values(system: StrandSystem, t: float) -> dict[StrandLabel, float]:
    """The values of all strands at time t."""
    return {label: float(strand_value(system, label[0], label[1], t)) for label in system.labels()}


def check_perm_condition(system: StrandSystem, word: BraidWord) -> tuple[bool, list[IntervalCheck]]:
    """Compare the permutation of every schedule interval with the transposition of its letter.

    Returns:
        Whether every interval matches, and the per interval report.

    Raises:
        EndpointOnCrossing: If two distinct strands meet at an interval endpoint.
    """
    labels = system.labels()
    polys = {label: strand_poly(system, label) for label in labels}
    orders = [_order_at(system, polys, labels, t) for t in system.schedule]

    report = []
    for n, (index, _) in enumerate(word.letters):
        before, after = orders[n], orders[n + 1]
        if before is None or after is None:
            report.append(IntervalCheck(system.schedule[n], system.schedule[n + 1], index, (), False))
            continue
        position_after = {label: position for position, label in enumerate(after, start=1)}
        observed = tuple(position_after[label] for label in before)
        required = Permutation.transposition(word.strands, index).images
        report.append(IntervalCheck(system.schedule[n], system.schedule[n + 1], index, observed, observed == required))
    return all(check.ok for check in report) and len(report) == word.length, report


def _order_at(system: StrandSystem, polys: dict[StrandLabel, TrigPoly], labels: list[StrandLabel], t: float) -> list[StrandLabel] | None:
    """Labels sorted by strand value at t, or None when two identical strands tie."""
    values = {label: float(strand_value(system, label[0], label[1], t)) for label in labels}
    ordered = sorted(labels, key=lambda label: values[label])
    for lower, upper in zip(ordered, ordered[1:]):
        if values[upper] - values[lower] <= config.ROOT_TOLERANCE:
            if not trigpoly.subtract(polys[upper], polys[lower]).coeffs:
                return None
            raise EndpointOnCrossing(f"Strands {lower} and {upper} meet at the interval endpoint t = {t!r}.")
    return ordered
