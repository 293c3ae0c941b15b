"""This module contains Step 2: detecting non-generic crossings of a strand system and perturbing
the strand functions until every crossing is a transverse crossing of two strands.

Every pass draws its perturbation sizes from a halving sequence and accepts the first size for
which the permutation condition still holds and the pass achieved its goal.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from linkforge import config
from linkforge import trigpoly
from linkforge.braid import BraidWord, SingularBraidWord
from linkforge.exceptions import (
    BudgetExhausted, EndpointOnCrossing, IdenticalStrands, PreconditionError, UnresolvableInterval
)
from linkforge.sub_process.parametrize import (
    StrandLabel, StrandSystem, check_perm_condition, strand_poly, strand_value, strand_values
)
from linkforge.trigpoly import TAU

TRANSVERSE = "transverse-pair"
TANGENTIAL = "tangential"
MULTI_STRAND = "multi-strand"


@dataclass(frozen=True)
class CrossingEvent:
    """Strands meeting at one time.

    Attributes:
        t: The time of the meeting.
        participants: The strands that meet, ordered by their values just before t, lowest first.
        kind: TRANSVERSE, TANGENTIAL or MULTI_STRAND.
        value: The common strand value at t.
        tangent_pairs: The pairs of participants that touch without crossing.
    """
    t: float
    participants: tuple[StrandLabel, ...]
    kind: str
    value: float
    tangent_pairs: tuple[tuple[StrandLabel, StrandLabel], ...] = ()

    def components(self) -> set[int]:
        """The components the participants belong to."""
        return {c for c, _ in self.participants}

    def to_json(self) -> dict:
        """The event as a JSON compatible dict."""
        return {
            "t": self.t,
            "participants": [list(label) for label in self.participants],
            "kind": self.kind,
            "value": self.value,
        }


@dataclass(frozen=True)
class Perturbation:
    """One accepted change of the strand functions."""
    kind: str
    component: int | None
    magnitude: float
    phase: float | None = None

    def to_json(self) -> dict:
        """The perturbation as a JSON compatible dict."""
        return {"kind": self.kind, "component": self.component, "magnitude": self.magnitude, "phase": self.phase}


@dataclass
class PassRecord:
    """Event tallies before and after one pass.
    A tally counts the events by kind, the participants of non-generic events and the groups
    of coincident crossings; a system with identical strands tallies as {"identical": 1}.
    """
    name: str
    before: dict[str, int]
    after: dict[str, int]


@dataclass
class GenericityReport:
    """Everything Step 2 decided."""
    passes: list[PassRecord] = field(default_factory=list)
    perturbations: list[Perturbation] = field(default_factory=list)
    shift: float = 0.0
    events: list[CrossingEvent] = field(default_factory=list)
    b_sing: SingularBraidWord | None = None
    signs: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        """The report as a JSON compatible dict."""
        return {
            "passes": [{"name": p.name, "before": p.before, "after": p.after} for p in self.passes],
            "perturbations": [p.to_json() for p in self.perturbations],
            "shift": self.shift,
            "events": [event.to_json() for event in self.events],
            "b_sing": None if self.b_sing is None else {
                "strands": self.b_sing.strands,
                "letters": list(self.b_sing.letters),
                "crossing_times": list(self.b_sing.crossing_times),
            },
            "signs": list(self.signs),
        }


def find_crossings(system: StrandSystem) -> list[CrossingEvent]:
    """Find all times at which strands meet.
    The zeros of every pairwise difference are merged into events when their times agree within
    MERGE_TOLERANCE and they share a strand.

    Raises:
        IdenticalStrands: If two strand functions coincide.
    """
    return _detect(system, system.labels())


def _detect(system: StrandSystem, involved: list[StrandLabel]) -> list[CrossingEvent]:
    """Events among the pairs that contain at least one strand of involved."""
    labels = system.labels()
    polys = {label: strand_poly(system, label) for label in labels}
    involved = set(involved)

    zeros = []
    for first, second in itertools.combinations(labels, 2):
        if first not in involved and second not in involved:
            continue
        difference = trigpoly.subtract(polys[first], polys[second])
        if not difference.coeffs:
            raise IdenticalStrands(f"Strands {first} and {second} coincide.")
        for root in trigpoly.real_roots_on_circle(difference):
            t, pair = root.t, (first, second)
            if t >= TAU - config.MERGE_TOLERANCE:
                # A zero at the end of the turn is the zero near 0 under the labels there.
                t -= TAU
                pair = tuple(relabel(system, label, -1) for label in pair)
            zeros.append((t, *pair, root.tangential))
    zeros.sort()

    events = []
    window = []
    for zero in zeros:
        if window and zero[0] - window[-1][0] > config.MERGE_TOLERANCE:
            events.extend(_merge_window(system, window))
            window = []
        window.append(zero)
    if window:
        events.extend(_merge_window(system, window))
    return sorted(events, key=lambda event: event.t)


def _merge_window(system: StrandSystem, window: list) -> list[CrossingEvent]:
    """Split zeros at (nearly) one time into events of strands that meet each other."""
    parent = {}

    def find(label):
        while parent.setdefault(label, label) != label:
            label = parent[label]
        return label

    for _, first, second, _ in window:
        parent[find(first)] = find(second)

    groups = {}
    for zero in window:
        groups.setdefault(find(zero[1]), []).append(zero)

    events = []
    for zeros in groups.values():
        t = float(np.mean([zero[0] for zero in zeros]))
        labels = sorted({label for zero in zeros for label in zero[1:3]})
        tangent_pairs = tuple((first, second) for _, first, second, tangential in zeros if tangential)
        if tangent_pairs:
            kind = TANGENTIAL
        elif len(labels) >= 3:
            kind = MULTI_STRAND
        else:
            kind = TRANSVERSE
        before = {label: float(strand_value(system, label[0], label[1], t - config.ORDER_OFFSET)) for label in labels}
        participants = tuple(sorted(labels, key=lambda label: before[label]))
        value = float(np.mean([strand_value(system, c, j, t) for c, j in labels]))
        events.append(CrossingEvent(t, participants, kind, value, tangent_pairs))
    return events


def _safe_events(system: StrandSystem, involved: list[StrandLabel] | None = None) -> list[CrossingEvent] | None:
    try:
        return _detect(system, system.labels() if involved is None else involved)
    except IdenticalStrands:
        return None


def _tally(events: list[CrossingEvent] | None) -> dict[str, int]:
    if events is None:
        return {"identical": 1}
    counts = {TRANSVERSE: 0, TANGENTIAL: 0, MULTI_STRAND: 0}
    for event in events:
        counts[event.kind] += 1
    counts["participants"] = _participant_sum(events)
    counts["coincident"] = len(_coincident_groups(events))
    return counts


def _nongeneric(events: list[CrossingEvent]) -> list[CrossingEvent]:
    return [event for event in events if event.kind != TRANSVERSE]


def _participant_sum(events: list[CrossingEvent]) -> int:
    return sum(len(event.participants) for event in _nongeneric(events))


def _inter_component_tangency(event: CrossingEvent) -> bool:
    return any(first[0] != second[0] for first, second in event.tangent_pairs)


def _touches_other_component(event: CrossingEvent, c: int) -> bool:
    """Whether component c is tangent to another component in event."""
    return any((first[0] == c) != (second[0] == c) for first, second in event.tangent_pairs)


def _coincident_groups(events: list[CrossingEvent]) -> list[list[CrossingEvent]]:
    groups = []
    for event in events:
        if groups and event.t - groups[-1][-1].t <= config.MERGE_TOLERANCE:
            groups[-1].append(event)
        else:
            groups.append([event])
    return [group for group in groups if len(group) > 1]


def _perm_ok(system: StrandSystem) -> bool:
    if system.word is None or not system.schedule:
        return True
    try:
        ok, _ = check_perm_condition(system, system.word)
    except EndpointOnCrossing:
        return False
    return ok


def _trial_sizes(start: float):
    size = start
    while size >= config.EPSILON_FLOOR:
        yield size
        size /= 2


def _epsilon_start(system: StrandSystem) -> float:
    """A fraction of the smallest strand gap at the schedule endpoints.
    Systems without a schedule use the widest of the smallest gaps over a sweep of times.
    """
    def smallest_gap(t: float) -> float:
        values = sorted(strand_values(system, t).values())
        return min((upper - lower for lower, upper in zip(values, values[1:])), default=1.0)

    if system.schedule:
        gap = min(smallest_gap(t) for t in system.schedule)
    else:
        gap = max(smallest_gap(t) for t in np.linspace(0, TAU, 64, endpoint=False))
    if gap <= 0:
        gap = 1.0
    return config.EPSILON_START_FRACTION * gap


def perturb_constants(system: StrandSystem, log: list[Perturbation] | None = None) -> StrandSystem:
    """Add distinct small constants to the components that are constant or touch another component.
    Components are handled one after the other; each takes the largest trial size not used before.

    Raises:
        BudgetExhausted: If no size above the floor separates a component.
    """
    events = _safe_events(system)
    targets = {c for c, component in enumerate(system.components) if component.poly.is_constant()}
    if events is None:
        targets |= _identical_components(system)
    else:
        for event in events:
            if _inter_component_tangency(event):
                targets |= {first[0] for first, second in event.tangent_pairs if first[0] != second[0]}
                targets |= {second[0] for first, second in event.tangent_pairs if first[0] != second[0]}

    used = []
    start = _epsilon_start(system)
    for c in sorted(targets):
        involved = [label for label in system.labels() if label[0] == c]
        is_constant = system.components[c].poly.is_constant()
        for size in _trial_sizes(start):
            if size in used:
                continue
            candidate = system.with_poly(c, trigpoly.add(system.components[c].poly, trigpoly.constant(size)))
            if not _perm_ok(candidate):
                continue
            local = _safe_events(candidate, involved)
            if local is None or any(_touches_other_component(e, c) for e in local):
                continue
            if is_constant and _nongeneric(local):
                continue
            system = candidate
            used.append(size)
            if log is not None:
                log.append(Perturbation("constant", c, size))
            break
        else:
            raise BudgetExhausted(f"No constant offset separates component {c}.")
    return system


def _identical_components(system: StrandSystem) -> set[int]:
    labels = system.labels()
    polys = {label: strand_poly(system, label) for label in labels}
    result = set()
    for first, second in itertools.combinations(labels, 2):
        if not trigpoly.subtract(polys[first], polys[second]).coeffs:
            result |= {first[0], second[0]}
    return result


def perturb_phase(system: StrandSystem, log: list[Perturbation] | None = None) -> StrandSystem:
    """Shift the parameter of components meeting other components in multi-strand events.
    Each component gets its own shift; a shift is accepted once the component is in no
    multi-strand event with another component and touches nothing.

    Raises:
        BudgetExhausted: If no shift above the floor separates a component.
    """
    def mixed(events: list[CrossingEvent]) -> list[CrossingEvent]:
        return [e for e in events if e.kind == MULTI_STRAND and len(e.components()) > 1]

    events = find_crossings(system)
    targets = sorted({c for event in mixed(events) for c in event.components()})
    used = []
    for c in targets:
        if not any(c in event.components() for event in mixed(find_crossings(system))):
            continue
        involved = [label for label in system.labels() if label[0] == c]
        for size in _trial_sizes(config.EPSILON_START_FRACTION):
            if size in used:
                continue
            candidate = system.with_poly(c, trigpoly.shift_scale(system.components[c].poly, 1, size))
            if not _perm_ok(candidate):
                continue
            local = _safe_events(candidate, involved)
            if local is None or any(c in e.components() for e in mixed(local)):
                continue
            if any(_touches_other_component(e, c) for e in local):
                continue
            system = candidate
            used.append(size)
            if log is not None:
                log.append(Perturbation("phase", c, size))
            break
        else:
            raise BudgetExhausted(f"No phase shift separates component {c} from the others.")
    return system


def perturb_tangency(system: StrandSystem, event: CrossingEvent, log: list[Perturbation] | None = None) -> StrandSystem:
    """Remove a tangency of two strands of one component by adding eps cos(theta - center),
    centered on the first strand at the tangency so that the gap between the two strands grows.

    Raises:
        PreconditionError: If the event is not a tangency inside one component.
        BudgetExhausted: If no size above the floor reduces the number of tangencies.
    """
    if event.kind != TANGENTIAL or not event.tangent_pairs:
        raise PreconditionError(f"Event at t = {event.t!r} is {event.kind}, not tangential.", module="genericity")
    first, second = event.tangent_pairs[0]
    if first[0] != second[0]:
        raise PreconditionError("The tangency joins two components; offset their constants instead.", module="genericity")

    c, j = first
    component = system.components[c]
    center = math.fmod((event.t + TAU * j) / component.strands, TAU)
    reach = 1e-3
    gap = sum(
        strand_value(system, *first, event.t + offset) - strand_value(system, *second, event.t + offset)
        for offset in (-reach, reach)
    )
    sign = -1.0 if gap < 0 else 1.0

    before = _tally(find_crossings(system))[TANGENTIAL]
    for size in _trial_sizes(_epsilon_start(system)):
        bump = trigpoly.cosine(1, center, sign * size)
        candidate = system.with_poly(c, trigpoly.add(component.poly, bump))
        if not _perm_ok(candidate):
            continue
        events = _safe_events(candidate)
        if events is None or _tally(events)[TANGENTIAL] >= before:
            continue
        if log is not None:
            log.append(Perturbation("tangency", c, sign * size, center))
        return candidate
    raise BudgetExhausted(f"No bump removes the tangency at t = {event.t!r}.")


def multistrand_phase(t: float, strands: int, j: int, j_other: int) -> float:
    """The phase phi with cos((t + 2 pi j)/s - phi) = cos((t + 2 pi j')/s - phi), reduced to [0, 2 pi)."""
    return math.fmod((t + math.pi * (j + j_other)) / strands, TAU)


def perturb_multistrand(system: StrandSystem, event: CrossingEvent, log: list[Perturbation] | None = None) -> StrandSystem:
    """Split a multi-strand event of one component, keeping the crossing of its two lowest strands.
    The added eps' cos(theta - phi) moves both designated strands by the same amount at t.

    Raises:
        PreconditionError: If the event is not a multi-strand event of one component or a tangency exists.
        BudgetExhausted: If no size above the floor reduces the strands in non-generic events.
    """
    if event.kind != MULTI_STRAND or len(event.components()) != 1:
        raise PreconditionError(f"Event at t = {event.t!r} is not a multi-strand event of one component.", module="genericity")
    events = find_crossings(system)
    if any(e.kind == TANGENTIAL for e in events):
        raise PreconditionError("Tangencies must be removed before multi-strand events.", module="genericity")

    first, second = event.participants[:2]
    c = first[0]
    component = system.components[c]
    phi = multistrand_phase(event.t, component.strands, first[1], second[1])
    before = _participant_sum(events)

    for size in _trial_sizes(_epsilon_start(system)):
        for sign in (1.0, -1.0):
            bump = trigpoly.cosine(1, phi, sign * size)
            candidate = system.with_poly(c, trigpoly.add(component.poly, bump))
            if not _perm_ok(candidate):
                continue
            after = _safe_events(candidate)
            if after is None or any(e.kind == TANGENTIAL for e in after) or _participant_sum(after) >= before:
                continue
            kept = any(
                set(e.participants) == {first, second} and abs(e.t - event.t) <= 1e-6 for e in after
            )
            if not kept:
                continue
            if log is not None:
                log.append(Perturbation("multistrand", c, sign * size, phi))
            return candidate
    raise BudgetExhausted(f"No bump splits the multi-strand event at t = {event.t!r}.")


def perturb_coincident(system: StrandSystem, events: list[CrossingEvent], log: list[Perturbation] | None = None) -> StrandSystem:
    """Separate distinct transverse crossings that happen at the same time.
    Tries phase shifts of the components involved, then a bump that keeps the first crossing in place.

    Raises:
        BudgetExhausted: If nothing above the floor separates the crossings.
    """
    groups = _coincident_groups(events)
    if not groups:
        return system
    first_event, second_event = groups[0][:2]
    before = len(_coincident_groups(events))

    candidates = []
    for c in sorted(second_event.components() | first_event.components()):
        poly = system.components[c].poly
        candidates.append(("phase", c, None, lambda size, poly=poly: trigpoly.shift_scale(poly, 1, size)))
    if len(first_event.components()) == 1:
        (c, j), (_, j_other) = first_event.participants[:2]
        poly = system.components[c].poly
        phi = multistrand_phase(first_event.t, system.components[c].strands, j, j_other)
        candidates.append(("coincident", c, phi, lambda size, poly=poly, phi=phi: trigpoly.add(poly, trigpoly.cosine(1, phi, size))))

    for size in _trial_sizes(config.EPSILON_START_FRACTION):
        for kind, c, phase, build in candidates:
            for signed in (size, -size):
                candidate = system.with_poly(c, build(signed))
                if not _perm_ok(candidate):
                    continue
                after = _safe_events(candidate)
                if after is None or _nongeneric(after) or len(_coincident_groups(after)) >= before:
                    continue
                if log is not None:
                    log.append(Perturbation(kind, c, signed, phase))
                return candidate
    raise BudgetExhausted(f"No perturbation separates the crossings at t = {first_event.t!r}.")


def _clearance(times: list[float]) -> float:
    """The smallest distance of a time to a multiple of pi."""
    return min((min(t % math.pi, math.pi - t % math.pi) for t in times), default=math.pi)


def shift_off_pi(system: StrandSystem, events: list[CrossingEvent]) -> tuple[StrandSystem, float]:
    """Shift all crossing times so that multiples of pi sit in the middle of the largest gap.
    Nothing happens when every crossing is at least MIN_CROSSING_CLEARANCE from a multiple of pi.

    Returns:
        The shifted system and the shift. A crossing at t moves to t - shift.
    """
    times = [event.t for event in events]
    if not times or _clearance(times) >= config.MIN_CROSSING_CLEARANCE:
        return system, 0.0

    residues = sorted(t % math.pi for t in times)
    gaps = [(upper - lower, lower) for lower, upper in zip(residues, residues[1:])]
    gaps.append((residues[0] + math.pi - residues[-1], residues[-1]))
    width, lower = max(gaps, key=lambda gap: gap[0])
    shift = math.fmod(lower + width / 2, math.pi)

    for c, component in enumerate(system.components):
        system = system.with_poly(c, trigpoly.shift_scale(component.poly, 1, shift / component.strands))
    shifted = StrandSystem(system.components, tuple(t - shift for t in system.schedule), system.word)
    return shifted, shift


def _letter_index(system: StrandSystem, event: CrossingEvent) -> int:
    values = strand_values(system, event.t)
    below = sum(1 for label, value in values.items() if label not in event.participants and value < event.value)
    return below + 1


def make_generic(system: StrandSystem, word: BraidWord) -> tuple[StrandSystem, SingularBraidWord, GenericityReport]:
    """Run the perturbation passes until every crossing is generic, then shift the crossings off pi.

    Returns:
        The generic system, the singular braid read off from it and the report of all choices.

    Raises:
        BudgetExhausted: If a pass fails or the passes do not terminate.
    """
    report = GenericityReport()
    for _ in range(config.MAX_GENERICITY_PASSES):
        events = _safe_events(system)
        if events is None:
            name, step = "constants", lambda s: perturb_constants(s, report.perturbations)
        else:
            nongeneric = _nongeneric(events)
            constant_involved = any(
                system.components[c].poly.is_constant() for event in nongeneric for c in event.components()
            )
            tangential = [e for e in events if e.kind == TANGENTIAL]
            multi = [e for e in events if e.kind == MULTI_STRAND]
            if constant_involved or any(_inter_component_tangency(e) for e in tangential):
                name, step = "constants", lambda s: perturb_constants(s, report.perturbations)
            elif any(len(e.components()) > 1 for e in multi):
                name, step = "phase", lambda s: perturb_phase(s, report.perturbations)
            elif tangential:
                name, step = "tangency", lambda s, e=tangential[0]: perturb_tangency(s, e, report.perturbations)
            elif multi:
                name, step = "multistrand", lambda s, e=multi[0]: perturb_multistrand(s, e, report.perturbations)
            elif _coincident_groups(events):
                name, step = "coincident", lambda s, e=events: perturb_coincident(s, e, report.perturbations)
            else:
                break
        system = step(system)
        report.passes.append(PassRecord(name, _tally(events), _tally(_safe_events(system))))
    else:
        raise BudgetExhausted(f"The system is not generic after {config.MAX_GENERICITY_PASSES} passes.")

    system, report.shift = shift_off_pi(system, find_crossings(system))
    events = find_crossings(system)
    if _nongeneric(events) or _coincident_groups(events):
        raise BudgetExhausted("The shifted system is not generic.")
    if not _perm_ok(system):
        raise BudgetExhausted("The permutation condition broke during the passes.")

    report.events = events
    report.b_sing = SingularBraidWord(
        word.strands, tuple(_letter_index(system, event) for event in events), tuple(event.t for event in events)
    )
    return system, report.b_sing, report


def resolve_interval(order: list[StrandLabel], index: int, sign: int, crossings: list[tuple[StrandLabel, StrandLabel]]) -> list[int]:
    """Sign the crossings of one schedule interval.
    Every strand keeps the height of its rank at the interval start, the designated pair trading
    heights for a negative letter. A crossing is positive iff its left strand is the lower one.

    Args:
        order: The strands sorted by value at the interval start.
        index: The letter index of the interval.
        sign: The letter sign of the interval.
        crossings: (left, right) strand pairs, left being the smaller value before the crossing.

    Returns:
        The crossing signs, in the order given.

    Raises:
        UnresolvableInterval: If the designated pair does not cross an odd number of times.
    """
    designated = {order[index - 1], order[index]}
    count = sum(1 for pair in crossings if set(pair) == designated)
    if count % 2 == 0:
        raise UnresolvableInterval(f"The designated strands {sorted(designated)} cross {count} times in their interval.")

    height = {label: rank for rank, label in enumerate(order)}
    if sign < 0:
        height[order[index - 1]], height[order[index]] = height[order[index]], height[order[index - 1]]
    return [1 if height[left] < height[right] else -1 for left, right in crossings]


def assign_signs(b_sing: SingularBraidWord, word: BraidWord, report: GenericityReport, system: StrandSystem) -> list[int]:
    """Choose the sign of every singular crossing so the resolved braid is isotopic to the word.

    Raises:
        UnresolvableInterval: If a crossing lies on an interval endpoint or an interval cannot be resolved.
    """
    events = report.events
    if len(events) != b_sing.length:
        raise UnresolvableInterval(f"{len(events)} events for {b_sing.length} singular crossings.")

    labels = system.labels()
    signs: list[int | None] = [None] * len(events)
    for n, (index, sign) in enumerate(word.letters):
        start, end = system.schedule[n], system.schedule[n + 1]
        values = strand_values(system, start)
        order = sorted(labels, key=lambda label: values[label])
        inside, pairs = [], []
        for k, event in enumerate(events):
            turns = _interval_turns(event.t, start, end)
            if turns is None:
                continue
            inside.append(k)
            pairs.append(tuple(relabel(system, label, turns) for label in event.participants[:2]))
        for k, crossing_sign in zip(inside, resolve_interval(order, index, sign, pairs)):
            signs[k] = crossing_sign

    missing = [events[k].t for k, value in enumerate(signs) if value is None]
    if missing:
        raise UnresolvableInterval(f"Crossings at {missing} lie in no schedule interval.")
    report.signs = [int(value) for value in signs]
    return report.signs


def relabel(system: StrandSystem, label: StrandLabel, turns: int) -> StrandLabel:
    """The label at time t + 2 pi turns of the strand labelled label at time t.
    A full turn moves every strand of a component one label back, cyclically.
    """
    c, j = label
    return c, (j - 1 - turns) % system.components[c].strands + 1


def _interval_turns(t: float, start: float, end: float) -> int | None:
    """The number of full turns that bring t into (start, end), or None."""
    for turns in (-1, 0, 1):
        candidate = t + TAU * turns
        if min(abs(candidate - start), abs(candidate - end)) <= config.MERGE_TOLERANCE:
            raise UnresolvableInterval(f"The crossing at t = {t!r} lies on an interval endpoint.")
        if start < candidate < end:
            return turns
    return None
