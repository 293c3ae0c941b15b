"""This module contains the numerical verification of a constructed polynomial.

The roots of f(., r e^{it}) are tracked over t in [0, 2 pi] on tori of shrinking radius r. The
braid they trace is read off with these conventions: of two strands whose real parts cross,
the one with the smaller imaginary part passes over, and the crossing is positive when the
overcrossing strand has the smaller real part just before the crossing.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np
from scipy import optimize

from linkforge import config
from linkforge.braid import BraidWord, LinkInvariants, invariants, permutation
from linkforge.exceptions import (
    BoundViolated, LinkforgeError, MarginZero, NoConvergence, NoStabilization, SimultaneousCrossings,
    StrandCollision, StructuralFailure
)
from linkforge.sub_process.assemble import MixedPoly, degree_bound
from linkforge.trigpoly import TAU


@dataclass(frozen=True)
class Crossing:
    """A crossing of the tracked braid.

    Attributes:
        t: The time at which the real parts agree.
        pair: The strand columns (left, right), left having the smaller real part before t.
        over: The column of the overcrossing strand.
        index: The generator index.
        sign: The crossing sign.
    """
    t: float
    pair: tuple[int, int]
    over: int
    index: int
    sign: int

    def to_json(self) -> dict:
        """The crossing as a JSON compatible dict."""
        return {"t": self.t, "pair": list(self.pair), "over": self.over, "index": self.index, "sign": self.sign}


@dataclass
class TrackedBraid:
    """The roots of f on one torus.

    Attributes:
        radius: The torus radius r.
        times: Sample times from 0 to 2 pi.
        roots: roots[i, x] is strand x at times[i].
        closure: Strand x at 2 pi continues as strand closure[x] at 0.
        poly: The tracked polynomial.
        crossings: The crossings found by extract_word.
    """
    radius: float
    times: np.ndarray
    roots: np.ndarray
    closure: tuple[int, ...]
    poly: MixedPoly
    crossings: list[Crossing] = field(default_factory=list)

    @property
    def strands(self) -> int:
        """The number of tracked strands."""
        return self.roots.shape[1]

    def min_separation(self) -> float:
        """The smallest distance between two strands over all samples."""
        return float(min((_min_gap(row) for row in self.roots), default=math.inf))

    def trajectory(self, points: int = config.TRAJECTORY_POINTS) -> dict:
        """A down-sampled copy of the strands, scaled by r^{-2k}, for plotting."""
        picks = np.unique(np.linspace(0, len(self.times) - 1, min(points, len(self.times))).round().astype(int))
        scaled = self.roots[picks] / self.radius ** (2 * self.poly.k)
        return {
            "radius": self.radius,
            "times": self.times[picks].tolist(),
            "re": scaled.real.T.tolist(),
            "im": scaled.imag.T.tolist(),
            "crossings": [crossing.to_json() for crossing in self.crossings],
        }


@dataclass
class LinkSection:
    """The comparison of the extracted closure with the input."""
    passed: bool
    target: LinkInvariants | None = None
    found: LinkInvariants | None = None
    certified_radius: float | None = None
    word: BraidWord | None = None
    attempts: list[dict] = field(default_factory=list)
    schedule_matches: bool | None = None
    tracked: TrackedBraid | None = None
    error: str | None = None

    def to_json(self) -> dict:
        """The section as a JSON compatible dict."""
        return {
            "passed": self.passed,
            "target": None if self.target is None else self.target.to_json(),
            "found": None if self.found is None else self.found.to_json(),
            "certified_radius": self.certified_radius,
            "word": None if self.word is None else str(self.word),
            "attempts": self.attempts,
            "schedule_matches": self.schedule_matches,
            "error": self.error,
        }


@dataclass
class IsolationSection:
    """The structural and numerical weak isolation checks."""
    passed: bool
    structural: bool = False
    margins: list[dict] = field(default_factory=list)
    error: str | None = None

    def to_json(self) -> dict:
        """The section as a JSON compatible dict."""
        return {"passed": self.passed, "structural": self.structural, "margins": self.margins, "error": self.error}


@dataclass
class DegreeSection:
    """The degree bounds of the construction."""
    passed: bool
    skipped: bool = False
    degree: int | None = None
    bound: int | None = None
    knot_bound: int | None = None
    u_degree: int | None = None
    notice: str | None = None
    error: str | None = None

    def to_json(self) -> dict:
        """The section as a JSON compatible dict."""
        return {
            "passed": self.passed,
            "skipped": self.skipped,
            "degree": self.degree,
            "bound": self.bound,
            "knot_bound": self.knot_bound,
            "u_degree": self.u_degree,
            "notice": self.notice,
            "error": self.error,
        }


@dataclass
class VerificationReport:
    """All sections of a verification."""
    link: LinkSection
    isolation: IsolationSection
    degrees: DegreeSection

    @property
    def passed(self) -> bool:
        """Whether every section passed."""
        return self.link.passed and self.isolation.passed and self.degrees.passed

    def to_json(self) -> dict:
        """The report as a JSON compatible dict."""
        return {
            "passed": self.passed,
            "link": self.link.to_json(),
            "isolation": self.isolation.to_json(),
            "degrees": self.degrees.to_json(),
        }


def _horner(coefficients: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate rows of coefficients (lowest power first) at the matching rows of z."""
    result = np.zeros_like(z)
    for column in coefficients.T[::-1]:
        result = result * z + column[:, None]
    return result


def _min_gap(row: np.ndarray) -> float:
    if len(row) < 2:
        return math.inf
    return float(np.min(np.abs(row[:, None] - row[None, :])[np.triu_indices(len(row), 1)]))


def _aberth(coefficients: np.ndarray, initial: np.ndarray) -> np.ndarray:
    """Simultaneous Aberth iteration on monic rows of coefficients with comparable root sizes.

    Raises:
        NoConvergence: If a root residual stays above tolerance after the iteration cap.
    """
    z = initial.copy()
    slope = coefficients[:, 1:] * np.arange(1, coefficients.shape[1])
    eye = np.eye(z.shape[1], dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(config.ROOT_ITERATION_CAP):
            ratio = _horner(coefficients, z) / _horner(slope, z)
            ratio = np.where(np.isfinite(ratio), ratio, 0)
            difference = z[:, :, None] - z[:, None, :]
            difference[:, eye] = 1
            inverse = 1 / difference
            inverse[:, eye] = 0
            repulsion = np.sum(inverse, axis=2)
            step = ratio / (1 - ratio * repulsion)
            step = np.where(np.isfinite(step), step, 0)
            z = z - step
            if np.all(np.abs(step) <= 4 * np.finfo(float).eps * (1 + np.abs(z))):
                break

    scale = 1 + np.max(np.abs(coefficients[:, :-1]), axis=1, initial=0.0)
    residual = np.max(np.abs(_horner(coefficients, z)), axis=1)
    if not np.all(residual <= config.RESIDUAL_TOLERANCE * scale):
        worst = int(np.argmax(np.where(np.isfinite(residual), residual / scale, np.inf)))
        raise NoConvergence(f"Root residual {residual[worst]:.3e} after {config.ROOT_ITERATION_CAP} iterations.")
    return z


def roots_batch(f: MixedPoly, vs, guesses: np.ndarray | None = None) -> np.ndarray:
    """The s roots of f(., v) for every v in vs.
    Each row is scaled so that its roots have size about one before iterating.

    Args:
        f: The polynomial.
        vs: Values of v.
        guesses: Optional starting roots, one row per v.

    Returns:
        An array with one row of s roots per v.

    Raises:
        NoConvergence: If the iteration does not converge.
    """
    vs = np.atleast_1d(np.asarray(vs, dtype=complex))
    coefficients = f.coefficients_at(vs)
    coefficients = coefficients / coefficients[:, -1:]
    s = coefficients.shape[1] - 1

    powers = s - np.arange(s)
    with np.errstate(divide="ignore"):
        sizes = np.max(np.abs(coefficients[:, :-1]) ** (1 / powers), axis=1, initial=0.0)
    roots = np.zeros((len(vs), s), dtype=complex)
    live = sizes > 0
    if not np.any(live):
        return roots

    size = sizes[live][:, None]
    scaled = coefficients[live] / size ** np.concatenate([powers, [0]])
    if guesses is None:
        radius = 1 + np.max(np.abs(scaled[:, :-1]), axis=1, keepdims=True)
        initial = radius * np.exp(1j * (TAU * np.arange(s) / s + 0.4))
    else:
        initial = np.asarray(guesses, dtype=complex).reshape(len(vs), s)[live] / size
    roots[live] = _aberth(scaled, initial) * size
    return roots


def roots_at(f: MixedPoly, v: complex, guess: np.ndarray | None = None) -> np.ndarray:
    """The s roots of f(., v).

    Raises:
        NoConvergence: If the iteration does not converge.
    """
    return roots_batch(f, [v], None if guess is None else np.asarray(guess)[None, :])[0]


def _align(reference: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Reorder roots so that root x is the one matched to reference[x] by a minimal total distance."""
    _, columns = optimize.linear_sum_assignment(np.abs(reference[:, None] - roots[None, :]))
    return roots[columns]


def track_braid(f: MixedPoly, r: float, samples: int = config.DEFAULT_SAMPLES) -> TrackedBraid:
    """Follow the roots of f(., r e^{it}) from t = 0 to t = 2 pi.
    A step is accepted when no root moves more than half the smallest gap and the midpoint lies
    within a quarter of that gap of the linear prediction; otherwise the step is halved.

    Raises:
        StrandCollision: If two roots come closer than SEPARATION_FACTOR r^{2k} or the
            refinement depth is exhausted.
    """
    times = np.linspace(0.0, TAU, samples + 1)
    cold = roots_batch(f, r * np.exp(1j * times))
    separation = config.SEPARATION_FACTOR * r ** (2 * f.k)

    accepted_t = [0.0]
    accepted_z = [cold[0]]
    pending = [(float(times[i]), cold[i], 0) for i in range(samples, 0, -1)]
    while pending:
        t_end, raw_end, depth = pending.pop()
        t_start, z_start = accepted_t[-1], accepted_z[-1]
        t_mid = (t_start + t_end) / 2
        guess = (z_start + _align(z_start, raw_end)) / 2
        z_mid = _align(z_start, roots_at(f, r * np.exp(1j * t_mid), guess))
        z_end = _align(z_mid, raw_end)

        gap = min(_min_gap(z_start), _min_gap(z_mid), _min_gap(z_end))
        if gap < separation:
            raise StrandCollision(f"Roots collide near t = {t_mid!r} at radius {r!r}.", radius=r, t=t_mid)
        displacement = max(np.max(np.abs(z_mid - z_start)), np.max(np.abs(z_end - z_mid)))
        deviation = np.max(np.abs(z_mid - (z_start + z_end) / 2))
        if displacement < gap / 2 and deviation < gap / 4:
            accepted_t.extend([t_mid, t_end])
            accepted_z.extend([z_mid, z_end])
            continue
        if depth >= config.MAX_REFINEMENT_DEPTH:
            raise StrandCollision(f"Refinement exhausted near t = {t_mid!r} at radius {r!r}.", radius=r, t=t_mid)
        pending.append((t_end, raw_end, depth + 1))
        pending.append((t_mid, z_mid, depth + 1))

    roots = np.array(accepted_z)
    rows, columns = optimize.linear_sum_assignment(np.abs(roots[-1][:, None] - roots[0][None, :]))
    if np.max(np.abs(roots[-1][rows] - roots[0][columns]), initial=0.0) > _min_gap(roots[0]) / 4:
        raise StrandCollision(f"The roots at 2 pi do not return to the roots at 0 at radius {r!r}.", radius=r)
    return TrackedBraid(r, np.array(accepted_t), roots, tuple(int(c) for c in columns), f)


def _refine_crossing(tb: TrackedBraid, i: int, a: int, b: int) -> tuple[float, np.ndarray]:
    """Bisect the sample interval i for the time at which strands a and b have equal real parts."""
    lo, hi = tb.times[i], tb.times[i + 1]
    z_lo, z_hi = tb.roots[i], tb.roots[i + 1]
    d_lo = (z_lo[a] - z_lo[b]).real
    for _ in range(config.BISECTION_STEPS):
        if hi - lo <= 1e-14:
            break
        mid = (lo + hi) / 2
        z_mid = _align(z_lo, roots_at(tb.poly, tb.radius * np.exp(1j * mid), (z_lo + z_hi) / 2))
        if (z_mid[a] - z_mid[b]).real * d_lo > 0:
            lo, z_lo = mid, z_mid
        else:
            hi, z_hi = mid, z_mid
    return (lo + hi) / 2, (z_lo + z_hi) / 2


def extract_word(tb: TrackedBraid) -> BraidWord:
    """Read the braid word off a tracked braid and store its crossings on it.

    Raises:
        SimultaneousCrossings: If two crossings cannot be told apart, or the word does not
            reproduce the strand permutation of the tracked braid.
    """
    crossings = []
    real = tb.roots.real
    for i in range(len(tb.times) - 1):
        for a, b in itertools.combinations(range(tb.strands), 2):
            d_start = real[i, a] - real[i, b]
            d_end = real[i + 1, a] - real[i + 1, b]
            if d_start == 0 or d_start * d_end > 0:
                continue
            t, z = _refine_crossing(tb, i, a, b)
            left, right = (a, b) if d_start < 0 else (b, a)
            over = a if z[a].imag < z[b].imag else b
            level = (z[a].real + z[b].real) / 2
            tolerance = config.SEPARATION_FACTOR * tb.radius ** (2 * tb.poly.k)
            others = [z[x].real for x in range(tb.strands) if x not in (a, b)]
            if any(abs(value - level) <= tolerance for value in others):
                raise SimultaneousCrossings(f"Three strands share a real part at t = {t!r}.")
            index = 1 + sum(1 for value in others if value < level)
            crossings.append(Crossing(float(t), (left, right), over, index, 1 if over == left else -1))

    crossings.sort(key=lambda crossing: crossing.t)
    for before, after in zip(crossings, crossings[1:]):
        if after.t - before.t <= config.MERGE_TOLERANCE:
            raise SimultaneousCrossings(f"Crossings at t = {before.t!r} and {after.t!r} cannot be separated.")

    word = BraidWord(tb.strands, tuple((crossing.index, crossing.sign) for crossing in crossings))
    lane_of = np.empty(tb.strands, dtype=int)
    lane_of[np.argsort(real[0])] = np.arange(1, tb.strands + 1)
    images = [0] * tb.strands
    for column in range(tb.strands):
        images[lane_of[column] - 1] = int(lane_of[tb.closure[column]])
    if tuple(images) != permutation(word).images:
        raise SimultaneousCrossings("The extracted word does not reproduce the strand permutation; a crossing was missed.")
    tb.crossings = crossings
    return word


def radius_schedule(f: MixedPoly, radius_start: float = config.RADIUS_START) -> list[float]:
    """Halving radii from the first one at which the A-term weight r^{m - 2ks} is small enough."""
    r = radius_start
    if f.m is not None and f.m > 2 * f.k * f.s:
        while r >= config.RADIUS_FLOOR and r ** (f.m - 2 * f.k * f.s) > config.MAX_RESOLVING_WEIGHT:
            r /= 2
    radii = []
    while r >= config.RADIUS_FLOOR:
        radii.append(r)
        r /= 2
    return radii


def _track_and_extract(f: MixedPoly, r: float, samples: int) -> tuple[TrackedBraid, BraidWord]:
    """Track and extract, doubling the sample count when crossings cannot be separated."""
    for attempt in range(config.MAX_RETRY_COUNT):
        try:
            tb = track_braid(f, r, samples * 2 ** attempt)
            return tb, extract_word(tb)
        except SimultaneousCrossings:
            if attempt == config.MAX_RETRY_COUNT - 1:
                raise
    raise SimultaneousCrossings("Extraction retries exhausted.")


def predicted_crossing_times(crossing_times) -> list[float]:
    """Where the resolved crossings of a singular braid appear on the torus.
    The crossing at t shows at t / 2 + pi when t < pi and at t / 2 otherwise.
    """
    return sorted(t / 2 + math.pi if t < math.pi else t / 2 for t in crossing_times)


def verify_link(
    f: MixedPoly,
    word: BraidWord,
    radius_start: float = config.RADIUS_START,
    samples: int = config.DEFAULT_SAMPLES,
    predicted_times: list[float] | None = None,
) -> LinkSection:
    """Extract words on shrinking tori until two consecutive radii agree and compare with the word.

    Args:
        f: The polynomial.
        word: The braid whose closure f should realize.
        radius_start: The largest radius considered.
        samples: The initial number of samples per torus.
        predicted_times: Optional crossing times the extracted crossings should sit at.

    Raises:
        NoStabilization: If the radius floor is reached without two agreeing radii.
    """
    target = invariants(word)
    attempts = []
    previous = None
    for r in radius_schedule(f, radius_start):
        try:
            tb, extracted = _track_and_extract(f, r, samples)
            found = invariants(extracted)
        except LinkforgeError as error:
            attempts.append({"radius": r, "error": str(error)})
            previous = None
            continue
        attempts.append({"radius": r, "word": str(extracted), "crossings": extracted.length})
        if previous is not None and previous.same_closure(found):
            section = LinkSection(found.same_closure(target), target, found, r, extracted, attempts, tracked=tb)
            if predicted_times is not None:
                section.schedule_matches = len(tb.crossings) == len(predicted_times) and all(
                    min(abs(crossing.t - t) for t in predicted_times) <= config.SCHEDULE_TOLERANCE
                    for crossing in tb.crossings
                )
            return section
        previous = found
    raise NoStabilization("No two consecutive radii gave the same closure.", attempts=attempts)


def verify_weak_isolation(f: MixedPoly, radii: list[float], samples: int = config.DEFAULT_SAMPLES) -> IsolationSection:
    """Check f(O) = 0, Df(O) = 0 and f(u, 0) = u^s, and that the tracked zeros are not critical.
    The margin min |df/du| over the tracked zeros is reported raw and divided by r^{2k(s-1)}.

    Raises:
        StructuralFailure: If a structural condition fails.
        MarginZero: If a tracked zero is critical.
        StrandCollision: If tracking fails at one of the radii.
    """
    present = {key: c for key, c in f.monomials.items() if c != 0}
    low = sorted(key for key in present if sum(key) < 2)
    if low:
        raise StructuralFailure(f"Monomials {low} have total degree below 2, so f(O) != 0 or Df(O) != 0.")
    if f.s < 2:
        raise StructuralFailure("A weakly isolated singularity needs s >= 2.")
    slice_terms = {key: c for key, c in present.items() if key[1] == key[2] == 0}
    if set(slice_terms) != {(f.s, 0, 0)} or abs(slice_terms[(f.s, 0, 0)] - 1) > config.ROOT_TOLERANCE:
        raise StructuralFailure(f"f(u, 0) is {slice_terms}, not u^{f.s}.")

    margins = []
    for r in radii:
        tb = track_braid(f, r, samples)
        coefficients = f.coefficients_at(r * np.exp(1j * tb.times))
        slope = coefficients[:, 1:] * np.arange(1, coefficients.shape[1])
        raw = float(np.min(np.abs(_horner(slope, tb.roots))))
        normalized = raw / r ** (2 * f.k * (f.s - 1))
        if normalized <= config.RESIDUAL_TOLERANCE:
            raise MarginZero(f"A tracked zero at radius {r!r} has |df/du| = {raw:.3e}.")
        margins.append({"radius": r, "raw": raw, "normalized": normalized})
    passed = bool(margins) and all(m["normalized"] > 10 * config.RESIDUAL_TOLERANCE for m in margins)
    return IsolationSection(passed, True, margins)


def verify_degree_bounds(f: MixedPoly, word: BraidWord) -> DegreeSection:
    """Check deg f against the bounds of the construction and deg_u f = s.

    Raises:
        BoundViolated: If a bound fails.
    """
    if word.length <= config.MAX_STATE_SUM_CROSSINGS and invariants(word).is_unknot():
        return DegreeSection(True, skipped=True, notice="The closure is the unknot; the degree bounds do not apply.")

    degree, bound = f.total_degree(), degree_bound(word)
    knot_bound = None
    if len(permutation(word).cycles()) == 1:
        knot_bound = 2 * word.strands * word.length * (word.strands + 1) + 1
    if degree > bound or (knot_bound is not None and degree > knot_bound):
        raise BoundViolated(f"deg f = {degree} exceeds the bound {bound}.")
    if f.u_degree() != word.strands:
        raise BoundViolated(f"deg_u f = {f.u_degree()} but the braid has {word.strands} strands.")
    return DegreeSection(True, degree=degree, bound=bound, knot_bound=knot_bound, u_degree=f.u_degree())
