"""This module contains Steps 3 to 6: the polynomial g of the doubled strand system, its radially
weighted homogeneous lift p_k, the resolving term A and the final polynomial f = p_k + r^m A.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import math

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import optimize

from linkforge import config
from linkforge import trigpoly
from linkforge.braid import BraidWord, SingularBraidWord, components
from linkforge.exceptions import (
    BoundViolated, EvenFrequencyPresent, EvennessViolated, IllConditioned, NegativeExponent, ParseError,
    PreconditionError, RealnessViolated, SideSignMismatch
)
from linkforge.sub_process.parametrize import StrandSystem, strand_poly
from linkforge.trigpoly import TAU, TrigPoly

Monomial = tuple[int, int, int]


@dataclass(frozen=True)
class UPolyTrig:
    """A monic polynomial in u whose coefficients are real series in t.

    Attributes:
        coefficients: coefficients[a] is the coefficient of u^a.
    """
    coefficients: tuple[TrigPoly, ...]

    @property
    def strands(self) -> int:
        """The u-degree s."""
        return len(self.coefficients) - 1

    def degree_t(self) -> Fraction:
        """The largest frequency over all coefficients."""
        return max(coefficient.degree() for coefficient in self.coefficients)

    def coefficients_at(self, t: float) -> np.ndarray:
        """The real coefficients at time t, lowest power first."""
        return np.array([trigpoly.evaluate(coefficient, t).real for coefficient in self.coefficients])

    def to_json(self) -> list[dict]:
        """The coefficients as JSON compatible dicts."""
        return [coefficient.to_json() for coefficient in self.coefficients]


@dataclass(frozen=True)
class MixedPoly:
    """A semiholomorphic polynomial: a sum of c u^a v^k1 vbar^k2.

    Attributes:
        monomials: (a, k1, k2) to complex coefficient.
        s: The u-degree.
        k: The lift parameter of p_k.
        m: The odd exponent of the resolving term, None for p_k alone.
    """
    monomials: dict[Monomial, complex]
    s: int
    k: int
    m: int | None = None

    def total_degree(self) -> int:
        """max(a + k1 + k2) over the monomials."""
        return max((sum(key) for key in self.monomials), default=0)

    def u_degree(self) -> int:
        """The largest power of u."""
        return max((key[0] for key in self.monomials), default=0)

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        keys = sorted(self.monomials)
        powers = np.array(keys, dtype=int).reshape(-1, 3)
        coefficients = np.array([self.monomials[key] for key in keys], dtype=complex)
        selector = np.zeros((len(keys), self.s + 1), dtype=complex)
        selector[np.arange(len(keys)), powers[:, 0]] = 1
        return powers[:, 1], powers[:, 2], coefficients, selector

    def coefficients_at(self, v) -> np.ndarray:
        """The coefficients in u at one or many values of v, lowest power first along the last axis."""
        v = np.asarray(v, dtype=complex)
        k1, k2, coefficients, selector = self._arrays
        terms = coefficients * v[..., None] ** k1 * np.conj(v)[..., None] ** k2
        return terms @ selector

    def evaluate(self, u: complex, v: complex) -> complex:
        """f(u, v)."""
        return complex(P.polyval(complex(u), self.coefficients_at(v)))

    def to_json(self) -> dict:
        """The polynomial in the interchange schema."""
        return {
            "s": self.s,
            "k": self.k,
            "m": self.m,
            "monomials": [
                {"u": a, "v": k1, "vbar": k2, "re": c.real, "im": c.imag}
                for (a, k1, k2), c in sorted(self.monomials.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MixedPoly":
        """Read the interchange schema.

        Raises:
            ParseError: If a field is missing or has the wrong type.
        """
        try:
            monomials = {}
            for entry in data["monomials"]:
                key = (int(entry["u"]), int(entry["v"]), int(entry["vbar"]))
                if min(key) < 0:
                    raise ValueError(f"negative exponent in {entry}")
                monomials[key] = monomials.get(key, 0j) + complex(float(entry["re"]), float(entry["im"]))
            m = data.get("m")
            return cls(monomials, int(data["s"]), int(data["k"]), None if m is None else int(m))
        except (KeyError, TypeError, ValueError) as error:
            raise ParseError(f"Not a polynomial: {error}") from error


@dataclass(frozen=True)
class CrossingDatum:
    """The interpolation data of one singular crossing.

    Attributes:
        t: The crossing time in the singular braid.
        critical_sign: The sign of g at the critical point between the colliding roots.
        z: The sign of the crossing.
        y: critical_sign * cos(t / 2).
        side_offset: The offset in g-time at which the critical sign was read.
    """
    t: float
    critical_sign: int
    z: int
    y: float
    side_offset: float

    def to_json(self) -> dict:
        """The datum as a JSON compatible dict."""
        return {"t": self.t, "critical_sign": self.critical_sign, "z": self.z, "y": self.y, "side_offset": self.side_offset}


def build_g(system: StrandSystem) -> UPolyTrig:
    """Expand the product of (u - strand) over the strands run at double speed.

    Raises:
        EvennessViolated: If a frequency that is not an even integer survives the expansion.
        RealnessViolated: If a coefficient is not real.
    """
    product = [trigpoly.constant(1.0)]
    for label in system.labels():
        root = strand_poly(system, label, speed=2)
        expanded = [TrigPoly()] + product
        for a, coefficient in enumerate(product):
            expanded[a] = trigpoly.subtract(expanded[a], trigpoly.multiply(root, coefficient))
        product = expanded
    return UPolyTrig(tuple(_clean_coefficient(coefficient) for coefficient in product))


def _clean_coefficient(poly: TrigPoly) -> TrigPoly:
    scale = max([1.0] + [abs(c) for c in poly.coeffs.values()])
    kept = {}
    for q, c in poly.coeffs.items():
        frequency = Fraction(q, poly.base_den)
        if frequency.denominator != 1 or frequency.numerator % 2:
            if abs(c) > config.REALNESS_TOLERANCE * scale:
                raise EvennessViolated(f"Frequency {frequency} of g has coefficient {c!r}.")
            continue
        kept[frequency.numerator] = c
    for q, c in kept.items():
        if abs(c - kept.get(-q, 0j).conjugate()) > config.REALNESS_TOLERANCE * scale:
            raise RealnessViolated(f"Frequencies {q} and {-q} of g are not conjugate.")
    return trigpoly.truncate(TrigPoly.create(kept, 1, is_real=True))


def choose_k(g: UPolyTrig, s: int, length: int | None = None) -> int:
    """The least k with 2ks > deg_t g for which every coefficient of u^a fits into 2k(s - a).

    Args:
        g: The polynomial of Step 3.
        s: The number of strands.
        length: The word length; when given, k is asserted to be at most floor(length / 2) + 1.

    Raises:
        BoundViolated: If k exceeds its bound.
    """
    k = 1
    while not (
        2 * k * s > g.degree_t()
        and all(2 * k * (s - a) >= coefficient.degree() for a, coefficient in enumerate(g.coefficients))
    ):
        k += 1
    if length is not None and k > length // 2 + 1:
        raise BoundViolated(f"k = {k} exceeds floor({length}/2) + 1.", module="assemble")
    return k


def lift_to_pk(g: UPolyTrig, k: int, s: int) -> MixedPoly:
    """Lift g to the polynomial p_k with p_k(u, r e^{it}) = r^{2ks} g(u / r^{2k}, e^{it}).

    Raises:
        NegativeExponent: If a frequency does not fit into 2k(s - a).
    """
    monomials = {}
    for a, coefficient in enumerate(g.coefficients):
        weight = 2 * k * (s - a)
        for q, c in coefficient.coeffs.items():
            _add_monomial(monomials, a, Fraction(q, coefficient.base_den), weight, c)
    return MixedPoly(monomials, s, k)


def _add_monomial(monomials: dict[Monomial, complex], a: int, frequency: Fraction, weight: int, c: complex) -> None:
    """Add c u^a r^weight e^{i frequency t} written in v and vbar."""
    if frequency.denominator != 1:
        raise NegativeExponent(f"Frequency {frequency} is not an integer.")
    q = frequency.numerator
    rest = weight - abs(q)
    if rest < 0 or rest % 2:
        raise NegativeExponent(f"Frequency {q} does not fit into weight {weight}.")
    half = rest // 2
    key = (a, q + half, half) if q >= 0 else (a, half, half - q)
    monomials[key] = monomials.get(key, 0j) + c


def _critical_sign(g: UPolyTrig, tau: float, index: int) -> int:
    """The sign of g at its critical point between roots index and index + 1 at g-time tau."""
    coefficients = g.coefficients_at(tau)
    roots = np.sort(P.polyroots(coefficients).real)
    slope = P.polyder(coefficients)
    critical = optimize.brentq(lambda u: P.polyval(u, slope), roots[index - 1], roots[index], xtol=1e-15)
    return 1 if P.polyval(critical, coefficients) > 0 else -1


def crossing_data(g: UPolyTrig, b_sing: SingularBraidWord, signs: list[int]) -> list[CrossingDatum]:
    """Read the critical sign of every singular crossing next to it in g.
    The crossing at t appears in g at g-time t / 2. The sign is read at t / 2 - h and t / 2 + h,
    with h halved until both sides agree.

    Raises:
        SideSignMismatch: If the two sides disagree for every h tried.
    """
    times = list(b_sing.crossing_times)
    if not times:
        raise PreconditionError("The singular braid has no crossings.", module="assemble")
    gaps = [after - before for before, after in zip(times, times[1:])] + [times[0] + TAU - times[-1]]
    start = config.SIDE_OFFSET_FRACTION * min(gaps) / 2

    data = []
    for t, index, sign in zip(times, b_sing.letters, signs):
        offset = start
        for _ in range(config.MAX_SIDE_HALVINGS):
            below = _critical_sign(g, t / 2 - offset, index)
            above = _critical_sign(g, t / 2 + offset, index)
            if below == above:
                break
            offset /= 2
        else:
            raise SideSignMismatch(f"The critical sign at the crossing t = {t!r} differs on its two sides.")
        data.append(CrossingDatum(t, below, int(sign), below * math.cos(t / 2), offset))
    return data


def solve_star(data: list[CrossingDatum]) -> TrigPoly:
    """Find A~ with A~(t_k) = y_k / cos(t_k / 2) and d arg A~ / dt (t_k) = z_k.
    The derivative is prescribed as i z_k A~(t_k), which fixes the argument's rate and keeps
    the modulus stationary.

    Raises:
        IllConditioned: If the Hermite system fails or the argument rate is off.
    """
    if not data:
        raise PreconditionError("Problem (*) needs at least one crossing.", module="assemble")
    nodes = [datum.t for datum in data]
    values = [datum.y / math.cos(datum.t / 2) for datum in data]
    derivatives = [1j * datum.z * value for datum, value in zip(data, values)]
    a_tilde = trigpoly.hermite_interpolate(nodes, values, derivatives)

    for datum, rate in zip(data, argument_rate(a_tilde, nodes)):
        if abs(rate - datum.z) > config.INTERPOLATION_RESIDUAL * 10:
            raise IllConditioned(f"The argument of A~ turns at rate {rate!r} instead of {datum.z} at t = {datum.t!r}.")
    return a_tilde


def argument_rate(poly: TrigPoly, times) -> np.ndarray:
    """d arg(poly) / dt = (Re T Im T' - Im T Re T') / |T|^2 at the given times."""
    value = trigpoly.evaluate(poly, np.asarray(times, dtype=float))
    slope = trigpoly.evaluate(trigpoly.derivative(poly), np.asarray(times, dtype=float))
    return (value.real * slope.imag - value.imag * slope.real) / np.abs(value) ** 2


def build_A(a_tilde: TrigPoly) -> TrigPoly:  # pylint: disable=invalid-name
    """A(e^{it}) = A~(e^{2it}) cos t.

    Raises:
        EvenFrequencyPresent: If A has an even frequency.
    """
    result = trigpoly.multiply(trigpoly.shift_scale(a_tilde, 2, 0.0), trigpoly.cosine(1))
    for q in result.coeffs:
        frequency = Fraction(q, result.base_den)
        if frequency.denominator != 1 or frequency.numerator % 2 == 0:
            raise EvenFrequencyPresent(f"A has the frequency {frequency}.")
    return result


def degree_bound(word: BraidWord) -> int:
    """s l (2 + s) + 1 + sum of s_C^2 l over the components."""
    s, length = word.strands, word.length
    return s * length * (2 + s) + 1 + sum(len(cycle) ** 2 * length for cycle in components(word))


def choose_m(a: TrigPoly, k: int, s: int, bound: int | None = None) -> int:
    """The least odd m above deg A and above 2ks.

    Raises:
        BoundViolated: If m exceeds the given bound.
    """
    floor = max(math.floor(a.degree()), 2 * k * s)
    m = floor + 1 if (floor + 1) % 2 else floor + 2
    if bound is not None and m > bound:
        raise BoundViolated(f"m = {m} exceeds the degree bound {bound}.", module="assemble")
    return m


def assemble_f(p_k: MixedPoly, a: TrigPoly, m: int) -> MixedPoly:
    """f = p_k + r^m A written in v and vbar.

    Raises:
        NegativeExponent: If m is even, or not above deg A and 2ks.
    """
    if m % 2 == 0 or m <= a.degree() or m <= 2 * p_k.k * p_k.s:
        raise NegativeExponent(f"m = {m} must be odd and above deg A = {a.degree()} and 2ks = {2 * p_k.k * p_k.s}.")
    monomials = dict(p_k.monomials)
    for q, c in a.coeffs.items():
        _add_monomial(monomials, 0, Fraction(q, a.base_den), m, c)
    return MixedPoly(monomials, p_k.s, p_k.k, m)


def radial_weighted_degree(poly: MixedPoly, weights: tuple[int, int]) -> tuple[bool, int]:
    """Weighted degrees p1 a + p2 (k1 + k2) of the monomials.

    Returns:
        Whether all monomials share one weighted degree, and the largest weighted degree.
    """
    first, second = weights
    degrees = {first * a + second * (k1 + k2) for a, k1, k2 in poly.monomials}
    return len(degrees) <= 1, max(degrees, default=0)
