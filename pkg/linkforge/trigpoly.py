"""This module contains finite Fourier series over rational frequencies.

A TrigPoly stores its frequencies as integers over a common denominator so that rescaling the
argument by rational factors stays exact. Only the coefficients are floating point.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np
from scipy import optimize

from linkforge import config
from linkforge.exceptions import IdenticallyZero, IllConditioned

TAU = 2 * math.pi


@dataclass(frozen=True)
class TrigPoly:
    """A finite Fourier series t -> sum of c * exp(i q t / base_den).

    Attributes:
        base_den: The common denominator L of the frequencies.
        coeffs: Frequency numerator q to complex coefficient, without zeros.
        is_real: Whether the series is real valued.
    """
    base_den: int = 1
    coeffs: dict[int, complex] = field(default_factory=dict)
    is_real: bool = False

    @classmethod
    def create(cls, coeffs: dict[int, complex], base_den: int = 1, is_real: bool = False) -> "TrigPoly":
        """Build a normalized series.
        Zero coefficients are dropped, real series are made exactly conjugate symmetric and the
        denominator is reduced as far as the frequencies allow.
        """
        cleaned = {int(q): complex(c) for q, c in coeffs.items() if c != 0}
        if is_real:
            cleaned = _symmetrize(cleaned)
        divisor = math.gcd(base_den, *cleaned) if cleaned else base_den
        return cls(base_den // divisor, {q // divisor: cleaned[q] for q in sorted(cleaned)}, is_real)

    def degree(self) -> Fraction:
        """The largest absolute frequency."""
        if not self.coeffs:
            return Fraction(0)
        return Fraction(max(abs(q) for q in self.coeffs), self.base_den)

    def frequencies(self) -> np.ndarray:
        """The frequencies q / base_den as floats, in coefficient order."""
        return np.array(list(self.coeffs), dtype=float) / self.base_den

    def values(self) -> np.ndarray:
        """The coefficients, in frequency order."""
        return np.array(list(self.coeffs.values()), dtype=complex)

    def is_constant(self) -> bool:
        """Whether only the frequency 0 is present."""
        return all(q == 0 for q in self.coeffs)

    def to_json(self) -> dict:
        """The series as a JSON compatible dict."""
        return {
            "base_den": self.base_den,
            "is_real": self.is_real,
            "coeffs": [[q, c.real, c.imag] for q, c in self.coeffs.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TrigPoly":
        """Inverse of to_json."""
        return cls(int(data["base_den"]), {int(q): complex(re, im) for q, re, im in data["coeffs"]}, bool(data["is_real"]))


def _symmetrize(coeffs: dict[int, complex]) -> dict[int, complex]:
    result = {}
    for q in set(coeffs) | {-q for q in coeffs}:
        value = (coeffs.get(q, 0j) + coeffs.get(-q, 0j).conjugate()) / 2
        if q == 0:
            value = complex(value.real, 0.0)
        if value != 0:
            result[q] = value
    return result


def constant(value: complex) -> TrigPoly:
    """The constant series."""
    return TrigPoly.create({0: value}, is_real=complex(value).imag == 0)


def exponential(frequency: int, coefficient: complex = 1) -> TrigPoly:
    """The series coefficient * exp(i frequency t)."""
    return TrigPoly.create({frequency: coefficient})


def cosine(frequency: int = 1, phase: float = 0.0, amplitude: float = 1.0) -> TrigPoly:
    """The series amplitude * cos(frequency t - phase)."""
    rotation = amplitude / 2 * complex(math.cos(phase), math.sin(phase))
    return TrigPoly.create({frequency: rotation.conjugate(), -frequency: rotation}, is_real=True)


def sine(frequency: int = 1, amplitude: float = 1.0) -> TrigPoly:
    """The series amplitude * sin(frequency t)."""
    return cosine(frequency, math.pi / 2, amplitude)


def evaluate(poly: TrigPoly, t):
    """Evaluate the series at a time or an array of times.

    Args:
        poly: The series.
        t: A real number or an array of real numbers.

    Returns:
        A complex number, or a complex array shaped like t.
    """
    times = np.asarray(t, dtype=float)
    if not poly.coeffs:
        result = np.zeros(times.shape, dtype=complex)
    else:
        result = np.exp(1j * np.multiply.outer(times, poly.frequencies())) @ poly.values()
    if times.ndim == 0:
        return complex(result)
    return result


def _rebase(poly: TrigPoly, base_den: int) -> dict[int, complex]:
    factor = base_den // poly.base_den
    return {q * factor: c for q, c in poly.coeffs.items()}


def derivative(poly: TrigPoly) -> TrigPoly:
    """The derivative with respect to t."""
    return TrigPoly.create(
        {q: c * 1j * q / poly.base_den for q, c in poly.coeffs.items()}, poly.base_den, poly.is_real
    )


def add(first: TrigPoly, second: TrigPoly) -> TrigPoly:
    """The sum of two series."""
    base_den = math.lcm(first.base_den, second.base_den)
    total = _rebase(first, base_den)
    for q, c in _rebase(second, base_den).items():
        total[q] = total.get(q, 0j) + c
    return TrigPoly.create(total, base_den, first.is_real and second.is_real)


def scale(poly: TrigPoly, factor: complex) -> TrigPoly:
    """The series multiplied by a constant."""
    factor = complex(factor)
    return TrigPoly.create(
        {q: c * factor for q, c in poly.coeffs.items()}, poly.base_den, poly.is_real and factor.imag == 0
    )


def subtract(first: TrigPoly, second: TrigPoly) -> TrigPoly:
    """The difference of two series."""
    return add(first, scale(second, -1))


def multiply(first: TrigPoly, second: TrigPoly) -> TrigPoly:
    """The product of two series."""
    base_den = math.lcm(first.base_den, second.base_den)
    product = {}
    for q1, c1 in _rebase(first, base_den).items():
        for q2, c2 in _rebase(second, base_den).items():
            product[q1 + q2] = product.get(q1 + q2, 0j) + c1 * c2
    return TrigPoly.create(product, base_den, first.is_real and second.is_real)


def shift_scale(poly: TrigPoly, alpha: Fraction | int, beta: float) -> TrigPoly:
    """The series t -> poly(alpha t + beta).

    Args:
        poly: The series.
        alpha: A rational rescaling of the argument.
        beta: A real shift of the argument.

    Returns:
        The rescaled series. Frequencies stay exact.
    """
    alpha = Fraction(alpha)
    base_den = poly.base_den * alpha.denominator
    rotated = {
        q * alpha.numerator: c * complex(math.cos(q * beta / poly.base_den), math.sin(q * beta / poly.base_den))
        for q, c in poly.coeffs.items()
    }
    return TrigPoly.create(rotated, base_den, poly.is_real)


def real_part(poly: TrigPoly) -> TrigPoly:
    """The series of the real part of poly."""
    if poly.is_real:
        return poly
    return TrigPoly.create(poly.coeffs, poly.base_den, is_real=True)


def truncate(poly: TrigPoly, tolerance: float = config.TRUNCATION_TOLERANCE) -> TrigPoly:
    """Drop coefficients smaller than tolerance times the largest one."""
    if not poly.coeffs:
        return poly
    largest = max(abs(c) for c in poly.coeffs.values())
    kept = {q: c for q, c in poly.coeffs.items() if abs(c) >= tolerance * largest}
    return TrigPoly.create(kept, poly.base_den, poly.is_real)


def _solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Minimum norm least squares solution with a residual check."""
    solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    residual = np.max(np.abs(matrix @ solution - rhs)) if len(rhs) else 0.0
    if residual > config.INTERPOLATION_RESIDUAL * (1 + np.max(np.abs(rhs), initial=0.0)):
        raise IllConditioned(f"Interpolation residual {residual:.3e} is above tolerance; the nodes are clustered.")
    return solution


def interpolate(nodes, values) -> TrigPoly:
    """Interpolate values at distinct nodes by a series of degree floor(x / 2) for x nodes.
    An even node count leaves one degree of freedom, fixed by the minimum norm solution.

    Raises:
        IllConditioned: If the nodes repeat or the system cannot be solved to tolerance.
    """
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=complex)
    if len(nodes) == 0 or len(nodes) != len(values):
        raise ValueError("Interpolation needs as many values as nodes, and at least one.")
    if len(np.unique(nodes)) != len(nodes):
        raise IllConditioned("Interpolation nodes are not distinct.")

    degree = len(nodes) // 2
    frequencies = np.arange(-degree, degree + 1)
    solution = _solve(np.exp(1j * np.outer(nodes, frequencies)), values)
    poly = TrigPoly.create(dict(zip(frequencies.tolist(), solution)), is_real=bool(np.all(values.imag == 0)))
    return truncate(poly)


def hermite_interpolate(nodes, values, derivatives) -> TrigPoly:
    """Find a series of degree at most n through n nodes with given values and derivatives.
    There are 2n + 1 coefficients for 2n conditions; the minimum norm solution is returned.

    Raises:
        IllConditioned: If the nodes repeat or the system cannot be solved to tolerance.
    """
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=complex)
    derivatives = np.asarray(derivatives, dtype=complex)
    if len(nodes) == 0 or not len(nodes) == len(values) == len(derivatives):
        raise ValueError("Hermite interpolation needs a value and a derivative at every node.")
    if len(np.unique(nodes)) != len(nodes):
        raise IllConditioned("Hermite nodes are not distinct.")

    frequencies = np.arange(-len(nodes), len(nodes) + 1)
    basis = np.exp(1j * np.outer(nodes, frequencies))
    matrix = np.vstack([basis, basis * (1j * frequencies)])
    solution = _solve(matrix, np.concatenate([values, derivatives]))
    return truncate(TrigPoly.create(dict(zip(frequencies.tolist(), solution))))


@dataclass(frozen=True)
class CircleRoot:
    """A zero of a real series.

    Attributes:
        t: The position of the zero.
        multiplicity_flag: "simple", or "tangential" for an even order contact.
    """
    t: float
    multiplicity_flag: str = "simple"

    @property
    def tangential(self) -> bool:
        """Whether the zero is an even order contact."""
        return self.multiplicity_flag == "tangential"


def real_roots_on_circle(poly: TrigPoly, start: float = 0.0, stop: float = TAU) -> list[CircleRoot]:
    """Find the zeros of the real part of poly in [start, stop).
    The interval is scanned densely; sign changes are refined by Brent's method and local
    extrema of |T| that touch zero are reported as tangential zeros.

    Args:
        poly: The series, normally real.
        start: Start of the interval.
        stop: End of the interval, excluded.

    Returns:
        The zeros in increasing order.

    Raises:
        IdenticallyZero: If poly has no coefficients.
    """
    if not poly.coeffs:
        raise IdenticallyZero("Cannot find the zeros of the zero series.")
    poly = real_part(poly)
    slope = derivative(poly)

    def value(t: float) -> float:
        return evaluate(poly, t).real

    def rate(t: float) -> float:
        return evaluate(slope, t).real

    span = stop - start
    # A scan over a whole period sees the zeros near start again near stop.
    period = span if math.isclose(span, TAU * poly.base_den) else None
    count = max(config.ROOT_SCAN_SAMPLES, int(config.ROOT_SCAN_DENSITY * float(poly.degree()) * span / TAU) + 1)
    grid = np.linspace(start, stop, count + 1)
    values = evaluate(poly, grid).real
    rates = evaluate(slope, grid).real

    candidates = [float(t) for t in grid[np.abs(values) <= config.ROOT_TOLERANCE]]
    for i in np.nonzero(values[:-1] * values[1:] < 0)[0]:
        candidates.append(optimize.brentq(value, grid[i], grid[i + 1], xtol=1e-15))
    for i in np.nonzero(rates[:-1] * rates[1:] < 0)[0]:
        extremum = optimize.brentq(rate, grid[i], grid[i + 1], xtol=1e-15)
        if abs(value(extremum)) <= config.ROOT_TOLERANCE:
            candidates.append(extremum)

    roots = []
    for group in _cluster(sorted(candidates), config.MERGE_TOLERANCE, period):
        t = min(group, key=lambda x: abs(value(x)))
        if period is not None:
            t = start + (t - start) % period
        if not start <= t < stop:
            continue
        flag = "tangential" if abs(rate(t)) <= config.TANGENCY_TOLERANCE else "simple"
        roots.append(CircleRoot(t, flag))
    return sorted(roots, key=lambda root: root.t)


def _cluster(points: list[float], tolerance: float, period: float | None = None) -> list[list[float]]:
    """Group sorted points whose neighbours are within tolerance.
    With a period, the last group joins the first when they meet across the end of the period;
    its points are moved back by one period.
    """
    groups = []
    for point in points:
        if groups and point - groups[-1][-1] <= tolerance:
            groups[-1].append(point)
        else:
            groups.append([point])
    if period is not None and len(groups) > 1 and groups[0][0] + period - groups[-1][-1] <= tolerance:
        groups[0] = [point - period for point in groups.pop()] + groups[0]
    return groups
