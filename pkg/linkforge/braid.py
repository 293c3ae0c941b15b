"""This module contains braid words, their permutations and the invariants of their closures.

Letters act from bottom to top: in a word the earlier letter acts first. A permutation maps
the lane a strand starts in to the lane it ends in.
"""

from collections import Counter
from dataclasses import dataclass
import itertools
import math

from linkforge import config
from linkforge.exceptions import (
    IndexOutOfRange, LengthMismatch, OddInterComponentCount, ParseError, TimeAtPi, TooManyCrossings, ZeroLetter
)

Letter = tuple[int, int]


@dataclass(frozen=True)
class BraidWord:
    """A word in the Artin generators.

    Attributes:
        strands: The number of strands s.
        letters: Pairs (index, sign) with 1 <= index <= s - 1 and sign +1 or -1.
    """
    strands: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple((int(index), int(sign)) for index, sign in self.letters))
        if self.strands < 1:
            raise IndexOutOfRange(f"A braid needs at least one strand, got {self.strands}.")
        for index, sign in self.letters:
            if not 1 <= index <= self.strands - 1:
                raise IndexOutOfRange(f"Letter index {index} is outside 1..{self.strands - 1}.")
            if sign not in (1, -1):
                raise ValueError(f"Letter sign must be +1 or -1, got {sign}.")

    @property
    def length(self) -> int:
        """The number of letters."""
        return len(self.letters)

    @property
    def exponent_sum(self) -> int:
        """The sum of the letter signs, the writhe of the closure diagram."""
        return sum(sign for _, sign in self.letters)

    def mirror(self) -> "BraidWord":
        """The word with every sign flipped."""
        return BraidWord(self.strands, tuple((index, -sign) for index, sign in self.letters))

    def __add__(self, other: "BraidWord") -> "BraidWord":
        if self.strands != other.strands:
            raise ValueError("Only words on the same number of strands can be concatenated.")
        return BraidWord(self.strands, self.letters + other.letters)

    def __str__(self) -> str:
        return " ".join(str(index * sign) for index, sign in self.letters)


@dataclass(frozen=True)
class SingularBraidWord:
    """A word in the singular generators together with the times of its crossings."""
    strands: int
    letters: tuple[int, ...]
    crossing_times: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(index) for index in self.letters))
        object.__setattr__(self, "crossing_times", tuple(float(t) for t in self.crossing_times))
        if len(self.letters) != len(self.crossing_times):
            raise LengthMismatch(f"{len(self.letters)} letters but {len(self.crossing_times)} crossing times.")
        for index in self.letters:
            if not 1 <= index <= self.strands - 1:
                raise IndexOutOfRange(f"Letter index {index} is outside 1..{self.strands - 1}.")
        for before, after in itertools.pairwise(self.crossing_times):
            if not before < after:
                raise ValueError("Crossing times must be strictly increasing.")
        for t in self.crossing_times:
            if math.isclose(t, math.pi, rel_tol=0, abs_tol=config.MERGE_TOLERANCE):
                raise TimeAtPi(f"A crossing at t = {t!r} lies on pi.")

    @property
    def length(self) -> int:
        """The number of singular crossings."""
        return len(self.letters)


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1, ..., n}. images[p - 1] is the image of p."""
    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"{self.images} is not a permutation.")

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        """The identity on size points."""
        return cls(tuple(range(1, size + 1)))

    @classmethod
    def transposition(cls, size: int, index: int) -> "Permutation":
        """The transposition (index index+1) on size points."""
        images = list(range(1, size + 1))
        images[index - 1], images[index] = images[index], images[index - 1]
        return cls(tuple(images))

    @property
    def size(self) -> int:
        """The number of points."""
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition: (self * other)(p) = self(other(p))."""
        if self.size != other.size:
            raise ValueError("Permutations of different sizes cannot be composed.")
        return Permutation(tuple(self(other(point)) for point in range(1, self.size + 1)))

    def cycles(self) -> list[tuple[int, ...]]:
        """The cycles, each starting at its smallest point, ordered by that point."""
        seen = set()
        result = []
        for start in range(1, self.size + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            point = self(start)
            while point != start:
                cycle.append(point)
                seen.add(point)
                point = self(point)
            result.append(tuple(cycle))
        return result

    def is_identity(self) -> bool:
        """Whether every point is fixed."""
        return self.images == tuple(range(1, self.size + 1))


@dataclass(frozen=True)
class LaurentPoly:
    """An integer Laurent polynomial in A stored as sorted (exponent, coefficient) pairs."""
    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: dict[int, int]) -> "LaurentPoly":
        """Build a polynomial, dropping zero coefficients."""
        return cls(tuple(sorted((int(e), int(c)) for e, c in mapping.items() if c != 0)))

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> "LaurentPoly":
        """The polynomial coefficient * A^exponent."""
        return cls.from_mapping({exponent: coefficient})

    def as_dict(self) -> dict[int, int]:
        """The exponent to coefficient mapping."""
        return dict(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        total = Counter(self.as_dict())
        for exponent, coefficient in other.terms:
            total[exponent] += coefficient
        return LaurentPoly.from_mapping(total)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        product = Counter()
        for (e1, c1), (e2, c2) in itertools.product(self.terms, other.terms):
            product[e1 + e2] += c1 * c2
        return LaurentPoly.from_mapping(product)

    def scale(self, factor: int) -> "LaurentPoly":
        """Multiply every coefficient by factor."""
        return LaurentPoly.from_mapping({e: c * factor for e, c in self.terms})

    def shift(self, exponent: int) -> "LaurentPoly":
        """Multiply by A^exponent."""
        return LaurentPoly(tuple((e + exponent, c) for e, c in self.terms))

    def substitute_inverse(self) -> "LaurentPoly":
        """Substitute A -> A^-1."""
        return LaurentPoly.from_mapping({-e: c for e, c in self.terms})

    def to_json(self) -> dict[str, int]:
        """Exponents as string keys, for JSON."""
        return {str(e): c for e, c in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exponent, coefficient in sorted(self.terms, reverse=True):
            magnitude = abs(coefficient)
            body = f"A^{exponent}" if exponent else ""
            if magnitude != 1 or not body:
                body = f"{magnitude}{body}"
            parts.append(("-" if coefficient < 0 else "+", body))
        head_sign, head = parts[0]
        text = f"-{head}" if head_sign == "-" else head
        return text + "".join(f" {sign} {body}" for sign, body in parts[1:])


@dataclass(frozen=True)
class LinkInvariants:
    """The closure invariants compared by the verification."""
    component_count: int
    cycle_type: tuple[int, ...]
    linking_matrix: tuple[tuple[int, ...], ...]
    exponent_sum: int
    jones: LaurentPoly

    def canonical_linking(self) -> tuple[int, ...]:
        """The linking matrix, flattened, minimised over relabelings of the components."""
        size = self.component_count
        if size < 2:
            return ()
        return min(
            tuple(self.linking_matrix[order[i]][order[j]] for i in range(size) for j in range(size))
            for order in itertools.permutations(range(size))
        )

    def same_closure(self, other: "LinkInvariants") -> bool:
        """Whether the compared invariants agree. The exponent sum is not a link invariant and is ignored."""
        return (
            self.component_count == other.component_count
            and self.cycle_type == other.cycle_type
            and self.canonical_linking() == other.canonical_linking()
            and self.jones == other.jones
        )

    def is_unknot(self) -> bool:
        """Whether the invariants are those of the unknot."""
        return self.component_count == 1 and self.jones == LaurentPoly.monomial(0)

    def to_json(self) -> dict:
        """The invariants as a JSON compatible dict."""
        return {
            "component_count": self.component_count,
            "cycle_type": list(self.cycle_type),
            "linking_matrix": [list(row) for row in self.linking_matrix],
            "exponent_sum": self.exponent_sum,
            "jones": self.jones.to_json(),
            "jones_text": str(self.jones),
        }


def parse_braid_word(text: str, strands: int) -> BraidWord:
    """Parse whitespace separated signed generators.

    Args:
        text: The word, e.g. "1 -2 1 -2". An empty text is the identity braid.
        strands: The number of strands.

    Returns:
        The parsed word.

    Raises:
        ParseError: If a token is not an integer.
        ZeroLetter: If a token is 0.
        IndexOutOfRange: If a token's absolute value is at least strands.
    """
    letters = []
    for token in text.split():
        try:
            value = int(token)
        except ValueError as error:
            raise ParseError(f"'{token}' is not a signed integer.", module="braid") from error
        if value == 0:
            raise ZeroLetter("The letter 0 is not an Artin generator.")
        if abs(value) >= strands:
            raise IndexOutOfRange(f"Letter {value} needs more than {strands} strands.")
        letters.append((abs(value), 1 if value > 0 else -1))
    return BraidWord(strands, tuple(letters))


def permutation(word: BraidWord) -> Permutation:
    """The permutation of the word's strands, earlier letters acting first."""
    result = Permutation.identity(word.strands)
    for index, _ in word.letters:
        result = Permutation.transposition(word.strands, index) * result
    return result


def components(word: BraidWord) -> list[tuple[int, ...]]:
    """The components of the closure as cycles of starting lanes.
    The cycle (p0, p1, ...) lists the lanes in the order the component passes through them,
    so len(cycle) is the component's strand count s_C.
    """
    return permutation(word).cycles()


def linking_matrix(word: BraidWord) -> tuple[tuple[int, ...], ...]:
    """Pairwise linking numbers of the components, indexed like components(word).

    Raises:
        OddInterComponentCount: If a signed crossing count between two components is odd.
    """
    cycles = components(word)
    component_of = {lane: c for c, cycle in enumerate(cycles) for lane in cycle}
    occupant = list(range(1, word.strands + 1))
    counts = [[0] * len(cycles) for _ in cycles]

    for index, sign in word.letters:
        first = component_of[occupant[index - 1]]
        second = component_of[occupant[index]]
        if first != second:
            counts[first][second] += sign
            counts[second][first] += sign
        occupant[index - 1], occupant[index] = occupant[index], occupant[index - 1]

    for row in counts:
        for count in row:
            if count % 2:
                raise OddInterComponentCount(f"Signed crossing counts {counts} are not all even.")
    return tuple(tuple(count // 2 for count in row) for row in counts)


class _LoopCounter:
    """Counts the loops of a state of the closure diagram.
    Arcs are identified up to the strands that run past a crossing; each state then joins the
    four arcs around every crossing in pairs.
    """
    def __init__(self, word: BraidWord):
        strands, length = word.strands, word.length
        if length == 0:
            self.node_count = strands
            self.crossings = []
            return

        parent = list(range(strands * length))

        def arc(level: int, lane: int) -> int:
            return (level % length) * strands + lane - 1

        for level, (index, _) in enumerate(word.letters):
            for lane in range(1, strands + 1):
                if lane not in (index, index + 1):
                    _union(parent, arc(level, lane), arc(level + 1, lane))

        roots = sorted({_find(parent, node) for node in range(len(parent))})
        compact = {root: position for position, root in enumerate(roots)}
        self.node_count = len(roots)
        self.crossings = [
            (
                sign,
                compact[_find(parent, arc(level, index))],
                compact[_find(parent, arc(level, index + 1))],
                compact[_find(parent, arc(level + 1, index))],
                compact[_find(parent, arc(level + 1, index + 1))],
            )
            for level, (index, sign) in enumerate(word.letters)
        ]

    def count(self, state: int) -> int:
        """The number of loops when bit n of state selects the A-smoothing at crossing n."""
        parent = list(range(self.node_count))
        for bit, (sign, bottom_left, bottom_right, top_left, top_right) in enumerate(self.crossings):
            a_smoothing = bool((state >> bit) & 1)
            if a_smoothing == (sign > 0):
                _union(parent, bottom_left, top_left)
                _union(parent, bottom_right, top_right)
            else:
                _union(parent, bottom_left, bottom_right)
                _union(parent, top_left, top_right)
        return sum(1 for node in range(self.node_count) if _find(parent, node) == node)


def _find(parent: list[int], node: int) -> int:
    while parent[node] != node:
        parent[node] = parent[parent[node]]
        node = parent[node]
    return node


def _union(parent: list[int], first: int, second: int) -> None:
    first, second = _find(parent, first), _find(parent, second)
    if first != second:
        parent[max(first, second)] = min(first, second)


def kauffman_jones(word: BraidWord) -> LaurentPoly:
    """The Kauffman bracket of the closure normalized by (-A)^(-3w).
    A single loop has bracket 1 and every further loop contributes -A^2 - A^-2.

    Raises:
        TooManyCrossings: If the word has more than MAX_STATE_SUM_CROSSINGS letters.
    """
    if word.length > config.MAX_STATE_SUM_CROSSINGS:
        raise TooManyCrossings(f"{word.length} crossings exceed the state sum limit of {config.MAX_STATE_SUM_CROSSINGS}.")

    counter = _LoopCounter(word)
    tally = Counter()
    for state in range(1 << word.length):
        a_exponent = 2 * bin(state).count("1") - word.length
        tally[(a_exponent, counter.count(state))] += 1

    loop = LaurentPoly.from_mapping({2: -1, -2: -1})
    loop_powers = [LaurentPoly.monomial(0)]
    for _ in range(word.strands + word.length):
        loop_powers.append(loop_powers[-1] * loop)

    bracket = LaurentPoly()
    for (a_exponent, loops), states in sorted(tally.items()):
        bracket = bracket + loop_powers[loops - 1].shift(a_exponent).scale(states)

    writhe = word.exponent_sum
    return bracket.shift(-3 * writhe).scale(-1 if writhe % 2 else 1)


def project_to_singular(word: BraidWord, crossing_times: list[float]) -> SingularBraidWord:
    """Forget the signs of a word and attach crossing times.

    Raises:
        LengthMismatch: If the number of times differs from the number of letters.
        TimeAtPi: If a time equals pi.
    """
    if len(crossing_times) != word.length:
        raise LengthMismatch(f"{word.length} letters but {len(crossing_times)} crossing times.")
    return SingularBraidWord(word.strands, tuple(index for index, _ in word.letters), tuple(crossing_times))


def markov_stabilize(word: BraidWord) -> BraidWord:
    """Add a strand and the letter joining it to the last one. The closure is unchanged."""
    return BraidWord(word.strands + 1, word.letters + ((word.strands, 1),))


def invariants(word: BraidWord) -> LinkInvariants:
    """Collect the closure invariants of a word."""
    cycles = components(word)
    return LinkInvariants(
        component_count=len(cycles),
        cycle_type=tuple(sorted(len(cycle) for cycle in cycles)),
        linking_matrix=linking_matrix(word),
        exponent_sum=word.exponent_sum,
        jones=kauffman_jones(word),
    )
