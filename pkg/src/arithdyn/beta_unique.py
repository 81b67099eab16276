"""
Unique expansions in bases between 1 and 2.

Covers the Thue-Morse sequence and its four-letter analogue, the
Komornik-Loreti constant and its N-digit generalizations, the gap map whose
surviving orbits are exactly the uniquely expandable points, and counts of
words in the uniqueness language.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cache
from typing import Callable, NamedTuple, Optional

import mpmath
import numpy as np

from .beta_core import Beta, expansion_of_one
from .digits import DigitSeq, lex_compare
from .errors import BoundaryUndecidedError, OutOfRangeError, PrecisionError, SpecParseError
from .exactnum import Approx, golden

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = mpmath.mpf("1e-9")
MAX_WORD_DEPTH = 40


class ThueMorse:
    """The Thue-Morse sequence 0110 1001 1001 0110 ..., indexed from 0.

    t(n) is the parity of the binary digit sum of n, so t(2n) = t(n) and
    t(2n+1) = 1 - t(n).
    """

    def __call__(self, n: int) -> int:
        return n.bit_count() & 1

    def word(self, n: int) -> list[int]:
        return [self(k) for k in range(n)]

    def sequence(self, offset: int = 0) -> DigitSeq:
        """t(offset), t(offset + 1), ... as a generated sequence."""
        return DigitSeq.from_function(lambda i: self(i + offset), 1)


THUE_MORSE = ThueMorse()

RHO = {"a": "ac", "b": "ad", "c": "da", "d": "db"}

# Reading the shifted Thue-Morse sequence four symbols at a time
FOUR_BLOCKS = {(1, 1, 0, 1): "d", (0, 0, 1, 1): "b", (0, 0, 1, 0): "a", (1, 1, 0, 0): "c"}


class RhoWord:
    """Fixed point of a -> ac, b -> ad, c -> da, d -> db starting from d."""

    def __init__(self):
        self._word = "d"

    def word(self, n: int) -> str:
        while len(self._word) < n:
            self._word = "".join(RHO[ch] for ch in self._word)
        return self._word[:n]

    def letter(self, k: int) -> str:
        """The k-th letter, counting from 1."""
        return self.word(k)[k - 1]


def thue_morse_blocks(n: int) -> str:
    """
    First ``n`` letters of t(1) t(2) ... read in blocks of four.

    Raises:
        SpecParseError: If a block outside the four known shapes appears.
    """
    letters = []
    for k in range(n):
        block = tuple(THUE_MORSE(4 * k + j) for j in range(1, 5))
        letter = FOUR_BLOCKS.get(block)
        if letter is None:
            raise SpecParseError(f"Unexpected block {block} at {k}", position=k)
        letters.append(letter)
    return "".join(letters)


def _critical_digits(N: int) -> Callable[[int], int]:
    """Digit d_k (k >= 1) of the unique expansion of 1 at the critical base."""
    if N < 2:
        raise OutOfRangeError(f"Digit count N must be at least 2, got {N}", value=N)
    n = N // 2
    if N % 2 == 0:
        return lambda k: (n - 1) + THUE_MORSE(k)
    rho = RhoWord()
    q = {"a": n - 1, "b": n, "c": n, "d": n + 1}
    return lambda k: q[rho.letter(k)]


def _series_root(digit: Callable[[int], int], top: int, lo, hi, eps) -> Approx:
    """
    Root of sum_{k>=1} digit(k) x^-k = 1 in (lo, hi).

    The series is truncated where its tail drops below the working precision
    and the tail bound is carried into the error.
    """
    eps = mpmath.mpf(eps)
    dps = max(30, int(-mpmath.log10(eps)) + 15)
    with mpmath.workdps(dps):
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        terms = int(math.ceil((dps + 10) * math.log(10) / float(mpmath.log(lo)))) + 1
        digits = [digit(k) for k in range(1, terms + 1)]

        def f(x):
            return mpmath.fsum(d * x ** (-k) for k, d in enumerate(digits, start=1)) - 1

        def df(x):
            return -mpmath.fsum(k * d * x ** (-k - 1) for k, d in enumerate(digits, start=1))

        root = mpmath.findroot(f, (lo, hi), solver="anderson")
        if not lo < root < hi:
            raise PrecisionError(f"Root search left the bracket ({lo}, {hi})")
        tail = top * lo ** (-terms) / (lo - 1)
        error = tail / abs(df(root)) + mpmath.mpf(10) ** (-dps + 5)
        if error > eps:
            raise PrecisionError(f"Could not reach tolerance {eps} (bound {error})")
        logger.debug("Series root %s with %d terms", mpmath.nstr(root, 15), terms)
        return Approx(+root, error)


def komornik_loreti(eps=DEFAULT_RESOLUTION) -> Approx:
    """
    The smallest base in (1, 2) in which 1 has a unique 0-1 expansion.

    It solves sum_{k>=1} t(k) x^-k = 1, i.e. 1 = 0.11010011... in that base.
    """
    return _series_root(THUE_MORSE, 1, mpmath.mpf(3) / 2, 2, eps)


def generalized_critical_base(N: int, eps=DEFAULT_RESOLUTION) -> Approx:
    """
    The smallest base in which 1 has a unique expansion with digits 0..N-1.

    Even N = 2n uses the digits n - 1 + t(k); odd N = 2n + 1 maps the letters
    a, b, c, d of the four-letter fixed point to n - 1, n, n, n + 1.
    """
    digit = _critical_digits(N)
    return _series_root(digit, N // 2 + 1, mpmath.mpf(N + 1) / 2, N, eps)


def doubling_hole_threshold(eps=mpmath.mpf("1e-15")) -> Approx:
    """
    Critical hole size for the doubling map, sum_{k>=0} t(k) 2^-(k+1).

    Holes [delta, 1 - delta] with delta above it leave a survivor set of
    positive dimension.
    """
    eps = mpmath.mpf(eps)
    dps = max(30, int(-mpmath.log10(eps)) + 10)
    with mpmath.workdps(dps):
        terms = int(dps * 3.33) + 8
        value = mpmath.fsum(THUE_MORSE(k) * mpmath.mpf(2) ** (-(k + 1)) for k in range(terms))
        return Approx(+value, mpmath.mpf(2) ** (-terms))


def _check_base(beta: Beta) -> mpmath.mpf:
    b = beta.approx()
    if not 1 < b < 2:
        raise OutOfRangeError(f"Base must lie in (1, 2), got {mpmath.nstr(b, 12)}", value=b, interval=(1, 2))
    return b


class UniqueCheck(NamedTuple):
    unique: bool
    endpoint: bool = False


def _parry_bounds(beta: Beta, depth: int) -> tuple[DigitSeq, DigitSeq]:
    parry = expansion_of_one(beta, depth=depth)
    return parry.a, parry.a.complement(1)


def is_unique_expansion(eps: DigitSeq, beta: Beta, depth: int = 200) -> UniqueCheck:
    """
    Decide whether ``eps`` is the only 0-1 expansion of its value.

    Every shift (the sequence itself included) must lie strictly between the
    complement of the Parry sequence and the Parry sequence. The two
    constant sequences are unique as endpoints of the interval.
    """
    _check_base(beta)
    if eps.is_zero or (eps.is_purely_periodic and eps.period == (1,)):
        return UniqueCheck(True, endpoint=True)
    a, a_bar = _parry_bounds(beta, depth)
    for tail in eps.tails():
        above = lex_compare(tail, a_bar)
        below = lex_compare(tail, a)
        if above < 0 or below > 0:
            return UniqueCheck(False)
        if above == 0 and not (tail.truncated or a_bar.truncated):
            return UniqueCheck(False)
        if below == 0 and not (tail.truncated or a.truncated):
            return UniqueCheck(False)
    return UniqueCheck(True)


class UniquenessCategory(str, Enum):
    """Size of the set of points with a unique expansion."""

    EMPTY = "Empty"
    COUNTABLE = "Countable"
    UNCOUNTABLE_ZERO_DIM = "UncountableZeroDim"
    POSITIVE_DIM = "PositiveDim"


@dataclass(frozen=True)
class UniquenessVerdict:
    category: UniquenessCategory
    witnesses: Optional[dict] = field(default=None)


def classify_unique_set(beta: Beta, resolution=DEFAULT_RESOLUTION) -> UniquenessVerdict:
    """
    Place beta against the golden ratio and the Komornik-Loreti constant.

    Raises:
        OutOfRangeError: If beta is not in (1, 2).
        BoundaryUndecidedError: If beta is within ``resolution`` of a threshold
            it cannot be compared with exactly.
    """
    b = _check_base(beta)
    resolution = mpmath.mpf(resolution)
    g = golden()
    if beta.is_algebraic and beta.field == g:
        return UniquenessVerdict(UniquenessCategory.EMPTY, {"threshold": "golden"})

    gap = b - g.root(beta.dps)
    if abs(gap) < resolution:
        raise BoundaryUndecidedError("Base is within resolution of the golden ratio", threshold="golden")
    if gap < 0:
        return UniquenessVerdict(UniquenessCategory.EMPTY)

    kl = komornik_loreti(resolution / 100)
    gap = b - kl.value
    if abs(gap) < resolution:
        raise BoundaryUndecidedError(
            "Base is within resolution of the Komornik-Loreti constant",
            threshold=mpmath.nstr(kl.value, 15),
        )
    witnesses = {"komornik_loreti": kl.render(12)}
    if gap < 0:
        return UniquenessVerdict(UniquenessCategory.COUNTABLE, witnesses)
    return UniquenessVerdict(UniquenessCategory.POSITIVE_DIM, witnesses)


class GapOrbit(NamedTuple):
    entered: bool
    step: Optional[int]
    orbit: list


def gap_interval(beta: Beta) -> tuple:
    """The closed gap [1/beta, 1/(beta(beta - 1))]."""
    b = beta.value
    return 1 / b, 1 / (b * (b - 1))


def gap_map_orbit(x, beta: Beta, n: int) -> GapOrbit:
    """
    Iterate the map with a gap from x, up to ``n`` steps.

    Reports the first step at which the orbit lies in the closed gap (the
    point then has at least two expansions), or survival.

    Raises:
        OutOfRangeError: If x is outside [0, 1/(beta - 1)].
    """
    _check_base(beta)
    beta, (x,) = beta.prepare(x)
    b = beta.value
    if x < 0 or x > 1 / (b - 1):
        raise OutOfRangeError("Gap map is defined on [0, 1/(beta - 1)]", value=x)
    lo, hi = gap_interval(beta)
    orbit = [x]
    with mpmath.workdps(beta.dps):
        for k in range(n + 1):
            if lo <= x <= hi:
                return GapOrbit(True, k, orbit)
            if k == n:
                break
            x = b * x if x < lo else b * x - 1
            orbit.append(x)
    return GapOrbit(False, None, orbit)


def unique_expansion_of_one_orbit(beta: Beta, n: int = 60) -> GapOrbit:
    """Gap-map orbit of 1; survival means 1 has a unique expansion so far."""
    return gap_map_orbit(1, beta, n)


class GapSurvival(NamedTuple):
    entered_fraction: float
    survived_fraction: float
    samples: int


def gap_map_survival_fraction(beta: Beta, samples: int, n: int, seed: int = 0) -> GapSurvival:
    """Monte Carlo share of uniform random points whose orbit hits the gap."""
    b = float(_check_base(beta))
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0 / (b - 1.0), samples)
    lo, hi = 1.0 / b, 1.0 / (b * (b - 1.0))
    entered = np.zeros(samples, dtype=bool)
    for _ in range(n + 1):
        hit = (x >= lo) & (x <= hi) & ~entered
        entered |= hit
        x = np.where(x < lo, b * x, b * x - 1.0)
    share = float(entered.mean())
    return GapSurvival(share, 1.0 - share, samples)


def _tied_lengths(u: tuple[int, ...], length: int) -> list[int]:
    """Lengths l <= length with u[:l] a suffix of u[:length]."""
    return [l for l in range(length + 1) if u[:l] == u[length - l : length]]


def _count_lex_words(upper: tuple[int, ...], lower: tuple[int, ...], n: int) -> int:
    """
    Count 0-1 words of length n all of whose suffixes lie between the
    prefixes of ``lower`` and ``upper`` of the same length (ties admitted).

    The state is the longest suffix still equal to a prefix of each bound.
    """
    upper_ties = cache(lambda L: _tied_lengths(upper, L))
    lower_ties = cache(lambda L: _tied_lengths(lower, L))
    states = {(0, 0): 1}
    for _ in range(n):
        nxt: dict[tuple[int, int], int] = {}
        for (lu, ll), count in states.items():
            for c in (0, 1):
                new_u = 0
                ok = True
                for l in upper_ties(lu):
                    if c > upper[l]:
                        ok = False
                        break
                    if c == upper[l]:
                        new_u = max(new_u, l + 1)
                if not ok:
                    continue
                new_l = 0
                for l in lower_ties(ll):
                    if c < lower[l]:
                        ok = False
                        break
                    if c == lower[l]:
                        new_l = max(new_l, l + 1)
                if not ok:
                    continue
                key = (new_u, new_l)
                nxt[key] = nxt.get(key, 0) + count
        states = nxt
    return sum(states.values())


def unique_word_count(beta: Beta, n: int) -> int:
    """
    Number of length-n words in the language of the uniqueness set.

    Raises:
        OutOfRangeError: If n exceeds 40 or beta is not in (1, 2).
    """
    if not 1 <= n <= MAX_WORD_DEPTH:
        raise OutOfRangeError(f"Word length must be in [1, {MAX_WORD_DEPTH}]", value=n)
    _check_base(beta)
    a, a_bar = _parry_bounds(beta, max(200, n + 8))
    return _count_lex_words(a.prefix(n + 1), a_bar.prefix(n + 1), n)


def unique_entropy_estimate(beta: Beta, n: int) -> float:
    """log(count) / n, a finite-depth estimate of the entropy of the uniqueness shift."""
    count = unique_word_count(beta, n)
    return math.log(count) / n if count else float("-inf")


def binary_expansion(value, n: int) -> DigitSeq:
    """First ``n`` binary digits of a real in [0, 1)."""
    with mpmath.workdps(max(30, n // 3 + 10)):
        y = mpmath.mpf(value)
        digits = []
        for _ in range(n):
            y *= 2
            d = int(y >= 1)
            y -= d
            digits.append(d)
    return DigitSeq.finite(digits, 1, truncated=True)


def doubling_hole_survivor_count(delta, n: int) -> int:
    """
    Length-n binary words surviving the doubling map with hole [delta, 1 - delta].

    The upper bound is the binary expansion of 2*delta and the lower bound its
    complement.

    Raises:
        OutOfRangeError: If delta is not in (0, 1/2).
    """
    d = mpmath.mpf(delta)
    if not 0 < d < mpmath.mpf(1) / 2:
        raise OutOfRangeError("Hole parameter must lie in (0, 1/2)", value=d, interval=(0, 0.5))
    if not 1 <= n <= MAX_WORD_DEPTH:
        raise OutOfRangeError(f"Word length must be in [1, {MAX_WORD_DEPTH}]", value=n)
    a = binary_expansion(2 * d, n + 1).prefix(n + 1)
    a_bar = tuple(1 - c for c in a)
    return _count_lex_words(a, a_bar, n)
