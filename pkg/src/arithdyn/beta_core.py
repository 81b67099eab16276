"""
Expansions of reals in a non-integer base beta.

A ``Beta`` is either algebraic (an exact generator of Q(beta), so orbits are
computed without rounding and eventual periodicity is detected exactly) or
numeric (an mpmath real; detected periods are flagged as unverified).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Union

import mpmath

from .config import DEFAULT_PRECISION, DEFAULT_SEARCH_BOUND
from .digits import DigitSeq, lex_compare
from .errors import NotAlgebraicError, OutOfRangeError, UndecidableAtDepthError
from .exactnum import Approx, FieldElement, MinimalPolynomial, is_exact, rational_field

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, FieldElement, mpmath.mpf]

# Orbit points closer than this are treated as equal in numeric mode
NUMERIC_CYCLE_TOLERANCE = mpmath.mpf("1e-30")
DEFAULT_PARRY_DEPTH = 200


@dataclass(frozen=True)
class Beta:
    """A base beta > 1.

    ``value`` is a ``FieldElement`` in algebraic mode and an ``mpf`` in
    numeric mode. ``floor`` is the integer part of beta.
    """

    value: Union[FieldElement, mpmath.mpf]
    floor: int
    dps: int = DEFAULT_PRECISION

    @classmethod
    def algebraic(cls, minpoly: MinimalPolynomial, dps: int = DEFAULT_PRECISION) -> "Beta":
        value = minpoly.generator
        return cls(value, value.floor(), dps)

    @classmethod
    def rational(cls, r, dps: int = DEFAULT_PRECISION) -> "Beta":
        return cls.algebraic(rational_field(Fraction(r)), dps)

    @classmethod
    def numeric(cls, value, dps: int = DEFAULT_PRECISION) -> "Beta":
        with mpmath.workdps(dps):
            v = mpmath.mpf(value)
            if v <= 1:
                raise OutOfRangeError(f"Base must exceed 1, got {v}", value=v, interval=(1, None))
            return cls(v, int(mpmath.floor(v)), dps)

    @property
    def is_algebraic(self) -> bool:
        return isinstance(self.value, FieldElement)

    @property
    def field(self) -> Optional[MinimalPolynomial]:
        return self.value.field if self.is_algebraic else None

    @property
    def is_integer(self) -> bool:
        if self.is_algebraic:
            return self.value.is_integer
        return self.value == self.floor

    @property
    def digit_max(self) -> int:
        """Largest digit of the standard alphabet, ceil(beta) - 1."""
        return self.floor - 1 if self.is_integer else self.floor

    def approx(self) -> mpmath.mpf:
        if self.is_algebraic:
            return self.value.to_mpf(self.dps)
        return self.value

    def as_numeric(self) -> "Beta":
        """The same base in numeric mode."""
        if not self.is_algebraic:
            return self
        return Beta(self.approx(), self.floor, self.dps)

    def lift(self, x):
        """Bring ``x`` into the arithmetic of this base."""
        if self.is_algebraic:
            if isinstance(x, FieldElement):
                return self.field.element(x)
            if isinstance(x, (int, Fraction)):
                return self.field.element(x)
            raise NotAlgebraicError(f"{x!r} is not exact; use a numeric base")
        if isinstance(x, FieldElement):
            return x.to_mpf(self.dps)
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        if isinstance(x, Approx):
            return x.value
        return mpmath.mpf(x)

    def prepare(self, *values) -> tuple["Beta", list]:
        """Pick exact mode when the base and every value allow it."""
        base = self
        if self.is_algebraic and not all(is_exact(v) for v in values):
            base = self.as_numeric()
        return base, [base.lift(v) for v in values]

    def __str__(self) -> str:
        if self.is_algebraic:
            f = self.field
            if f.degree == 1:
                return str(-f.coefficients[0])
            return f"root of {f.poly.as_expr()} ~ {mpmath.nstr(self.approx(), 12)}"
        return mpmath.nstr(self.value, 12)


def _floor(y) -> int:
    if isinstance(y, FieldElement):
        return y.floor()
    if isinstance(y, (int, Fraction)):
        return int(y // 1)
    return int(mpmath.floor(y))


def _ceil(y) -> int:
    return -_floor(-y)


def _orbit_digits(
    x,
    beta: Beta,
    n: int,
    step: Callable,
    alphabet_max: int,
) -> DigitSeq:
    """Run ``step`` from ``x`` for up to ``n`` digits, detecting a cycle."""
    digits: list[int] = []
    with mpmath.workdps(beta.dps):
        if beta.is_algebraic:
            seen = {x: 0}
            for i in range(n):
                d, x = step(x)
                digits.append(d)
                j = seen.get(x)
                if j is not None:
                    return DigitSeq.periodic(digits[:j], digits[j:], alphabet_max)
                seen[x] = i + 1
            return DigitSeq.finite(digits, alphabet_max, truncated=True)

        orbit = [x]
        for i in range(n):
            d, x = step(x)
            digits.append(d)
            for j, y in enumerate(orbit):
                if abs(x - y) < NUMERIC_CYCLE_TOLERANCE:
                    return DigitSeq.periodic(digits[:j], digits[j:], alphabet_max, verified=False)
            orbit.append(x)
    return DigitSeq.finite(digits, alphabet_max, truncated=True)


def greedy_expand(x: Number, beta: Beta, n: int) -> DigitSeq:
    """
    Greedy digits of x in [0, 1): eps_k = floor(beta * tau^(k-1) x).

    In algebraic mode with exact x a cycle of the orbit found within ``n``
    steps is returned as preperiod plus period; otherwise the first ``n``
    digits are returned with ``truncated`` set.

    Raises:
        OutOfRangeError: If x lies outside [0, 1).
    """
    if n < 1:
        raise OutOfRangeError("Digit count must be positive", value=n)
    beta, (x,) = beta.prepare(x)
    if x < 0 or x >= 1:
        raise OutOfRangeError(f"Greedy expansion needs 0 <= x < 1, got {x}", value=x, interval=(0, 1))
    b = beta.value

    def step(y):
        z = b * y
        d = _floor(z)
        return d, z - d

    return _orbit_digits(x, beta, n, step, beta.digit_max)


def lazy_bound(beta: Beta):
    """Right end of the lazy domain, digit_max / (beta - 1)."""
    return beta.digit_max / (beta.value - 1)


def lazy_expand(x: Number, beta: Beta, n: int) -> DigitSeq:
    """
    Lazy digits of x: the smallest digit leaving a representable remainder.

    The domain is the closed interval [0, digit_max / (beta - 1)]; its right
    end has the constant expansion digit_max, digit_max, ...

    Raises:
        OutOfRangeError: If x lies outside the lazy domain.
    """
    if n < 1:
        raise OutOfRangeError("Digit count must be positive", value=n)
    beta, (x,) = beta.prepare(x)
    top = lazy_bound(beta)
    if x < 0 or x > top:
        raise OutOfRangeError(
            f"Lazy expansion needs 0 <= x <= {beta.digit_max}/(beta - 1), got {x}",
            value=x,
        )
    b = beta.value

    def step(y):
        z = b * y
        d = max(0, _ceil(z - top))
        return d, z - d

    return _orbit_digits(x, beta, n, step, beta.digit_max)


def intermediate_expand(x: Number, beta: Beta, alpha: Number, n: int) -> DigitSeq:
    """
    Digits of the intermediate map T(x) = beta*x - d on [alpha, 1 + alpha].

    The digit is 1 when x >= (1 + alpha) / beta, else 0.

    Raises:
        OutOfRangeError: If beta is not in (1, 2), alpha is outside
            [0, (2 - beta)/(beta - 1)], or x outside [alpha, 1 + alpha].
    """
    if n < 1:
        raise OutOfRangeError("Digit count must be positive", value=n)
    beta, (x, alpha) = beta.prepare(x, alpha)
    b = beta.value
    if b >= 2:
        raise OutOfRangeError("Intermediate expansions need 1 < beta < 2", value=b, interval=(1, 2))
    if alpha < 0 or alpha > (2 - b) / (b - 1):
        raise OutOfRangeError("alpha must lie in [0, (2 - beta)/(beta - 1)]", value=alpha)
    if x < alpha or x > 1 + alpha:
        raise OutOfRangeError("x must lie in [alpha, 1 + alpha]", value=x)
    cut = (1 + alpha) / b

    def step(y):
        d = 1 if y >= cut else 0
        return d, b * y - d

    return _orbit_digits(x, beta, n, step, 1)


def shifted_beta_orbit(y: Number, beta: Beta, gamma: Number, n: int) -> list:
    """The first ``n`` iterates of S(y) = beta*y + gamma mod 1, starting at y."""
    beta, (y, gamma) = beta.prepare(y, gamma)
    b = beta.value
    orbit = [y]
    with mpmath.workdps(beta.dps):
        for _ in range(n):
            z = b * y + gamma
            y = z - _floor(z)
            orbit.append(y)
    return orbit


def conjugacy_check(y: Number, beta: Beta, alpha: Number, n: int) -> bool:
    """
    Check S(y) = T(y + alpha) - alpha along an orbit, with gamma = (beta - 1) alpha.

    Exact in algebraic mode; numeric orbits are compared at 1e-20.
    """
    beta, (y, alpha) = beta.prepare(y, alpha)
    b = beta.value
    gamma = (b - 1) * alpha
    s_orbit = shifted_beta_orbit(y, beta, gamma, n)
    cut = (1 + alpha) / b
    x = y + alpha
    with mpmath.workdps(beta.dps):
        for k in range(n + 1):
            diff = (x - alpha) - s_orbit[k]
            if beta.is_algebraic:
                if diff != 0:
                    return False
            elif abs(diff) > mpmath.mpf("1e-20"):
                logger.debug("Conjugacy broke at step %d (difference %s)", k, diff)
                return False
            d = 1 if x >= cut else 0
            x = b * x - d
    return True


class TwoSidedExpansion(NamedTuple):
    digits: DigitSeq
    start_index: int


def greedy_two_sided(x: Number, beta: Beta, n: int = 64) -> TwoSidedExpansion:
    """
    Greedy expansion of any x >= 0, finite to the left.

    x = sum eps_k beta^-(start_index + k), with start_index <= 1 chosen as
    large as possible.
    """
    beta, (x,) = beta.prepare(x)
    if x < 0:
        raise OutOfRangeError("Two-sided expansion needs x >= 0", value=x)
    b = beta.value
    k = 0
    scaled = x
    while scaled >= 1:
        scaled = scaled / b
        k += 1
    return TwoSidedExpansion(greedy_expand(scaled, beta, n + k), 1 - k)


@dataclass(frozen=True)
class ParryData:
    """The greedy expansion of 1 and the quasi-greedy Parry sequence.

    ``exhausted`` is set when the orbit of 1 was still running at the search
    bound, so neither sequence is known to be finite or periodic.
    """

    a_prime: DigitSeq
    a: DigitSeq
    exhausted: bool = False

    @property
    def exact(self) -> bool:
        return not self.exhausted and self.a.verified and not self.a.truncated


def quasi_greedy(a_prime: DigitSeq) -> DigitSeq:
    """(a'_1, ..., a'_k - 1) repeated when a' is finite, else a' itself."""
    if not a_prime.is_finite or a_prime.truncated:
        return a_prime
    body = list(a_prime.preperiod)
    while body and body[-1] == 0:
        body.pop()
    body[-1] -= 1
    return DigitSeq.periodic((), body, a_prime.alphabet_max, a_prime.verified)


def expansion_of_one(
    beta: Beta,
    bound: int = DEFAULT_SEARCH_BOUND,
    depth: int = DEFAULT_PARRY_DEPTH,
) -> ParryData:
    """
    Greedy expansion a' of 1 and the Parry sequence a.

    Algebraic mode follows the exact orbit of 1 for up to ``bound`` steps;
    numeric mode stops after ``depth`` digits.
    """
    b = beta.value
    amax = beta.floor
    digits: list[int] = []
    limit = bound if beta.is_algebraic else depth

    with mpmath.workdps(beta.dps):
        t = beta.lift(1)
        seen: dict = {}
        orbit: list = []
        for i in range(limit):
            z = b * t
            d = _floor(z)
            t = z - d
            digits.append(d)
            if _vanishes(t, beta):
                a_prime = DigitSeq.finite(digits, amax)
                if not beta.is_algebraic:
                    a_prime = DigitSeq(a_prime.preperiod, None, amax, False, False)
                return ParryData(a_prime, quasi_greedy(a_prime))
            if beta.is_algebraic:
                j = seen.get(t)
                if j is not None:
                    a_prime = DigitSeq.periodic(digits[: j + 1], digits[j + 1 :], amax)
                    return ParryData(a_prime, a_prime)
                seen[t] = i
            else:
                for j, y in enumerate(orbit):
                    if abs(t - y) < NUMERIC_CYCLE_TOLERANCE:
                        a_prime = DigitSeq.periodic(
                            digits[: j + 1], digits[j + 1 :], amax, verified=False
                        )
                        return ParryData(a_prime, a_prime)
                orbit.append(t)
            if beta.is_algebraic and i and i % 1000 == 0:
                logger.debug("Orbit of 1 still open after %d steps", i)

    if beta.is_algebraic:
        logger.warning("Orbit of 1 did not close within %d steps", bound)
    truncated = DigitSeq.finite(digits, amax, truncated=True)
    return ParryData(truncated, truncated, exhausted=beta.is_algebraic)


def _vanishes(t, beta: Beta) -> bool:
    if beta.is_algebraic:
        return t == 0
    return abs(t) < NUMERIC_CYCLE_TOLERANCE


def _strictly_below(u: DigitSeq, v: DigitSeq, strict: bool = True) -> bool:
    cmp = lex_compare(u, v)
    if cmp < 0:
        return True
    if cmp > 0:
        return False
    if u.truncated or v.truncated:
        # tie inside the known prefix
        return True
    return not strict


def is_parry_admissible(eps: DigitSeq, parry: ParryData) -> bool:
    """
    True iff every shift of ``eps`` is lexicographically below ``parry.a``.

    Generated sequences are checked on a prefix of the Parry sequence's
    comparison length and may raise ``UndecidableAtDepthError``.
    """
    if eps.is_lazy:
        raise UndecidableAtDepthError("Admissibility of a generated sequence needs a finite prefix")
    if any(d < 0 for d in eps.preperiod + (eps.period or ())):
        return False
    return all(_strictly_below(tail, parry.a) for tail in eps.tails())


def is_parry_sequence(a: DigitSeq) -> bool:
    """
    True iff ``a`` can be the quasi-greedy expansion of 1 for some base.

    Every proper shift must be <= a; a finite sequence never qualifies.
    """
    if a.is_lazy or a.is_finite or a.digit(0) < 1:
        return False
    return all(_strictly_below(tail, a, strict=False) for tail in a.tails()[1:])


class CompactumKind(str, Enum):
    """Type of the beta-compactum."""

    SFT = "SFT"
    SOFIC = "Sofic"
    NOT_SOFIC = "NotSofic"
    UNKNOWN = "Unknown"


def classify_compactum(beta: Beta, bound: int = DEFAULT_SEARCH_BOUND) -> CompactumKind:
    """
    Decide whether the beta-compactum is of finite type, sofic or neither.

    SFT iff the greedy expansion of 1 is finite, sofic iff the Parry sequence
    is eventually periodic. A compactum is never sofic when beta is an
    algebraic integer that is not a Perron number; any other base whose orbit
    of 1 stays open at the bound is Unknown.

    Raises:
        NotAlgebraicError: If beta is numeric.
    """
    if not beta.is_algebraic:
        raise NotAlgebraicError("Classification needs an exact algebraic base")
    field = beta.field
    if field.is_integral and field.degree > 1 and not field.is_perron():
        return CompactumKind.NOT_SOFIC
    parry = expansion_of_one(beta, bound=bound)
    if parry.exhausted:
        if field.is_integral and field.is_pisot():
            logger.warning("Pisot base %s exhausted the orbit bound %d", beta, bound)
        return CompactumKind.UNKNOWN
    if parry.a_prime.is_finite:
        return CompactumKind.SFT
    return CompactumKind.SOFIC


def parry_entropy(beta: Beta) -> mpmath.mpf:
    """Topological entropy of the beta-shift, log(beta)."""
    with mpmath.workdps(beta.dps):
        return mpmath.log(beta.approx())


def evaluate(
    eps: DigitSeq,
    beta: Beta,
    start_index: int = 1,
    depth: int | None = None,
):
    """
    Sum eps_k beta^-(start_index + k) over the sequence.

    The period is summed as a geometric series, so an algebraic base gives an
    exact ``FieldElement``. Numeric bases give an ``Approx``; truncated
    sequences carry the bound on the missing tail.

    Raises:
        UndecidableAtDepthError: If a generated sequence is given without
            ``depth``.
    """
    if eps.is_lazy:
        if depth is None:
            raise UndecidableAtDepthError("A generated sequence needs a summation depth")
        eps = DigitSeq.finite(eps.prefix(depth), eps.alphabet_max, truncated=True)

    with mpmath.workdps(beta.dps + 10):
        b = beta.value
        inv = 1 / b
        total = beta.lift(0)
        weight = inv**start_index
        for d in eps.preperiod:
            if d:
                total = total + d * weight
            weight = weight * inv
        if eps.period:
            block = beta.lift(0)
            w = beta.lift(1)
            for d in eps.period:
                if d:
                    block = block + d * w
                w = w * inv
            total = total + weight * block / (1 - inv ** len(eps.period))

        if beta.is_algebraic and not eps.truncated:
            return total
        value = total.to_mpf(beta.dps) if beta.is_algebraic else total
        error = mpmath.mpf(10) ** (-beta.dps + 5) * (1 + abs(value))
        if eps.truncated:
            bmp = beta.approx()
            top = eps.alphabet_max if isinstance(eps.alphabet_max, int) else beta.floor
            n = start_index + len(eps.preperiod)
            error += top * bmp ** (1 - n) / (bmp - 1)
    return Approx(+value, error)
