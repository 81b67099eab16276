"""
Continued fractions and rotational expansions of the circle rotation x -> x + alpha.

Two Markov compacta code the rotation by alpha = [0; a_1, a_2, ...]:

* model 1 (``model1_compactum``): digits x_n in {0..r_n - 1} with r_1 = a_1,
  r_n = a_n + 1, natural order, and psi(x) = alpha + sum x_n (-1)^(n+1) alpha_n;
* model 2 (``model2_compactum``): digits x_n in {0..a_n}, alternating order,
  and psi'(x) = sum x_n alpha_n,

where alpha_n = |q_n alpha - p_n|. Quadratic irrationals are handled exactly
in Q(sqrt d); other inputs fall back to mpmath at the configured precision.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

import mpmath
import numpy as np
import sympy
from scipy import stats

from .adic import AdicPath, Level, MarkovCompactum, check_path
from .config import DEFAULT_PRECISION, DEFAULT_SEARCH_BOUND
from .digits import DigitSeq, minimal_period
from .errors import (
    InadmissibleError,
    OutOfRangeError,
    PrecisionError,
    RationalInputError,
    UndecidableAtDepthError,
)
from .exactnum import Approx, FieldElement, quadratic, refine, to_mpf

logger = logging.getLogger(__name__)

Real = Union[int, Fraction, FieldElement, mpmath.mpf]

# Extra quotients used when a tail ratio is evaluated as a float
TAIL_LOOKAHEAD = 40
DEFAULT_HORIZON = 200


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * d with d squarefree; returns (s, d)."""
    d = math.prod(p for p, e in sympy.factorint(n).items() if e % 2)
    return math.isqrt(n // d), d


def _periodic_value(preperiod: Sequence[int], period: Sequence[int]) -> FieldElement:
    """The quadratic irrational [0; preperiod, period, period, ...]."""
    # y = [0; period repeated] solves k_{m-1} y^2 + (k_m - h_{m-1}) y - h_m = 0
    h, h_prev, k, k_prev = 0, 1, 1, 0
    for a in period:
        h, h_prev = a * h + h_prev, h
        k, k_prev = a * k + k_prev, k
    qa, qb, qc = k_prev, k - h_prev, -h
    s, d = _squarefree_split(qb * qb - 4 * qa * qc)
    if d == 1:
        raise RationalInputError(f"Period {tuple(period)} describes a rational number")
    y = FieldElement((Fraction(-qb, 2 * qa), Fraction(s, 2 * qa)), quadratic(d))
    h, h_prev, k, k_prev = 0, 1, 1, 0
    for a in preperiod:
        h, h_prev = a * h + h_prev, h
        k, k_prev = a * k + k_prev, k
    return (h + h_prev * y) / (k + k_prev * y)


@dataclass(frozen=True)
class ContinuedFraction:
    """The regular continued fraction alpha = [0; a_1, a_2, ...] of alpha in (0, 1).

    Quotients come from ``preperiod`` and ``period`` when the expansion is
    known to be eventually periodic; otherwise they are generated from
    ``alpha`` on demand, or limited to ``preperiod`` when ``alpha`` is None.
    Indices are 1-based: ``quotient(1)`` is a_1. Convergents follow
    p_0 = 1, q_0 = 0, p_1 = 0, q_1 = 1, p_{n+1} = a_n p_n + p_{n-1}.
    """

    alpha: Optional[Union[FieldElement, mpmath.mpf]]
    preperiod: tuple[int, ...] = ()
    period: Optional[tuple[int, ...]] = None
    dps: int = DEFAULT_PRECISION
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def from_quotients(
        cls,
        preperiod: Sequence[int],
        period: Sequence[int] | None = None,
        dps: int = DEFAULT_PRECISION,
    ) -> "ContinuedFraction":
        """
        Build from quotients; a period pins down the exact quadratic irrational.

        The period is reduced to its primitive root and the preperiod is
        absorbed into it where possible, so (2, 2) and 2, (2) both give (2).

        Raises:
            OutOfRangeError: If a quotient is not a positive integer.
        """
        pre = tuple(int(a) for a in preperiod)
        per = tuple(int(a) for a in period) if period else None
        if any(a < 1 for a in pre + (per or ())):
            raise OutOfRangeError("Partial quotients must be positive integers", value=pre + (per or ()))
        if per:
            per = minimal_period(per)
            while pre and pre[-1] == per[-1]:
                pre, per = pre[:-1], (per[-1],) + per[:-1]
        alpha = _periodic_value(pre, per) if per else None
        return cls(alpha, pre, per, dps)

    @property
    def exact(self) -> bool:
        return isinstance(self.alpha, FieldElement)

    @property
    def is_periodic(self) -> bool:
        return self.period is not None

    @property
    def known_depth(self) -> Optional[int]:
        """Number of available quotients, None when unbounded."""
        if self.period is not None or self.alpha is not None:
            return None
        return len(self.preperiod)

    def quotient(self, n: int) -> int:
        """
        a_n for n >= 1.

        Raises:
            UndecidableAtDepthError: If n lies beyond a finite quotient list.
        """
        if n < 1:
            raise IndexError("Quotients start at index 1")
        if n <= len(self.preperiod):
            return self.preperiod[n - 1]
        if self.period is not None:
            return self.period[(n - 1 - len(self.preperiod)) % len(self.period)]
        if self.alpha is None:
            raise UndecidableAtDepthError(
                f"Only {len(self.preperiod)} quotients are known", depth=len(self.preperiod)
            )
        return self._generated(n)

    def _generated(self, n: int) -> int:
        quotients = self._cache.setdefault("quotients", list(self.preperiod))
        state = self._cache.get("complete")
        if state is None:
            state = self.alpha
            for a in quotients:
                state = 1 / state - a
        with mpmath.workdps(self.dps):
            while len(quotients) < n:
                if state == 0:
                    raise RationalInputError("The continued fraction terminates")
                x = 1 / state
                a = x.floor() if isinstance(x, FieldElement) else int(mpmath.floor(x))
                quotients.append(a)
                state = x - a
        self._cache["complete"] = state
        return quotients[n - 1]

    def quotients(self, n: int) -> list[int]:
        return [self.quotient(k) for k in range(1, n + 1)]

    def _convergent_table(self, n: int) -> tuple[list[int], list[int]]:
        p = self._cache.setdefault("p", [1, 0])
        q = self._cache.setdefault("q", [0, 1])
        while len(p) <= n:
            a = self.quotient(len(p) - 1)
            p.append(a * p[-1] + p[-2])
            q.append(a * q[-1] + q[-2])
        return p, q

    def p(self, n: int) -> int:
        return self._convergent_table(n)[0][n]

    def q(self, n: int) -> int:
        return self._convergent_table(n)[1][n]

    def convergents(self, n: int) -> list[Fraction]:
        """p_k/q_k for k = 1..n."""
        return [Fraction(self.p(k), self.q(k)) for k in range(1, n + 1)]

    def residue(self, n: int):
        """
        alpha_n = |q_n alpha - p_n|, with alpha_0 = 1.

        Exact residues follow alpha_{n+1} = alpha_{n-1} - a_n alpha_n;
        numeric ones are evaluated directly with enough guard digits.
        """
        if self.alpha is None:
            raise UndecidableAtDepthError("Residues need the value of alpha", depth=n)
        if self.exact:
            table = self._cache.setdefault("residues", [self.alpha.field.one, self.alpha])
            while len(table) <= n:
                k = len(table) - 1
                table.append(table[k - 1] - self.quotient(k) * table[k])
            return table[n]
        q, p = self.q(n), self.p(n)
        with mpmath.workdps(self.dps + 2 * len(str(q)) + 10):
            return +abs(q * self.alpha - p)

    def residue_mpf(self, n: int) -> mpmath.mpf:
        return to_mpf(self.residue(n), self.dps)

    def tail_ratio(self, n: int) -> mpmath.mpf:
        """alpha_n / alpha_{n-1} = [0; a_n, a_{n+1}, ...], summed backwards."""
        stop = n + TAIL_LOOKAHEAD
        if self.known_depth is not None:
            stop = min(stop, self.known_depth)
        with mpmath.workdps(self.dps):
            t = mpmath.mpf(0)
            for k in range(stop, n - 1, -1):
                t = 1 / (self.quotient(k) + t)
            return t

    def complement(self) -> "ContinuedFraction":
        """
        The expansion of 1 - alpha: [0; 1, a_1 - 1, a_2, ...] when a_1 >= 2,
        [0; a_2 + 1, a_3, ...] when a_1 = 1.

        Raises:
            UndecidableAtDepthError: If fewer than two quotients are known.
        """
        if self.period is None and self.alpha is not None:
            return cf_expand(1 - self.alpha, dps=self.dps)
        head, period = list(self.preperiod), self.period
        while period is not None and len(head) < 2:
            head.append(period[0])
            period = period[1:] + period[:1]
        if len(head) < 2:
            raise UndecidableAtDepthError("The complement needs two known quotients", depth=len(head))
        if head[0] == 1:
            pre = [head[1] + 1] + head[2:]
        else:
            pre = [1, head[0] - 1] + head[1:]
        alpha = None if self.alpha is None else 1 - self.alpha
        return ContinuedFraction(alpha, tuple(pre), period, self.dps)

    def identity_check(self, n: int) -> bool:
        """q_k alpha_{k-1} + q_{k-1} alpha_k = 1 and the residue recurrence, for k <= n."""
        tol = mpmath.mpf(10) ** (-self.dps + 10)
        for k in range(1, n + 1):
            lhs = self.q(k) * self.residue(k - 1) + self.q(k - 1) * self.residue(k)
            rec = self.residue(k - 1) - self.quotient(k) * self.residue(k) - self.residue(k + 1)
            if self.exact:
                if lhs != 1 or rec != 0:
                    return False
            elif abs(lhs - 1) > tol or abs(rec) > tol:
                return False
        return True

    def render(self, n: int = 12) -> str:
        if self.period is not None:
            pre = ",".join(str(a) for a in self.preperiod)
            per = ",".join(str(a) for a in self.period)
            return f"[0; {pre + ',' if pre else ''}({per})]"
        depth = self.known_depth or n
        body = ",".join(str(a) for a in self.quotients(depth))
        return f"[0; {body}{'' if self.known_depth else ',...'}]"

    def to_json(self, n: int = 12) -> dict:
        return {
            "preperiod": list(self.preperiod),
            "period": list(self.period) if self.period else None,
            "quotients": self.quotients(n if self.known_depth is None else min(n, self.known_depth)),
        }


def cf_expand(
    alpha: Real,
    dps: int = DEFAULT_PRECISION,
    bound: int = DEFAULT_SEARCH_BOUND,
) -> ContinuedFraction:
    """
    Continued fraction of an irrational alpha in (0, 1).

    Quadratic irrationals are expanded exactly until a complete quotient
    repeats, which gives the period. Other exact values and mpmath reals give
    quotients on demand.

    Raises:
        RationalInputError: If alpha is rational.
        OutOfRangeError: If alpha is outside (0, 1).
    """
    if isinstance(alpha, (int, Fraction)) or (isinstance(alpha, FieldElement) and alpha.is_rational):
        raise RationalInputError(f"alpha = {alpha} is rational; its rotation is periodic")
    if not 0 < alpha < 1:
        raise OutOfRangeError(f"alpha must lie in (0, 1), got {alpha}", value=alpha, interval=(0, 1))
    if not isinstance(alpha, FieldElement):
        return ContinuedFraction(mpmath.mpf(alpha), (), None, dps)
    if alpha.field.degree != 2:
        return ContinuedFraction(alpha, (), None, dps)

    seen: dict[FieldElement, int] = {}
    quotients: list[int] = []
    x = 1 / alpha
    while x not in seen:
        if len(quotients) > bound:
            raise PrecisionError(f"No period found within {bound} quotients")
        seen[x] = len(quotients)
        a = x.floor()
        quotients.append(a)
        x = 1 / (x - a)
    start = seen[x]
    logger.debug("Quadratic continued fraction: preperiod %d, period %d", start, len(quotients) - start)
    return ContinuedFraction(alpha, tuple(quotients[:start]), tuple(quotients[start:]), dps)


def model1_compactum(cf: ContinuedFraction) -> MarkovCompactum:
    """
    X_alpha: r_1 = a_1, r_n = a_n + 1; x_{n+1} = a_{n+1} forces x_n = 0.

    Raises:
        OutOfRangeError: If a_1 = 1 (alpha > 1/2); use ``cf.complement()``.
    """
    if cf.quotient(1) < 2:
        raise OutOfRangeError("Model 1 needs alpha < 1/2 (a_1 >= 2); use the complement", value=cf.quotient(1))

    def size(k: int) -> int:
        return cf.quotient(1) if k == 1 else cf.quotient(k) + 1

    def incidence(k: int) -> np.ndarray:
        m = np.ones((size(k), size(k + 1)), dtype=np.int8)
        m[1:, -1] = 0
        return m

    return MarkovCompactum(lambda k: Level.natural(size(k)), incidence, False, "rotation-1")


def model2_compactum(cf: ContinuedFraction) -> MarkovCompactum:
    """X'_alpha: digits 0..a_n, x_n = a_n forces x_{n+1} = 0, order ascending at odd levels."""

    def level(k: int) -> Level:
        size = cf.quotient(k) + 1
        return Level.natural(size) if k % 2 else Level.descending(size)

    def incidence(k: int) -> np.ndarray:
        m = np.ones((cf.quotient(k) + 1, cf.quotient(k + 1) + 1), dtype=np.int8)
        m[-1, 1:] = 0
        return m

    return MarkovCompactum(level, incidence, False, "rotation-2")


def _digits_of(x, depth: int | None) -> tuple[tuple[int, ...], bool]:
    """Digit tuple and whether it is the whole (finitely supported) sequence."""
    if isinstance(x, AdicPath):
        return x.digits, False
    if isinstance(x, DigitSeq):
        if x.is_finite and not x.truncated:
            return x.preperiod, True
        return x.prefix(depth or 64), False
    return tuple(int(d) for d in x), False


def _check_digits(digits: tuple[int, ...], compactum: MarkovCompactum) -> None:
    if digits:
        check_path(AdicPath(digits), compactum)


def partial_sum(digits: Sequence[int], cf: ContinuedFraction, model: int = 2):
    """Exact (or mpf) value of the finite sum in psi (model 1) or psi' (model 2)."""
    if model == 1:
        total = cf.alpha
        for n, d in enumerate(digits, start=1):
            if d:
                total = total + (d if n % 2 else -d) * cf.residue(n)
        return total
    total = cf.residue(0) * 0
    for n, d in enumerate(digits, start=1):
        if d:
            total = total + d * cf.residue(n)
    return total


def _with_tail(value, cf: ContinuedFraction, n: int, finite: bool) -> Approx:
    with mpmath.workdps(cf.dps):
        approx = refine(value, mpmath.mpf(10) ** (-cf.dps + 5))
        if finite:
            return approx
        return Approx(approx.value, approx.error_bound + cf.residue_mpf(n) * (1 + mpmath.mpf(10) ** -10))


def psi1(x, cf: ContinuedFraction, depth: int | None = None) -> Approx:
    """
    alpha + sum x_n (-1)^(n+1) alpha_n for a point of X_alpha.

    A prefix of length n leaves a tail in [-alpha_{n+1}, alpha_n], which is
    added to the error bound.

    Raises:
        InadmissibleError: If the digits violate the incidence of X_alpha.
    """
    digits, finite = _digits_of(x, depth)
    _check_digits(digits, model1_compactum(cf))
    return _with_tail(partial_sum(digits, cf, 1), cf, len(digits), finite)


def psi2(x, cf: ContinuedFraction, depth: int | None = None) -> Approx:
    """
    sum x_n alpha_n for a point of X'_alpha; the tail after n digits is below alpha_n.

    Raises:
        InadmissibleError: If the digits violate the incidence of X'_alpha.
    """
    digits, finite = _digits_of(x, depth)
    _check_digits(digits, model2_compactum(cf))
    return _with_tail(partial_sum(digits, cf, 2), cf, len(digits), finite)


def _lift(cf: ContinuedFraction, x: Real):
    """x in the arithmetic of cf: exact in the field of alpha when possible."""
    if cf.exact and isinstance(x, (int, Fraction, FieldElement)):
        return cf.alpha.field.element(x)
    return to_mpf(x, cf.dps)


def _residue_in(cf: ContinuedFraction, n: int, exact: bool):
    return cf.residue(n) if exact else cf.residue_mpf(n)


def ostrowski_encode(x: Real, cf: ContinuedFraction, n: int) -> DigitSeq:
    """
    Greedy model-2 digits of x in [0, 1): x_k = min(floor(r_k / alpha_k), a_k).

    The remainder stays below alpha_k, and below alpha_{k+1} after a maximal
    digit, so the output is admissible. An exact zero remainder ends the
    sequence; otherwise it is truncated at n digits.

    Raises:
        OutOfRangeError: If x is outside [0, 1).
    """
    r = _lift(cf, x)
    if not 0 <= r < 1:
        raise OutOfRangeError(f"x must lie in [0, 1), got {x}", value=x, interval=(0, 1))
    exact = isinstance(r, FieldElement)
    digits: list[int] = []
    with mpmath.workdps(cf.dps):
        for k in range(1, n + 1):
            if exact and r.is_zero:
                return DigitSeq.finite(digits)
            a = cf.quotient(k)
            res = _residue_in(cf, k, exact)
            d = min((r / res).floor() if exact else int(mpmath.floor(r / res)), a)
            if digits and digits[-1] == cf.quotient(k - 1) and d != 0:
                raise InadmissibleError(f"Greedy digit after a maximal digit at level {k}", position=k - 1)
            digits.append(d)
            r = r - d * res
    if exact and r.is_zero:
        return DigitSeq.finite(digits)
    return DigitSeq.finite(digits, truncated=True)


def ostrowski_encode1(y: Real, cf: ContinuedFraction, n: int) -> DigitSeq:
    """
    Model-1 digits of y in [0, 1), so that psi1 of the output approximates y.

    Writing u_k for the signed remainder, admissible tails after a zero digit
    span [-alpha_k, alpha_{k-1}], and after a nonzero digit
    [-alpha_k, alpha_{k-1} - alpha_k]; the digit is the least b whose cell
    ((b-1) alpha_k + alpha_{k+1}, b alpha_k + alpha_{k+1}] holds u_k.

    Raises:
        OutOfRangeError: If y is outside [0, 1) or a_1 = 1.
    """
    compactum = model1_compactum(cf)
    y = _lift(cf, y)
    if not 0 <= y < 1:
        raise OutOfRangeError(f"y must lie in [0, 1), got {y}", value=y, interval=(0, 1))
    exact = isinstance(y, FieldElement)
    u = y - (cf.alpha if exact else to_mpf(cf.alpha, cf.dps))
    digits: list[int] = []
    restricted = True
    with mpmath.workdps(cf.dps):
        for k in range(1, n + 1):
            if exact and u.is_zero:
                break
            res = _residue_in(cf, k, exact)
            nxt = _residue_in(cf, k + 1, exact)
            cap = compactum.level(k).size - 1 - (1 if restricted and k > 1 else 0)
            if u <= nxt:
                b = 0
            else:
                ratio = (u - nxt) / res
                b = ratio.ceil() if exact else int(mpmath.ceil(ratio))
            if b > cap:
                logger.debug("Model-1 digit %d capped to %d at level %d", b, cap, k)
                b = cap
            digits.append(b)
            u = b * res - u
            restricted = b > 0
        else:
            if not (exact and u.is_zero):
                return DigitSeq.finite(digits, truncated=True)
    _check_digits(tuple(digits), compactum)
    return DigitSeq.finite(digits)


def integer_encode1(N: int, cf: ContinuedFraction) -> DigitSeq:
    """
    Finite X_alpha digits with N = 1 + sum x_k q_k (greedy on the q_k).

    Raises:
        OutOfRangeError: If N < 1 or a_1 = 1.
    """
    if N < 1:
        raise OutOfRangeError(f"Model 1 numbers positive integers, got {N}", value=N, interval=(1, None))
    compactum = model1_compactum(cf)
    m = N - 1
    top = 1
    while cf.q(top + 1) <= m:
        top += 1
    digits = [0] * top
    for k in range(top, 0, -1):
        digits[k - 1], m = divmod(m, cf.q(k))
    while digits and digits[-1] == 0:
        digits.pop()
    _check_digits(tuple(digits), compactum)
    if 1 + sum(d * cf.q(k) for k, d in enumerate(digits, start=1)) != N:
        raise InadmissibleError(f"Greedy digits do not represent {N}")
    return DigitSeq.finite(digits)


def integer_encode2(N: int, cf: ContinuedFraction, max_depth: int = DEFAULT_HORIZON) -> DigitSeq:
    """
    Finite X'_alpha digits with N = sum x_n (-1)^n q_n, for any integer N.

    The digits are the greedy psi' expansion of frac(-N alpha), which is
    finitely supported.

    Raises:
        UndecidableAtDepthError: If no finite expansion appears within
            ``max_depth`` digits.
        PrecisionError: If the numeric expansion fails the integer identity.
    """
    if cf.alpha is None:
        raise UndecidableAtDepthError("Integer numeration needs the value of alpha")
    with mpmath.workdps(cf.dps):
        point = -N * cf.alpha
        point = point - point.floor() if cf.exact else point - mpmath.floor(point)
        if cf.exact:
            seq = ostrowski_encode(point, cf, max_depth)
            if seq.truncated:
                raise UndecidableAtDepthError(f"No finite expansion of {N} within {max_depth} digits", depth=max_depth)
            digits = list(seq.preperiod)
        else:
            digits = _numeric_integer_digits(point, cf, max_depth)
    while digits and digits[-1] == 0:
        digits.pop()
    if sum(d * (-1) ** n * cf.q(n) for n, d in enumerate(digits, start=1)) != N:
        raise PrecisionError(f"Numeric expansion of {N} fails the integer identity; raise the precision")
    return DigitSeq.finite(digits)


def _numeric_integer_digits(point, cf: ContinuedFraction, max_depth: int) -> list[int]:
    tol = mpmath.mpf(10) ** (-cf.dps // 2)
    digits: list[int] = []
    r = point
    for k in range(1, max_depth + 1):
        if abs(r) < tol:
            return digits
        res = cf.residue_mpf(k)
        d = min(int(mpmath.floor((r + tol) / res)), cf.quotient(k))
        digits.append(d)
        r = r - d * res
    raise UndecidableAtDepthError(f"No finite expansion within {max_depth} digits", depth=max_depth)


class RotMeasure:
    """The Markov measure mu_alpha on X'_alpha.

    Initial law: alpha for x_1 < a_1, alpha_2 for x_1 = a_1. Transitions
    from a non-maximal digit: alpha_n / alpha_{n-1} to each x_n < a_n and
    alpha_{n+1} / alpha_{n-1} to a_n; a maximal digit is followed by 0.
    """

    model = 2

    def __init__(self, cf: ContinuedFraction):
        self.cf = cf

    def size(self, n: int) -> int:
        """Number of digits at level n."""
        return self.cf.quotient(n) + 1

    def initial(self, i: int):
        a1 = self.cf.quotient(1)
        if not 0 <= i <= a1:
            return 0
        return self.cf.residue(1) if i < a1 else self.cf.residue(2)

    def transition(self, n: int, prev: int, cur: int):
        """mu(x_n = cur | x_{n-1} = prev) for n >= 2."""
        cf = self.cf
        a_prev, a_cur = cf.quotient(n - 1), cf.quotient(n)
        if not (0 <= prev <= a_prev and 0 <= cur <= a_cur):
            return 0
        if prev == a_prev:
            return 1 if cur == 0 else 0
        num = cf.residue(n) if cur < a_cur else cf.residue(n + 1)
        return num / cf.residue(n - 1)

    def kernel(self, n: int) -> np.ndarray:
        """Transition matrix into level n as an object array of exact values."""
        rows, cols = self.size(n - 1), self.size(n)
        m = np.empty((rows, cols), dtype=object)
        for i in range(rows):
            for j in range(cols):
                m[i, j] = self.transition(n, i, j)
        return m

    def marginal(self, n: int, i: int):
        """One-dimensional law of x_n from the closed form."""
        cf = self.cf
        a = cf.quotient(n)
        if i == 0:
            return (cf.q(n - 1) + cf.q(n)) * cf.residue(n)
        if 0 < i < a:
            return cf.q(n) * cf.residue(n)
        if i == a:
            return cf.q(n) * cf.residue(n + 1)
        return 0

    def marginal_vector(self, n: int) -> np.ndarray:
        return np.array([self.marginal(n, i) for i in range(self.size(n))], dtype=object)

    def propagated_marginal(self, n: int) -> np.ndarray:
        """The law of x_n obtained by pushing the initial law through the kernels."""
        vec = np.array([self.initial(i) for i in range(self.size(1))], dtype=object)
        for k in range(2, n + 1):
            vec = vec.dot(self.kernel(k))
        return vec

    def draw(self, k: int, u: np.ndarray, prev: np.ndarray) -> np.ndarray:
        """
        Digits at level k from uniforms u, given the digits at level k - 1.

        A non-maximal x_{k-1} gives x_k = floor(u / t_k) capped at a_k, where
        t_k = alpha_k / alpha_{k-1}.
        """
        a = self.cf.quotient(k)
        t = float(self.cf.tail_ratio(k))
        digits = np.minimum(np.floor(u / t), a).astype(np.int64)
        if k > 1:
            digits[prev == self.cf.quotient(k - 1)] = 0
        return digits


class Model1Measure(RotMeasure):
    """The Markov measure nu_alpha on X_alpha, the pull-back of Lebesgue measure by psi.

    A cylinder [x_1..x_n] has measure alpha_n + alpha_{n+1} when x_n = 0 and
    alpha_n otherwise; transitions are ratios of these weights. The law of
    x_n is q_n (alpha_n + alpha_{n+1}) at 0, q_n alpha_n for 0 < i < a_n and
    q_{n-1} alpha_n at i = a_n, which only occurs from level 2 on.
    """

    model = 1

    def size(self, n: int) -> int:
        return self.cf.quotient(1) if n == 1 else self.cf.quotient(n) + 1

    def _weight(self, n: int, i: int):
        cf = self.cf
        return cf.residue(n) + cf.residue(n + 1) if i == 0 else cf.residue(n)

    def initial(self, i: int):
        return self._weight(1, i) if 0 <= i < self.size(1) else 0

    def transition(self, n: int, prev: int, cur: int):
        """nu(x_n = cur | x_{n-1} = prev) for n >= 2."""
        if not (0 <= prev < self.size(n - 1) and 0 <= cur < self.size(n)):
            return 0
        if prev > 0 and cur == self.cf.quotient(n):
            return 0
        return self._weight(n, cur) / self._weight(n - 1, prev)

    def marginal(self, n: int, i: int):
        cf = self.cf
        if not 0 <= i < self.size(n):
            return 0
        if i == cf.quotient(n):
            return cf.q(n - 1) * cf.residue(n)
        return cf.q(n) * self._weight(n, i)

    def draw(self, k: int, u: np.ndarray, prev: np.ndarray) -> np.ndarray:
        """
        Digits at level k: 0 takes the first t_k (1 + t_{k+1}) of the unit
        interval, each later digit a further t_k. After x_{k-1} = 0 the
        interval is stretched by 1 + t_k and the top digit a_k is allowed.
        """
        cf = self.cf
        t = float(cf.tail_ratio(k))
        zero = t * (1 + float(cf.tail_ratio(k + 1)))
        free = prev == 0 if k > 1 else np.zeros(len(u), dtype=bool)
        v = np.where(free, u * (1 + t), u)
        digits = np.where(v < zero, 0, 1 + np.floor((v - zero) / t)).astype(np.int64)
        cap = np.where(free, cf.quotient(k), cf.quotient(k) - 1)
        return np.minimum(digits, cap)


def markov_measure(cf: ContinuedFraction, model: int = 2) -> RotMeasure:
    """
    mu_alpha on X'_alpha (model 2) or nu_alpha on X_alpha (model 1).

    Raises:
        UndecidableAtDepthError: If the value of alpha is unknown.
        OutOfRangeError: If model 1 is asked for with a_1 = 1, or the model
            is neither 1 nor 2.
    """
    if cf.alpha is None:
        raise UndecidableAtDepthError("The measure needs the value of alpha")
    if model == 1:
        model1_compactum(cf)
        return Model1Measure(cf)
    if model != 2:
        raise OutOfRangeError(f"Unknown rotational model {model}", value=model, interval=(1, 2))
    return RotMeasure(cf)


def sample_digits(measure: RotMeasure, n: int, count: int, seed: int = 0) -> np.ndarray:
    """Ancestral sampling of ``count`` paths of length n; returns a count x n int array."""
    rng = np.random.default_rng(seed)
    out = np.zeros((count, n), dtype=np.int64)
    prev = np.zeros(count, dtype=np.int64)
    for k in range(1, n + 1):
        prev = measure.draw(k, rng.random(count), prev)
        out[:, k - 1] = prev
        if k % 1000 == 0:
            logger.debug("Sampled %d of %d levels", k, n)
    return out


class DigitStatistics(NamedTuple):
    count: int
    length: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    jarque_bera: float
    normality_score: float


def digit_statistics(samples: np.ndarray) -> DigitStatistics:
    """
    Moments of the digit sums S_n over samples.

    ``normality_score`` is the Jarque-Bera p-value of the sums; it is a
    descriptive score, not a test verdict.
    """
    sums = samples.sum(axis=1).astype(float)
    jb = stats.jarque_bera(sums)
    return DigitStatistics(
        count=int(samples.shape[0]),
        length=int(samples.shape[1]),
        mean=float(sums.mean()),
        variance=float(sums.var(ddof=1)) if len(sums) > 1 else 0.0,
        skewness=float(stats.skew(sums)),
        excess_kurtosis=float(stats.kurtosis(sums)),
        jarque_bera=float(jb.statistic),
        normality_score=float(jb.pvalue),
    )


class LimitConditions(NamedTuple):
    """Verdicts (None when a finite prefix cannot decide) plus the prefix diagnostics."""

    lln: Optional[bool]
    slln: Optional[bool]
    clt: Optional[bool]
    square_mean_ratio: float
    slln_partial_sum: float
    max_quotient: int


def limit_theorem_conditions(cf: ContinuedFraction, n: int = 1000) -> LimitConditions:
    """
    The arithmetic conditions for the laws of large numbers and the CLT.

    Eventually periodic quotients are bounded, so all three hold; for other
    streams only the prefix diagnostics sum a_k^2 / n^2 and
    sum a_k^2 ln^2 k / k^2 are reported.
    """
    if cf.known_depth is not None:
        n = min(n, cf.known_depth)
    quotients = np.array(cf.quotients(n), dtype=float)
    k = np.arange(1, n + 1, dtype=float)
    ratio = float((quotients**2).sum() / n**2)
    slln = float((quotients**2 * np.log(k) ** 2 / k**2).sum())
    verdict = True if cf.is_periodic else None
    return LimitConditions(verdict, verdict, verdict, ratio, slln, int(quotients.max()))


def replaceable_positions(digits: Sequence[int], cf: ContinuedFraction) -> list[int]:
    """
    Levels n (1-based) with x_{n-1} > 0, x_n = 0 and x_{n+1} < a_{n+1}.

    Each one lets the triple be rewritten, so x has another representation.
    """
    x = list(digits)
    return [
        n
        for n in range(2, len(x))
        if x[n - 2] > 0 and x[n - 1] == 0 and x[n] < cf.quotient(n + 1)
    ]


def _last_one(cf: ContinuedFraction) -> Optional[int]:
    """sup{n : a_n = 1} for periodic quotients; None when it is infinite."""
    if cf.period is not None and 1 in cf.period:
        return None
    ones = [i + 1 for i, a in enumerate(cf.preperiod) if a == 1]
    return ones[-1] if ones else 0


def unique_rotational_witness(cf: ContinuedFraction) -> Optional[DigitSeq]:
    """
    The unique representation 0^{n_0} 1^infinity, or None when no unique
    representation exists (infinitely many a_n = 1).

    Raises:
        UndecidableAtDepthError: If the quotients are not eventually periodic.
    """
    if not cf.is_periodic:
        raise UndecidableAtDepthError("A witness needs eventually periodic quotients")
    n0 = _last_one(cf)
    if n0 is None:
        return None
    return DigitSeq.periodic((0,) * n0, (1,))


class Cardinality(str, Enum):
    FINITE = "Finite"
    CONTINUUM = "Continuum"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class UniqueRotationalReport:
    empty: Optional[bool]
    measure_zero: Optional[bool]
    cardinality: Cardinality
    dim_positive: Optional[bool]
    mu_K_alpha: Optional[Approx]
    n0: Optional[int]
    dimension_ratio: Optional[float]
    companion_ratio: Optional[float]
    density_of_twos: Optional[float]

    def to_json(self, digits: int = 12) -> dict:
        return {
            "empty": self.empty,
            "measure_zero": self.measure_zero,
            "cardinality": self.cardinality.value,
            "dim_positive": self.dim_positive,
            "mu_K_alpha": self.mu_K_alpha.to_json(digits) if self.mu_K_alpha else None,
            "n0": self.n0,
            "dimension_ratio": self.dimension_ratio,
            "companion_ratio": self.companion_ratio,
            "density_of_twos": self.density_of_twos,
        }


def _mu_k_alpha(cf: ContinuedFraction, n0: int, horizon: int) -> Approx:
    """alpha_{n0} * prod_{n > n0} (a_n - 1) alpha_n / alpha_{n-1}; factors lie in [0, 1)."""
    with mpmath.workdps(cf.dps):
        product = cf.residue_mpf(n0)
        for n in range(n0 + 1, n0 + horizon + 1):
            product *= (cf.quotient(n) - 1) * cf.tail_ratio(n)
            if product == 0:
                return Approx(mpmath.mpf(0), mpmath.mpf(0))
        return Approx(product / 2, product / 2 + mpmath.mpf(10) ** (-cf.dps + 10))


def unique_rotational_analysis(cf: ContinuedFraction, horizon: int = DEFAULT_HORIZON) -> UniqueRotationalReport:
    """
    Properties of the set of points with a unique rotational representation.

    Verdicts depend on the whole quotient tail, so they are exact for
    eventually periodic quotients and None (``Unknown``) otherwise.
    """
    if not cf.is_periodic:
        return UniqueRotationalReport(None, None, Cardinality.UNKNOWN, None, None, None, None, None, None)
    n0 = _last_one(cf)
    if n0 is None:
        return UniqueRotationalReport(
            True, True, Cardinality.FINITE, False, Approx(mpmath.mpf(0)), None, None, None, None
        )
    period = cf.period
    continuum = set(period) != {2}
    span = range(n0 + 1, n0 + horizon + 1)
    num = sum(math.log(cf.quotient(k) - 1) for k in span)
    companion = num / sum(math.log(cf.quotient(k) + 1) for k in span)
    ratio = num / math.log(cf.q(n0 + horizon + 1))
    twos = sum(1 for a in period if a == 2) / len(period)
    return UniqueRotationalReport(
        empty=False,
        measure_zero=True,
        cardinality=Cardinality.CONTINUUM if continuum else Cardinality.FINITE,
        dim_positive=any(a >= 3 for a in period),
        mu_K_alpha=_mu_k_alpha(cf, n0, horizon),
        n0=n0,
        dimension_ratio=ratio,
        companion_ratio=companion,
        density_of_twos=twos,
    )
