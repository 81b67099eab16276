"""
Exact arithmetic in real algebraic number fields.

A field Q(beta) is described by the monic minimal polynomial of beta and a
rational interval isolating the real root that beta denotes. Elements are
rational coordinate vectors in the power basis 1, beta, ..., beta^(m-1).
Sign and floor queries evaluate the element on a refined root interval with
doubling precision, so every comparison is exact.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache, cached_property, total_ordering
from typing import NamedTuple, Union

import mpmath
import sympy

from .config import DEFAULT_PRECISION
from .errors import (
    FieldMismatchError,
    IrreduciblePolynomialError,
    OutOfRangeError,
    PrecisionError,
    ZeroDivisionInFieldError,
)

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")

# Factorization over Q is attempted up to this degree
MAX_IRREDUCIBILITY_DEGREE = 6
START_BITS = 64
MAX_BITS = 1 << 16

Rational = Union[int, Fraction]


def _to_fraction(value) -> Fraction:
    """Convert ints, Fractions, sympy rationals and strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"Cannot read {value!r} as an exact rational")


def _to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _sympy_poly(coefficients: tuple[Fraction, ...]) -> sympy.Poly:
    """Poly from low-to-high coefficients."""
    return sympy.Poly([_to_sympy(c) for c in reversed(coefficients)], X, domain="QQ")


@dataclass(frozen=True)
class Approx:
    """A real number known to lie within ``value ± error_bound``."""

    value: mpmath.mpf
    error_bound: mpmath.mpf = mpmath.mpf(0)

    @classmethod
    def exact(cls, value) -> "Approx":
        return cls(mpmath.mpf(value), mpmath.mpf(0))

    @property
    def lower(self) -> mpmath.mpf:
        return self.value - self.error_bound

    @property
    def upper(self) -> mpmath.mpf:
        return self.value + self.error_bound

    def contains(self, other) -> bool:
        """True if ``other`` (a real or an Approx) is compatible with this value."""
        if isinstance(other, Approx):
            return abs(self.value - other.value) <= self.error_bound + other.error_bound
        return abs(self.value - to_mpf(other)) <= self.error_bound

    def render(self, digits: int) -> str:
        return mpmath.nstr(self.value, digits)

    def to_json(self, digits: int = 30) -> dict:
        return {
            "value": mpmath.nstr(self.value, digits),
            "error_bound": mpmath.nstr(self.error_bound, 5),
        }

    def __str__(self) -> str:
        return f"{mpmath.nstr(self.value, 15)} ± {mpmath.nstr(self.error_bound, 3)}"


@dataclass(frozen=True)
class MinimalPolynomial:
    """Monic minimal polynomial of beta plus an isolating interval for beta.

    ``coefficients`` run from the constant term up to the leading 1.
    ``irreducible_trusted`` records that irreducibility was asserted by the
    caller rather than checked.
    """

    coefficients: tuple[Fraction, ...]
    root_interval: tuple[Fraction, Fraction]
    irreducible_trusted: bool = False
    _refined: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def from_coefficients(
        cls,
        coefficients,
        root_interval: tuple | None = None,
        trust_irreducible: bool = False,
    ) -> "MinimalPolynomial":
        """
        Validate and normalize a minimal polynomial.

        Args:
            coefficients: c0, ..., cm (ints, Fractions or rational strings).
                The polynomial is made monic.
            root_interval: Rational (lo, hi) isolating the designated root.
                Defaults to the largest real root.
            trust_irreducible: Accept polynomials above degree 6 without
                factoring them.

        Raises:
            IrreduciblePolynomialError: If the polynomial factors, has no real
                root above 1, or the interval does not isolate such a root.
        """
        coeffs = [_to_fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise IrreduciblePolynomialError("Minimal polynomial must have degree >= 1")
        lead = coeffs[-1]
        coeffs = tuple(c / lead for c in coeffs)
        poly = _sympy_poly(coeffs)
        degree = len(coeffs) - 1

        trusted = False
        if degree <= MAX_IRREDUCIBILITY_DEGREE:
            _, factors = poly.factor_list()
            if len(factors) != 1 or factors[0][1] != 1:
                raise IrreduciblePolynomialError(
                    f"Polynomial {poly.as_expr()} is reducible over Q",
                    factors=[str(f.as_expr()) for f, _ in factors],
                )
        elif trust_irreducible:
            logger.debug("Trusting irreducibility of degree-%d polynomial", degree)
            trusted = True
        else:
            raise IrreduciblePolynomialError(
                f"Cannot check irreducibility above degree {MAX_IRREDUCIBILITY_DEGREE}; "
                "pass trust_irreducible=True to assert it"
            )

        if root_interval is None:
            interval = _largest_root_interval(poly)
        else:
            lo, hi = (_to_fraction(v) for v in root_interval)
            if not (1 < lo <= hi):
                raise IrreduciblePolynomialError(
                    f"Root interval [{lo}, {hi}] must lie above 1"
                )
            if poly.count_roots(_to_sympy(lo), _to_sympy(hi)) != 1:
                raise IrreduciblePolynomialError(
                    f"Interval [{lo}, {hi}] does not isolate exactly one root"
                )
            interval = (lo, hi)
        return cls(coeffs, interval, trusted)

    @classmethod
    def from_json(cls, data: dict) -> "MinimalPolynomial":
        """Read ``{"minpoly": [c0, ..., cm], "root_interval": [lo, hi]}``."""
        interval = data.get("root_interval")
        return cls.from_coefficients(
            data["minpoly"],
            tuple(interval) if interval else None,
            trust_irreducible=bool(data.get("trusted", False)),
        )

    def to_json(self) -> dict:
        return {
            "minpoly": [str(c) for c in self.coefficients],
            "root_interval": [str(v) for v in self.root_interval],
        }

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    @cached_property
    def poly(self) -> sympy.Poly:
        return _sympy_poly(self.coefficients)

    @property
    def generator(self) -> "FieldElement":
        """beta itself as a field element."""
        if self.degree == 1:
            return FieldElement((-self.coefficients[0],), self)
        return FieldElement((0, 1), self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement((1,), self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement((0,), self)

    def element(self, value) -> "FieldElement":
        """Coerce an int, Fraction, coordinate list or element into this field."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatchError("Element belongs to a different field")
            return value
        if isinstance(value, (list, tuple)):
            return FieldElement(value, self)
        return FieldElement((_to_fraction(value),), self)

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational interval around beta of width at most 2**-bits."""
        cached = self._refined.get(bits)
        if cached is not None:
            return cached
        lo, hi = self.root_interval
        known = [b for b in self._refined if b < bits]
        if known:
            lo, hi = self._refined[max(known)]
        if hi - lo > Fraction(1, 2**bits):
            s, t = self.poly.refine_root(
                _to_sympy(lo), _to_sympy(hi), eps=sympy.Rational(1, 2**bits)
            )
            lo, hi = _to_fraction(s), _to_fraction(t)
        self._refined[bits] = (lo, hi)
        return lo, hi

    def root(self, dps: int = DEFAULT_PRECISION) -> mpmath.mpf:
        """beta to ``dps`` decimal digits."""
        bits = int(dps * 3.33) + 16
        lo, hi = self.interval(bits)
        with mpmath.workdps(dps + 5):
            return mpmath.mpf(lo.numerator) / lo.denominator / 2 + mpmath.mpf(
                hi.numerator
            ) / hi.denominator / 2

    def conjugates(self, dps: int = 30) -> list:
        """All roots of the polynomial, the designated one included."""
        with mpmath.workdps(dps):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(self.coefficients)]
            if self.degree == 1:
                return [-coeffs[1] / coeffs[0]]
            return list(mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * dps))

    def other_conjugates(self, dps: int = 30) -> list:
        """Conjugates of beta other than beta itself."""
        beta = self.root(dps)
        roots = self.conjugates(dps)
        closest = min(range(len(roots)), key=lambda i: abs(roots[i] - beta))
        return [r for i, r in enumerate(roots) if i != closest]

    def is_pisot(self) -> bool:
        """Algebraic integer > 1 whose other conjugates lie inside the unit disc."""
        margin = 1 - mpmath.mpf(10) ** -20
        return self.is_integral and all(abs(z) < margin for z in self.other_conjugates())

    def is_perron(self) -> bool:
        """Algebraic integer > 1 strictly dominating its other conjugates."""
        # conjugates of equal modulus (e.g. -beta) must not pass on rounding
        beta = self.root() * (1 - mpmath.mpf(10) ** -20)
        return self.is_integral and all(abs(z) < beta for z in self.other_conjugates())

    def discriminant(self) -> Fraction:
        return _to_fraction(sympy.discriminant(self.poly.as_expr(), X))

    @cached_property
    def _quadratic_branch(self) -> int:
        """+1 if beta is the larger root of a quadratic, -1 otherwise."""
        vertex = -self.coefficients[1] / 2
        bits = START_BITS
        while True:
            lo, hi = self.interval(bits)
            if lo > vertex:
                return 1
            if hi < vertex:
                return -1
            bits *= 2


def _largest_root_interval(poly: sympy.Poly) -> tuple[Fraction, Fraction]:
    intervals = poly.intervals()
    if not intervals:
        raise IrreduciblePolynomialError(f"Polynomial {poly.as_expr()} has no real root")
    (s, t), _ = intervals[-1]
    while True:
        lo, hi = _to_fraction(s), _to_fraction(t)
        if lo > 1:
            return lo, hi
        if hi <= 1:
            raise IrreduciblePolynomialError(
                f"Largest real root of {poly.as_expr()} does not exceed 1"
            )
        s, t = poly.refine_root(s, t, eps=(t - s) / 16)


def _reduce(coeffs: list[Fraction], minpoly: MinimalPolynomial) -> tuple[Fraction, ...]:
    """Reduce a coefficient list modulo the (monic) minimal polynomial."""
    m = minpoly.degree
    coeffs = list(coeffs) + [Fraction(0)] * max(0, m - len(coeffs))
    c = minpoly.coefficients
    for k in range(len(coeffs) - 1, m - 1, -1):
        t = coeffs[k]
        if t:
            coeffs[k] = Fraction(0)
            for i in range(m):
                coeffs[k - m + i] -= t * c[i]
    return tuple(coeffs[:m])


def _sign_sqrt(a: Fraction, b: Fraction, d: Fraction) -> int:
    """Sign of a + b*sqrt(d) for a positive non-square d."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    return sa if a * a > b * b * d else sb


@total_ordering
class FieldElement:
    """An exact element of Q(beta) in the power basis."""

    __slots__ = ("_coords", "_field")

    def __init__(self, coords, field: MinimalPolynomial):
        values = [_to_fraction(c) for c in coords]
        if len(values) > field.degree:
            self._coords = _reduce(values, field)
        else:
            self._coords = tuple(values) + (Fraction(0),) * (field.degree - len(values))
        self._field = field

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return self._coords

    @property
    def field(self) -> MinimalPolynomial:
        return self._field

    @property
    def is_zero(self) -> bool:
        return not any(self._coords)

    @property
    def is_rational(self) -> bool:
        return not any(self._coords[1:])

    @property
    def is_integer(self) -> bool:
        return self.is_rational and self._coords[0].denominator == 1

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other._field != self._field:
                raise FieldMismatchError("Operands belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement((other,), self._field)
        return NotImplemented

    def __repr__(self) -> str:
        return f"FieldElement({[str(c) for c in self._coords]})"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self._coords):
            if c == 0:
                continue
            power = "" if i == 0 else ("b" if i == 1 else f"b^{i}")
            if i == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(power)
            else:
                terms.append(f"{c}*{power}")
        return " + ".join(terms) if terms else "0"

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(tuple(a + b for a, b in zip(self._coords, other._coords)), self._field)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(tuple(-a for a in self._coords), self._field)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(tuple(a - b for a, b in zip(self._coords, other._coords)), self._field)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(tuple(a * other for a in self._coords), self._field)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        product = [Fraction(0)] * (2 * self._field.degree - 1)
        for i, a in enumerate(self._coords):
            if a:
                for j, b in enumerate(other._coords):
                    if b:
                        product[i + j] += a * b
        return FieldElement(_reduce(product, self._field), self._field)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse.

        Raises:
            ZeroDivisionInFieldError: If the element is zero.
        """
        if self.is_zero:
            raise ZeroDivisionInFieldError("Division by zero in Q(beta)")
        if self.is_rational:
            return FieldElement((1 / self._coords[0],), self._field)
        poly = _sympy_poly(self._coords)
        inv = poly.invert(self._field.poly)
        return FieldElement(tuple(_to_fraction(c) for c in reversed(inv.all_coeffs())), self._field)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionInFieldError("Division by zero in Q(beta)")
            return FieldElement(tuple(a / other for a in self._coords), self._field)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self._field.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return other._field == self._field and other._coords == self._coords
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self._coords[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational:
            return hash(self._coords[0])
        return hash((self._coords, self._field.coefficients))

    def __lt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).sign() < 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational enclosure of the real value from a 2**-bits root interval."""
        lo, hi = self._field.interval(bits)
        low = high = self._coords[0]
        plo = phi = Fraction(1)
        for c in self._coords[1:]:
            plo *= lo
            phi *= hi
            if c >= 0:
                low += c * plo
                high += c * phi
            else:
                low += c * phi
                high += c * plo
        return low, high

    def sign(self) -> int:
        """-1, 0 or 1; zero is decided exactly from the coordinates.

        Raises:
            PrecisionError: If refinement exceeds its bit budget.
        """
        if self.is_zero:
            return 0
        if self.is_rational:
            return 1 if self._coords[0] > 0 else -1
        f = self._field
        if f.degree == 2:
            c0, c1 = f.coefficients[0], f.coefficients[1]
            a, b = self._coords
            disc = c1 * c1 - 4 * c0
            return _sign_sqrt(a - b * c1 / 2, f._quadratic_branch * b / 2, disc)
        bits = START_BITS
        while bits <= MAX_BITS:
            low, high = self.bounds(bits)
            if low > 0:
                return 1
            if high < 0:
                return -1
            bits *= 2
        raise PrecisionError(f"Could not decide the sign of {self} within {MAX_BITS} bits")

    def floor(self) -> int:
        if self.is_rational:
            return math.floor(self._coords[0])
        bits = START_BITS
        while bits <= MAX_BITS:
            low, high = self.bounds(bits)
            if math.floor(low) == math.floor(high):
                return math.floor(low)
            bits *= 2
        raise PrecisionError(f"Could not decide the floor of {self} within {MAX_BITS} bits")

    def ceil(self) -> int:
        return -(-self).floor()

    def frac(self) -> "FieldElement":
        return self - self.floor()

    def refine(self, eps) -> Approx:
        """Enclose the value within ``eps``."""
        eps = mpmath.mpf(eps)
        if eps <= 0:
            raise OutOfRangeError("Refinement tolerance must be positive", value=eps)
        dps = max(mpmath.mp.dps, int(-mpmath.log10(eps)) + 10)
        bits = START_BITS
        with mpmath.workdps(dps):
            while bits <= MAX_BITS:
                low, high = self.bounds(bits)
                half = (high - low) / 2
                half_mpf = mpmath.mpf(half.numerator) / half.denominator
                if half_mpf <= eps / 2:
                    mid = (low + high) / 2
                    value = mpmath.mpf(mid.numerator) / mid.denominator
                    rounding = abs(value) * mpmath.mpf(2) ** (-mpmath.mp.prec + 2)
                    return Approx(+value, half_mpf + rounding)
                bits *= 2
        raise PrecisionError(f"Could not refine {self} to {eps}")

    def to_mpf(self, dps: int | None = None) -> mpmath.mpf:
        dps = dps or mpmath.mp.dps
        return self.refine(mpmath.mpf(10) ** (-dps - 3)).value

    def __float__(self) -> float:
        return float(self.to_mpf(20))

    def norm(self) -> Fraction:
        return _to_fraction(self._multiplication_matrix().det())

    def trace(self) -> Fraction:
        return _to_fraction(self._multiplication_matrix().trace())

    def _multiplication_matrix(self) -> sympy.Matrix:
        m = self._field.degree
        columns = []
        power = self._field.one
        beta = self._field.generator if m > 1 else None
        for j in range(m):
            columns.append([_to_sympy(c) for c in (self * power).coords])
            if beta is not None:
                power = power * beta
        return sympy.Matrix(columns).T


class NormTraceDisc(NamedTuple):
    norm: Fraction
    trace: Fraction
    disc: Fraction


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """
    Exact add/sub/mul/div of two elements of the same field.

    Raises:
        FieldMismatchError: If the operands live in different fields.
        ZeroDivisionInFieldError: On division by zero.
    """
    if a.field != b.field:
        raise FieldMismatchError("Operands belong to different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"Unknown field operation '{op}'")


def disc(minpoly: MinimalPolynomial) -> int | Fraction:
    """Discriminant of the minimal polynomial; an integer for integral beta."""
    d = minpoly.discriminant()
    return int(d) if d.denominator == 1 else d


def norm_trace_disc(x: FieldElement) -> NormTraceDisc:
    """Norm and trace of ``x`` together with the field discriminant."""
    return NormTraceDisc(x.norm(), x.trace(), x.field.discriminant())


def refine(x, eps) -> Approx:
    """Enclose an exact number within ``eps``; rationals come back exact."""
    if isinstance(x, FieldElement):
        if x.is_rational:
            return _rational_approx(x.coords[0])
        return x.refine(eps)
    if isinstance(x, (int, Fraction)):
        return _rational_approx(Fraction(x))
    if isinstance(x, Approx):
        return x
    return Approx(mpmath.mpf(x), mpmath.mpf(0))


def _rational_approx(q: Fraction) -> Approx:
    value = mpmath.mpf(q.numerator) / q.denominator
    if value * q.denominator == q.numerator:
        return Approx(value, mpmath.mpf(0))
    return Approx(value, abs(value) * mpmath.mpf(2) ** (-mpmath.mp.prec + 1))


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, FieldElement))


def to_mpf(x, dps: int | None = None) -> mpmath.mpf:
    """Any supported number as an mpf at the working precision."""
    if isinstance(x, FieldElement):
        return x.to_mpf(dps)
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, Approx):
        return x.value
    return mpmath.mpf(x)


def floor_of(x) -> int:
    """Exact floor for exact inputs, mpmath floor otherwise."""
    if isinstance(x, FieldElement):
        return x.floor()
    if isinstance(x, (int, Fraction)):
        return math.floor(x)
    return int(mpmath.floor(x))


def ceil_of(x) -> int:
    return -floor_of(-x)


def sign_of(x) -> int:
    if isinstance(x, FieldElement):
        return x.sign()
    return (x > 0) - (x < 0)


@cache
def golden() -> MinimalPolynomial:
    """x^2 - x - 1."""
    return MinimalPolynomial.from_coefficients((-1, -1, 1))


@cache
def tribonacci() -> MinimalPolynomial:
    """x^3 - x^2 - x - 1."""
    return MinimalPolynomial.from_coefficients((-1, -1, -1, 1))


@cache
def plastic() -> MinimalPolynomial:
    """x^3 - x - 1."""
    return MinimalPolynomial.from_coefficients((-1, -1, 0, 1))


@cache
def quadratic(d: int) -> MinimalPolynomial:
    """x^2 - d, generator sqrt(d), for a positive non-square d."""
    if d < 2 or math.isqrt(d) ** 2 == d:
        raise IrreduciblePolynomialError(f"x^2 - {d} is reducible or has no root above 1")
    return MinimalPolynomial.from_coefficients((-d, 0, 1))


@cache
def rational_field(r: Fraction) -> MinimalPolynomial:
    """The degree-1 field x - r used for rational bases r > 1."""
    r = _to_fraction(r)
    if r <= 1:
        raise OutOfRangeError(f"Rational base must exceed 1, got {r}", value=r)
    return MinimalPolynomial.from_coefficients((-r, 1))
