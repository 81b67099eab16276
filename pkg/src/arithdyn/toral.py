"""
Arithmetic codings of hyperbolic toral automorphisms.

For a Pisot automorphism T with dominant eigenvalue beta, a homoclinic point
t = xi * (1, beta^-1, ..., beta^-(m-1)) mod Z^m (xi in P_beta) codes the
two-sided beta-compactum onto the torus:

    h_t(eps) = sum_n eps_n T^-n t = (sum_n eps_n beta^-n) * t  mod Z^m.

Windows here are finite in both directions, so every evaluation is an exact
element of Q(beta) reduced mod 1. Automorphisms that are not in companion
form are coded through a semiconjugating matrix B_M(n).
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

import mpmath
import numpy as np
import sympy

from .beta_core import Beta, expansion_of_one, greedy_expand, greedy_two_sided, is_parry_admissible
from .digits import DigitSeq
from .errors import (
    NotHomoclinicError,
    OutOfRangeError,
    SemiconjugacyError,
    UndecidableAtDepthError,
)
from .exactnum import Approx, FieldElement, MinimalPolynomial, X, refine

logger = logging.getLogger(__name__)

# Eigenvalues closer than this to the unit circle leave hyperbolicity unverified
HYPERBOLICITY_MARGIN = 1e-9
# int64 grids are used for the BAC scan while values stay below this
INT64_SAFE = 2**62

Rows = tuple[tuple[int, ...], ...]


def _rows(matrix) -> Rows:
    if isinstance(matrix, ToralAutomorphism):
        return matrix.matrix
    if isinstance(matrix, sympy.MatrixBase):
        return tuple(tuple(int(v) for v in matrix.row(i)) for i in range(matrix.rows))
    return tuple(tuple(int(v) for v in row) for row in matrix)


@dataclass(frozen=True)
class ToralAutomorphism:
    """An automorphism of the m-torus given by an integer matrix with det = +-1."""

    matrix: Rows

    def __post_init__(self):
        rows = _rows(self.matrix)
        object.__setattr__(self, "matrix", rows)
        m = len(rows)
        if m < 2 or any(len(r) != m for r in rows):
            raise OutOfRangeError(f"Expected a square matrix of size >= 2, got {rows}", value=rows)
        det = int(sympy.Matrix(rows).det())
        if det not in (1, -1):
            raise OutOfRangeError(f"Toral automorphisms need det = +-1, got {det}", value=det, interval=(-1, 1))

    @classmethod
    def from_minpoly(cls, minpoly: MinimalPolynomial) -> "ToralAutomorphism":
        """The companion automorphism T_beta of a monic integer polynomial."""
        ks = [-c for c in reversed(minpoly.coefficients[:-1])]
        m = len(ks)
        rows = [[int(k) for k in ks]]
        for i in range(1, m):
            rows.append([1 if j == i - 1 else 0 for j in range(m)])
        return cls(tuple(tuple(r) for r in rows))

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    @cached_property
    def sympy_matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.matrix)

    @cached_property
    def char_poly(self) -> sympy.Poly:
        return self.sympy_matrix.charpoly(X)

    @cached_property
    def ks(self) -> tuple[int, ...]:
        """k_1, ..., k_m with beta^m = k_1 beta^(m-1) + ... + k_m."""
        return tuple(-int(c) for c in self.char_poly.all_coeffs()[1:])

    @cached_property
    def field(self) -> MinimalPolynomial:
        """
        Q(beta) for the largest real eigenvalue.

        Raises:
            IrreduciblePolynomialError: If the characteristic polynomial factors.
        """
        coeffs = [int(c) for c in reversed(self.char_poly.all_coeffs())]
        return MinimalPolynomial.from_coefficients(coeffs)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(np.array(self.matrix, dtype=float))

    @property
    def hyperbolicity_margin(self) -> float:
        return float(np.min(np.abs(np.abs(self.eigenvalues) - 1)))

    @property
    def hyperbolic(self) -> bool:
        return self.hyperbolicity_margin > 0

    @property
    def hyperbolicity_verified(self) -> bool:
        return self.hyperbolicity_margin > HYPERBOLICITY_MARGIN

    @property
    def is_pisot(self) -> bool:
        """Exactly one eigenvalue outside the unit disc, and it is real and > 1."""
        outside = [v for v in self.eigenvalues if abs(v) > 1 + HYPERBOLICITY_MARGIN]
        if len(outside) != 1 or not self.hyperbolicity_verified:
            return False
        v = outside[0]
        return bool(abs(v.imag) < HYPERBOLICITY_MARGIN and v.real > 1)

    @property
    def beta(self) -> Beta:
        return Beta.algebraic(self.field)

    def companion(self) -> "ToralAutomorphism":
        """T_beta, the companion automorphism with the same characteristic polynomial."""
        return ToralAutomorphism.from_minpoly(self.field)

    def __str__(self) -> str:
        return ";".join(",".join(str(v) for v in row) for row in self.matrix)


@dataclass(frozen=True)
class ToralPoint:
    """A point of the torus with exact coordinates in [0, 1)."""

    coords: tuple

    @classmethod
    def reduce(cls, values) -> "ToralPoint":
        return cls(tuple(_frac(v) for v in values))

    def __add__(self, other: "ToralPoint") -> "ToralPoint":
        return ToralPoint.reduce(a + b for a, b in zip(self.coords, other.coords))

    def apply(self, matrix) -> "ToralPoint":
        """M x mod Z^m for an integer matrix M."""
        rows = _rows(matrix)
        return ToralPoint.reduce(
            sum((c * x for c, x in zip(row, self.coords) if c), start=self.coords[0] * 0) for row in rows
        )

    def approx(self, digits: int = 30) -> list[Approx]:
        eps = mpmath.mpf(10) ** (-digits)
        return [refine(c, eps) for c in self.coords]

    def distance(self, other: "ToralPoint") -> mpmath.mpf:
        """Sup distance on the torus."""
        worst = mpmath.mpf(0)
        for a, b in zip(self.approx(), other.approx()):
            d = abs(a.value - b.value) % 1
            worst = max(worst, min(d, 1 - d))
        return worst

    def to_json(self, digits: int = 12) -> list:
        return [a.to_json(digits) for a in self.approx(digits + 5)]


def _frac(v):
    if isinstance(v, FieldElement):
        return v.frac()
    if isinstance(v, (int, Fraction)):
        return v - math.floor(v)
    return v - mpmath.floor(v)


@dataclass(frozen=True)
class TwoSidedSeq:
    """Digits eps_offset, ..., eps_(offset+len-1) of a two-sided sequence; zero elsewhere."""

    digits: tuple[int, ...]
    offset: int = 0

    def digit(self, n: int) -> int:
        i = n - self.offset
        return self.digits[i] if 0 <= i < len(self.digits) else 0

    def shift(self) -> "TwoSidedSeq":
        """sigma: (sigma eps)_n = eps_(n+1)."""
        return TwoSidedSeq(self.digits, self.offset - 1)

    def __add__(self, other: "TwoSidedSeq") -> "TwoSidedSeq":
        """Digitwise sum; the result may leave the alphabet."""
        lo = min(self.offset, other.offset)
        hi = max(self.offset + len(self.digits), other.offset + len(other.digits))
        return TwoSidedSeq(tuple(self.digit(n) + other.digit(n) for n in range(lo, hi)), lo)

    def value(self, beta: Beta):
        """sum eps_n beta^-n, exact for an algebraic base."""
        total = beta.lift(0)
        inv = 1 / beta.value
        for i, d in enumerate(self.digits):
            if d:
                total = total + d * inv ** (self.offset + i)
        return total

    def render(self) -> str:
        return "".join(str(d) if 0 <= d <= 9 else f"<{d}>" for d in self.digits) + f"@{self.offset}"

    def __str__(self) -> str:
        return self.render()


def two_sided_admissible(s: TwoSidedSeq, beta: Beta) -> bool:
    """Every suffix of the window is below the Parry sequence of beta."""
    if not s.digits:
        return True
    if any(d < 0 or d > beta.floor for d in s.digits):
        return False
    return is_parry_admissible(DigitSeq.finite(s.digits), expansion_of_one(beta))


def is_homoclinic(xi: FieldElement) -> bool:
    """xi in P_beta: Tr(beta^j xi) is an integer for j = 0..m-1."""
    power = xi.field.one
    for _ in range(xi.field.degree):
        if (power * xi).trace().denominator != 1:
            return False
        power = power * xi.field.generator
    return True


def _mat_vec(rows: Rows, vector) -> tuple:
    return tuple(
        sum((c * v for c, v in zip(row, vector) if c), start=vector[0] * 0) for row in rows
    )


@dataclass(frozen=True)
class HomoclinicPoint:
    """The homoclinic point B * xi (1, beta^-1, ..., beta^-(m-1)).

    ``conjugator`` is None for the companion automorphism; otherwise it is
    B_M(n) and ``automorphism`` is M.
    """

    xi: FieldElement
    automorphism: ToralAutomorphism
    conjugator: Optional[Rows] = None

    def __post_init__(self):
        field = self.automorphism.field
        if self.xi.field != field:
            raise NotHomoclinicError("xi must lie in the field of the automorphism's eigenvalue")
        if not is_homoclinic(self.xi):
            raise NotHomoclinicError(f"xi = {self.xi} fails the trace test for P_beta")
        if self.conjugator is None and self.automorphism.matrix != self.automorphism.companion().matrix:
            raise NotHomoclinicError("A non-companion automorphism needs a conjugating matrix")

    @classmethod
    def companion(cls, xi: FieldElement) -> "HomoclinicPoint":
        return cls(xi, ToralAutomorphism.from_minpoly(xi.field))

    @classmethod
    def via(cls, matrix, n: Sequence[int], xi: FieldElement) -> "HomoclinicPoint":
        """The homoclinic point of M obtained through B_M(n)."""
        automorphism = matrix if isinstance(matrix, ToralAutomorphism) else ToralAutomorphism(matrix)
        return cls(xi, automorphism, _rows(b_matrix(automorphism, n)))

    @property
    def beta(self) -> Beta:
        return Beta.algebraic(self.xi.field)

    @cached_property
    def vector(self) -> tuple:
        """Unreduced coordinates (an eigenvector of the automorphism for beta)."""
        inv = self.xi.field.generator.inverse()
        base = [self.xi]
        for _ in range(self.xi.field.degree - 1):
            base.append(base[-1] * inv)
        if self.conjugator is None:
            return tuple(base)
        return _mat_vec(self.conjugator, tuple(base))

    @property
    def point(self) -> ToralPoint:
        return ToralPoint.reduce(self.vector)

    def scaled(self, x) -> ToralPoint:
        return ToralPoint.reduce(x * v for v in self.vector)


def homoclinic_eval(t: HomoclinicPoint, s: TwoSidedSeq) -> ToralPoint:
    """h_t(s) = (sum eps_n beta^-n) t mod Z^m, exactly."""
    return t.scaled(s.value(t.beta))


def shift_commutation_check(t: HomoclinicPoint, s: TwoSidedSeq) -> bool:
    """h_t(sigma s) = T h_t(s) on the torus."""
    return homoclinic_eval(t, s.shift()) == homoclinic_eval(t, s).apply(t.automorphism)


def normalize(s: TwoSidedSeq, beta: Beta, depth: int = 256) -> TwoSidedSeq:
    """
    Re-expand a window with arbitrary nonnegative integer digits into the
    admissible greedy window of the same value (for finitary bases such as
    golden and tribonacci).

    Raises:
        OutOfRangeError: If the window has a negative value.
        UndecidableAtDepthError: If the greedy expansion is not finite
            within ``depth`` digits.
    """
    x = s.value(beta)
    if x < 0:
        raise OutOfRangeError("Only nonnegative windows can be normalized", value=x)
    if x == 0:
        return TwoSidedSeq((), 0)
    expansion = greedy_two_sided(x, beta, depth)
    seq = expansion.digits
    if not seq.is_finite or seq.truncated:
        raise UndecidableAtDepthError(f"{s} has no finite greedy expansion within {depth} digits", depth=depth)
    digits = list(seq.preperiod)
    offset = expansion.start_index
    while digits and digits[0] == 0:
        digits.pop(0)
        offset += 1
    return TwoSidedSeq(tuple(digits), offset)


def additivity_check(t: HomoclinicPoint, s1: TwoSidedSeq, s2: TwoSidedSeq) -> bool:
    """h_t(s1 + s2) = h_t(s1) + h_t(s2), with the sum normalized to an admissible window."""
    total = normalize(s1 + s2, t.beta)
    return homoclinic_eval(t, total) == homoclinic_eval(t, s1) + homoclinic_eval(t, s2)


def preimage_count(t: HomoclinicPoint) -> int:
    """
    Number of preimages of a generic point: |det B| * |D N(xi)|.

    Raises:
        NotHomoclinicError: If the count is not an integer.
    """
    field = t.xi.field
    k = abs(field.discriminant() * t.xi.norm())
    if t.conjugator is not None:
        k *= abs(int(sympy.Matrix(t.conjugator).det()))
    if k.denominator != 1:
        raise NotHomoclinicError(f"|D N(xi)| = {k} is not an integer")
    return int(k)


def b_matrix(matrix, n: Sequence[int]) -> sympy.Matrix:
    """
    B_M(n), columns M n, (M^2 - k_1 M) n, ..., k_m n.

    Raises:
        SemiconjugacyError: If B M_beta = M B fails.
    """
    automorphism = matrix if isinstance(matrix, ToralAutomorphism) else ToralAutomorphism(matrix)
    m = automorphism.dimension
    if len(n) != m:
        raise OutOfRangeError(f"n must have {m} entries, got {len(n)}", value=tuple(n))
    M = automorphism.sympy_matrix
    ks = automorphism.ks
    vec = sympy.Matrix(list(n))
    columns = []
    power = M
    for j in range(1, m):
        columns.append(power * vec)
        power = M * power - ks[j - 1] * M
    columns.append(ks[m - 1] * vec)
    B = sympy.Matrix.hstack(*columns)
    companion = sympy.Matrix(automorphism.companion().matrix)
    if B * companion != M * B:
        raise SemiconjugacyError(f"B_M(n) fails the semiconjugacy for n = {tuple(n)}")
    return B


def f_form(matrix, n: Sequence[int]) -> int:
    """f_M(n) = det B_M(n)."""
    return int(b_matrix(matrix, n).det())


def f_form_symbolic(matrix) -> tuple[sympy.Expr, tuple[sympy.Symbol, ...]]:
    """The m-form f_M as a polynomial in symbols n1..nm."""
    automorphism = matrix if isinstance(matrix, ToralAutomorphism) else ToralAutomorphism(matrix)
    symbols = sympy.symbols(f"n1:{automorphism.dimension + 1}")
    M = automorphism.sympy_matrix
    ks = automorphism.ks
    vec = sympy.Matrix(symbols)
    columns = []
    power = M
    for j in range(1, automorphism.dimension):
        columns.append(power * vec)
        power = M * power - ks[j - 1] * M
    columns.append(ks[-1] * vec)
    return sympy.expand(sympy.Matrix.hstack(*columns).det()), symbols


class BacResult(NamedTuple):
    """Outcome of the bounded scan for f_M(n) = +-1.

    ``k_min`` is the smallest nonzero |f_M| seen, an upper bound for the
    arithmetic minimum that is not proven minimal when nothing was found.
    """

    found: bool
    solution: Optional[tuple[int, ...]]
    k_min: Optional[int]
    bound: int


def bac_search(matrix, bound: int) -> BacResult:
    """
    Exhaustive scan of |n|_inf <= bound for f_M(n) = +-1.

    The reported solution minimizes the sup norm, then the l1 norm, then
    prefers lexicographically larger vectors.
    """
    if bound < 1:
        raise OutOfRangeError("The search bound must be at least 1", value=bound, interval=(1, None))
    expr, symbols = f_form_symbolic(matrix)
    m = len(symbols)
    poly = sympy.Poly(expr, *symbols)
    scale = sum(abs(int(c)) for c in poly.coeffs()) * bound**m
    dtype = np.int64 if scale < INT64_SAFE else object
    axis = np.arange(-bound, bound + 1, dtype=np.int64).astype(dtype)
    grids = np.meshgrid(*([axis] * m), indexing="ij")
    values = np.zeros(grids[0].shape, dtype=dtype)
    for monom, coeff in zip(poly.monoms(), poly.coeffs()):
        term = np.full(grids[0].shape, int(coeff), dtype=dtype)
        for g, e in zip(grids, monom):
            if e:
                term = term * g**e
        values = values + term
    values = np.abs(values)
    nonzero = values[values != 0]
    k_min = int(nonzero.min()) if nonzero.size else None
    hits = np.argwhere(values == 1)
    logger.debug("BAC scan over %d points, %d unit values", values.size, len(hits))
    if not len(hits):
        return BacResult(False, None, k_min, bound)
    vectors = [tuple(int(axis[i]) for i in idx) for idx in hits]
    best = min(vectors, key=lambda v: (max(map(abs, v)), sum(map(abs, v)), tuple(-c for c in v)))
    return BacResult(True, best, 1, bound)


def fin_membership(x: FieldElement, beta: Beta, depth: int) -> Optional[bool]:
    """
    Whether x >= 0 has a finite greedy expansion: True, False, or None when
    ``depth`` digits do not decide.
    """
    if x == 0:
        return True
    y = x
    while y >= 1:
        y = y / beta.value
    seq = greedy_expand(y, beta, depth)
    if seq.truncated:
        return None
    return seq.is_finite


class FinitaryReport(NamedTuple):
    """Per-sample outcomes; a sample never fails, it is either found or unknown."""

    samples: int
    successes: int
    unknown: int
    witnesses: list

    @property
    def success_rate(self) -> float:
        return self.successes / self.samples if self.samples else 0.0


def finitary_probe(
    beta: Beta,
    samples: int = 20,
    delta=Fraction(1, 10),
    search_depth: int = 50,
    seed: int = 0,
    coefficient_bound: int = 5,
) -> FinitaryReport:
    """
    For random x in Z[beta]_+ look for f = beta^-k in (0, delta) with x + f
    of finite greedy expansion.

    The outcome is evidence only: a sample where no f is found within
    ``search_depth`` candidates is counted as unknown.

    Raises:
        OutOfRangeError: If beta is not a Pisot number.
    """
    if not beta.is_algebraic or not beta.field.is_integral or not beta.field.is_pisot():
        raise OutOfRangeError(f"The finitary probe needs a Pisot base, got {beta}", value=str(beta))
    rng = np.random.default_rng(seed)
    field = beta.field
    inv = 1 / beta.value
    k0 = 1
    while inv**k0 >= delta:
        k0 += 1
    successes = unknown = 0
    witnesses = []
    for i in range(samples):
        x = field.zero
        while x == 0:
            coords = rng.integers(-coefficient_bound, coefficient_bound + 1, size=field.degree)
            x = FieldElement(tuple(int(c) for c in coords), field)
        x = abs(x)
        found = None
        for k in range(k0, k0 + search_depth):
            if fin_membership(x + inv**k, beta, search_depth * 4):
                found = k
                break
        if found is None:
            unknown += 1
            logger.debug("Sample %d: no finite x + f within depth %d", i, search_depth)
        else:
            successes += 1
        witnesses.append((x, found))
    return FinitaryReport(samples, successes, unknown, witnesses)


class ApproximateCoding(NamedTuple):
    """A window whose image is within ``error`` of the target point (approximate, not the bijection)."""

    window: TwoSidedSeq
    x: mpmath.mpf
    error: float


def approximate_inverse(
    t: HomoclinicPoint,
    point: Sequence[float],
    search: int = 20,
    depth: int = 40,
) -> ApproximateCoding:
    """
    Find a finite window s with h_t(s) near ``point``.

    Lattice translates of the point within ``search`` are projected onto the
    unstable line x * v; the closest one with x >= 0 is expanded greedily.
    """
    v = np.array([float(c) for c in t.vector])
    target = np.array(point, dtype=float)
    m = len(v)
    if target.shape != (m,):
        raise OutOfRangeError(f"Expected a point with {m} coordinates", value=tuple(point))
    shifts = np.array(list(itertools.product(range(-search, search + 1), repeat=m)), dtype=float)
    candidates = target + shifts
    xs = candidates @ v / (v @ v)
    residual = np.linalg.norm(candidates - np.outer(xs, v), axis=1)
    residual[xs < 0] = np.inf
    best = int(np.argmin(residual))
    beta = t.beta.as_numeric()
    x = mpmath.mpf(float(xs[best]))
    expansion = greedy_two_sided(x, beta, depth)
    digits = list(expansion.digits.prefix(depth))
    offset = expansion.start_index
    while digits and digits[0] == 0:
        digits.pop(0)
        offset += 1
    window = TwoSidedSeq(tuple(digits), offset)
    b = float(beta.value)
    tail = b ** (1 - offset - len(digits)) * beta.floor / (b - 1) * float(np.linalg.norm(v))
    return ApproximateCoding(window, x, float(residual[best]) + tail)
