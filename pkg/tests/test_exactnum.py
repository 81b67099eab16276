"""Tests for the exactnum module."""
from fractions import Fraction

import mpmath
import pytest

from arithdyn.errors import (
    FieldMismatchError,
    IrreduciblePolynomialError,
    OutOfRangeError,
    ZeroDivisionInFieldError,
)
from arithdyn.exactnum import (
    Approx,
    FieldElement,
    MinimalPolynomial,
    disc,
    field_arith,
    golden,
    norm_trace_disc,
    plastic,
    quadratic,
    rational_field,
    refine,
    to_mpf,
    tribonacci,
)


class TestMinimalPolynomial:
    """Tests for validating minimal polynomials."""

    def test_golden_is_monic_and_integral(self):
        """x^2 - x - 1 is stored low to high and monic."""
        g = golden()
        assert g.coefficients == (Fraction(-1), Fraction(-1), Fraction(1))
        assert g.degree == 2
        assert g.is_integral

    def test_made_monic(self):
        """A non-monic polynomial is divided by its leading coefficient."""
        p = MinimalPolynomial.from_coefficients((-2, -2, 2))
        assert p.coefficients == golden().coefficients

    def test_reducible_rejected(self):
        """x^2 - 1 factors over Q."""
        with pytest.raises(IrreduciblePolynomialError) as exc_info:
            MinimalPolynomial.from_coefficients((-1, 0, 1))
        assert len(exc_info.value.factors) == 2

    def test_no_root_above_one(self):
        """x^2 - 2/9 has no root above 1."""
        with pytest.raises(IrreduciblePolynomialError):
            MinimalPolynomial.from_coefficients((Fraction(-2, 9), 0, 1))

    def test_large_degree_needs_trust(self):
        """Degree 7 is not factored unless trusted."""
        coeffs = (-1, 0, 0, 0, 0, 0, -1, 1)
        with pytest.raises(IrreduciblePolynomialError):
            MinimalPolynomial.from_coefficients(coeffs)
        p = MinimalPolynomial.from_coefficients(coeffs, trust_irreducible=True)
        assert p.irreducible_trusted

    def test_root_interval_must_isolate(self):
        """An interval containing no root is refused."""
        with pytest.raises(IrreduciblePolynomialError):
            MinimalPolynomial.from_coefficients((-1, -1, 1), root_interval=(2, 3))

    def test_quadratic_square_rejected(self):
        """sqrt(4) is rational."""
        with pytest.raises(IrreduciblePolynomialError):
            quadratic(4)

    def test_rational_field_needs_base_above_one(self):
        """Rational bases must exceed 1."""
        assert rational_field(Fraction(3, 2)).generator == Fraction(3, 2)
        with pytest.raises(OutOfRangeError):
            rational_field(Fraction(1, 2))

    def test_root(self):
        """The designated root is the golden ratio."""
        expected = (1 + mpmath.sqrt(5)) / 2
        assert abs(golden().root(40) - expected) < mpmath.mpf(10) ** -35

    def test_pisot_and_perron(self):
        """Golden, tribonacci and plastic are Pisot; sqrt 2 is not even Perron."""
        assert golden().is_pisot()
        assert tribonacci().is_pisot()
        assert plastic().is_pisot()
        assert not quadratic(2).is_pisot()
        assert not quadratic(2).is_perron()

    def test_discriminant(self):
        """disc(x^2 - x - 1) = 5 and disc(x^3 - x^2 - x - 1) = -44."""
        assert disc(golden()) == 5
        assert disc(tribonacci()) == -44

    def test_json(self):
        """The JSON form reproduces the field."""
        g = golden()
        assert MinimalPolynomial.from_json(g.to_json()) == g


class TestFieldElement:
    """Tests for exact arithmetic in Q(beta)."""

    def test_defining_relation(self):
        """beta^2 = beta + 1 in the golden field."""
        b = golden().generator
        assert b * b == b + 1

    def test_inverse(self):
        """1/G = G - 1."""
        b = golden().generator
        assert b.inverse() == b - 1
        assert b**-2 == (b - 1) * (b - 1)

    def test_mixed_rational_arithmetic(self):
        """ints and Fractions combine on both sides."""
        b = golden().generator
        assert 2 - b == -(b - 2)
        assert Fraction(1, 2) * b == b / 2
        assert 1 / b == b - 1

    def test_ordering(self):
        """Comparisons are exact."""
        b = golden().generator
        assert Fraction(8, 5) < b < Fraction(13, 8)
        assert b - 1 > Fraction(1, 2)
        assert abs(1 - b) == b - 1

    def test_floor_and_frac(self):
        """floor(G) = 1 and frac(G) = G - 1."""
        b = golden().generator
        assert b.floor() == 1
        assert b.ceil() == 2
        assert b.frac() == b - 1

    def test_sqrt2_sign(self):
        """3 - 2 sqrt 2 is a small positive number."""
        s = quadratic(2).generator
        assert (3 - 2 * s).sign() == 1
        assert (s - Fraction(3, 2)).sign() == -1

    def test_cubic_floor(self):
        """The tribonacci number lies in (1.83, 1.84)."""
        t = tribonacci().generator
        assert t.floor() == 1
        assert Fraction(183, 100) < t < Fraction(184, 100)

    def test_norm_and_trace(self):
        """N(G) = -1, Tr(G) = 1."""
        result = norm_trace_disc(golden().generator)
        assert result.norm == -1
        assert result.trace == 1
        assert result.disc == 5

    def test_division_by_zero(self):
        """Zero has no inverse."""
        with pytest.raises(ZeroDivisionInFieldError):
            golden().zero.inverse()
        with pytest.raises(ZeroDivisionError):
            golden().one / 0

    def test_field_mismatch(self):
        """Elements of different fields do not mix."""
        with pytest.raises(FieldMismatchError):
            golden().generator + quadratic(2).generator
        with pytest.raises(FieldMismatchError):
            field_arith(golden().one, quadratic(2).one, "add")

    def test_reduces_long_coordinates(self):
        """Coordinates beyond the degree are reduced."""
        assert FieldElement((0, 0, 1), golden()) == FieldElement((1, 1), golden())

    def test_refine(self):
        """Refinement encloses the value within the tolerance."""
        approx = golden().generator.refine(mpmath.mpf(10) ** -30)
        assert approx.error_bound <= mpmath.mpf(10) ** -30
        assert approx.contains((1 + mpmath.sqrt(5)) / 2)

    def test_refine_rejects_nonpositive_tolerance(self):
        """eps must be positive."""
        with pytest.raises(OutOfRangeError):
            golden().generator.refine(0)


class TestHelpers:
    """Tests for module-level number helpers."""

    def test_refine_rational_is_exact(self):
        """Dyadic rationals come back with zero error."""
        assert refine(Fraction(1, 2), 1e-10).error_bound == 0

    def test_to_mpf(self):
        """Fractions and elements convert to mpf."""
        assert to_mpf(Fraction(1, 4)) == mpmath.mpf("0.25")
        assert abs(to_mpf(golden().generator) - mpmath.phi) < mpmath.mpf(10) ** -40

    def test_approx_bounds(self):
        """lower and upper bracket the value."""
        a = Approx(mpmath.mpf(1), mpmath.mpf("0.5"))
        assert a.lower == mpmath.mpf("0.5")
        assert a.upper == mpmath.mpf("1.5")
        assert a.contains(Fraction(5, 4))
        assert not a.contains(2)
