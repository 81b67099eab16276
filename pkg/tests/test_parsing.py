"""Tests for the parsing module."""
import json
from fractions import Fraction

import mpmath
import pytest

from arithdyn.adic import AdicPath, MarkovCompactum
from arithdyn.errors import RationalInputError, SpecParseError
from arithdyn.exactnum import FieldElement, golden, quadratic
from arithdyn.parsing import (
    parse_alpha,
    parse_base,
    parse_compactum,
    parse_element,
    parse_int_list,
    parse_matrix,
    parse_path,
    parse_rational,
    parse_real,
    parse_window,
)
from arithdyn.toral import TwoSidedSeq


class TestParseBase:
    """Tests for parse_base function."""

    def test_named(self):
        """Named bases are exact."""
        base = parse_base("golden")
        assert base.is_algebraic
        assert base.field == golden()

    def test_named_is_case_insensitive(self):
        """'Golden' and 'golden' agree."""
        assert parse_base("Golden").field == golden()

    def test_sqrt(self):
        """'sqrt:d' is the square root of d."""
        assert parse_base("sqrt:2").field == quadratic(2)

    def test_poly(self):
        """Coefficients run from the constant term up."""
        assert parse_base("poly:-1,-1,1").field == golden()

    def test_integer(self):
        """An integer base is exact."""
        assert parse_base("3").is_integer

    def test_rational(self):
        """A fraction stays exact but is not an integer."""
        base = parse_base("3/2")
        assert base.is_algebraic
        assert not base.is_integer

    def test_decimal(self):
        """A decimal base is numeric."""
        base = parse_base("1.9")
        assert not base.is_algebraic
        assert abs(base.value - mpmath.mpf("1.9")) < mpmath.mpf(10) ** -40

    @pytest.mark.parametrize("text", ["silver", "sqrt:x", "poly:1,a", ""])
    def test_invalid(self, text):
        """Unknown formats raise SpecParseError."""
        with pytest.raises(SpecParseError):
            parse_base(text)


class TestParseNumbers:
    """Tests for integer lists, rationals, reals and field elements."""

    def test_int_list(self):
        """Spaces are ignored."""
        assert parse_int_list("2, 3,-2") == [2, 3, -2]

    def test_int_list_invalid(self):
        """Semicolons are not list separators."""
        with pytest.raises(SpecParseError) as exc_info:
            parse_int_list("2;3")
        assert "Invalid integer list" in str(exc_info.value)

    def test_rational_reduces_to_int(self):
        """4/2 is the integer 2."""
        value = parse_rational("4/2")
        assert value == 2
        assert isinstance(value, int)

    def test_real(self, golden_beta):
        """Rationals stay exact, decimals become mpf, 'beta' needs a base."""
        assert parse_real("1/2") == Fraction(1, 2)
        assert isinstance(parse_real("0.25"), mpmath.mpf)
        assert parse_real("beta", golden_beta) == golden().generator
        with pytest.raises(SpecParseError):
            parse_real("beta")

    def test_element(self):
        """'elt:-1,2' is -1 + 2 beta = sqrt 5 in the golden field."""
        field = golden()
        sqrt5 = parse_element("elt:-1,2", field)
        assert sqrt5 == FieldElement((-1, 2), field)
        assert sqrt5 * sqrt5 == 5

    def test_inverse(self):
        """'inv:' inverts an element."""
        field = golden()
        assert parse_element("inv:elt:-1,2", field) * parse_element("elt:-1,2", field) == 1

    def test_element_constants(self):
        """'beta' is the generator and a rational is a constant."""
        field = golden()
        assert parse_element("beta", field) == field.generator
        assert parse_element("1/2", field) == field.element(Fraction(1, 2))

    def test_element_too_many_coordinates(self):
        """A quadratic field has two coordinates."""
        with pytest.raises(SpecParseError):
            parse_element("elt:1,2,3", golden())


class TestParseAlpha:
    """Tests for parse_alpha function."""

    def test_golden(self):
        """G - 1 = [0; 1, 1, 1, ...]."""
        assert parse_alpha("golden").quotients(3) == [1, 1, 1]

    def test_sqrt(self):
        """'sqrt:2:-1:1' is sqrt 2 - 1 = [0; (2)]."""
        cf = parse_alpha("sqrt:2:-1:1")
        assert cf.exact
        assert cf.period == (2,)

    def test_quotients_with_period(self):
        """'cf:2,(1)' is [0; 2, 1, 1, ...]."""
        assert parse_alpha("cf:2,(1)").quotients(4) == [2, 1, 1, 1]

    def test_empty_quotients(self):
        """At least one quotient is needed."""
        with pytest.raises(SpecParseError):
            parse_alpha("cf:")

    def test_rational_rejected(self):
        """A rational rotation number is refused."""
        with pytest.raises(RationalInputError):
            parse_alpha("1/2")

    def test_decimal(self):
        """A decimal alpha is expanded numerically."""
        cf = parse_alpha("0.4142135623730950488")
        assert not cf.exact
        assert cf.quotients(3) == [2, 2, 2]


class TestParseStructures:
    """Tests for windows, matrices, paths and compacta."""

    def test_window(self):
        """'1001@-2' starts at position -2."""
        assert parse_window("1001@-2") == TwoSidedSeq((1, 0, 0, 1), -2)

    def test_window_default_offset(self):
        """The offset defaults to 0."""
        assert parse_window("101") == TwoSidedSeq((1, 0, 1), 0)

    def test_window_invalid(self):
        """Letters are not digits."""
        with pytest.raises(SpecParseError):
            parse_window("1a@0")

    def test_matrix(self):
        """Rows are separated by ';'."""
        assert parse_matrix("1,1;1,0") == ((1, 1), (1, 0))

    def test_matrix_ragged(self):
        """Rows must have equal lengths."""
        with pytest.raises(SpecParseError) as exc_info:
            parse_matrix("1,1;1")
        assert "unequal" in str(exc_info.value)

    def test_path(self):
        """Level 1 comes first."""
        assert parse_path("1,0,1") == AdicPath((1, 0, 1))

    def test_compactum_named(self):
        """'golden' and 'odometer:...' are shortcuts."""
        assert parse_compactum("golden").to_json() == MarkovCompactum.golden().to_json()
        odometer = parse_compactum("odometer:2,3,2")
        assert odometer.to_json() == MarkovCompactum.full_odometer([2, 3, 2]).to_json()

    def test_compactum_file(self, tmp_path):
        """A .json file holds the description."""
        path = tmp_path / "odometer.json"
        expected = MarkovCompactum.full_odometer([2, 2])
        path.write_text(json.dumps(expected.to_json()))
        assert parse_compactum(str(path)).to_json() == expected.to_json()

    def test_compactum_bad_json(self):
        """Malformed JSON reports where it failed."""
        with pytest.raises(SpecParseError) as exc_info:
            parse_compactum("{bad")
        assert exc_info.value.position == 1

    def test_compactum_unknown(self):
        """Anything else is refused."""
        with pytest.raises(SpecParseError):
            parse_compactum("silver")
