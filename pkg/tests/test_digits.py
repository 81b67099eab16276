"""Tests for the digits module."""
import pytest

from arithdyn.digits import DigitSeq, lex_compare, parse_digits
from arithdyn.errors import SpecParseError, UndecidableAtDepthError


class TestCanonicalForm:
    """Tests for the canonical eventually periodic form."""

    def test_preperiod_absorbed(self):
        """A preperiod that repeats the period rotates into it."""
        seq = DigitSeq.periodic((0, 1, 0), (0, 1, 0))
        assert seq.preperiod == ()
        assert seq.period == (0, 1, 0)

    def test_period_made_primitive(self):
        """(11) is the same as (1)."""
        assert DigitSeq.periodic((), (1, 1)).period == (1,)

    def test_zero_period_is_finite(self):
        """1(0) is the finite sequence 1."""
        seq = DigitSeq.periodic((1,), (0,))
        assert seq.is_finite
        assert seq.preperiod == (1,)

    def test_parsed_notation_is_canonical(self):
        """0(100) and (010) are the same sequence."""
        assert parse_digits("0(100)") == DigitSeq.periodic((), (0, 1, 0))

    def test_empty_period_rejected(self):
        """A period needs digits."""
        with pytest.raises(SpecParseError):
            DigitSeq.periodic((1,), ())


class TestAccess:
    """Tests for reading digits and derived sequences."""

    def test_digits_beyond_finite_part_are_zero(self):
        """Finite sequences read as zeros afterwards."""
        seq = DigitSeq.finite((1, 0, 1))
        assert seq.prefix(5) == (1, 0, 1, 0, 0)

    def test_negative_position(self):
        """Positions start at 0."""
        with pytest.raises(IndexError):
            DigitSeq.finite((1,)).digit(-1)

    def test_render(self):
        """Periodic sequences render with parentheses or as a prefix."""
        seq = parse_digits("(10)")
        assert seq.render() == "(10)"
        assert seq.render(5) == "10101"

    def test_multi_digit_glyph(self):
        """Digits above 9 are written <12>."""
        seq = parse_digits("1<12>")
        assert seq.prefix(2) == (1, 12)
        assert seq.render() == "1<12>"

    def test_shift(self):
        """Shifting rotates the period."""
        assert str(parse_digits("(010)").shift()) == "(100)"
        assert str(parse_digits("10(1)").shift(2)) == "(1)"

    def test_tails(self):
        """A purely periodic sequence of period 2 has 2 tails."""
        assert len(parse_digits("(10)").tails()) == 2

    def test_complement(self):
        """The complement of a finite sequence ends in the top digit."""
        assert str(DigitSeq.finite((1, 0)).complement(1)) == "0(1)"

    def test_check_alphabet(self):
        """The first digit above the bound is reported."""
        assert DigitSeq.finite((0, 2, 1), alphabet_max=1).check_alphabet() == 1
        assert DigitSeq.finite((0, 1, 1), alphabet_max=1).check_alphabet() is None

    def test_json(self):
        """The JSON form keeps the period."""
        seq = parse_digits("0(01)", alphabet_max=1)
        data = seq.to_json()
        assert data == {"alphabet_max": 1, "preperiod": [0], "period": [0, 1]}
        assert DigitSeq.from_json(data) == seq


class TestLexCompare:
    """Tests for lexicographic comparison."""

    def test_exact(self):
        """(10) is above 1 followed by zeros."""
        assert lex_compare(parse_digits("(10)"), parse_digits("1")) == 1
        assert lex_compare(parse_digits("1"), parse_digits("(10)")) == -1

    def test_equal(self):
        """Equal sequences compare to 0."""
        assert lex_compare(parse_digits("0(100)"), parse_digits("(010)")) == 0

    def test_generated_needs_depth(self):
        """Generated sequences cannot be compared without a depth."""
        alternating = DigitSeq.from_function(lambda i: i % 2)
        with pytest.raises(UndecidableAtDepthError):
            lex_compare(alternating, parse_digits("(01)"))
        assert lex_compare(alternating, parse_digits("(01)"), depth=8) == 0


class TestParseDigits:
    """Tests for the 0(100) notation."""

    def test_unclosed_period(self):
        """A period must be closed."""
        with pytest.raises(SpecParseError) as exc_info:
            parse_digits("0(1")
        assert exc_info.value.position == 3

    def test_stray_character(self):
        """Unexpected characters are located."""
        with pytest.raises(SpecParseError) as exc_info:
            parse_digits("01x")
        assert exc_info.value.position == 2
