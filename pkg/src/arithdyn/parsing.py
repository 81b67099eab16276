"""
Module for parsing the textual formats accepted on the command line:
- bases: 'golden', 'tribonacci', 'plastic', 'sqrt:2', 'poly:-1,-1,1', '3/2', '1.9'
- reals and field elements: '1/2', '0.3', 'elt:-1,2', 'inv:elt:-1,2', 'beta'
- rotation numbers: 'golden', 'sqrt:2:-1:1', 'cf:1,(2)', '0.4142'
- two-sided windows: '1001@-2'
- integer matrices and vectors: '1,1;1,0', '2,3,2'
- Markov compacta: 'golden', 'odometer:2,3,2', a JSON object or a .json file
"""
import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Union

import mpmath

from .adic import AdicPath, MarkovCompactum
from .beta_core import Beta
from .config import DEFAULT_PRECISION
from .errors import SpecParseError
from .exactnum import FieldElement, MinimalPolynomial, golden, plastic, quadratic, tribonacci
from .rotation import ContinuedFraction, cf_expand
from .toral import TwoSidedSeq

Real = Union[int, Fraction, FieldElement, mpmath.mpf]

NAMED_FIELDS = {
    "golden": golden,
    "tribonacci": tribonacci,
    "plastic": plastic,
}

# Regex patterns
# Rational: 3, -2, 1/2
RATIONAL_PATTERN = re.compile(r"^-?\d+(?:/\d+)?$")
# Decimal: 1.9, .5, 1e-3
DECIMAL_PATTERN = re.compile(r"^-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE]-?\d+)?$")
# Integer list: 2,3,2
INT_LIST_PATTERN = re.compile(r"^-?\d+(?:,-?\d+)*$")
# Window: 1001@-2 (offset optional)
WINDOW_PATTERN = re.compile(r"^([0-9]*)(?:@(-?\d+))?$")
# Quadratic rotation number: sqrt:d:a:b meaning frac(a + b*sqrt(d))
SQRT_ALPHA_PATTERN = re.compile(r"^sqrt:(\d+):(-?\d+(?:/\d+)?):(-?\d+(?:/\d+)?)$")
# Continued fraction: cf:1,2,(3,4)
CF_PATTERN = re.compile(r"^cf:((?:\d+,)*\d*)(?:\(([\d,]+)\))?$")


def parse_int_list(text: str) -> list[int]:
    """
    Parse a comma-separated list of integers.

    Raises:
        SpecParseError: If the text is not of the form '2,3,-1'.
    """
    cleaned = text.replace(" ", "")
    if not INT_LIST_PATTERN.match(cleaned):
        raise SpecParseError(f"Invalid integer list: '{text}'. Use e.g. '2,3,2'")
    return [int(v) for v in cleaned.split(",")]


def parse_rational(text: str) -> Union[int, Fraction]:
    """Parse '3' or '1/2'."""
    if not RATIONAL_PATTERN.match(text):
        raise SpecParseError(f"Invalid rational: '{text}'")
    value = Fraction(text)
    return value.numerator if value.denominator == 1 else value


def parse_base(text: str, dps: int = DEFAULT_PRECISION) -> Beta:
    """
    Parse a base specification into a ``Beta``.

    Args:
        text: One of:
            - 'golden', 'tribonacci', 'plastic' (named algebraic bases)
            - 'sqrt:d' (sqrt(d) for a non-square d)
            - 'poly:c0,c1,...,cm' (largest real root, coefficients low to high)
            - '3', '3/2' (exact rational base)
            - '1.9' (numeric base at working precision)
        dps: Working precision in decimal digits.

    Raises:
        SpecParseError: If the format is invalid.
    """
    key = text.strip().lower()
    if key in NAMED_FIELDS:
        return Beta.algebraic(NAMED_FIELDS[key](), dps)
    if key.startswith("sqrt:"):
        return Beta.algebraic(quadratic(_int(key[5:], text)), dps)
    if key.startswith("poly:"):
        return Beta.algebraic(MinimalPolynomial.from_coefficients(parse_int_list(key[5:])), dps)
    if RATIONAL_PATTERN.match(key):
        return Beta.rational(parse_rational(key), dps)
    if DECIMAL_PATTERN.match(key):
        with mpmath.workdps(dps):
            return Beta.numeric(mpmath.mpf(key), dps)
    raise SpecParseError(
        f"Invalid base: '{text}'. "
        "Use a name (golden, tribonacci, plastic), 'sqrt:d', 'poly:c0,...,cm', 'p/q' or a decimal"
    )


def _int(text: str, context: str) -> int:
    if not re.fullmatch(r"-?\d+", text):
        raise SpecParseError(f"Expected an integer in '{context}'")
    return int(text)


def parse_element(text: str, field: MinimalPolynomial) -> FieldElement:
    """
    Parse an exact element of Q(beta).

    'elt:c0,c1,...' gives c0 + c1*beta + ..., 'beta' the generator, a rational
    the constant, and 'inv:<element>' the inverse of an element.
    """
    key = text.strip()
    if key.startswith("inv:"):
        return parse_element(key[4:], field).inverse()
    if key == "beta":
        return field.generator
    if key.startswith("elt:"):
        coords = [Fraction(c) for c in _split_fractions(key[4:], text)]
        if len(coords) > field.degree:
            raise SpecParseError(f"'{text}' has more than {field.degree} coordinates")
        return FieldElement(coords, field)
    if RATIONAL_PATTERN.match(key):
        return field.element(parse_rational(key))
    raise SpecParseError(f"Invalid field element: '{text}'. Use 'elt:c0,c1,...', 'inv:...', 'beta' or 'p/q'")


def _split_fractions(body: str, context: str) -> list[str]:
    parts = body.split(",")
    if not all(RATIONAL_PATTERN.match(p) for p in parts):
        raise SpecParseError(f"Invalid coordinates in '{context}'")
    return parts


def parse_real(text: str, beta: Beta | None = None) -> Real:
    """
    Parse a point x: rationals stay exact, decimals become mpf, and field
    syntax is read in the field of an algebraic ``beta``.
    """
    key = text.strip()
    if RATIONAL_PATTERN.match(key):
        return parse_rational(key)
    if DECIMAL_PATTERN.match(key):
        return mpmath.mpf(key)
    if beta is not None and beta.is_algebraic:
        return parse_element(key, beta.field)
    raise SpecParseError(f"Invalid number: '{text}'")


def parse_alpha(text: str, dps: int = DEFAULT_PRECISION) -> ContinuedFraction:
    """
    Parse a rotation number into its continued fraction.

    Args:
        text: One of:
            - 'golden' (G - 1 = [0; 1, 1, ...])
            - 'sqrt:d:a:b' (fractional part of a + b*sqrt(d))
            - 'cf:a1,...,ak,(p1,...,pl)' (quotients, optional period)
            - a decimal (quotients generated numerically)

    Raises:
        SpecParseError: If the format is invalid.
        RationalInputError: If the value is rational.
    """
    key = text.strip().lower()
    if key == "golden":
        g = golden()
        return cf_expand(g.generator - 1, dps)
    m = SQRT_ALPHA_PATTERN.match(key)
    if m:
        field = quadratic(int(m.group(1)))
        value = Fraction(m.group(2)) + Fraction(m.group(3)) * field.generator
        return cf_expand(value.frac(), dps)
    m = CF_PATTERN.match(key)
    if m:
        pre = [int(a) for a in m.group(1).split(",") if a]
        period = [int(a) for a in m.group(2).split(",") if a] if m.group(2) else None
        if not pre and not period:
            raise SpecParseError(f"Continued fraction '{text}' has no quotients")
        return ContinuedFraction.from_quotients(pre, period, dps)
    if RATIONAL_PATTERN.match(key):
        return cf_expand(parse_rational(key), dps)
    if DECIMAL_PATTERN.match(key):
        with mpmath.workdps(dps):
            return cf_expand(mpmath.mpf(key), dps)
    raise SpecParseError(
        f"Invalid rotation number: '{text}'. Use 'golden', 'sqrt:d:a:b', 'cf:1,(2)' or a decimal"
    )


def parse_window(text: str) -> TwoSidedSeq:
    """
    Parse '1001@-2': digits eps_-2 .. eps_1; the offset defaults to 0.

    Raises:
        SpecParseError: If the format is invalid.
    """
    m = WINDOW_PATTERN.match(text.strip())
    if not m:
        raise SpecParseError(f"Invalid window: '{text}'. Use 'digits@offset', e.g. '101@-1'")
    digits = tuple(int(c) for c in m.group(1))
    offset = int(m.group(2)) if m.group(2) else 0
    return TwoSidedSeq(digits, offset)


def parse_matrix(text: str) -> tuple[tuple[int, ...], ...]:
    """
    Parse a row-major integer matrix, rows separated by ';'.

    Raises:
        SpecParseError: If rows are malformed or of unequal length.
    """
    rows = tuple(tuple(parse_int_list(row)) for row in text.strip().split(";"))
    if any(len(r) != len(rows[0]) for r in rows):
        raise SpecParseError(f"Matrix rows in '{text}' have unequal lengths")
    return rows


def parse_path(text: str) -> AdicPath:
    """Parse an adic path 'x1,x2,...' (level 1 first)."""
    return AdicPath(tuple(parse_int_list(text)))


def parse_compactum(text: str) -> MarkovCompactum:
    """
    Parse a Markov compactum: 'golden', 'odometer:r1,r2,...', inline JSON, or
    a path to a JSON file in the ``MarkovCompactum.to_json`` format.

    Raises:
        SpecParseError: If the description is invalid.
    """
    key = text.strip()
    if key == "golden":
        return MarkovCompactum.golden()
    if key.startswith("odometer:"):
        return MarkovCompactum.full_odometer(parse_int_list(key[9:]))
    if key.startswith("{"):
        raw = key
    elif key.endswith(".json") and Path(key).is_file():
        raw = Path(key).read_text()
    else:
        raise SpecParseError(f"Invalid compactum: '{text}'. Use 'golden', 'odometer:2,3' or JSON")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise SpecParseError(f"Invalid compactum JSON: {e.msg}", position=e.pos) from e
    return MarkovCompactum.from_json(data)
