"""
Digit sequences: finite, eventually periodic, or generated on demand.

``DigitSeq`` is the common carrier for expansions, Parry sequences,
rotational digits and two-sided windows. Positions are zero-based:
``digit(0)`` is the first digit of the expansion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from .errors import SpecParseError, UndecidableAtDepthError

AlphabetMax = Union[int, tuple[int, ...], None]


def minimal_period(period: tuple[int, ...]) -> tuple[int, ...]:
    p = len(period)
    for d in range(1, p + 1):
        if p % d == 0 and period[:d] * (p // d) == period:
            return period[:d]
    return period


@dataclass(frozen=True)
class DigitSeq:
    """A digit string with an optional repeating tail.

    A sequence with ``period=None`` and no ``generator`` is finite and reads
    as zeros beyond its digits. ``truncated`` marks a finite prefix of a
    longer (unknown) sequence; ``verified`` is False for tails detected in
    numeric mode.
    """

    preperiod: tuple[int, ...] = ()
    period: Optional[tuple[int, ...]] = None
    alphabet_max: AlphabetMax = None
    truncated: bool = False
    verified: bool = True
    generator: Optional[Callable[[int], int]] = field(default=None, compare=False)

    @classmethod
    def finite(cls, digits, alphabet_max: AlphabetMax = None, truncated: bool = False) -> "DigitSeq":
        return cls(tuple(int(d) for d in digits), None, alphabet_max, truncated)

    @classmethod
    def periodic(
        cls,
        preperiod,
        period,
        alphabet_max: AlphabetMax = None,
        verified: bool = True,
    ) -> "DigitSeq":
        """
        Canonical eventually periodic sequence.

        The period is shortened to its primitive root and the preperiod is
        absorbed into the period where possible; a zero period becomes a
        finite sequence.
        """
        pre = [int(d) for d in preperiod]
        per = tuple(int(d) for d in period)
        if not per:
            raise SpecParseError("Period must be nonempty")
        per = minimal_period(per)
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = (per[-1],) + per[:-1]
        if per == (0,):
            while pre and pre[-1] == 0:
                pre.pop()
            return cls(tuple(pre), None, alphabet_max, False, verified)
        return cls(tuple(pre), per, alphabet_max, False, verified)

    @classmethod
    def from_function(cls, fn: Callable[[int], int], alphabet_max: AlphabetMax = None) -> "DigitSeq":
        """A sequence whose i-th digit is ``fn(i)``."""
        return cls((), None, alphabet_max, False, True, fn)

    @classmethod
    def from_json(cls, data: dict) -> "DigitSeq":
        """Read ``{"alphabet_max": k, "preperiod": [...], "period": [...] | null}``."""
        amax = data.get("alphabet_max")
        if isinstance(amax, list):
            amax = tuple(amax)
        period = data.get("period")
        if period:
            return cls.periodic(data.get("preperiod", []), period, amax)
        return cls.finite(data.get("preperiod", []), amax, bool(data.get("truncated", False)))

    def to_json(self) -> dict:
        amax = list(self.alphabet_max) if isinstance(self.alphabet_max, tuple) else self.alphabet_max
        data = {
            "alphabet_max": amax,
            "preperiod": list(self.preperiod),
            "period": list(self.period) if self.period else None,
        }
        if self.truncated:
            data["truncated"] = True
        if not self.verified:
            data["verified"] = False
        return data

    @property
    def is_lazy(self) -> bool:
        return self.generator is not None

    @property
    def is_finite(self) -> bool:
        return self.period is None and self.generator is None

    @property
    def is_periodic(self) -> bool:
        return self.period is not None

    @property
    def is_purely_periodic(self) -> bool:
        return self.period is not None and not self.preperiod

    @property
    def is_zero(self) -> bool:
        return self.is_finite and not any(self.preperiod)

    def digit(self, i: int) -> int:
        if i < 0:
            raise IndexError("Digit positions start at 0")
        if self.generator is not None:
            return self.generator(i)
        if i < len(self.preperiod):
            return self.preperiod[i]
        if self.period is None:
            return 0
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(self.digit(i) for i in range(n))

    def __iter__(self) -> Iterator[int]:
        i = 0
        while True:
            yield self.digit(i)
            i += 1

    def __len__(self) -> int:
        """Length of the explicit part (preperiod plus one period)."""
        if self.generator is not None:
            raise TypeError("A generated sequence has no explicit length")
        return len(self.preperiod) + (len(self.period) if self.period else 0)

    def shift(self, k: int = 1) -> "DigitSeq":
        """The sequence with its first ``k`` digits removed."""
        if k == 0:
            return self
        if self.generator is not None:
            fn = self.generator
            return DigitSeq.from_function(lambda i: fn(i + k), self.alphabet_max)
        amax = self.alphabet_max[k:] if isinstance(self.alphabet_max, tuple) else self.alphabet_max
        if k <= len(self.preperiod):
            rest = self.preperiod[k:]
        elif self.period is None:
            rest = ()
        else:
            j = (k - len(self.preperiod)) % len(self.period)
            return DigitSeq((), self.period[j:] + self.period[:j], amax, False, self.verified)
        if self.period is None:
            return DigitSeq(rest, None, amax, self.truncated and bool(rest), self.verified)
        return DigitSeq.periodic(rest, self.period, amax, self.verified)

    def tails(self) -> list["DigitSeq"]:
        """All distinct shifts (the sequence itself included)."""
        if self.generator is not None:
            raise TypeError("A generated sequence has infinitely many tails")
        count = len(self.preperiod) + (len(self.period) if self.period else 1)
        return [self.shift(k) for k in range(count)]

    def complement(self, max_digit: int) -> "DigitSeq":
        """Digitwise ``max_digit - d``."""
        if self.generator is not None:
            fn = self.generator
            return DigitSeq.from_function(lambda i: max_digit - fn(i), self.alphabet_max)
        pre = tuple(max_digit - d for d in self.preperiod)
        if self.truncated:
            return DigitSeq(pre, None, self.alphabet_max, True, self.verified)
        if self.period is None:
            return DigitSeq.periodic(pre, (max_digit,), self.alphabet_max)
        return DigitSeq.periodic(pre, tuple(max_digit - d for d in self.period), self.alphabet_max)

    def check_alphabet(self, depth: int | None = None) -> int | None:
        """First position whose digit leaves the alphabet, or None."""
        if self.alphabet_max is None:
            return None
        n = depth if depth is not None else (len(self) if self.generator is None else 0)
        if isinstance(self.alphabet_max, tuple):
            n = min(n, len(self.alphabet_max))
        for i in range(n):
            bound = self.alphabet_max[i] if isinstance(self.alphabet_max, tuple) else self.alphabet_max
            if not 0 <= self.digit(i) <= bound:
                return i
        return None

    def render(self, n: int | None = None) -> str:
        """``0(100)`` notation, or the first ``n`` digits when ``n`` is given."""
        if n is not None:
            return "".join(_glyph(d) for d in self.prefix(n))
        if self.generator is not None:
            return "".join(_glyph(d) for d in self.prefix(32)) + "..."
        body = "".join(_glyph(d) for d in self.preperiod)
        if self.period:
            body += "(" + "".join(_glyph(d) for d in self.period) + ")"
        if self.truncated:
            body += "..."
        return body

    def __str__(self) -> str:
        return self.render()


def _glyph(d: int) -> str:
    return str(d) if 0 <= d <= 9 else f"<{d}>"


def comparison_depth(u: DigitSeq, v: DigitSeq) -> int | None:
    """Digits needed to compare two explicit sequences exactly, None if unbounded."""
    if u.generator is not None or v.generator is not None:
        return None
    pu = len(u.period) if u.period else 1
    pv = len(v.period) if v.period else 1
    return max(len(u.preperiod), len(v.preperiod)) + math.lcm(pu, pv)


def lex_compare(u: DigitSeq, v: DigitSeq, depth: int | None = None) -> int:
    """
    Lexicographic comparison: -1, 0 or 1.

    Explicit sequences are compared exactly. Generated or truncated operands
    need ``depth``; a tie within it is reported as 0.

    Raises:
        UndecidableAtDepthError: If no finite depth is available.
    """
    exact = comparison_depth(u, v)
    if exact is not None and not (u.truncated or v.truncated):
        n = exact
    elif depth is not None:
        n = depth if exact is None else min(depth, exact)
    else:
        n = _truncated_depth(u, v)
        if n is None:
            raise UndecidableAtDepthError("Comparing generated sequences needs a depth")
    for i in range(n):
        a, b = u.digit(i), v.digit(i)
        if a != b:
            return -1 if a < b else 1
    return 0


def _truncated_depth(u: DigitSeq, v: DigitSeq) -> int | None:
    lengths = [len(s) for s in (u, v) if s.generator is None and s.truncated]
    if lengths and all(s.generator is None for s in (u, v)):
        return min(lengths)
    return None


def parse_digits(text: str, alphabet_max: AlphabetMax = None) -> DigitSeq:
    """
    Parse ``0(100)``-style notation; ``<12>`` writes a digit above 9.

    Raises:
        SpecParseError: On malformed input (position reported).
    """
    pre: list[int] = []
    per: list[int] | None = None
    current = pre
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isdigit():
            current.append(int(ch))
        elif ch == "<":
            end = text.find(">", i)
            if end < 0 or not text[i + 1 : end].isdigit():
                raise SpecParseError(f"Unterminated multi-digit glyph in '{text}'", position=i)
            current.append(int(text[i + 1 : end]))
            i = end
        elif ch == "(" and per is None:
            per = []
            current = per
        elif ch == ")" and per is not None and i == len(text) - 1:
            pass
        else:
            raise SpecParseError(f"Unexpected '{ch}' in digit sequence '{text}'", position=i)
        i += 1
    if per is not None:
        if not text.endswith(")") or not per:
            raise SpecParseError(f"Period in '{text}' must be nonempty and closed", position=len(text))
        return DigitSeq.periodic(pre, per, alphabet_max)
    return DigitSeq.finite(pre, alphabet_max)
