"""
Counting representations: golden-ratio word classes and branching trees.

Two 0-1 words of the same length are equivalent when sum w_k G^-k agrees,
G the golden ratio. Classes are counted exactly with a carry automaton over
Z[G]; the block decomposition gives the same counts as p_r + q_r from a
continued fraction.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import prod
from typing import NamedTuple, Optional

import numpy as np

from .beta_core import Beta
from .digits import DigitSeq
from .errors import (
    BlockResidualError,
    InadmissibleError,
    OutOfRangeError,
    SpecParseError,
    UndecidableAtDepthError,
)

logger = logging.getLogger(__name__)

PHI = (1 + 5**0.5) / 2

P_A = np.array([[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]], dtype=object)
P_B = np.array([[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(1, 2)]], dtype=object)
P_C = np.array([[Fraction(1), Fraction(0)], [Fraction(1), Fraction(1)]], dtype=object)
COUNT_MATRICES = {"a": P_A, "b": P_B, "c": P_C}

# Prefix code a -> 00, b -> 010, c -> 10
G_CODE = {"a": "00", "b": "010", "c": "10"}

BLOCK_PATTERN = re.compile(r"1(?:0[01])*00")
MAX_EXPLORE_DEPTH = 40
DEFAULT_MAX_NODES = 100_000


def _check_bits(word: str) -> list[int]:
    for i, ch in enumerate(word):
        if ch not in "01":
            raise SpecParseError(f"Word '{word}' has a non-binary symbol at {i}", position=i)
    return [int(ch) for ch in word]


# Carries are pairs (x, y) standing for x + y*G
Carry = tuple[int, int]


def _times_golden_plus(c: Carry, d: int) -> Carry:
    x, y = c
    return (y + d, x + y)


@cache
def _carry_states() -> tuple[Carry, ...]:
    """Carries reachable from 0 that can still return to 0."""
    reachable = {(0, 0)}
    frontier = [(0, 0)]
    edges: dict[Carry, set[Carry]] = {}
    while frontier:
        c = frontier.pop()
        for d in (-1, 0, 1):
            n = _times_golden_plus(c, d)
            if abs(n[0] + n[1] * PHI) <= PHI + 1e-9:
                edges.setdefault(c, set()).add(n)
                if n not in reachable:
                    reachable.add(n)
                    frontier.append(n)
    live = {(0, 0)}
    changed = True
    while changed:
        changed = False
        for c in reachable - live:
            if edges.get(c, set()) & live:
                live.add(c)
                changed = True
    return tuple(sorted(live))


@cache
def _carry_matrices() -> dict[int, np.ndarray]:
    """Transfer matrix per digit of w: entry [s, t] counts digits v moving carry s to t."""
    states = _carry_states()
    index = {c: i for i, c in enumerate(states)}
    matrices = {}
    for w in (0, 1):
        m = np.zeros((len(states), len(states)), dtype=object)
        for c in states:
            for v in (0, 1):
                n = _times_golden_plus(c, v - w)
                if n in index:
                    m[index[c], index[n]] += 1
        matrices[w] = m
    return matrices


def count_equivalent_words(word: str, strict: bool = False) -> int:
    """
    Number of 0-1 words of the same length with the same golden-ratio value.

    Args:
        word: The word as a string of 0s and 1s.
        strict: Reject words containing "11".

    Raises:
        SpecParseError: On a non-binary symbol, or on "11" in strict mode
            (position of the first such pair).
    """
    bits = _check_bits(word)
    if strict and "11" in word:
        pos = word.index("11")
        raise SpecParseError(f"Word '{word}' is not golden-admissible at {pos}", position=pos)
    states = _carry_states()
    zero = states.index((0, 0))
    matrices = _carry_matrices()
    vector = np.zeros(len(states), dtype=object)
    vector[zero] = 1
    for b in bits:
        vector = vector.dot(matrices[b])
    return int(vector[zero])


def _golden_powers(n: int) -> np.ndarray:
    """Coordinates (x, y) of G^-k, k = 1..n, in the basis 1, G."""
    rows = []
    x, y = 1, 0
    for _ in range(n):
        x, y = y - x, x
        rows.append((x, y))
    return np.array(rows, dtype=np.int64).reshape(n, 2)


def brute_force_count(word: str) -> int:
    """Count equivalent words by enumerating every 0-1 word of that length."""
    bits = _check_bits(word)
    n = len(bits)
    if n == 0:
        return 1
    if n > 24:
        raise OutOfRangeError("Brute force is limited to words of length 24", value=n)
    powers = _golden_powers(n)
    shifts = np.arange(n - 1, -1, -1)
    words = (np.arange(2**n)[:, None] >> shifts) & 1
    values = words @ powers
    target = np.array(bits, dtype=np.int64) @ powers
    return int(np.all(values == target, axis=1).sum())


def brute_force_classes(n: int) -> dict[tuple[int, int], int]:
    """Sizes of all equivalence classes of length-n words, keyed by value."""
    powers = _golden_powers(n)
    shifts = np.arange(n - 1, -1, -1)
    words = (np.arange(2**n)[:, None] >> shifts) & 1
    values, counts = np.unique(words @ powers, axis=0, return_counts=True)
    return {(int(v[0]), int(v[1])): int(c) for v, c in zip(values, counts)}


def g_decode(word: str) -> str:
    """
    Split a word into the codewords 00, 010, 10 and return the letters.

    Raises:
        SpecParseError: If the word does not split (position reported).
    """
    _check_bits(word)
    letters = []
    i = 0
    while i < len(word):
        for letter, code in G_CODE.items():
            if word.startswith(code, i):
                letters.append(letter)
                i += len(code)
                break
        else:
            raise SpecParseError(f"Word '{word}' does not decode at {i}", position=i)
    return "".join(letters)


def g_product(word: str) -> Fraction:
    """(1 0) P_j1 ... P_jm (1 0)^T over the letters of ``g_decode(word)``."""
    m = np.array([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]], dtype=object)
    for letter in g_decode(word):
        m = m.dot(COUNT_MATRICES[letter])
    return m[0, 0]


@dataclass(frozen=True)
class Block:
    """A golden-ratio block B(a_1, ..., a_r).

    Odd r renders as 1(00)^a1 (01)^a2 ... (00)^ar, even r as
    1(01)^a1 (00)^a2 ... (00)^ar; both end in a run of 00 pairs.
    """

    params: tuple[int, ...]

    def __post_init__(self):
        if not self.params or any(a < 1 for a in self.params):
            raise OutOfRangeError(f"Block parameters must be positive, got {self.params}")

    @property
    def variant(self) -> str:
        return "00-first" if len(self.params) % 2 else "01-first"

    def runs(self) -> list[tuple[str, int]]:
        """(pair, repeat) from last to first, alternating 00 and 01."""
        out = []
        for k, a in enumerate(reversed(self.params)):
            out.append(("00" if k % 2 == 0 else "01", a))
        return list(reversed(out))

    def render(self) -> str:
        return "1" + "".join(pair * a for pair, a in self.runs())

    def __len__(self) -> int:
        return 1 + 2 * sum(self.params)

    @classmethod
    def parse(cls, word: str) -> "Block":
        """
        Read a block from its word.

        Raises:
            SpecParseError: If the word is not a single block.
        """
        if not BLOCK_PATTERN.fullmatch(word):
            raise SpecParseError(f"'{word}' is not a block", position=0)
        pairs = [word[i : i + 2] for i in range(1, len(word), 2)]
        params: list[int] = []
        prev = None
        for pair in pairs:
            if pair == prev:
                params[-1] += 1
            else:
                params.append(1)
                prev = pair
        return cls(tuple(params))

    def __str__(self) -> str:
        return f"B({', '.join(map(str, self.params))})"


def convergent(params) -> tuple[int, int]:
    """(p, q) with p/q = 1/(a_1 + 1/(a_2 + ...))."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in params:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


def count_block(block: Block) -> int:
    """Size of the class of a block, p_r + q_r."""
    p, q = convergent(block.params)
    return p + q


def block_matrix_count(block: Block) -> int:
    """The block count as (1 1) P_c^.. P_a^a_r (0 1)^T, the last factor P_a."""
    m = np.array([[1, 0], [0, 1]], dtype=object)
    for pair, a in block.runs():
        factor = P_A if pair == "00" else P_C
        for _ in range(a):
            m = m.dot(factor)
    return int(np.array([1, 1], dtype=object).dot(m).dot(np.array([0, 1], dtype=object)))


class BlockSplit(NamedTuple):
    leading_zeros: int
    blocks: list[Block]
    residual: str


def split_blocks(word: str) -> BlockSplit:
    """Leading zeros, then maximal consecutive blocks, then whatever remains."""
    _check_bits(word)
    i = len(word) - len(word.lstrip("0"))
    lead = i
    blocks = []
    while i < len(word):
        m = BLOCK_PATTERN.match(word, i)
        if m is None:
            break
        blocks.append(Block.parse(m.group()))
        i = m.end()
    return BlockSplit(lead, blocks, word[i:])


def blockwise_multiplicativity_check(word: str) -> bool:
    """
    Compare the class size of a word with the product over its blocks.

    Raises:
        BlockResidualError: If the word leaves a non-block suffix.
    """
    split = split_blocks(word)
    if split.residual:
        raise BlockResidualError(
            f"'{word}' leaves the non-block suffix '{split.residual}'", residual=split.residual
        )
    expected = prod(count_block(b) for b in split.blocks)
    actual = count_equivalent_words(word)
    if actual != expected:
        logger.warning("Class size %d of '%s' differs from block product %d", actual, word, expected)
    return actual == expected


def goldenshift(eps: DigitSeq, depth: int = 256) -> DigitSeq:
    """
    Shift a golden-admissible sequence past its first block.

    Raises:
        InadmissibleError: If the sequence starts with 0 or contains "11".
        UndecidableAtDepthError: If the first block does not end within ``depth``.
    """
    if eps.digit(0) != 1:
        raise InadmissibleError("Sequence must start with 1", position=0)
    prev = 1
    i = 1
    while i + 1 < depth:
        pair = (eps.digit(i), eps.digit(i + 1))
        for k, d in enumerate(pair):
            if d not in (0, 1):
                raise InadmissibleError(f"Digit {d} is not binary", position=i + k)
            if d == 1 and prev == 1:
                raise InadmissibleError("Sequence contains 11", position=i + k)
            prev = d
        if pair[0] == 1:
            return eps.shift(i)
        i += 2
    raise UndecidableAtDepthError(f"No complete first block within {depth} digits", depth=depth)


class ExploreSummary(NamedTuple):
    paths: int
    choice_nodes: int
    distinct_prefixes: list[int]
    capped: bool
    prefixes: Optional[list[tuple[int, ...]]] = None


def _check_explore(beta: Beta, q: int, depth: int):
    b = beta.approx()
    if not 1 < b < 2:
        raise OutOfRangeError("Exploration needs 1 < beta < 2", value=b, interval=(1, 2))
    if q < 2:
        raise OutOfRangeError("Alphabet size must be at least 2", value=q)
    if not 1 <= depth <= MAX_EXPLORE_DEPTH:
        raise OutOfRangeError(f"Depth must be in [1, {MAX_EXPLORE_DEPTH}]", value=depth)


def branching_explore(
    x,
    beta: Beta,
    q: int = 2,
    depth: int = 20,
    max_nodes: int = DEFAULT_MAX_NODES,
    keep_prefixes: bool = False,
) -> ExploreSummary:
    """
    Explore every representation of x with digits 0..q-1 to ``depth``.

    A digit d is allowed when the remainder beta*r - d stays in
    [0, (q - 1)/(beta - 1)]. Equal remainders are merged, so ``paths`` and
    the per-level prefix counts are exact big integers.

    Raises:
        OutOfRangeError: If x is not representable or the parameters are out of range.
    """
    _check_explore(beta, q, depth)
    beta, (x,) = beta.prepare(x)
    b = beta.value
    top = (q - 1) / (b - 1)
    if x < 0 or x > top:
        raise OutOfRangeError("x has no representation with these digits", value=x)

    level: dict = {x: (1, [()] if keep_prefixes else None)}
    distinct = [1]
    choice_nodes = 0
    capped = False
    for k in range(depth):
        nxt: dict = {}
        for r, (count, prefixes) in level.items():
            z = b * r
            children = [d for d in range(q) if 0 <= z - d <= top]
            if len(children) > 1:
                choice_nodes += count
            for d in children:
                key = z - d
                old_count, old_prefixes = nxt.get(key, (0, [] if keep_prefixes else None))
                new_prefixes = None
                if keep_prefixes:
                    new_prefixes = old_prefixes + [p + (d,) for p in prefixes]
                nxt[key] = (old_count + count, new_prefixes)
        level = nxt
        distinct.append(sum(c for c, _ in level.values()))
        if len(level) > max_nodes:
            logger.warning("Exploration capped at depth %d with %d states", k + 1, len(level))
            capped = True
            break
    prefixes = None
    if keep_prefixes:
        prefixes = sorted(p for _, ps in level.values() for p in ps)
    return ExploreSummary(distinct[-1], choice_nodes, distinct, capped, prefixes)


def first_choice_depth(x, beta: Beta, q: int = 2, depth: int = 60) -> Optional[int]:
    """Depth (from 1) of the first step offering two digits, following the forced path."""
    beta, (x,) = beta.prepare(x)
    b = beta.value
    top = (q - 1) / (b - 1)
    r = x
    for k in range(1, depth + 1):
        z = b * r
        children = [d for d in range(q) if 0 <= z - d <= top]
        if len(children) > 1:
            return k
        if not children:
            return None
        r = z - children[0]
    return None
