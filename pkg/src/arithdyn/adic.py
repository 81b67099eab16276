"""
Markov compacta and the adic (Vershik) transformation.

A Markov compactum is a space of digit paths (x_1, x_2, ...) where level k has
alphabet {0, ..., r_k - 1} carrying its own total order, and consecutive
digits must satisfy a 0-1 incidence matrix M^(k)[x_k, x_{k+1}] = 1. Two paths
are comparable when they agree from some level on; the adic transformation
sends a path to its immediate successor in that order.

Paths are handled as finite prefixes: a carry escaping the prefix is reported
as ``Extremal.MAXIMAL`` (or ``MINIMAL`` going backwards) and the caller may
deepen the prefix.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cache, cached_property
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import InadmissibleError, OutOfRangeError, SpecParseError

logger = logging.getLogger(__name__)


class Extremal(str, Enum):
    """Sentinels for paths with no successor (or predecessor) within depth."""

    MAXIMAL = "Maximal"
    MINIMAL = "Minimal"


@dataclass(frozen=True)
class Level:
    """Alphabet size of a level and its order, listed from least to greatest."""

    size: int
    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(self.size)):
            raise SpecParseError(
                f"Level order {self.order} is not a permutation of 0..{self.size - 1}"
            )

    @classmethod
    def natural(cls, size: int) -> "Level":
        return cls(size, tuple(range(size)))

    @classmethod
    def descending(cls, size: int) -> "Level":
        return cls(size, tuple(range(size - 1, -1, -1)))

    @cached_property
    def ranks(self) -> dict[int, int]:
        return {d: i for i, d in enumerate(self.order)}

    def rank(self, digit: int) -> int:
        return self.ranks[digit]


def _at(values: Sequence, k: int):
    """Entry for level k (1-based); the last entry repeats past the end."""
    return values[min(k, len(values)) - 1]


@dataclass(frozen=True)
class MarkovCompactum:
    """A (possibly non-stationary) Markov compactum with per-level orders.

    ``level_fn(k)`` and ``incidence_fn(k)`` describe level k >= 1; the
    incidence matrix has shape r_k x r_{k+1}. Both are memoized. ``spec``
    keeps the JSON description for compacta that have one.
    """

    level_fn: Callable[[int], Level]
    incidence_fn: Callable[[int], np.ndarray]
    stationary: bool = False
    name: str = "custom"
    spec: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "level_fn", cache(self.level_fn))
        object.__setattr__(self, "incidence_fn", cache(self.incidence_fn))

    @classmethod
    def stationary_from(
        cls,
        matrix,
        order: Sequence[int] | None = None,
        name: str = "stationary",
    ) -> "MarkovCompactum":
        """The same square incidence matrix and order at every level."""
        m = np.asarray(matrix, dtype=np.int8)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SpecParseError(f"A stationary compactum needs a square matrix, got shape {m.shape}")
        level = Level(m.shape[0], tuple(order) if order is not None else tuple(range(m.shape[0])))
        spec = {"kind": "stationary", "matrix": m.tolist(), "order": list(level.order)}
        compactum = cls(lambda k: level, lambda k: m, True, name, spec)
        compactum.validate(2)
        return compactum

    @classmethod
    def full_odometer(cls, radices: Sequence[int]) -> "MarkovCompactum":
        """All-ones incidence with natural orders; successor is N -> N + 1."""
        radices = tuple(int(r) for r in radices)
        if not radices or any(r < 1 for r in radices):
            raise OutOfRangeError(f"Radices must be positive, got {radices}", value=radices)

        def incidence(k: int) -> np.ndarray:
            return np.ones((_at(radices, k), _at(radices, k + 1)), dtype=np.int8)

        return cls(
            lambda k: Level.natural(_at(radices, k)),
            incidence,
            len(set(radices)) == 1,
            "odometer",
            {"kind": "odometer", "radices": list(radices)},
        )

    @classmethod
    def golden(cls) -> "MarkovCompactum":
        """Paths with no two consecutive 1s, natural order (Zeckendorf counting)."""
        compactum = cls.stationary_from([[1, 1], [1, 0]], name="golden")
        object.__setattr__(compactum, "spec", {"kind": "golden"})
        return compactum

    @classmethod
    def from_levels(
        cls,
        sizes: Sequence[int],
        matrices: Sequence,
        orders: Sequence[Sequence[int]] | None = None,
    ) -> "MarkovCompactum":
        """
        Explicit levels; the last size, matrix and order repeat past the end.

        Raises:
            SpecParseError: If the shapes do not chain or a state is dead.
        """
        sizes = tuple(int(s) for s in sizes)
        mats = tuple(np.asarray(m, dtype=np.int8) for m in matrices)
        if not sizes or not mats:
            raise SpecParseError("A compactum needs at least one level and one matrix")
        if orders:
            levels = tuple(Level(s, tuple(o)) for s, o in zip(sizes, orders))
            if len(levels) != len(sizes):
                raise SpecParseError("One order is needed per level")
        else:
            levels = tuple(Level.natural(s) for s in sizes)
        spec = {
            "kind": "levels",
            "sizes": list(sizes),
            "incidence": [m.tolist() for m in mats],
            "orders": [list(level.order) for level in levels],
        }
        compactum = cls(lambda k: _at(levels, k), lambda k: _at(mats, k), False, "levels", spec)
        compactum.validate(max(len(sizes), len(mats)) + 1)
        return compactum

    @classmethod
    def from_json(cls, data: dict) -> "MarkovCompactum":
        """Build from the description written by ``to_json``."""
        kind = data.get("kind", "levels")
        try:
            if kind == "golden":
                return cls.golden()
            if kind == "odometer":
                return cls.full_odometer(data["radices"])
            if kind == "stationary":
                return cls.stationary_from(data["matrix"], data.get("order"))
            if kind == "levels":
                return cls.from_levels(data["sizes"], data["incidence"], data.get("orders"))
        except KeyError as e:
            raise SpecParseError(f"Compactum description lacks field {e}") from e
        raise SpecParseError(f"Unknown compactum kind '{kind}'")

    def to_json(self) -> dict:
        if self.spec is None:
            raise SpecParseError(f"The {self.name} compactum has no JSON description")
        return dict(self.spec)

    def level(self, k: int) -> Level:
        if k < 1:
            raise IndexError("Levels start at 1")
        return self.level_fn(k)

    def incidence(self, k: int) -> np.ndarray:
        if k < 1:
            raise IndexError("Levels start at 1")
        return self.incidence_fn(k)

    def allowed(self, k: int, digit: int, above: int) -> bool:
        """Whether x_k = digit may be followed by x_{k+1} = above."""
        return bool(self.incidence(k)[digit, above])

    def validate(self, depth: int) -> None:
        """
        Check shapes and dead states on levels 1..depth.

        Raises:
            SpecParseError: On a shape mismatch or an all-zero row or column.
        """
        for k in range(1, depth + 1):
            m = self.incidence(k)
            expected = (self.level(k).size, self.level(k + 1).size)
            if m.shape != expected:
                raise SpecParseError(f"Incidence matrix {k} has shape {m.shape}, expected {expected}")
            if not m.any(axis=1).all():
                raise SpecParseError(f"Incidence matrix {k} has a dead row")
            if not m.any(axis=0).all():
                raise SpecParseError(f"Incidence matrix {k} has a dead column")


@dataclass(frozen=True)
class AdicPath:
    """A finite prefix (x_1, ..., x_depth) of a compactum path."""

    digits: tuple[int, ...]

    @classmethod
    def zero(cls, depth: int) -> "AdicPath":
        return cls((0,) * depth)

    @property
    def depth(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return "(" + ",".join(str(d) for d in self.digits) + ")"


Step = Union[AdicPath, Extremal]


def check_path(path: AdicPath, compactum: MarkovCompactum) -> None:
    """
    Raises:
        InadmissibleError: At the first digit outside its alphabet or
            breaking the incidence with the next digit.
    """
    x = path.digits
    for i, d in enumerate(x):
        if not 0 <= d < compactum.level(i + 1).size:
            raise InadmissibleError(f"Digit {d} at level {i + 1} is outside the alphabet", position=i)
        if i + 1 < len(x) and not compactum.allowed(i + 1, d, x[i + 1]):
            raise InadmissibleError(
                f"Digits {d},{x[i + 1]} at levels {i + 1},{i + 2} break the incidence rule",
                position=i,
            )


def _fill(x: list[int], top: int, compactum: MarkovCompactum, minimal: bool) -> None:
    """Reset levels 1..top to the extremal filler below level top + 1."""
    for k in range(top, 0, -1):
        order = compactum.level(k).order
        candidates = order if minimal else reversed(order)
        x[k - 1] = next(d for d in candidates if compactum.allowed(k, d, x[k]))


def _step(path: AdicPath, compactum: MarkovCompactum, forward: bool) -> Step:
    check_path(path, compactum)
    x = list(path.digits)
    for n in range(1, len(x) + 1):
        level = compactum.level(n)
        rank = level.rank(x[n - 1])
        if forward:
            candidates = level.order[rank + 1 :]
        else:
            candidates = level.order[:rank][::-1]
        for y in candidates:
            if n == len(x) or compactum.allowed(n, y, x[n]):
                x[n - 1] = y
                _fill(x, n - 1, compactum, minimal=forward)
                return AdicPath(tuple(x))
    return Extremal.MAXIMAL if forward else Extremal.MINIMAL


def successor(path: AdicPath, compactum: MarkovCompactum) -> Step:
    """
    Immediate successor in the adic order.

    The lowest level whose digit can be raised compatibly with the level
    above is raised to the least such digit, and the levels below it take
    the minimal filler.

    Returns:
        The next path, or ``Extremal.MAXIMAL`` if the carry leaves the prefix.

    Raises:
        InadmissibleError: If ``path`` is not admissible.
    """
    return _step(path, compactum, forward=True)


def predecessor(path: AdicPath, compactum: MarkovCompactum) -> Step:
    """Immediate predecessor, or ``Extremal.MINIMAL``; mirror of ``successor``."""
    return _step(path, compactum, forward=False)


class AdicOrbit(NamedTuple):
    paths: list[AdicPath]
    stopped: Optional[Extremal]


def iterate(path: AdicPath, compactum: MarkovCompactum, steps: int) -> AdicOrbit:
    """Apply the transformation ``steps`` times (its inverse when negative)."""
    paths = [path]
    move = successor if steps >= 0 else predecessor
    for _ in range(abs(steps)):
        nxt = move(paths[-1], compactum)
        if isinstance(nxt, Extremal):
            return AdicOrbit(paths, nxt)
        paths.append(nxt)
    return AdicOrbit(paths, None)


def mixed_radix(n: int, radices: Sequence[int]) -> tuple[int, ...]:
    """Little-endian digits of n in the mixed radix system."""
    digits = []
    for r in radices:
        n, d = divmod(n, r)
        digits.append(d)
    if n:
        raise OutOfRangeError(f"Radices {tuple(radices)} cannot hold the value", value=n)
    return tuple(digits)


def odometer_equivalence_check(radices: Sequence[int], n_max: int) -> bool:
    """
    Whether N successor steps from the zero path give the mixed-radix
    encoding of N, for every N <= n_max.

    Raises:
        OutOfRangeError: If the radices cannot hold ``n_max``.
    """
    radices = tuple(int(r) for r in radices)
    if n_max >= math.prod(radices):
        raise OutOfRangeError(
            f"Radices {radices} hold only {math.prod(radices)} values",
            value=n_max,
            interval=(0, math.prod(radices) - 1),
        )
    compactum = MarkovCompactum.full_odometer(radices)
    path: Step = AdicPath.zero(len(radices))
    for n in range(n_max + 1):
        if isinstance(path, Extremal) or path.digits != mixed_radix(n, radices):
            logger.debug("Odometer disagrees with mixed radix at N=%d: %s", n, path)
            return False
        if n < n_max:
            path = successor(path, compactum)
    return True


def sample_path(compactum: MarkovCompactum, depth: int, rng: np.random.Generator) -> AdicPath:
    """A uniformly stepped random admissible prefix (x_{k+1} among the allowed followers of x_k)."""
    x = [int(rng.integers(compactum.level(1).size))]
    for k in range(1, depth):
        followers = np.flatnonzero(compactum.incidence(k)[x[-1]])
        x.append(int(rng.choice(followers)))
    return AdicPath(tuple(x))
