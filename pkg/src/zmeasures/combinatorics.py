"""Young diagrams, signatures, Frobenius coordinates and their embeddings
into the half-integer lattice Z' = Z + 1/2."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from itertools import combinations_with_replacement
from typing import Iterable, Iterator

from .errors import BudgetError, ParameterError


@dataclass(frozen=True)
class YoungDiagram:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise ParameterError("parts must be positive")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ParameterError("parts must be weakly decreasing")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "YoungDiagram":
        return cls(tuple(p for p in parts if p))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def row(self, i: int) -> int:
        """lambda_i with 1-based index, zero past the last row."""
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def transpose(self) -> "YoungDiagram":
        if not self.parts:
            return self
        return YoungDiagram(tuple(sum(1 for p in self.parts if p > j)
                                  for j in range(self.parts[0])))

    def boxes(self) -> Iterator[tuple[int, int]]:
        for i, p in enumerate(self.parts, start=1):
            for j in range(1, p + 1):
                yield i, j


@dataclass(frozen=True)
class FrobeniusCoords:
    d: int
    p: tuple[int, ...]
    q: tuple[int, ...]

    @property
    def p_mod(self) -> tuple[float, ...]:
        return tuple(v + 0.5 for v in self.p)

    @property
    def q_mod(self) -> tuple[float, ...]:
        return tuple(v + 0.5 for v in self.q)


@total_ordering
@dataclass(frozen=True)
class HalfInteger:
    """A point of Z', stored as its doubled (odd) value."""

    twice: int

    def __post_init__(self):
        if self.twice % 2 == 0:
            raise ParameterError(f"{self.twice}/2 is not a half-integer")

    @classmethod
    def of(cls, x) -> "HalfInteger":
        if isinstance(x, HalfInteger):
            return x
        t = Fraction(x) * 2
        if t.denominator != 1 or t.numerator % 2 == 0:
            raise ParameterError(f"{x} is not a half-integer")
        return cls(int(t))

    def __float__(self) -> float:
        return self.twice / 2

    def __lt__(self, other: "HalfInteger") -> bool:
        return self.twice < other.twice

    def __neg__(self) -> "HalfInteger":
        return HalfInteger(-self.twice)

    def __repr__(self) -> str:
        return f"{self.twice}/2"


@dataclass(frozen=True)
class PointSet:
    points: tuple[HalfInteger, ...] = ()

    def __post_init__(self):
        pts = tuple(sorted({HalfInteger.of(p) for p in self.points}))
        if len(pts) != len(self.points):
            raise ParameterError("points must be distinct")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, xs: Iterable) -> "PointSet":
        return cls(tuple(HalfInteger.of(x) for x in xs))

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return HalfInteger.of(x) in set(self.points)

    def floats(self) -> list[float]:
        return [float(p) for p in self.points]

    def symdiff(self, other: "PointSet") -> "PointSet":
        return PointSet(tuple(set(self.points) ^ set(other.points)))


@dataclass(frozen=True)
class Signature:
    entries: tuple[int, ...]

    def __post_init__(self):
        e = tuple(int(v) for v in self.entries)
        if not e:
            raise ParameterError("a signature needs N >= 1 entries")
        if any(e[i] < e[i + 1] for i in range(len(e) - 1)):
            raise ParameterError("signature entries must be weakly decreasing")
        object.__setattr__(self, "entries", e)

    @property
    def N(self) -> int:
        return len(self.entries)

    @property
    def nonnegative(self) -> bool:
        return self.entries[-1] >= 0

    def plus(self) -> YoungDiagram:
        return YoungDiagram(tuple(v for v in self.entries if v > 0))

    def minus(self) -> YoungDiagram:
        return YoungDiagram(tuple(-v for v in reversed(self.entries) if v < 0))

    def reversed_negated(self) -> "Signature":
        return Signature(tuple(-v for v in reversed(self.entries)))


def frobenius(lam: YoungDiagram) -> FrobeniusCoords:
    lt = lam.transpose()
    d = sum(1 for i, p in enumerate(lam.parts, start=1) if p >= i)
    p = tuple(lam.row(i) - i for i in range(1, d + 1))
    q = tuple(lt.row(i) - i for i in range(1, d + 1))
    return FrobeniusCoords(d, p, q)


def from_frobenius(p: Iterable[int], q: Iterable[int]) -> YoungDiagram:
    p, q = list(p), list(q)
    d = len(p)
    rows = [p[i] + i + 1 for i in range(d)]
    # rows below the diagonal block come from the leg lengths
    cols = [q[j] + j + 1 for j in range(d)]
    below = [sum(1 for j in range(d) if cols[j] > i) for i in range(d, max(cols, default=0))]
    return YoungDiagram(tuple(rows + below))


def underline_contains(lam: YoungDiagram, x) -> bool:
    """Whether x = lambda_i - i + 1/2 for some i >= 1."""
    t = HalfInteger.of(x).twice
    # lambda_i - i + 1/2 strictly decreases in i; check the candidate row
    for i in range(1, len(lam) + 2):
        v = 2 * (lam.row(i) - i) + 1
        if v == t:
            return True
        if v < t:
            return False
    # below the last row every point lam_i - i + 1/2 = -i + 1/2 is present
    return t <= 2 * (-(len(lam) + 1)) + 1


def underline_window(lam: YoungDiagram, lo: float, hi: float) -> PointSet:
    """Points of the underline configuration with lo < x < hi."""
    pts = []
    k = math.floor(lo - 0.5) + 1
    while k + 0.5 < hi:
        if k + 0.5 > lo and underline_contains(lam, k + 0.5):
            pts.append(HalfInteger(2 * k + 1))
        k += 1
    return PointSet(tuple(pts))


def window_points(lo: float, hi: float) -> list[float]:
    """Half-integers strictly inside (lo, hi)."""
    k = math.floor(lo - 0.5) + 1
    out = []
    while k + 0.5 < hi:
        if k + 0.5 > lo:
            out.append(k + 0.5)
        k += 1
    return out


def x_config(lam: YoungDiagram) -> PointSet:
    f = frobenius(lam)
    return PointSet.of([v + 0.5 for v in f.p] + [-(v + 0.5) for v in f.q])


def dim_ratio(lam: YoungDiagram) -> float:
    """dim(lambda)/|lambda|! from Frobenius coordinates."""
    f = frobenius(lam)
    num = 1.0
    for i in range(f.d):
        for j in range(i + 1, f.d):
            num *= (f.p[i] - f.p[j]) * (f.q[i] - f.q[j])
    log_den = 0.0
    for i in range(f.d):
        log_den += math.lgamma(f.p[i] + 1) + math.lgamma(f.q[i] + 1)
        for j in range(f.d):
            log_den += math.log(f.p[i] + f.q[j] + 1)
    return num * math.exp(-log_den)


def dim_ratio_rows(lam: YoungDiagram) -> float:
    """dim(lambda)/|lambda|! from the row-length product formula."""
    k = len(lam)
    out = 0.0
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            out += math.log(lam.row(i) - lam.row(j) + j - i)
        out -= math.lgamma(lam.row(i) + k - i + 1)
    return math.exp(out)


def pochhammer_lambda(zc: complex, lam: YoungDiagram) -> complex:
    """(z)_lambda as the product of z + content over the boxes."""
    out = 1 + 0j
    for i, j in lam.boxes():
        out *= zc + j - i
    return out


def pochhammer_lambda_rows(zc: complex, lam: YoungDiagram) -> complex:
    out = 1 + 0j
    for i, p in enumerate(lam.parts, start=1):
        for k in range(p):
            out *= zc - i + 1 + k
    return out


def _partitions(n: int, cap: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, cap), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def enum_partitions(n: int) -> list[YoungDiagram]:
    if n < 0:
        raise ParameterError("n must be nonnegative")
    if n > 60:
        raise BudgetError("partition enumeration is capped at n = 60")
    return [YoungDiagram(p) for p in _partitions(n, n)]


def enum_signatures(N: int, L: int, nonneg: bool = False) -> list[Signature]:
    if N < 1 or L < 0:
        raise ParameterError("need N >= 1 and L >= 0")
    values = range(0, L + 1) if nonneg else range(-L, L + 1)
    if len(values) ** N > 10**7:
        raise BudgetError("signature enumeration exceeds 1e7 candidates")
    return [Signature(tuple(sorted(c, reverse=True)))
            for c in combinations_with_replacement(values, N)]


def signature_underline(lam: Signature) -> PointSet:
    return PointSet.of([v - i + 0.5 for i, v in enumerate(lam.entries, start=1)])


def signature_x_config(lam: Signature) -> PointSet:
    N = lam.N
    fp = frobenius(lam.plus())
    fm = frobenius(lam.minus())
    pts = [v + 0.5 for v in fp.p] + [-v - 0.5 for v in fp.q]
    pts += [-v - N - 0.5 for v in fm.p] + [v - N + 0.5 for v in fm.q]
    return PointSet.of(pts)


def vacuum_block(N: int) -> PointSet:
    """{-1/2, ..., -N+1/2}."""
    return PointSet.of([-k - 0.5 for k in range(N)])
