"""Boxes, truncating half-spaces, and the exact counting / volume kernels.

Every region handled here is a finite disjoint union of half-open boxes
``l_i <= x_i < u_i`` whose upper corners may be infinite (stored as ``None``).
Counting is exact integer arithmetic, volumes are exact ``Fraction``s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence

from .errors import ParseError, PreconditionError

# Checked-width contract for exponents and scaled bounds.
INT_CAP = 2**63 - 1

Upper = Optional[int]


def check_width(value: int, what: str = "value") -> int:
    if value > INT_CAP:
        raise OverflowError(f"{what} {value} exceeds the 64-bit exponent cap")
    return value


@dataclass(frozen=True)
class Box:
    lower: tuple[int, ...]
    upper: tuple[Upper, ...]

    @property
    def bounded(self) -> bool:
        return all(u is not None for u in self.upper)

    def size(self) -> Optional[int]:
        """Number of lattice points, or None when the box is unbounded."""
        if not self.bounded:
            return None
        return math.prod(u - l for l, u in zip(self.lower, self.upper))

    def contains(self, x: Sequence[int]) -> bool:
        return all(l <= xi and (u is None or xi < u)
                   for l, u, xi in zip(self.lower, self.upper, x))

    def max_degree(self) -> Optional[int]:
        if not self.bounded:
            return None
        return sum(u - 1 for u in self.upper)

    def top_corner(self) -> tuple[int, ...]:
        return tuple(u - 1 for u in self.upper)

    def to_json(self):
        return {"lower": list(self.lower),
                "upper": [None if u is None else u for u in self.upper]}


@dataclass(frozen=True)
class BoxRegion:
    nvars: int
    boxes: tuple[Box, ...]

    @property
    def bounded(self) -> bool:
        return all(b.bounded for b in self.boxes)

    def count(self) -> Optional[int]:
        """Exact number of lattice points; None if the region is infinite."""
        if not self.bounded:
            return None
        return sum(b.size() for b in self.boxes)

    def contains(self, x: Sequence[int]) -> bool:
        return any(b.contains(x) for b in self.boxes)

    def max_degree(self) -> Optional[int]:
        """Largest total degree of a point in the region (None if unbounded, -1 if empty)."""
        if not self.bounded:
            return None
        return max((b.max_degree() for b in self.boxes), default=-1)

    def __iter__(self):
        return iter(self.boxes)

    def __len__(self):
        return len(self.boxes)


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        raise ParseError(f"refusing float {v!r}; give rationals as 'n/d' strings")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"not a rational number: {v!r}") from exc


@dataclass(frozen=True)
class HalfSpace:
    """Truncating half-space ``{x : a.x < beta}`` for the positive orthant."""

    a: tuple[Fraction, ...]
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(_as_fraction(v) for v in self.a))
        object.__setattr__(self, "beta", _as_fraction(self.beta))
        if not self.a:
            raise PreconditionError("half-space needs at least one coordinate")
        bad = [v for v in self.a if v <= 0]
        if bad:
            raise PreconditionError(
                "direction must be strictly positive on the orthant", witness=bad[0])
        if self.beta <= 0:
            raise PreconditionError("beta must be positive", witness=self.beta)

    @property
    def nvars(self) -> int:
        return len(self.a)

    def integral_form(self) -> tuple[tuple[int, ...], int]:
        """Common-denominator form ``(A, B)`` with ``a.x < beta  <=>  A.x < B``."""
        den = math.lcm(*(v.denominator for v in self.a), self.beta.denominator)
        A = tuple(int(v * den) for v in self.a)
        return A, int(self.beta * den)

    def simplex_volume(self) -> Fraction:
        n = self.nvars
        return self.beta ** n / (math.factorial(n) * math.prod(self.a))

    def scaled(self, factor) -> "HalfSpace":
        return HalfSpace(self.a, self.beta * factor)

    def contains(self, x: Sequence) -> bool:
        return sum(ai * xi for ai, xi in zip(self.a, x)) < self.beta

    @classmethod
    def from_json(cls, obj) -> "HalfSpace":
        try:
            return cls(tuple(obj["a"]), obj["beta"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"half-space JSON needs 'a' and 'beta': {obj!r}") from exc

    def to_json(self):
        return {"a": [str(v) for v in self.a], "beta": str(self.beta)}


# -- lattice point counting -------------------------------------------------

def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """sum_{i=0}^{n-1} floor((a*i + b) / m) for n >= 0, m >= 1, a, b >= 0."""
    ans = 0
    while True:
        if a >= m:
            ans += (n - 1) * n // 2 * (a // m)
            a %= m
        if b >= m:
            ans += n * (b // m)
            b %= m
        y_max = a * n + b
        if y_max < m:
            return ans
        n, b = divmod(y_max, m)
        m, a = a, m


def _count2(a0: int, a1: int, w0: Upper, w1: Upper, T: int) -> int:
    # #{0 <= y0 < w0, 0 <= y1 < w1 : a0*y0 + a1*y1 <= T}
    if T < 0:
        return 0
    m = T // a0
    if w0 is not None:
        m = min(m, w0 - 1)
    if m < 0:
        return 0
    total = 0
    start = 0
    if w1 is not None:
        if w1 <= 0:
            return 0
        slack = T - a1 * (w1 - 1)
        k = min(slack // a0, m) if slack >= 0 else -1
        total += (k + 1) * w1
        start = k + 1
    if start > m:
        return total
    N = m - start + 1
    # substitute y0 = m - j so the numerator grows with j
    total += floor_sum(N, a1, a0, T - a0 * m) + N
    return total


def _count_box(A: Sequence[int], W: Sequence[Upper], T: int) -> int:
    """#{y : 0 <= y_i < W_i, A.y <= T} with A > 0 integral; W_i None means unbounded."""
    if T < 0:
        return 0
    n = len(A)
    if n == 0:
        return 1
    if n == 1:
        top = T // A[0] + 1
        return top if W[0] is None else min(W[0], top)
    if n == 2:
        return _count2(A[0], A[1], W[0], W[1], T)
    m = T // A[0]
    if W[0] is not None:
        m = min(m, W[0] - 1)
    rest_A, rest_W = A[1:], W[1:]
    return sum(_count_box(rest_A, rest_W, T - A[0] * y) for y in range(m + 1))


def count_in_halfspace(region: BoxRegion | Iterable[Box], H: HalfSpace, scale: int = 1) -> int:
    """Exact number of lattice points x of the region with ``a.x < scale * beta``."""
    A, B = H.integral_form()
    if scale < 0:
        raise PreconditionError("scale must be non-negative", witness=scale)
    bound = check_width(B * scale, "scaled half-space bound")
    total = 0
    for box in region:
        if len(box.lower) != len(A):
            raise PreconditionError("box and half-space dimensions differ")
        T = bound - 1 - sum(ai * li for ai, li in zip(A, box.lower))
        W = tuple(None if u is None else u - l for l, u in zip(box.lower, box.upper))
        total += _count_box(A, W, T)
    return total


# -- exact volumes -----------------------------------------------------------

def box_halfspace_volume(box: Box, H: HalfSpace) -> Fraction:
    """Vol({x in [l, u) : a.x < beta}) by vertex inclusion-exclusion.

    Unbounded (or overlong) edges are clipped at beta / a_i first; past that
    plane every point already violates the half-space.
    """
    a, beta = H.a, H.beta
    n = len(a)
    lo = [Fraction(l) for l in box.lower]
    hi = []
    for l, u, ai in zip(lo, box.upper, a):
        cap = beta / ai
        top = cap if u is None else min(Fraction(u), cap)
        if top <= l:
            return Fraction(0)
        hi.append(top)
    acc = Fraction(0)
    for choice in product((0, 1), repeat=n):
        slack = beta - sum(ai * (h if c else l) for ai, l, h, c in zip(a, lo, hi, choice))
        if slack > 0:
            term = slack ** n
            acc += -term if sum(choice) % 2 else term
    return acc / (math.factorial(n) * math.prod(a))


def region_halfspace_volume(region: BoxRegion | Iterable[Box], H: HalfSpace) -> Fraction:
    return sum((box_halfspace_volume(b, H) for b in region), Fraction(0))
