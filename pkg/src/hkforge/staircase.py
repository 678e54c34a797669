"""Monomial ideals of k[x_1..x_n], char p, as staircases in N^n.

An ideal is stored as its minimal generating exponents, sorted
lexicographically, so two ideals are equal exactly when their
representations are.  The unit ideal is ``{(0,...,0)}``, the zero ideal has
no generators.

Complements and relative differences ``S(J) \\ S(I)`` are decomposed into
disjoint half-open boxes by slicing on the last coordinate at the distinct
generator values; everything numeric (colengths, p(c) checks, half-space
counts, volumes) runs on those boxes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import combinations_with_replacement
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch, InclusionError, PreconditionError
from .geometry import Box, BoxRegion, HalfSpace, check_width, count_in_halfspace

Exponent = tuple[int, ...]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class Ring:
    """k[x_1..x_n] over a field of characteristic ``p``."""

    p: int
    var_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "var_names", tuple(self.var_names))
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise PreconditionError(f"characteristic must be prime, got {self.p!r}")
        if not self.var_names:
            raise PreconditionError("need at least one variable")
        if len(set(self.var_names)) != len(self.var_names):
            raise PreconditionError("variable names must be distinct", witness=self.var_names)

    @classmethod
    def standard(cls, p: int, nvars: int) -> "Ring":
        names = ("x", "y", "z", "w") if nvars <= 4 else tuple(f"x{i + 1}" for i in range(nvars))
        return cls(p, names[:nvars])

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    @property
    def dim(self) -> int:
        return len(self.var_names)

    def q(self, e: int) -> int:
        if e < 0:
            raise PreconditionError("Frobenius exponent must be >= 0", witness=e)
        return self.p ** e

    def log_p(self, q: int) -> int:
        """e with p**e == q, or PreconditionError."""
        if q < 1:
            raise PreconditionError(f"{q} is not a power of {self.p}", witness=q)
        e = 0
        while q % self.p == 0:
            q //= self.p
            e += 1
        if q != 1:
            raise PreconditionError(f"not a power of p={self.p}", witness=q)
        return e

    def zero(self) -> "MonomialIdeal":
        return MonomialIdeal(self, ())

    def unit(self) -> "MonomialIdeal":
        return MonomialIdeal(self, ((0,) * self.nvars,))

    def maximal(self) -> "MonomialIdeal":
        n = self.nvars
        return make_ideal(self, [tuple(int(i == j) for j in range(n)) for i in range(n)])

    def m_power(self, k: int) -> "MonomialIdeal":
        """(x_1,...,x_n)^k with every degree-k monomial as a generator."""
        return m_power(self, k)


def _divides(g: Sequence[int], e: Sequence[int]) -> bool:
    return all(gi <= ei for gi, ei in zip(g, e))


def minimalize(gens: Iterable[Exponent]) -> tuple[Exponent, ...]:
    """Drop dominated exponents; return the antichain in lexicographic order."""
    # a generator can only be divided by one of no larger total degree
    ordered = sorted(set(gens), key=lambda g: (sum(g), g))
    kept: list[Exponent] = []
    for g in ordered:
        if not any(_divides(h, g) for h in kept):
            kept.append(g)
    return tuple(sorted(kept))


@dataclass(frozen=True)
class MonomialIdeal:
    ring: Ring
    gens: tuple[Exponent, ...]
    _boxes: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    @property
    def is_zero(self) -> bool:
        return not self.gens

    @property
    def is_unit(self) -> bool:
        return self.gens == ((0,) * self.nvars,)

    def __contains__(self, e) -> bool:
        return contains_monomial(self, e)

    def __le__(self, other: "MonomialIdeal") -> bool:
        return is_subset(self, other)

    def __add__(self, other):
        return ideal_sum(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def max_degree_gen(self) -> int:
        return max((sum(g) for g in self.gens), default=0)

    def to_json(self) -> dict:
        return {"p": self.ring.p, "vars": list(self.ring.var_names),
                "gens": [list(g) for g in self.gens]}

    def __str__(self) -> str:
        return format_ideal(self)


def format_monomial(names: Sequence[str], e: Sequence[int]) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts) if parts else "1"


def format_ideal(I: MonomialIdeal) -> str:
    if I.is_zero:
        return "(0)"
    return "(" + ", ".join(format_monomial(I.ring.var_names, g) for g in I.gens) + ")"


def _check_exponent(ring: Ring, e) -> Exponent:
    e = tuple(e)
    if len(e) != ring.nvars:
        raise DimensionMismatch(
            f"exponent {e} has length {len(e)}, ring has {ring.nvars} variables", witness=e)
    for c in e:
        if not isinstance(c, int) or isinstance(c, bool) or c < 0:
            raise PreconditionError(f"exponent coordinates must be non-negative integers: {e}",
                                    witness=e)
        check_width(c, "exponent")
    return e


def make_ideal(ring: Ring, raw_gens: Iterable[Sequence[int]]) -> MonomialIdeal:
    gens = [_check_exponent(ring, g) for g in raw_gens]
    return MonomialIdeal(ring, minimalize(gens))


def m_power(ring: Ring, k: int) -> MonomialIdeal:
    n = ring.nvars
    if k < 0:
        raise PreconditionError("power must be >= 0", witness=k)
    gens = []
    for combo in combinations_with_replacement(range(n), k):
        e = [0] * n
        for i in combo:
            e[i] += 1
        gens.append(tuple(e))
    return MonomialIdeal(ring, tuple(sorted(gens)))


def _same_ring(I: MonomialIdeal, J: MonomialIdeal):
    if I.ring.nvars != J.ring.nvars:
        raise DimensionMismatch(f"ideals live in {I.nvars} and {J.nvars} variables")
    if I.ring != J.ring:
        raise DimensionMismatch("ideals belong to different rings")


def contains_monomial(I: MonomialIdeal, e: Sequence[int]) -> bool:
    e = tuple(e)
    if len(e) != I.nvars:
        raise DimensionMismatch(f"exponent {e} does not match {I.nvars} variables", witness=e)
    return any(_divides(g, e) for g in I.gens)


def non_member(I: MonomialIdeal, J: MonomialIdeal) -> Optional[Exponent]:
    """First generator of I outside J, or None when I is contained in J."""
    _same_ring(I, J)
    for g in I.gens:
        if not contains_monomial(J, g):
            return g
    return None


def is_subset(I: MonomialIdeal, J: MonomialIdeal) -> bool:
    return non_member(I, J) is None


def ideal_sum(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    _same_ring(I, J)
    return MonomialIdeal(I.ring, minimalize(I.gens + J.gens))


def _lcm(g: Exponent, h: Exponent) -> Exponent:
    return tuple(max(a, b) for a, b in zip(g, h))


def intersect(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    _same_ring(I, J)
    return MonomialIdeal(I.ring, minimalize(_lcm(g, h) for g in I.gens for h in J.gens))


def colon_monomial(I: MonomialIdeal, w: Sequence[int]) -> MonomialIdeal:
    """I : x^w."""
    return MonomialIdeal(
        I.ring, minimalize(tuple(max(gi - wi, 0) for gi, wi in zip(g, w)) for g in I.gens))


def colon(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    """I : J as the intersection of I : x^w over the generators w of J."""
    _same_ring(I, J)
    if J.is_zero:
        return I.ring.unit()
    return reduce(intersect, (colon_monomial(I, w) for w in J.gens))


def monomial_multiple(I: MonomialIdeal, w: Sequence[int]) -> MonomialIdeal:
    """x^w * I."""
    w = _check_exponent(I.ring, w)
    return MonomialIdeal(I.ring, tuple(sorted(
        tuple(check_width(a + b, "exponent") for a, b in zip(g, w)) for g in I.gens)))


def bracket_power(I: MonomialIdeal, q: int) -> MonomialIdeal:
    """I^[q]: every generator exponent scaled by q (q must be a power of p)."""
    I.ring.log_p(q)
    if q == 1:
        return I
    gens = tuple(tuple(check_width(c * q, "exponent") for c in g) for g in I.gens)
    return MonomialIdeal(I.ring, gens)


def frobenius_maximal(ring: Ring, t: int) -> MonomialIdeal:
    """m^[t] = (x_1^t, ..., x_n^t)."""
    n = ring.nvars
    return MonomialIdeal(ring, tuple(sorted(
        tuple(t if i == j else 0 for j in range(n)) for i in range(n))))


@lru_cache(maxsize=4096)
def saturation(I: MonomialIdeal) -> MonomialIdeal:
    """I : m^infinity.

    Computed in one step as ``I : m^[t]`` with t the least power of p bounding
    every generator exponent: past that bound ``I : x_i^t`` no longer depends
    on t.  The result is then confirmed to be a fixpoint of ``J -> J : m``.
    """
    if I.is_zero or I.is_unit:
        return I
    top = max(max(g) for g in I.gens)
    t = 1
    while t < top:
        t *= I.ring.p
    S = colon(I, frobenius_maximal(I.ring, t))
    if colon(S, I.ring.maximal()) != S:  # pragma: no cover - would be a bug
        raise AssertionError(f"saturation of {format_ideal(I)} is not stable under : m")
    return S


def saturation_fixpoint(I: MonomialIdeal) -> MonomialIdeal:
    """I : m^infinity by iterating J -> J : m until it stabilizes.

    Takes O(max degree) steps with growing intermediate generator sets; kept
    as a reference implementation.
    """
    m = I.ring.maximal()
    J = I
    while True:
        nxt = colon(J, m)
        if nxt == J:
            return J
        J = nxt


def saturation_by_variables(I: MonomialIdeal) -> MonomialIdeal:
    """I : m^infinity as the intersection over i of I : x_i^infinity.

    For monomial ideals ``I : x_i^inf`` just zeroes coordinate i of every
    generator.  Used as an independent cross-check on :func:`saturation`.
    """
    n = I.nvars
    parts = (MonomialIdeal(I.ring, minimalize(g[:i] + (0,) + g[i + 1:] for g in I.gens))
             for i in range(n))
    return reduce(intersect, parts)


# -- box decompositions --------------------------------------------------------

def _difference_boxes(i_gens: tuple, j_gens: tuple, n: int) -> list[tuple[tuple, tuple]]:
    # Disjoint boxes covering S(J) \ S(I) in N^n.
    if not j_gens:
        return []
    if n == 0:
        return [((), ())] if not i_gens else []
    if any(not any(g) for g in i_gens):
        return []
    cuts = sorted({0} | {g[-1] for g in i_gens} | {g[-1] for g in j_gens})
    slabs = []
    for k, v in enumerate(cuts):
        top = cuts[k + 1] if k + 1 < len(cuts) else None
        si = minimalize(g[:-1] for g in i_gens if g[-1] <= v)
        sj = minimalize(g[:-1] for g in j_gens if g[-1] <= v)
        if slabs and slabs[-1][2] == si and slabs[-1][3] == sj:
            slabs[-1][1] = top
        else:
            slabs.append([v, top, si, sj])
    out = []
    for v, top, si, sj in slabs:
        for lo, hi in _difference_boxes(si, sj, n - 1):
            out.append((lo + (v,), hi + (top,)))
    return out


def difference_region(I: MonomialIdeal, J: MonomialIdeal) -> BoxRegion:
    """Disjoint box decomposition of S(J) \\ S(I); deterministic per canonical input."""
    _same_ring(I, J)
    key = ("diff", J.gens)
    cached = I._boxes.get(key)
    if cached is None:
        raw = _difference_boxes(I.gens, J.gens, I.nvars)
        cached = BoxRegion(I.nvars, tuple(Box(lo, hi) for lo, hi in raw))
        I._boxes[key] = cached
    return cached


def complement_boxes(I: MonomialIdeal) -> BoxRegion:
    """Disjoint (possibly unbounded) boxes whose union is N^n \\ S(I)."""
    if I.is_zero or I.is_unit:
        raise PreconditionError("complement decomposition needs a proper nonzero ideal",
                                witness=format_ideal(I))
    return difference_region(I, I.ring.unit())


@dataclass(frozen=True)
class Colength:
    """Length of a monomial quotient: a finite count or infinite."""

    value: Optional[int]

    @classmethod
    def infinite(cls) -> "Colength":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __int__(self) -> int:
        if self.value is None:
            raise PreconditionError("colength is infinite")
        return self.value

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


def relative_colength(I: MonomialIdeal, J: MonomialIdeal) -> Colength:
    """#(S(J) \\ S(I)) for I contained in J, decided structurally from boxes."""
    w = non_member(I, J)
    if w is not None:
        raise InclusionError(f"{format_ideal(I)} is not contained in {format_ideal(J)}",
                             witness=w)
    return Colength(difference_region(I, J).count())


def colength(I: MonomialIdeal) -> Colength:
    """ell(R / I)."""
    return relative_colength(I, I.ring.unit())


def is_m_primary(I: MonomialIdeal) -> bool:
    """True when R/I has finite length (the unit ideal counts, with length 0)."""
    return difference_region(I, I.ring.unit()).bounded


def excess_over_degree(I: MonomialIdeal, J: MonomialIdeal, k: int) -> Optional[Exponent]:
    """A monomial of degree >= k in S(J) \\ S(I), or None if there is none.

    ``None`` means ``I cap m^k == J cap m^k`` whenever I is contained in J.
    """
    region = difference_region(I, J)
    best = None
    for box in region:
        if not box.bounded:
            # push the first unbounded coordinate up to reach degree k
            x = list(box.lower)
            i = next(i for i, u in enumerate(box.upper) if u is None)
            x[i] += max(0, k - sum(x))
            return tuple(x)
        top = box.top_corner()
        if sum(top) >= k and (best is None or sum(top) > sum(best)):
            best = top
    if best is None:
        return None
    return _lower_witness(region, best, k)


def _lower_witness(region: BoxRegion, top: Exponent, k: int) -> Exponent:
    # walk down from the top corner of its box while staying at degree >= k
    box = next(b for b in region if b.contains(top))
    x = list(top)
    for i in range(len(x)):
        drop = min(x[i] - box.lower[i], sum(x) - k)
        if drop > 0:
            x[i] -= drop
    return tuple(x)


def count_outside_in_halfspace(I: MonomialIdeal, H: HalfSpace, scale: int = 1) -> int:
    """#{x in N^n \\ S(I) : a.x < scale*beta}."""
    if I.is_unit:
        return 0
    return count_in_halfspace(difference_region(I, I.ring.unit()), H, scale)
