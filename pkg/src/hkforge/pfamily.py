"""p-families, weakly p-families and doubly indexed families of monomial ideals.

A family is a lazy, memoized map ``e -> I_q`` with ``q = p**e``.  All the
checks here are bounded: they inspect ``e <= e_max`` and report evidence,
never a proof for every q.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .errors import ParseError, PreconditionError
from .parse import ideal_from_json
from .staircase import (
    Exponent, MonomialIdeal, Ring, bracket_power, colon, excess_over_degree,
    format_ideal, monomial_multiple, non_member, saturation,
)


class FamilyError(PreconditionError):
    """A family violates one of its defining containments."""


class _Memo:
    # guarded memo: duplicated concurrent evaluation is harmless, the lock
    # only keeps dict writes ordered
    def __init__(self, func):
        self.func = func
        self.cache = {}
        self.lock = threading.Lock()

    def __call__(self, *key):
        try:
            return self.cache[key]
        except KeyError:
            pass
        value = self.func(*key)
        with self.lock:
            return self.cache.setdefault(key, value)


class PFamily:
    """``e -> I_{p^e}``.

    ``kind`` is one of frobenius, saturated-frobenius, saturated, colon,
    scaled, custom.  ``weakly_p`` families only promise
    ``x^c * I_q^[p] ⊆ I_{pq}`` for the recorded multiplier ``c``.
    """

    def __init__(self, ring: Ring, func: Callable[[int], MonomialIdeal], kind: str,
                 label: str = "", *, base: Optional[MonomialIdeal] = None,
                 weakly_p: Optional[Exponent] = None, e_limit: Optional[int] = None,
                 spec: Optional[dict] = None):
        self.ring = ring
        self.kind = kind
        self.label = label or kind
        self.base = base
        self.weakly_p = weakly_p
        self.e_limit = e_limit
        self.spec = spec
        self._eval = _Memo(func)

    @property
    def p(self) -> int:
        return self.ring.p

    def q(self, e: int) -> int:
        return self.ring.q(e)

    def __call__(self, e: int) -> MonomialIdeal:
        if e < 0:
            raise PreconditionError("family index must be >= 0", witness=e)
        if self.e_limit is not None and e > self.e_limit:
            raise PreconditionError(f"{self.label} is only defined for e <= {self.e_limit}",
                                    witness=e)
        return self._eval(e)

    term = __call__

    def __repr__(self):
        return f"PFamily({self.kind}: {self.label}, p={self.p})"


class DoubleFamily:
    """``(e', e) -> I_{q', q}``."""

    def __init__(self, ring: Ring, func: Callable[[int, int], MonomialIdeal], kind: str,
                 label: str = ""):
        self.ring = ring
        self.kind = kind
        self.label = label or kind
        self._eval = _Memo(func)

    def __call__(self, e_outer: int, e_inner: int) -> MonomialIdeal:
        if e_outer < 0 or e_inner < 0:
            raise PreconditionError("double-family indices must be >= 0",
                                    witness=(e_outer, e_inner))
        return self._eval(e_outer, e_inner)

    def column(self, e_outer: int) -> PFamily:
        """The p-family ``q -> I_{q', q}`` for fixed q'."""
        return PFamily(self.ring, lambda e: self(e_outer, e), f"{self.kind}-column",
                       f"{self.label}[q'={self.ring.q(e_outer)}]")


# -- constructors ----------------------------------------------------------------

def frobenius_family(I: MonomialIdeal) -> PFamily:
    ring = I.ring
    return PFamily(ring, lambda e: bracket_power(I, ring.q(e)), "frobenius",
                   f"{format_ideal(I)}^[q]", base=I,
                   spec={"type": "frobenius", "ideal": I.to_json()})


def saturated_family(F: PFamily) -> PFamily:
    kind = "saturated-frobenius" if F.kind == "frobenius" else "saturated"
    spec = None
    if F.spec is not None and F.spec.get("type") == "frobenius":
        spec = {"type": "saturated", "ideal": F.spec["ideal"]}
    return PFamily(F.ring, lambda e: saturation(F(e)), kind, f"sat({F.label})",
                   base=F.base, e_limit=F.e_limit, spec=spec)


def colon_family(I: MonomialIdeal, J: MonomialIdeal) -> PFamily:
    """``q -> I^[q] : J``, a weakly p-family.

    The recorded multiplier is the first generator of ``J^[p] : J``: if
    ``x^c J ⊆ J^[p]`` and ``f J ⊆ I^[q]`` then ``x^c f^p J ⊆ I^[pq]``.
    """
    if J.is_zero:
        raise PreconditionError("colon_family needs a nonzero ideal J")
    ring = I.ring
    multiplier = colon(bracket_power(J, ring.p), J).gens[0]
    return PFamily(ring, lambda e: colon(bracket_power(I, ring.q(e)), J), "colon",
                   f"{format_ideal(I)}^[q] : {format_ideal(J)}", base=I,
                   weakly_p=None if not any(multiplier) else multiplier,
                   spec={"type": "colon", "ideal": I.to_json(), "colon_by": J.to_json()})


def scaled_family(F: PFamily, w: Exponent) -> PFamily:
    """``q -> x^w * I_q``; turns a weakly p-family with multiplier x^w into a p-family."""
    return PFamily(F.ring, lambda e: monomial_multiple(F(e), w), "scaled",
                   f"x^{list(w)}*{F.label}", base=F.base, e_limit=F.e_limit)


def constant_family(I: MonomialIdeal) -> PFamily:
    return PFamily(I.ring, lambda e: I, "constant", format_ideal(I), base=I)


def custom_family(terms: Mapping[int, MonomialIdeal], validate: bool = True) -> PFamily:
    """Family given by an explicit table ``{e: ideal}`` for ``e = 0..e_max``.

    With ``validate`` (the default) the p-family axiom is checked on the
    whole table and :class:`FamilyError` raised on the first violation.
    """
    if not terms:
        raise PreconditionError("custom family needs at least one term")
    es = sorted(terms)
    if es != list(range(len(es))):
        raise PreconditionError("custom family terms must be indexed e = 0, 1, ..., e_max",
                                witness=es)
    ring = terms[es[0]].ring
    if any(t.ring != ring for t in terms.values()):
        raise PreconditionError("custom family terms live in different rings")
    table = dict(terms)
    F = PFamily(ring, lambda e: table[e], "custom", "custom", e_limit=es[-1],
                spec={"type": "custom",
                      "terms": {str(e): table[e].to_json() for e in es}})
    if validate and es[-1] >= 1:
        report = verify_p_family(F, es[-1])
        if not report.holds:
            raise FamilyError(f"custom table is not a p-family: {report.message}",
                              witness=report.witness)
    return F


def family_from_spec(spec) -> PFamily:
    """Build a family from the JSON family spec (dict or string)."""
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed family JSON: {exc}") from exc
    if not isinstance(spec, dict) or "type" not in spec:
        raise ParseError("family JSON needs a 'type'")
    kind = spec["type"]
    if kind == "custom":
        raw = spec.get("terms")
        if not isinstance(raw, dict):
            raise ParseError("custom family needs a 'terms' table")
        try:
            terms = {int(k): ideal_from_json(v) for k, v in raw.items()}
        except ValueError as exc:
            if isinstance(exc, PreconditionError):
                raise
            raise ParseError(f"bad custom family term: {exc}") from exc
        return custom_family(terms, validate=True)
    if "ideal" not in spec:
        raise ParseError(f"{kind} family needs an 'ideal'")
    I = ideal_from_json(spec["ideal"])
    if kind == "frobenius":
        return frobenius_family(I)
    if kind == "saturated":
        return saturated_family(frobenius_family(I))
    if kind == "colon":
        if "colon_by" not in spec:
            raise ParseError("colon family needs 'colon_by'")
        return colon_family(I, ideal_from_json(spec["colon_by"]))
    raise ParseError(f"unknown family type {kind!r}")


# -- validation ------------------------------------------------------------------

@dataclass
class FamilyReport:
    condition: str
    e_max: int
    holds: bool
    witness: Optional[tuple] = None
    message: str = ""

    def to_json(self):
        return {"condition": self.condition, "e_max": self.e_max,
                "verdict": "holds" if self.holds else "fails",
                "witness": None if self.witness is None else list(self.witness),
                "evidence_only": True, "message": self.message}


def _checked_range(F: PFamily, e_max: int) -> range:
    if e_max < 1:
        raise PreconditionError("e_max must be >= 1", witness=e_max)
    top = e_max if F.e_limit is None else min(e_max, F.e_limit)
    return range(top)


def verify_p_family(F: PFamily, e_max: int) -> FamilyReport:
    """Check ``I_q^[p] ⊆ I_{pq}`` for every e < e_max."""
    for e in _checked_range(F, e_max):
        g = non_member(bracket_power(F(e), F.p), F(e + 1))
        if g is not None:
            return FamilyReport("p-family", e_max, False, (e, g),
                                f"generator {g} of I_q^[p] (e={e}) is not in I_(pq)")
    return FamilyReport("p-family", e_max, True)


def verify_weakly_p(F: PFamily, c_exponent: Exponent, e_max: int) -> FamilyReport:
    """Check ``x^c * I_q^[p] ⊆ I_{pq}`` for every e < e_max."""
    for e in _checked_range(F, e_max):
        lhs = monomial_multiple(bracket_power(F(e), F.p), c_exponent)
        g = non_member(lhs, F(e + 1))
        if g is not None:
            return FamilyReport("weakly-p", e_max, False, (e, g),
                                f"generator {g} of x^c I_q^[p] (e={e}) is not in I_(pq)")
    return FamilyReport("weakly-p", e_max, True)


def verify_family(F: PFamily, e_max: int) -> FamilyReport:
    """Whichever axiom the family declares."""
    if F.weakly_p is not None:
        return verify_weakly_p(F, F.weakly_p, e_max)
    return verify_p_family(F, e_max)


@dataclass
class PcReport:
    c: int
    e_max: int
    holds: bool
    witness: Optional[tuple[int, Exponent]] = None
    checked: list = field(default_factory=list)

    def to_json(self):
        return {"c": self.c, "e_max": self.e_max,
                "verdict": "holds" if self.holds else "fails",
                "witness": None if self.witness is None
                else {"e": self.witness[0], "exponent": list(self.witness[1])},
                "evidence_only": True}


def check_inclusion_pc(I_fam: PFamily, J_fam: PFamily, c: int, e_max: int,
                       e_min: int = 0) -> PcReport:
    """``I_q ∩ m^{cq} = J_q ∩ m^{cq}`` for e_min <= e <= e_max, given I_q ⊆ J_q.

    Equality holds iff ``S(J_q) \\ S(I_q)`` has no point of degree >= cq, so
    the check reads the maximal degree off the difference boxes instead of
    materializing m^{cq}.  A failure witness lies in ``J_q ∩ m^{cq}`` but not
    in ``I_q``.
    """
    if c < 1:
        raise PreconditionError("c must be >= 1", witness=c)
    report = PcReport(c, e_max, True)
    for e in range(e_min, e_max + 1):
        I, J = I_fam(e), J_fam(e)
        g = non_member(I, J)
        if g is not None:
            raise FamilyError(f"I_q is not contained in J_q at e={e}", witness=(e, g))
        w = excess_over_degree(I, J, c * I_fam.q(e))
        report.checked.append(e)
        if w is not None:
            report.holds = False
            report.witness = (e, w)
            return report
    return report


def check_pc(F: PFamily, c: int, e_max: int) -> PcReport:
    """Condition p(c) on e = 0..e_max: ``I_q ∩ m^{cq} = I_q^sat ∩ m^{cq}``."""
    return check_inclusion_pc(F, saturated_family(F), c, e_max)


def find_min_pc(F: PFamily, c_max: int, e_max: int) -> Optional[int]:
    """Smallest c <= c_max for which check_pc passes up to e_max (evidence only)."""
    if c_max < 1:
        raise PreconditionError("c_max must be >= 1", witness=c_max)
    for c in range(1, c_max + 1):
        if check_pc(F, c, e_max).holds:
            return c
    return None


def is_bbl(F: PFamily, c: int, e_max: int, e_min: int = 0) -> Optional[tuple[int, Exponent]]:
    """None if ``m^{cq} ⊆ I_q`` for all checked e, else ``(e, monomial)`` outside I_q."""
    for e in range(e_min, e_max + 1):
        I = F(e)
        w = excess_over_degree(I, I.ring.unit(), c * F.q(e))
        if w is not None:
            return (e, w)
    return None


# -- double families -------------------------------------------------------------

@dataclass
class DoubleFamilyReport:
    e_outer_max: int
    e_inner_max: int
    holds: bool
    failures: list = field(default_factory=list)

    def to_json(self):
        return {"e_outer_max": self.e_outer_max, "e_inner_max": self.e_inner_max,
                "verdict": "holds" if self.holds else "fails",
                "failures": [{"hypothesis": h, "e_outer": a, "e_inner": b,
                              "witness": None if w is None else list(w)}
                             for h, a, b, w in self.failures],
                "evidence_only": True}


def validate_double_family(I_fam: PFamily, J_fam: PFamily, I2: DoubleFamily,
                           J2: DoubleFamily, e_outer_max: int, e_inner_max: int,
                           c: Optional[int] = None) -> DoubleFamilyReport:
    """Check the containment hypotheses of the double-limit volume formula.

    For every checked (e', e): ``J_{q',1} = J_{q'}``, ``I_{q',1} = I_{q'}``,
    ``J_{q',q} ⊆ J_{qq'}``, ``I_{q',q} ⊆ I_{qq'}``, ``I_{q',q} ⊆ J_{q',q}``,
    each column is a p-family, and, when ``c`` is given,
    ``I_{q',q} ∩ m^{cqq'} = J_{q',q} ∩ m^{cqq'}``.
    """
    fails = []
    for eo in range(e_outer_max + 1):
        if J2(eo, 0) != J_fam(eo):
            fails.append(("J_(q',1) = J_q'", eo, 0, None))
        if I2(eo, 0) != I_fam(eo):
            fails.append(("I_(q',1) = I_q'", eo, 0, None))
        for ei in range(e_inner_max + 1):
            Jc, Ic = J2(eo, ei), I2(eo, ei)
            for name, small, big in (("J_(q',q) in J_(qq')", Jc, J_fam(eo + ei)),
                                     ("I_(q',q) in I_(qq')", Ic, I_fam(eo + ei)),
                                     ("I_(q',q) in J_(q',q)", Ic, Jc)):
                g = non_member(small, big)
                if g is not None:
                    fails.append((name, eo, ei, g))
            if ei < e_inner_max:
                for name, fam in (("J column p-family", J2), ("I column p-family", I2)):
                    g = non_member(bracket_power(fam(eo, ei), I_fam.p), fam(eo, ei + 1))
                    if g is not None:
                        fails.append((name, eo, ei, g))
            if c is not None:
                w = excess_over_degree(Ic, Jc, c * I_fam.q(eo) * I_fam.q(ei))
                if w is not None:
                    fails.append(("I_(q',q) cap m^(cqq') = J_(q',q) cap m^(cqq')", eo, ei, w))
    return DoubleFamilyReport(e_outer_max, e_inner_max, not fails, fails)


def ghk_double_family(I: MonomialIdeal, c: Optional[int] = None, e_outer_max: int = 2,
                      e_inner_max: int = 2):
    """``J_{q',q} = [sat(I^[q'])]^[q]`` and ``I_{q',q} = I^[q'q]``.

    Returns ``(J2, I2)``.  The double-limit hypotheses are validated on the
    given index box (plus the p(c) compatibility when ``c`` is supplied) and a
    :class:`FamilyError` names the first failing index pair.
    """
    ring = I.ring
    frob = frobenius_family(I)
    sat = saturated_family(frob)
    J2 = DoubleFamily(ring, lambda eo, ei: bracket_power(sat(eo), ring.q(ei)),
                      "ghk-J", f"[sat({format_ideal(I)}^[q'])]^[q]")
    I2 = DoubleFamily(ring, lambda eo, ei: frob(eo + ei), "ghk-I",
                      f"{format_ideal(I)}^[q'q]")
    report = validate_double_family(frob, sat, I2, J2, e_outer_max, e_inner_max, c)
    if not report.holds:
        name, eo, ei, w = report.failures[0]
        raise FamilyError(f"double family hypothesis '{name}' fails at (e', e)=({eo}, {ei})",
                          witness=(eo, ei, w))
    return J2, I2


def bbl_double_family(F: PFamily, multiplier: Exponent):
    """The scaled families used for bounded-below-linearly weakly p-families.

    With ``c = x^w``: ``I'_q = c I_q``, ``J'_q = cR``, ``I'_{q',q} = c^q I_{q'}^[q]``
    and ``J'_{q',q} = c^q R``.  Returns ``(I1, J1, I2, J2)``.
    """
    ring = F.ring
    w = tuple(multiplier)
    unit = ring.unit()

    def power(e):
        return tuple(ring.q(e) * wi for wi in w)

    I1 = PFamily(ring, lambda e: monomial_multiple(F(e), w), "scaled", f"c*{F.label}")
    J1 = PFamily(ring, lambda e: monomial_multiple(unit, w), "scaled", "c*R")
    I2 = DoubleFamily(ring, lambda eo, ei: monomial_multiple(
        bracket_power(F(eo), ring.q(ei)), power(ei)), "bbl-I", f"c^q*({F.label})^[q]")
    J2 = DoubleFamily(ring, lambda eo, ei: monomial_multiple(unit, power(ei)), "bbl-J",
                      "c^q*R")
    return I1, J1, I2, J2
