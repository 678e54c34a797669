"""Multiplicity sequences over q = p^e and their limits.

Every sequence value is an exact integer (a colength), or an exact rational
when it is itself an inner limit.  :func:`estimate_limit` first tries an
exact polynomial fit in q, because monomial Frobenius colengths are exactly
polynomial in q; otherwise it falls back to first-order Richardson
extrapolation under the model ``value/q^d = L + A/q + o(1/q)``.

The multiplicities are defined as limit superiors.  What is computed here is
the sampled sequence, a fitted limit and the spread of the normalized tail;
non-convergence is flagged, never papered over.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from ._parallel import pmap
from .errors import InclusionError, InfiniteColengthError, PreconditionError
from .pfamily import (
    DoubleFamily, PFamily, bbl_double_family, check_pc, find_min_pc, frobenius_family,
    is_bbl, saturated_family, validate_double_family, verify_family,
)
from .staircase import (
    MonomialIdeal, bracket_power, difference_region, format_ideal, non_member,
    relative_colength, saturation,
)

log = logging.getLogger(__name__)

Number = Union[int, Fraction]

DEFAULT_TOL = Fraction(1, 10**6)
DEFAULT_E_RANGE = range(1, 7)
DEFAULT_OUTER_RANGE = range(0, 5)
DEFAULT_BUDGET = 10_000


@dataclass
class SampledSequence:
    d: int
    entries: list[tuple[int, int, Number]] = field(default_factory=list)

    def append(self, e: int, q: int, value: Number):
        if self.entries and e <= self.entries[-1][0]:
            raise PreconditionError("sequence indices must increase", witness=e)
        if value < 0:
            raise PreconditionError("sequence values must be non-negative", witness=value)
        self.entries.append((e, q, value))

    def __len__(self):
        return len(self.entries)

    @property
    def qs(self) -> list[int]:
        return [q for _, q, _ in self.entries]

    @property
    def values(self) -> list[Number]:
        return [v for _, _, v in self.entries]

    def normalized(self) -> list[Fraction]:
        return [Fraction(v) / q ** self.d for _, q, v in self.entries]

    def rows(self):
        for (e, q, v), s in zip(self.entries, self.normalized()):
            yield {"e": e, "q": q, "value": str(v), "normalized": str(s),
                   "normalized_decimal": f"{float(s):.12g}"}


@dataclass
class LimitEstimate:
    limit: Fraction
    lo: Fraction
    hi: Fraction
    method: str
    residual: Fraction
    converged: bool
    tail_min: Fraction
    tail_max: Fraction
    coefficients: Optional[list[Fraction]] = None
    extrapolants: list[Fraction] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.method == "exact-polynomial"

    def to_json(self):
        out = {"limit": str(self.limit), "interval": [str(self.lo), str(self.hi)],
               "method": self.method, "residual": str(self.residual),
               "converged": self.converged,
               "tail": [str(self.tail_min), str(self.tail_max)],
               "extrapolants": [str(r) for r in self.extrapolants]}
        if self.coefficients is not None:
            out["coefficients"] = [str(c) for c in self.coefficients]
        return out


def interpolate(xs: Sequence[int], ys: Sequence[Number]) -> list[Fraction]:
    """Coefficients (constant term first) of the polynomial through the points."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        # Lagrange basis polynomial for node i, expanded
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xs[j] * basis[k + 1]
            denom *= xs[i] - xs[j]
        scale = Fraction(ys[i]) / denom
        for k in range(n):
            coeffs[k] += scale * basis[k]
    return coeffs


def poly_eval(coeffs: Sequence[Fraction], x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def richardson(seq: SampledSequence) -> list[Fraction]:
    """First-order extrapolants ``(r s_i - s_{i-1}) / (r - 1)`` with ``r = q_i/q_{i-1}``."""
    s = seq.normalized()
    qs = seq.qs
    out = []
    for i in range(1, len(s)):
        r = Fraction(qs[i], qs[i - 1])
        out.append((r * s[i] - s[i - 1]) / (r - 1))
    return out


def _within(a: Fraction, b: Fraction, tol: Fraction) -> bool:
    return abs(a - b) <= tol * max(Fraction(1), abs(a), abs(b))


def estimate_limit(seq: SampledSequence, tol: Fraction = DEFAULT_TOL) -> LimitEstimate:
    n, d = len(seq), seq.d
    if n < 2:
        raise PreconditionError(f"need at least 2 samples, got {n}")
    s = seq.normalized()
    tail = s[n // 2:]
    tmin, tmax = min(tail), max(tail)
    extrap = richardson(seq)

    if n >= d + 2:
        coeffs = interpolate(seq.qs[:d + 1], seq.values[:d + 1])
        if all(poly_eval(coeffs, q) == v for q, v in zip(seq.qs[d + 1:], seq.values[d + 1:])):
            L = coeffs[d]
            return LimitEstimate(L, L, L, "exact-polynomial", Fraction(0), True, tmin, tmax,
                                 coefficients=coeffs, extrapolants=extrap)
    if n >= 3:
        a, b = extrap[-2], extrap[-1]
        return LimitEstimate(b, min(a, b), max(a, b), "richardson", abs(b - a),
                             _within(a, b, tol), tmin, tmax, extrapolants=extrap)
    a, b = s[-2], s[-1]
    return LimitEstimate(b, min(a, b), max(a, b), "last-value", abs(b - a),
                         _within(a, b, tol), tmin, tmax, extrapolants=extrap)


def limits_agree(x: LimitEstimate, y: LimitEstimate, tol: Fraction = DEFAULT_TOL) -> bool:
    """Exact equality when both are exact fits, relative tolerance otherwise."""
    if x.exact and y.exact:
        return x.limit == y.limit
    return _within(x.limit, y.limit, tol)


# -- sequences -----------------------------------------------------------------

def _colength_sequence(pairs, es: Iterable[int], ring, what: str) -> SampledSequence:
    es = list(es)
    if not es:
        raise PreconditionError("empty e range")

    def one(e):
        I, J = pairs(e)
        c = relative_colength(I, J)
        if not c.is_finite:
            raise InfiniteColengthError(f"{what}: infinite colength at e={e}", witness=e)
        return c.value

    seq = SampledSequence(ring.dim)
    for e, v in zip(es, pmap(one, es)):
        seq.append(e, ring.q(e), v)
    return seq


def _require_m_primary(I: MonomialIdeal):
    region = difference_region(I, I.ring.unit())
    for box in region:
        if not box.bounded:
            raise PreconditionError(f"{format_ideal(I)} is not m-primary",
                                    witness=box.lower)


def hk_sequence(I: MonomialIdeal, es: Iterable[int] = DEFAULT_E_RANGE) -> SampledSequence:
    """``e -> ell(R / I^[q])``."""
    _require_m_primary(I)
    unit = I.ring.unit()
    return _colength_sequence(lambda e: (bracket_power(I, I.ring.q(e)), unit), es, I.ring,
                              "hk")


def e_hk(I: MonomialIdeal, es: Iterable[int] = DEFAULT_E_RANGE,
         tol: Fraction = DEFAULT_TOL) -> LimitEstimate:
    return estimate_limit(hk_sequence(I, es), tol)


def ghk_sequence(F: PFamily, es: Iterable[int] = DEFAULT_E_RANGE) -> SampledSequence:
    """``e -> ell(sat(I_q) / I_q)``, the local cohomology length in the monomial model."""
    sat = saturated_family(F)
    return _colength_sequence(lambda e: (F(e), sat(e)), es, F.ring, "ghk")


def e_ghk(F: PFamily, es: Iterable[int] = DEFAULT_E_RANGE,
          tol: Fraction = DEFAULT_TOL) -> LimitEstimate:
    return estimate_limit(ghk_sequence(F, es), tol)


def amao_sequence(I: MonomialIdeal, J: MonomialIdeal,
                  es: Iterable[int] = DEFAULT_E_RANGE) -> SampledSequence:
    """``e -> ell(J^[q] / I^[q])`` for I ⊆ J with ell(J/I) finite."""
    w = non_member(I, J)
    if w is not None:
        raise InclusionError(f"{format_ideal(I)} is not contained in {format_ideal(J)}",
                             witness=w)
    if not relative_colength(I, J).is_finite:
        raise InfiniteColengthError(f"ell({format_ideal(J)} / {format_ideal(I)}) is infinite")
    ring = I.ring
    return _colength_sequence(
        lambda e: (bracket_power(I, ring.q(e)), bracket_power(J, ring.q(e))), es, ring, "amao")


def a_F(I: MonomialIdeal, J: MonomialIdeal, es: Iterable[int] = DEFAULT_E_RANGE,
        tol: Fraction = DEFAULT_TOL) -> LimitEstimate:
    return estimate_limit(amao_sequence(I, J, es), tol)


def amao_classical(I: MonomialIdeal):
    """Amao's ordinary-power multiplicity a(I, I^sat); intentionally not provided."""
    raise NotImplementedError("only the Frobenius (Amao-type) multiplicity is implemented")


# -- double limits -------------------------------------------------------------

@dataclass
class DoubleLimitResult:
    """Direct limit of ``ell(J_q/I_q)/q^d`` against the nested limit over columns."""

    d: int
    direct_sequence: SampledSequence
    direct: LimitEstimate
    columns: list[tuple[int, int, SampledSequence, LimitEstimate]]
    outer_sequence: Optional[SampledSequence]
    outer: Optional[LimitEstimate]
    budget_truncated: bool = False

    @property
    def difference(self) -> Optional[Fraction]:
        if self.outer is None:
            return None
        return self.outer.limit - self.direct.limit

    def agree(self, tol: Fraction = DEFAULT_TOL) -> bool:
        return self.outer is not None and limits_agree(self.direct, self.outer, tol)

    def to_json(self):
        return {
            "d": self.d,
            "direct": {"table": list(self.direct_sequence.rows()),
                       "estimate": self.direct.to_json()},
            "inner": [{"e_outer": eo, "q_outer": qo, "table": list(seq.rows()),
                       "estimate": est.to_json()} for eo, qo, seq, est in self.columns],
            "outer": None if self.outer is None else {
                "table": list(self.outer_sequence.rows()), "estimate": self.outer.to_json()},
            "difference": None if self.difference is None else str(self.difference),
            "budget_truncated": self.budget_truncated,
        }


def double_limit(I_fam: PFamily, J_fam: PFamily, I2: DoubleFamily, J2: DoubleFamily,
                 e_outer: Iterable[int], e_inner: Iterable[int],
                 e_direct: Iterable[int], budget: int = DEFAULT_BUDGET,
                 tol: Fraction = DEFAULT_TOL) -> DoubleLimitResult:
    """Evaluate both sides of the double-limit volume formula.

    Direct side: ``lim ell(J_q/I_q)/q^d``.  Nested side: for each q' the inner
    limit ``G(q') = lim_q ell(J_{q',q}/I_{q',q})/q^d``, then
    ``lim G(q')/q'^d``.  At most ``budget`` colengths are evaluated for the
    nested side; columns beyond it are dropped and the result flagged.
    """
    ring = I_fam.ring
    d = ring.dim
    direct_seq = _colength_sequence(lambda e: (I_fam(e), J_fam(e)), e_direct, ring, "direct")
    direct = estimate_limit(direct_seq, tol)
    e_inner = list(e_inner)
    columns = []
    truncated = False
    spent = 0
    for eo in e_outer:
        if spent + len(e_inner) > budget:
            truncated = True
            break
        spent += len(e_inner)
        seq = _colength_sequence(lambda e, eo=eo: (I2(eo, e), J2(eo, e)), e_inner, ring,
                                 f"inner column e'={eo}")
        columns.append((eo, ring.q(eo), seq, estimate_limit(seq, tol)))
    outer_seq = outer = None
    if len(columns) >= 2:
        outer_seq = SampledSequence(d)
        for eo, qo, _, est in columns:
            outer_seq.append(eo, qo, est.limit)
        outer = estimate_limit(outer_seq, tol)
    if truncated:
        log.warning("nested limit truncated after %d inner evaluations", spent)
    return DoubleLimitResult(d, direct_seq, direct, columns, outer_seq, outer, truncated)


@dataclass
class GhkAmaoResult:
    ideal: MonomialIdeal
    c: Optional[int]
    pc_evidence: Optional[dict]
    result: DoubleLimitResult

    def to_json(self):
        out = {"ideal": self.ideal.to_json(), "c": self.c, "pc": self.pc_evidence}
        out.update(self.result.to_json())
        return out


def _pc_evidence(F: PFamily, c: Optional[int], e_max: int, c_max: int):
    if c is None:
        c = find_min_pc(F, c_max, e_max)
        if c is None:
            log.warning("no c <= %d satisfies p(c) up to e=%d; limits are unsupported",
                        c_max, e_max)
            return None, None
    report = check_pc(F, c, e_max)
    if not report.holds:
        log.warning("p(%d) fails at e=%d", c, report.witness[0])
    return c, report.to_json()


def ghk_family_via_amao(F: PFamily, e_outer: Iterable[int] = DEFAULT_OUTER_RANGE,
                        e_inner: Iterable[int] = DEFAULT_E_RANGE,
                        e_direct: Optional[Iterable[int]] = None, c: Optional[int] = None,
                        c_max: int = 32, budget: int = DEFAULT_BUDGET,
                        tol: Fraction = DEFAULT_TOL):
    """gHK of a p-family against the limit of Amao-type multiplicities.

    Columns are ``J_{q',q} = sat(I_{q'})^[q]`` and ``I_{q',q} = I_{q'}^[q]``.
    Returns ``(c, pc_evidence, DoubleLimitResult)``.
    """
    e_outer, e_inner = list(e_outer), list(e_inner)
    e_direct = list(e_inner if e_direct is None else e_direct)
    c, evidence = _pc_evidence(F, c, max(e_outer + e_direct), c_max)
    ring = F.ring
    sat = saturated_family(F)
    J2 = DoubleFamily(ring, lambda eo, ei: bracket_power(sat(eo), ring.q(ei)), "amao-J")
    I2 = DoubleFamily(ring, lambda eo, ei: bracket_power(F(eo), ring.q(ei)), "amao-I")
    return c, evidence, double_limit(F, sat, I2, J2, e_outer, e_inner, e_direct, budget, tol)


def ghk_via_amao(I: MonomialIdeal, e_outer: Iterable[int] = DEFAULT_OUTER_RANGE,
                 e_inner: Iterable[int] = DEFAULT_E_RANGE,
                 e_direct: Optional[Iterable[int]] = None, c: Optional[int] = None,
                 c_max: int = 32, budget: int = DEFAULT_BUDGET,
                 tol: Fraction = DEFAULT_TOL) -> GhkAmaoResult:
    """``e_gHK(I)`` directly and as ``lim a_F(I^[q'], sat(I^[q']))/q'^d``.

    For a Frobenius family ``I_{q'}^[q] = I^[q'q]``, so the columns are the
    double family of :func:`hkforge.pfamily.ghk_double_family`.
    """
    c, evidence, res = ghk_family_via_amao(frobenius_family(I), e_outer, e_inner, e_direct,
                                           c, c_max, budget, tol)
    return GhkAmaoResult(I, c, evidence, res)


@dataclass
class BBLReport:
    family: str
    c_bbl: int
    weakly_p: dict
    double_family: dict
    L1: LimitEstimate
    L2: Optional[LimitEstimate]
    result: DoubleLimitResult

    @property
    def difference(self):
        return self.result.difference

    def agree(self, tol: Fraction = DEFAULT_TOL) -> bool:
        return self.result.agree(tol)

    def to_json(self):
        out = {"family": self.family, "c_bbl": self.c_bbl, "weakly_p": self.weakly_p,
               "double_family": self.double_family}
        out.update(self.result.to_json())
        return out


def bbl_check(F: PFamily, es: Iterable[int] = DEFAULT_E_RANGE,
              inner_es: Iterable[int] = range(0, 4), c: Optional[int] = None,
              c_max: int = 64, budget: int = DEFAULT_BUDGET,
              tol: Fraction = DEFAULT_TOL) -> BBLReport:
    """``lim ell(R/I_q)/q^d`` against ``lim e_HK(I_q)/q^d`` for a BBL weakly p-family.

    Realized through the scaled families ``c I_q ⊆ cR`` and
    ``c^q I_{q'}^[q] ⊆ c^q R`` with ``c`` the family's monomial multiplier,
    so ``ell(cR/cI_q) = ell(R/I_q)`` and the columns give ``e_HK(I_{q'})``.
    """
    es = list(es)
    for e in es:
        _require_m_primary(F(e))
    e_lo, e_hi = min(es), max(es)
    if c is None:
        c = next((k for k in range(1, c_max + 1) if is_bbl(F, k, e_hi, e_lo) is None), None)
        if c is None:
            raise PreconditionError(f"no BBL constant c <= {c_max} on e in [{e_lo}, {e_hi}]")
    else:
        bad = is_bbl(F, c, e_hi, e_lo)
        if bad is not None:
            raise PreconditionError(f"m^(cq) not contained in I_q for c={c}", witness=bad)
    multiplier = F.weakly_p or (0,) * F.ring.nvars
    weak = verify_family(F, e_hi) if e_hi >= 1 else None
    if weak is not None and not weak.holds:
        raise PreconditionError(f"not a weakly p-family: {weak.message}", witness=weak.witness)
    I1, J1, I2, J2 = bbl_double_family(F, multiplier)
    inner_es = list(inner_es)
    dfr = validate_double_family(I1, J1, I2, J2, e_hi, max(inner_es))
    res = double_limit(I1, J1, I2, J2, es, inner_es, es, budget, tol)
    return BBLReport(F.label, c, weak.to_json() if weak else {}, dfr.to_json(),
                     res.direct, res.outer, res)
