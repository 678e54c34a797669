"""p-systems, truncated p-bodies and their volumes.

The valuation is the monomial exponent map, so the p-system of a family is
just ``T_q = S(I_q)`` and the cone is the positive orthant.  For a Frobenius
family ``(1/q) S(I^[q]) + R^n_{>=0}`` is the closed real staircase of I for
every q, which gives exact p-body volumes; for other families the body is
approximated by a finite cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from ._parallel import pmap
from .errors import PreconditionError
from .geometry import Box, HalfSpace, count_in_halfspace, region_halfspace_volume
from .pfamily import FamilyError, PFamily, verify_p_family
from .staircase import (
    MonomialIdeal, difference_region, format_ideal, ideal_sum, make_ideal,
)

PRNG_NAME = "numpy.PCG64"
MC_BATCH = 100_000


@dataclass
class PSystem:
    """``e -> T_q``, each T_q the staircase of a monomial ideal."""

    family: PFamily

    @property
    def ring(self):
        return self.family.ring

    def staircase(self, e: int) -> MonomialIdeal:
        return self.family(e)

    def contains(self, e: int, x) -> bool:
        return tuple(x) in self.family(e)


def psystem_from_family(F: PFamily, e_max: int = 4) -> PSystem:
    """Wrap a family; ``p T_q ⊆ T_{pq}`` is re-checked for e < e_max."""
    report = verify_p_family(F, e_max)
    if not report.holds:
        raise FamilyError(f"not a p-system: {report.message}", witness=report.witness)
    return PSystem(F)


def _check_dims(H: HalfSpace, n: int):
    if H.nvars != n:
        raise PreconditionError(f"half-space has {H.nvars} coordinates, ring has {n}")


def count_truncated(P: PSystem, e: int, H: HalfSpace) -> int:
    """#(T_q ∩ qH) as (points of N^n in qH) - (points outside T_q in qH)."""
    n = P.ring.nvars
    _check_dims(H, n)
    I = P.staircase(e)
    q = P.ring.q(e)
    if I.is_zero:
        return 0
    orthant = [Box((0,) * n, (None,) * n)]
    total = count_in_halfspace(orthant, H, q)
    if I.is_unit:
        return total
    return total - count_in_halfspace(difference_region(I, I.ring.unit()), H, q)


@dataclass
class VolumeResult:
    value: Union[Fraction, float]
    method: str
    stderr: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    prng: Optional[str] = None
    cutoff: Optional[int] = None
    hits: Optional[int] = None

    def to_json(self):
        out = {"value": str(self.value) if isinstance(self.value, Fraction)
               else repr(self.value), "method": self.method}
        for key in ("stderr", "samples", "seed", "prng", "cutoff", "hits"):
            v = getattr(self, key)
            if v is not None:
                out[key] = repr(v) if isinstance(v, float) else v
        if self.method == "pbody-approx":
            # cutoff error has no known rate: only the lower end is certain
            out["interval"] = [out["value"], "unbounded"]
            out["flag"] = "cutoff-lower-bound"
        return out


def exact_truncated_volume_frobenius(I: MonomialIdeal, H: HalfSpace) -> VolumeResult:
    """Vol(Δ ∩ H) for the Frobenius family of I: simplex minus complement boxes."""
    _check_dims(H, I.nvars)
    if I.is_zero:
        raise PreconditionError("the zero ideal has an empty p-body")
    simplex = H.simplex_volume()
    if I.is_unit:
        return VolumeResult(simplex, "exact")
    region = difference_region(I, I.ring.unit())
    return VolumeResult(simplex - region_halfspace_volume(region, H), "exact")


@dataclass
class PBodyApprox:
    """``∪_{q <= Q} (1/q) T_q + R^n_{>=0}`` stored as ``(1/Q) S(region)``."""

    system: PSystem
    e_cut: int
    region: MonomialIdeal = field(init=False)

    def __post_init__(self):
        ring = self.system.ring
        Q = ring.q(self.e_cut)
        gens = []
        for e in range(self.e_cut + 1):
            scale = Q // ring.q(e)
            gens.extend(tuple(c * scale for c in g) for g in self.system.staircase(e).gens)
        self.region = make_ideal(ring, gens)

    @property
    def Q(self) -> int:
        return self.system.ring.q(self.e_cut)

    @property
    def scaled_gens(self) -> np.ndarray:
        return np.array(self.region.gens, dtype=float).reshape(-1, self.system.ring.nvars) / self.Q

    def exact_volume(self, H: HalfSpace) -> VolumeResult:
        """Exact volume of the cutoff body; a lower bound for the true p-body."""
        _check_dims(H, self.system.ring.nvars)
        if self.region.is_zero:
            return VolumeResult(Fraction(0), "pbody-approx", cutoff=self.Q)
        n = self.system.ring.nvars
        big = exact_truncated_volume_frobenius(self.region, H.scaled(self.Q)).value
        return VolumeResult(big / self.Q ** n, "pbody-approx", cutoff=self.Q)


def _hits(gens: np.ndarray, a: np.ndarray, beta: float, n: int, m: int,
          seed_seq: np.random.SeedSequence) -> int:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    E = rng.standard_exponential((m, n + 1))
    # exponential spacings: normalized gaps are uniform on the standard simplex
    y = E[:, :n] / E.sum(axis=1, keepdims=True)
    x = y * (beta / a)
    inside = np.zeros(m, dtype=bool)
    for g in gens:
        inside |= np.all(x >= g, axis=1)
    return int(inside.sum())


def monte_carlo_volume(target: Union[MonomialIdeal, PBodyApprox], H: HalfSpace,
                       n_samples: int, seed: int) -> VolumeResult:
    """Seeded estimate of Vol(Δ ∩ H) by uniform sampling of the simplex ``a.x < beta``.

    The batch plan is fixed (``MC_BATCH`` samples per batch, one spawned seed
    per batch) so the result depends only on ``seed`` and ``n_samples``.
    """
    if n_samples < 1:
        raise PreconditionError("need at least one sample", witness=n_samples)
    if isinstance(target, PBodyApprox):
        gens, n, cutoff = target.scaled_gens, target.system.ring.nvars, target.Q
    else:
        if target.is_zero:
            raise PreconditionError("the zero ideal has an empty p-body")
        gens = np.array(target.gens, dtype=float).reshape(-1, target.nvars)
        n, cutoff = target.nvars, None
    _check_dims(H, n)
    a = np.array([float(v) for v in H.a])
    beta = float(H.beta)
    sizes = [MC_BATCH] * (n_samples // MC_BATCH)
    if n_samples % MC_BATCH:
        sizes.append(n_samples % MC_BATCH)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    hits = sum(pmap(lambda job: _hits(gens, a, beta, n, job[0], job[1]),
                    list(zip(sizes, seeds))))
    simplex = float(H.simplex_volume())
    frac = hits / n_samples
    stderr = simplex * math.sqrt(frac * (1 - frac) / n_samples)
    return VolumeResult(frac * simplex, "monte-carlo", stderr=stderr, samples=n_samples,
                        seed=seed, prng=PRNG_NAME, cutoff=cutoff, hits=hits)


@dataclass
class ConeReport:
    family: str
    halfspace: HalfSpace
    volume: VolumeResult
    rows: list = field(default_factory=list)
    C: Fraction = Fraction(0)
    C_bound: Optional[Fraction] = None
    monotone: bool = True
    lower_bounds: list = field(default_factory=list)
    lower_bound_ok: Optional[bool] = None

    @property
    def passed(self) -> bool:
        ok = self.monotone and (self.C_bound is None or self.C <= self.C_bound)
        return ok and self.lower_bound_ok is not False

    def to_json(self):
        return {
            "family": self.family, "halfspace": self.halfspace.to_json(),
            "volume": self.volume.to_json(),
            "table": [{"e": e, "q": q, "count": cnt, "normalized": str(s),
                       "normalized_decimal": f"{float(s):.12g}", "error": str(err)}
                      for e, q, cnt, s, err in self.rows],
            "fitted_C": str(self.C),
            "C_bound": None if self.C_bound is None else str(self.C_bound),
            "monotone": self.monotone,
            "lower_bounds": [{"q": q, "volume": str(v)} for q, v in self.lower_bounds],
            "lower_bound_ok": self.lower_bound_ok,
            "verdict": "PASS" if self.passed else "FAIL",
        }


def verify_cone_theorem(F: PFamily, H: HalfSpace, es: Iterable[int],
                        C_bound: Optional[Fraction] = None,
                        epsilon: Fraction = Fraction(1, 10**6)) -> ConeReport:
    """Compare ``#(T_q ∩ qH)/q^d`` with ``Vol(Δ ∩ H)`` over the sampled q.

    The verdict needs the error to decrease along the samples; the fitted
    ``C = max q·|error|`` is always reported and, given ``C_bound``, capped.

    Frobenius (and constant-unit) families use the exact volume.  Other
    families use the cutoff body at the largest sampled q; for them the report
    also lists ``Vol((1/q) S(I_q) ∩ H)``, the limits of the Frobenius
    sub-systems, which must stay below the body volume and reach it within
    ``epsilon`` at the cutoff.
    """
    es = list(es)
    P = psystem_from_family(F, max(max(es), 1))
    n = F.ring.nvars
    lower = []
    if F.kind == "frobenius" and F.base is not None:
        vol = exact_truncated_volume_frobenius(F.base, H)
    elif F.kind == "constant" and F.base is not None and F.base.is_unit:
        vol = VolumeResult(H.simplex_volume(), "exact")
    else:
        approx = PBodyApprox(P, max(es))
        vol = approx.exact_volume(H)
        for e in es:
            q = F.q(e)
            I = F(e)
            v = Fraction(0) if I.is_zero else \
                exact_truncated_volume_frobenius(I, H.scaled(q)).value / q ** n
            lower.append((q, v))
    target = vol.value
    report = ConeReport(F.label, H, vol,
                        C_bound=None if C_bound is None else Fraction(C_bound))
    counts = pmap(lambda e: count_truncated(P, e, H), es)
    prev = None
    for e, cnt in zip(es, counts):
        q = F.q(e)
        s = Fraction(cnt, q ** n)
        err = abs(s - target)
        report.rows.append((e, q, cnt, s, err))
        report.C = max(report.C, err * q)
        if prev is not None and err > prev:
            report.monotone = False
        prev = err
    if lower:
        report.lower_bounds = lower
        report.lower_bound_ok = (all(v <= target for _, v in lower)
                                 and lower[-1][1] >= target - epsilon)
    return report
