"""hkforge command line.

Exit codes: 0 success / PASS, 1 parse error, 2 precondition violated,
3 verification FAIL.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .errors import ParseError, PreconditionError
from .geometry import HalfSpace
from .limits import (
    DEFAULT_TOL, SampledSequence, a_F, amao_sequence, bbl_check, e_ghk, estimate_limit,
    ghk_family_via_amao, ghk_sequence, ghk_via_amao, hk_sequence,
)
from .parse import infer_var_names, parse_ideal
from .pbody import (
    PBodyApprox, exact_truncated_volume_frobenius, monte_carlo_volume, psystem_from_family,
    verify_cone_theorem,
)
from .pfamily import (
    PFamily, check_pc, colon_family, family_from_spec, find_min_pc, frobenius_family,
    saturated_family, verify_family,
)
from .staircase import format_ideal, saturation

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_FAIL = 0, 1, 2, 3

MODEL_NOTE = ("lengths are graded monomial counts in k[x_1..x_n]; p(c) is transferred "
              "to the localization at the homogeneous maximal ideal")

THEOREMS = ("thm-ghk-amao", "thm-ghk-family", "thm-bbl", "thm-cone", "suite")


class VerificationFailed(Exception):
    pass


# -- input helpers ---------------------------------------------------------------

def _vars(args) -> Optional[tuple[str, ...]]:
    if getattr(args, "vars", None):
        return tuple(v.strip() for v in args.vars.split(",") if v.strip())
    return None


def _is_bare(text: str) -> bool:
    t = text.strip()
    return not t.startswith("{") and "gens=" not in t.replace(" ", "")


def load_ideals(args, *texts):
    """Parse several ideals into one common ring."""
    names = _vars(args)
    bare = [t for t in texts if _is_bare(t)]
    if names is None and bare and len(bare) == len(texts):
        names = infer_var_names(*bare)
    out = []
    for t in texts:
        if _is_bare(t):
            out.append(parse_ideal(t, args.p, names))
        else:
            I = parse_ideal(t, None, names)
            names = I.ring.var_names
            out.append(I)
    rings = {I.ring for I in out}
    if len(rings) > 1:
        raise PreconditionError("ideals given on the command line live in different rings")
    return out


def _read_maybe_file(text: str) -> str:
    if text.startswith("@"):
        return Path(text[1:]).read_text(encoding="utf-8")
    return text


def load_family(args) -> PFamily:
    if getattr(args, "family", None):
        spec = _read_maybe_file(args.family).strip()
        if spec.startswith("{"):
            return family_from_spec(spec)
        kind, _, rest = spec.partition(":")
        if kind == "colon":
            parts = rest.split(":")
            if len(parts) != 2:
                raise ParseError("colon family syntax is colon:(I):(J)")
            I, J = load_ideals(args, *parts)
            return colon_family(I, J)
        if kind in ("frobenius", "saturated"):
            (I,) = load_ideals(args, rest)
            F = frobenius_family(I)
            return F if kind == "frobenius" else saturated_family(F)
        raise ParseError(f"unknown family kind {kind!r}")
    if getattr(args, "ideal", None):
        (I,) = load_ideals(args, _read_maybe_file(args.ideal))
        return frobenius_family(I)
    raise ParseError("need --ideal or --family")


def load_halfspace(text: str) -> HalfSpace:
    try:
        obj = json.loads(_read_maybe_file(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed half-space JSON: {exc}") from exc
    return HalfSpace.from_json(obj)


def e_range(lo: int, hi: int) -> range:
    if hi < lo:
        raise PreconditionError(f"empty range [{lo}, {hi}]")
    if lo < 0:
        raise PreconditionError("e ranges start at 0 or above", witness=lo)
    return range(lo, hi + 1)


# -- output ------------------------------------------------------------------------

def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sequence_csv(seq: SampledSequence, outer_q: Optional[int] = None) -> list[list[str]]:
    rows = []
    for e, q, v in seq.entries:
        s = Fraction(v) / q ** seq.d
        row = [str(e), str(q), str(v), f"{float(s):.12g}", str(s)]
        rows.append(([str(outer_q)] + row) if outer_q is not None else row)
    return rows


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


SEQ_HEADER = ["e", "q", "value", "value/q^d", "value/q^d exact"]


def sequence_text(seq: SampledSequence, est, label="value") -> str:
    lines = [f"{'e':>3} {'q':>8} {label:>16} {'value/q^d':>18}"]
    for e, q, v in seq.entries:
        s = Fraction(v) / q ** seq.d
        lines.append(f"{e:>3} {q:>8} {str(v):>16} {float(s):>18.12g}")
    lines.append(f"limit: {est.limit} ({est.method})")
    return "\n".join(lines) + "\n"


def emit(args, *, text: str, payload: dict, csv_rows=None, csv_header=None):
    fmt = args.format
    if fmt == "json":
        out = dump_json(payload)
    elif fmt == "csv":
        out = write_csv(csv_header or SEQ_HEADER, csv_rows or [])
    else:
        out = text
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8", newline="")
    else:
        sys.stdout.write(out)


def _base_payload(command: str, **kw):
    out = {"command": command, "version": __version__, "model": MODEL_NOTE}
    out.update(kw)
    return out


# -- commands ------------------------------------------------------------------------

def cmd_hk(args) -> int:
    (I,) = load_ideals(args, _read_maybe_file(args.ideal))
    seq = hk_sequence(I, e_range(args.emin, args.emax))
    est = estimate_limit(seq, args.tol)
    emit(args, text=f"ideal: {format_ideal(I)}\n" + sequence_text(seq, est),
         payload=_base_payload("hk", ideal=I.to_json(), table=list(seq.rows()),
                               estimate=est.to_json()),
         csv_rows=sequence_csv(seq))
    return EXIT_OK


def cmd_ghk(args) -> int:
    F = load_family(args)
    seq = ghk_sequence(F, e_range(args.emin, args.emax))
    est = estimate_limit(seq, args.tol)
    emit(args, text=f"family: {F.label}\n" + sequence_text(seq, est),
         payload=_base_payload("ghk", family=F.label, table=list(seq.rows()),
                               estimate=est.to_json()),
         csv_rows=sequence_csv(seq))
    return EXIT_OK


def cmd_amao(args) -> int:
    if args.J.strip().lower() == "sat":
        (I,) = load_ideals(args, _read_maybe_file(args.I))
        J = saturation(I)
    else:
        I, J = load_ideals(args, _read_maybe_file(args.I), _read_maybe_file(args.J))
    seq = amao_sequence(I, J, e_range(args.emin, args.emax))
    est = estimate_limit(seq, args.tol)
    emit(args, text=f"I: {format_ideal(I)}\nJ: {format_ideal(J)}\n" + sequence_text(seq, est),
         payload=_base_payload("amao", I=I.to_json(), J=J.to_json(),
                               table=list(seq.rows()), estimate=est.to_json()),
         csv_rows=sequence_csv(seq))
    return EXIT_OK


def cmd_pc_check(args) -> int:
    F = load_family(args)
    if args.find_min:
        c = find_min_pc(F, args.cmax, args.emax)
        payload = _base_payload("pc-check", family=F.label, c_max=args.cmax,
                                e_max=args.emax, min_c=c, evidence_only=True)
        text = (f"family: {F.label}\nminimal c (evidence up to e={args.emax}): "
                f"{'none <= ' + str(args.cmax) if c is None else c}\n")
        emit(args, text=text, payload=payload, csv_header=["c_max", "e_max", "min_c"],
             csv_rows=[[args.cmax, args.emax, "" if c is None else c]])
        return EXIT_OK if c is not None else EXIT_FAIL
    if args.c is None:
        raise ParseError("pass --c or --find-min")
    rep = check_pc(F, args.c, args.emax)
    text = f"family: {F.label}\np({args.c}) up to e={args.emax}: " + \
        ("holds" if rep.holds else f"fails at e={rep.witness[0]}, witness {rep.witness[1]}") + "\n"
    emit(args, text=text, payload=_base_payload("pc-check", family=F.label, **rep.to_json()),
         csv_header=["c", "e_max", "verdict", "witness_e", "witness"],
         csv_rows=[[rep.c, rep.e_max, "holds" if rep.holds else "fails",
                    "" if rep.witness is None else rep.witness[0],
                    "" if rep.witness is None else " ".join(map(str, rep.witness[1]))]])
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_family_validate(args) -> int:
    F = load_family(args)
    rep = verify_family(F, args.emax)
    text = f"family: {F.label}\n{rep.condition} up to e={args.emax}: " + \
        ("holds" if rep.holds else f"fails: {rep.message}") + "\n"
    emit(args, text=text, payload=_base_payload("family-validate", family=F.label,
                                                **rep.to_json()),
         csv_header=["condition", "e_max", "verdict"],
         csv_rows=[[rep.condition, rep.e_max, "holds" if rep.holds else "fails"]])
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_pbody_vol(args) -> int:
    F = load_family(args)
    H = load_halfspace(args.H)
    results = {}
    if F.kind == "frobenius" and F.base is not None:
        results["exact"] = exact_truncated_volume_frobenius(F.base, H)
        target = F.base
    else:
        approx = PBodyApprox(psystem_from_family(F, max(args.cutoff, 1)), args.cutoff)
        results["exact"] = approx.exact_volume(H)
        target = approx
    if args.mc:
        results["monte_carlo"] = monte_carlo_volume(target, H, args.mc, args.seed)
    payload = _base_payload("pbody-vol", family=F.label, halfspace=H.to_json(),
                            volumes={k: v.to_json() for k, v in results.items()})
    text = "".join(f"{k}: {v.value}" + (f" +- {v.stderr:.6g}" if v.stderr is not None else "")
                   + f" ({v.method})\n" for k, v in results.items())
    emit(args, text=f"family: {F.label}\n" + text, payload=payload,
         csv_header=["method", "value", "stderr", "samples", "seed"],
         csv_rows=[[v.method, str(v.value), "" if v.stderr is None else f"{v.stderr:.12g}",
                    v.samples or "", "" if v.seed is None else v.seed]
                   for v in results.values()])
    return EXIT_OK


# -- verify ----------------------------------------------------------------------------

def _double_text(title: str, res, left: str, right: str) -> str:
    lines = [title]
    for eo, qo, seq, est in res.columns:
        lines.append(f"  q'={qo:<6} inner limit = {est.limit} ({est.method})")
    lines.append(f"  {left}: {res.direct.limit} ({res.direct.method})")
    if res.outer is not None:
        lines.append(f"  {right}: {res.outer.limit} ({res.outer.method})")
        lines.append(f"  difference: {res.difference}")
    if res.budget_truncated:
        lines.append("  budget-truncated")
    return "\n".join(lines) + "\n"


def _double_csv(res):
    rows = []
    for eo, qo, seq, est in res.columns:
        rows.extend(sequence_csv(seq, outer_q=qo))
    return rows


def verify_ghk_amao(args, I):
    r = ghk_via_amao(I, e_range(args.eomin, args.eomax), e_range(args.emin, args.emax),
                     c=args.c, tol=args.tol)
    ok = r.result.agree(args.tol)
    return ok, {"theorem": "thm-ghk-amao", "verdict": "PASS" if ok else "FAIL",
                **r.to_json()}, \
        _double_text(f"{'PASS' if ok else 'FAIL'} thm-ghk-amao {format_ideal(I)}  (p(c) with "
                     f"c={r.c})", r.result, "e_gHK direct", "lim a_F/q'^d"), \
        _double_csv(r.result)


def verify_ghk_family(args, F):
    c, evidence, res = ghk_family_via_amao(F, e_range(args.eomin, args.eomax),
                                           e_range(args.emin, args.emax), c=args.c,
                                           tol=args.tol)
    ok = res.agree(args.tol)
    return ok, {"theorem": "thm-ghk-family", "verdict": "PASS" if ok else "FAIL",
                "family": F.label, "c": c, "pc": evidence, **res.to_json()}, \
        _double_text(f"{'PASS' if ok else 'FAIL'} thm-ghk-family {F.label}  (c={c})", res,
                     "e_gHK(family) direct", "lim a_F/q'^d"), _double_csv(res)


def verify_bbl(args, F):
    rep = bbl_check(F, e_range(args.emin, args.emax), e_range(args.imin, args.imax),
                    tol=args.tol)
    ok = rep.agree(args.tol) and rep.double_family["verdict"] == "holds"
    return ok, {"theorem": "thm-bbl", "verdict": "PASS" if ok else "FAIL", **rep.to_json()}, \
        _double_text(f"{'PASS' if ok else 'FAIL'} thm-bbl {F.label}  (BBL c={rep.c_bbl})",
                     rep.result, "lim ell(R/I_q)/q^d", "lim e_HK(I_q)/q^d"), \
        _double_csv(rep.result)


def verify_cone(args, F, H):
    rep = verify_cone_theorem(F, H, e_range(args.emin, args.emax), C_bound=args.cbound)
    shown = json.dumps(H.to_json(), sort_keys=True)
    lines = [f"{'PASS' if rep.passed else 'FAIL'} thm-cone {F.label}  H={shown}",
             f"  volume: {rep.volume.value} ({rep.volume.method})"]
    for e, q, cnt, s, err in rep.rows:
        lines.append(f"  q={q:<6} count={cnt:<10} count/q^d={float(s):.12g}  "
                     f"error={float(err):.6g}")
    bound = "" if rep.C_bound is None else f" (bound {rep.C_bound})"
    lines.append(f"  fitted C: {rep.C}{bound}")
    rows = [["", str(q), str(cnt), f"{float(s):.12g}", str(s)] for e, q, cnt, s, err in rep.rows]
    return rep.passed, {"theorem": "thm-cone", **rep.to_json()}, "\n".join(lines) + "\n", rows


SUITE_IDEALS = ("(x^2,x*y*z,y^2)", "(x^3,x*y*z,y^3)")


def run_suite(args):
    """Fixed fixture suite: every theorem check on the bundled examples."""
    reports, texts, ok_all = [], [], True
    ns = argparse.Namespace(**vars(args))
    fixtures = [("thm-ghk-amao", 2, SUITE_IDEALS[0]), ("thm-ghk-amao", 3, SUITE_IDEALS[1])]
    for name, p, text in fixtures:
        ns.p = p
        (I,) = load_ideals(ns, text)
        ok, rep, txt, _ = verify_ghk_amao(ns, I)
        ok_all &= ok
        reports.append(rep)
        texts.append(txt)
    ns.p = 2
    (I,) = load_ideals(ns, SUITE_IDEALS[0])
    ok, rep, txt, _ = verify_ghk_family(ns, saturated_family(frobenius_family(I)))
    ok_all &= ok
    reports.append(rep)
    texts.append(txt)
    X, Y = load_ideals(ns, "(x,y)", "(x)")
    ok, rep, txt, _ = verify_bbl(ns, colon_family(X, Y))
    ok_all &= ok
    reports.append(rep)
    texts.append(txt)
    for ideal, H, bound in (("(x^2,x*y,y^3)", '{"a":["1","1"],"beta":"6"}', Fraction(20)),
                            ("(x,y)", '{"a":["1","1"],"beta":"3"}', None)):
        (I,) = load_ideals(ns, ideal)
        ns.cbound = bound
        ok, rep, txt, _ = verify_cone(ns, frobenius_family(I), load_halfspace(H))
        ok_all &= ok
        reports.append(rep)
        texts.append(txt)
    return ok_all, {"theorem": "suite", "verdict": "PASS" if ok_all else "FAIL",
                    "reports": reports}, "".join(texts), []


def cmd_verify(args) -> int:
    name = args.theorem
    if name not in THEOREMS:
        raise ParseError(f"unknown theorem {name!r}; choose from {', '.join(THEOREMS)}")
    if name == "suite":
        ok, rep, text, rows = run_suite(args)
    elif name == "thm-ghk-amao":
        if not args.ideal:
            raise ParseError("thm-ghk-amao needs --ideal")
        (I,) = load_ideals(args, _read_maybe_file(args.ideal))
        ok, rep, text, rows = verify_ghk_amao(args, I)
    elif name == "thm-ghk-family":
        ok, rep, text, rows = verify_ghk_family(args, load_family(args))
    elif name == "thm-bbl":
        ok, rep, text, rows = verify_bbl(args, load_family(args))
    else:
        if not args.H:
            raise ParseError("thm-cone needs --H")
        ok, rep, text, rows = verify_cone(args, load_family(args), load_halfspace(args.H))
    emit(args, text=text, payload=_base_payload("verify", **rep),
         csv_header=["q'", *SEQ_HEADER], csv_rows=rows)
    return EXIT_OK if ok else EXIT_FAIL


# -- argument parsing --------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text}") from exc
    if v <= 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="characteristic for bare ideals")
    common.add_argument("--vars", help="comma-separated variable names")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--output", help="write output here instead of stdout")
    common.add_argument("--tol", type=_fraction, default=DEFAULT_TOL,
                        help="relative convergence tolerance (rational)")
    common.add_argument("--emin", type=int, default=1)
    common.add_argument("--emax", type=int, default=None,
                        help="last e (default 6; 4 for pc-check, 5 for family-validate)")

    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--ideal", help="ideal: JSON, 'p=..; vars=..; gens=..', or '(x^2,y^3)'")
    src.add_argument("--family", help="frobenius:(I) | saturated:(I) | colon:(I):(J) | JSON "
                                      "| @file.json")

    parser = argparse.ArgumentParser(prog="hkforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hk", parents=[common], help="Hilbert-Kunz sequence and limit")
    p.add_argument("--ideal", required=True)
    p.set_defaults(func=cmd_hk)

    p = sub.add_parser("ghk", parents=[common, src], help="generalized HK sequence and limit")
    p.set_defaults(func=cmd_ghk)

    p = sub.add_parser("amao", parents=[common], help="Amao-type multiplicity a_F(I, J)")
    p.add_argument("--I", required=True)
    p.add_argument("--J", required=True, help="ideal, or 'sat' for the saturation of I")
    p.set_defaults(func=cmd_amao)

    p = sub.add_parser("pc-check", parents=[common, src], help="check condition p(c)")
    p.add_argument("--c", type=int)
    p.add_argument("--find-min", action="store_true")
    p.add_argument("--cmax", type=int, default=16)
    p.set_defaults(func=cmd_pc_check, emax_default=4)

    p = sub.add_parser("verify", parents=[common, src], help="numerical theorem checks")
    p.add_argument("theorem", help=" | ".join(THEOREMS))
    p.add_argument("--H", help='half-space JSON, e.g. {"a":["1","1"],"beta":"6"}')
    p.add_argument("--c", type=int)
    p.add_argument("--cbound", type=_fraction, help="cap on the fitted C for thm-cone")
    p.add_argument("--eomin", type=int, default=0, help="outer (q') range start")
    p.add_argument("--eomax", type=int, default=4)
    p.add_argument("--imin", type=int, default=0, help="inner e_HK range for thm-bbl")
    p.add_argument("--imax", type=int, default=3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pbody-vol", parents=[common, src], help="truncated p-body volume")
    p.add_argument("--H", required=True)
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo samples (0 = skip)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=4, help="cutoff exponent for general families")
    p.set_defaults(func=cmd_pbody_vol)

    p = sub.add_parser("family-validate", parents=[common, src],
                       help="check the (weakly) p-family axiom")
    p.set_defaults(func=cmd_family_validate, emax_default=5)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    if args.emax is None:
        args.emax = getattr(args, "emax_default", 6)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        msg = f"precondition failed: {exc}"
        if exc.witness is not None:
            msg += f" (witness: {exc.witness})"
        print(msg, file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
