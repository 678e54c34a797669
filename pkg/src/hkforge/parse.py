"""Ideal input formats.

JSON (the exact contract)::

    {"p": 5, "vars": ["x", "y", "z"], "gens": [[5, 0, 0], [1, 1, 1], [0, 5, 0]]}

One-line text::

    p=5; vars=x,y,z; gens=x^5, x*y*z, y^5

and the bare generator list ``(x^5, x*y*z, y^5)`` when ``p`` (and optionally
the variables) come from elsewhere.  Whitespace is ignored and ``*`` is
optional; a factor that splits into declared variable names in more than
one way is rejected.
"""

from __future__ import annotations

import json
import re
from typing import Optional, Sequence

from .errors import ParseError, PreconditionError
from .staircase import MonomialIdeal, Ring, make_ideal

_INFERRED_VAR = re.compile(r"[A-Za-z]\d*")


def _natural_key(name: str):
    m = re.fullmatch(r"([A-Za-z]+)(\d*)", name)
    if not m:
        return (name, -1)
    return (m.group(1), int(m.group(2)) if m.group(2) else -1)


def _strip_parens(text: str) -> str:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    return text


def infer_var_names(*gen_lists: str) -> tuple[str, ...]:
    """Variables mentioned in bare generator lists, in natural order.

    Inferred names are a single letter optionally followed by digits, so
    ``xy`` always reads as ``x*y``.
    """
    names = set()
    for text in gen_lists:
        body = re.sub(r"\^\s*\d+", "", _strip_parens(text))
        for tok in re.split(r"[\s,*]+", body):
            if not tok or tok.isdigit():
                continue
            pieces = _INFERRED_VAR.findall(tok)
            if "".join(pieces) != tok:
                raise ParseError(f"cannot read variables from {tok!r}")
            names.update(pieces)
    if not names:
        raise ParseError("no variables found; pass them explicitly")
    return tuple(sorted(names, key=_natural_key))


def _segmentations(s: str, names: Sequence[str]) -> list[list[str]]:
    # all ways of writing s as a concatenation of declared names
    out: list[list[str]] = []

    def walk(pos: int, acc: list[str]):
        if len(out) > 1:
            return
        if pos == len(s):
            out.append(list(acc))
            return
        for nm in names:
            if s.startswith(nm, pos):
                acc.append(nm)
                walk(pos + len(nm), acc)
                acc.pop()

    walk(0, [])
    return out


def parse_monomial(text: str, var_names: Sequence[str]) -> Optional[tuple[int, ...]]:
    """Exponent vector of one monomial term; None for the zero polynomial."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty generator")
    exps = [0] * len(var_names)
    index = {nm: i for i, nm in enumerate(var_names)}
    for factor in s.split("*"):
        if not factor:
            raise ParseError(f"dangling '*' in {text!r}")
        if factor.isdigit():
            if int(factor) == 0:
                return None
            if int(factor) != 1:
                raise ParseError(f"coefficients are not supported: {text!r}")
            continue
        # split factor into runs "<letters/digits>" optionally followed by "^k"
        parts = re.findall(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?", factor)
        if "".join(b + (f"^{k}" if k else "") for b, k in parts) != factor:
            raise ParseError(f"malformed monomial {text!r}")
        for base, power in parts:
            segs = _segmentations(base, var_names)
            if not segs:
                raise ParseError(f"unknown variable in {base!r}; declared {list(var_names)}")
            if len(segs) > 1:
                raise ParseError(f"ambiguous variable names in {base!r}")
            names = segs[0]
            for nm in names[:-1]:
                exps[index[nm]] += 1
            exps[index[names[-1]]] += int(power) if power else 1
    return tuple(exps)


def parse_gen_list(text: str, ring: Ring) -> MonomialIdeal:
    body = _strip_parens(text)
    gens = []
    for term in body.split(","):
        if not term.strip():
            raise ParseError(f"empty generator in {text!r}")
        e = parse_monomial(term, ring.var_names)
        if e is not None:
            gens.append(e)
    return make_ideal(ring, gens)


def ideal_from_json(obj) -> MonomialIdeal:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed ideal JSON: {exc}") from exc
    if not isinstance(obj, dict) or not {"p", "vars", "gens"} <= obj.keys():
        raise ParseError("ideal JSON needs keys 'p', 'vars', 'gens'")
    p, names, gens = obj["p"], obj["vars"], obj["gens"]
    if not isinstance(p, int) or not isinstance(names, list) or not isinstance(gens, list):
        raise ParseError("ideal JSON has wrongly typed fields")
    if not all(isinstance(g, list) for g in gens):
        raise ParseError("each generator must be a list of exponents")
    ring = Ring(p, tuple(names))
    return make_ideal(ring, [tuple(g) for g in gens])


def parse_ideal(text: str, p: Optional[int] = None,
                var_names: Optional[Sequence[str]] = None) -> MonomialIdeal:
    """Parse any of the accepted formats.

    ``p`` and ``var_names`` fill in what a bare generator list lacks; when
    the text carries them itself they must agree.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        I = ideal_from_json(stripped)
        _agree(I.ring, p, var_names)
        return I
    if "gens=" in re.sub(r"\s+", "", stripped):
        fields = {}
        for chunk in stripped.split(";"):
            if not chunk.strip():
                continue
            if "=" not in chunk:
                raise ParseError(f"expected key=value, got {chunk.strip()!r}")
            k, v = chunk.split("=", 1)
            fields[k.strip()] = v.strip()
        unknown = set(fields) - {"p", "vars", "gens"}
        if unknown:
            raise ParseError(f"unknown fields {sorted(unknown)}")
        tp = int(fields["p"]) if "p" in fields else p
        if tp is None:
            raise ParseError("characteristic p missing")
        if "vars" in fields:
            names = tuple(v.strip() for v in fields["vars"].split(",") if v.strip())
        else:
            names = tuple(var_names) if var_names else infer_var_names(fields["gens"])
        ring = Ring(tp, names)
        _agree(ring, p, var_names)
        return parse_gen_list(fields["gens"], ring)
    if p is None:
        raise ParseError("characteristic p missing for a bare generator list")
    names = tuple(var_names) if var_names else infer_var_names(stripped)
    return parse_gen_list(stripped, Ring(p, names))


def _agree(ring: Ring, p, var_names):
    if p is not None and ring.p != p:
        raise PreconditionError(f"ideal is over p={ring.p}, expected p={p}")
    if var_names is not None and tuple(var_names) != ring.var_names:
        raise PreconditionError(f"ideal variables {list(ring.var_names)} differ from "
                                f"{list(var_names)}")
