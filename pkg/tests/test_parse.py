import json

import pytest

from hkforge.errors import ParseError, PreconditionError
from hkforge.parse import ideal_from_json, infer_var_names, parse_ideal, parse_monomial
from hkforge.staircase import Ring, make_ideal


def test_three_formats_agree():
    R = Ring(5, ("x", "y", "z"))
    want = make_ideal(R, [(5, 0, 0), (1, 1, 1), (0, 5, 0)])
    js = '{"p": 5, "vars": ["x", "y", "z"], "gens": [[5,0,0],[1,1,1],[0,5,0]]}'
    assert parse_ideal(js) == want
    assert parse_ideal("p=5; vars=x,y,z; gens=x^5, x*y*z, y^5") == want
    assert parse_ideal("(x^5, x*y*z, y^5)", p=5) == want
    assert parse_ideal("(x^5, xyz, y^5)", p=5) == want


def test_json_round_trip():
    I = parse_ideal("(x^2, x*y^3, z)", p=3)
    assert ideal_from_json(json.loads(json.dumps(I.to_json()))) == I


def test_infer_natural_order():
    assert infer_var_names("(x10^2, x2, x1*y)") == ("x1", "x2", "x10", "y")


def test_explicit_names_segmentation():
    assert parse_monomial("ab^2", ["a", "b"]) == (1, 2)
    assert parse_monomial("xx", ["x", "y"]) == (2, 0)


def test_ambiguous_names_rejected():
    with pytest.raises(ParseError, match="ambiguous"):
        parse_monomial("xy", ["x", "y", "xy"])


def test_unknown_variable():
    with pytest.raises(ParseError):
        parse_ideal("(x, w)", p=2, var_names=["x", "y"])


@pytest.mark.parametrize("text", ["(x^2,,y)", "(x*)", "(2x)", "(x^)", ""])
def test_malformed_text(text):
    with pytest.raises(ParseError):
        parse_ideal(text, p=2, var_names=["x", "y"])


def test_malformed_json_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_ideal('{"p": 2, "vars": ["x"], ')


def test_semantic_json_violation_is_a_precondition_error():
    with pytest.raises(PreconditionError) as info:
        parse_ideal('{"p": 4, "vars": ["x"], "gens": [[1]]}')
    assert not isinstance(info.value, ParseError)


def test_zero_and_unit_generators():
    assert parse_ideal("(0)", p=2, var_names=["x"]).is_zero
    assert parse_ideal("(1, x)", p=2).is_unit


def test_missing_p():
    with pytest.raises(ParseError):
        parse_ideal("(x, y)")


def test_disagreeing_p():
    with pytest.raises(PreconditionError):
        parse_ideal("p=3; gens=x,y", p=2)
