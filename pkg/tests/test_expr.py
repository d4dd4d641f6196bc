import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from takacheck import catalog
from takacheck.expr import (
    Binary,
    Const,
    EvaluationError,
    ExprError,
    Param,
    ParseError,
    Unary,
    Var,
    eval_chart,
    eval_scalar,
    format_expr,
    parse,
    parse_constant,
    parse_scalar,
    to_source,
    transform,
)
from takacheck.report import SamplePlan, generate_samples

PLANE = "dim 2 -> 3; F = (x1, x2, 0); box x1 in [0,1], x2 in [0,1]"
CIRCLE = "param a=1.2; dim 1 -> 2; F = (cos(a*x1), sin(a*x1)); box x1 in [0,6.28]"


def test_parse_plane():
    spec = parse(PLANE)
    assert (spec.m, spec.N) == (2, 3)
    assert spec.components == (Var(0), Var(1), Const(0.0))
    assert spec.box == ((0.0, 1.0), (0.0, 1.0))


def test_parse_circle_with_param():
    spec = parse(CIRCLE)
    assert (spec.m, spec.N) == (1, 2)
    assert spec.params == {"a": 1.2}
    assert spec.components[0] == Unary("cos", Binary("mul", Param("a", 1.2), Var(0)))


def test_unexpected_end_of_input():
    with pytest.raises(ParseError) as info:
        parse("F = (x1,")
    err = info.value
    assert "end of input" in str(err)
    assert (err.line, err.col) == (1, 9)
    assert "identifier" in err.expected


def test_multiline_file_with_comments():
    src = """
    # a helix on the unit cylinder
    param a = 2;   # speed
    param h = a / 4;
    dim 1 -> 3;
    F = (cos(a*x1), sin(a*x1), h*x1);
    box x1 in [-pi, pi];
    """
    spec = parse(src)
    assert spec.params == {"a": 2.0, "h": 0.5}
    assert spec.box == ((-math.pi, math.pi),)


def test_error_positions_on_later_lines():
    src = "dim 1 -> 2;\nF = (x1, x1 $ 2);\nbox x1 in [0,1]"
    with pytest.raises(ParseError) as info:
        parse(src)
    assert (info.value.line, info.value.col) == (2, 13)


@pytest.mark.parametrize(
    "src, fragment",
    [
        ("dim 2 -> 3; F = (x1, x2, y); box x1 in [0,1], x2 in [0,1]", "undeclared identifier 'y'"),
        ("dim 2 -> 3; F = (x1, x2); box x1 in [0,1], x2 in [0,1]", "dimension mismatch"),
        ("dim 1 -> 2; F = (x1, x3); box x1 in [0,1]", "undeclared identifier 'x3'"),
        ("dim 1 -> 2; F = (x1, tan(x1)); box x1 in [0,1]", "unknown function"),
        ("dim 1 -> 2; F = (x1, x1^x1); box x1 in [0,1]", "exponent"),
        ("dim 1 -> 2; F = (x1, 1/0); box x1 in [0,1]", "invalid constant"),
        ("dim 1 -> 2; F = (x1, x1); box x1 in [1,0]", "empty range"),
        ("dim 2 -> 2; F = (x1, x2); box x1 in [0,1]", "missing x2"),
        ("dim 1 -> 2; F = (x1, x1)", "missing 'box'"),
        ("dim 1 -> 2; dim 1 -> 2; F = (x1, x1); box x1 in [0,1]", "duplicate"),
        ("dim 3 -> 2; F = (x1, x2); box x1 in [0,1]", "N >= m"),
        ("param pi = 3; dim 1 -> 1; F = (x1); box x1 in [0,1]", "cannot declare"),
        ("param x1 = 3; dim 1 -> 1; F = (x1); box x1 in [0,1]", "reserved"),
        ("param a = x1; dim 1 -> 1; F = (x1); box x1 in [0,1]", "undeclared"),
    ],
)
def test_positioned_errors(src, fragment):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert fragment in str(info.value)
    assert info.value.line >= 1 and info.value.col >= 1


def test_precedence():
    spec = parse("dim 1 -> 4; F = (-x1^2, 2*x1+3*x1, x1/2/2, 2^3^2 + 0*x1); box x1 in [1,2]")
    jets = eval_chart(spec, [1.5])
    assert jets[0].value == -(1.5**2)
    assert jets[1].value == 2 * 1.5 + 3 * 1.5
    assert jets[2].value == 1.5 / 4
    assert jets[3].value == 2.0**9


def test_double_star_and_unary_plus():
    spec = parse("dim 1 -> 1; F = (+x1**2); box x1 in [0,1]")
    assert eval_chart(spec, [0.5])[0].value == 0.25


def test_constant_folding():
    spec = parse("dim 1 -> 2; F = (2*pi*x1, sqrt(4) + 0*e); box x1 in [0,1]")
    assert spec.components[0] == Binary("mul", Const(2 * math.pi), Var(0))
    assert spec.components[1] == Const(2.0)


def test_param_overrides():
    spec = parse(CIRCLE, overrides={"a": 1.0})
    assert spec.params["a"] == 1.0
    jets = eval_chart(spec, [0.0])
    assert (jets[0].value, jets[0].grad[0], jets[0].hess[0, 0]) == (1.0, 0.0, -1.0)
    with pytest.raises(ExprError):
        parse(CIRCLE, overrides={"zz": 1.0})


def test_eval_plane_third_component_zero():
    jets = eval_chart(parse(PLANE), [0.5, 0.5])
    third = jets[2]
    assert third.value == 0.0 and not third.grad.any() and not third.hess.any()


def test_example34_linear_component_has_zero_hessian():
    spec, _, _ = catalog.instantiate("example34", {"n": 2, "a": math.sqrt(1.5)})
    for p in generate_samples(SamplePlan(seed=3, count=10), spec.box):
        assert not eval_chart(spec, p)[4].hess.any()


def test_domain_error_names_component_and_point():
    spec = parse("dim 1 -> 2; F = (x1, sqrt(x1 - 0.5)); box x1 in [0,1]")
    with pytest.raises(EvaluationError) as info:
        eval_chart(spec, [0.25])
    assert info.value.component == 1
    assert info.value.point == (0.25,)


def test_parse_constant():
    assert parse_constant("sqrt(2)") == math.sqrt(2)
    assert parse_constant("2*pi/3") == 2 * math.pi / 3
    with pytest.raises(ParseError):
        parse_constant("x1")


def test_parse_scalar_with_components():
    spec = parse(CIRCLE)
    node = parse_scalar("F1^2 + F2^2", spec)
    h = eval_scalar(node, spec, [0.7])
    assert h.value == pytest.approx(1.0)
    assert h.grad[0] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ParseError):
        parse_scalar("F3", spec)


def test_transform_applies_linear_map():
    spec = parse(PLANE)
    Q = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]])
    moved = transform(spec, Q, offset=[0.0, 0.0, 1.0])
    assert moved(np.array([0.2, 0.7])).tolist() == [0.7, 0.2, 1.0]


# ---------------------------------------------------------------------------
# round trip and fuzzing
# ---------------------------------------------------------------------------

_leaf = st.sampled_from(["x1", "x2", "a", "pi", "0.5", "2", "1.25e-1"])


def _exprs():
    return st.recursive(
        _leaf,
        lambda inner: st.one_of(
            st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
            st.tuples(inner, inner).map(lambda t: f"({t[0]})/(2 + cos({t[1]}))"),
            st.tuples(st.sampled_from(["sin", "cos"]), inner).map(lambda t: f"{t[0]}({t[1]})"),
            inner.map(lambda s: f"exp(sin({s}))"),
            inner.map(lambda s: f"sqrt(1 + ({s})^2)"),
            inner.map(lambda s: f"-{s}"),
            st.tuples(inner, st.sampled_from(["2", "3", "-1", "0.5"])).map(lambda t: f"(1.5 + sin({t[0]}))^{t[1]}"),
        ),
        max_leaves=8,
    )


@settings(max_examples=80, deadline=None)
@given(st.lists(_exprs(), min_size=2, max_size=3))
def test_round_trip_evaluates_identically(components):
    src = f"param a = 0.7; dim 2 -> {len(components)}; F = ({', '.join(components)}); box x1 in [-1, 1], x2 in [0, 2]"
    spec = parse(src)
    again = parse(to_source(spec))
    assert [format_expr(c) for c in again.components] == [format_expr(c) for c in spec.components]
    for p in generate_samples(SamplePlan(seed=11, count=20, margin=0.0), spec.box):
        assert eval_chart(again, p) == eval_chart(spec, p)


_tokens = st.sampled_from(
    ["dim", "F", "box", "param", "in", "=", "->", "(", ")", "[", "]", ",", ";", "+", "-", "*", "/", "^", "**",
     "x1", "x2", "a", "pi", "sin", "sqrt", "1", "2.5", "0", "1e3", "#c\n", "\n", "$"]
)


@settings(max_examples=400, deadline=None)
@given(st.lists(_tokens, max_size=30))
def test_fuzzed_token_streams_never_crash(tokens):
    try:
        parse(" ".join(tokens))
    except ParseError as err:
        assert err.line >= 1 and err.col >= 1
    except ExprError:
        pass


def test_catalog_sources_round_trip(cases):
    for id, spec, _, _ in cases:
        again = parse(to_source(spec))
        for p in generate_samples(SamplePlan(seed=5, count=20), spec.box):
            assert eval_chart(again, p) == eval_chart(spec, p), id
