import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from takacheck import jet as J


def test_seed_coordinate_functions():
    x = J.seed((0.5, 0.3), 0)
    assert x.value == 0.5
    assert x.grad.tolist() == [1.0, 0.0]
    assert not x.hess.any()
    y = J.seed((0.5, 0.3), 1)
    assert y.value == 0.3
    assert y.grad.tolist() == [0.0, 1.0]


def test_seed_out_of_range():
    with pytest.raises(IndexError):
        J.seed((0.5, 0.3), 2)
    with pytest.raises(IndexError):
        J.seed((0.5,), -1)


def test_square_of_coordinate():
    x = J.seed([3.0], 0)
    sq = J.arith(x, x, "mul")
    assert (sq.value, sq.grad[0], sq.hess[0, 0]) == (9.0, 6.0, 2.0)


def test_add_constant():
    x = J.seed([0.0], 0)
    r = J.arith(x, J.constant(1.0, 1), "add")
    assert (r.value, r.grad[0], r.hess[0, 0]) == (1.0, 1.0, 0.0)


def test_reciprocal():
    x = J.seed([2.0], 0)
    r = J.arith(J.constant(1.0, 1), x, "div")
    assert (r.value, r.grad[0], r.hess[0, 0]) == (0.5, -0.25, 0.25)


def test_division_by_zero_is_reported():
    x = J.seed([0.0], 0)
    with pytest.raises(J.JetDomainError):
        J.arith(J.constant(1.0, 1), x, "div")


@pytest.mark.parametrize(
    "fn, x, expected",
    [
        ("sin", 0.0, (0.0, 1.0, 0.0)),
        ("exp", 0.0, (1.0, 1.0, 1.0)),
        ("cos", 0.0, (1.0, 0.0, -1.0)),
        ("sqrt", 4.0, (2.0, 0.25, -1.0 / 32.0)),
    ],
)
def test_elementary_at_known_points(fn, x, expected):
    r = J.elementary(J.seed([x], 0), fn)
    assert (r.value, r.grad[0], r.hess[0, 0]) == pytest.approx(expected, abs=1e-15)


def test_cos_of_scaled_coordinate():
    a = 2.0
    r = J.cos(a * J.seed([0.0], 0))
    assert (r.value, r.grad[0], r.hess[0, 0]) == (1.0, 0.0, -4.0)


def test_sqrt_domain():
    with pytest.raises(J.JetDomainError):
        J.sqrt(J.seed([0.0], 0))
    with pytest.raises(J.JetDomainError):
        J.sqrt(J.seed([-1.0], 0))


def test_pow_const():
    x = J.seed([2.0], 0)
    r = J.pow_const(x, 3)
    assert (r.value, r.grad[0], r.hess[0, 0]) == (8.0, 12.0, 12.0)
    r = J.pow_const(x, -1)
    assert (r.value, r.grad[0], r.hess[0, 0]) == (0.5, -0.25, 0.25)
    r = J.pow_const(J.seed([0.0], 0), 1)
    assert (r.value, r.grad[0], r.hess[0, 0]) == (0.0, 1.0, 0.0)
    r = J.pow_const(J.seed([0.0], 0), 2)
    assert (r.value, r.grad[0], r.hess[0, 0]) == (0.0, 0.0, 2.0)
    with pytest.raises(J.JetDomainError):
        J.pow_const(J.seed([-1.0], 0), 0.5)
    with pytest.raises(J.JetDomainError):
        J.pow_const(J.seed([0.0], 0), -2)


def test_mixing_dimensions_is_an_error():
    with pytest.raises(J.JetDimensionError):
        J.seed([1.0], 0) + J.seed([1.0, 2.0], 0)


def test_jets_are_immutable():
    x = J.seed([1.0, 2.0], 0)
    with pytest.raises(AttributeError):
        x.value = 3.0
    with pytest.raises(ValueError):
        x.grad[0] = 5.0


def test_unknown_ops():
    x = J.seed([1.0], 0)
    with pytest.raises(ValueError):
        J.arith(x, x, "mod")
    with pytest.raises(ValueError):
        J.elementary(x, "tan")


def test_mixed_partials_of_product():
    # f = x y sin(x) at (1, 2)
    x, y = J.seed([1.0, 2.0], 0), J.seed([1.0, 2.0], 1)
    f = x * y * J.sin(x)
    s, c = math.sin(1.0), math.cos(1.0)
    assert f.grad == pytest.approx([2 * (s + c), s])
    assert f.hess == pytest.approx(np.array([[2 * (2 * c - s), s + c], [s + c, 0.0]]))


# random composed expressions over two coordinates, built from jets directly
_unary = st.sampled_from(["sin", "cos", "exp", "sq", "neg", "sqrtpos"])
_binary = st.sampled_from(["add", "sub", "mul", "div1"])


def _build(ops, x, y):
    stack = [x, y]
    for kind, op in ops:
        if kind == "u":
            a = stack.pop()
            if op == "sq":
                a = a * a
            elif op == "neg":
                a = -a
            elif op == "sqrtpos":
                a = J.sqrt(1.0 + a * a)
            elif op == "exp":
                a = J.exp(J.sin(a))
            else:
                a = J.elementary(a, op)
            stack.append(a)
        else:
            b = stack.pop() if len(stack) > 1 else x
            a = stack.pop() if stack else y
            if op == "div1":
                stack.append(a / (2.0 + J.cos(b)))
            else:
                stack.append(J.arith(a, b, op))
        stack.append(x if len(stack) % 2 else y)
    return stack[-1] * stack[0]


def _finite(*jets):
    return all(np.isfinite(j.value) and np.all(np.isfinite(j.hess)) for j in jets)


_programs = st.lists(
    st.one_of(st.tuples(st.just("u"), _unary), st.tuples(st.just("b"), _binary)), min_size=1, max_size=12
)
_coords = st.floats(-2.0, 2.0, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(_programs, _coords, _coords)
def test_hessian_exactly_symmetric(program, u, v):
    f = _build(program, J.seed([u, v], 0), J.seed([u, v], 1))
    assume(_finite(f))
    assert np.array_equal(f.hess, f.hess.T)


@settings(max_examples=100, deadline=None)
@given(_programs, _programs, _coords, _coords, st.floats(-3, 3), st.floats(-3, 3))
def test_linearity_is_exact(p1, p2, u, v, alpha, beta):
    x, y = J.seed([u, v], 0), J.seed([u, v], 1)
    f, g = _build(p1, x, y), _build(p2, x, y)
    assume(_finite(f, g, alpha * f + beta * g))
    combined = alpha * f + beta * g
    assert combined.value == alpha * f.value + beta * g.value
    assert np.array_equal(combined.grad, alpha * f.grad + beta * g.grad)
    assert np.array_equal(combined.hess, alpha * f.hess + beta * g.hess)


_short_programs = st.lists(
    st.one_of(st.tuples(st.just("u"), _unary), st.tuples(st.just("b"), _binary)), min_size=1, max_size=6
)


@settings(max_examples=60, deadline=None)
@given(_short_programs, st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_composed_jets_match_finite_differences(program, u, v):
    def value(p):
        return _build(program, J.seed(p, 0), J.seed(p, 1)).value

    h = 1e-5
    p = np.array([u, v])
    f = _build(program, J.seed(p, 0), J.seed(p, 1))
    fd_grad = np.array([(value(p + h * e) - value(p - h * e)) / (2 * h) for e in np.eye(2)])
    scale = max(1.0, np.max(np.abs(f.grad)), abs(f.value))
    assert np.max(np.abs(fd_grad - f.grad)) <= 1e-6 * scale
