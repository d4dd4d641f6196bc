"""Second-order forward-mode jets.

A :class:`Jet2` carries the value, gradient and Hessian of one scalar with
respect to the ``m`` chart coordinates. Arithmetic on jets applies the
product, quotient and chain rules exactly, so everything built on top of them
is free of truncation error.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Jet2",
    "JetError",
    "JetDimensionError",
    "JetDomainError",
    "seed",
    "constant",
    "arith",
    "elementary",
    "sin",
    "cos",
    "exp",
    "sqrt",
    "pow_const",
]


class JetError(ValueError):
    """Base class for jet arithmetic failures."""


class JetDimensionError(JetError):
    """Raised when jets over different coordinate counts are combined."""


class JetDomainError(JetError):
    """Raised when an operation leaves its domain (division by zero, sqrt of <= 0).

    ``point`` is filled in by callers that know where the jet was evaluated.
    """

    def __init__(self, message: str, point: Sequence[float] | None = None):
        super().__init__(message)
        self.reason = message
        self.point = None if point is None else tuple(float(p) for p in point)

    def __str__(self) -> str:
        if self.point is None:
            return self.reason
        return f"{self.reason} at point {self.point}"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Jet2:
    """Value, gradient and (symmetric) Hessian of a scalar function.

    Instances are immutable. Plain ``int``/``float`` operands are promoted to
    constant jets, so ``2 * x + 1`` works as expected.
    """

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad, hess):
        grad = np.array(grad, dtype=float)
        hess = np.array(hess, dtype=float)
        m = grad.shape[0] if grad.ndim == 1 else -1
        if grad.ndim != 1 or hess.shape != (m, m):
            raise JetDimensionError(
                f"inconsistent jet shapes: grad {grad.shape}, hess {hess.shape}"
            )
        # (H + H^T) / 2 leaves an already symmetric H bit-for-bit unchanged.
        hess = 0.5 * (hess + hess.T)
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "grad", _frozen(grad))
        object.__setattr__(self, "hess", _frozen(hess))

    def __setattr__(self, name, value):
        raise AttributeError("Jet2 is immutable")

    @property
    def m(self) -> int:
        return self.grad.shape[0]

    def __repr__(self) -> str:
        return (
            f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r}, "
            f"hess={self.hess.tolist()!r})"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Jet2):
            return NotImplemented
        return (
            self.value == other.value
            and np.array_equal(self.grad, other.grad)
            and np.array_equal(self.hess, other.hess)
        )

    __hash__ = None  # type: ignore[assignment]

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.m != self.m:
                raise JetDimensionError(f"cannot mix jets with m={self.m} and m={other.m}")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return constant(float(other), self.m)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            k = float(other)
            return Jet2(k * self.value, k * self.grad, k * self.hess)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        cross = np.outer(a.grad, b.grad)
        return Jet2(
            a.value * b.value,
            a.value * b.grad + b.value * a.grad,
            a.value * b.hess + b.value * a.hess + cross + cross.T,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * _reciprocal(other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * _reciprocal(self)

    def __pow__(self, exponent):
        if isinstance(exponent, Jet2):
            raise TypeError("jet exponents must be constants")
        return pow_const(self, float(exponent))


def seed(point: Sequence[float], coordinate_index: int) -> Jet2:
    """Jet of the coordinate function ``x_i`` at ``point``."""
    point = np.asarray(point, dtype=float).reshape(-1)
    m = point.shape[0]
    if not 0 <= coordinate_index < m:
        raise IndexError(f"coordinate index {coordinate_index} out of range for m={m}")
    grad = np.zeros(m)
    grad[coordinate_index] = 1.0
    return Jet2(point[coordinate_index], grad, np.zeros((m, m)))


def constant(value: float, m: int) -> Jet2:
    return Jet2(value, np.zeros(m), np.zeros((m, m)))


def _chain(a: Jet2, f0: float, f1: float, f2: float) -> Jet2:
    # g(a): grad = g'(a) a', hess = g''(a) a' a'^T + g'(a) a''
    return Jet2(f0, f1 * a.grad, f2 * np.outer(a.grad, a.grad) + f1 * a.hess)


def _reciprocal(b: Jet2) -> Jet2:
    v = b.value
    if v == 0.0:
        raise JetDomainError("division by zero")
    return _chain(b, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))


def sin(a: Jet2) -> Jet2:
    s, c = math.sin(a.value), math.cos(a.value)
    return _chain(a, s, c, -s)


def cos(a: Jet2) -> Jet2:
    s, c = math.sin(a.value), math.cos(a.value)
    return _chain(a, c, -s, -c)


def exp(a: Jet2) -> Jet2:
    e = math.exp(a.value)
    return _chain(a, e, e, e)


def sqrt(a: Jet2) -> Jet2:
    if not a.value > 0.0:
        raise JetDomainError(f"sqrt of non-positive value {a.value!r}")
    r = math.sqrt(a.value)
    return _chain(a, r, 0.5 / r, -0.25 / (r * a.value))


def pow_const(a: Jet2, p: float) -> Jet2:
    """``a ** p`` for a real constant ``p``.

    Integer exponents accept any base (zero included when ``p >= 0``);
    fractional exponents need a positive base.
    """
    p = float(p)
    v = a.value
    integral = p.is_integer()
    if p == 0.0:
        return constant(1.0, a.m)
    if integral:
        if v == 0.0 and p < 0:
            raise JetDomainError(f"zero raised to negative power {p!r}")
    elif not v > 0.0:
        raise JetDomainError(f"non-positive base {v!r} raised to fractional power {p!r}")
    f0 = v**p
    # p == 1 is special-cased so a zero base never meets 0 ** -1.
    f1 = 1.0 if p == 1.0 else p * v ** (p - 1)
    f2 = 0.0 if p == 1.0 else p * (p - 1) * v ** (p - 2)
    return _chain(a, f0, f1, f2)


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}

_ELEMENTARY = {"sin": sin, "cos": cos, "exp": exp, "sqrt": sqrt}


def arith(a: Jet2, b: Union[Jet2, float], op: str) -> Jet2:
    """Combine two jets with one of ``add``, ``sub``, ``mul``, ``div``."""
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown arithmetic op {op!r}") from None
    return fn(a, b)


def elementary(a: Jet2, fn: str, exponent: float | None = None) -> Jet2:
    """Apply ``sin``, ``cos``, ``exp``, ``sqrt`` or ``pow_const`` to a jet."""
    if fn == "pow_const":
        if exponent is None:
            raise ValueError("pow_const needs an exponent")
        return pow_const(a, exponent)
    try:
        return _ELEMENTARY[fn](a)
    except KeyError:
        raise ValueError(f"unknown elementary function {fn!r}") from None
