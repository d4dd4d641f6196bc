"""Shared oracles and fixtures.

The oracles here never touch jets or Christoffel symbols: chart values come
from a plain float walk of the expression tree, derivatives from central
differences, and the Laplacian from the divergence form
``Delta u = g^{-1/2} d_i (sqrt(g) g^ij d_j u)``.
"""

import math

import numpy as np
import pytest

from takacheck import catalog
from takacheck.expr import Binary, Const, Param, Unary, Var
from takacheck.report import SamplePlan, generate_samples

ACCEPTANCE_LINES = []

_FLOAT_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "pow": lambda a, b: a**b,
    "neg": lambda a: -a,
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
}


def float_eval(node, x):
    if isinstance(node, (Const, Param)):
        return node.value
    if isinstance(node, Var):
        return float(x[node.index])
    if isinstance(node, Unary):
        return _FLOAT_OPS[node.op](float_eval(node.child, x))
    if isinstance(node, Binary):
        return _FLOAT_OPS[node.op](float_eval(node.left, x), float_eval(node.right, x))
    raise TypeError(node)


def chart_values(spec, x):
    return np.array([float_eval(c, x) for c in spec.components])


def fd_gradient(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def fd_hessian(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    m = x.size
    out = None
    for i in range(m):
        for j in range(m):
            ei = np.zeros(m)
            ej = np.zeros(m)
            ei[i] = h
            ej[j] = h
            val = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)
            if out is None:
                out = np.zeros(np.shape(val) + (m, m))
            out[..., i, j] = val
    return out


def fd_laplacian(spec, x, h_inner=1e-5, h_outer=2e-4):
    """Laplace-Beltrami of every component by nested central differences."""
    f = lambda y: chart_values(spec, y)  # noqa: E731

    def flux(y):
        dF = fd_gradient(f, y, h_inner)  # (N, m)
        g = dF.T @ dF
        return math.sqrt(np.linalg.det(g)) * np.linalg.solve(g, dF.T)  # (m, N)

    x = np.asarray(x, dtype=float)
    dF = fd_gradient(f, x, h_inner)
    sqrt_g = math.sqrt(np.linalg.det(dF.T @ dF))
    total = np.zeros(spec.N)
    for i in range(spec.m):
        e = np.zeros(spec.m)
        e[i] = h_outer
        total += (flux(x + e)[i] - flux(x - e)[i]) / (2 * h_outer)
    return total / sqrt_g


def random_rotation(N, seed=12345):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((N, N)))
    return q * np.sign(np.diag(r))


def catalog_cases():
    """(id, spec, frame, expected) for every catalog entry at default parameters."""
    out = []
    for id in catalog.list_entries():
        spec, frame, expected = catalog.instantiate(id)
        out.append((id, spec, frame, expected))
    return out


def samples_for(spec, count, seed=2024):
    return generate_samples(SamplePlan(seed=seed, count=count), spec.box)


@pytest.fixture(scope="session")
def cases():
    return catalog_cases()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
