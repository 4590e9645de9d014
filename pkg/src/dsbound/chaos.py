"""Tensor Legendre polynomial chaos surrogates built by non-intrusive projection.

Each physical variable on ``[lo, hi]`` is written as ``mid + half_width * xi``
with ``xi`` uniform on ``[-1, 1]``. The response is projected onto the
tensor Legendre basis of total degree ``<= p`` using a full tensor
Gauss-Legendre rule.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .expr import ExprAst, ExprError, eval_array
from .interval import Interval

MultiIndex = tuple[int, ...]


def legendre_eval(k: int, xi):
    """Degree-``k`` Legendre polynomial at ``xi`` (scalar or array), by recurrence."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    prev, cur = 1.0 + 0.0 * xi, xi
    if k == 0:
        return prev
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1) * xi * cur - j * prev) / (j + 1)
    return cur


def legendre_table(p: int, xi) -> np.ndarray:
    """Rows ``P_0(xi) .. P_p(xi)`` for every entry of the 1-D array ``xi``."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty((p + 1,) + xi.shape)
    out[0] = 1.0
    if p >= 1:
        out[1] = xi
    for j in range(1, p):
        out[j + 1] = ((2 * j + 1) * xi * out[j] - j * out[j - 1]) / (j + 1)
    return out


def legendre_norm_sq(index: MultiIndex) -> float:
    """``E[psi_I^2]`` under the uniform density on ``[-1, 1]^n``."""
    return math.prod(1.0 / (2 * i + 1) for i in index)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)

    def integrate(self, fn) -> float:
        return float(np.dot(self.weights, fn(self.nodes)))


def _legendre_with_derivative(q: int, x: np.ndarray):
    p_prev, p_cur = np.ones_like(x), x.copy()
    for j in range(1, q):
        p_prev, p_cur = p_cur, ((2 * j + 1) * x * p_cur - j * p_prev) / (j + 1)
    return p_cur, q * (x * p_cur - p_prev) / (x * x - 1.0)


def gauss_legendre(q: int, tol: float = 1e-14, max_iter: int = 100) -> QuadratureRule:
    """Gauss-Legendre rule on ``[-1, 1]`` with ``q`` points.

    Nodes are refined by Newton's method from the classical cosine
    approximation of the Legendre roots.
    """
    if q < 1:
        raise ValueError("need at least one quadrature point")
    i = np.arange(1, q + 1)
    x = np.cos(np.pi * (4 * i - 1) / (4 * q + 2))
    for _ in range(max_iter):
        pq, dp = _legendre_with_derivative(q, x)
        step = pq / dp
        x = x - step
        if np.max(np.abs(step)) < tol:
            break
    else:
        raise RuntimeError(f"Gauss-Legendre Newton iteration did not converge for q={q}")
    _, dp = _legendre_with_derivative(q, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return QuadratureRule(x[order], w[order])


def graded_indices(n: int, p: int) -> list[MultiIndex]:
    """Multi-indices of total degree ``<= p`` in graded lexicographic order.

    Within one total degree the first variable's exponent decreases, so for
    two variables the order is (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
    """
    out = []
    for d in range(p + 1):
        block = [I for I in itertools.product(range(d + 1), repeat=n) if sum(I) == d]
        out.extend(sorted(block, reverse=True))
    return out


@dataclass(frozen=True)
class PCBasis:
    n_vars: int
    order: int
    indices: tuple[MultiIndex, ...] = field(init=False)

    def __post_init__(self):
        if self.n_vars < 0 or self.order < 0:
            raise ValueError("basis dimension and order must be non-negative")
        object.__setattr__(self, "indices", tuple(graded_indices(self.n_vars, self.order)))

    def __len__(self):
        return len(self.indices)

    def position(self, index: MultiIndex) -> int:
        return self.indices.index(tuple(index))


def encode_input(interval: Interval) -> tuple[float, float]:
    """Chaos coefficients ``(c0, c1)`` with ``c0 + c1*xi`` covering the interval."""
    return 0.5 * (interval.hi + interval.lo), 0.5 * (interval.hi - interval.lo)


@dataclass(frozen=True)
class PCExpansion:
    """Coefficients ``y_k`` over a :class:`PCBasis`, tied to a physical box."""

    basis: PCBasis
    coeffs: np.ndarray
    box: tuple[Interval, ...]
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (len(self.basis),):
            raise ValueError(f"expected {len(self.basis)} coefficients, got shape {coeffs.shape}")
        if len(self.box) != self.basis.n_vars:
            raise ValueError("box dimension does not match the basis")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_terms(cls, terms: Mapping[MultiIndex, float], order: int, box=None):
        n = len(next(iter(terms)))
        basis = PCBasis(n, order)
        coeffs = np.zeros(len(basis))
        for idx, c in terms.items():
            coeffs[basis.position(idx)] = c
        if box is None:
            box = (Interval(-1.0, 1.0),) * n
        return cls(basis, coeffs, tuple(box))

    def coefficient(self, index: MultiIndex) -> float:
        return float(self.coeffs[self.basis.position(index)])

    def evaluate(self, xi) -> np.ndarray:
        """Evaluate in standard coordinates; ``xi`` has shape ``(..., n)``."""
        xi = np.asarray(xi, dtype=float)
        tables = [legendre_table(self.basis.order, xi[..., d]) for d in range(self.basis.n_vars)]
        out = np.zeros(xi.shape[:-1])
        for c, idx in zip(self.coeffs, self.basis.indices):
            term = np.full(xi.shape[:-1], c)
            for d, i in enumerate(idx):
                term = term * tables[d][i]
            out = out + term
        return out

    def to_standard(self, x) -> np.ndarray:
        """Map physical coordinates (shape ``(..., n)``) to ``[-1, 1]^n``."""
        x = np.asarray(x, dtype=float)
        c0 = np.array([encode_input(iv)[0] for iv in self.box])
        c1 = np.array([encode_input(iv)[1] for iv in self.box])
        return (x - c0) / c1


def tensor_grid(rule: QuadratureRule, n: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Nodes (one array per axis, ``indexing='ij'``) and product weights of the tensor rule."""
    axes = np.meshgrid(*([rule.nodes] * n), indexing="ij")
    w = np.ones([len(rule)] * n)
    for d in range(n):
        shape = [1] * n
        shape[d] = len(rule)
        w = w * rule.weights.reshape(shape)
    return axes, w


def project(
    f: ExprAst,
    var_boxes: Mapping[str, Interval],
    p: int,
    q: int,
    fixed: Mapping[str, float] | None = None,
) -> PCExpansion:
    """Galerkin projection of ``f`` onto the Legendre basis of total degree ``<= p``.

    ``var_boxes`` gives the uncertain variables in expansion order; ``fixed``
    pins any remaining variables of ``f`` to constants.
    """
    fixed = dict(fixed or {})
    names = tuple(var_boxes)
    if set(names) & set(fixed):
        raise ExprError("a variable cannot be both uncertain and fixed")
    missing = set(f.variables) - set(names) - set(fixed)
    extra = set(names) - set(f.variables)
    if missing or extra:
        raise ExprError(
            f"projection variables do not match the expression: missing {sorted(missing)}, "
            f"unknown {sorted(extra)}"
        )
    if p < 0 or q < 1:
        raise ValueError("need order p >= 0 and q >= 1 quadrature points")
    n = len(names)
    box = tuple(var_boxes[k] for k in names)
    rule = gauss_legendre(q)
    xi_axes, _ = tensor_grid(rule, n)
    env = {}
    for name, iv, xi in zip(names, box, xi_axes):
        c0, c1 = encode_input(iv)
        env[name] = c0 + c1 * xi
    shape = (q,) * n
    for name, val in fixed.items():
        env[name] = np.full(shape, float(val))
    values = eval_array(f, env) if env else np.asarray(eval_array(f, {}))

    # weighted Legendre values, uniform density 1/2 per axis
    vw = legendre_table(p, rule.nodes) * (0.5 * rule.weights)
    moments = values
    for _ in range(n):
        # contract the leading quadrature axis; the new degree axis goes last
        moments = np.tensordot(moments, vw, axes=([0], [1]))
    basis = PCBasis(n, p)
    coeffs = np.array([moments[idx] / legendre_norm_sq(idx) for idx in basis.indices])
    return PCExpansion(basis, coeffs, box, names)
