"""Power-form polynomials, Bernstein coefficients over boxes, and range bounds.

Coefficient arrays are dense numpy arrays indexed by multi-index, so a
polynomial of degree ``N = (n_1, ..., n_n)`` has an array of shape
``(n_1 + 1, ..., n_n + 1)``.  All coefficient transforms are separable and
are applied one axis at a time.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .chaos import MultiIndex, PCExpansion
from .interval import Interval


class DegenerateBoxError(ValueError):
    """A box component has zero width."""


def _trim(coeffs: np.ndarray) -> np.ndarray:
    nz = np.argwhere(coeffs != 0)
    if len(nz) == 0:
        return np.zeros((1,) * coeffs.ndim)
    top = nz.max(axis=0)
    return coeffs[tuple(slice(0, t + 1) for t in top)].copy()


@dataclass(frozen=True)
class PolySeries:
    """Multivariate polynomial ``sum_I alpha_I x^I`` stored as a dense array."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(np.asarray(self.coeffs, dtype=float)))

    @classmethod
    def from_terms(cls, terms: dict[MultiIndex, float], n_vars: int | None = None) -> PolySeries:
        if n_vars is None:
            n_vars = len(next(iter(terms)))
        shape = [1] * n_vars
        for idx in terms:
            shape = [max(s, i + 1) for s, i in zip(shape, idx)]
        arr = np.zeros(shape)
        for idx, c in terms.items():
            arr[tuple(idx)] += c
        return cls(arr)

    @property
    def n_vars(self) -> int:
        return self.coeffs.ndim

    @property
    def degree(self) -> MultiIndex:
        return tuple(s - 1 for s in self.coeffs.shape)

    def __getitem__(self, index: MultiIndex) -> float:
        index = tuple(index)
        if any(i >= s for i, s in zip(index, self.coeffs.shape)):
            return 0.0
        return float(self.coeffs[index])

    def terms(self) -> dict[MultiIndex, float]:
        return {tuple(int(i) for i in idx): float(self.coeffs[tuple(idx)]) for idx in np.argwhere(self.coeffs != 0)}

    def evaluate(self, x) -> np.ndarray:
        """Evaluate at points of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        letters = "abcdefghijklmnopqrstuvwxyz"[: self.n_vars]
        pows = [x[..., d, None] ** np.arange(s) for d, s in enumerate(self.coeffs.shape)]
        spec = letters + "," + ",".join("..." + c for c in letters) + "->..."
        return np.einsum(spec, self.coeffs, *pows)


@lru_cache(maxsize=None)
def _legendre_monomials(k: int) -> tuple[Fraction, ...]:
    """Exact monomial coefficients of the degree-``k`` Legendre polynomial."""
    if k == 0:
        return (Fraction(1),)
    if k == 1:
        return (Fraction(0), Fraction(1))
    a, b = _legendre_monomials(k - 1), _legendre_monomials(k - 2)
    j = k - 1
    out = [Fraction(0)] * (k + 1)
    for i, c in enumerate(a):
        out[i + 1] += Fraction(2 * j + 1, j + 1) * c
    for i, c in enumerate(b):
        out[i] -= Fraction(j, j + 1) * c
    return tuple(out)


def legendre_monomial_matrix(p: int) -> np.ndarray:
    """``M[k, i]`` is the coefficient of ``x^i`` in the degree-``k`` Legendre polynomial."""
    m = np.zeros((p + 1, p + 1))
    for k in range(p + 1):
        for i, c in enumerate(_legendre_monomials(k)):
            m[k, i] = float(c)
    return m


def legendre_to_power(pce: PCExpansion) -> PolySeries:
    """Rewrite a Legendre chaos expansion as a power series in the standard variables."""
    n, p = pce.basis.n_vars, pce.basis.order
    table = legendre_monomial_matrix(p)
    alpha = np.zeros((p + 1,) * n)
    for y, idx in zip(pce.coeffs, pce.basis.indices):
        if y == 0:
            continue
        term = np.array(y)
        for i in idx:
            term = np.multiply.outer(term, table[i])
        alpha += term
    return PolySeries(alpha)


def _apply_axis(arr: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(mat, arr, axes=([1], [axis])), 0, axis)


def _shift_matrix(n: int, lo: float) -> np.ndarray:
    # T[i, j] = C(j, i) * lo^(j - i) for j >= i
    t = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(i, n + 1):
            t[i, j] = math.comb(j, i) * lo ** (j - i)
    return t


@lru_cache(maxsize=None)
def _bernstein_matrix(n: int) -> np.ndarray:
    # B[i, j] = C(i, j) / C(n, j) for j <= i
    b = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(i + 1):
            b[i, j] = float(Fraction(math.comb(i, j), math.comb(n, j)))
    b.setflags(write=False)
    return b


def garloff_stages(poly: PolySeries, box: Sequence[Interval]):
    """Return the shifted, scaled and Bernstein coefficient arrays over ``box``."""
    if len(box) != poly.n_vars:
        raise ValueError(f"box has {len(box)} components for a {poly.n_vars}-variate polynomial")
    for d, iv in enumerate(box):
        if iv.width <= 0:
            raise DegenerateBoxError(f"box component {d} has zero width: {iv}")
    degree = poly.degree
    shifted = poly.coeffs
    for d, (nd, iv) in enumerate(zip(degree, box)):
        shifted = _apply_axis(shifted, _shift_matrix(nd, iv.lo), d)
    scaled = shifted
    for d, (nd, iv) in enumerate(zip(degree, box)):
        shape = [1] * poly.n_vars
        shape[d] = nd + 1
        scaled = scaled * (iv.width ** np.arange(nd + 1)).reshape(shape)
    beta = scaled
    for d, nd in enumerate(degree):
        beta = _apply_axis(beta, _bernstein_matrix(nd), d)
    return shifted, scaled, beta


@dataclass(frozen=True)
class BernsteinPatch:
    box: tuple[Interval, ...]
    degree: MultiIndex
    coeffs: np.ndarray

    def __getitem__(self, index: MultiIndex) -> float:
        return float(self.coeffs[tuple(index)])

    def corners(self):
        """Yield ``(vertex, coefficient)`` for every box vertex."""
        for bits in itertools.product((0, 1), repeat=len(self.box)):
            idx = tuple(b * n for b, n in zip(bits, self.degree))
            vertex = tuple(iv.hi if b else iv.lo for b, iv in zip(bits, self.box))
            yield vertex, float(self.coeffs[idx])

    def evaluate(self, x) -> np.ndarray:
        """Evaluate the Bernstein form at points of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for idx in itertools.product(*(range(n + 1) for n in self.degree)):
            term = np.full(x.shape[:-1], self.coeffs[idx])
            for d, (i, n, iv) in enumerate(zip(idx, self.degree, self.box)):
                t = (x[..., d] - iv.lo) / iv.width
                term = term * math.comb(n, i) * t**i * (1 - t) ** (n - i)
            out = out + term
        return out


def garloff_coefficients(poly: PolySeries, box: Sequence[Interval]) -> BernsteinPatch:
    """Bernstein coefficients of ``poly`` over ``box`` by Garloff's transformation."""
    _, _, beta = garloff_stages(poly, box)
    return BernsteinPatch(tuple(box), poly.degree, beta)


def enclosure(patch: BernsteinPatch) -> Interval:
    return Interval(float(patch.coeffs.min()), float(patch.coeffs.max()))


def subdivide(box: Sequence[Interval], k: int) -> list[tuple[Interval, ...]]:
    """Split every axis into ``k`` equal pieces; sub-boxes in row-major order."""
    if k < 1:
        raise ValueError("need at least one subdivision per axis")
    axes = []
    for iv in box:
        edges = np.linspace(iv.lo, iv.hi, k + 1)
        edges[0], edges[-1] = iv.lo, iv.hi
        axes.append([Interval(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])])
    return list(itertools.product(*axes))


def bounded_range(poly: PolySeries, box: Sequence[Interval], k: int = 1) -> Interval:
    """Bound the range of ``poly`` over ``box`` using ``k`` equal sub-boxes per axis.

    The result is the hull of the Bernstein coefficient ranges of all sub-boxes.
    """
    lo, hi = math.inf, -math.inf
    for sub in subdivide(box, k):
        _, _, beta = garloff_stages(poly, sub)
        lo = min(lo, float(beta.min()))
        hi = max(hi, float(beta.max()))
    return Interval(lo, hi)
