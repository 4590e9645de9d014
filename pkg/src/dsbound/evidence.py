"""Dempster-Shafer structures whose focal elements are closed intervals."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .interval import Interval, hull

MASS_TOL = 1e-12


class EvidenceError(ValueError):
    pass


class TotalConflictError(EvidenceError):
    """Dempster's rule is undefined: every pair of focal elements is disjoint."""


def parse_mass(value) -> float:
    """Accept a real number or a rational string such as ``"1/3"``."""
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise EvidenceError(f"invalid mass {value!r}") from exc
    return float(value)


def _merge(pairs: Iterable[tuple[Interval, float]]) -> tuple[tuple[Interval, float], ...]:
    acc: dict[Interval, list[float]] = defaultdict(list)
    for iv, m in pairs:
        acc[iv].append(m)
    return tuple((iv, math.fsum(acc[iv])) for iv in sorted(acc))


@dataclass(frozen=True)
class DSStructure:
    """Body of evidence ``{(interval, mass), ...}`` with masses summing to one.

    Entries sharing identical endpoints are merged by adding their masses and
    the focal list is kept sorted by ``(lo, hi)``.
    """

    focal: tuple[tuple[Interval, float], ...]

    def __init__(self, focal: Iterable[tuple[Interval | Sequence[float], float]]):
        pairs = []
        for iv, m in focal:
            if not isinstance(iv, Interval):
                iv = Interval(*iv)
            m = parse_mass(m)
            if not (m > 0 and math.isfinite(m)):
                raise EvidenceError(f"focal element {iv} has non-positive mass {m}")
            pairs.append((iv, m))
        if not pairs:
            raise EvidenceError("a DS structure needs at least one focal element")
        merged = _merge(pairs)
        total = math.fsum(m for _, m in merged)
        if abs(total - 1.0) > MASS_TOL:
            raise EvidenceError(f"masses sum to {total!r}, expected 1")
        object.__setattr__(self, "focal", merged)

    def __len__(self):
        return len(self.focal)

    def __iter__(self):
        return iter(self.focal)

    @property
    def intervals(self) -> list[Interval]:
        return [iv for iv, _ in self.focal]

    @property
    def masses(self) -> list[float]:
        return [m for _, m in self.focal]

    def hull(self) -> Interval:
        return hull(self.intervals)

    def mass_of(self, interval: Interval) -> float:
        for iv, m in self.focal:
            if iv == interval:
                return m
        return 0.0


def belief(ds: DSStructure, target: Interval) -> float:
    """Total mass of focal intervals contained in ``target``."""
    return math.fsum(m for iv, m in ds if target.contains_interval(iv))


def plausibility(ds: DSStructure, target: Interval) -> float:
    """Total mass of focal intervals that intersect ``target``."""
    return math.fsum(m for iv, m in ds if iv.intersects(target))


def dempster_combine(m1: DSStructure, m2: DSStructure) -> DSStructure:
    """Dempster's rule: conjunctive intersection, renormalised by ``1 - K``."""
    joint = []
    for a, ma in m1:
        for b, mb in m2:
            c = a.intersect(b)
            if c is not None:
                joint.append((c, ma * mb))
    if not joint:
        raise TotalConflictError("total conflict (K = 1) between the combined structures")
    # normalise by the surviving mass rather than 1 - K to keep the sum at 1 exactly
    norm = math.fsum(m for _, m in joint)
    return DSStructure(_merge((iv, m / norm) for iv, m in joint))


def conflict(m1: DSStructure, m2: DSStructure) -> float:
    """Conflict mass ``K`` of two structures."""
    return math.fsum(ma * mb for a, ma in m1 for b, mb in m2 if not a.intersects(b))


def mix(structures: Sequence[DSStructure], weights: Sequence[float] | None = None) -> DSStructure:
    """Weighted average of mass functions, normalised by the sum of weights."""
    if not structures:
        raise EvidenceError("mixing needs at least one structure")
    if weights is None:
        weights = [1.0] * len(structures)
    if len(weights) != len(structures):
        raise EvidenceError(f"got {len(weights)} weights for {len(structures)} structures")
    weights = [float(w) for w in weights]
    if any(w < 0 or not math.isfinite(w) for w in weights):
        raise EvidenceError("mixing weights must be finite and non-negative")
    total = math.fsum(weights)
    if total <= 0:
        raise EvidenceError("mixing weights are all zero")
    pairs = [(iv, m * (w / total)) for ds, w in zip(structures, weights) if w > 0 for iv, m in ds]
    return DSStructure(pairs)


def cumulative(ds: DSStructure, x: float) -> tuple[float, float]:
    """(CBF, CPF) at ``x``: mass with ``hi <= x`` and mass with ``lo <= x``."""
    cbf = math.fsum(m for iv, m in ds if iv.hi <= x)
    cpf = math.fsum(m for iv, m in ds if iv.lo <= x)
    return cbf, cpf


def complementary_cumulative(ds: DSStructure, x: float) -> tuple[float, float]:
    """(CCBF, CCPF) at ``x``, i.e. ``(1 - CPF, 1 - CBF)``."""
    cbf, cpf = cumulative(ds, x)
    return 1.0 - cpf, 1.0 - cbf


def exceedance_bounds(ds: DSStructure, threshold: float) -> tuple[float, float]:
    """Lower and upper bounds on ``P(X > threshold)``.

    The lower bound sums focal intervals lying entirely above the threshold,
    the upper bound those reaching above it.
    """
    lower = math.fsum(m for iv, m in ds if iv.lo > threshold)
    upper = math.fsum(m for iv, m in ds if iv.hi > threshold)
    return lower, upper
