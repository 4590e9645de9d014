"""Map DS structures on intervals through a function, one focal box at a time."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .bernstein import bounded_range, legendre_to_power
from .chaos import project
from .evidence import DSStructure
from .expr import ExprAst, ExprError, eval_array, eval_interval, eval_point
from .interval import Interval

log = logging.getLogger(__name__)

CHAOS = "chaos-bernstein"
BASELINE = "interval-baseline"
ORACLE = "grid-oracle"
METHODS = (CHAOS, BASELINE, ORACLE)


class PropagationError(RuntimeError):
    def __init__(self, box_id: int, cause: Exception):
        super().__init__(f"box {box_id}: {cause}")
        self.box_id = box_id
        self.cause = cause


@dataclass(frozen=True)
class PropagationConfig:
    order: int = 5
    quad_points: int = 20
    subdivisions: int = 11
    method: str = CHAOS
    oracle_grid: int = 101
    oracle_refine: int = 50

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.quad_points < self.order + 1:
            raise ValueError(f"quad_points must be >= order + 1 = {self.order + 1}, got {self.quad_points}")
        if self.subdivisions < 1:
            raise ValueError(f"subdivisions must be >= 1, got {self.subdivisions}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.oracle_grid < 2:
            raise ValueError("oracle_grid must be >= 2")

    def with_method(self, method: str) -> PropagationConfig:
        return PropagationConfig(
            self.order, self.quad_points, self.subdivisions, method, self.oracle_grid, self.oracle_refine
        )


@dataclass(frozen=True)
class BoxResult:
    box_id: int
    inputs: tuple[Interval, ...]
    output: Interval
    mass: float


@dataclass(frozen=True)
class PropagationResult:
    output: DSStructure
    boxes: tuple[BoxResult, ...]
    method: str
    variables: tuple[str, ...] = field(default=())


def _split_fixed(var_boxes: Mapping[str, Interval]):
    free = {k: iv for k, iv in var_boxes.items() if iv.width > 0}
    fixed = {k: iv.lo for k, iv in var_boxes.items() if iv.width == 0}
    return free, fixed


def surrogate(f: ExprAst, var_boxes: Mapping[str, Interval], order: int, quad_points: int):
    """Chaos surrogate over the non-degenerate variables, plus the pinned constants."""
    free, fixed = _split_fixed(var_boxes)
    return project(f, free, order, quad_points, fixed=fixed), fixed


def _chaos_bound(f: ExprAst, var_boxes: Mapping[str, Interval], cfg: PropagationConfig) -> Interval:
    free, fixed = _split_fixed(var_boxes)
    if not free:
        y = eval_point(f, fixed)
        return Interval(y, y)
    pce = project(f, free, cfg.order, cfg.quad_points, fixed=fixed)
    poly = legendre_to_power(pce)
    return bounded_range(poly, [Interval(-1.0, 1.0)] * len(free), cfg.subdivisions)


def propagate_box(f: ExprAst, var_boxes: Mapping[str, Interval], cfg: PropagationConfig) -> Interval:
    """Image interval of one input box under the configured method."""
    if cfg.method == CHAOS:
        return _chaos_bound(f, var_boxes, cfg)
    if cfg.method == BASELINE:
        return eval_interval(f, var_boxes)
    return oracle_bounds(f, var_boxes, cfg.oracle_grid, cfg.oracle_refine)


def _compass(f: ExprAst, names, box, start, steps, sign: float, iters: int) -> float:
    """Deterministic compass search minimising ``sign * f`` from ``start``."""
    x = list(start)
    best = sign * eval_point(f, dict(zip(names, x)))
    steps = list(steps)
    for _ in range(iters):
        improved = False
        for d, iv in enumerate(box):
            if steps[d] == 0:
                continue
            for delta in (-steps[d], steps[d]):
                trial = list(x)
                trial[d] = min(max(x[d] + delta, iv.lo), iv.hi)
                if trial[d] == x[d]:
                    continue
                val = sign * eval_point(f, dict(zip(names, trial)))
                if val < best:
                    best, x, improved = val, trial, True
                    break
        if not improved:
            steps = [s * 0.5 for s in steps]
    return sign * best


def oracle_bounds(
    f: ExprAst, var_boxes: Mapping[str, Interval], grid: int = 101, refine_iters: int = 50
) -> Interval:
    """Reference range by dense lattice evaluation followed by local refinement.

    The lattice includes every face and corner of the box; the extreme
    lattice points seed a compass search that only ever improves them.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    names = tuple(var_boxes)
    box = tuple(var_boxes[k] for k in names)
    axes = [np.linspace(iv.lo, iv.hi, grid) for iv in box]
    for ax, iv in zip(axes, box):
        ax[0], ax[-1] = iv.lo, iv.hi
    mesh = np.meshgrid(*axes, indexing="ij")
    values = eval_array(f, dict(zip(names, mesh)))
    imin = np.unravel_index(np.argmin(values), values.shape)
    imax = np.unravel_index(np.argmax(values), values.shape)
    spacing = [iv.width / (grid - 1) for iv in box]
    start_lo = [float(ax[i]) for ax, i in zip(axes, imin)]
    start_hi = [float(ax[i]) for ax, i in zip(axes, imax)]
    lo = min(float(values[imin]), _compass(f, names, box, start_lo, spacing, 1.0, refine_iters))
    hi = max(float(values[imax]), _compass(f, names, box, start_hi, spacing, -1.0, refine_iters))
    return Interval(lo, hi)


def product_boxes(inputs: Mapping[str, DSStructure]):
    """Yield ``(box_id, intervals, mass)`` over the focal product, first input fastest.

    For two inputs with ``n_a`` focal elements in the first, ``box_id`` is
    ``n_a * (j - 1) + i`` for the ``i``-th element of the first and ``j``-th
    of the second (both 1-based).
    """
    structures = list(inputs.values())
    ranges = [range(len(ds)) for ds in structures]
    # itertools.product varies the last factor fastest, so iterate reversed
    for box_id, rev in enumerate(itertools.product(*reversed(ranges)), start=1):
        idx = tuple(reversed(rev))
        intervals = tuple(ds.focal[i][0] for ds, i in zip(structures, idx))
        mass = math.prod(ds.focal[i][1] for ds, i in zip(structures, idx))
        yield box_id, intervals, mass


def map_ds(f: ExprAst, inputs: Mapping[str, DSStructure], cfg: PropagationConfig) -> PropagationResult:
    """Induced structure of ``f`` over independent inputs.

    Each product box gets the product of its input masses; boxes whose
    images coincide exactly are merged.
    """
    names = tuple(inputs)
    boxes = []
    for box_id, intervals, mass in product_boxes(inputs):
        try:
            y = propagate_box(f, dict(zip(names, intervals)), cfg)
        except (ExprError, ArithmeticError, ValueError) as exc:
            raise PropagationError(box_id, exc) from exc
        log.debug("box %d %s -> %s (mass %.6g)", box_id, intervals, y, mass)
        boxes.append(BoxResult(box_id, intervals, y, mass))
    output = DSStructure((b.output, b.mass) for b in boxes)
    return PropagationResult(output, tuple(boxes), cfg.method, names)


@dataclass(frozen=True)
class Comparison:
    box_id: int
    inputs: tuple[Interval, ...]
    mass: float
    chaos: Interval
    baseline: Interval
    oracle: Interval

    @property
    def baseline_contains_oracle(self) -> bool:
        return self.baseline.contains_interval(self.oracle)

    @property
    def chaos_inside_oracle(self) -> bool:
        """True when a surrogate bound sits strictly inside the reference range."""
        return self.chaos.lo > self.oracle.lo or self.chaos.hi < self.oracle.hi


def compare_methods(f: ExprAst, inputs: Mapping[str, DSStructure], cfg: PropagationConfig) -> list[Comparison]:
    names = tuple(inputs)
    rows = []
    for box_id, intervals, mass in product_boxes(inputs):
        var_boxes = dict(zip(names, intervals))
        try:
            chaos = propagate_box(f, var_boxes, cfg.with_method(CHAOS))
            baseline = propagate_box(f, var_boxes, cfg.with_method(BASELINE))
            oracle = propagate_box(f, var_boxes, cfg.with_method(ORACLE))
        except (ExprError, ArithmeticError, ValueError) as exc:
            raise PropagationError(box_id, exc) from exc
        row = Comparison(box_id, intervals, mass, chaos, baseline, oracle)
        if row.chaos_inside_oracle:
            log.info("box %d: surrogate bound %s inside reference range %s", box_id, chaos, oracle)
        rows.append(row)
    return rows
