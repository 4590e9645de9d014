"""Propagation of interval Dempster-Shafer structures through nonlinear functions.

Each focal box is replaced by a Legendre chaos surrogate whose range is
bounded through its Bernstein coefficients.
"""

from .bernstein import (
    BernsteinPatch,
    DegenerateBoxError,
    PolySeries,
    bounded_range,
    enclosure,
    garloff_coefficients,
    legendre_to_power,
)
from .chaos import PCBasis, PCExpansion, encode_input, gauss_legendre, legendre_eval, legendre_norm_sq, project
from .evidence import (
    DSStructure,
    EvidenceError,
    TotalConflictError,
    belief,
    complementary_cumulative,
    cumulative,
    dempster_combine,
    exceedance_bounds,
    mix,
    plausibility,
)
from .expr import DomainError, ExprAst, ParseError, UnknownIdentifierError, eval_interval, eval_point, parse
from .interval import Interval
from .propagate import (
    PropagationConfig,
    PropagationError,
    PropagationResult,
    compare_methods,
    map_ds,
    oracle_bounds,
    propagate_box,
)

__version__ = "0.1.0"
