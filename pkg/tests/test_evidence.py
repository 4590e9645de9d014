import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsbound.evidence import (
    DSStructure,
    EvidenceError,
    TotalConflictError,
    belief,
    complementary_cumulative,
    conflict,
    cumulative,
    dempster_combine,
    exceedance_bounds,
    mix,
    parse_mass,
    plausibility,
)
from dsbound.interval import Interval

from conftest import A_SOURCES, B_SOURCES


def test_parse_mass_rationals():
    assert parse_mass("1/3") == float(Fraction(1, 3))
    assert parse_mass(" 0.25 ") == 0.25
    with pytest.raises(EvidenceError):
        parse_mass("one third")


def test_structure_invariants_enforced():
    with pytest.raises(EvidenceError, match="sum"):
        DSStructure([((0, 1), 0.5)])
    with pytest.raises(EvidenceError, match="non-positive"):
        DSStructure([((0, 1), 1.0), ((1, 2), 0.0)])
    with pytest.raises(ValueError):
        DSStructure([((1, 0), 1.0)])
    with pytest.raises(EvidenceError):
        DSStructure([])


def test_duplicates_merge_exactly():
    ds = DSStructure([((0, 1), 0.25), ((2, 3), 0.5), ((0, 1), 0.25)])
    assert ds.focal == ((Interval(0, 1), 0.5), (Interval(2, 3), 0.5))
    # no tolerance in the duplicate test
    ds = DSStructure([((0, 1), 0.5), ((0, 1 + 1e-15), 0.5)])
    assert len(ds) == 2


def test_belief_examples(three_focal):
    assert belief(three_focal, Interval(0, 5)) == pytest.approx(2 / 3, abs=1e-15)
    assert belief(three_focal, three_focal.hull()) == 1.0
    assert belief(three_focal, Interval(4.5, 5)) == 0.0


def test_plausibility_examples(three_focal):
    assert plausibility(three_focal, Interval(0, 2)) == pytest.approx(2 / 3, abs=1e-15)
    assert plausibility(three_focal, Interval(5, 7)) == pytest.approx(1 / 3, abs=1e-15)
    assert plausibility(three_focal, Interval(7, 8)) == 0.0


def test_dempster_examples():
    out = dempster_combine(DSStructure([((0, 2), 1)]), DSStructure([((1, 3), 1)]))
    assert out.focal == ((Interval(1, 2), 1.0),)

    m1 = DSStructure([((0, 1), 0.5), ((2, 3), 0.5)])
    m2 = DSStructure([((0, 1), 1)])
    assert conflict(m1, m2) == 0.5
    assert dempster_combine(m1, m2).focal == ((Interval(0, 1), 1.0),)

    with pytest.raises(TotalConflictError):
        dempster_combine(DSStructure([((0, 1), 1)]), DSStructure([((2, 3), 1)]))


def test_dempster_hand_computed_masses():
    # {[0,2]:.6, [1,4]:.4} (+) {[1,3]:.5, [3,5]:.5}
    # pairs: [1,2]:.3  [?]:conflict .3 ([0,2]&[3,5])  [1,3]:.2  [3,4]:.2 ; K = .3
    m1 = DSStructure([((0, 2), 0.6), ((1, 4), 0.4)])
    m2 = DSStructure([((1, 3), 0.5), ((3, 5), 0.5)])
    out = dempster_combine(m1, m2)
    assert conflict(m1, m2) == pytest.approx(0.3)
    assert out.mass_of(Interval(1, 2)) == pytest.approx(0.3 / 0.7)
    assert out.mass_of(Interval(1, 3)) == pytest.approx(0.2 / 0.7)
    assert out.mass_of(Interval(3, 4)) == pytest.approx(0.2 / 0.7)


def test_mix_reproduces_aggregated_inputs():
    a = mix([DSStructure(s) for s in A_SOURCES], [1, 1])
    assert a.focal == ((Interval(0.1, 0.5), 0.1), (Interval(0.5, 1.0), 0.4), (Interval(0.6, 0.9), 0.5))
    b = mix([DSStructure(s) for s in B_SOURCES], [1, 1, 1])
    assert b.intervals == [Interval(*iv) for iv in [(0, 0.2), (0.2, 0.4), (0.3, 0.5), (0.4, 0.6), (0.6, 0.8), (0.6, 1.0)]]
    assert b.masses == pytest.approx([0.111, 0.144, 0.144, 0.233, 0.3, 0.067], abs=5e-4)


def test_mix_single_source_identity(three_focal):
    assert mix([three_focal], [3.5]) == three_focal


def test_mix_weights_are_normalised():
    s1, s2 = DSStructure([((0, 1), 1)]), DSStructure([((2, 3), 1)])
    out = mix([s1, s2], [3, 1])
    assert out.mass_of(Interval(0, 1)) == 0.75
    assert out.mass_of(Interval(2, 3)) == 0.25
    assert mix([s1, s2], [0, 2]) == s2


@pytest.mark.parametrize("structures, weights", [([], []), ([DSStructure([((0, 1), 1)])], [0]), ([DSStructure([((0, 1), 1)])], [1, 1])])
def test_mix_errors(structures, weights):
    with pytest.raises(EvidenceError):
        mix(structures, weights)


def test_cumulative_examples(three_focal):
    cbf, cpf = cumulative(three_focal, 4)
    assert cbf == pytest.approx(2 / 3, abs=1e-15) and cpf == pytest.approx(1.0, abs=1e-15)
    assert cumulative(three_focal, 0) == (0, 0)
    assert cumulative(three_focal, 10) == pytest.approx((1, 1), abs=1e-15)


def test_complementary_examples(three_focal):
    ccbf, ccpf = complementary_cumulative(three_focal, 4)
    assert ccbf == pytest.approx(0, abs=1e-15) and ccpf == pytest.approx(1 / 3, abs=1e-15)
    assert complementary_cumulative(three_focal, 0) == (1, 1)
    assert complementary_cumulative(three_focal, 10) == pytest.approx((0, 0), abs=1e-15)


def test_exceedance_trivial(three_focal):
    assert exceedance_bounds(three_focal, 10) == (0, 0)
    assert exceedance_bounds(three_focal, 0) == pytest.approx((1, 1), abs=1e-15)


# --- property tests ---------------------------------------------------------

endpoint = st.floats(-10, 10, allow_nan=False).map(lambda x: round(x, 3))


@st.composite
def structures(draw, max_size=6):
    n = draw(st.integers(1, max_size))
    ivs = [tuple(sorted((draw(endpoint), draw(endpoint)))) for _ in range(n)]
    raw = [draw(st.floats(0.01, 1)) for _ in range(n)]
    total = math.fsum(raw)
    masses = [r / total for r in raw]
    masses[-1] = 1 - math.fsum(masses[:-1])
    return DSStructure(zip(ivs, masses))


def _total(ds):
    return math.fsum(ds.masses)


@given(structures(), structures(), st.lists(st.floats(0.1, 5), min_size=2, max_size=2))
def test_mass_normalisation(d1, d2, w):
    assert abs(_total(d1) - 1) <= 1e-12
    assert abs(_total(mix([d1, d2], w)) - 1) <= 1e-12
    try:
        out = dempster_combine(d1, d2)
    except TotalConflictError:
        return
    assert abs(_total(out) - 1) <= 1e-12


@given(structures(), endpoint, endpoint)
def test_bound_ordering(ds, x, y):
    t = Interval(*sorted((x, y)))
    assert belief(ds, t) <= plausibility(ds, t)
    cbf, cpf = cumulative(ds, x)
    ccbf, ccpf = complementary_cumulative(ds, x)
    assert cbf <= cpf and ccbf <= ccpf
    assert exceedance_bounds(ds, x) == pytest.approx((ccbf, ccpf), abs=1e-12)


@given(structures(), endpoint)
def test_duality_on_half_lines(ds, x):
    # Pl((-inf, x]) = 1 - Bel((x, inf)), both restricted to the hull
    h = ds.hull()
    lo = h.lo - 1
    pl_left = plausibility(ds, Interval(lo, max(x, lo)))
    bel_right = math.fsum(m for iv, m in ds if iv.lo > x)
    assert pl_left == pytest.approx(1 - bel_right, abs=1e-12)
    assert cumulative(ds, x)[1] == pytest.approx(pl_left, abs=1e-12)


@given(structures(), endpoint, endpoint)
def test_cumulative_monotone(ds, x, y):
    x, y = sorted((x, y))
    cx, cy = cumulative(ds, x), cumulative(ds, y)
    assert cx[0] <= cy[0] and cx[1] <= cy[1]


@given(structures())
def test_dempster_with_vacuous_is_identity(ds):
    vac = DSStructure([(ds.hull(), 1)])
    out = dempster_combine(ds, vac)
    assert out.intervals == ds.intervals
    assert out.masses == pytest.approx(ds.masses, abs=1e-15)


@given(structures(), st.integers(1, 5))
def test_mix_copies_is_identity(ds, n):
    out = mix([ds] * n, [1] * n)
    assert out.intervals == ds.intervals
    assert out.masses == pytest.approx(ds.masses, abs=1e-15)
