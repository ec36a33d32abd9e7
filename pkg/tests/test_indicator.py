import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfdesign.basis import Design, DesignSpace, contrast_value, opb_basis
from qfdesign.errors import (
    EmptyDesign,
    InconsistentCoefficients,
    InvalidProjection,
    ShapeError,
)
from qfdesign.indicator import (
    CoefficientTable,
    coefficients,
    combine,
    evaluate_indicator,
    indicator_values,
    project,
    reconstruct,
    second_moment,
    sum_of_squares,
)

from conftest import (
    LEFT_COEFFS,
    RIGHT_COEFFS,
    brute_multiplicity,
    make_left,
    make_right,
    random_design,
)


def brute_coefficients(design):
    """Oracle: b_t = (1/N) sum over runs of C_t(x), one product at a time."""
    sp = design.space
    b = opb_basis(sp)
    out = np.zeros(sp.levels)
    for t in sp.points():
        out[tuple(t)] = sum(contrast_value(b, t, x) for x in design.runs) / sp.N
    return out


@pytest.mark.parametrize("make, expected", [(make_left, LEFT_COEFFS), (make_right, RIGHT_COEFFS)])
def test_table1_coefficients(make, expected):
    table = coefficients(make())
    for t in itertools.product(range(3), repeat=3):
        assert table[t] == pytest.approx(expected.get(t, 0.0), abs=1e-9), t


def test_full_factorial_coefficients():
    for levels in [(3, 3), (2, 3, 4), (5,)]:
        sp = DesignSpace(levels)
        table = coefficients(sp.full_factorial())
        expect = np.zeros(levels)
        expect[(0,) * len(levels)] = 1.0
        np.testing.assert_allclose(table.values, expect, atol=1e-12)


def test_matches_brute_force_with_replicates():
    rng = np.random.default_rng(7)
    for levels in [(3, 3), (2, 3, 3), (2, 4)]:
        d = random_design(rng, levels, n=15)
        np.testing.assert_allclose(coefficients(d).values, brute_coefficients(d), atol=1e-12)


def test_b0_is_run_fraction():
    rng = np.random.default_rng(1)
    d = random_design(rng, (3, 3, 2), n=11)
    assert coefficients(d).b0 == pytest.approx(11 / 18, abs=1e-12)


def test_space_mismatch():
    with pytest.raises(ShapeError):
        coefficients(make_left(), opb_basis(DesignSpace((3, 3))))


def test_evaluate_indicator_examples(left):
    table = coefficients(left)
    assert evaluate_indicator(table, (0, 0, 0)) == 1
    assert evaluate_indicator(table, (0, 0, 1)) == 0
    doubled = combine([left, left])
    assert evaluate_indicator(coefficients(doubled), (0, 0, 0)) == 2
    assert brute_multiplicity(doubled, (0, 0, 0)) == 2


def test_evaluate_indicator_rejects_noninteger(left):
    table = coefficients(left)
    vals = table.values.copy()
    vals[1, 0, 0] += 0.05
    broken = CoefficientTable(table.space, table.basis, vals)
    with pytest.raises(InconsistentCoefficients):
        evaluate_indicator(broken, (0, 0, 0))


def test_combine_examples(left, right):
    cl = coefficients(left).values
    np.testing.assert_allclose(coefficients(combine([left, left])).values, 2 * cl, atol=1e-12)
    both = coefficients(combine([left, right]))
    assert both.b0 == pytest.approx(2 / 3, abs=1e-12)
    ff = left.space.full_factorial()
    shifted = coefficients(combine([left, ff])).values
    expect = cl.copy()
    expect[0, 0, 0] += 1
    np.testing.assert_allclose(shifted, expect, atol=1e-12)
    with pytest.raises(ShapeError):
        combine([left, Design.from_runs((3, 3), [(0, 0)])])


def test_project_examples(left, l18):
    p = project(left, [0, 1])
    counts = p.counts()
    assert np.all(counts == 1)
    table = coefficients(p)
    expect = np.zeros((3, 3))
    expect[0, 0] = 1
    np.testing.assert_allclose(table.values, expect, atol=1e-12)
    assert project(left, [0, 1, 2]).same_runs(left)
    with pytest.raises(InvalidProjection):
        project(left, [])
    with pytest.raises(InvalidProjection):
        project(left, [0, 5])


def projection_identity_holds(design, keep, tol=1e-9):
    """Coefficients of the projection equal N2 * parent b_t on t supported in keep."""
    parent = coefficients(design).values
    sub = coefficients(project(design, keep)).values
    dropped = [i for i in range(design.space.k) if i not in keep]
    n2 = int(np.prod([design.space.levels[i] for i in dropped])) if dropped else 1
    index = [slice(None)] * design.space.k
    for i in dropped:
        index[i] = 0
    restricted = parent[tuple(index)]
    # axes of `restricted` follow sorted(keep); reorder to the order of keep
    kept_sorted = sorted(keep)
    restricted = np.transpose(restricted, [kept_sorted.index(i) for i in keep])
    return np.abs(sub - n2 * restricted).max() < tol


def test_projection_identity_l18(l18):
    assert projection_identity_holds(l18, [1, 2, 3])
    assert projection_identity_holds(l18, [0, 5, 2])


def test_projection_identity_all_fixture_projections(left, right, l18):
    for d in (left, right):
        for r in (1, 2, 3):
            for keep in itertools.permutations(range(3), r):
                assert projection_identity_holds(d, list(keep))
    for r in (1, 2, 3):
        for keep in itertools.combinations(range(8), r):
            assert projection_identity_holds(l18, list(keep))


def test_sum_of_squares_examples(left, right):
    assert sum_of_squares(coefficients(left)) == pytest.approx(3, abs=1e-9)
    assert sum_of_squares(coefficients(right)) == pytest.approx(3, abs=1e-9)
    doubled = combine([left, left])
    # n2 N / n^2 = 36 * 27 / 18^2 = 3: doubling scales b_t and b_0 alike
    brute = float(((brute_coefficients(doubled) / (18 / 27)) ** 2).sum())
    assert brute == pytest.approx(3, abs=1e-9)
    assert sum_of_squares(coefficients(doubled)) == pytest.approx(3, abs=1e-9)
    assert second_moment(doubled) == 36


def test_sum_of_squares_empty():
    empty = Design.from_runs((3, 3), np.zeros((0, 2), dtype=int))
    with pytest.raises(EmptyDesign):
        sum_of_squares(coefficients(empty))


@pytest.mark.parametrize("levels", [(3, 3), (3, 3, 3), (2, 3, 3)])
def test_sum_of_squares_identity_random(levels):
    rng = np.random.default_rng(sum(levels))
    for _ in range(100):
        d = random_design(rng, levels, max_runs=30)
        n2 = sum(brute_multiplicity(d, x) ** 2 for x in d.space.points())
        expect = n2 * d.space.N / d.n**2
        assert sum_of_squares(coefficients(d)) == pytest.approx(expect, abs=1e-9)


design_strategy = st.lists(st.integers(2, 3), min_size=1, max_size=4).flatmap(
    lambda levels: st.tuples(
        st.just(tuple(levels)),
        st.lists(
            st.tuples(*[st.integers(0, s - 1) for s in levels]), min_size=0, max_size=20
        ),
    )
)


@settings(max_examples=100, deadline=None)
@given(design_strategy)
def test_round_trip_counts(case):
    levels, runs = case
    d = Design.from_runs(levels, np.array(runs, dtype=int).reshape(-1, len(levels)))
    table = coefficients(d)
    for x in d.space.points():
        assert evaluate_indicator(table, x) == brute_multiplicity(d, x)
    assert reconstruct(table).same_runs(d)


@settings(max_examples=60, deadline=None)
@given(design_strategy, design_strategy)
def test_uniqueness(a, b):
    if a[0] != b[0]:
        return
    da = Design.from_runs(a[0], np.array(a[1], dtype=int).reshape(-1, len(a[0])))
    db = Design.from_runs(b[0], np.array(b[1], dtype=int).reshape(-1, len(b[0])))
    same_coeffs = np.abs(coefficients(da).values - coefficients(db).values).max() < 1e-9
    assert same_coeffs == da.same_runs(db)


def test_indicator_values_equal_counts(l18):
    np.testing.assert_allclose(indicator_values(coefficients(l18)), l18.counts(), atol=1e-9)


def test_disjoint_product_identity(left, right):
    """b_{u+v} equals (1/N) sum_A C_u C_v for disjoint u, v."""
    for d in (left, right):
        table = coefficients(d)
        b = opb_basis(d.space)
        pts = d.space.points()
        for u in pts:
            for v in pts:
                if any(min(a, c) for a, c in zip(u, v)):
                    continue
                direct = sum(contrast_value(b, u, x) * contrast_value(b, v, x) for x in d.runs)
                assert table[u + v] - direct / d.space.N == pytest.approx(0, abs=1e-9)
