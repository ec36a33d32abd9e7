import itertools
from functools import cmp_to_key

import numpy as np
import pytest

from qfdesign.aberration import alpha_wlp, compare_wlp
from qfdesign.errors import InvalidSize, ValidationError
from qfdesign.indicator import coefficients
from qfdesign.isomorphism import classify_geometric, geom_isomorphic
from qfdesign.search import (
    L18_COMBINATORIAL_CLASSES,
    SearchConfig,
    _rank_cmp,
    builtin_l18,
    candidate_subsets,
    enumerate_variants,
    level_permutation_reps,
    make_variant,
    min_aberration_projection,
    parse_perm_label,
    parse_variant,
    perm_label,
    realize,
    search,
)

from golden import GEOMETRIC_CLASS_COUNTS, MISPRINTS, TABLE6, printed_tol


def test_l18_rows(l18):
    assert l18.space.levels == (2, 3, 3, 3, 3, 3, 3, 3)
    assert tuple(l18.runs[0]) == (0,) * 8
    assert tuple(l18.runs[9]) == (1, 0, 0, 2, 2, 1, 1, 0)


def test_l18_is_strength_two(l18):
    for i, j in itertools.combinations(range(8), 2):
        si, sj = l18.space.levels[i], l18.space.levels[j]
        pairs = {}
        for r in l18.runs:
            pairs[(r[i], r[j])] = pairs.get((r[i], r[j]), 0) + 1
        assert len(pairs) == si * sj
        assert len(set(pairs.values())) == 1


def reverse_of(p):
    s = len(p)
    return tuple(s - 1 - v for v in p)


def test_level_permutation_reps():
    assert level_permutation_reps(3) == ((0, 1, 2), (1, 2, 0), (2, 0, 1))
    assert level_permutation_reps(2) == ((0, 1),)
    for s in (4, 5):
        reps = level_permutation_reps(s)
        assert len(reps) == len(list(itertools.permutations(range(s)))) // 2
        # pairing oracle: every permutation is a rep or the reversal of exactly one rep
        for p in itertools.permutations(range(s)):
            assert (p in reps) != (reverse_of(p) in reps)


def test_perm_labels():
    assert [perm_label(p) for p in level_permutation_reps(3)] == ["I", "u", "u2"]
    assert parse_perm_label("u²", 3) == (2, 0, 1)
    assert parse_perm_label("u^2", 3) == (2, 0, 1)
    assert parse_perm_label("p1032", 4) == (1, 0, 3, 2)
    with pytest.raises(ValidationError):
        parse_perm_label("v", 3)


def test_parse_variant_round_trip(l18):
    cols, perms = parse_variant("0 1u2 2 5u", l18)
    assert cols == (0, 1, 2, 5)
    v = make_variant(l18, cols, perms)
    assert v.label == "0 1u2 2 5u"
    # u2 maps 0->2, 1->0, 2->1 on the parent's column 1
    np.testing.assert_array_equal(v.design.runs[:, 1], np.array([2, 0, 1])[l18.runs[:, 1]])


def test_enumerate_counts(l18):
    assert len(list(enumerate_variants(l18, (1, 2, 3)))) == 27
    assert len(list(enumerate_variants(l18, (0, 1, 2, 5)))) == 27
    labels = [v.label for v in enumerate_variants(l18, (1, 2))]
    assert labels[:4] == ["1 2", "1 2u", "1 2u2", "1u 2"]


@pytest.mark.parametrize("name", list(L18_COMBINATORIAL_CLASSES))
def test_geometric_class_counts(l18, name):
    variants = list(enumerate_variants(l18, L18_COMBINATORIAL_CLASSES[name]))
    assert len(classify_geometric([v.design for v in variants])) == GEOMETRIC_CLASS_COUNTS[name]


def test_representatives_suffice(l18):
    perms = list(itertools.permutations(range(3)))
    full = [realize(l18, (1, 2, 3), ps) for ps in itertools.product(perms, repeat=3)]
    reps = [v.design for v in enumerate_variants(l18, (1, 2, 3))]
    full_classes = classify_geometric(full)
    assert len(full) == 216 and len(full_classes) == 2
    assert [c.key for c in full_classes] == [c.key for c in classify_geometric(reps)]


def beta345(design):
    from qfdesign.aberration import beta_wlp

    return beta_wlp(coefficients(design)).window(3, 5)


def expected_row(label, printed):
    out = []
    for pos, text in enumerate(printed):
        if (label, pos) in MISPRINTS:
            out.append((MISPRINTS[(label, pos)], 1e-4))
        else:
            out.append((float(text), printed_tol(text) + 1e-12))
    return out


@pytest.mark.parametrize("name", list(TABLE6))
def test_table6_rows(l18, name):
    variants = list(enumerate_variants(l18, L18_COMBINATORIAL_CLASSES[name]))
    classes = classify_geometric([v.design for v in variants])
    rows = TABLE6[name]
    assert len(rows) == len(classes)
    matched = set()
    for label, *printed in rows:
        expect = expected_row(label, printed)
        # the printed variant itself reproduces the row
        own = beta345(make_variant(l18, *parse_variant(label, l18)).design)
        assert all(abs(x - e) <= tol for x, (e, tol) in zip(own, expect)), (label, own)
        # and exactly one computed class carries it
        hits = [
            i for i, c in enumerate(classes)
            if all(abs(x - e) <= tol for x, (e, tol) in zip(beta345(c.representative), expect))
        ]
        assert hits, label
        matched.update(hits)
    assert matched == set(range(len(classes)))


def test_alpha_identical_across_variants(l18):
    for cols in [(1, 2, 3), (1, 2, 5, 6)]:
        variants = list(enumerate_variants(l18, cols))
        base = alpha_wlp(coefficients(variants[0].design)).values
        for v in variants[1:]:
            np.testing.assert_allclose(alpha_wlp(coefficients(v.design)).values, base, atol=1e-9)
        betas = {tuple(np.round(v.beta.values, 9)) for v in variants}
        assert len(betas) > 1


def test_candidate_subsets(l18):
    assert len(list(candidate_subsets(l18, 3))) == 35
    subsets = list(candidate_subsets(l18, 4, include_two_level=True))
    assert len(subsets) == 35 and all(s[0] == 0 for s in subsets)
    for m, inc in [(9, False), (8, False), (0, False), (9, True), (0, True)]:
        with pytest.raises(InvalidSize):
            list(candidate_subsets(l18, m, inc))


def test_min_aberration_three_factors(l18):
    best = min_aberration_projection(l18, 3, parent_id="L18")
    top = best[0]
    assert top.beta.window(3, 5) == pytest.approx((0, 0.125, 0.75), abs=1e-9)
    assert top.resolution() == 4
    published = make_variant(l18, *parse_variant("1u2 2 5", l18))
    assert any(geom_isomorphic(published.design, v.design) is not None for v in best)
    for v in best:
        assert compare_wlp(v.beta, top.beta) == 0


def test_ranking_independent_of_enumeration_order(l18):
    ranked = min_aberration_projection(l18, 3, full_ranking=True)
    order = np.random.default_rng(4).permutation(len(ranked))
    again = sorted([ranked[i] for i in order], key=cmp_to_key(_rank_cmp(1e-6)))
    assert [v.label for v in again] == [v.label for v in ranked]
    assert ranked[0].label == min_aberration_projection(l18, 3)[0].label


def test_parallel_matches_serial(l18):
    serial = min_aberration_projection(l18, 3, include_two_level=True)
    parallel = search(l18, SearchConfig(size=3, include_two_level=True, workers=2))
    assert [v.label for v in serial] == [v.label for v in parallel]
    for a, b in zip(serial, parallel):
        np.testing.assert_array_equal(a.beta.values, b.beta.values)


def test_invalid_size(l18):
    with pytest.raises(InvalidSize):
        min_aberration_projection(l18, 9)
