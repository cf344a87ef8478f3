"""Reduction-type classifier: regime formulas, partitions, full models."""

from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, strategies as st

from padicover.classifier import (
    ClassifierError,
    InadmissiblePartition,
    InvalidProfile,
    NotSimpleReduction,
    PartitionPair,
    ThresholdUndefined,
    admissible_partitions,
    analyze_tail,
    classify_cover,
    classify_formula,
    tail_regime,
    tail_threshold,
)
from padicover.cover import from_critical_divisor
from padicover.dualgraph import DualGraphPair, InvalidDualGraph, diff_pairs
from padicover.field import FieldContext


def edge_map(model, side):
    edges = model.x_edges if side == "x" else model.y_edges
    return {b: (a, t) for a, b, t in edges}


def arm_thicknesses(model, side, parent):
    edges = model.x_edges if side == "x" else model.y_edges
    return sorted(t for a, _b, t in edges if a == parent)


def rational_cover(p, points, e=1):
    ctx = FieldContext(p, e)
    return from_critical_divisor(
        [(ctx.from_rational(F(x)), m) for x, m in points], ctx
    )


# -- single-arm and star models ---------------------------------------------


def test_ordinary_pair_model():
    res = classify_formula(5, [{"name": "mu", "profile": [3, 1, 1]}])
    model = res.model
    assert set(model.x_marks) == {"C", "C'(mu)"}
    assert edge_map(model, "x")["C'(mu)"] == ("C", F(1, 2))
    assert edge_map(model, "y")["D'(mu)"] == ("D", F(5, 2))
    assert model.x_marks["C'(mu)"] == (("mu", 3), ("mu", 1), ("mu", 1))
    assert model.vertical["C"].kind == "inseparable"
    vm = model.vertical["C'(mu)"]
    assert (vm.target, vm.degree, vm.kind) == ("D'(mu)", 5, "etale")


def test_good_reduction_stars():
    res = classify_formula(
        5,
        [
            {"name": "0", "profile": [3, 1, 1]},
            {"name": "1", "profile": [2, 1, 1, 1]},
            {"name": "lam", "profile": [2, 1, 1, 1]},
        ],
    )
    model = res.model
    assert len(model.x_marks) == len(model.y_marks) == 4
    assert arm_thicknesses(model, "x", "C") == [F(1, 3), F(1, 3), F(1, 2)]
    assert arm_thicknesses(model, "y", "D") == [F(5, 3), F(5, 3), F(5, 2)]
    assert not res.tails

    res3 = classify_formula(
        3, [{"name": "0", "profile": [2, 1]}, {"name": "b", "profile": [2, 1]}]
    )
    assert arm_thicknesses(res3.model, "x", "C") == [F(1), F(1)]
    assert arm_thicknesses(res3.model, "y", "D") == [F(3), F(3)]


# -- thresholds and regimes ---------------------------------------------------


def test_showcase_thresholds():
    assert tail_threshold(5, (3, 1, 1), (2, 1, 1, 1)) == F(5)
    assert tail_threshold(5, (2, 1, 1, 1), (2, 1, 1, 1)) == F(5, 2)
    for eps, want in ((F(1), "far"), (F(5), "critical"), (F(7), "near")):
        assert tail_regime(5, (3, 1, 1), (2, 1, 1, 1), eps) == want
    for eps, want in ((F(1), "far"), (F(5, 2), "critical"), (F(3), "near")):
        assert tail_regime(5, (2, 1, 1, 1), (2, 1, 1, 1), eps) == want


def test_threshold_undefined_when_fibers_saturate():
    # n1 + n2 = p + 1 leaves no room between the pair and infinity
    with pytest.raises(ThresholdUndefined) as exc:
        tail_threshold(5, (4, 1), (2, 1, 1, 1))
    assert "p + 1 = 6" in str(exc.value)
    # at p = 3 every tail pair saturates: profiles have at most 2 parts
    with pytest.raises(ThresholdUndefined):
        tail_threshold(3, (2, 1), (2, 1))


# -- the far regime -----------------------------------------------------------


def test_far_showcase_model():
    res = classify_formula(
        5,
        [
            {"name": "0", "profile": [3, 1, 1], "tail_with": "lam", "epsilon": "1"},
            {"name": "lam", "profile": [2, 1, 1, 1]},
            {"name": "1", "profile": [2, 1, 1, 1]},
        ],
    )
    (tail,) = res.tails
    assert (tail.pair, tail.regime) == (("0", "lam"), "far")
    assert (tail.excess, tail.threshold) == (1, F(5))
    model = res.model
    ex, ey = edge_map(model, "x"), edge_map(model, "y")
    assert ex["C'(0,lam)"] == ("C", F(1, 5))
    assert ex["C(0)"] == ("C'(0,lam)", F(2, 5))
    assert ex["C(lam)"] == ("C'(0,lam)", F(4, 15))
    assert ex["C'(1)"] == ("C", F(1, 3))
    assert ey["D'(0,lam)"] == ("D", F(1))
    assert ey["D(0)"] == ("D'(0,lam)", F(2))
    assert ey["D(lam)"] == ("D'(0,lam)", F(4, 3))
    assert ey["D'(1)"] == ("D", F(5, 3))
    assert model.vertical["C'(0,lam)"].kind == "inseparable"
    assert model.vertical["C(0)"].kind == "etale"
    assert model.x_marks["C(0)"] == (("0", 3), ("0", 1), ("0", 1))
    assert model.y_marks["D(lam)"] == ("lam",)
    assert model.x_marks["C'(0,lam)"] == ()


def test_far_arm_thickness_formula():
    # nu_i = (p - u*eps) / (p (n_i - 1)), shrinking to 0 as eps -> p/u
    for eps in (F(1), F(2), F(4)):
        rep = analyze_tail(5, ("a", "b"), (3, 1, 1), (2, 1, 1, 1), eps)
        res = classify_formula(
            5,
            [
                {"name": "a", "profile": [3, 1, 1], "tail_with": "b",
                 "epsilon": str(eps)},
                {"name": "b", "profile": [2, 1, 1, 1]},
                {"name": "c", "profile": [2, 1, 1, 1]},
            ],
        )
        ex = edge_map(res.model, "x")
        assert rep.regime == "far"
        assert ex["C(a)"][1] == F(5 - eps, 10)
        assert ex["C(b)"][1] == F(5 - eps, 15)
    for eps in (F(1), F(2)):
        rep = analyze_tail(5, ("a", "b"), (2, 1, 1, 1), (2, 1, 1, 1), eps)
        res = classify_formula(
            5,
            [
                {"name": "a", "profile": [2, 1, 1, 1], "tail_with": "b",
                 "epsilon": str(eps)},
                {"name": "b", "profile": [2, 1, 1, 1]},
                {"name": "c", "profile": [3, 1, 1]},
            ],
        )
        ex = edge_map(res.model, "x")
        assert ex["C(a)"][1] == ex["C(b)"][1] == F(5 - 2 * eps, 15)


# -- the critical regime ------------------------------------------------------


def test_critical_showcase_models():
    res = classify_formula(
        5,
        [
            {"name": "0", "profile": [3, 1, 1], "tail_with": "lam", "epsilon": "5"},
            {"name": "lam", "profile": [2, 1, 1, 1]},
            {"name": "1", "profile": [2, 1, 1, 1]},
        ],
    )
    model = res.model
    assert edge_map(model, "x")["C'(0,lam)"] == ("C", F(1))
    assert edge_map(model, "y")["D'(0,lam)"] == ("D", F(5))
    assert len(model.x_marks["C'(0,lam)"]) == 7  # both fibers sit here
    assert model.y_marks["D'(0,lam)"] == ("0", "lam")
    assert model.vertical["C'(0,lam)"].kind == "etale"

    res2 = classify_formula(
        5,
        [
            {"name": "1", "profile": [2, 1, 1, 1], "tail_with": "lam",
             "epsilon": "5/2"},
            {"name": "lam", "profile": [2, 1, 1, 1]},
            {"name": "0", "profile": [3, 1, 1]},
        ],
    )
    assert edge_map(res2.model, "x")["C'(1,lam)"] == ("C", F(1, 2))
    assert edge_map(res2.model, "y")["D'(1,lam)"] == ("D", F(5, 2))


# -- the near regime and partition pairs --------------------------------------

SHOWCASE_04 = (
    ((4, (1, 3), (1, 1, 2)), (1, (1,), (1,))),
    ((3, (3,), (1, 1, 1)), (2, (1, 1), (2,))),
)
SHOWCASE_14 = (
    ((3, (1, 2), (1, 2)), (1, (1,), (1,)), (1, (1,), (1,))),
    ((2, (2,), (1, 1)), (2, (1, 1), (2,)), (1, (1,), (1,))),
)


def test_near_partitions_unbalanced_pair():
    pps = admissible_partitions(5, (3, 1, 1), (2, 1, 1, 1))
    assert tuple(pp.groups for pp in pps) == SHOWCASE_04
    res = classify_formula(
        5,
        [
            {"name": "0", "profile": [3, 1, 1], "tail_with": "lam", "epsilon": "7"},
            {"name": "lam", "profile": [2, 1, 1, 1]},
            {"name": "1", "profile": [2, 1, 1, 1]},
        ],
    )
    assert len(res.models) == 2
    by_partition = {m.partitions[0][1]: m for m in res.models}
    m41 = by_partition[SHOWCASE_04[0]]
    m32 = by_partition[SHOWCASE_04[1]]
    for model, leaf_thick in ((m41, [F(1, 2), F(2)]), (m32, [F(2, 3), F(1)])):
        ex, ey = edge_map(model, "x"), edge_map(model, "y")
        assert ex["C'(0,lam)"] == ("C", F(1))
        assert ey["D'(0,lam)"] == ("D", F(5))
        assert ey["D_1(0,lam)"] == ("D'(0,lam)", F(2))
        assert arm_thicknesses(model, "x", "C'(0,lam)") == sorted(leaf_thick)
        assert model.y_marks["D_1(0,lam)"] == ("0", "lam")
        assert model.x_marks["C'(0,lam)"] == ()
        assert model.vertical["C'(0,lam)"].kind == "etale"
    # group degrees become vertical degrees of the leaves
    assert sorted(
        m41.vertical[n].degree for n in m41.x_marks if n.startswith("C_")
    ) == [1, 4]
    assert m41.x_marks["C_1(0,lam)"] == (
        ("0", 1), ("0", 3), ("lam", 1), ("lam", 1), ("lam", 2)
    )


def test_near_partitions_balanced_pair():
    pps = admissible_partitions(5, (2, 1, 1, 1), (2, 1, 1, 1))
    assert tuple(pp.groups for pp in pps) == SHOWCASE_14
    res = classify_formula(
        5,
        [
            {"name": "1", "profile": [2, 1, 1, 1], "tail_with": "lam",
             "epsilon": "3"},
            {"name": "lam", "profile": [2, 1, 1, 1]},
            {"name": "0", "profile": [3, 1, 1]},
        ],
    )
    assert len(res.models) == 2
    thicks = sorted(
        tuple(arm_thicknesses(m, "x", "C'(1,lam)")) for m in res.models
    )
    assert thicks == [
        (F(1, 6), F(1, 2), F(1, 2)),
        (F(1, 4), F(1, 4), F(1, 2)),
    ]
    for m in res.models:
        assert edge_map(m, "y")["D_1(1,lam)"] == ("D'(1,lam)", F(1, 2))
        assert edge_map(m, "y")["D'(1,lam)"] == ("D", F(5, 2))


def all_profiles(p):
    out = []

    def rec(rest, biggest, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for m in range(min(rest, biggest), 0, -1):
            rec(rest - m, m, acc + [m])

    rec(p, p, [])
    return out


def test_partition_invariants_across_profiles():
    for p in (5, 7):
        for prof1, prof2 in product(all_profiles(p), repeat=2):
            u = len(prof1) + len(prof2) - p - 1
            if u < 1:
                continue
            pps = admissible_partitions(p, prof1, prof2)
            assert len(set(pps)) == len(pps)
            for pp in pps:
                assert len(pp.groups) == u + 1
                merged1, merged2 = [], []
                for d, g1, g2 in pp.groups:
                    assert sum(g1) == sum(g2) == d
                    assert len(g1) + len(g2) == d + 1
                    merged1.extend(g1)
                    merged2.extend(g2)
                assert sorted(merged1) == sorted(prof1)
                assert sorted(merged2) == sorted(prof2)


@given(
    st.sampled_from(
        [
            (p, a, b)
            for p in (5, 7)
            for a in all_profiles(p)
            for b in all_profiles(p)
            if len(a) + len(b) - p - 1 >= 1
        ]
    )
)
def test_partition_enumeration_order_free(case):
    p, prof1, prof2 = case
    import random

    shuffled1, shuffled2 = list(prof1), list(prof2)
    random.Random(hash(case)).shuffle(shuffled1)
    random.Random(~hash(case)).shuffle(shuffled2)
    assert admissible_partitions(p, shuffled1, shuffled2) == admissible_partitions(
        p, prof1, prof2
    )


def test_partition_validation_errors():
    with pytest.raises(InvalidProfile):
        admissible_partitions(5, (3, 1), (2, 1, 1, 1))
    with pytest.raises(InvalidProfile):
        admissible_partitions(5, (3, 1, 1, 0), (2, 1, 1, 1))
    with pytest.raises(InadmissiblePartition):
        PartitionPair.from_groups(5, [(5, (3, 1, 1), (2, 1, 1, 1))])
    with pytest.raises(InadmissiblePartition):
        # group sums disagree
        PartitionPair.from_groups(5, [(4, (3, 1), (2, 1)), (1, (1,), (1,))])
    with pytest.raises(InadmissiblePartition):
        # count identity broken: d + 1 = 5 but 2 + 2 parts
        PartitionPair.from_groups(5, [(4, (3, 1), (2, 2)), (1, (1,), (1,))])


# -- exact mode ---------------------------------------------------------------


def test_exact_good_reduction_p3():
    cover = rational_cover(3, [(0, 2), (1, 2)])
    res = classify_cover(cover)
    model = res.model
    assert not res.tails
    assert len(model.x_marks) == 3
    assert arm_thicknesses(model, "x", "C") == [F(1), F(1)]
    assert arm_thicknesses(model, "y", "D") == [F(3), F(3)]
    labels = {lbl for name in model.y_marks for lbl in model.y_marks[name]}
    assert labels == {"inf", "0", "-1/2"}


def test_exact_totally_ramified_single_vertex():
    cover = rational_cover(5, [(0, 5)])
    model = classify_cover(cover).model
    assert set(model.x_marks) == {"C"}
    assert set(model.y_marks) == {"D"}
    assert model.x_marks["C"] == (("inf", 5), ("0", 5))
    assert not model.x_edges and not model.y_edges


def test_exact_near_balanced_tail():
    # double points at 0 and 5 collide: v(beta(0) - beta(5)) = 4 > 5/2
    cover = rational_cover(5, [(2, 3), (0, 2), (5, 2)])
    res = classify_cover(cover)
    (tail,) = res.tails
    assert tail.pair == ("-625/4", "0")
    assert (tail.epsilon, tail.threshold, tail.regime) == (F(4), F(5, 2), "near")
    assert res.ordinary == (("-28", (3, 1, 1)),)
    assert tuple(pp.groups for pp in tail.partitions) == SHOWCASE_14
    assert len(res.models) == 2


def test_exact_critical_and_near_unbalanced_tail():
    crit = classify_cover(rational_cover(5, [(5, 3), (0, 2), (-1, 2)]))
    (tail,) = crit.tails
    assert tail.pair == ("0", "3125/4")
    assert (tail.epsilon, tail.regime) == (F(5), "critical")
    assert len(crit.models) == 1

    near = classify_cover(rational_cover(5, [(5, 3), (0, 2), (-23, 2)]))
    (tail,) = near.tails
    assert (tail.epsilon, tail.regime) == (F(7), "near")
    assert tail.profiles == ((2, 1, 1, 1), (3, 1, 1))
    junction = f"C'({tail.pair[0]},{tail.pair[1]})"
    leaf_sets = {tuple(arm_thicknesses(m, "x", junction)) for m in near.models}
    assert leaf_sets == {(F(1, 2), F(2)), (F(2, 3), F(1))}


def test_exact_far_tail_needs_ramified_base():
    # critical point at pi, e = 2: the pair distance is 5/2 < 5
    ctx = FieldContext(5, 2)
    pts = [
        (ctx.pi(), 3),
        (ctx.from_rational(F(0)), 2),
        (ctx.from_rational(F(-1)), 2),
    ]
    res = classify_cover(from_critical_divisor(pts, ctx))
    (tail,) = res.tails
    assert (tail.epsilon, tail.regime) == (F(5, 2), "far")
    junction = f"C'({tail.pair[0]},{tail.pair[1]})"
    assert sorted(arm_thicknesses(res.model, "x", junction)) == [F(1, 6), F(1, 4)]
    down = f"D'({tail.pair[0]},{tail.pair[1]})"
    assert sorted(arm_thicknesses(res.model, "y", down)) == [F(5, 6), F(5, 4)]


def test_exact_threshold_undefined():
    with pytest.raises(ThresholdUndefined):
        classify_cover(rational_cover(5, [(0, 4), (5, 2)]))


def test_exact_not_simple():
    with pytest.raises(NotSimpleReduction) as exc:
        classify_cover(rational_cover(5, [(0, 2), (5, 2), (10, 2), (1, 2)]))
    assert exc.value.offenders


def test_exact_requires_integral_branch_values():
    cover = rational_cover(5, [(F(1, 5), 3), (0, 2), (1, 2)])
    with pytest.raises(ClassifierError, match="integral"):
        classify_cover(cover)


# -- canonical comparison and validation ---------------------------------------


def rename_components(model, xmap, ymap):
    return DualGraphPair(
        p=model.p,
        x_root=xmap.get(model.x_root, model.x_root),
        y_root=ymap.get(model.y_root, model.y_root),
        x_marks={xmap.get(n, n): v for n, v in model.x_marks.items()},
        y_marks={ymap.get(n, n): v for n, v in model.y_marks.items()},
        x_edges=[(xmap.get(a, a), xmap.get(b, b), t) for a, b, t in model.x_edges],
        y_edges=[(ymap.get(a, a), ymap.get(b, b), t) for a, b, t in model.y_edges],
        vertical={
            xmap.get(n, n): type(vm)(ymap.get(vm.target, vm.target), vm.degree,
                                     vm.kind, vm.notes)
            for n, vm in model.vertical.items()
        },
        partitions=model.partitions,
    ).validate()


def showcase_far():
    return classify_formula(
        5,
        [
            {"name": "0", "profile": [3, 1, 1], "tail_with": "lam", "epsilon": "1"},
            {"name": "lam", "profile": [2, 1, 1, 1]},
            {"name": "1", "profile": [2, 1, 1, 1]},
        ],
    ).model


def test_component_names_do_not_matter():
    a = showcase_far()
    b = rename_components(
        a,
        {"C(0)": "Z9", "C'(0,lam)": "junction", "C'(1)": "arm"},
        {"D(lam)": "W", "D'(0,lam)": "dj"},
    )
    assert a.is_isomorphic_to(b)
    assert diff_pairs(a, b) is None


def test_thickness_change_breaks_isomorphism():
    a = showcase_far()
    b = showcase_far()
    b.x_edges = [
        (x, y, t if y != "C(0)" else t + 1) for x, y, t in b.x_edges
    ]
    b.y_edges = [
        (x, y, t if y != "D(0)" else t + 5) for x, y, t in b.y_edges
    ]
    b.validate()
    assert not a.is_isomorphic_to(b)
    assert "tree" in diff_pairs(a, b)


def test_mark_multiplicity_is_compared():
    a = showcase_far()
    b = showcase_far()
    b.x_marks["C(0)"] = (("0", 3), ("0", 2), ("0", 1))
    assert not a.is_isomorphic_to(b)


def test_scaling_law_enforced():
    model = showcase_far()
    model.y_edges = [
        (a, b, t if b != "D(0)" else t * 2) for a, b, t in model.y_edges
    ]
    with pytest.raises(InvalidDualGraph, match="scaling"):
        model.validate()


def test_degree_conservation_enforced():
    model = showcase_far()
    vm = model.vertical["C(0)"]
    model.vertical["C(0)"] = type(vm)(vm.target, 4, vm.kind, vm.notes)
    with pytest.raises(InvalidDualGraph, match="sum"):
        model.validate()


def test_json_and_dot_deterministic():
    a = showcase_far()
    b = showcase_far()
    assert a.to_json() == b.to_json()
    dot = a.to_dot()
    assert 'label="X_k"' in dot and 'label="Y_k"' in dot
    assert "style=dashed" in dot
    assert a.to_json()["x"]["edges"][0][2].count("/") <= 1  # rationals as strings
    near = classify_formula(
        5,
        [
            {"name": "0", "profile": [3, 1, 1], "tail_with": "lam", "epsilon": "7"},
            {"name": "lam", "profile": [2, 1, 1, 1]},
            {"name": "1", "profile": [2, 1, 1, 1]},
        ],
    )
    docs = [m.to_json() for m in near.models]
    assert docs[0]["partitions"][0]["groups"][0]["d"] == 4
    assert docs[1]["partitions"][0]["groups"][0]["d"] == 3
