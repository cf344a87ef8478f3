"""Blow-up engine: agreement with the classifier and its failure modes."""

from fractions import Fraction

import pytest

from padicover.classifier import classify_cover
from padicover.cover import from_critical_divisor
from padicover.field import FieldContext
from padicover.oracle import (
    CenterNotRoot,
    NonTermination,
    NotIntegralCover,
    ResidualRootOutsideFp,
    _Node,
    _residual_table,
    blow_up,
    fundamental_model,
    run_oracle,
    separate_fibers,
    separation_status,
)


def rational_cover(p, points, e=1):
    ctx = FieldContext(p, e)
    return from_critical_divisor(
        [(ctx.from_rational(Fraction(x)), m) for x, m in points], ctx
    )


def assert_agrees(cover):
    """The oracle's model must match exactly one classifier candidate."""
    result = run_oracle(cover)
    classification = classify_cover(cover)
    matched = [m for m in classification.models if result.model.is_isomorphic_to(m)]
    assert len(matched) == 1
    return result, matched[0]


def test_totally_ramified_cover_needs_no_blow_ups():
    cover = rational_cover(5, [(0, 5)])
    result = run_oracle(cover)
    assert result.blowups == 0
    assert result.e == 1
    assert result.model.x_marks == {"C": (("0", 5), ("inf", 5))}
    assert result.model.y_marks == {"D": ("0", "inf")}
    vm = result.model.vertical["C"]
    assert (vm.target, vm.degree, vm.kind) == ("D", 5, "inseparable")


def test_good_reduction_star_agrees_with_classifier():
    cover = rational_cover(5, [(0, 3), (1, 2), (2, 2)])
    result, _ = assert_agrees(cover)
    assert result.blowups == 3
    # arms need radii 1/2, 1/3, 1/3; the field is enlarged on demand to e = 6
    assert result.e == 6
    assert result.model.vertical["C"].kind == "inseparable"
    for name, vm in result.model.vertical.items():
        if name != "C":
            assert vm.kind == "etale"
            assert vm.degree == 5


def test_good_reduction_p3_stays_in_the_base_field():
    cover = rational_cover(3, [(0, 2), (1, 2)])
    result, _ = assert_agrees(cover)
    assert result.e == 1
    assert result.blowups == 2


def test_tail_far_regime_agrees():
    # critical points pi, 0, -1: the colliding values sit at distance 5/2 < 5
    ctx = FieldContext(5, 2)
    cover = from_critical_divisor(
        [
            (ctx.pi(), 3),
            (ctx.from_rational(Fraction(0)), 2),
            (ctx.from_rational(Fraction(-1)), 2),
        ],
        ctx,
    )
    result, _ = assert_agrees(cover)
    assert result.blowups == 4
    # junction at 1/2, profile arms at 1/4 and 1/6: ladder of enlargements to 12
    assert result.e == 12


def test_tail_critical_regime_agrees():
    cover = rational_cover(5, [(5, 3), (0, 2), (-1, 2)])
    result, matched = assert_agrees(cover)
    assert result.blowups == 2  # the junction plus one ordinary arm
    assert matched.partitions == ()
    # first stage is the junction: both colliding fibers, all seven points
    junction = result.stages[0]
    assert junction.participants == ("0", "3125/4")
    assert junction.nu == 1
    assert junction.m == 5
    assert junction.k == 7


def test_tail_near_regime_realizes_one_partition():
    cover = rational_cover(5, [(5, 3), (0, 2), (-23, 2)])
    result = run_oracle(cover)
    classification = classify_cover(cover)
    assert len(classification.models) == 2  # one candidate per admissible partition
    matched = [m for m in classification.models if result.model.is_isomorphic_to(m)]
    assert len(matched) == 1
    assert result.model.partitions == matched[0].partitions
    ((_pair, groups),) = result.model.partitions
    shape = tuple(sorted((d for d, _, _ in groups), reverse=True))
    assert shape in {(4, 1), (3, 2)}
    junction = result.stages[0]
    assert junction.participants == ("0", "78125/12")
    assert junction.nu == 1  # threshold radius: epsilon_0 / p = 5/5


def test_near_with_conjugate_groups_is_reported_not_fudged():
    # both tail criticals share one junction group here, so the two leftover
    # single-point groups pair up at conjugate residues outside F_5
    cover = rational_cover(5, [(2, 3), (0, 2), (5, 2)])
    with pytest.raises(ResidualRootOutsideFp, match="share a residual root"):
        run_oracle(cover)


def test_separation_status_on_the_naive_model():
    assert separation_status(rational_cover(5, [(0, 5)])) == {"0": True}
    status = separation_status(rational_cover(5, [(0, 3), (1, 2), (2, 2)]))
    assert status == {"0": False, "7/12": False, "-4/3": False}


def test_blow_up_rejects_a_center_that_is_not_a_root():
    cover = rational_cover(5, [(0, 5)])
    state = fundamental_model(cover)
    with pytest.raises(CenterNotRoot, match="not a root"):
        blow_up(state.ctx, state.root.tracks, 3)


def test_blow_up_rejects_a_center_where_nothing_separates():
    cover = rational_cover(5, [(0, 5)])
    state = fundamental_model(cover)
    with pytest.raises(CenterNotRoot, match="nothing separates"):
        blow_up(state.ctx, state.root.tracks, 0)


def test_non_integral_cover_is_refused():
    cover = rational_cover(3, [(Fraction(1, 3), 3)])
    with pytest.raises(NotIntegralCover):
        run_oracle(cover)


def test_repeated_residual_root_outside_fp_is_an_error():
    # (X**2 + 3)**2 over F_5, perturbed upstairs: a repeated irrational root
    ctx = FieldContext(5, 1)
    poly = [ctx.from_rational(Fraction(c)) for c in (4, 5, -4, 0, 1)]
    node = _Node("C", None, None, {"a": poly}, 4, ctx.zero(), Fraction(0))
    with pytest.raises(ResidualRootOutsideFp, match="repeated residual root"):
        _residual_table(node, ctx)


def test_stage_budget_is_a_loud_failure():
    cover = rational_cover(5, [(0, 3), (1, 2), (2, 2)], e=6)
    with pytest.raises(NonTermination):
        separate_fibers(cover, max_stages=1)


def test_every_stage_scales_the_image_by_the_local_degree():
    cover = rational_cover(5, [(5, 3), (0, 2), (-23, 2)])
    result = run_oracle(cover)
    for stage in result.stages:
        assert stage.nu > 0
        assert stage.m >= 1
        assert stage.k >= 2
    data = result.trace_json()
    assert [s["node"] for s in data] == [s.node for s in result.stages]
    assert all(set(s) >= {"node", "nu", "m", "k", "participants"} for s in data)
