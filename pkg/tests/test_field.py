import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicover.field import (
    DivisionByZero,
    FieldContext,
    NegativeValuation,
    NotRepresentable,
    Valuation,
    fmt_rat,
    parse_rat,
    vp,
)


def random_element(rng, ctx, scale=3):
    coeffs = []
    for _ in range(ctx.e):
        num = rng.randint(-(ctx.p**scale), ctx.p**scale)
        den = rng.choice([1, 1, 1, ctx.p, ctx.p**2, rng.randint(1, 50)])
        coeffs.append(Fraction(num, den))
    return ctx.element(coeffs)


def test_context_basics():
    K = FieldContext(5, 4)
    assert K.from_rational(5).val() == 1
    assert K.pi().val() == Fraction(1, 4)
    assert K.zero().val().is_infinite
    assert K.one().is_unit()
    with pytest.raises(ValueError):
        FieldContext(6)
    with pytest.raises(ValueError):
        FieldContext(5, 0)


def test_val_examples():
    K = FieldContext(5, 1)
    assert K.from_rational(Fraction(50)).val() == 2
    assert K.from_rational(Fraction(3, 5)).val() == -1
    assert K.from_rational(Fraction(7, 3)).val() == 0
    L = FieldContext(5, 2)
    # 5 + pi has valuation 1/2 (the pi term wins)
    assert L.element([5, 1]).val() == Fraction(1, 2)
    # 1/5 * pi has valuation -1/2
    assert L.element([0, Fraction(1, 5)]).val() == Fraction(-1, 2)


def test_ultrametric_random_pairs():
    # v(x+y) >= min(v x, v y), equality whenever the valuations differ
    rng = random.Random(20260822)
    contexts = [FieldContext(5, 1), FieldContext(5, 2), FieldContext(3, 4), FieldContext(7, 3)]
    for _ in range(10_000):
        K = rng.choice(contexts)
        x, y = random_element(rng, K), random_element(rng, K)
        vx, vy, vs = x.val(), y.val(), (x + y).val()
        assert vs >= min(vx, vy)
        if vx != vy:
            assert vs == min(vx, vy)


def test_multiplicativity_random():
    rng = random.Random(7)
    for e in (1, 2, 3, 6):
        K = FieldContext(5, e)
        for _ in range(400):
            x, y = random_element(rng, K), random_element(rng, K)
            assert (x * y).val() == x.val() + y.val()


def test_mul_div_roundtrip():
    rng = random.Random(99)
    for e in (1, 2, 4, 5):
        K = FieldContext(5, e)
        for _ in range(200):
            x, y = random_element(rng, K), random_element(rng, K)
            if y.is_zero():
                continue
            assert (x / y) * y == x
    with pytest.raises(DivisionByZero):
        K.one() / K.zero()


def test_residue_is_ring_homomorphism():
    rng = random.Random(4)
    K = FieldContext(7, 3)
    picked = 0
    while picked < 300:
        x, y = random_element(rng, K), random_element(rng, K)
        if x.val() < 0 or y.val() < 0:
            continue
        picked += 1
        assert (x + y).residue() == (x.residue() + y.residue()) % 7
        assert (x * y).residue() == (x.residue() * y.residue()) % 7
    assert K.one().residue() == 1
    with pytest.raises(NegativeValuation):
        K.element([Fraction(1, 7), 0, 0]).residue()


def test_uniformizer_power_exact():
    K = FieldContext(5, 4)
    for num in range(-8, 9):
        q = Fraction(num, 4)
        u = K.uniformizer_power(q)
        assert u.val() == q
    with pytest.raises(NotRepresentable) as info:
        K.uniformizer_power(Fraction(1, 6))
    assert info.value.needed_e == 12
    # the advice names the smallest multiple of e that works
    assert "enlarge e to 12" in str(info.value)


def test_embedding_preserves_arithmetic():
    K = FieldContext(5, 2)
    L = K.enlarged(6)
    rng = random.Random(11)
    for _ in range(100):
        x, y = random_element(rng, K), random_element(rng, K)
        ex, ey = K.embed(x, L), K.embed(y, L)
        assert ex.val() == x.val()
        assert K.embed(x * y, L) == ex * ey
        assert K.embed(x + y, L) == ex + ey
    with pytest.raises(ValueError):
        K.enlarged(5)


def test_valuation_total_order_and_arithmetic():
    inf = Valuation.infinite()
    a, b = Valuation(Fraction(1, 2)), Valuation(2)
    assert a < b < inf
    assert a + b == Fraction(5, 2)
    assert (a + inf).is_infinite
    assert inf == Valuation.infinite()
    assert sorted([inf, b, a]) == [a, b, inf]
    assert 3 * a == Fraction(3, 2)
    assert a >= 0 and not (a >= 1)


@given(st.fractions(), st.fractions())
def test_vp_additive(q1, q2):
    p = 5
    if q1 == 0 or q2 == 0:
        return
    assert vp(q1 * q2, p) == vp(q1, p) + vp(q2, p)


@given(st.fractions())
def test_rat_format_roundtrip(q):
    assert parse_rat(fmt_rat(q)) == q


def test_pow_matches_repeated_mul():
    K = FieldContext(3, 2)
    x = K.element([2, Fraction(1, 3)])
    assert x**0 == K.one()
    assert x**3 == x * x * x
    assert x**-2 == (x * x).inverse()
