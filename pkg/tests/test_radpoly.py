"""Radical-scaled polynomial combinations."""

from fractions import Fraction

import pytest

from omegadec.blockpoly import FLOAT, BlockPolynomial
from omegadec.errors import IncommensurableScales
from omegadec.radpoly import RadPoly, rad_outer
from omegadec.scalars import ONE, ScaledScalar


def x(sites=(1,)):
    return BlockPolynomial(sites, {((1,),): 1})


def test_commensurable_parts_merge():
    sqrt2 = ScaledScalar(2, 2)
    sqrt8 = ScaledScalar(8, 2)
    p = RadPoly.scaled_poly(sqrt8, x()) + RadPoly.scaled_poly(sqrt2, x())
    assert len(p.parts) == 1
    # sqrt8 = 2 sqrt2, so the sum is 3 sqrt2 * x
    assert p == RadPoly.scaled_poly(sqrt2, x().scaled(3))


def test_incommensurable_parts_stay_separate():
    p = (RadPoly.scaled_poly(ScaledScalar(2, 2), x())
         + RadPoly.scaled_poly(ScaledScalar(3, 2), x()))
    assert len(p.parts) == 2
    with pytest.raises(IncommensurableScales):
        p.as_polynomial()
    s, poly = (RadPoly.scaled_poly(ScaledScalar(3, 2), x())).residual()
    assert s == ScaledScalar(3, 2) and poly == x()


def test_products_fold_to_rational():
    s = RadPoly.scaled_poly(ScaledScalar(Fraction(15, 8), 2), BlockPolynomial.constant((1,), 1))
    prod = s * s
    assert prod.as_polynomial() == BlockPolynomial.constant((1,), Fraction(15, 8))


def test_fourth_roots():
    r4 = RadPoly.scaled_poly(ScaledScalar(2, 4), x())
    assert (r4 * r4).residual()[0] == ScaledScalar(2, 2)
    assert (r4 * r4 * r4 * r4).as_polynomial() == BlockPolynomial((1,), {((4,),): 2})


def test_equality_is_semantic():
    sqrt2 = ScaledScalar(2, 2)
    a = RadPoly.scaled_poly(sqrt2, x().scaled(2))
    b = RadPoly.scaled_poly(ScaledScalar(8, 2), x())
    assert a == b
    assert not (a == RadPoly.scaled_poly(sqrt2, x()))
    assert RadPoly.zero((1,)) == RadPoly.from_poly(BlockPolynomial.zero((1,)))


def test_subtraction_cancels():
    sqrt2 = ScaledScalar(2, 2)
    a = RadPoly.scaled_poly(sqrt2, x())
    assert (a - a).is_zero()


def test_float_mode_collapses():
    p = RadPoly.scaled_poly(ScaledScalar(2, 2), x().astype_float())
    assert p.mode == FLOAT
    assert len(p.parts) == 1 and p.parts[0][0] == ONE
    assert abs(p.parts[0][1].terms[((1,),)] - 2**0.5) < 1e-12


def test_rad_outer():
    sqrt2 = ScaledScalar(2, 2)
    f = RadPoly.scaled_poly(sqrt2, x())
    g = RadPoly.scaled_poly(sqrt2, BlockPolynomial.univar({0: 1, 1: 1}))
    prod = rad_outer([f, g])
    expected = BlockPolynomial((1, 1), {((1,), (0,)): 2, ((1,), (1,)): 2})
    assert prod.as_polynomial() == expected
    assert rad_outer([f, RadPoly.zero((1,))]).is_zero()


def test_scale_mul_and_scalar():
    p = RadPoly.from_poly(x())
    q = p.scale_mul(ScaledScalar(2, 2)).scale_mul(ScaledScalar(2, 2))
    assert q.as_polynomial() == x().scaled(2)
    assert p.scaled(Fraction(-3, 2)).as_polynomial() == x().scaled(Fraction(-3, 2))


def test_act_moves_blocks():
    p = RadPoly.scaled_poly(ScaledScalar(2, 2), BlockPolynomial((1, 1), {((2,), (1,)): 1}))
    q = p.act((1, 0))
    assert q == RadPoly.scaled_poly(ScaledScalar(2, 2),
                                    BlockPolynomial((1, 1), {((1,), (2,)): 1}))
