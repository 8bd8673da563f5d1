"""Block polynomial arithmetic, degrees, block moves, serialization."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omegadec.blockpoly import FLOAT, BlockPolynomial, outer
from omegadec.errors import IncompatibleBlockSizes


def quartic():
    return BlockPolynomial((1, 1), {
        ((0,), (0,)): 4, ((1,), (1,)): 8, ((2,), (0,)): 1,
        ((0,), (2,)): 1, ((2,), (2,)): 4})


def test_zero_coefficients_dropped():
    p = BlockPolynomial((1,), {((1,),): 0, ((2,),): 3})
    assert list(p.terms) == [((2,),)]
    q = BlockPolynomial((1,), {((1,),): 2}) + BlockPolynomial((1,), {((1,),): -2})
    assert q.is_zero()


def test_local_degree_examples():
    assert quartic().local_degree() == 2
    assert BlockPolynomial.constant((1, 1), 1).local_degree() == 0
    p = BlockPolynomial((1, 1), {((3,), (1,)): 1})
    assert p.local_degree() == 3
    assert p.degree() == 4


def test_bad_term_shapes_rejected():
    with pytest.raises(ValueError):
        BlockPolynomial((1, 1), {((1,),): 1})
    with pytest.raises(ValueError):
        BlockPolynomial((2,), {((1,),): 1})
    with pytest.raises(TypeError):
        BlockPolynomial((1,), {((1,),): 0.5})  # float coefficient in rational mode


def test_act_examples():
    # x^2 y -> x y^2 under the swap
    p = BlockPolynomial((1, 1), {((2,), (1,)): 1})
    swapped = p.act((1, 0))
    assert swapped == BlockPolynomial((1, 1), {((1,), (2,)): 1})
    assert p.act((0, 1)) == p
    sym = BlockPolynomial((1, 1), {((2,), (0,)): 1, ((0,), (2,)): 1})
    assert sym.act((1, 0)) == sym


def test_act_rejects_incompatible_widths():
    p = BlockPolynomial((1, 2), {((1,), (0, 0)): 1})
    with pytest.raises(IncompatibleBlockSizes):
        p.act((1, 0))


def test_evaluate():
    p = quartic()
    assert p.evaluate([(1,), (2,)]) == 4 + 16 + 1 + 4 + 16
    assert p.evaluate([(Fraction(1, 2),), (0,)]) == 4 + Fraction(1, 4)


def test_outer_matches_product():
    f = BlockPolynomial.univar({0: 1, 2: 2})
    g = BlockPolynomial.univar({1: 3})
    prod = outer([f, g])
    assert prod == BlockPolynomial((1, 1), {((0,), (1,)): 3, ((2,), (1,)): 6})
    zero = outer([f, BlockPolynomial.zero((1,))])
    assert zero.is_zero()


def test_mode_promotion_and_allclose():
    p = BlockPolynomial.univar({1: 1})
    q = BlockPolynomial.univar({1: 1.0}, mode=FLOAT)
    assert (p + q).mode == FLOAT
    assert p.astype_float().allclose(q)
    assert not p.astype_float().allclose(q.scaled(1.001), 1e-9)


coeffs = st.integers(min_value=-4, max_value=4)


def small_polys(sites=(1, 1), deg=2):
    keys = st.tuples(*(st.tuples(st.integers(min_value=0, max_value=deg))
                       for _ in sites))
    return st.dictionaries(keys, coeffs, max_size=4).map(
        lambda d: BlockPolynomial(sites, d))


@given(small_polys(), small_polys(), small_polys())
@settings(deadline=None, max_examples=60)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert p * (q + r) == p * q + p * r


@given(small_polys())
@settings(deadline=None, max_examples=60)
def test_json_round_trip_lossless(p):
    assert BlockPolynomial.from_obj(p.to_obj()) == p


@given(small_polys(sites=(1, 1, 1)))
@settings(deadline=None, max_examples=40)
def test_act_composition(p):
    g = (1, 2, 0)
    h = (2, 0, 1)
    hg = tuple(h[g[i]] for i in range(3))
    assert p.act(g).act(h) == p.act(hg)
    assert p.act((0, 1, 2)) == p


@given(small_polys())
@settings(deadline=None, max_examples=40)
def test_eval_permutation_identity(p):
    # moving blocks by g, then evaluating, matches evaluating with permuted points
    g = (1, 0)
    point = [(Fraction(2),), (Fraction(-3),)]
    moved = p.act(g)
    permuted_point = [point[g[0]], point[g[1]]]
    assert moved.evaluate(permuted_point) == p.evaluate(point)


def test_sorted_terms_lexicographic():
    p = BlockPolynomial((1, 1), {((2,), (0,)): 1, ((0,), (2,)): 2, ((1,), (1,)): 3})
    assert [k for k, _ in p.sorted_terms()] == [
        ((0,), (2,)), ((1,), (1,)), ((2,), (0,))]
