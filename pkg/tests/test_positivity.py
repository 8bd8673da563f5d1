"""Gram machinery, sos families, cones, factorizability, rank-chain moves."""

import math
from fractions import Fraction

import numpy as np
import pytest

from omegadec.blockpoly import FLOAT, BlockPolynomial
from omegadec.decomposition import OmegaGDecomposition
from omegadec.errors import (
    FactorNotInCone,
    LocalsNotAligned,
    MissingCertificate,
    MissingSquareSplits,
    NotFactorizable,
    NotInvariantPolynomial,
    NotPSD,
)
from omegadec.fixtures import (
    circle_rotation_action,
    double_edge_fixed_vertex_action,
    double_edge_swap_action,
    sos_family_witness_double_edge,
    sos_family_witness_single_edge,
    sos_quartic_target,
    squares_double_edge_decomposition,
    squares_target_polynomial,
)
from omegadec.positivity import (
    GramRepresentation,
    caratheodory_bound,
    cone_check,
    evidently_sos,
    factorizability_solve,
    family_symmetrize,
    gram_map,
    gram_symmetrize,
    invariant_sos_family,
    matrix_pair_split,
    monomial_square_split,
    monomials_upto,
    sep_to_sos,
    separable_symmetrize,
    sos_to_plain,
)
from omegadec.radpoly import RadPoly
from omegadec.symmetry import trivial_action
from omegadec.complexes import standard_complex


def bell_gram():
    b = np.array([1.0, 0.0, 0.0, 1.0])
    return GramRepresentation(1, 1, 1, np.outer(b, b))


def quartic_gram():
    # x^2 + y^2 + 4(1+xy)^2 over the basis (1, t) per site
    m = np.array([[4.0, 0, 0, 4], [0, 1, 0, 0], [0, 0, 1, 0], [4, 0, 0, 4]])
    return GramRepresentation(1, 1, 1, m)


def test_monomial_order_graded_lex():
    assert monomials_upto(1, 2) == [(0,), (1,), (2,)]
    assert monomials_upto(2, 1) == [(0, 0), (0, 1), (1, 0)]
    assert monomials_upto(2, 2)[0] == (0, 0)
    assert len(monomials_upto(2, 2)) == 6


def test_gram_map_bell():
    p = gram_map(bell_gram())
    expected = BlockPolynomial((1, 1), {((0,), (0,)): 1.0, ((1,), (1,)): 2.0,
                                        ((2,), (2,)): 1.0}, FLOAT)
    assert p.allclose(expected, 1e-12)
    zero = GramRepresentation(1, 1, 1, np.zeros((4, 4)))
    assert gram_map(zero).is_zero()


def test_gram_fiber_family_same_polynomial():
    # adding alpha on the inner band and removing it from the corners keeps the map
    for alpha in (0.0, 1.0, -2.0):
        m = np.array([[1.0, 0, 0, 1 - alpha], [0, 0, alpha, 0],
                      [0, alpha, 0, 0], [1 - alpha, 0, 0, 1]])
        g = GramRepresentation(1, 1, 1, m)
        assert gram_map(g).allclose(gram_map(bell_gram()), 1e-12)


def test_gram_symmetrize_keeps_polynomial():
    a = double_edge_swap_action()
    g = quartic_gram()
    again = gram_symmetrize(g, a)
    assert np.allclose(again.entries, g.entries)  # already invariant

    # perturb within one monomial fiber to break invariance but not the map
    rng = np.random.default_rng(3)
    A = rng.normal(size=(9, 9))
    sym = A @ A.T
    inv = 0.5 * (sym + GramRepresentation(1, 1, 2, sym).permuted((1, 0)).entries)
    g2 = GramRepresentation(1, 1, 2, inv)
    tuples = g2.index_tuples()
    # find two distinct symmetric cell pairs with the same monomial
    target = {}
    move = None
    for r, Kr in enumerate(tuples):
        for s, Ks in enumerate(tuples):
            if r > s:
                continue
            mono = tuple(tuple(x + y for x, y in zip(br, bs)) for br, bs in zip(Kr, Ks))
            if mono in target and target[mono] != (r, s):
                move = (target[mono], (r, s))
                break
            target[mono] = (r, s)
        if move:
            break
    (r1, s1), (r2, s2) = move
    pert = inv.copy()
    for (rr, ss), sign in (((r1, s1), 1.0), ((r2, s2), -1.0)):
        pert[rr, ss] += 0.25 * sign
        if rr != ss:
            pert[ss, rr] += 0.25 * sign
        else:
            pert[rr, ss] += 0.25 * sign
    g3 = GramRepresentation(1, 1, 2, pert)
    assert gram_map(g3).allclose(gram_map(g2), 1e-9)
    sym3 = gram_symmetrize(g3, a)
    assert gram_map(sym3).allclose(gram_map(g2), 1e-9)
    for g_el in range(2):
        assert np.allclose(sym3.permuted(a.vperm(g_el)).entries, sym3.entries)


def test_gram_symmetrize_rejects_non_invariant_polynomial():
    a = double_edge_swap_action()
    m = np.zeros((4, 4))
    m[1, 1] = 1.0  # polynomial y^2, not swap invariant
    with pytest.raises(NotInvariantPolynomial):
        gram_symmetrize(GramRepresentation(1, 1, 1, m), a)


def test_invariant_sos_family_reconstructs():
    a = double_edge_swap_action()
    g = quartic_gram()
    fam = invariant_sos_family(g, a)
    assert fam.sum_squares().allclose(gram_map(g), 1e-9)
    assert fam.family_invariant(a, 1e-9)


def test_invariant_sos_family_rank_one():
    a = double_edge_swap_action()
    fam = invariant_sos_family(bell_gram(), a)
    rows = []
    keys = sorted({k for q in fam.polys.values() for k in q.terms})
    for q in fam.polys.values():
        rows.append([q.terms.get(k, 0.0) for k in keys])
    assert np.linalg.matrix_rank(np.array(rows), tol=1e-9) == 1


def test_invariant_sos_family_requires_psd():
    a = double_edge_swap_action()
    m = -np.eye(4)
    with pytest.raises(NotPSD):
        invariant_sos_family(GramRepresentation(1, 1, 1, m), a)


def test_hand_family_squares_to_target():
    for witness in (sos_family_witness_double_edge(), sos_family_witness_single_edge()):
        assert witness.check_joint_symmetry()
        assert witness.sum_squares() == RadPoly.from_poly(sos_quartic_target())


def test_family_symmetrize_theorem_path():
    from omegadec.positivity import psd_sqrt
    a = double_edge_swap_action()
    g = quartic_gram()
    fam = invariant_sos_family(g, a)
    B = psd_sqrt(g.entries)
    pieces = matrix_pair_split(B, 2)
    factors = {}
    basis = g.local_basis
    for j, (b0, b1) in enumerate(pieces):
        for k_idx, k in enumerate(basis):
            for site, mat in ((0, b0), (1, b1)):
                terms = {}
                for kp_idx, kp in enumerate(basis):
                    c = mat[k_idx, kp_idx]
                    if c != 0.0:
                        terms[(kp,)] = c
                factors[(site, k, j)] = BlockPolynomial((1,), terms, FLOAT)
    dec = family_symmetrize(fam, a, factors)
    assert dec.index_size == len(pieces) * 2
    assert dec.check_joint_symmetry()
    assert dec.sum_squares().to_float().allclose(gram_map(g), 1e-8)
    for K in fam.grid():
        assert dec.member(K).to_float().allclose(fam.member(K), 1e-8)
    # planted misalignment is caught
    bad = dict(factors)
    key = next(iter(bad))
    bad[key] = bad[key].scaled(3.0)
    with pytest.raises(LocalsNotAligned):
        family_symmetrize(fam, a, bad)


def test_separable_symmetrize():
    a = double_edge_swap_action()
    t2 = BlockPolynomial.univar({2: Fraction(1)})
    one = BlockPolynomial.univar({0: Fraction(1)})
    terms = [(t2, one), (one, t2)]
    dec = separable_symmetrize(terms, a)
    assert dec.index_size <= len(a) * len(terms)
    assert dec.contract() == RadPoly.from_poly(squares_target_polynomial())
    for mapping in dec.locals.values():
        for poly in mapping.values():
            for _, p in poly.parts:
                assert evidently_sos(p)
    with pytest.raises(FactorNotInCone):
        separable_symmetrize([(BlockPolynomial.univar({1: Fraction(1)}), one),
                              (one, BlockPolynomial.univar({1: Fraction(1)}))], a)


def test_separable_symmetrize_circle():
    a = circle_rotation_action(3)
    t2 = BlockPolynomial.univar({2: Fraction(2)})
    one = BlockPolynomial.univar({0: Fraction(1)})
    raw = [(t2, one, one)]
    closed = []
    for term in raw:
        for g in range(len(a)):
            moved = [None] * 3
            for i in range(3):
                moved[a.vertex_image(g, i)] = term[i]
            closed.append(tuple(moved))
    dec = separable_symmetrize(closed, a)
    from omegadec.decomposition import elementary_sum
    assert dec.contract() == elementary_sum(closed)
    for mapping in dec.locals.values():
        for poly in mapping.values():
            for _, p in poly.parts:
                assert evidently_sos(p)


def test_factorizability_examples():
    fixed = double_edge_fixed_vertex_action()
    sol = factorizability_solve(fixed.complex, fixed, 2)
    assert sol is not None and sol.residual < 1e-10
    assert sol.counts[(1, 1)] == 1 and sol.counts[(1, 2)] == 2
    assert abs(sol.C(0, (1, 1)) - 1.0) < 1e-12
    assert abs(sol.C(0, (1, 2)) - 1 / math.sqrt(2)) < 1e-12

    free = double_edge_swap_action()
    sol2 = factorizability_solve(free.complex, free, 3)
    assert sol2 is not None
    assert all(abs(v - 1.0) < 1e-12 for v in sol2.values.values())

    from omegadec.fixtures import simplex_full_symmetry_action
    s3 = simplex_full_symmetry_action(2)
    sol3 = factorizability_solve(s3.complex, s3, 2)
    assert sol3 is not None and sol3.residual < 1e-9


def test_sos_to_plain_exact_on_fixture():
    witness = sos_family_witness_double_edge()
    plain = sos_to_plain(witness)
    assert plain.index_size == witness.index_size**2
    assert plain.contract() == RadPoly.from_poly(sos_quartic_target())
    assert plain.check_symmetry()


def test_sep_to_sos_free_double_edge():
    sep = squares_double_edge_decomposition()
    sol = factorizability_solve(sep.complex, sep.action, sep.index_size)
    sos = sep_to_sos(sep, sol)
    assert sos.index_size == sep.index_size
    assert sos.check_joint_symmetry()
    assert sos.sum_squares().to_float().allclose(sep.contract().to_float(), 1e-9)


def test_sep_to_sos_trivial_group_single_local():
    c = standard_complex("single_edge")
    a = trivial_action(c)
    t2 = BlockPolynomial.univar({2: Fraction(3)})
    dec = OmegaGDecomposition(c, a, 1, (1, 1), {0: {(1,): t2}, 1: {(1,): t2}})
    sol = factorizability_solve(c, a, 1)
    sos = sep_to_sos(dec, sol)
    assert sos.sum_squares().to_float().allclose(dec.contract().to_float(), 1e-9)


def test_sep_to_sos_weighted_fixed_vertex():
    fixed = double_edge_fixed_vertex_action()
    t2 = BlockPolynomial.univar({2: Fraction(1)})
    one = BlockPolynomial.univar({0: Fraction(1)})
    locs = {(1, 1): t2, (1, 2): one, (2, 1): one}
    sep = OmegaGDecomposition(fixed.complex, fixed, 2, (1, 1),
                              {0: dict(locs), 1: dict(locs)})
    assert sep.check_symmetry()
    sol = factorizability_solve(fixed.complex, fixed, 2)
    sos = sep_to_sos(sep, sol)
    assert sos.sum_squares().to_float().allclose(sep.contract().to_float(), 1e-9)


def test_sep_to_sos_errors():
    sep = squares_double_edge_decomposition()
    with pytest.raises(NotFactorizable):
        sep_to_sos(sep, None)
    odd = OmegaGDecomposition(sep.complex, sep.action, 1, (1, 1),
                              {0: {(1, 1): BlockPolynomial.univar({1: Fraction(1)})},
                               1: {(1, 1): BlockPolynomial.univar({1: Fraction(1)})}})
    sol = factorizability_solve(sep.complex, sep.action, 1)
    with pytest.raises(MissingSquareSplits):
        sep_to_sos(odd, sol)


def test_monomial_square_split():
    p = BlockPolynomial.univar({0: Fraction(1, 2), 2: Fraction(2)})
    taus = monomial_square_split(p)
    total = RadPoly.zero((1,))
    for tau in taus:
        total = total + tau * tau
    assert total == RadPoly.from_poly(p)


def test_caratheodory_values():
    assert caratheodory_bound(1, 2, 1, 2) == 18
    assert caratheodory_bound(5, 0, 3, 1) == 1
    assert caratheodory_bound(2, 1, 2, 6) == 162


def test_cone_check_modes():
    neg = BlockPolynomial((1,), {((2,),): -1.0}, FLOAT)
    assert cone_check(neg, "nn_coeff").ok is False
    pos = BlockPolynomial((1, 1), {((2,), (2,)): 3.0}, FLOAT)
    assert cone_check(pos, "nn_coeff").ok is True

    bell_poly = gram_map(bell_gram())
    verdict = cone_check(bell_poly, "sos_with_certificate", certificate=bell_gram())
    assert verdict.ok is True and verdict.verdict == "sos-certified"
    wrong = cone_check(pos.astype_float(), "sos_with_certificate", certificate=bell_gram())
    assert wrong.ok is False
    with pytest.raises(MissingCertificate):
        cone_check(bell_poly, "sos_with_certificate")

    found = cone_check(neg, "nonnegative_sampled", seed=1)
    assert found.ok is False and found.verdict == "counterexample-found"
    none_found = cone_check(pos, "nonnegative_sampled", seed=1)
    assert none_found.ok is None and none_found.verdict == "no-counterexample-found"


def test_gram_validation():
    from omegadec.errors import DimensionMismatch
    with pytest.raises(DimensionMismatch):
        GramRepresentation(1, 1, 1, np.zeros((3, 3)))
    asym = np.zeros((4, 4))
    asym[0, 1] = 1.0
    with pytest.raises(DimensionMismatch):
        GramRepresentation(1, 1, 1, asym)
    flat = GramRepresentation(1, 1, 1, [0.0] * 16)
    assert flat.entries.shape == (4, 4)
    again = GramRepresentation.from_obj(bell_gram().to_obj())
    assert np.allclose(again.entries, bell_gram().entries)


def test_sos_family_requires_invariant_matrix():
    a = double_edge_swap_action()
    rng = np.random.default_rng(9)
    A = rng.normal(size=(4, 4))
    with pytest.raises(NotInvariantPolynomial):
        invariant_sos_family(GramRepresentation(1, 1, 1, A @ A.T), a)
