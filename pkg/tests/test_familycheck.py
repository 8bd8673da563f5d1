"""Transfer tensors and the bounded positivity checker."""

import numpy as np
import pytest

from omegadec.complexes import standard_complex
from omegadec.errors import SizeTooLarge
from omegadec.familycheck import (
    LocalFamily,
    UNDECIDED_DISCLAIMER,
    bounded_positivity_check,
    family_polynomial,
    transfer_tensor,
)
from omegadec.fixtures import nonnegative_family, planted_negative_family
from omegadec.invariance import is_invariant
from omegadec.symmetry import build_action


def test_scalar_family_outer_product():
    f = LocalFamily(1, 2, (((1, 2),),))
    t = transfer_tensor(f, 1)
    assert [t[(i, j)] for i in range(2) for j in range(2)] == [1, 2, 2, 4]
    p = family_polynomial(f, 1)
    assert p.terms[((2, 0), (0, 2))] == 2
    assert len(p.terms) == 4


def test_identity_transfer_matrices_trace_d():
    f = LocalFamily(2, 2, (((1, 1), (0, 0)), ((0, 0), (1, 1))))
    t = transfer_tensor(f, 3)
    assert set(t.entries) == {2}


def test_transfer_matches_einsum_oracle():
    from omegadec.acceptance import _brute_force_transfer
    rng = np.random.default_rng(88)
    for D, m, n in ((2, 2, 3), (3, 2, 4), (2, 3, 5), (3, 3, 3)):
        coeffs = rng.integers(-3, 4, size=(D, m * 0 + D, m))
        fam = LocalFamily(D, m, tuple(tuple(tuple(int(x) for x in cell)
                                            for cell in row) for row in coeffs))
        mine = np.array([int(x) for x in transfer_tensor(fam, n).entries])
        oracle = _brute_force_transfer(coeffs.astype(np.int64), n).reshape(-1)
        assert np.array_equal(mine, oracle)


def test_family_polynomial_cyclically_invariant():
    fam = nonnegative_family()
    for n in (2, 3):
        p = family_polynomial(fam, n)
        c = standard_complex("circle", n + 1)
        shift = tuple((i + 1) % (n + 1) for i in range(n + 1))
        rot = build_action(c, [(shift, shift)])
        assert is_invariant(p, rot)


def test_planted_family_first_violation():
    rep = bounded_positivity_check(planted_negative_family(), 4)
    assert rep.first_violation == 1
    assert rep.sizes[0].min_entry == -2
    assert rep.sizes[0].witness == (0, 1)
    assert rep.violation_found
    assert "no algorithm" in rep.disclaimer
    assert rep.disclaimer == UNDECIDED_DISCLAIMER


def test_degenerate_single_site_check():
    rep = bounded_positivity_check(planted_negative_family(), 2, n_min=0)
    assert rep.sizes[0].n == 0
    assert rep.sizes[0].min_entry == 0  # both matrices are traceless
    scalar = LocalFamily(1, 1, (((-1,),),))
    rep2 = bounded_positivity_check(scalar, 2, n_min=0)
    assert rep2.first_violation == 0


def test_scaling_preserves_verdicts():
    fam = planted_negative_family()
    base = bounded_positivity_check(fam, 4)
    scaled = bounded_positivity_check(fam.scaled(7), 4)
    assert [s.violated for s in base.sizes] == [s.violated for s in scaled.sizes]
    assert base.first_violation == scaled.first_violation


def test_clean_family_reports_no_violation():
    rep = bounded_positivity_check(nonnegative_family(), 5)
    assert rep.first_violation is None
    assert not rep.violation_found
    assert all(s.min_entry >= 0 for s in rep.sizes)


def test_guards_and_validation():
    fam = LocalFamily(2, 3, tuple(tuple((1, 1, 1) for _ in range(2)) for _ in range(2)))
    with pytest.raises(SizeTooLarge):
        transfer_tensor(fam, 20)
    with pytest.raises(SizeTooLarge):
        bounded_positivity_check(fam, 20, max_tuples=100)
    with pytest.raises(ValueError):
        LocalFamily(2, 2, (((1, 2),),))
    with pytest.raises(ValueError):
        bounded_positivity_check(fam, 0, n_min=3)


def test_family_json_round_trip():
    fam = planted_negative_family()
    assert LocalFamily.from_obj(fam.to_obj()) == fam
