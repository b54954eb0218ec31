"""Generalized ideals between real parts of subspaces."""

import numpy as np
import pytest

from domlab import SpaceDescriptor, Subspace, check_generalized_ideal, check_mvv_ideal, real_part_basis
from domlab import spaces
from domlab.errors import CommutativityError
from domlab.ideals import check_ideal_modulus_implication
from domlab.sampling import derived_rng, gaussian_complex


def _basis_vec(d, i, val=1.0):
    v = np.zeros(d, dtype=complex)
    v[i] = val
    return v


def test_real_part_whole_space(space):
    u = Subspace.whole(space)
    rj = real_part_basis(u)
    assert rj.dim_r == space.dim
    # every basis vector is J-fixed
    assert np.all(spaces.is_real_vec(space, rj.basis))


def test_real_part_single_matrix_unit():
    sp = SpaceDescriptor((2,))
    e12 = _basis_vec(4, 1)
    assert real_part_basis(Subspace(sp, [e12])).dim_r == 0
    rj = real_part_basis(Subspace(sp, [e12, _basis_vec(4, 2)]))
    assert rj.dim_r == 2
    # spanned by e12+e21 and i(e12-e21)
    span = np.stack([_basis_vec(4, 1) + _basis_vec(4, 2),
                     1j * (_basis_vec(4, 1) - _basis_vec(4, 2))])
    proj = Subspace(sp, list(span))
    assert np.all(proj.residual(rj.basis) < 1e-10)


def test_membership_residual_seminorm(space, rng):
    u = Subspace(space, list(gaussian_complex(space, rng, max(1, space.dim // 2))))
    x = gaussian_complex(space, rng, 10)
    y = gaussian_complex(space, rng, 10)
    # unnormalized distances are subadditive
    dx = np.linalg.norm(x - u.project(x), axis=-1)
    dy = np.linalg.norm(y - u.project(y), axis=-1)
    dxy = np.linalg.norm((x + y) - u.project(x + y), axis=-1)
    assert np.all(dxy <= dx + dy + 1e-12)


def test_whole_space_is_ideal(space):
    u = Subspace.whole(space)
    for variant in ("definition", "prop12"):
        assert check_generalized_ideal(u, u, variant, budget=100).ok
    assert check_ideal_modulus_implication(u, u, budget=100).ok


def test_support_ideal_commutative():
    sp = SpaceDescriptor((1, 1, 1, 1))
    u = Subspace(sp, [_basis_vec(4, 0), _basis_vec(4, 1)])
    v = Subspace(sp, [_basis_vec(4, 0), _basis_vec(4, 1), _basis_vec(4, 2)])
    for variant in ("definition", "prop12"):
        assert check_generalized_ideal(u, v, variant, budget=200).ok
    assert check_ideal_modulus_implication(u, v, budget=200).ok
    assert check_mvv_ideal(u, Subspace.whole(sp), budget=200).ok


def test_diagonal_span_ideal_matrix_block():
    # diagonal matrices inside one 2x2 block form an ideal of themselves
    sp = SpaceDescriptor((2,))
    diag = Subspace(sp, [_basis_vec(4, 0), _basis_vec(4, 3)])
    for variant in ("definition", "prop12"):
        assert check_generalized_ideal(diag, diag, variant, budget=200).ok


def test_hand_counterexample_detected():
    # u = (1,1) in U, v = (2,0) in V gives (u-v)_+ - (u+v)_- = (0,1) outside U
    sp = SpaceDescriptor((1, 1))
    u_sub = Subspace(sp, [np.array([1.0, 1.0], dtype=complex)])
    v_sub = Subspace.whole(sp)
    for variant in ("definition", "prop12"):
        verdict = check_generalized_ideal(u_sub, v_sub, variant, budget=400, seed=1)
        assert verdict.status == "violation"
    # the explicit pair itself
    u = np.array([1.0, 1.0])
    v = np.array([2.0, 0.0])
    first = np.maximum(u - v, 0) - np.maximum(-(u + v), 0)
    assert np.allclose(first, [0.0, 1.0])
    assert float(u_sub.residual(first.astype(complex))) > 0.1


def test_mvv_counterexample_and_equivalence():
    sp = SpaceDescriptor((1, 1))
    u_sub = Subspace(sp, [np.array([1.0, 1.0], dtype=complex)])
    whole = Subspace.whole(sp)
    v = check_mvv_ideal(u_sub, whole, budget=600, seed=2)
    assert v.status == "violation"
    # equivalence on a small commutative sublattice corpus
    rng = derived_rng(3, 0)
    corpus = []
    for d in (3, 4):
        spd = SpaceDescriptor((1,) * d)
        whole_d = Subspace.whole(spd)
        for r in range(1, d):
            support = Subspace(spd, [_basis_vec(d, i) for i in range(r)])
            corpus.append((spd, support, whole_d))
        mixed = Subspace(spd, [np.ones(d, dtype=complex)])
        corpus.append((spd, mixed, whole_d))
    for spd, u_s, v_s in corpus:
        a = check_generalized_ideal(u_s, v_s, "definition", budget=400, seed=5)
        b = check_mvv_ideal(u_s, v_s, budget=400, seed=5)
        if a.decided and b.decided:
            assert a.status == b.status, (spd.blocks, a.status, b.status)


def test_mvv_requires_commutative():
    sp = SpaceDescriptor((2,))
    whole = Subspace.whole(sp)
    with pytest.raises(CommutativityError):
        check_mvv_ideal(whole, whole)


def test_vacuous_real_part_inconclusive():
    sp = SpaceDescriptor((2,))
    u = Subspace(sp, [_basis_vec(4, 1)])  # no Hermitian elements
    v = Subspace.whole(sp)
    verdict = check_generalized_ideal(u, v, "definition", budget=50)
    assert verdict.status == "inconclusive"
