"""Form operators, semigroups, approximating forms, positivity checks."""

import numpy as np
import pytest

from domlab import FormOperator, ProductForm, SpaceDescriptor, approx_form, positivity_check
from domlab import spaces
from domlab.errors import HypothesisError
from domlab.forms import default_t_grid, form_eval, semigroup_apply
from domlab.instances import (
    blockwise_commutator_matrix,
    left_mult_matrix,
    random_laplacian,
    random_real_psd_generator,
)
from domlab.sampling import gaussian_complex, gaussian_real


def test_rejects_non_hermitian():
    sp = SpaceDescriptor((1, 1))
    with pytest.raises(ValueError, match="Hermitian"):
        FormOperator(sp, np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_rejects_non_accretive():
    sp = SpaceDescriptor((1, 1))
    with pytest.raises(ValueError, match="accretive"):
        FormOperator(sp, np.diag([1.0, -0.5]))


def test_clamps_tiny_negative_eigenvalue():
    sp = SpaceDescriptor((1, 1))
    op = FormOperator(sp, np.diag([1.0, -1e-12]))
    assert op.warnings
    assert op.eigvals.min() >= 0.0


def test_semigroup_algebra(space, rng):
    a = FormOperator(space, random_real_psd_generator(space, rng))
    x = gaussian_complex(space, rng, 4)
    assert np.allclose(a.evolve(0.0, x), x)
    # semigroup property and contraction
    assert np.allclose(a.evolve(0.7, a.evolve(0.3, x)), a.evolve(1.0, x), atol=1e-10)
    assert np.all(np.linalg.norm(a.evolve(2.0, x), axis=-1)
                  <= np.linalg.norm(x, axis=-1) + 1e-12)
    with pytest.raises(ValueError):
        a.evolve(-1.0, x)
    # matrix form consistent with the action
    t = 0.8
    assert np.allclose(x @ a.semigroup_matrix(t).T, a.evolve(t, x), atol=1e-12)


def test_form_values(space, rng):
    a = FormOperator(space, random_real_psd_generator(space, rng))
    u = gaussian_complex(space, rng, 1)[0]
    v = gaussian_complex(space, rng, 1)[0]
    val = form_eval(a, u, v)
    assert np.isclose(val, np.sum((a.matrix @ u) * np.conj(v)))
    assert a.quad(u[None])[0] >= -1e-12
    sg = semigroup_apply(a, 0.5, u)
    assert np.allclose(sg, a.evolve(0.5, u))


def test_realness_detection(rng):
    sp = SpaceDescriptor((2, 2))
    real_gen = FormOperator(sp, random_real_psd_generator(sp, rng))
    assert real_gen.is_real()
    c_blocks = []
    for n in sp.blocks:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        c_blocks.append(g @ g.conj().T + 0.1 * np.eye(n))
    nonreal = FormOperator(sp, left_mult_matrix(sp, c_blocks))
    assert not nonreal.is_real()
    with pytest.raises(HypothesisError):
        positivity_check(nonreal)


def test_real_generator_preserves_real_subspace(space, rng):
    a = FormOperator(space, random_real_psd_generator(space, rng))
    u = gaussian_real(space, rng, 4)
    for t in (0.1, 1.0):
        assert np.all(spaces.is_real_vec(space, a.evolve(t, u)))


def test_positivity_methods_agree_commutative(rng):
    sp = SpaceDescriptor((1, 1, 1, 1))
    lap = FormOperator(sp, random_laplacian(4, rng).astype(complex))
    for method in ("criterion", "direct"):
        assert positivity_check(lap, method).ok
    # a positive off-diagonal entry breaks positivity of the semigroup
    bad = random_laplacian(4, rng)
    bad[0, 1] = bad[1, 0] = 0.5
    wmin = np.linalg.eigvalsh(bad).min()
    if wmin < 0:
        bad += (1e-9 - wmin) * np.eye(4)
    badop = FormOperator(sp, bad.astype(complex))
    for method in ("criterion", "direct"):
        assert positivity_check(badop, method).status == "violation"


def test_positivity_dephasing_block(rng):
    sp = SpaceDescriptor((2,))
    b = [np.diag([1.0, -1.0]).astype(complex)]
    d_mat = blockwise_commutator_matrix(sp, b)
    gen = FormOperator(sp, d_mat.conj().T @ d_mat)
    for method in ("criterion", "direct"):
        assert positivity_check(gen, method).ok


def test_approx_form_linear_rate(space, rng):
    a = FormOperator(space, random_real_psd_generator(space, rng))
    u = gaussian_complex(space, rng, 1)[0]
    exact = form_eval(a, u, u).real
    ts = np.geomspace(1e-6, 1e-2, 9)
    errs = np.array([abs(approx_form(a, t, u, u).real - exact) for t in ts])
    keep = errs > 1e-13
    if keep.sum() >= 4:
        slope = np.polyfit(np.log(ts[keep]), np.log(errs[keep]), 1)[0]
        assert 0.9 <= slope <= 1.1
    with pytest.raises(ValueError):
        approx_form(a, 0.0, u, u)


def test_product_form(rng):
    sp = SpaceDescriptor((2,))
    a = FormOperator(sp, random_real_psd_generator(sp, rng))
    b = FormOperator(sp, random_real_psd_generator(sp, rng))
    c = ProductForm(a, b)
    u = gaussian_complex(sp, rng, 3)
    v = gaussian_complex(sp, rng, 3)
    x = np.concatenate([u, v], axis=-1)
    assert np.allclose(c.quad(x), a.quad(u) + b.quad(v))
    ev = c.evolve(0.5, x)
    assert np.allclose(ev[..., :sp.dim], a.evolve(0.5, u))
    assert np.allclose(ev[..., sp.dim:], b.evolve(0.5, v))
    assert c.is_real()


def test_default_t_grid():
    g = default_t_grid()
    assert len(g) == 13 and g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(10.0)
    assert np.all(np.diff(g) > 0)
