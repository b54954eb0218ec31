"""Generalized ideals between real parts of subspaces.

A subspace is given by a complex spanning set; its J-real part is computed
over the reals on the realified space.  The ideal conditions are sampled over
Gaussian coefficients on the real bases, since positivity transforms are
nonlinear and cannot be certified on a spanning set alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spaces
from .errors import CommutativityError, ShapeMismatchError
from .sampling import derived_rng
from .spaces import SpaceDescriptor
from .verdicts import INCONCLUSIVE, PRECONDITION_FAILED, Verdict, Witness, from_margins

RANK_RTOL = 1e-10


def _orthonormalize(basis: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Columns spanning the same space, orthonormal, rank-revealing."""
    if basis.size == 0:
        return basis.reshape(basis.shape[0], 0)
    q, s, _ = np.linalg.svd(basis, full_matrices=False)
    rank = int(np.sum(s > rtol * (s[0] if len(s) else 1.0)))
    return q[:, :rank]


class Subspace:
    """A complex-linear subspace with an exact projector."""

    def __init__(self, space: SpaceDescriptor, basis_vectors):
        self.space = space
        vecs = [space.check_vec(np.asarray(v, dtype=complex)).reshape(-1) for v in basis_vectors]
        mat = np.stack(vecs, axis=1) if vecs else np.zeros((space.dim, 0), dtype=complex)
        self.onb = _orthonormalize(mat)

    @classmethod
    def whole(cls, space: SpaceDescriptor) -> "Subspace":
        return cls(space, list(np.eye(space.dim, dtype=complex)))

    @property
    def dim_c(self) -> int:
        return self.onb.shape[1]

    def project(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return (x @ np.conj(self.onb)) @ self.onb.T

    def residual(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.linalg.norm(x - self.project(x), axis=-1) / (
            1.0 + np.linalg.norm(x, axis=-1))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        return self.residual(x) <= tol


@dataclass
class RealSubspace:
    """The J-fixed part of a subspace, with a real basis."""

    parent: Subspace
    basis: np.ndarray  # (dim_real, d) complex rows, each J-fixed

    @property
    def dim_r(self) -> int:
        return self.basis.shape[0]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.dim_r == 0:
            raise ValueError("real part is trivial")
        coeff = rng.standard_normal((n, self.dim_r))
        return coeff @ self.basis


def _realify(x: np.ndarray) -> np.ndarray:
    return np.concatenate([x.real, x.imag], axis=-1)


def _complexify(r: np.ndarray, d: int) -> np.ndarray:
    return r[..., :d] + 1j * r[..., d:]


def real_part_basis(u: Subspace) -> RealSubspace:
    """Basis of U intersect fixed(J), computed over the realified space."""
    space = u.space
    d = space.dim
    if u.dim_c == 0:
        return RealSubspace(u, np.zeros((0, d), dtype=complex))
    # real span of {q, iq} for complex basis vectors q
    cols = np.concatenate([u.onb, 1j * u.onb], axis=1)
    m = np.concatenate([cols.real, cols.imag], axis=0)  # (2d, 2m)
    n = _orthonormalize(m)
    # J in realified coordinates: J(x) = Jm conj(x) with Jm the matrix-unit swap
    jm = spaces.j_vec(space, np.eye(d)).T.real
    top = np.concatenate([jm, np.zeros((d, d))], axis=1)
    bot = np.concatenate([np.zeros((d, d)), -jm], axis=1)
    jr = np.concatenate([top, bot], axis=0)
    k = (jr - np.eye(2 * d)) @ n
    _, s, vt = np.linalg.svd(k, full_matrices=True)
    s = np.concatenate([s, np.zeros(max(0, vt.shape[0] - len(s)))])
    null = vt[s <= RANK_RTOL * max(1.0, s[0] if len(s) else 1.0)].T
    fixed = n @ null  # (2d, r)
    basis = _complexify(fixed.T, d)
    return RealSubspace(u, basis)


def _membership_verdict(target: Subspace, points: np.ndarray, labels, tol: float,
                        samples: int, extra_notes=None) -> Verdict:
    resid = target.residual(points)
    margins = -resid

    def witness_fn(i):
        vecs = {"point": points[i]}
        if labels is not None:
            vecs.update({k: v[i] for k, v in labels.items()})
        return Witness(vectors=vecs, margin=float(margins[i]), index=int(i))

    return from_margins(margins, tol, samples, witness_fn, extra_notes)


def check_generalized_ideal(
    u_sub: Subspace,
    v_sub: Subspace,
    variant: str = "definition",
    budget: int = 300,
    tol: float = 1e-8,
    seed: int = 0,
) -> Verdict:
    """Is the real part of U a generalized ideal of the real part of V?

    ``definition`` tests (u-v)_+ - (u+v)_- in U and (u-v)_+ + (u+v)_- in V;
    ``prop12`` tests the rewritten pair (u+v)_+ -/+ (v-u)_+ against U and V.
    """
    if variant not in ("definition", "prop12"):
        raise ValueError(f"unknown variant {variant!r}")
    if u_sub.space != v_sub.space:
        raise ShapeMismatchError("subspaces live on different spaces")
    space = u_sub.space
    uj = real_part_basis(u_sub)
    vj = real_part_basis(v_sub)
    if uj.dim_r == 0 or vj.dim_r == 0:
        return Verdict(INCONCLUSIVE, float("nan"), 0,
                       notes=["vacuous quantifier: a real part is trivial"])
    rng = derived_rng(seed, 50 if variant == "definition" else 51)
    u = uj.sample(rng, budget)
    v = vj.sample(rng, budget)
    if variant == "definition":
        pd = spaces.pos_part_vec(space, u - v)
        nm = spaces.neg_part_vec(space, u + v)
        first, second = pd - nm, pd + nm
    else:
        pp = spaces.pos_part_vec(space, u + v)
        qq = spaces.pos_part_vec(space, v - u)
        first, second = pp - qq, pp + qq
    v1 = _membership_verdict(u_sub, first, {"u": u, "v": v}, tol, budget)
    v2 = _membership_verdict(v_sub, second, {"u": u, "v": v}, tol, budget)
    worse = v1 if v1.margin <= v2.margin else v2
    status = worse.status if (not v1.ok or not v2.ok) else v1.status
    return Verdict(status, min(v1.margin, v2.margin), budget, worse.witness, worse.notes)


def check_ideal_modulus_implication(
    u_sub: Subspace,
    v_sub: Subspace,
    budget: int = 300,
    tol: float = 1e-8,
    seed: int = 0,
) -> Verdict:
    """Necessary condition: moduli of real U-elements land in V."""
    space = u_sub.space
    uj = real_part_basis(u_sub)
    if uj.dim_r == 0:
        return Verdict(INCONCLUSIVE, float("nan"), 0,
                       notes=["vacuous quantifier: real part of U is trivial"])
    rng = derived_rng(seed, 52)
    u = uj.sample(rng, budget)
    mod = spaces.modulus_vec(space, u)
    return _membership_verdict(v_sub, mod, {"u": u}, tol, budget)


def check_mvv_ideal(
    u_sub: Subspace,
    v_sub: Subspace,
    budget: int = 300,
    tol: float = 1e-8,
    seed: int = 0,
) -> Verdict:
    """Commutative bridge: modulus condition plus the sign-truncation condition.

    (a) moduli of real U-elements lie in V; (b) if v in the real part of V is
    entrywise dominated by |u|, then v * sgn(u) lies in U.  Premise pairs for
    (b) are built by entrywise scaling of |u| and kept only when they land in
    V (rejection, not projection, so the premise is never broken).
    """
    space = u_sub.space
    if not space.is_commutative:
        raise CommutativityError("the sign-based conditions need a commutative space")
    uj = real_part_basis(u_sub)
    vj = real_part_basis(v_sub)
    if uj.dim_r == 0:
        return Verdict(INCONCLUSIVE, float("nan"), 0,
                       notes=["vacuous quantifier: real part of U is trivial"])
    rng = derived_rng(seed, 53)
    # sublattice precondition on V
    if vj.dim_r > 0:
        vs = vj.sample(rng, 100)
        if not bool(np.all(v_sub.contains(spaces.modulus_vec(space, vs), tol=1e-7))):
            return Verdict(PRECONDITION_FAILED, float("nan"), 0,
                           notes=["V is not a sublattice; the bridge does not apply"])
    u = uj.sample(rng, budget)
    mod_u = np.abs(u.real)
    verdict_a = _membership_verdict(v_sub, mod_u.astype(complex), {"u": u}, tol, budget)

    # condition (b): rejection-sample dominated v in the real part of V
    phi = rng.uniform(-1.0, 1.0, size=(budget, space.dim))
    v = phi * mod_u
    keep = v_sub.contains(v.astype(complex), tol=1e-9)
    notes = [f"condition (b): {int(keep.sum())}/{budget} premise pairs accepted"]
    if not np.any(keep):
        vb = Verdict(INCONCLUSIVE, float("nan"), 0,
                     notes=notes + ["no premise pair satisfied v in V"])
    else:
        sgn = np.sign(u.real)
        cand = (v * sgn)[keep].astype(complex)
        vb = _membership_verdict(u_sub, cand, {"u": u[keep], "v": v[keep].astype(complex)},
                                 tol, int(keep.sum()), notes)
    if verdict_a.status == "violation" or vb.status == "violation":
        worse = verdict_a if verdict_a.margin <= (vb.margin if vb.decided else 0.0) else vb
        return Verdict("violation", worse.margin, budget, worse.witness, worse.notes)
    if verdict_a.ok and vb.ok:
        return Verdict("pass", min(verdict_a.margin, vb.margin), budget, notes=notes)
    return Verdict(INCONCLUSIVE, verdict_a.margin, budget, notes=notes)
