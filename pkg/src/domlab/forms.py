"""Quadratic forms, their generators, and the semigroups they generate.

In finite dimension a densely defined, closed, symmetric, accretive form is
the same thing as a positive-semidefinite Hermitian matrix A in the canonical
basis; the semigroup is exp(-tA), applied through a cached eigendecomposition.
"""

from __future__ import annotations

import numpy as np

from . import spaces
from .errors import HypothesisError, ShapeMismatchError
from .sampling import derived_rng, gaussian_real, wishart_positive
from .spaces import SpaceDescriptor
from .verdicts import Verdict, Witness, from_margins

HERMITICITY_RTOL = 1e-10
ACCRETIVITY_RTOL = 1e-9


def default_t_grid(n: int = 13, lo: float = 1e-3, hi: float = 10.0) -> np.ndarray:
    """Logarithmic time grid spanning transient and near-stationary regimes."""
    return np.geomspace(lo, hi, n)


class FormOperator:
    """A symmetric accretive form identified with its PSD generator matrix."""

    def __init__(self, space: SpaceDescriptor, matrix: np.ndarray, tol: float = ACCRETIVITY_RTOL):
        self.space = space
        A = np.asarray(matrix, dtype=complex)
        d = space.dim
        if A.shape != (d, d):
            raise ShapeMismatchError(f"generator must be {d}x{d}, got {A.shape}")
        scale = 1.0 + np.linalg.norm(A)
        herm_defect = np.linalg.norm(A - A.conj().T)
        if herm_defect > HERMITICITY_RTOL * scale:
            raise ValueError(
                f"generator is not Hermitian: defect {herm_defect:.3e} exceeds "
                f"{HERMITICITY_RTOL:.0e} * {scale:.3e}"
            )
        A = 0.5 * (A + A.conj().T)
        w, V = np.linalg.eigh(A)
        self.warnings: list[str] = []
        if w[0] < -tol * scale:
            raise ValueError(
                f"generator is not accretive: smallest eigenvalue {w[0]:.3e}"
            )
        if w[0] < 0.0:
            self.warnings.append(
                f"clamped negative eigenvalues (min {w[0]:.3e}) to zero"
            )
            w = np.maximum(w, 0.0)
            A = (V * w) @ V.conj().T
        self.matrix = A
        self.eigvals = w
        self.eigvecs = V

    @property
    def dim(self) -> int:
        return self.space.dim

    def apply(self, x: np.ndarray) -> np.ndarray:
        """A x, batched over leading axes (vectors along the last axis)."""
        return np.asarray(x, dtype=complex) @ self.matrix.T

    def pair(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Sesquilinear form value <A u, v>, batched."""
        return np.sum(self.apply(u) * np.conj(v), axis=-1)

    def quad(self, u: np.ndarray) -> np.ndarray:
        """Quadratic form value; real since A is Hermitian."""
        return self.pair(u, u).real

    def evolve(self, t: float, x: np.ndarray) -> np.ndarray:
        """exp(-tA) x through the cached spectral decomposition."""
        if t < 0:
            raise ValueError("semigroup parameter t must be nonnegative")
        coeff = np.asarray(x, dtype=complex) @ np.conj(self.eigvecs)
        return (coeff * np.exp(-t * self.eigvals)) @ self.eigvecs.T

    def semigroup_matrix(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError("semigroup parameter t must be nonnegative")
        return (self.eigvecs * np.exp(-t * self.eigvals)) @ self.eigvecs.conj().T

    def is_real(self, tol: float = 1e-9) -> bool:
        """True iff the generator commutes with J, so exp(-tA) maps reals to reals."""
        d = self.space.dim
        jmat = spaces.j_vec(self.space, np.eye(d)).T  # columns are J(e_i)
        resid = np.linalg.norm(self.matrix @ jmat - jmat @ np.conj(self.matrix))
        return resid <= tol * (1.0 + np.linalg.norm(self.matrix))


class ProductForm:
    """Diagonal form on H x H: c((u0,v0),(u1,v1)) = a(u0,u1) + b(v0,v1).

    Vectors of the product space are concatenations of the two components;
    the generated semigroup is diag(exp(-tA), exp(-tB)).
    """

    def __init__(self, a: FormOperator, b: FormOperator):
        if a.space != b.space:
            raise ShapeMismatchError("product form factors must share a space")
        self.a = a
        self.b = b
        self.space = a.space

    @property
    def dim(self) -> int:
        return 2 * self.space.dim

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = self.space.dim
        x = np.asarray(x, dtype=complex)
        if x.shape[-1] != 2 * d:
            raise ShapeMismatchError("expected product-space vector")
        return x[..., :d], x[..., d:]

    @staticmethod
    def join(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.concatenate([u, v], axis=-1)

    def apply(self, x: np.ndarray) -> np.ndarray:
        u, v = self.split(x)
        return self.join(self.a.apply(u), self.b.apply(v))

    def pair(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.sum(self.apply(x) * np.conj(y), axis=-1)

    def quad(self, x: np.ndarray) -> np.ndarray:
        return self.pair(x, x).real

    def evolve(self, t: float, x: np.ndarray) -> np.ndarray:
        u, v = self.split(x)
        return self.join(self.a.evolve(t, u), self.b.evolve(t, v))

    def is_real(self, tol: float = 1e-9) -> bool:
        return self.a.is_real(tol) and self.b.is_real(tol)


# ---------------------------------------------------------------------------
# operations on forms
# ---------------------------------------------------------------------------

def form_eval(a: FormOperator, u, v) -> complex:
    """a(u, v) = <A u, v> for single vectors or HVectors."""
    uu = u.vec if isinstance(u, spaces.HVector) else np.asarray(u, dtype=complex)
    vv = v.vec if isinstance(v, spaces.HVector) else np.asarray(v, dtype=complex)
    return complex(a.pair(uu, vv))


def semigroup_apply(a: FormOperator, t: float, u):
    """exp(-tA) u; contraction since A is PSD."""
    if isinstance(u, spaces.HVector):
        return spaces.HVector(a.space, a.evolve(t, u.vec))
    return a.evolve(t, np.asarray(u, dtype=complex))


def approx_form(a: FormOperator, t: float, u, v) -> complex:
    """Bounded approximation (1/t) <(I - exp(-tA)) u, v>; tends to a(u,v) as t -> 0."""
    if t <= 0:
        raise ValueError("approximating form needs t > 0")
    uu = u.vec if isinstance(u, spaces.HVector) else np.asarray(u, dtype=complex)
    vv = v.vec if isinstance(v, spaces.HVector) else np.asarray(v, dtype=complex)
    diff = uu - a.evolve(t, uu)
    return complex(np.sum(diff * np.conj(vv), axis=-1) / t)


def is_real_operator(a: FormOperator, tol: float = 1e-9) -> bool:
    return a.is_real(tol)


def positivity_check(
    a: FormOperator,
    method: str = "criterion",
    budget: int = 400,
    t_grid: np.ndarray | None = None,
    tol: float = 1e-9,
    seed: int = 0,
) -> Verdict:
    """Does exp(-tA) preserve the cone?

    ``criterion`` samples real u and tests the form-level condition
    re a(u, u_-) <= 0 (cone invariance via the projection criterion);
    ``direct`` samples cone elements and checks cone membership of the orbit.
    """
    if not a.is_real(tol=max(tol, 1e-9)):
        raise HypothesisError("positivity check requires a real generator")
    space = a.space
    rng = derived_rng(seed, 0)
    if method == "criterion":
        u = gaussian_real(space, rng, budget)
        um = spaces.neg_part_vec(space, u)
        vals = a.pair(u, um).real
        scale = 1.0 + np.abs(vals)
        margins = -vals / scale

        def witness_fn(i):
            return Witness(vectors={"u": u[i]}, margin=float(margins[i]), index=int(i))

        return from_margins(margins, tol, budget, witness_fn)
    if method == "direct":
        if t_grid is None:
            t_grid = default_t_grid()
        p = wishart_positive(space, rng, budget)
        all_margins = []
        for t in t_grid:
            q = a.evolve(float(t), p)
            m = spaces.cone_margin_vec(space, q) / (1.0 + spaces.norm_vec(space, q))
            all_margins.append(m)
        margins = np.stack(all_margins)  # (T, N)

        def witness_fn(flat):
            ti, i = np.unravel_index(flat, margins.shape)
            return Witness(
                vectors={"u": p[i]}, margin=float(margins[ti, i]),
                index=int(i), t=float(t_grid[ti]),
            )

        return from_margins(margins.ravel(), tol, budget * len(t_grid), witness_fn)
    raise ValueError(f"unknown method {method!r}")
