"""Closed convex sets, Dykstra's projection, and the invariance criteria.

A ``ConvexSetOracle`` wraps an orthogonal projection onto a closed convex set
(the relevant inner product is the real part of the Hermitian one).  Sets used
by the domination checks are intersections of "rotated" cone constraints on a
product space; those constraints have exact projections, and Dykstra's scheme
over them supplies an independent oracle for the closed-form projections.
"""

from __future__ import annotations

import numpy as np

from . import spaces
from .errors import ShapeMismatchError
from .forms import FormOperator, ProductForm, default_t_grid
from .sampling import derived_rng
from .spaces import SpaceDescriptor
from .verdicts import INCONCLUSIVE, Verdict, Witness, from_margins


class ConvexSetOracle:
    """Base class: an exact projection procedure plus a membership margin."""

    dim: int

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def member_residual(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.linalg.norm(x - self.project(x), axis=-1)

    def is_member(self, x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        return self.member_residual(x) <= tol * (1.0 + np.linalg.norm(x, axis=-1))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Members obtained by projecting full-support Gaussian vectors."""
        g = rng.standard_normal((n, self.dim)) + 1j * rng.standard_normal((n, self.dim))
        return self.project(g)


class ExactSet(ConvexSetOracle):
    """Oracle from an explicit projection function."""

    def __init__(self, dim: int, project_fn, name: str = "exact"):
        self.dim = dim
        self._project = project_fn
        self.name = name

    def project(self, x: np.ndarray) -> np.ndarray:
        return self._project(np.asarray(x, dtype=complex))


class ConeSet(ConvexSetOracle):
    """The positive cone of a single space."""

    def __init__(self, space: SpaceDescriptor):
        self.space = space
        self.dim = space.dim
        self.name = "cone"

    def project(self, x: np.ndarray) -> np.ndarray:
        return spaces.pos_part_vec(self.space, x)


class RotatedConeConstraint(ConvexSetOracle):
    """On H x H: the set {(a, b) : b + sign * a in the cone}.

    The 45-degree rotation q = (sign*a + b)/sqrt2, p = (a - sign*b)/sqrt2 is
    orthogonal and turns the constraint into "q in the cone, p free", so the
    projection is exact.
    """

    def __init__(self, space: SpaceDescriptor, sign: int):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.space = space
        self.sign = sign
        self.dim = 2 * space.dim
        self.name = f"rotated_cone({sign:+d})"

    def project(self, x: np.ndarray) -> np.ndarray:
        d = self.space.dim
        x = np.asarray(x, dtype=complex)
        a, b = x[..., :d], x[..., d:]
        s = self.sign
        r = np.sqrt(0.5)
        q = (s * a + b) * r
        p = (a - s * b) * r
        q = spaces.pos_part_vec(self.space, q)
        return np.concatenate([(p + s * q) * r, (q - s * p) * r], axis=-1)


class FirstFactorCone(ConvexSetOracle):
    """On H x H: the set {(a, b) : a in the cone}, second factor free."""

    def __init__(self, space: SpaceDescriptor):
        self.space = space
        self.dim = 2 * space.dim
        self.name = "first_factor_cone"

    def project(self, x: np.ndarray) -> np.ndarray:
        d = self.space.dim
        x = np.asarray(x, dtype=complex)
        return np.concatenate([spaces.pos_part_vec(self.space, x[..., :d]), x[..., d:]], axis=-1)


class ProductConeSet(ConvexSetOracle):
    """On H x H: both factors in the cone (the C_0 of the positive-pair proof)."""

    def __init__(self, space: SpaceDescriptor):
        self.space = space
        self.dim = 2 * space.dim
        self.name = "cone_x_cone"

    def project(self, x: np.ndarray) -> np.ndarray:
        d = self.space.dim
        x = np.asarray(x, dtype=complex)
        return np.concatenate(
            [spaces.pos_part_vec(self.space, x[..., :d]),
             spaces.pos_part_vec(self.space, x[..., d:])], axis=-1
        )


class ThetaConstraint(ConvexSetOracle):
    """On H x H: the set {(a, b) : re(e^{i theta} a) <= b}.

    Rotating the first factor by e^{i theta} reduces to the theta = 0 case,
    whose projection moves half of (re a - b)_+ between the components.
    """

    def __init__(self, space: SpaceDescriptor, theta: float):
        self.space = space
        self.theta = float(theta)
        self.dim = 2 * space.dim
        self.name = f"theta({theta:.4f})"

    def project(self, x: np.ndarray) -> np.ndarray:
        d = self.space.dim
        x = np.asarray(x, dtype=complex)
        a, b = x[..., :d], x[..., d:]
        ph = np.exp(1j * self.theta)
        br = spaces.real_part_vec(self.space, b)
        w = spaces.pos_part_vec(
            self.space, spaces.real_part_vec(self.space, ph * a) - br
        )
        # b is forced into the real subspace; its J-imaginary part projects to 0
        return np.concatenate([a - 0.5 * np.conj(ph) * w, br + 0.5 * w], axis=-1)


class DykstraSet(ConvexSetOracle):
    """Intersection of exact oracles via Dykstra's corrected alternating scheme."""

    def __init__(self, oracles: list[ConvexSetOracle], tol: float = 1e-10, max_iter: int = 100_000):
        if not oracles:
            raise ValueError("need at least one oracle")
        dims = {o.dim for o in oracles}
        if len(dims) != 1:
            raise ShapeMismatchError("oracles live on different spaces")
        self.oracles = list(oracles)
        self.dim = oracles[0].dim
        self.tol = tol
        self.max_iter = max_iter
        self.name = "dykstra(" + ",".join(getattr(o, "name", "?") for o in oracles) + ")"
        self.last_info: dict = {}

    def project(self, x: np.ndarray) -> np.ndarray:
        y, info = dykstra_project(self.oracles, x, tol=self.tol, max_iter=self.max_iter)
        self.last_info = info
        return y


def dykstra_project(
    oracles: list[ConvexSetOracle],
    x: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> tuple[np.ndarray, dict]:
    """Project onto the intersection of the oracles' sets, batched.

    Standard Dykstra iteration with one correction term per set.  Stops when
    the worst per-sample change over a full cycle drops below ``tol`` times
    (1 + norm), or when the cycle budget runs out (reported, not raised).
    """
    x = np.asarray(x, dtype=complex)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    m = len(oracles)
    y = x.copy()
    corrections = [np.zeros_like(x) for _ in range(m)]
    scale = 1.0 + np.linalg.norm(x, axis=-1)
    n_cycles = 0
    converged = np.zeros(x.shape[0], dtype=bool)
    max_cycles = max(1, max_iter // m)
    while n_cycles < max_cycles:
        prev = y.copy()
        for i, oracle in enumerate(oracles):
            z = y + corrections[i]
            y = oracle.project(z)
            corrections[i] = z - y
        n_cycles += 1
        change = np.linalg.norm(y - prev, axis=-1)
        converged = change <= tol * scale
        if np.all(converged):
            break
    info = {
        "cycles": n_cycles,
        "converged": bool(np.all(converged)),
        "converged_mask": converged.copy(),
        "residual": float(np.max(np.linalg.norm(y - prev, axis=-1) / scale)),
    }
    return (y[0], info) if single else (y, info)


# ---------------------------------------------------------------------------
# Invariance criteria for closed convex sets
# ---------------------------------------------------------------------------

INVARIANCE_CONDITIONS = ("i", "ii", "iii", "iv", "v", "vi")


def check_invariance(
    c_form: FormOperator | ProductForm,
    convex_set: ConvexSetOracle,
    condition: str,
    c0: ConvexSetOracle | None = None,
    budget: int = 200,
    t_grid: np.ndarray | None = None,
    tol: float = 1e-8,
    seed: int = 0,
) -> Verdict:
    """One of the equivalent semigroup-invariance criteria for a convex set.

    (i)  orbit membership for sampled members;
    (ii) energy decrease c(Px) <= c(x) for sampled x;
    (iii)/(iv) the variational pairings re c(x, x-Px) >= 0, re c(Px, x-Px) >= 0;
    (v)/(vi) the (ii)/(iii) variants restricted to a larger invariant set C_0.
    """
    if condition not in INVARIANCE_CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    if condition in ("v", "vi") and c0 is None:
        raise ValueError("conditions (v)/(vi) need the auxiliary set C_0")
    if c_form.dim != convex_set.dim:
        raise ShapeMismatchError("form and set dimensions disagree")
    rng = derived_rng(seed, INVARIANCE_CONDITIONS.index(condition))
    notes: list[str] = []

    if condition == "i":
        if t_grid is None:
            t_grid = default_t_grid()
        x = convex_set.sample(rng, budget)
        margins = []
        for t in t_grid:
            y = c_form.evolve(float(t), x)
            resid = convex_set.member_residual(y)
            margins.append(-resid / (1.0 + np.linalg.norm(y, axis=-1)))
        margins = np.stack(margins)

        def witness_fn(flat):
            ti, i = np.unravel_index(flat, margins.shape)
            return Witness(vectors={"x": x[i]}, margin=float(margins[ti, i]),
                           index=int(i), t=float(t_grid[ti]))

        return from_margins(margins.ravel(), tol, budget * len(t_grid), witness_fn, notes)

    # sample points for the form-level conditions; violations concentrate in a
    # thin shell around the set's boundary, so mix bulk Gaussians with points
    # pushed a controlled distance off sampled members
    dim = c_form.dim
    n_plain = max(budget // 3, 1)
    g = rng.standard_normal((budget, dim)) + 1j * rng.standard_normal((budget, dim))
    n_shell = budget - n_plain
    if n_shell > 0:
        members = convex_set.project(g[n_plain:])
        w = rng.standard_normal((n_shell, dim)) + 1j * rng.standard_normal((n_shell, dim))
        w /= np.linalg.norm(w, axis=-1, keepdims=True) + 1e-12
        eps = rng.uniform(0.005, 0.5, size=(n_shell, 1)) \
            * (1.0 + np.linalg.norm(members, axis=-1, keepdims=True))
        g = np.concatenate([g[:n_plain], members + eps * w], axis=0)
    if condition in ("v", "vi"):
        # restrict to C_0 and record whether C_0 itself looks invariant
        x = c0.project(g)
        inv = check_invariance(c_form, c0, "i", budget=min(budget, 50),
                               t_grid=t_grid, tol=tol, seed=seed + 1)
        if not inv.ok:
            notes.append("auxiliary set C_0 failed its own invariance probe")
    else:
        x = g
    px = convex_set.project(x)
    if isinstance(convex_set, DykstraSet) and not convex_set.last_info.get("converged", True):
        return Verdict(INCONCLUSIVE, float("nan"), budget,
                       notes=notes + ["dykstra projection did not converge"])

    if condition in ("ii", "v"):
        lhs = c_form.quad(px)
        rhs = c_form.quad(x)
        scale = 1.0 + np.abs(lhs) + np.abs(rhs)
        margins = (rhs - lhs) / scale
    elif condition in ("iii", "vi"):
        vals = c_form.pair(x, x - px).real
        margins = vals / (1.0 + np.abs(vals) + c_form.quad(x))
    else:  # iv
        vals = c_form.pair(px, x - px).real
        margins = vals / (1.0 + np.abs(vals) + c_form.quad(x))

    def witness_fn(i):
        return Witness(vectors={"x": x[i]}, margin=float(margins[i]), index=int(i))

    return from_margins(margins, tol, budget, witness_fn, notes)
