"""Finite-dimensional standard forms and their cone arithmetic.

The state space is a direct sum of full matrix algebras M_{n_1} + ... + M_{n_K}
with the trace inner product.  The positive cone consists of blockwise
positive-semidefinite Hermitian elements; the involution J is the blockwise
conjugate transpose.  Every vector is identified with its coordinate array in
the canonical matrix-unit basis (blocks in declared order, row-major within a
block), so a vector of the space is simply a complex ndarray of length
d = sum(n_k**2).  All kernels accept batches: arrays of shape (..., d).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NotRealError, ShapeMismatchError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class SpaceDescriptor:
    """Block sizes of a direct sum of full matrix algebras."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        if len(self.blocks) == 0:
            raise ValueError("need at least one block")
        if any(int(n) < 1 for n in self.blocks):
            raise ValueError("block sizes must be positive integers")
        object.__setattr__(self, "blocks", tuple(int(n) for n in self.blocks))

    @cached_property
    def dim(self) -> int:
        """Complex dimension d = sum of n_k squared."""
        return int(sum(n * n for n in self.blocks))

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        offs = [0]
        for n in self.blocks:
            offs.append(offs[-1] + n * n)
        return tuple(offs)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.blocks)

    def check_vec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape[-1:] != (self.dim,):
            raise ShapeMismatchError(
                f"expected trailing dimension {self.dim}, got shape {x.shape}"
            )
        return x

    def split(self, x: np.ndarray) -> list[np.ndarray]:
        """Views of a coordinate array as per-block matrices (..., n_k, n_k)."""
        x = self.check_vec(x)
        out = []
        for k, n in enumerate(self.blocks):
            sl = x[..., self.offsets[k]:self.offsets[k + 1]]
            out.append(sl.reshape(sl.shape[:-1] + (n, n)))
        return out

    def merge(self, mats: list[np.ndarray]) -> np.ndarray:
        """Inverse of split: per-block matrices back to a coordinate array."""
        flat = [m.reshape(m.shape[:-2] + (-1,)) for m in mats]
        return np.concatenate(flat, axis=-1)


# ---------------------------------------------------------------------------
# batched coordinate-level kernels
# ---------------------------------------------------------------------------

def inner_vec(space: SpaceDescriptor, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Trace inner product <u, v> = sum_k tr(u_k v_k*), batched."""
    u = space.check_vec(u)
    v = space.check_vec(v)
    return np.sum(u * np.conj(v), axis=-1)


def norm_vec(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    return np.linalg.norm(space.check_vec(u), axis=-1)


def j_vec(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    """The anti-unitary involution J: blockwise conjugate transpose."""
    mats = space.split(u)
    return space.merge([np.conj(np.swapaxes(m, -1, -2)) for m in mats])


def real_part_vec(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    """J-real part (u + Ju)/2, i.e. the blockwise Hermitian part."""
    return 0.5 * (space.check_vec(u) + j_vec(space, u))


def imag_part_vec(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    """J-imaginary part: u = re_J(u) + i * im_J(u)."""
    return -0.5j * (space.check_vec(u) - j_vec(space, u))


def realness_defect(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    return norm_vec(space, space.check_vec(u) - j_vec(space, u))


def is_real_vec(space: SpaceDescriptor, u: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    return realness_defect(space, u) <= tol * (1.0 + norm_vec(space, u))


def _require_real(space: SpaceDescriptor, u: np.ndarray, tol: float, what: str) -> np.ndarray:
    u = space.check_vec(u)
    bad = ~np.asarray(is_real_vec(space, u, tol))
    if np.any(bad):
        raise NotRealError(f"{what}: input is not J-real within tolerance {tol}")
    return u


def pos_part_vec(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    """Cone projection of a real vector: blockwise eigenvalue clamp at zero.

    The input is hermitized first, so for a general complex u this computes
    (re_J u)_+, which is the orthogonal projection onto the cone for the real
    inner product.
    """
    mats = space.split(real_part_vec(space, u))
    out = []
    for m in mats:
        if m.shape[-1] == 1:
            out.append(np.maximum(m.real, 0.0).astype(complex))
            continue
        w, vv = np.linalg.eigh(m)
        wp = np.maximum(w, 0.0)
        out.append(np.einsum("...ij,...j,...kj->...ik", vv, wp, np.conj(vv)))
    return space.merge(out)


def neg_part_vec(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    return pos_part_vec(space, -space.check_vec(u))


def modulus_vec(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    return pos_part_vec(space, u) + neg_part_vec(space, u)


def cone_margin_vec(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    """Signed cone-membership margin, batched.

    Minimum over blocks of the smallest eigenvalue of the Hermitian part,
    minus the Hermiticity defect, so non-real vectors get penalized.
    """
    u = space.check_vec(u)
    mats = space.split(real_part_vec(space, u))
    mins = []
    for m in mats:
        if m.shape[-1] == 1:
            mins.append(m[..., 0, 0].real)
        else:
            mins.append(np.linalg.eigvalsh(m)[..., 0])
    margin = np.min(np.stack(mins, axis=-1), axis=-1)
    return margin - realness_defect(space, u)


def is_positive_vec(space: SpaceDescriptor, u: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    return cone_margin_vec(space, u) >= -tol * (1.0 + norm_vec(space, u))


def sup_vec(space: SpaceDescriptor, u: np.ndarray, v: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """u v-join: projection of u onto v + cone, via u + (v-u)_+."""
    u = _require_real(space, u, tol, "sup")
    v = _require_real(space, v, tol, "sup")
    return u + pos_part_vec(space, v - u)


def inf_vec(space: SpaceDescriptor, u: np.ndarray, v: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """u v-meet: u + v minus the join."""
    u = _require_real(space, u, tol, "inf")
    v = _require_real(space, v, tol, "inf")
    return v - pos_part_vec(space, v - u)


# ---------------------------------------------------------------------------
# HVector: the user-facing element type
# ---------------------------------------------------------------------------

@dataclass
class HVector:
    """An element of the space: one complex square matrix per block."""

    space: SpaceDescriptor
    vec: np.ndarray
    _flags: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.vec = self.space.check_vec(np.asarray(self.vec, dtype=complex)).reshape(-1)

    @classmethod
    def from_blocks(cls, space: SpaceDescriptor, mats: list[np.ndarray]) -> "HVector":
        mats = [np.asarray(m, dtype=complex) for m in mats]
        if len(mats) != len(space.blocks):
            raise ShapeMismatchError("wrong number of blocks")
        for m, n in zip(mats, space.blocks):
            if m.shape != (n, n):
                raise ShapeMismatchError(f"block shape {m.shape} != ({n}, {n})")
        return cls(space, space.merge(mats))

    @property
    def blocks_mats(self) -> list[np.ndarray]:
        return self.space.split(self.vec)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def is_real(self, tol: float = DEFAULT_TOL) -> bool:
        key = ("real", tol)
        if key not in self._flags:
            self._flags[key] = bool(is_real_vec(self.space, self.vec, tol))
        return self._flags[key]

    def is_positive(self, tol: float = DEFAULT_TOL) -> bool:
        key = ("positive", tol)
        if key not in self._flags:
            self._flags[key] = bool(is_positive_vec(self.space, self.vec, tol))
        return self._flags[key]

    def __add__(self, other: "HVector") -> "HVector":
        return HVector(self.space, self.vec + other.vec)

    def __sub__(self, other: "HVector") -> "HVector":
        return HVector(self.space, self.vec - other.vec)

    def __mul__(self, scalar) -> "HVector":
        return HVector(self.space, self.vec * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "HVector":
        return HVector(self.space, -self.vec)


# ---------------------------------------------------------------------------
# public operations on HVectors
# ---------------------------------------------------------------------------

def inner(space: SpaceDescriptor, u: HVector, v: HVector) -> complex:
    """Trace inner product; conjugate-linear in the second argument."""
    return complex(inner_vec(space, u.vec, v.vec))


def involution_J(space: SpaceDescriptor, u: HVector) -> HVector:
    return HVector(space, j_vec(space, u.vec))


def jordan(space: SpaceDescriptor, u: HVector, tol: float = DEFAULT_TOL) -> tuple[HVector, HVector]:
    """Jordan decomposition u = u_+ - u_- of a real vector."""
    _require_real(space, u.vec, tol, "jordan")
    up = pos_part_vec(space, u.vec)
    return HVector(space, up), HVector(space, up - real_part_vec(space, u.vec))


def project_cone(space: SpaceDescriptor, u: HVector) -> HVector:
    """Orthogonal projection onto the cone: (re_J u)_+."""
    return HVector(space, pos_part_vec(space, u.vec))


def lattice_ops(
    space: SpaceDescriptor, u: HVector, v: HVector, tol: float = DEFAULT_TOL
) -> tuple[HVector, HVector, HVector]:
    """Join, meet, and modulus |u| = u_+ + u_- for real u, v."""
    s = sup_vec(space, u.vec, v.vec, tol)
    i = u.vec + v.vec - s
    return HVector(space, s), HVector(space, i), HVector(space, modulus_vec(space, u.vec))


def cone_margin(space: SpaceDescriptor, u: HVector, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    margin = float(cone_margin_vec(space, u.vec))
    return margin >= -tol * (1.0 + u.norm()), margin
