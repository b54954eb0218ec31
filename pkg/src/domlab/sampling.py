"""Seeded samplers for vectors, cone elements, and order intervals.

All randomness flows through numpy Generators seeded from explicit integer
tuples, so any check re-run with the same seed produces identical samples
regardless of how the work is split across threads.
"""

from __future__ import annotations

import numpy as np

from .spaces import SpaceDescriptor, real_part_vec


def derived_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator keyed by (seed, stream indices); stable across runs."""
    return np.random.default_rng((int(seed),) + tuple(int(s) for s in stream))


def gaussian_complex(space: SpaceDescriptor, rng: np.random.Generator, n: int) -> np.ndarray:
    d = space.dim
    return rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))


def gaussian_real(space: SpaceDescriptor, rng: np.random.Generator, n: int) -> np.ndarray:
    """J-real (blockwise Hermitian) Gaussian samples, shape (n, d)."""
    return real_part_vec(space, gaussian_complex(space, rng, n)) * np.sqrt(2.0)


def wishart_positive(
    space: SpaceDescriptor,
    rng: np.random.Generator,
    n: int,
    boundary_prob: float = 0.25,
) -> np.ndarray:
    """Cone samples p = g g* with complex Gaussian g, blockwise.

    Full rank almost surely; with probability ``boundary_prob`` per sample a
    random eigenvalue is zeroed so cone boundaries get exercised too.
    """
    out = []
    for k, nb in enumerate(space.blocks):
        g = rng.standard_normal((n, nb, nb)) + 1j * rng.standard_normal((n, nb, nb))
        p = g @ np.conj(np.swapaxes(g, -1, -2)) / (2.0 * nb)
        if nb > 1:
            kill = rng.random(n) < boundary_prob
            if np.any(kill):
                w, v = np.linalg.eigh(p[kill])
                which = rng.integers(0, nb, size=int(kill.sum()))
                w[np.arange(len(which)), which] = 0.0
                p[kill] = np.einsum("...ij,...j,...kj->...ik", v, w, np.conj(v))
        out.append(p)
    return space.merge(out)


def order_interval_pairs(
    space: SpaceDescriptor, rng: np.random.Generator, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Pairs (u, v) with -v <= u <= v, via u = p - q, v = p + q, p,q in the cone."""
    p = wishart_positive(space, rng, n)
    q = wishart_positive(space, rng, n)
    return p - q, p + q
