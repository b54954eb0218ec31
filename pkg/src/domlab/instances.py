"""Instance construction and file I/O.

An instance file is a self-describing JSON document holding the block
structure, one or two generator matrices in the canonical basis (complex
entries as [re, im] pairs), optional subspace bases, and metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import spaces
from .domination import DominationInstance
from .forms import FormOperator
from .sampling import derived_rng
from .spaces import SpaceDescriptor

SCHEMA = "domlab-instance-v1"
TOOL_VERSION = "0.1.0"

KINDS = ("derivation_example", "perturbed_pair", "commutative_random", "adversarial", "random_pair")


# ---------------------------------------------------------------------------
# linear-map matrices in the canonical basis
# ---------------------------------------------------------------------------

def map_matrix(space: SpaceDescriptor, fn) -> np.ndarray:
    """Matrix of a linear map on H, columns = images of the matrix units."""
    d = space.dim
    cols = fn(np.eye(d, dtype=complex))  # rows are images of basis vectors
    return np.asarray(cols, dtype=complex).T


def blockwise_commutator_matrix(space: SpaceDescriptor, b_blocks: list[np.ndarray]) -> np.ndarray:
    """Matrix of x -> i(bx - xb), blockwise; the derivation built from b."""

    def fn(x):
        mats = space.split(x)
        return space.merge([1j * (b @ m - m @ b) for m, b in zip(mats, b_blocks)])

    return map_matrix(space, fn)


def conjugation_matrix(space: SpaceDescriptor, a_blocks: list[np.ndarray]) -> np.ndarray:
    """Matrix of x -> a x a, blockwise."""

    def fn(x):
        mats = space.split(x)
        return space.merge([a @ m @ a for m, a in zip(mats, a_blocks)])

    return map_matrix(space, fn)


def left_mult_matrix(space: SpaceDescriptor, c_blocks: list[np.ndarray]) -> np.ndarray:
    """Matrix of x -> c x, blockwise (not real unless c is central)."""

    def fn(x):
        mats = space.split(x)
        return space.merge([c @ m for m, c in zip(mats, c_blocks)])

    return map_matrix(space, fn)


def hermitian_basis(space: SpaceDescriptor) -> np.ndarray:
    """Unitary whose columns are an orthonormal basis of the J-real subspace."""
    d = space.dim
    cols = []
    for k, n in enumerate(space.blocks):
        for i in range(n):
            for j in range(n):
                m = [np.zeros((nb, nb), dtype=complex) for nb in space.blocks]
                if i == j:
                    m[k][i, i] = 1.0
                elif i < j:
                    m[k][i, j] = m[k][j, i] = np.sqrt(0.5)
                else:
                    m[k][j, i] = 1j * np.sqrt(0.5)
                    m[k][i, j] = -1j * np.sqrt(0.5)
                cols.append(space.merge(m))
    return np.stack(cols, axis=1)


def random_real_psd_generator(space: SpaceDescriptor, rng: np.random.Generator,
                              scale: float = 1.0) -> np.ndarray:
    """Random J-commuting Hermitian PSD generator.

    A symmetric PSD operator on the real subspace, extended complex-linearly:
    such extensions are exactly the real self-adjoint generators.
    """
    d = space.dim
    w = hermitian_basis(space)
    r = rng.standard_normal((d, d))
    s = (r @ r.T) * (scale / d)
    return w @ s @ w.conj().T


def random_laplacian(d: int, rng: np.random.Generator, density: float = 0.7,
                     weight_scale: float = 1.0) -> np.ndarray:
    """Weighted graph Laplacian: PSD, nonpositive off-diagonal entries."""
    w = rng.uniform(0.2, 1.0, size=(d, d)) * weight_scale
    mask = rng.random((d, d)) < density
    w = np.triu(w * mask, 1)
    w = w + w.T
    lap = np.diag(w.sum(axis=1)) - w
    return lap


# ---------------------------------------------------------------------------
# instance container and serialization
# ---------------------------------------------------------------------------

def _c2l(a: np.ndarray):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _l2c(lst) -> np.ndarray:
    arr = np.asarray(lst, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass
class Instance:
    """One laboratory problem: a space, one or two generators, metadata."""

    space: SpaceDescriptor
    kind: str
    seed: int
    params: dict = field(default_factory=dict)
    a_matrix: np.ndarray | None = None
    b_matrix: np.ndarray | None = None
    subspaces: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def form_a(self) -> FormOperator:
        if self.a_matrix is None:
            raise ValueError("instance has no first generator")
        return FormOperator(self.space, self.a_matrix)

    def form_b(self) -> FormOperator:
        if self.b_matrix is None:
            raise ValueError("instance has no second generator")
        return FormOperator(self.space, self.b_matrix)

    def domination(self) -> DominationInstance:
        return DominationInstance(self.space, self.form_a(), self.form_b(),
                                  dict(self.metadata, kind=self.kind, seed=self.seed))

    def to_dict(self) -> dict:
        doc = {
            "schema": SCHEMA,
            "tool_version": TOOL_VERSION,
            "kind": self.kind,
            "seed": self.seed,
            "blocks": list(self.space.blocks),
            "params": self.params,
            "metadata": self.metadata,
        }
        if self.a_matrix is not None:
            doc["a"] = _c2l(self.a_matrix)
        if self.b_matrix is not None:
            doc["b"] = _c2l(self.b_matrix)
        if self.subspaces:
            doc["subspaces"] = {k: [_c2l(v) for v in vs] for k, vs in self.subspaces.items()}
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        if doc.get("schema") != SCHEMA:
            raise ValueError(f"unknown schema {doc.get('schema')!r}")
        space = SpaceDescriptor(tuple(doc["blocks"]))
        inst = cls(
            space=space,
            kind=doc["kind"],
            seed=int(doc["seed"]),
            params=doc.get("params", {}),
            a_matrix=_l2c(doc["a"]) if "a" in doc else None,
            b_matrix=_l2c(doc["b"]) if "b" in doc else None,
            subspaces={k: [_l2c(v) for v in vs]
                       for k, vs in doc.get("subspaces", {}).items()},
            metadata=doc.get("metadata", {}),
        )
        return inst

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "Instance":
        return cls.from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def _random_hermitian_blocks(space: SpaceDescriptor, rng: np.random.Generator,
                             scale: float = 1.0) -> list[np.ndarray]:
    out = []
    for n in space.blocks:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        out.append(0.5 * (g + g.conj().T) * scale)
    return out


def gen_instance(kind: str, params: dict | None = None, seed: int = 0) -> Instance:
    """Construct an instance of the given kind; deterministic in (kind, params, seed)."""
    params = dict(params or {})
    if kind not in KINDS:
        raise ValueError(f"unknown instance kind {kind!r}; choose from {KINDS}")
    rng = derived_rng(seed, KINDS.index(kind))
    if kind == "derivation_example":
        return _gen_derivation_example(params, seed, rng)
    if kind == "perturbed_pair":
        return _gen_perturbed_pair(params, seed, rng)
    if kind == "commutative_random":
        return _gen_commutative_random(params, seed, rng)
    if kind == "adversarial":
        return _gen_adversarial(params, seed, rng)
    return _gen_random_pair(params, seed, rng)


def _gen_derivation_example(params: dict, seed: int, rng: np.random.Generator) -> Instance:
    """Dominating pair: B from a blockwise derivation, A = B + M.

    By default M is a nonnegative scalar per block.  Then exp(-tA) equals the
    blockwise rescaling exp(-lambda_k t) exp(-tB), which is dominated by
    exp(-tB); this is the perturbation construction in its provably safe
    range.  With ``a_mode='general'`` M is the two-sided conjugation by a cone
    element, which preserves the cone but need not preserve positivity of the
    perturbed semigroup, so the pair is exploratory, not certified.
    """
    blocks = tuple(params.get("blocks", (2,)))
    space = SpaceDescriptor(blocks)
    if "b_blocks" in params:
        b_blocks = [np.asarray(b, dtype=complex) for b in params["b_blocks"]]
    else:
        b_blocks = _random_hermitian_blocks(space, rng, scale=params.get("b_scale", 1.0))
    d_mat = blockwise_commutator_matrix(space, b_blocks)
    b_gen = d_mat.conj().T @ d_mat
    a_mode = params.get("a_mode", "scalar")
    certified = True
    if a_mode == "scalar":
        lam = params.get("lambdas")
        if lam is None:
            lam = rng.uniform(0.0, params.get("lambda_scale", 1.0), size=len(blocks))
        lam = np.asarray(lam, dtype=float)
        m_gen = np.zeros_like(b_gen)
        for k in range(len(blocks)):
            sl = slice(space.offsets[k], space.offsets[k + 1])
            m_gen[sl, sl] = lam[k] * np.eye(blocks[k] ** 2)
        params["lambdas"] = lam.tolist()
    elif a_mode == "general":
        if "a_blocks" in params:
            a_blocks = [np.asarray(a, dtype=complex) for a in params["a_blocks"]]
        else:
            a_blocks = []
            for n in blocks:
                g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                a_blocks.append(g @ g.conj().T / n)
        m_gen = conjugation_matrix(space, a_blocks)
        certified = False
    else:
        raise ValueError(f"unknown a_mode {a_mode!r}")
    meta = {"construction": "derivation_plus_perturbation", "certified_dominating": certified}
    return Instance(space, "derivation_example", seed, params,
                    a_matrix=b_gen + m_gen, b_matrix=b_gen, metadata=meta)


def _gen_commutative_random(params: dict, seed: int, rng: np.random.Generator) -> Instance:
    d = int(params.get("d", 4))
    space = SpaceDescriptor((1,) * d)
    relation = params.get("relation", "dominating")
    b_gen = random_laplacian(d, rng, params.get("density", 0.7)) \
        + np.diag(rng.uniform(0.0, params.get("potential_scale", 1.0), size=d))
    if relation == "dominating":
        a_gen = b_gen + np.diag(rng.uniform(0.0, params.get("potential_scale", 1.0), size=d))
    elif relation == "random":
        a_gen = random_laplacian(d, rng, params.get("density", 0.7)) \
            + np.diag(rng.uniform(0.0, params.get("potential_scale", 1.0), size=d))
    else:
        raise ValueError(f"unknown relation {relation!r}")
    meta = {"construction": "laplacian_plus_potential",
            "certified_dominating": relation == "dominating"}
    return Instance(space, "commutative_random", seed, params,
                    a_matrix=a_gen.astype(complex), b_matrix=b_gen.astype(complex), metadata=meta)


def _gen_perturbed_pair(params: dict, seed: int, rng: np.random.Generator) -> Instance:
    """Commutative pair built to violate domination with a visible margin."""
    d = int(params.get("d", 4))
    eps = float(params.get("eps", 0.3))
    space = SpaceDescriptor((1,) * d)
    b_gen = random_laplacian(d, rng, params.get("density", 0.9)) \
        + np.diag(rng.uniform(0.0, 1.0, size=d))
    a_gen = b_gen + np.diag(rng.uniform(0.0, 1.0, size=d))
    j = int(rng.integers(0, d))
    k = int(rng.integers(0, d - 1))
    k = k + 1 if k >= j else k
    a_gen = a_gen.copy()
    a_gen[j, k] -= eps
    a_gen[k, j] -= eps
    # keep the perturbed generator accretive without touching its off-diagonal
    wmin = float(np.linalg.eigvalsh(a_gen).min())
    if wmin < 1e-6:
        a_gen += (1e-6 - wmin) * np.eye(d)
    meta = {"construction": "negative_offdiagonal_perturbation",
            "certified_dominating": False, "perturbed_entry": [j, k], "eps": eps}
    return Instance(space, "perturbed_pair", seed, params,
                    a_matrix=a_gen.astype(complex), b_matrix=b_gen.astype(complex), metadata=meta)


def _gen_adversarial(params: dict, seed: int, rng: np.random.Generator) -> Instance:
    """Hypothesis-breaking generators for negative tests."""
    flavor = params.get("flavor", "nonreal")
    if flavor == "nonreal":
        blocks = tuple(params.get("blocks", (2,)))
        space = SpaceDescriptor(blocks)
        if max(blocks) < 2:
            raise ValueError("nonreal flavor needs a block of size >= 2")
        c_blocks = []
        for n in space.blocks:
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            c_blocks.append(g @ g.conj().T / n + 0.1 * np.eye(n))
        a_gen = left_mult_matrix(space, c_blocks)
        b_gen = random_real_psd_generator(space, rng)
        meta = {"construction": "left_multiplication", "breaks": "realness"}
    elif flavor == "nonpositive_real":
        d = int(params.get("d", 3))
        space = SpaceDescriptor((1,) * d)
        a_gen = random_laplacian(d, rng)
        j, k = 0, 1
        a_gen = a_gen + 0.8 * (np.eye(d)[j][:, None] * np.eye(d)[k][None, :]
                               + np.eye(d)[k][:, None] * np.eye(d)[j][None, :])
        wmin = float(np.linalg.eigvalsh(a_gen).min())
        if wmin < 1e-6:
            a_gen += (1e-6 - wmin) * np.eye(d)
        b_gen = random_laplacian(d, rng)
        meta = {"construction": "positive_offdiagonal", "breaks": "positivity"}
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return Instance(space, "adversarial", seed, dict(params, flavor=flavor),
                    a_matrix=a_gen.astype(complex), b_matrix=b_gen.astype(complex), metadata=meta)


def _gen_random_pair(params: dict, seed: int, rng: np.random.Generator) -> Instance:
    blocks = tuple(params.get("blocks", (2,)))
    space = SpaceDescriptor(blocks)
    a_gen = random_real_psd_generator(space, rng, params.get("scale", 1.0))
    b_gen = random_real_psd_generator(space, rng, params.get("scale", 1.0))
    meta = {"construction": "random_real_psd", "certified_dominating": False}
    return Instance(space, "random_pair", seed, params,
                    a_matrix=a_gen, b_matrix=b_gen, metadata=meta)
