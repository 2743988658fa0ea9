"""Multi-matrix C*-algebras A = M_{n_1} + ... + M_{n_k}.

Elements are stored block by block. The canonical basis is the set of matrix
units E_pq^(i), ordered block-major then row-major; coordinates of an element
are its block entries flattened in that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from numbers import Number
from typing import Callable, Sequence

import numpy as np


class DescriptorMismatchError(ValueError):
    """Operands live on different algebras."""


@dataclass(frozen=True)
class AlgebraDescriptor:
    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise ValueError(f"block_dims must be a nonempty sequence of positive ints, got {self.block_dims!r}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def parse(cls, text: str) -> "AlgebraDescriptor":
        """Parse ``"2,1"`` style strings."""
        try:
            dims = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
        except ValueError as exc:
            raise ValueError(f"cannot parse algebra {text!r}") from exc
        return cls(dims)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    @property
    def max_cyclic_dim(self) -> int:
        # a cyclic representation is a quotient of the left regular one
        return self.dim

    @property
    def d_min(self) -> int:
        """Smallest ambient dimension strictly larger than every cyclic representation."""
        return self.dim + 1

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for n in self.block_dims:
            out.append(acc)
            acc += n * n
        return tuple(out)

    def index(self, block: int, p: int, q: int) -> int:
        """Position of E_pq^(block) in the canonical basis."""
        n = self.block_dims[block]
        return self.offsets[block] + p * n + q

    def basis_labels(self) -> list[tuple[int, int, int]]:
        return [(i, p, q) for i, n in enumerate(self.block_dims) for p in range(n) for q in range(n)]

    def to_json(self) -> dict:
        return {"block_dims": list(self.block_dims)}

    @classmethod
    def from_json(cls, obj: dict) -> "AlgebraDescriptor":
        return cls(tuple(obj["block_dims"]))


def _frozen(m) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    arr.setflags(write=False)
    return arr


class AlgebraElement:
    """An element of a multi-matrix algebra; immutable."""

    __slots__ = ("descriptor", "blocks")

    def __init__(self, descriptor: AlgebraDescriptor, blocks: Sequence):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != descriptor.num_blocks:
            raise ValueError(f"expected {descriptor.num_blocks} blocks, got {len(blocks)}")
        for b, n in zip(blocks, descriptor.block_dims):
            if b.shape != (n, n):
                raise ValueError(f"block shape {b.shape} does not match ({n}, {n})")
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # constructors

    @classmethod
    def zero(cls, desc: AlgebraDescriptor) -> "AlgebraElement":
        return cls(desc, [np.zeros((n, n)) for n in desc.block_dims])

    @classmethod
    def unit(cls, desc: AlgebraDescriptor) -> "AlgebraElement":
        return cls(desc, [np.eye(n) for n in desc.block_dims])

    @classmethod
    def from_coords(cls, desc: AlgebraDescriptor, coords) -> "AlgebraElement":
        coords = np.asarray(coords, dtype=complex)
        if coords.shape != (desc.dim,):
            raise ValueError(f"expected {desc.dim} coordinates, got shape {coords.shape}")
        return cls(desc, [coords[o:o + n * n].reshape(n, n) for o, n in zip(desc.offsets, desc.block_dims)])

    @classmethod
    def matrix_unit(cls, desc: AlgebraDescriptor, block: int, p: int, q: int) -> "AlgebraElement":
        x = np.zeros(desc.dim, dtype=complex)
        x[desc.index(block, p, q)] = 1.0
        return cls.from_coords(desc, x)

    def coords(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    # arithmetic

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.descriptor != self.descriptor:
            raise DescriptorMismatchError(f"{self.descriptor.block_dims} vs {other.descriptor.block_dims}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.descriptor, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.descriptor, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.descriptor, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.descriptor, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: complex) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, [c * a for a in self.blocks])

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, [a.conj().T for a in self.blocks])

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0.0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"AlgebraElement({self.descriptor.block_dims}, {[b.tolist() for b in self.blocks]})"

    def to_json(self) -> dict:
        from .io import encode_matrix

        return {"algebra": self.descriptor.to_json(), "blocks": [encode_matrix(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, obj: dict) -> "AlgebraElement":
        from .io import decode_matrix

        return cls(AlgebraDescriptor.from_json(obj["algebra"]), [decode_matrix(b) for b in obj["blocks"]])


def norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(b, 2)) if b.size else 0.0 for b in a.blocks)


def is_positive(a: AlgebraElement, tol: float = 1e-10) -> bool:
    if norm(a - a.adjoint()) > tol:
        return False
    return all(np.linalg.eigvalsh((b + b.conj().T) / 2).min() >= -tol for b in a.blocks)


def canonical_basis(desc: AlgebraDescriptor) -> list[AlgebraElement]:
    return [AlgebraElement.matrix_unit(desc, i, p, q) for i, p, q in desc.basis_labels()]


def random_element(desc: AlgebraDescriptor, seed) -> AlgebraElement:
    """Complex Gaussian element, unit variance per entry."""
    rng = np.random.default_rng(seed)
    return AlgebraElement(
        desc, [(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2) for n in desc.block_dims]
    )


@lru_cache(maxsize=64)
def structure_constants(desc: AlgebraDescriptor) -> np.ndarray:
    """C[a, b, c] with e_a e_b = sum_c C[a, b, c] e_c over the canonical basis."""
    N = desc.dim
    C = np.zeros((N, N, N))
    for i, n in enumerate(desc.block_dims):
        for p in range(n):
            for q in range(n):
                for s in range(n):
                    C[desc.index(i, p, q), desc.index(i, q, s), desc.index(i, p, s)] = 1.0
    C.setflags(write=False)
    return C


@lru_cache(maxsize=64)
def adjoint_permutation(desc: AlgebraDescriptor) -> np.ndarray:
    """perm[a] is the index of e_a^*."""
    perm = np.array([desc.index(i, q, p) for i, p, q in desc.basis_labels()])
    perm.setflags(write=False)
    return perm


def unit_coords(desc: AlgebraDescriptor) -> np.ndarray:
    return AlgebraElement.unit(desc).coords()


def unitize(desc: AlgebraDescriptor) -> tuple[AlgebraDescriptor, Callable[[AlgebraElement, complex], AlgebraElement]]:
    """Minimal unitization A~ = A + C1 realised as the multi-matrix algebra with one extra 1x1 block.

    ``embed(a, lam)`` is a + lam*1 written in A~ coordinates.
    """
    tilde = AlgebraDescriptor(desc.block_dims + (1,))

    def embed(a: AlgebraElement, lam: complex = 0.0) -> AlgebraElement:
        if a.descriptor != desc:
            raise DescriptorMismatchError(f"{a.descriptor.block_dims} vs {desc.block_dims}")
        blocks = [b + lam * np.eye(b.shape[0]) for b in a.blocks]
        blocks.append(np.array([[lam]], dtype=complex))
        return AlgebraElement(tilde, blocks)

    return tilde, embed


def deunitize(x: AlgebraElement) -> tuple[AlgebraElement, complex]:
    """Inverse of ``embed``: split an element of A~ into (a, lam)."""
    dims = x.descriptor.block_dims
    if len(dims) < 2 or dims[-1] != 1:
        raise ValueError("not an element of a unitization")
    lam = complex(x.blocks[-1][0, 0])
    desc = AlgebraDescriptor(dims[:-1])
    return AlgebraElement(desc, [b - lam * np.eye(b.shape[0]) for b in x.blocks[:-1]]), lam
