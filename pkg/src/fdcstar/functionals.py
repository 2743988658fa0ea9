"""Linear functionals phi(a) = sum_i tr(rho_i a_i), states, quasi-states and affine functions on Q(A)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement, DescriptorMismatchError, unitize

STATE = "state"
QUASI_STATE = "quasi_state"
POSITIVE = "positive"
HERMITIAN = "hermitian"
GENERAL = "general"


class NotHermitianError(ValueError):
    pass


class NotQuasiStateError(ValueError):
    pass


class Functional:
    """A functional on A given by its block densities; immutable."""

    __slots__ = ("descriptor", "density_blocks")

    def __init__(self, descriptor: AlgebraDescriptor, density_blocks: Sequence):
        blocks = []
        for b, n in zip(density_blocks, descriptor.block_dims):
            arr = np.array(b, dtype=complex)
            if arr.shape != (n, n):
                raise ValueError(f"density block shape {arr.shape} does not match ({n}, {n})")
            arr.setflags(write=False)
            blocks.append(arr)
        if len(blocks) != descriptor.num_blocks or len(density_blocks) != descriptor.num_blocks:
            raise ValueError(f"expected {descriptor.num_blocks} density blocks")
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "density_blocks", tuple(blocks))

    def __setattr__(self, name, value):
        raise AttributeError("Functional is immutable")

    @classmethod
    def zero(cls, desc: AlgebraDescriptor) -> "Functional":
        return cls(desc, [np.zeros((n, n)) for n in desc.block_dims])

    @classmethod
    def from_pairing_row(cls, desc: AlgebraDescriptor, row) -> "Functional":
        """Inverse of :meth:`pairing_row`."""
        row = np.asarray(row, dtype=complex)
        return cls(desc, [row[o:o + n * n].reshape(n, n).T for o, n in zip(desc.offsets, desc.block_dims)])

    def pairing_row(self) -> np.ndarray:
        """Row vector r with phi(a) = r @ a.coords()."""
        return np.concatenate([rho.T.ravel() for rho in self.density_blocks])

    def __call__(self, a: AlgebraElement) -> complex:
        return pair(self, a)

    def __add__(self, other: "Functional") -> "Functional":
        _same(self, other)
        return Functional(self.descriptor, [x + y for x, y in zip(self.density_blocks, other.density_blocks)])

    def __sub__(self, other: "Functional") -> "Functional":
        _same(self, other)
        return Functional(self.descriptor, [x - y for x, y in zip(self.density_blocks, other.density_blocks)])

    def scale(self, c: complex) -> "Functional":
        return Functional(self.descriptor, [c * x for x in self.density_blocks])

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(np.abs(r - r.conj().T).max(initial=0.0) <= tol for r in self.density_blocks)

    def is_positive(self, tol: float = 1e-10) -> bool:
        if not self.is_hermitian(tol):
            return False
        return all(np.linalg.eigvalsh(_herm(r)).min() >= -tol for r in self.density_blocks)

    def trace(self) -> complex:
        """phi(1)."""
        return complex(sum(np.trace(r) for r in self.density_blocks))

    def __repr__(self):
        return f"Functional({self.descriptor.block_dims}, {[r.tolist() for r in self.density_blocks]})"

    def to_json(self) -> dict:
        from .io import encode_matrix

        return {"algebra": self.descriptor.to_json(), "density_blocks": [encode_matrix(r) for r in self.density_blocks]}

    @classmethod
    def from_json(cls, obj: dict) -> "Functional":
        from .io import decode_matrix

        return cls(AlgebraDescriptor.from_json(obj["algebra"]), [decode_matrix(r) for r in obj["density_blocks"]])


def _herm(r: np.ndarray) -> np.ndarray:
    return (r + r.conj().T) / 2


def _same(x, y):
    if x.descriptor != y.descriptor:
        raise DescriptorMismatchError(f"{x.descriptor.block_dims} vs {y.descriptor.block_dims}")


def pair(phi: Functional, a: AlgebraElement) -> complex:
    _same(phi, a)
    return complex(sum(np.sum(r.T * b) for r, b in zip(phi.density_blocks, a.blocks)))


def functional_norm(phi: Functional, tol: float = 1e-10) -> float:
    """Trace norm of the density; equals phi(1) for positive phi."""
    if not phi.is_hermitian(tol):
        raise NotHermitianError("norm is only defined here for hermitian functionals")
    return float(sum(np.abs(np.linalg.eigvalsh(_herm(r))).sum() for r in phi.density_blocks))


def classify(phi: Functional, tol: float = 1e-10) -> str:
    if not phi.is_hermitian(tol):
        return GENERAL
    if not phi.is_positive(tol):
        return HERMITIAN
    t = phi.trace().real
    if abs(t - 1.0) <= tol:
        return STATE
    if t <= 1.0 + tol:
        return QUASI_STATE
    return POSITIVE


def is_quasi_state(phi: Functional, tol: float = 1e-10) -> bool:
    return classify(phi, tol) in (STATE, QUASI_STATE)


def _split_rank(desc: AlgebraDescriptor, rank: Optional[int]) -> list[int]:
    if rank is None:
        return list(desc.block_dims)
    if not 0 <= rank <= sum(desc.block_dims):
        raise ValueError(f"rank {rank} out of range for {desc.block_dims}")
    out, left = [], rank
    for n in desc.block_dims:
        out.append(min(n, left))
        left -= out[-1]
    return out


def random_functional(desc: AlgebraDescriptor, seed, kind: str = STATE, rank: Optional[int] = None) -> Functional:
    """Seeded state or quasi-state with density G G* / normaliser.

    ``rank`` is the total rank of the density, filled block by block; full rank by default.
    """
    if kind not in (STATE, QUASI_STATE):
        raise ValueError(f"kind must be 'state' or 'quasi_state', got {kind!r}")
    rng = np.random.default_rng(seed)
    blocks = []
    for n, r in zip(desc.block_dims, _split_rank(desc, rank)):
        g = (rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))) / np.sqrt(2)
        blocks.append(g @ g.conj().T)
    total = sum(np.trace(b).real for b in blocks)
    target = 1.0 if kind == STATE else rng.uniform(0.0, 1.0)
    if total == 0.0:
        return Functional.zero(desc)
    return Functional(desc, [_herm(b) * (target / total) for b in blocks])


def random_hermitian_functional(desc: AlgebraDescriptor, seed) -> Functional:
    rng = np.random.default_rng(seed)
    blocks = []
    for n in desc.block_dims:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        blocks.append((g + g.conj().T) / 2)
    return Functional(desc, blocks)


def jordan_decompose(phi: Functional, tol: float = 1e-10) -> tuple[Functional, Functional]:
    """phi = phi_plus - phi_minus with both positive and ||phi|| = ||phi_plus|| + ||phi_minus||."""
    if not phi.is_hermitian(tol):
        raise NotHermitianError("Jordan decomposition needs a hermitian functional")
    plus, minus = [], []
    for r in phi.density_blocks:
        w, v = np.linalg.eigh(_herm(r))
        plus.append((v * np.clip(w, 0.0, None)) @ v.conj().T)
        minus.append((v * np.clip(-w, 0.0, None)) @ v.conj().T)
    return Functional(phi.descriptor, plus), Functional(phi.descriptor, minus)


def qstate_distance(phi: Functional, psi: Functional) -> float:
    """Trace norm of the density difference."""
    _same(phi, psi)
    total = 0.0
    for x, y in zip(phi.density_blocks, psi.density_blocks):
        # singular values handle tiny non-hermitian noise gracefully
        total += float(np.linalg.svd(x - y, compute_uv=False).sum())
    return total


def to_unitization(phi: Functional, tol: float = 1e-10) -> Functional:
    """The unique state of A~ restricting to phi; the adjoined block carries 1 - ||phi||."""
    if not is_quasi_state(phi, tol):
        raise NotQuasiStateError("only quasi-states extend to states of the unitization")
    tilde, _ = unitize(phi.descriptor)
    weight = 1.0 - phi.trace().real
    return Functional(tilde, list(phi.density_blocks) + [np.array([[max(weight, 0.0)]])])


def from_unitization(phi_tilde: Functional) -> Functional:
    """Restriction of a functional on A~ to A."""
    dims = phi_tilde.descriptor.block_dims
    if len(dims) < 2 or dims[-1] != 1:
        raise ValueError("not a functional on a unitization")
    return Functional(AlgebraDescriptor(dims[:-1]), phi_tilde.density_blocks[:-1])


def density_frame(desc: AlgebraDescriptor, normalize: bool = False) -> list[Functional]:
    """Fixed spanning family of positive functionals used for reconstruction.

    Per block of size n: E_pp/n, (E_pp+E_qq+E_pq+E_qp)/(2n), (E_pp+E_qq+i(E_pq-E_qp))/(2n)
    for p < q. Every member has trace 1/n; ``normalize`` rescales to trace 1.
    """
    frame = []
    for i, n in enumerate(desc.block_dims):

        def member(m):
            blocks = [np.zeros((k, k), dtype=complex) for k in desc.block_dims]
            blocks[i] = m if normalize else m / n
            return Functional(desc, blocks)

        for p in range(n):
            m = np.zeros((n, n), dtype=complex)
            m[p, p] = 1.0
            frame.append(member(m))
        for p in range(n):
            for q in range(p + 1, n):
                m = np.zeros((n, n), dtype=complex)
                m[p, p] = m[q, q] = 0.5
                m[p, q] = m[q, p] = 0.5
                frame.append(member(m))
                m = np.zeros((n, n), dtype=complex)
                m[p, p] = m[q, q] = 0.5
                m[p, q], m[q, p] = 0.5j, -0.5j
                frame.append(member(m))
    return frame


@dataclass(frozen=True)
class AffineFunctionOnQ:
    """A function on Q(A) presented by an evaluator; affine with f(0) = 0 by contract."""

    evaluator: Callable[[Functional], complex]
    descriptor: AlgebraDescriptor
    warning: Optional[str] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, phi: Functional) -> complex:
        return evaluate_affine(self, phi)


def affine_from_element(a: AlgebraElement) -> AffineFunctionOnQ:
    return AffineFunctionOnQ(lambda phi: pair(phi, a), a.descriptor, meta={"element": a})


def evaluate_affine(f: AffineFunctionOnQ, phi: Functional, tol: float = 1e-9) -> complex:
    if phi.descriptor != f.descriptor:
        raise DescriptorMismatchError(f"{phi.descriptor.block_dims} vs {f.descriptor.block_dims}")
    if not is_quasi_state(phi, tol):
        raise NotQuasiStateError("affine functions are evaluated on Q(A) only")
    return complex(f.evaluator(phi))
