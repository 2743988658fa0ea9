"""GNS construction over the canonical basis.

H_phi = A / N_phi is coordinatised by the eigenframe of the Gram matrix
M[b, a] = phi(e_b^* e_a); left multiplication pushed through that frame gives
pi_phi, and the class of the unit gives the cyclic vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraDescriptor, adjoint_permutation, structure_constants, unit_coords
from .functionals import Functional, NotHermitianError


class NotPositiveError(ValueError):
    pass


@dataclass(frozen=True)
class GnsTriple:
    descriptor: AlgebraDescriptor
    rep_matrices: np.ndarray  # (dim A, m, m)
    cyclic_vector: np.ndarray  # (m,)

    @property
    def space_dim(self) -> int:
        return int(self.cyclic_vector.shape[0])

    @property
    def representation(self):
        from .reps import Representation

        return Representation(self.descriptor, self.rep_matrices)

    def to_json(self) -> dict:
        from .io import encode_matrix

        return {
            "algebra": self.descriptor.to_json(),
            "space_dim": self.space_dim,
            "rep_matrices": [encode_matrix(m) for m in self.rep_matrices],
            "cyclic_vector": encode_matrix(self.cyclic_vector),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GnsTriple":
        from .io import decode_matrix

        desc = AlgebraDescriptor.from_json(obj["algebra"])
        m = int(obj["space_dim"])
        mats = np.array([decode_matrix(x) for x in obj["rep_matrices"]], dtype=complex).reshape(desc.dim, m, m)
        return cls(desc, mats, decode_matrix(obj["cyclic_vector"]).reshape(m))


def gram_matrix(phi: Functional) -> np.ndarray:
    """M[b, a] = phi(e_b^* e_a), so <x, y>_phi = y^H M x."""
    desc = phi.descriptor
    C = structure_constants(desc)
    adj = adjoint_permutation(desc)
    r = phi.pairing_row()
    return np.einsum("bac,c->ba", C[adj], r)


def _phase_fix(w: np.ndarray) -> np.ndarray:
    """Make the first non-negligible entry of each column real positive."""
    w = w.copy()
    for j in range(w.shape[1]):
        col = w[:, j]
        k = int(np.argmax(np.abs(col) > 1e-8 * np.abs(col).max()))
        w[:, j] = col * (abs(col[k]) / col[k])
    return w


def gns(phi: Functional, rank_tol: float = 1e-9) -> GnsTriple:
    desc = phi.descriptor
    if not phi.is_positive(1e-10):
        raise NotPositiveError("GNS needs a positive functional")
    M = gram_matrix(phi)
    M = (M + M.conj().T) / 2
    lam, W = np.linalg.eigh(M)
    order = np.argsort(-lam, kind="stable")
    lam, W = lam[order], W[:, order]
    top = lam[0] if lam.size else 0.0
    if top <= 0.0:
        return GnsTriple(desc, np.zeros((desc.dim, 0, 0), dtype=complex), np.zeros(0, dtype=complex))
    keep = lam > rank_tol * top
    lam, W = lam[keep], _phase_fix(W[:, keep])
    root = np.sqrt(lam)
    F = W / root  # orthonormal frame of H_phi in coordinate space
    J = root[:, None] * W.conj().T  # coordinates -> H_phi
    C = structure_constants(desc)
    # left multiplication by e_a: L[a][c, b] = C[a, b, c]
    L = np.transpose(C, (0, 2, 1))
    mats = np.einsum("mc,acb,bn->amn", J, L, F)
    xi = J @ unit_coords(desc)
    mats.setflags(write=False)
    xi.setflags(write=False)
    return GnsTriple(desc, mats, xi)


@dataclass(frozen=True)
class GnsReport:
    homomorphism_defect: float
    reproduction_defect: float
    cyclicity_rank: int
    space_dim: int
    norm_defect: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.homomorphism_defect <= self.tolerance
            and self.reproduction_defect <= self.tolerance
            and self.norm_defect <= self.tolerance
            and self.cyclicity_rank == self.space_dim
        )

    def to_json(self) -> dict:
        return {
            "homomorphism_defect": self.homomorphism_defect,
            "reproduction_defect": self.reproduction_defect,
            "cyclicity_rank": self.cyclicity_rank,
            "space_dim": self.space_dim,
            "norm_defect": self.norm_defect,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def homomorphism_defect(desc: AlgebraDescriptor, mats: np.ndarray) -> float:
    """Largest multiplicativity or adjoint defect of basis images."""
    if mats.shape[-1] == 0:
        return 0.0
    C = structure_constants(desc)
    prod = np.einsum("aij,bjk->abik", mats, mats)
    expected = np.einsum("abc,cik->abik", C, mats)
    mult = np.abs(prod - expected).max()
    adj = np.abs(mats[adjoint_permutation(desc)] - np.conj(np.transpose(mats, (0, 2, 1)))).max()
    return float(max(mult, adj))


def validate_gns(t: GnsTriple, phi: Functional, tol: float = 1e-9) -> GnsReport:
    desc = t.descriptor
    m = t.space_dim
    xi = t.cyclic_vector
    hom = homomorphism_defect(desc, t.rep_matrices)
    if m:
        values = np.einsum("i,aij,j->a", xi.conj(), t.rep_matrices, xi)
        # the unit is probed alongside the basis so a rescaled vector shows up as 3||phi||
        unit_image = np.einsum("a,aij->ij", unit_coords(desc), t.rep_matrices)
        unit_value = xi.conj() @ unit_image @ xi
        expected = phi.pairing_row()
        repro = max(np.abs(values - expected).max(), abs(unit_value - phi.trace()))
        vecs = np.einsum("aij,j->ia", t.rep_matrices, xi)
        s = np.linalg.svd(vecs, compute_uv=False)
        rank = int((s > 1e-9 * s.max()).sum()) if s.size and s.max() > 0 else 0
    else:
        repro = float(np.abs(phi.pairing_row()).max(initial=0.0))
        rank = 0
    try:
        from .functionals import functional_norm

        phi_norm = functional_norm(phi)
    except NotHermitianError:
        phi_norm = float("nan")
    norm_defect = abs(float(np.vdot(xi, xi).real) - phi_norm)
    return GnsReport(hom, float(repro), rank, m, norm_defect, tol)


def intertwining_unitary(t1: GnsTriple, t2: GnsTriple) -> tuple[np.ndarray, float]:
    """Solve V pi_1(e) = pi_2(e) V, V xi_1 = xi_2 in least squares; return V and the worst defect."""
    if t1.space_dim != t2.space_dim:
        raise ValueError("GNS spaces of different dimension are not equivalent")
    m = t1.space_dim
    eye = np.eye(m)
    rows = []
    # vec(V X) = (X^T kron I) vec(V), column-major vec
    for A, B in zip(t1.rep_matrices, t2.rep_matrices):
        rows.append(np.kron(A.T, eye) - np.kron(eye, B))
    rows.append(np.kron(t1.cyclic_vector[None, :], eye))
    lhs = np.vstack(rows)
    rhs = np.concatenate([np.zeros(len(rows[:-1]) * m * m, dtype=complex), t2.cyclic_vector])
    v, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    V = v.reshape(m, m, order="F")
    defect = max(
        float(np.abs(V @ A - B @ V).max(initial=0.0)) for A, B in zip(t1.rep_matrices, t2.rep_matrices)
    )
    defect = max(defect, float(np.abs(V @ t1.cyclic_vector - t2.cyclic_vector).max(initial=0.0)))
    defect = max(defect, float(np.abs(V.conj().T @ V - eye).max(initial=0.0)))
    return V, defect
