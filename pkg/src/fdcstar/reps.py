"""rep(A:H) for H = C^d: representations, the map theta_xi, preimages and local lifts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement, DescriptorMismatchError, unit_coords, unitize
from .functionals import Functional, NotQuasiStateError, is_quasi_state
from .gns import GnsTriple, gns, homomorphism_defect

UNIT_TOL = 1e-12


class DimensionError(ValueError):
    pass


class InvalidRepresentationError(ValueError):
    pass


class RankJumpError(ValueError):
    """The lift target changes the support of the base quasi-state."""


class Representation:
    """Images of the canonical basis as d x d matrices; immutable."""

    __slots__ = ("descriptor", "images")

    def __init__(self, descriptor: AlgebraDescriptor, images):
        images = np.array(images, dtype=complex)
        if images.ndim != 3 or images.shape[0] != descriptor.dim or images.shape[1] != images.shape[2]:
            raise ValueError(f"images must have shape ({descriptor.dim}, d, d), got {images.shape}")
        images.setflags(write=False)
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Representation is immutable")

    @property
    def ambient_dim(self) -> int:
        return int(self.images.shape[1])

    @classmethod
    def zero(cls, desc: AlgebraDescriptor, d: int) -> "Representation":
        return cls(desc, np.zeros((desc.dim, d, d)))

    def apply(self, a: AlgebraElement) -> np.ndarray:
        if a.descriptor != self.descriptor:
            raise DescriptorMismatchError(f"{a.descriptor.block_dims} vs {self.descriptor.block_dims}")
        return np.einsum("a,aij->ij", a.coords(), self.images)

    def unit_image(self) -> np.ndarray:
        """pi(1), the projection onto the essential space."""
        return np.einsum("a,aij->ij", unit_coords(self.descriptor), self.images)

    def essential_rank(self, tol: float = 1e-9) -> int:
        p = self.unit_image()
        return int(round(np.trace(p).real)) if np.abs(p).max(initial=0.0) > tol else 0

    def to_json(self) -> dict:
        from .io import encode_matrix

        return {
            "algebra": self.descriptor.to_json(),
            "d": self.ambient_dim,
            "images": [encode_matrix(m) for m in self.images],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Representation":
        from .io import decode_matrix

        desc = AlgebraDescriptor.from_json(obj["algebra"])
        d = int(obj["d"])
        return cls(desc, np.array([decode_matrix(m) for m in obj["images"]]).reshape(desc.dim, d, d))


@dataclass(frozen=True)
class RepresentationReport:
    homomorphism_defect: float
    projection_defect: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.homomorphism_defect <= self.tolerance and self.projection_defect <= self.tolerance


def validate_representation(pi: Representation, tol: float = 1e-9) -> RepresentationReport:
    hom = homomorphism_defect(pi.descriptor, pi.images)
    p = pi.unit_image()
    proj = max(np.abs(p @ p - p).max(initial=0.0), np.abs(p - p.conj().T).max(initial=0.0))
    return RepresentationReport(hom, float(proj), tol)


def _same_space(p1: Representation, p2: Representation):
    if p1.descriptor != p2.descriptor or p1.ambient_dim != p2.ambient_dim:
        raise DimensionError("representations act on different algebras or spaces")


def rep_distance(p1: Representation, p2: Representation) -> float:
    """Sup over the canonical basis of operator-norm differences."""
    _same_space(p1, p2)
    if p1.ambient_dim == 0:
        return 0.0
    return float(np.linalg.norm(p1.images - p2.images, ord=2, axis=(1, 2)).max())


def _check_unit(v: np.ndarray, name: str = "xi", tol: float = UNIT_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"{name} must be a unit vector")
    return v


def theta(pi: Representation, xi, validate: bool = True, tol: float = 1e-9) -> Functional:
    """The vector functional <pi(-) xi, xi> as a density."""
    xi = _check_unit(xi)
    if xi.shape[0] != pi.ambient_dim:
        raise DimensionError("xi does not live in the representation space")
    if validate:
        report = validate_representation(pi, tol)
        if not report.passed:
            raise InvalidRepresentationError(f"not a *-representation (defect {report.homomorphism_defect:.3g})")
    # rho_qp = <pi(E_pq) xi, xi>; the row of values is the pairing row, rho^T flattened
    row = np.einsum("i,aij,j->a", xi.conj(), pi.images, xi)
    return Functional.from_pairing_row(pi.descriptor, row)


def membership_rep_xi(pi: Representation, xi, tol: float = 1e-9) -> bool:
    xi = _check_unit(xi)
    return bool(np.linalg.norm(pi.unit_image() @ xi - xi) <= tol)


def random_unit_vector(d: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def haar_unitary(d: int, seed) -> np.ndarray:
    """Haar unitary from a complex Ginibre matrix via QR with phase correction."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def _rotation_plane(alpha: np.ndarray, beta: np.ndarray, collinear_tol: float):
    """Orthonormal partners (alpha', beta') of the plane [alpha, beta], or None if collinear."""
    r = np.vdot(alpha, beta)
    w = beta - r * alpha
    if np.linalg.norm(w) <= collinear_tol:
        return None
    # second Gram-Schmidt pass keeps alpha' orthogonal when beta is nearly collinear
    w = w - np.vdot(alpha, w) * alpha
    a_perp = w / np.linalg.norm(w)
    s = np.vdot(a_perp, beta)
    b_perp = -np.conj(s) * alpha + np.conj(r) * a_perp
    return a_perp, b_perp


def rotation_plane(alpha, beta, collinear_tol: float = 1e-13):
    """The vectors alpha', beta' used by :func:`rotation_unitary`, or None in the collinear case."""
    return _rotation_plane(_check_unit(alpha, "alpha"), _check_unit(beta, "beta"), collinear_tol)


def rotation_unitary(alpha, beta, collinear_tol: float = 1e-13) -> np.ndarray:
    """Unitary U with U alpha = beta and ||U - I|| = ||alpha - beta||.

    Identity off [alpha, beta]; on the plane it maps alpha -> beta and alpha' -> beta'.
    """
    alpha = _check_unit(alpha, "alpha")
    beta = _check_unit(beta, "beta")
    d = alpha.shape[0]
    plane = _rotation_plane(alpha, beta, collinear_tol)
    if plane is None:
        k = np.vdot(alpha, beta)
        return (k / abs(k)) * np.eye(d, dtype=complex)
    a_perp, b_perp = plane
    return np.eye(d, dtype=complex) + np.outer(beta - alpha, alpha.conj()) + np.outer(b_perp - a_perp, a_perp.conj())


def conjugate(pi: Representation, U: np.ndarray, tol: float = 1e-10) -> Representation:
    """U^{-1} pi(-) U."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (pi.ambient_dim, pi.ambient_dim) or np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > tol:
        raise ValueError("conjugation needs a unitary of the ambient dimension")
    return Representation(pi.descriptor, np.einsum("ji,ajk,kl->ail", U.conj(), pi.images, U))


def default_orthogonal_vector(xi: np.ndarray) -> np.ndarray:
    """First standard basis vector with at least half its weight off xi, orthogonalised against xi."""
    d = xi.shape[0]
    for k in range(d):
        w = -np.conj(xi[k]) * xi
        w[k] += 1.0
        n = np.linalg.norm(w)
        if n * n >= 0.5 - 1e-12:
            return w / n
    raise DimensionError("no orthogonal direction available")  # pragma: no cover - d >= 2 guarantees one


def _completed_frame(first: Sequence[np.ndarray], d: int) -> np.ndarray:
    """Orthonormal basis of C^d whose leading columns are the given orthonormal vectors."""
    k = len(first)
    stack = np.column_stack(list(first) + [np.eye(d)]) if k else np.eye(d, dtype=complex)
    q, r = np.linalg.qr(stack)
    diag = np.diag(r)[:d]
    phases = np.where(np.abs(diag) > 1e-14, diag / np.where(np.abs(diag) > 0, np.abs(diag), 1), 1.0)
    q = q * phases
    # QR of [v_1..v_k, I] reproduces the v_j exactly up to rounding; pin them to avoid drift
    for j, v in enumerate(first):
        q[:, j] = v
    return q


def _snapped_norm(t: float, tol: float = 1e-12) -> float:
    # sqrt(t - t^2) would turn rounding in ||phi|| = 1 into an O(1e-8) component along v
    return 1.0 if t > 1.0 - tol else t


def embed_gns(triple: GnsTriple, xi, d: int, v: Optional[np.ndarray] = None) -> Representation:
    """Place a GNS triple inside C^d so that theta_xi of the result is its functional."""
    xi = _check_unit(xi)
    desc = triple.descriptor
    m = triple.space_dim
    if d < 2 or d < m + 1 or xi.shape[0] != d:
        raise DimensionError(f"ambient dimension {d} too small for a GNS space of dimension {m}")
    if m == 0:
        return Representation.zero(desc, d)
    t = _snapped_norm(float(np.vdot(triple.cyclic_vector, triple.cyclic_vector).real))  # = ||phi||
    if v is None:
        v = default_orthogonal_vector(xi)
    else:
        v = np.asarray(v, dtype=complex)
        if abs(np.vdot(xi, v)) > 1e-10 or abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError("v must be a unit vector orthogonal to xi")
    eta = t * xi + np.sqrt(max(t - t * t, 0.0)) * v
    rest = xi - eta
    targets = [eta / np.linalg.norm(eta)]
    if np.linalg.norm(rest) > 1e-12:
        r = rest - np.vdot(targets[0], rest) * targets[0]
        targets.append(r / np.linalg.norm(r))
    Tq = _completed_frame(targets, d)
    cols = [Tq[:, 0]] + [Tq[:, j] for j in range(len(targets), len(targets) + m - 1)]
    T = np.column_stack(cols)
    u0 = triple.cyclic_vector / np.sqrt(t)
    Uq = _completed_frame([u0], m)
    J = T @ Uq.conj().T  # isometry C^m -> C^d with J xi_phi = eta
    return Representation(desc, np.einsum("im,amn,jn->aij", J, triple.rep_matrices, J.conj()))


def embed_preimage(phi: Functional, xi, d: int, v: Optional[np.ndarray] = None, rank_tol: float = 1e-9) -> Representation:
    """A representation pi on C^d with theta(pi, xi) = phi and pi(1) C^d a proper subspace."""
    if not is_quasi_state(phi, 1e-10):
        raise NotQuasiStateError("preimages are constructed for quasi-states")
    return embed_gns(gns(phi, rank_tol), xi, d, v)


def preimage_vector(phi: Functional, xi, v: Optional[np.ndarray] = None) -> np.ndarray:
    """The vector eta = ||phi|| xi + (||phi|| - ||phi||^2)^{1/2} v used by :func:`embed_preimage`."""
    xi = _check_unit(xi)
    t = _snapped_norm(phi.trace().real)
    if v is None:
        v = default_orthogonal_vector(xi)
    return t * xi + np.sqrt(max(t - t * t, 0.0)) * v


def random_representation(
    desc: AlgebraDescriptor, d: int, seed, multiplicities: Optional[Sequence[int]] = None
) -> Representation:
    """Ad U (m_1 id_1 + ... + m_k id_k + 0) with U Haar; multiplicities are drawn if not given."""
    rng = np.random.default_rng(seed)
    if multiplicities is None:
        mult, room = [], d
        for n in desc.block_dims:
            mult.append(int(rng.integers(0, room // n + 1)))
            room -= mult[-1] * n
    else:
        mult = [int(m) for m in multiplicities]
    if len(mult) != desc.num_blocks or any(m < 0 for m in mult):
        raise ValueError("one nonnegative multiplicity per block is required")
    if sum(m * n for m, n in zip(mult, desc.block_dims)) > d:
        raise DimensionError(f"multiplicities {mult} do not fit in dimension {d}")
    U = haar_unitary(d, rng.integers(2**63))
    return Representation(desc, np.einsum("ij,ajk,lk->ail", U, standard_images(desc, d, mult), U.conj()))


def standard_images(desc: AlgebraDescriptor, d: int, multiplicities: Sequence[int]) -> np.ndarray:
    """Basis images of m_1 id_1 + ... + m_k id_k + 0 in block-diagonal position."""
    images = np.zeros((desc.dim, d, d), dtype=complex)
    pos = 0
    for i, (n, m) in enumerate(zip(desc.block_dims, multiplicities)):
        for _ in range(m):
            for p in range(n):
                for q in range(n):
                    images[desc.index(i, p, q), pos + p, pos + q] = 1.0
            pos += n
    return images


def restrict_from_unitization(pi_tilde: Representation) -> Representation:
    """Restriction r: rep(A~:H) -> rep(A:H), a |-> pi~(a + 0)."""
    dims = pi_tilde.descriptor.block_dims
    desc = AlgebraDescriptor(dims[:-1])
    _, embed = unitize(desc)
    basis = np.eye(desc.dim)
    images = [pi_tilde.apply(embed(AlgebraElement.from_coords(desc, e), 0.0)) for e in basis]
    return Representation(desc, images)


# local lift


@dataclass(frozen=True)
class LiftVectors:
    eta: np.ndarray
    eta_prime: np.ndarray
    xi_prime: np.ndarray
    lam: Optional[float]  # None on the xi = eta branch
    correction: AlgebraElement  # c with c rho c* = rho'


def _block_rank(rho: np.ndarray, tol: float) -> int:
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    top = max(w.max(initial=0.0), 0.0)
    return int((w > tol * top).sum()) if top > 0 else 0


def _psd_power(rho: np.ndarray, power: float) -> np.ndarray:
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    return (v * np.clip(w, 0.0, None) ** power) @ v.conj().T


def density_correction(phi: Functional, phi_prime: Functional, rank_tol: float = 1e-9, same_tol: float = 1e-13):
    """Element c with phi(c^* - c) = phi', i.e. c_i rho_i c_i^* = rho'_i.

    Full-rank blocks use c_i = rho'_i^{1/2} rho_i^{-1/2}, which tends to 1 as rho' -> rho.
    Rank-deficient blocks are only supported when unchanged.
    """
    blocks = []
    for i, (rho, rho_p) in enumerate(zip(phi.density_blocks, phi_prime.density_blocks)):
        n = rho.shape[0]
        if np.abs(rho_p - rho).max(initial=0.0) <= same_tol:
            blocks.append(np.eye(n))
        elif _block_rank(rho, rank_tol) == n:
            blocks.append(_psd_power(rho_p, 0.5) @ _psd_power(rho, -0.5))
        else:
            raise RankJumpError(f"block {i}: base density has rank {_block_rank(rho, rank_tol)} < {n}")
    return AlgebraElement(phi.descriptor, blocks)


def lift_vectors(pi: Representation, xi, phi_prime: Functional, branch_tol: float = 1e-8) -> LiftVectors:
    xi = _check_unit(xi)
    d = pi.ambient_dim
    desc = pi.descriptor
    if d < desc.d_min:
        raise DimensionError(f"ambient dimension {d} below d_min = {desc.d_min}")
    if not is_quasi_state(phi_prime, 1e-10):
        raise NotQuasiStateError("lift target must be a quasi-state")
    p = pi.unit_image()
    if pi.essential_rank() >= d:
        raise DimensionError("the essential space of pi must be a proper subspace")
    phi = theta(pi, xi)
    c = density_correction(phi, phi_prime)
    eta = p @ xi
    eta_p = pi.apply(c) @ eta
    comp = np.eye(d) - p
    rest = comp @ (xi - eta)
    t_p = float(phi_prime.trace().real)
    rest_norm = float(np.linalg.norm(rest))
    if rest_norm > branch_tol:
        # ||xi - eta||^2 = 1 - ||phi||, so this is ((1 - ||phi'||) / (1 - ||phi||))^{1/2}
        lam = float(np.sqrt(max(1.0 - t_p, 0.0)) / rest_norm)
        xi_p = eta_p + lam * rest
    else:
        # xi lies in the essential space: complete eta' by a vector outside it
        lam = None
        k = int(np.argmax(np.linalg.norm(comp, axis=0)))
        u = comp[:, k] / np.linalg.norm(comp[:, k])
        xi_p = eta_p + np.sqrt(max(1.0 - t_p, 0.0)) * u
    return LiftVectors(eta, eta_p, xi_p, lam, c)


def local_lift(pi: Representation, xi, phi_prime: Functional) -> Representation:
    """A representation near pi whose vector functional at xi is phi'.

    pi' = pi realises phi' at eta' = pi(c) eta; xi' = eta' + lam (xi - eta) is a unit
    vector and the result is U^{-1} pi U with U the rotation taking xi to xi'.
    """
    lv = lift_vectors(pi, xi, phi_prime)
    xi_p = lv.xi_prime / np.linalg.norm(lv.xi_prime)
    U = rotation_unitary(np.asarray(xi, dtype=complex), xi_p)
    return conjugate(pi, U)
