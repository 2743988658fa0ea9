"""Fields over rep(A:H), intertwiner audits and reconstruction of algebra elements from fields."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .algebra import AlgebraDescriptor, AlgebraElement, norm
from .functionals import AffineFunctionOnQ, Functional, density_frame, evaluate_affine
from .gns import gns
from .reps import (
    DimensionError,
    Representation,
    _completed_frame,
    conjugate,
    default_orthogonal_vector,
    embed_gns,
    embed_preimage,
    haar_unitary,
    random_representation,
    standard_images,
)

UNITARY = "unitary"
PARTIAL_ISOMETRY = "partial_isometry"
PROJECTION = "projection"
DIRECT_SUM = "direct_sum_embedding"
ZERO_TARGET = "zero_to_zero_rep"
GENERAL = "general"

AUDIT_KINDS = (UNITARY, PARTIAL_ISOMETRY, PROJECTION, DIRECT_SUM, ZERO_TARGET)
ALL_KINDS = AUDIT_KINDS + (GENERAL,)

AUDIT_TOL = 1e-7


class AuditFailure(RuntimeError):
    def __init__(self, report: "AuditReport"):
        super().__init__(f"field failed the compatibility audit (max defect {report.max_defect:.3g})")
        self.report = report


class IntertwinerError(ValueError):
    pass


@dataclass(frozen=True)
class Field:
    evaluator: Callable[[Representation], np.ndarray]
    descriptor: AlgebraDescriptor
    ambient_dim: int
    provenance: str = "custom"
    element: Optional[AlgebraElement] = None

    def __call__(self, pi: Representation) -> np.ndarray:
        if pi.descriptor != self.descriptor or pi.ambient_dim != self.ambient_dim:
            raise DimensionError("field evaluated on a representation of the wrong shape")
        return np.asarray(self.evaluator(pi), dtype=complex)

    @property
    def bound(self) -> Optional[float]:
        """sup ||T(pi)||, known for element-induced fields only."""
        return norm(self.element) if self.element is not None else None


def field_from_element(a: AlgebraElement, d: int) -> Field:
    return Field(lambda pi: pi.apply(a), a.descriptor, d, "element-induced", a)


def zero_field(desc: AlgebraDescriptor, d: int) -> Field:
    return Field(lambda pi: np.zeros((d, d), dtype=complex), desc, d, "custom:zero")


def constant_field(desc: AlgebraDescriptor, d: int) -> Field:
    """T(pi) = I for every pi; violates T(0) = 0."""
    return Field(lambda pi: np.eye(d, dtype=complex), desc, d, "adversarial:constant")


def trace_field(desc: AlgebraDescriptor, d: int, a0: Optional[AlgebraElement] = None) -> Field:
    """T(pi) = tr(pi(a0)) I, with a0 = 1 unless given."""
    a0 = AlgebraElement.unit(desc) if a0 is None else a0
    return Field(lambda pi: np.trace(pi.apply(a0)) * np.eye(d, dtype=complex), desc, d, "adversarial:trace")


def compressed_matrix_field(desc: AlgebraDescriptor, d: int, seed: int = 0) -> Field:
    """T(pi) = p_pi B p_pi for a fixed hermitian B: sandwiched and zero at 0, but not equivariant."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    B = (g + g.conj().T) / 2

    def ev(pi):
        p = pi.unit_image()
        return p @ B @ p

    return Field(ev, desc, d, "adversarial:compressed")


ADVERSARIAL_FIELDS = {
    "constant": constant_field,
    "trace": trace_field,
    "compressed": compressed_matrix_field,
}


# intertwiners


def intertwiner_defect(S, pi1: Representation, pi2: Representation) -> float:
    """max_e ||S pi1(e) - pi2(e) S||."""
    if pi1.descriptor != pi2.descriptor or pi1.ambient_dim != pi2.ambient_dim:
        raise DimensionError("intertwiner between representations of different shapes")
    S = np.asarray(S, dtype=complex)
    if pi1.ambient_dim == 0:
        return 0.0
    diff = np.einsum("ij,ajk->aik", S, pi1.images) - np.einsum("aij,jk->aik", pi2.images, S)
    return float(np.linalg.norm(diff, ord=2, axis=(1, 2)).max())


@dataclass(frozen=True)
class IntertwinerSample:
    pi1: Representation
    pi2: Representation
    S: np.ndarray
    kind: str


def _random_multiplicities(desc: AlgebraDescriptor, d: int, rng) -> list[int]:
    mult, room = [], d
    for n in desc.block_dims:
        mult.append(int(rng.integers(0, room // n + 1)))
        room -= mult[-1] * n
    return mult


def _gaussian(rng, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _partial_isometry(rng, rows: int, cols: int) -> np.ndarray:
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=complex)
    a, _, bh = np.linalg.svd(_gaussian(rng, (rows, cols)), full_matrices=False)
    mask = rng.integers(0, 2, size=a.shape[1]).astype(float)
    return (a * mask) @ bh


def _projection(rng, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    q = haar_unitary(n, rng.integers(2**63))
    mask = rng.integers(0, 2, size=n).astype(float)
    return (q * mask) @ q.conj().T


def _positive(rng, n: int) -> np.ndarray:
    g = _gaussian(rng, (n, n))
    return g @ g.conj().T / max(n, 1)


def _block_intertwiner(desc, d, mult1, mult2, make):
    """Intertwiner between the standard-position representations with multiplicities mult1, mult2.

    ``make(rows, cols)`` draws each multiplicity-space map and the map between null spaces.
    """
    S = np.zeros((d, d), dtype=complex)
    pos1 = pos2 = 0
    for n, m1, m2 in zip(desc.block_dims, mult1, mult2):
        X = make(m2, m1)
        S[pos2:pos2 + m2 * n, pos1:pos1 + m1 * n] = np.kron(X, np.eye(n))
        pos1 += m1 * n
        pos2 += m2 * n
    S[pos2:, pos1:] = make(d - pos2, d - pos1)
    return S


def _structured(desc, d, rng, same: bool):
    mult1 = _random_multiplicities(desc, d, rng)
    mult2 = mult1 if same else _random_multiplicities(desc, d, rng)
    U1 = haar_unitary(d, rng.integers(2**63))
    U2 = U1 if same else haar_unitary(d, rng.integers(2**63))
    base1 = Representation(desc, standard_images(desc, d, mult1))
    base2 = Representation(desc, standard_images(desc, d, mult2))
    return mult1, mult2, U1, U2, conjugate(base1, U1.conj().T), conjugate(base2, U2.conj().T)


def sample_intertwiner(desc: AlgebraDescriptor, d: int, kind: str, seed) -> IntertwinerSample:
    rng = np.random.default_rng(seed)
    if kind == UNITARY:
        pi1 = random_representation(desc, d, rng.integers(2**63))
        W = haar_unitary(d, rng.integers(2**63))
        return IntertwinerSample(pi1, conjugate(pi1, W.conj().T), W, kind)
    if kind in (PARTIAL_ISOMETRY, GENERAL):
        mult1, mult2, U1, U2, pi1, pi2 = _structured(desc, d, rng, same=False)
        make = (lambda r, c: _partial_isometry(rng, r, c)) if kind == PARTIAL_ISOMETRY else (lambda r, c: _gaussian(rng, (r, c)))
        S = U2 @ _block_intertwiner(desc, d, mult1, mult2, make) @ U1.conj().T
        return IntertwinerSample(pi1, pi2, S, kind)
    if kind == PROJECTION:
        mult1, _, U1, _, pi1, _ = _structured(desc, d, rng, same=True)

        def make(r, c):
            return _projection(rng, r)

        S = U1 @ _block_intertwiner(desc, d, mult1, mult1, make) @ U1.conj().T
        return IntertwinerSample(pi1, pi1, S, kind)
    if kind == DIRECT_SUM:
        d1 = int(rng.integers(1, d)) if d > 1 else d
        d2 = d - d1
        s1 = random_representation(desc, d1, rng.integers(2**63))
        s2 = random_representation(desc, d2, rng.integers(2**63))
        J = haar_unitary(d, rng.integers(2**63))
        big = np.zeros((desc.dim, d, d), dtype=complex)
        big[:, :d1, :d1] = s1.images
        big[:, d1:, d1:] = s2.images
        pi2 = conjugate(Representation(desc, big), J.conj().T)  # Ad J (s1 + s2)
        first = bool(rng.integers(0, 2))
        small = np.zeros_like(big)
        inc = np.zeros((d, d))
        if first:
            small[:, :d1, :d1] = s1.images
            inc[:d1, :d1] = np.eye(d1)
        else:
            small[:, d1:, d1:] = s2.images
            inc[d1:, d1:] = np.eye(d2)
        return IntertwinerSample(Representation(desc, small), pi2, J @ inc, kind)
    if kind == ZERO_TARGET:
        pi1 = random_representation(desc, d, rng.integers(2**63))
        W = haar_unitary(d, rng.integers(2**63))
        S = W @ (np.eye(d) - pi1.unit_image())
        return IntertwinerSample(pi1, Representation.zero(desc, d), S, kind)
    raise ValueError(f"unknown intertwiner kind {kind!r}")


def sample_positive_self_intertwiner(desc: AlgebraDescriptor, d: int, seed) -> tuple[Representation, np.ndarray]:
    """A representation pi and a positive P in its commutant."""
    rng = np.random.default_rng(seed)
    mult, _, U, _, pi, _ = _structured(desc, d, rng, same=True)

    def make(r, c):
        return _positive(rng, r)

    P = U @ _block_intertwiner(desc, d, mult, mult, make) @ U.conj().T
    return pi, (P + P.conj().T) / 2


def polar_decompose_intertwiner(S, pi1: Representation, pi2: Representation, tol: float = 1e-9):
    """S = U P with P = (S^*S)^{1/2} and U the partial isometry mapping P y to S y."""
    S = np.asarray(S, dtype=complex)
    if intertwiner_defect(S, pi1, pi2) > tol * max(1.0, np.linalg.norm(S, 2)):
        raise IntertwinerError("S does not intertwine the given representations")
    w, s, vh = np.linalg.svd(S)
    # absolute floor: a numerically zero S must give U = 0, not a partial isometry of noise
    keep = s > 1e-12 * max(s.max(initial=0.0), 1.0)
    U = w[:, keep] @ vh[keep]
    P = (vh.conj().T * s) @ vh
    return U, (P + P.conj().T) / 2


# checks against fields


def _commutator(x, y) -> float:
    return float(np.linalg.norm(x @ y - y @ x, 2)) if x.size else 0.0


@dataclass(frozen=True)
class CommutationReport:
    unitary_commutator: float
    positive_commutator: float
    log_recovery: float
    scale: float


def positive_commutation_check(T: Field, pi: Representation, P) -> CommutationReport:
    """Commutators of T(pi) with e^{irP} and with P, r chosen so rP has spectrum in [0, 3]."""
    P = np.asarray(P, dtype=complex)
    w, v = np.linalg.eigh((P + P.conj().T) / 2)
    top = max(w.max(initial=0.0), 0.0)
    r = 3.0 / top if top > 0 else 1.0
    E = (v * np.exp(1j * r * w)) @ v.conj().T
    Tp = T(pi)
    # the principal logarithm returns irP since the spectrum of rP lies in [0, 3] < pi
    recovered = scipy.linalg.logm(E) / (1j * r) if P.size else P
    return CommutationReport(
        _commutator(Tp, E),
        _commutator(Tp, P),
        float(np.abs(recovered - P).max(initial=0.0)),
        r,
    )


def essential_sandwich_check(T: Field, pi: Representation) -> float:
    """||T(pi) - p T(pi) p|| with p the projection onto the essential space."""
    p = pi.unit_image()
    Tp = T(pi)
    return float(np.linalg.norm(Tp - p @ Tp @ p, 2)) if Tp.size else 0.0


@dataclass(frozen=True)
class AuditReport:
    verdict: str
    max_defect: float
    per_kind: dict
    zero_defect: float
    sandwich_defect: float
    n_samples: int
    tolerance: float
    seed: int

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_defect": self.max_defect,
            "per_kind": dict(sorted(self.per_kind.items())),
            "zero_defect": self.zero_defect,
            "sandwich_defect": self.sandwich_defect,
            "n_samples": self.n_samples,
            "tolerance": self.tolerance,
            "seed": self.seed,
        }


def compatibility_audit(T: Field, seed: int = 0, n_samples: int = 100, tol: float = AUDIT_TOL) -> AuditReport:
    desc, d = T.descriptor, T.ambient_dim
    zero = T(Representation.zero(desc, d))
    zero_defect = float(np.linalg.norm(zero, 2)) if zero.size else 0.0
    per_kind = {k: 0.0 for k in AUDIT_KINDS}
    sandwich = 0.0
    for k in range(n_samples):
        kind = AUDIT_KINDS[k % len(AUDIT_KINDS)]
        smp = sample_intertwiner(desc, d, kind, [seed, k])
        lhs = smp.S @ T(smp.pi1)
        rhs = T(smp.pi2) @ smp.S
        per_kind[kind] = max(per_kind[kind], float(np.linalg.norm(lhs - rhs, 2)))
        sandwich = max(sandwich, essential_sandwich_check(T, smp.pi1), essential_sandwich_check(T, smp.pi2))
    worst = max([zero_defect, sandwich, *per_kind.values()])
    return AuditReport("pass" if worst <= tol else "fail", worst, per_kind, zero_defect, sandwich, n_samples, tol, seed)


# duality


def _unitary_fixing(xi: np.ndarray, seed) -> np.ndarray:
    d = xi.shape[0]
    B = _completed_frame([xi], d)
    inner = np.eye(d, dtype=complex)
    if d > 1:
        inner[1:, 1:] = haar_unitary(d - 1, seed)
    return B @ inner @ B.conj().T


def _random_orthogonal_unit(xi: np.ndarray, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = _gaussian(rng, xi.shape)
    v = v - np.vdot(xi, v) * xi
    return v / np.linalg.norm(v)


def _vector_value(M: np.ndarray, xi: np.ndarray) -> complex:
    return complex(np.vdot(xi, M @ xi))


def induced_affine(
    T: Field, xi, audit: Optional[AuditReport] = None, audit_samples: int = 50, seed: int = 0
) -> AffineFunctionOnQ:
    """f_T(phi) = <T(pi) xi, xi> for any preimage pi of phi under theta_xi."""
    xi = np.asarray(xi, dtype=complex)
    d = T.ambient_dim
    if d < T.descriptor.d_min:
        raise DimensionError(f"ambient dimension {d} below d_min = {T.descriptor.d_min}")
    if audit is None:
        audit = compatibility_audit(T, seed, audit_samples)
    warning = None if audit.passed else f"field failed the compatibility audit (max defect {audit.max_defect:.3g})"

    def ev(phi: Functional) -> complex:
        return _vector_value(T(embed_preimage(phi, xi, d)), xi)

    return AffineFunctionOnQ(ev, T.descriptor, warning, meta={"audit": audit})


def preimage_values(T: Field, xi, phi: Functional, n: int = 10, seed: int = 0) -> np.ndarray:
    """<T(pi_k) xi, xi> over n distinct preimages pi_k of phi (different v, conjugated by unitaries fixing xi)."""
    xi = np.asarray(xi, dtype=complex)
    d = T.ambient_dim
    triple = gns(phi)
    values = []
    for k in range(n):
        if k == 0:
            pi = embed_gns(triple, xi, d)
        else:
            v = _random_orthogonal_unit(xi, [seed, k, 0])
            pi = conjugate(embed_gns(triple, xi, d, v), _unitary_fixing(xi, [seed, k, 1]))
        values.append(_vector_value(T(pi), xi))
    return np.array(values)


def preimage_spread(T: Field, xi, phi: Functional, n: int = 10, seed: int = 0) -> float:
    vals = preimage_values(T, xi, phi, n, seed)
    return float(np.abs(vals - vals[0]).max())


@lru_cache(maxsize=64)
def _frame_system(desc: AlgebraDescriptor, normalize: bool):
    frame = density_frame(desc, normalize)
    M = np.array([phi.pairing_row() for phi in frame])
    if np.linalg.matrix_rank(M) != desc.dim:
        raise AssertionError("reconstruction frame is rank deficient")  # pragma: no cover
    M.setflags(write=False)
    return tuple(frame), M


QUASI_STATES = "quasi_states"
STATES_ONLY = "states_only"


@dataclass(frozen=True)
class Reconstruction:
    element: AlgebraElement
    residual: float
    mode: str
    audit: AuditReport = field(compare=False)

    def to_json(self) -> dict:
        return {
            "audit": self.audit.to_json(),
            "residual": self.residual,
            "mode": self.mode,
            "recovered_element": self.element.to_json(),
        }


def reconstruct_element(
    T: Field,
    xi,
    mode: str = QUASI_STATES,
    audit: Optional[AuditReport] = None,
    audit_samples: int = 50,
    seed: int = 0,
) -> Reconstruction:
    """Recover a in A with T = field_from_element(a) by least squares over the fixed density frame."""
    if mode not in (QUASI_STATES, STATES_ONLY):
        raise ValueError(f"unknown mode {mode!r}")
    if audit is None:
        audit = compatibility_audit(T, seed, audit_samples)
    if not audit.passed:
        raise AuditFailure(audit)
    f = induced_affine(T, xi, audit=audit)
    desc = T.descriptor
    frame, M = _frame_system(desc, False)
    if mode == QUASI_STATES:
        values = np.array([evaluate_affine(f, phi) for phi in frame])
    else:
        states, _ = _frame_system(desc, True)
        # f(phi) = ||phi|| f(phi / ||phi||) extends f from S(A) to Q(A)
        values = np.array([phi.trace().real * evaluate_affine(f, s) for phi, s in zip(frame, states)])
    x, *_ = np.linalg.lstsq(M, values, rcond=None)
    residual = float(np.abs(M @ x - values).max())
    return Reconstruction(AlgebraElement.from_coords(desc, x), residual, mode, audit)
