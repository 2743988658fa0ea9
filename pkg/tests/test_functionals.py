import numpy as np
import pytest
from hypothesis import given, settings

from fdcstar import functionals as fn
from fdcstar.algebra import AlgebraDescriptor, AlgebraElement, canonical_basis, norm, random_element, unitize
from strategies import descriptors, seeds

D21 = AlgebraDescriptor((2, 1))


def test_pairing_known_value():
    rho = np.array([[0.5, 0.25j], [-0.25j, 0.25]])
    phi = fn.Functional(D21, [rho, [[0.25]]])
    e01 = AlgebraElement.matrix_unit(D21, 0, 0, 1)
    # phi(E_01) = tr(rho E_01) = rho[1, 0]
    assert fn.pair(phi, e01) == pytest.approx(-0.25j)
    assert fn.pair(phi, AlgebraElement.unit(D21)) == pytest.approx(1.0)
    assert fn.classify(phi) == fn.STATE


def test_functional_norm_known_value():
    phi = fn.Functional(D21, [np.diag([1.0, -0.5]), [[0.5]]])
    assert fn.functional_norm(phi) == pytest.approx(2.0)
    plus, minus = fn.jordan_decompose(phi)
    assert fn.functional_norm(plus) == pytest.approx(1.5)
    assert fn.functional_norm(minus) == pytest.approx(0.5)
    assert fn.classify(phi) == fn.HERMITIAN


def test_qstate_distance_known_value():
    a = fn.Functional(D21, [np.diag([1.0, 0.0]), [[0.0]]])
    b = fn.Functional(D21, [np.zeros((2, 2)), [[1.0]]])
    assert fn.qstate_distance(a, b) == pytest.approx(2.0)
    assert fn.qstate_distance(a, a) == 0.0


def test_non_hermitian_norm_raises():
    phi = fn.Functional(D21, [np.array([[0, 1], [0, 0]]), [[0]]])
    assert fn.classify(phi) == fn.GENERAL
    with pytest.raises(fn.NotHermitianError):
        fn.functional_norm(phi)


@settings(max_examples=40, deadline=None)
@given(descriptors, seeds)
def test_norm_is_attained_on_a_unitary(desc, seed):
    h = fn.random_hermitian_functional(desc, seed)
    # the sign unitary of each density attains the sup over the unit ball
    blocks = []
    for rho in h.density_blocks:
        w, v = np.linalg.eigh(rho)
        blocks.append((v * np.where(w >= 0, 1.0, -1.0)) @ v.conj().T)
    u = AlgebraElement(desc, blocks)
    assert abs(fn.pair(h, u)) == pytest.approx(fn.functional_norm(h), rel=1e-10)
    for k in range(5):
        a = random_element(desc, [seed, k])
        assert abs(fn.pair(h, a)) <= fn.functional_norm(h) * norm(a) + 1e-10


@settings(max_examples=50, deadline=None)
@given(descriptors, seeds)
def test_jordan_additivity(desc, seed):
    h = fn.random_hermitian_functional(desc, seed)
    plus, minus = fn.jordan_decompose(h)
    assert plus.is_positive() and minus.is_positive()
    assert fn.qstate_distance(plus - minus, h) <= 1e-12
    assert fn.functional_norm(h) == pytest.approx(fn.functional_norm(plus) + fn.functional_norm(minus), abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(descriptors, seeds)
def test_unitization_correspondence(desc, seed):
    phi = fn.random_functional(desc, seed, fn.QUASI_STATE)
    tilde, embed = unitize(desc)
    pt = fn.to_unitization(phi)
    assert fn.classify(pt) == fn.STATE
    assert fn.qstate_distance(fn.from_unitization(pt), phi) <= 1e-12
    a = random_element(desc, seed)
    # the extension is phi(a) + lam
    assert fn.pair(pt, embed(a, 0.5j)) == pytest.approx(fn.pair(phi, a) + 0.5j, abs=1e-12)


def test_unitization_rejects_non_quasi_states():
    with pytest.raises(fn.NotQuasiStateError):
        fn.to_unitization(fn.Functional(D21, [np.eye(2), [[1.0]]]))


@pytest.mark.parametrize("kind", [fn.STATE, fn.QUASI_STATE])
@pytest.mark.parametrize("rank", [None, 1, 2])
def test_random_functional_kinds(kind, rank):
    phi = fn.random_functional(D21, 4, kind, rank=rank)
    assert phi.is_positive()
    if kind == fn.STATE:
        assert phi.trace().real == pytest.approx(1.0)
    if kind == fn.QUASI_STATE:
        assert fn.is_quasi_state(phi)
    if rank is not None:
        assert sum(np.linalg.matrix_rank(b, tol=1e-12) for b in phi.density_blocks) == rank


def test_pairing_row_round_trip():
    phi = fn.random_hermitian_functional(D21, 2)
    row = phi.pairing_row()
    for e, val in zip(canonical_basis(D21), row):
        assert fn.pair(phi, e) == pytest.approx(val)
    assert fn.qstate_distance(fn.Functional.from_pairing_row(D21, row), phi) == 0.0
    assert fn.qstate_distance(fn.Functional.from_json(phi.to_json()), phi) == 0.0


@pytest.mark.parametrize("dims", [(1,), (2, 1), (3, 2, 1)])
def test_density_frame_spans(dims):
    desc = AlgebraDescriptor(dims)
    frame = fn.density_frame(desc)
    assert len(frame) == desc.dim
    assert all(phi.is_positive() for phi in frame)
    assert np.linalg.matrix_rank(np.array([f.pairing_row() for f in frame])) == desc.dim
    assert all(fn.classify(f) == fn.STATE for f in fn.density_frame(desc, normalize=True))


def test_affine_evaluation_domain():
    a = random_element(D21, 1)
    f = fn.affine_from_element(a)
    phi = fn.random_functional(D21, 1, fn.QUASI_STATE)
    assert f(phi) == pytest.approx(fn.pair(phi, a))
    assert f(fn.Functional.zero(D21)) == 0
    with pytest.raises(fn.NotQuasiStateError):
        f(phi.scale(3.0))


def test_random_functional_rejects_other_kinds():
    with pytest.raises(ValueError):
        fn.random_functional(D21, 0, fn.POSITIVE)
