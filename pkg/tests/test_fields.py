import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdcstar import fields as fld
from fdcstar import functionals as fn
from fdcstar.algebra import AlgebraDescriptor, AlgebraElement, norm, random_element
from fdcstar.reps import Representation, random_representation, random_unit_vector
from strategies import seeds

D21 = AlgebraDescriptor((2, 1))
D = 6


def xi0():
    return random_unit_vector(D, [0, 99])


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(fld.ALL_KINDS), seeds)
def test_sampled_intertwiners_intertwine(kind, seed):
    s = fld.sample_intertwiner(D21, D, kind, seed)
    assert fld.intertwiner_defect(s.S, s.pi1, s.pi2) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(fld.ALL_KINDS), seeds)
def test_polar_decomposition(kind, seed):
    s = fld.sample_intertwiner(D21, D, kind, seed)
    U, P = fld.polar_decompose_intertwiner(s.S, s.pi1, s.pi2)
    assert np.abs(U @ P - s.S).max() <= 1e-10
    assert fld.intertwiner_defect(U, s.pi1, s.pi2) <= 1e-9
    assert fld.intertwiner_defect(P, s.pi1, s.pi1) <= 1e-9
    assert np.linalg.eigvalsh(P).min() >= -1e-10
    # U is a partial isometry: U*U is a projection
    E = U.conj().T @ U
    assert np.allclose(E @ E, E, atol=1e-10)


def test_sample_kinds_have_their_shape():
    s = fld.sample_intertwiner(D21, D, fld.UNITARY, 0)
    assert np.allclose(s.S.conj().T @ s.S, np.eye(D))
    s = fld.sample_intertwiner(D21, D, fld.PROJECTION, 0)
    assert np.allclose(s.S @ s.S, s.S) and np.allclose(s.S, s.S.conj().T)
    s = fld.sample_intertwiner(D21, D, fld.ZERO_TARGET, 0)
    assert np.all(s.pi2.images == 0)
    with pytest.raises(ValueError):
        fld.sample_intertwiner(D21, D, "nonsense", 0)


def test_polar_rejects_non_intertwiner():
    s = fld.sample_intertwiner(D21, D, fld.GENERAL, 1)
    noise = np.random.default_rng(0).standard_normal((D, D))
    with pytest.raises(fld.IntertwinerError):
        fld.polar_decompose_intertwiner(s.S + noise, s.pi1, s.pi2)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_element_fields_commute_with_positive_intertwiners(seed):
    pi, P = fld.sample_positive_self_intertwiner(D21, D, seed)
    T = fld.field_from_element(random_element(D21, seed), D)
    r = fld.positive_commutation_check(T, pi, P)
    assert r.unitary_commutator <= 1e-8 and r.positive_commutator <= 1e-8
    assert r.log_recovery <= 1e-8


def test_positive_commutation_detects_compressed_field():
    pi, P = fld.sample_positive_self_intertwiner(D21, D, 3)
    T = fld.compressed_matrix_field(D21, D)
    assert fld.positive_commutation_check(T, pi, P).positive_commutator > 1e-3


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_essential_sandwich(seed):
    T = fld.field_from_element(random_element(D21, seed), D)
    pi = random_representation(D21, D, seed)
    assert fld.essential_sandwich_check(T, pi) <= 1e-10
    assert fld.essential_sandwich_check(T, Representation.zero(D21, D)) == 0.0


def test_element_field_bound():
    a = random_element(D21, 2)
    T = fld.field_from_element(a, D)
    assert T.bound == pytest.approx(norm(a))
    for k in range(5):
        assert np.linalg.norm(T(random_representation(D21, D, k)), 2) <= norm(a) + 1e-10


def test_audit_passes_element_fields():
    T = fld.field_from_element(random_element(D21, 0), D)
    audit = fld.compatibility_audit(T, seed=0, n_samples=25)
    assert audit.passed and audit.max_defect <= 1e-7
    assert set(audit.per_kind) == set(fld.AUDIT_KINDS)
    assert fld.compatibility_audit(fld.zero_field(D21, D), n_samples=10).passed


@pytest.mark.parametrize("name", sorted(fld.ADVERSARIAL_FIELDS))
def test_audit_rejects_adversarial_fields(name):
    T = fld.ADVERSARIAL_FIELDS[name](D21, D)
    audit = fld.compatibility_audit(T, seed=0)
    assert audit.verdict == "fail"
    assert audit.max_defect >= 0.05
    with pytest.raises(fld.AuditFailure):
        fld.reconstruct_element(T, xi0())
    f = fld.induced_affine(T, xi0(), audit=audit)
    assert f.warning is not None


def test_adversarial_defects_are_structural():
    # constant field: T(0) = I; trace field: T(pi) = tr(pi(1)) I
    assert fld.compatibility_audit(fld.constant_field(D21, D)).zero_defect == pytest.approx(1.0)
    rep = fld.compatibility_audit(fld.trace_field(D21, D))
    assert rep.max_defect >= 1.0


@settings(max_examples=10, deadline=None)
@given(seeds, st.sampled_from([fld.QUASI_STATES, fld.STATES_ONLY]))
def test_reconstruction_round_trip(seed, mode):
    a = random_element(D21, seed)
    T = fld.field_from_element(a, D)
    rec = fld.reconstruct_element(T, xi0(), mode, audit_samples=10, seed=seed)
    assert norm(rec.element - a) <= 1e-7
    assert rec.residual <= 1e-7


def test_induced_affine_matches_pairing():
    a = random_element(D21, 4)
    T = fld.field_from_element(a, D)
    f = fld.induced_affine(T, xi0(), audit_samples=10)
    assert f.warning is None
    for k in range(5):
        phi = fn.random_functional(D21, k, fn.QUASI_STATE)
        assert f(phi) == pytest.approx(fn.pair(phi, a), abs=1e-9)
    assert f(fn.Functional.zero(D21)) == pytest.approx(0.0, abs=1e-15)


def test_preimage_spread_is_small_for_element_fields():
    T = fld.field_from_element(random_element(D21, 5), D)
    for phi in fn.density_frame(D21)[:3]:
        assert fld.preimage_spread(T, xi0(), phi, n=10, seed=1) <= 1e-8


def test_preimage_spread_exposes_compressed_field():
    T = fld.compressed_matrix_field(D21, D)
    phi = fn.random_functional(D21, 0, fn.QUASI_STATE)
    assert fld.preimage_spread(T, xi0(), phi, n=10) > 1e-3


def test_reconstruct_unknown_mode():
    T = fld.field_from_element(AlgebraElement.unit(D21), D)
    with pytest.raises(ValueError):
        fld.reconstruct_element(T, xi0(), "everything")


def test_field_rejects_wrong_space():
    T = fld.field_from_element(AlgebraElement.unit(D21), D)
    with pytest.raises(ValueError):
        T(Representation.zero(D21, D + 1))


def test_reconstruction_report_json():
    T = fld.field_from_element(random_element(D21, 6), D)
    out = fld.reconstruct_element(T, xi0(), audit_samples=5).to_json()
    assert out["audit"]["verdict"] == "pass"
    assert set(out) == {"audit", "residual", "mode", "recovered_element"}
