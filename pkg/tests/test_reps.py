import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdcstar import functionals as fn
from fdcstar.algebra import AlgebraDescriptor, norm, random_element, unitize
from fdcstar.gns import gns
from fdcstar.reps import (
    DimensionError,
    InvalidRepresentationError,
    RankJumpError,
    Representation,
    conjugate,
    embed_gns,
    embed_preimage,
    haar_unitary,
    lift_vectors,
    local_lift,
    membership_rep_xi,
    random_representation,
    random_unit_vector,
    rep_distance,
    restrict_from_unitization,
    rotation_plane,
    rotation_unitary,
    theta,
    validate_representation,
)
from strategies import descriptors, seeds

D21 = AlgebraDescriptor((2, 1))
D = 6


def xi0():
    return random_unit_vector(D, [0, 99])


# rotation unitary


def test_rotation_e1_to_e2():
    e1, e2 = np.eye(2)
    U = rotation_unitary(e1, e2)
    assert np.allclose(U, [[0, -1], [1, 0]])


def test_rotation_collinear_is_scalar():
    a = random_unit_vector(4, 1)
    U = rotation_unitary(a, 1j * a)
    assert np.allclose(U, 1j * np.eye(4))
    assert rotation_plane(a, 1j * a) is None
    assert np.linalg.norm(U - np.eye(4), 2) == pytest.approx(np.sqrt(2))


def test_rotation_identity():
    a = random_unit_vector(3, 2)
    assert np.allclose(rotation_unitary(a, a), np.eye(3))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), seeds)
def test_rotation_properties(d, seed):
    a = random_unit_vector(d, [seed, 0])
    b = random_unit_vector(d, [seed, 1])
    U = rotation_unitary(a, b)
    assert np.linalg.norm(U @ a - b) <= 1e-10
    assert np.linalg.norm(U.conj().T @ U - np.eye(d), 2) <= 1e-10
    assert abs(np.linalg.norm(U - np.eye(d), 2) - np.linalg.norm(a - b)) <= 1e-9
    ap, bp = rotation_plane(a, b)
    assert abs(np.vdot(ap - bp, a - b)) <= 1e-10
    assert abs(np.linalg.norm(ap - bp) - np.linalg.norm(a - b)) <= 1e-10
    # identity on the orthogonal complement of the plane
    w = random_unit_vector(d, [seed, 2])
    w = w - np.vdot(a, w) * a - np.vdot(ap, w) * ap
    assert np.allclose(U @ w, w, atol=1e-10)


def test_rotation_nearly_collinear():
    a = random_unit_vector(5, 3)
    w = random_unit_vector(5, 4)
    w = w - np.vdot(a, w) * a
    b = a + 1e-9 * w / np.linalg.norm(w)
    b /= np.linalg.norm(b)
    U = rotation_unitary(a, b)
    assert np.linalg.norm(U @ a - b) <= 1e-12
    assert np.linalg.norm(U.conj().T @ U - np.eye(5), 2) <= 1e-12


def test_rotation_rejects_non_unit():
    with pytest.raises(ValueError):
        rotation_unitary(np.array([2.0, 0]), np.array([0, 1.0]))


# representations and theta


@settings(max_examples=30, deadline=None)
@given(descriptors, seeds)
def test_random_representation_is_valid(desc, seed):
    d = desc.d_min
    pi = random_representation(desc, d, seed)
    assert validate_representation(pi).passed
    a, b = random_element(desc, [seed, 0]), random_element(desc, [seed, 1])
    assert np.allclose(pi.apply(a * b), pi.apply(a) @ pi.apply(b), atol=1e-10)
    assert np.linalg.norm(pi.apply(a), 2) <= norm(a) + 1e-10


def test_degenerate_and_zero_representations():
    z = Representation.zero(D21, D)
    assert z.essential_rank() == 0 and validate_representation(z).passed
    pi = random_representation(D21, D, 0, multiplicities=[1, 1])
    assert pi.essential_rank() == 3
    assert not membership_rep_xi(pi, xi0())
    with pytest.raises(DimensionError):
        random_representation(D21, D, 0, multiplicities=[3, 1])


def test_theta_rejects_non_representation():
    images = random_representation(D21, D, 0).images * 2
    with pytest.raises(InvalidRepresentationError):
        theta(Representation(D21, images), xi0())


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_theta_is_a_quasi_state_and_state_on_rep_xi(seed):
    pi = random_representation(D21, D, seed)
    xi = random_unit_vector(D, seed)
    phi = theta(pi, xi)
    assert fn.is_quasi_state(phi)
    if membership_rep_xi(pi, xi):
        assert fn.classify(phi, 1e-9) == fn.STATE


@settings(max_examples=30, deadline=None)
@given(descriptors, seeds)
def test_rep_distance_is_equivalent_to_sup_over_unit_ball(desc, seed):
    d = desc.d_min
    p1 = random_representation(desc, d, [seed, 0])
    p2 = random_representation(desc, d, [seed, 1])
    dist = rep_distance(p1, p2)
    for k in range(5):
        a = random_element(desc, [seed, 2, k])
        a = a.scale(1 / norm(a))
        gap = np.linalg.norm(p1.apply(a) - p2.apply(a), 2)
        # sum over the basis of |coordinate| is at most dim * ||a||
        assert gap <= desc.dim * dist + 1e-10
    assert rep_distance(p1, p1) == 0.0


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_theta_continuity_constant(seed):
    p1 = random_representation(D21, D, [seed, 0])
    p2 = random_representation(D21, D, [seed, 1])
    xi = random_unit_vector(D, seed)
    q = fn.qstate_distance(theta(p1, xi), theta(p2, xi))
    assert q <= D21.dim * rep_distance(p1, p2) + 1e-12


def test_conjugation_moves_the_vector():
    pi = random_representation(D21, D, 1)
    U = haar_unitary(D, 2)
    xi = xi0()
    lhs = theta(conjugate(pi, U), xi)
    rhs = theta(pi, U @ xi)
    assert fn.qstate_distance(lhs, rhs) <= 1e-12


# surjectivity


def test_embed_quarter_norm_places_eta():
    phi = fn.random_functional(D21, 0, fn.STATE).scale(0.25)
    xi = xi0()
    pi = embed_preimage(phi, xi, D)
    eta = pi.unit_image() @ xi
    assert np.vdot(xi, eta).real == pytest.approx(0.25, abs=1e-12)
    assert np.linalg.norm(eta) ** 2 == pytest.approx(0.25, abs=1e-12)
    assert fn.qstate_distance(theta(pi, xi), phi) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(descriptors, seeds, st.sampled_from([fn.STATE, fn.QUASI_STATE]))
def test_embed_preimage_is_a_preimage(desc, seed, kind):
    d = desc.d_min
    xi = random_unit_vector(d, seed)
    phi = fn.random_functional(desc, seed, kind)
    pi = embed_preimage(phi, xi, d)
    assert validate_representation(pi).passed
    assert fn.qstate_distance(theta(pi, xi), phi) <= 1e-9
    assert pi.essential_rank() <= d - 1
    if kind == fn.STATE:
        assert membership_rep_xi(pi, xi)


def test_embed_zero_functional():
    pi = embed_preimage(fn.Functional.zero(D21), xi0(), D)
    assert np.all(pi.images == 0)


def test_embed_with_custom_orthogonal_vector():
    xi = xi0()
    v = random_unit_vector(D, 5)
    v = v - np.vdot(xi, v) * xi
    v /= np.linalg.norm(v)
    phi = fn.random_functional(D21, 3, fn.QUASI_STATE)
    pi = embed_gns(gns(phi), xi, D, v)
    assert fn.qstate_distance(theta(pi, xi), phi) <= 1e-12
    with pytest.raises(ValueError):
        embed_gns(gns(phi), xi, D, xi)


def test_embed_needs_room():
    with pytest.raises(DimensionError):
        embed_preimage(fn.random_functional(D21, 0), random_unit_vector(5, 0), 5)


def test_restriction_from_unitization():
    desc = AlgebraDescriptor((2,))
    tilde, embed = unitize(desc)
    big = random_representation(tilde, 4, 0, multiplicities=[1, 1])
    small = restrict_from_unitization(big)
    a = random_element(desc, 1)
    assert np.allclose(small.apply(a), big.apply(embed(a, 0.0)))


# local lift


def _pair(seed, rank=None):
    phi = fn.random_functional(D21, [seed, 0], fn.QUASI_STATE, rank=rank)
    target = fn.random_functional(D21, [seed, 1], fn.QUASI_STATE)
    return phi, target


def test_lift_lambda_is_one_for_equal_norms():
    xi = xi0()
    phi, target = _pair(0)
    target = target.scale(phi.trace().real / target.trace().real)
    pi = embed_preimage(phi, xi, D)
    lv = lift_vectors(pi, xi, target)
    assert lv.lam == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(lv.xi_prime) == pytest.approx(1.0, abs=1e-12)


def test_lift_of_the_same_functional_is_identity():
    xi = xi0()
    phi, _ = _pair(1)
    pi = embed_preimage(phi, xi, D)
    assert rep_distance(local_lift(pi, xi, phi), pi) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_lift_is_exact_and_shrinks(seed):
    xi = random_unit_vector(D, seed)
    phi, target = _pair(seed)
    pi = embed_preimage(phi, xi, D)
    dists = []
    for n in range(1, 9):
        phi_n = phi + (target - phi).scale(2.0**-n)
        lifted = local_lift(pi, xi, phi_n)
        assert fn.qstate_distance(theta(lifted, xi), phi_n) <= 1e-9
        dists.append(rep_distance(lifted, pi))
    assert all(y < x for x, y in zip(dists[2:], dists[3:]))


def test_lift_from_a_state_takes_the_essential_branch():
    xi = xi0()
    phi = fn.random_functional(D21, 2, fn.STATE)
    target = fn.random_functional(D21, 3, fn.QUASI_STATE)
    pi = embed_preimage(phi, xi, D)
    lv = lift_vectors(pi, xi, target)
    assert lv.lam is None
    assert fn.qstate_distance(theta(local_lift(pi, xi, target), xi), target) <= 1e-9


def test_lift_rank_jump_is_flagged():
    xi = xi0()
    phi, target = _pair(4, rank=1)
    pi = embed_preimage(phi, xi, D)
    with pytest.raises(RankJumpError):
        local_lift(pi, xi, target)


def test_lift_rejects_targets_outside_q():
    xi = xi0()
    phi, target = _pair(5)
    pi = embed_preimage(phi, xi, D)
    with pytest.raises(fn.NotQuasiStateError):
        local_lift(pi, xi, target.scale(5.0))


def test_representation_json_round_trip():
    pi = random_representation(D21, D, 9)
    back = Representation.from_json(pi.to_json())
    assert rep_distance(back, pi) == 0.0


def test_samplers_are_deterministic():
    assert np.array_equal(random_unit_vector(D, [1, 2]), random_unit_vector(D, [1, 2]))
    U = haar_unitary(D, 3)
    assert np.allclose(U.conj().T @ U, np.eye(D))
    assert rep_distance(random_representation(D21, D, 4), random_representation(D21, D, 4)) <= 1e-12
