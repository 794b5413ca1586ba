import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import conjugate_each, random_pvm, stability_instance
from syncindset.algebra import ValidationError, dagger, is_pvm, trace_norm2
from syncindset.stability import (
    StabilityError,
    povm_to_pvm,
    round_positive_family,
    round_projection_family,
    round_subordinate,
)


def sq_dist(xs, ys):
    return sum(trace_norm2(x - y) ** 2 for x, y in zip(xs, ys))


def test_exact_pvm_is_fixed():
    rng = np.random.default_rng(41)
    p = random_pvm(6, 3, rng)
    q, report = round_positive_family(p)
    assert report.total_dist_sq <= 1e-12
    assert report.eps_meas < 1e-12


def test_identity_single_element():
    q, _ = round_positive_family([np.eye(3)])
    assert np.allclose(q[0], np.eye(3))


def test_hand_traced_diagonal_case():
    s = 0.1
    q, report = round_positive_family([np.diag([1 - s, 0]), np.diag([0, 1])])
    assert np.allclose(q[0], np.diag([1, 0])) and np.allclose(q[1], np.diag([0, 1]))
    assert report.total_dist_sq == pytest.approx(0.005, abs=1e-12)
    assert report.eps_meas == pytest.approx(s / np.sqrt(2))
    assert report.norm_a0 == pytest.approx(s / np.sqrt(2))
    assert report.norm_rho_minus_1 == pytest.approx(0, abs=1e-12)


def test_rejects_bad_input():
    with pytest.raises(ValidationError):
        round_positive_family([np.diag([-0.5, 1.0])])
    with pytest.raises(ValidationError):
        round_positive_family([np.diag([1.5, 1.0])])
    with pytest.raises(ValidationError):
        round_positive_family([np.eye(2), np.eye(3)])
    with pytest.raises(ValidationError):
        round_positive_family([np.array([[0, 1], [0, 0]])])


def test_small_overshoot_is_clamped():
    q, _ = round_positive_family([np.diag([1 + 1e-9, 0]), np.diag([0, 1])])
    assert is_pvm(q, 1e-8)


def test_povm_to_pvm_near_projective_qubit():
    rng = np.random.default_rng(42)
    u = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    v, w = u[:, 0], u[:, 1]
    vv, ww = np.outer(v, v.conj()), np.outer(w, w.conj())
    s = 0.9
    c = [(1 + s) / 2 * vv + (1 - s) / 2 * ww, (1 - s) / 2 * vv + (1 + s) / 2 * ww]
    p = povm_to_pvm(c)
    assert np.allclose(p[0], vv) and np.allclose(p[1], ww)


def test_povm_to_pvm_exact_and_mixed():
    rng = np.random.default_rng(43)
    pvm = random_pvm(5, 3, rng)
    assert sq_dist(povm_to_pvm(pvm), pvm) <= 1e-12
    mixed = [np.eye(4) / 3] * 3
    assert is_pvm(povm_to_pvm(mixed), 1e-8)
    with pytest.raises(ValidationError):
        povm_to_pvm([np.eye(2) / 3, np.eye(2) / 3])


def test_povm_to_pvm_contract_random():
    rng = np.random.default_rng(44)
    checked = 0
    for _ in range(80):
        d, m = int(rng.integers(2, 10)), int(rng.integers(2, 6))
        a = stability_instance(rng, d, m, "rotate", float(rng.uniform(0, 0.2)))
        # normalize into a POVM
        rho = sum(a)
        w, v = np.linalg.eigh(rho)
        r = (v / np.sqrt(w)) @ dagger(v)
        c = [r @ x @ r for x in a]
        c = [(x + dagger(x)) / 2 for x in c]
        eps_p = 1 - sum(np.trace(x @ x).real for x in c) / d
        if eps_p > 0.1:
            continue
        checked += 1
        p = povm_to_pvm(c)
        assert is_pvm(p, 1e-8)
        assert sq_dist(c, p) <= 9 * eps_p + 1e-9
    assert checked >= 30


def test_commuting_povm_rounded_exactly_by_argmax():
    # diagonal POVM: each basis vector goes to its largest weight
    c = [np.diag([0.7, 0.2, 0.1]), np.diag([0.3, 0.8, 0.1]), np.diag([0.0, 0.0, 0.8])]
    p = povm_to_pvm(c)
    assert np.allclose(p[0], np.diag([1, 0, 0]))
    assert np.allclose(p[1], np.diag([0, 1, 0]))
    assert np.allclose(p[2], np.diag([0, 0, 1]))


def test_projection_family_deleted_element():
    rng = np.random.default_rng(45)
    p = random_pvm(8, 4, rng)
    rank = int(round(np.trace(p[-1]).real))
    q, report = round_projection_family(p[:-1])
    assert report.eps_meas == pytest.approx(np.sqrt(rank / 8))
    assert is_pvm(q, 1e-8)


def test_projection_family_rotated():
    rng = np.random.default_rng(46)
    for _ in range(10):
        p = random_pvm(6, 3, rng)
        q, report = round_projection_family(conjugate_each(p, 0.05, rng))
        assert is_pvm(q, 1e-8)
        assert report.delta_meas <= report.eps_meas + 1e-9
        assert report.total_dist_sq <= report.final_bound


def test_projection_family_rejects_non_projection():
    with pytest.raises(ValidationError):
        round_projection_family([0.5 * np.eye(2)])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_proof_inequalities_hold(seed):
    rng = np.random.default_rng(seed)
    a = stability_instance(rng, int(rng.integers(1, 9)), int(rng.integers(1, 7)))
    q, report = round_positive_family(a)
    assert report.proof_violations() == []
    assert is_pvm(q, 1e-8)
    values = report.as_dict().values()
    assert all(np.isfinite(v) and v >= -1e-12 for v in values)


def test_idempotent():
    rng = np.random.default_rng(47)
    for _ in range(20):
        q, _ = round_positive_family(stability_instance(rng, 6, 4))
        q2, _ = round_positive_family(q)
        assert sq_dist(q, q2) <= 1e-10


def test_subordinate_exact():
    p = [np.diag([1, 1, 0, 0]), np.diag([0, 0, 1, 1])]
    a = [np.diag([1, 0, 0, 0]), np.diag([0, 1, 0, 0]), np.diag([0, 0, 1, 1])]
    q, report = round_subordinate(a, p, [[0, 1], [2]])
    assert report.total_dist_sq <= 1e-12
    for x, y in zip(q, a):
        assert np.allclose(x, y)


def block_perturbed(rng, theta):
    p = [np.diag([1, 1, 0, 0]).astype(complex), np.diag([0, 0, 1, 1]).astype(complex)]
    w = np.eye(4)[:, :2]
    u = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    e0, e1 = u[:, 0], u[:, 1]
    h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    h = (h + h.conj().T) / 2
    wv, vv = np.linalg.eigh(h)
    rot = (vv * np.exp(1j * theta * wv)) @ vv.conj().T
    a0 = w @ (rot @ np.outer(e0, e0.conj()) @ rot.conj().T) @ w.T
    a1 = 0.95 * w @ np.outer(e1, e1.conj()) @ w.T
    a2 = 0.97 * p[1]
    return [a0, a1, a2], p


def test_subordinate_perturbed():
    rng = np.random.default_rng(48)
    for _ in range(20):
        a, p = block_perturbed(rng, 0.1)
        q, report = round_subordinate(a, p, [[0, 1], [2]])
        assert is_pvm(q, 1e-8)
        lam = [0, 0, 1]
        for j, qj in enumerate(q):
            pk = p[lam[j]]
            assert trace_norm2(pk @ qj @ pk - qj) < 1e-10
        assert report.total_dist_sq <= report.unconstrained_dist_sq + 1e-9


def test_subordinate_single_block_matches_plain():
    rng = np.random.default_rng(49)
    a = stability_instance(rng, 5, 3, "depolarize", 0.1)
    q1, r1 = round_subordinate(a, [np.eye(5)], [[0, 1, 2]])
    q2, r2 = round_positive_family(a)
    assert sq_dist(q1, q2) <= 1e-20
    assert r1.total_dist_sq == pytest.approx(r2.total_dist_sq)


def test_subordinate_rejects():
    p = [np.diag([1, 1, 0, 0]), np.diag([0, 0, 1, 1])]
    a = [np.diag([1, 0, 0, 0]), np.diag([0, 1, 0, 0]), np.diag([0, 0, 1, 1])]
    with pytest.raises(ValidationError):
        round_subordinate(a, p, [[0], [2]])
    with pytest.raises(ValidationError):
        round_subordinate(a, p, [[0, 2], [1]])
    with pytest.raises(ValidationError):
        round_subordinate(a, [np.eye(4), np.eye(4)], [[0, 1], [2]])


def test_stability_error_is_runtime_error():
    assert issubclass(StabilityError, RuntimeError)
