import json

import numpy as np
import pytest
from scipy.optimize import minimize

from weyleth.basis import build_basis, matrix_K
from weyleth.lmg import (
    DomainError,
    LmgParams,
    build_hamiltonian,
    classical_H,
    grad_A,
    grad_H,
    load_params,
)

P = load_params()


def random_physical(n, seed=0):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, 4))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z * np.sqrt(2) * rng.uniform(size=(n, 1)) ** 0.25


def test_bundled_parameters():
    assert P.omega == 60 and P.a == 1.0 and P.lam == 2.0
    assert P.eps1p == 44.0 and P.mu4p == 7.024
    assert P.hbar == pytest.approx(1 / 60)
    assert P.eps[0] == pytest.approx(44.0 / 60)
    assert P.mu[1] == pytest.approx(27.4 / 3600)


def test_config_roundtrip_and_unknown_key(tmp_path):
    cfg = P.with_(a=1.2).to_config()
    assert LmgParams.from_config(cfg) == P.with_(a=1.2)
    path = tmp_path / "p.json"
    path.write_text(json.dumps({**cfg, "omega": 10}))
    assert load_params(str(path)).omega == 10
    with pytest.raises(KeyError):
        LmgParams.from_config({**cfg, "eps3p": 1.0})


def test_omega1_excited_diagonal():
    p = P.with_(omega=1)
    b = build_basis(1)
    H = build_hamiltonian(p, b)
    i = b.index[(1, 0)]
    assert H[i, i] == pytest.approx(p.eps[0])


def test_no_interaction_is_diagonal():
    p = P.with_(omega=5, lam=0.0, a=1.3)
    b = build_basis(5)
    H = build_hamiltonian(p, b)
    np.testing.assert_allclose(H, np.diag(1.3 * p.eps[0] * b.n1 + p.eps[1] * b.n2))


def test_zero_deformation():
    p = P.with_(omega=6, a=0.0)
    b = build_basis(6)
    np.testing.assert_allclose(build_hamiltonian(p, b), p.eps[1] * matrix_K(2, 2, b), atol=1e-14)


def test_hermitian():
    H = build_hamiltonian(P.with_(omega=20))
    assert np.abs(H - H.T).max() <= 1e-10 * np.abs(H).max()


def test_basis_mismatch():
    with pytest.raises(ValueError):
        build_hamiltonian(P.with_(omega=4), build_basis(5))


def test_classical_values():
    assert classical_H(P, np.zeros(4)) == pytest.approx(0.0)
    # eps1'/2 q1^2 + lambda mu1' q1^2 (1 - q1^2/2)
    assert classical_H(P, [0, 0, 0.5, 0]) == pytest.approx(13.62)
    z = random_physical(20, 3)
    h0 = classical_H(P.with_(a=0.0), z)
    np.testing.assert_allclose(h0, 0.5 * P.eps2p * (z[:, 1] ** 2 + z[:, 3] ** 2))


def test_domain_error():
    with pytest.raises(DomainError):
        classical_H(P, [1.5, 0, 0, 0])
    with pytest.raises(ValueError):
        classical_H(P, [0, 0, 0])


def test_gradient_origin():
    np.testing.assert_allclose(grad_H(P, np.zeros(4)), 0.0)


def test_gradient_finite_differences():
    z = random_physical(100, 1) * 0.98
    g = grad_H(P, z)
    h = 1e-5
    fd = np.empty_like(g)
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        fd[:, k] = (classical_H(P, z + e) - classical_H(P, z - e)) / (2 * h)
    rel = np.abs(g - fd).max(axis=1) / np.maximum(np.abs(g).max(axis=1), 1.0)
    assert rel.max() < 1e-6


def test_grad_A_linear_in_a_when_B_at_rest():
    rng = np.random.default_rng(4)
    z = np.zeros((10, 4))
    z[:, [0, 2]] = rng.uniform(-0.8, 0.8, size=(10, 2))
    base = grad_A(P, z)
    for a in (0.5, 2.0):
        np.testing.assert_allclose(grad_A(P.with_(a=a), z), a * base, rtol=1e-12)


def _classical_extreme(sign, seed=0):
    # polish the best random samples under the constraint G <= 2
    z = random_physical(200_000, seed)
    h = sign * classical_H(P, z)
    starts = z[np.argsort(h)[:10]]
    cons = {"type": "ineq", "fun": lambda x: 2.0 - x @ x}
    best = h.min()
    for z0 in starts:
        r = minimize(lambda x: sign * classical_H(P, x, check=False), z0, method="SLSQP", constraints=[cons])
        if r.success and r.x @ r.x <= 2 + 1e-9:
            best = min(best, r.fun)
    return sign * best


@pytest.mark.slow
def test_spectrum_edges_approach_classical_range():
    lo, hi = _classical_extreme(1), _classical_extreme(-1)
    gaps = []
    for om in (20, 40, 80):
        E = np.linalg.eigvalsh(build_hamiltonian(P.with_(omega=om)))
        gaps.append(abs(E[0] - lo) + abs(E[-1] - hi))
    assert gaps[0] > gaps[1] > gaps[2]


def test_trace_matches_phase_space_mean():
    z = random_physical(400_000, 7)
    h = classical_H(P, z)
    se = h.std() / np.sqrt(h.size)
    for om in (10, 20, 40):
        H = build_hamiltonian(P.with_(omega=om))
        diff = abs(np.trace(H) / len(H) - h.mean())
        assert diff <= 1.0 / om + 4 * se
