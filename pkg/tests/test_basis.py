import itertools

import numpy as np
import pytest

from weyleth.basis import build_basis, is_hermitian, matrix_K, matrix_observable_A


def brute_K(omega):
    """K_rs = b_r^dag b_s in the full three-mode Fock space, restricted to N = omega."""
    n = omega + 1
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    eye = np.eye(n)
    modes = [np.kron(np.kron(a, eye), eye), np.kron(np.kron(eye, a), eye), np.kron(np.kron(eye, eye), a)]
    occ = list(itertools.product(range(n), repeat=3))
    keep = [i for i, o in enumerate(occ) if sum(o) == omega]
    labels = [(occ[i][1], occ[i][2]) for i in keep]
    out = {}
    for r in range(3):
        for s in range(3):
            full = modes[r].T @ modes[s]
            out[r, s] = full[np.ix_(keep, keep)]
    return labels, out


@pytest.mark.parametrize("omega,size", [(1, 3), (2, 6), (40, 861)])
def test_sizes(omega, size):
    assert build_basis(omega).size == size


def test_omega1_states():
    assert list(build_basis(1).states) == [(0, 0), (0, 1), (1, 0)]


def test_lexicographic_order():
    st = build_basis(5).states
    assert list(st) == sorted(st)


def test_rejects_bad_omega():
    with pytest.raises(ValueError):
        build_basis(0)


def test_K10_omega1():
    b = build_basis(1)
    K = matrix_K(1, 0, b)
    assert K[b.index[(1, 0)], b.index[(0, 0)]] == pytest.approx(1.0)


@pytest.mark.parametrize("omega", [1, 2, 3])
def test_matches_bruteforce_fock_space(omega):
    b = build_basis(omega)
    labels, ref = brute_K(omega)
    perm = [labels.index(s) for s in b.states]
    for (r, s), m in ref.items():
        np.testing.assert_allclose(matrix_K(r, s, b), m[np.ix_(perm, perm)], atol=1e-12)


def test_diagonals_and_number():
    b = build_basis(6)
    assert np.array_equal(np.diag(matrix_K(1, 1, b)), b.n1)
    total = sum(matrix_K(r, r, b) for r in range(3))
    np.testing.assert_allclose(total, 6 * np.eye(b.size))


@pytest.mark.parametrize("omega,state,value", [(2, (2, 0), 1.0), (2, (0, 2), 0.0), (4, (1, 2), 0.25)])
def test_observable_A(omega, state, value):
    b = build_basis(omega)
    assert matrix_observable_A(b)[b.index[state], b.index[state]] == pytest.approx(value)


@pytest.mark.parametrize("omega", [3, 8, 20])
def test_u3_commutators(omega):
    b = build_basis(omega)
    K = {(r, s): matrix_K(r, s, b) for r in range(3) for s in range(3)}
    for r, s, t, u in itertools.product(range(3), repeat=4):
        lhs = K[r, s] @ K[t, u] - K[t, u] @ K[r, s]
        rhs = (s == t) * K[r, u] - (u == r) * K[t, s]
        assert np.abs(lhs - rhs).max() <= 1e-10 * omega


def test_adjoint_pairs():
    b = build_basis(7)
    for r in range(3):
        for s in range(3):
            np.testing.assert_allclose(matrix_K(r, s, b).T, matrix_K(s, r, b), atol=1e-14)
    assert is_hermitian(matrix_K(1, 2, b) + matrix_K(2, 1, b))
    assert not is_hermitian(matrix_K(1, 2, b))


def test_bad_orbital():
    with pytest.raises(ValueError):
        matrix_K(3, 0, build_basis(2))
