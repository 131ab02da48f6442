"""Two-mode boson basis for the symmetric sector of the three-orbital LMG model.

States are labelled ``(n1, n2)`` with ``n1 + n2 <= omega``; orbital 0 holds
the remaining ``omega - n1 - n2`` particles.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = ["FockBasis", "build_basis", "matrix_K", "sparse_K", "matrix_observable_A", "is_hermitian"]

MAX_DIM = 50_000


@dataclass(frozen=True)
class FockBasis:
    omega: int
    states: tuple[tuple[int, int], ...]
    index: dict = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def n1(self) -> np.ndarray:
        return np.array([s[0] for s in self.states])

    @property
    def n2(self) -> np.ndarray:
        return np.array([s[1] for s in self.states])


def build_basis(omega: int) -> FockBasis:
    """Basis of dimension (omega+1)(omega+2)/2, lexicographic in (n1, n2)."""
    omega = int(omega)
    if omega < 1:
        raise ValueError("particle number omega must be >= 1")
    dim = (omega + 1) * (omega + 2) // 2
    if dim > MAX_DIM:
        raise ValueError(f"basis dimension {dim} exceeds dense limit {MAX_DIM}")
    states = tuple((n1, n2) for n1 in range(omega + 1) for n2 in range(omega + 1 - n1))
    return FockBasis(omega, states, {s: i for i, s in enumerate(states)})


def matrix_K(r: int, s: int, basis: FockBasis) -> np.ndarray:
    """Dense real matrix of the u(3) generator ``K_rs``.

    ``K_rs = b_r^dag b_s`` for r, s in {1, 2} and
    ``K_r0 = b_r^dag sqrt(omega - n1 - n2)``, ``K_0r = K_r0^dag``,
    ``K_00 = omega - n1 - n2``.  All cases reduce to moving one particle
    from orbital s to orbital r with amplitude ``sqrt(n_s) sqrt(n_r + 1)``,
    where ``n_0 = omega - n1 - n2``.
    """
    return sparse_K(r, s, basis).toarray()


def sparse_K(r: int, s: int, basis: FockBasis) -> sp.csr_matrix:
    """CSR form of :func:`matrix_K`."""
    if r not in (0, 1, 2) or s not in (0, 1, 2):
        raise ValueError(f"orbital indices must be in 0..2, got ({r}, {s})")
    dim = basis.size
    n1, n2 = basis.n1, basis.n2
    occ = np.stack([basis.omega - n1 - n2, n1, n2])
    if r == s:
        return sp.diags(occ[r].astype(float), format="csr")
    cols = np.nonzero(occ[s] > 0)[0]
    amp = np.sqrt(occ[s, cols]) * np.sqrt(occ[r, cols] + 1.0)
    new = occ[:, cols].copy()
    new[s] -= 1
    new[r] += 1
    rows = np.array([basis.index[(a, b)] for a, b in zip(new[1], new[2])], dtype=int)
    return sp.csr_matrix((amp, (rows, cols)), shape=(dim, dim))


def matrix_observable_A(basis: FockBasis) -> np.ndarray:
    """The subsystem-A observable ``K_11 / omega`` (diagonal, entries n1/omega)."""
    return np.diag(basis.n1 / basis.omega)


def is_hermitian(m: np.ndarray, rtol: float = 1e-12) -> bool:
    scale = max(np.abs(m).max(), 1e-300)
    return bool(np.abs(m - m.conj().T).max() < rtol * scale)
