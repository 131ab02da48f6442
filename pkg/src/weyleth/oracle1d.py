"""Grid check of ``|O_ij|^2 = int J W_i W_j`` for one oscillator degree of freedom.

Eigenfunctions of ``H = (p^2 + q^2)/2`` live on a uniform q-grid; Wigner
functions and their derivatives are evaluated by direct sums over the grid.
For a polynomial Weyl symbol, J is a finite sum of delta-function
derivatives, so the phase-space pairing reduces to derivatives of the Wigner
product at zero separation; nothing is approximated semiclassically.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from math import comb
from pathlib import Path

import numpy as np

from .weylcalc import OperatorWord, PhasePolynomial, evaluate, weyl_symbol

__all__ = [
    "GridWavefunction",
    "WignerGrid",
    "ho_eigenfunction",
    "default_grid",
    "wigner_transform",
    "wigner_derivative",
    "apply_word",
    "matrix_element",
    "pairing_terms",
    "IdentityCheck",
    "verify_identity",
    "verify_batch",
    "write_oracle_report",
]


@dataclass(frozen=True)
class GridWavefunction:
    q: np.ndarray
    values: np.ndarray
    hbar: float

    @property
    def step(self) -> float:
        return float(self.q[1] - self.q[0])

    def norm(self) -> float:
        return float(np.trapezoid(np.abs(self.values) ** 2, self.q))

    def derivative(self, order: int) -> np.ndarray:
        """Spectral derivative ``d^k psi / dq^k`` on the (periodic) grid."""
        if order == 0:
            return self.values
        k = 2 * np.pi * np.fft.fftfreq(self.q.size, d=self.step)
        return np.fft.ifft((1j * k) ** order * np.fft.fft(self.values))


@dataclass(frozen=True)
class WignerGrid:
    p: np.ndarray
    q: np.ndarray
    values: np.ndarray  # shape (len(p), len(q))

    def total(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.q, axis=1), self.p))

    def q_marginal(self) -> np.ndarray:
        return np.trapezoid(self.values, self.p, axis=0)

    def p_marginal(self) -> np.ndarray:
        return np.trapezoid(self.values, self.q, axis=1)


def default_grid(n_max: int, hbar: float, n: int = 256, margin: float = 7.0) -> np.ndarray:
    """Symmetric q-grid reaching ``margin`` ground-state widths past the turning point."""
    half = math.sqrt(hbar * (2 * n_max + 1)) + margin * math.sqrt(hbar)
    return np.linspace(-half, half, n)


def ho_eigenfunction(n: int, hbar: float, grid) -> GridWavefunction:
    """Normalized oscillator eigenfunction by the stable Hermite-function recurrence."""
    q = np.asarray(grid, dtype=float)
    if q.size < 256:
        raise ValueError("grid needs at least 256 points")
    need = math.sqrt(hbar * (2 * n + 1)) + 4.0 * math.sqrt(hbar)
    if min(-q[0], q[-1]) < need:
        raise ValueError(f"grid half-span must reach {need:.3g} for n={n}")
    x = q / math.sqrt(hbar)
    prev = np.zeros_like(x)
    cur = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    for k in range(1, n + 1):
        prev, cur = cur, math.sqrt(2.0 / k) * x * cur - math.sqrt((k - 1) / k) * prev
    return GridWavefunction(q, cur / hbar ** 0.25 + 0j, float(hbar))


def _wigner_kernel(psi_a: np.ndarray, psi_b: np.ndarray):
    # K[k, m] = conj(a(q_{k+m})) b(q_{k-m}), zero outside the grid
    n = psi_a.size
    m = np.arange(-(n - 1), n)
    k = np.arange(n)[:, None]
    up, dn = k + m[None, :], k - m[None, :]
    ok = (up >= 0) & (up < n) & (dn >= 0) & (dn < n)
    K = np.zeros((n, m.size), dtype=complex)
    K[ok] = np.conj(psi_a[np.where(ok, up, 0)][ok]) * psi_b[np.where(ok, dn, 0)][ok]
    return m, K


def wigner_derivative(psi: GridWavefunction, p, dq: int = 0, dp: int = 0) -> np.ndarray:
    """``d^dq/dq^dq d^dp/dp^dp W(p, q)`` on ``p x psi.q``.

    ``W(p, q) = (1/2 pi hbar) int dy psi*(q + y/2) psi(q - y/2) e^{i p y / hbar}``
    with ``y = 2 m h`` on the grid.  A p-derivative multiplies the kernel by
    ``(i y / hbar)``; q-derivatives follow from the Leibniz rule on the two
    factors, each shifted argument contributing a factor 1 (chain rule).
    """
    p = np.asarray(p, dtype=float)
    h, hb = psi.step, psi.hbar
    out = None
    for s in range(dq + 1):
        a = psi.derivative(s)
        b = psi.derivative(dq - s)
        # d/dq of conj(psi(q + y/2)) = conj(psi'), of psi(q - y/2) = psi'
        m, K = _wigner_kernel(a, b)
        term = comb(dq, s) * K
        out = term if out is None else out + term
    y = 2.0 * m * h
    if dp:
        out = out * (1j * y / hb) ** dp
    phase = np.exp(1j * np.outer(p, y) / hb)  # (np, nm)
    W = (phase @ out.T) * (2.0 * h / (2 * np.pi * hb))
    return np.real(W)


def wigner_transform(psi: GridWavefunction, p=None, check: bool = True) -> WignerGrid:
    if p is None:
        p = psi.q.copy()
    p = np.asarray(p, dtype=float)
    W = wigner_derivative(psi, p)
    wg = WignerGrid(p, psi.q, W)
    if check:
        err = np.trapezoid(np.abs(wg.q_marginal() - np.abs(psi.values) ** 2), psi.q)
        if err > 1e-4:
            raise ValueError(f"Wigner marginal mismatch {err:.2e}: p-grid too short or aliasing")
    return wg


def apply_word(word: OperatorWord, psi: GridWavefunction) -> GridWavefunction:
    """Apply an operator word (rightmost factor first) with ``p = -i hbar d/dq``."""
    if word.dim != 1:
        raise ValueError("grid oracle handles one mode")
    v = psi.values
    for fac in reversed(word.factors):
        for _ in range(fac.power):
            if fac.kind == "q":
                v = psi.q * v
            else:
                g = GridWavefunction(psi.q, v, psi.hbar)
                v = -1j * psi.hbar * g.derivative(1)
    return GridWavefunction(psi.q, word.prefactor * v, psi.hbar)


def matrix_element(word: OperatorWord, psi_i: GridWavefunction, psi_j: GridWavefunction) -> complex:
    return complex(np.trapezoid(np.conj(psi_i.values) * apply_word(word, psi_j).values, psi_i.q))


def _shift(o: PhasePolynomial, sp: float, sq: float):
    # O(p + sp*pt, q + sq*qt) as {(a, b): poly in (p, q)} with pt^a qt^b
    out: dict = {}
    for (alpha, beta, k), c in o.terms.items():
        if k:
            raise ValueError("substitute hbar before building J")
        A, B = alpha[0], beta[0]
        for a in range(A + 1):
            for b in range(B + 1):
                coef = c * comb(A, a) * comb(B, b) * sp ** a * sq ** b
                key = (a, b)
                mono = PhasePolynomial.monomial(1, {1: A - a}, {1: B - b}, coeff=coef)
                out[key] = out.get(key, PhasePolynomial.zero(1)) + mono
    return out


def pairing_terms(o_w: PhasePolynomial, o_w_adj: PhasePolynomial | None = None):
    """Coefficients ``c_ab(p, q)`` of ``pt^a qt^b`` in ``O(p+pt/2, q-qt/2) O^dag(p-pt/2, q+qt/2)``.

    ``O^dag`` has symbol ``conj(O_w)``; for Hermitian O both factors coincide.
    """
    if o_w_adj is None:
        o_w_adj = o_w.conj()
    left = _shift(o_w, 0.5, -0.5)
    right = _shift(o_w_adj, -0.5, 0.5)
    out: dict = {}
    for (a1, b1), f in left.items():
        for (a2, b2), g in right.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, PhasePolynomial.zero(1)) + f * g
    return {k: v for k, v in out.items() if v.terms}


@dataclass
class IdentityCheck:
    word: str
    i: int
    j: int
    hbar: float
    lhs: float
    rhs: float
    abs_error: float
    rel_error: float
    grid_points: int
    q_half_span: float

    def passed(self, rtol: float = 1e-3) -> bool:
        return self.rel_error < rtol


def verify_identity(word: OperatorWord | str, i: int, j: int, hbar: float = 1.0, n: int = 256,
                    grid=None, p_grid=None, cache: dict | None = None, atol: float = 1e-8) -> IdentityCheck:
    """Compare ``|<i|O|j>|^2`` with the phase-space pairing of J against ``W_i W_j``.

    With ``c_ab`` from :func:`pairing_terms`,
    ``rhs = 2 pi hbar sum_ab (-i hbar)^(a+b) int dp dq c_ab
    d^a_{q'} d^b_{p'} [W_i(p - p'/2, q - q'/2) W_j(p + p'/2, q + q'/2)]_{0}``.
    The second factor of J carries the adjoint's symbol, which is what makes
    the right side ``|O_ij|^2`` rather than ``O_ij O_ji`` for non-Hermitian O.
    ``cache`` may be shared between calls on the same grids.
    """
    if isinstance(word, str):
        word = OperatorWord.parse(word)
    if i == j:
        raise ValueError("the identity is checked for off-diagonal pairs")
    nmax = max(i, j)
    q = default_grid(nmax, hbar, n) if grid is None else np.asarray(grid, float)
    p = q.copy() if p_grid is None else np.asarray(p_grid, float)
    psi_i, psi_j = ho_eigenfunction(i, hbar, q), ho_eigenfunction(j, hbar, q)
    lhs = abs(matrix_element(word, psi_i, psi_j)) ** 2

    o_w = weyl_symbol(word).at_hbar(hbar)
    terms = pairing_terms(o_w)
    P, Q = np.meshgrid(p, q, indexing="ij")
    Z = np.stack([P, Q], axis=-1)
    if cache is None:
        cache = {}
    tag = (hbar, q.size, float(q[0]), float(q[-1]), p.size, float(p[0]), float(p[-1]))

    def dW(n_level, dq, dp):
        k = (tag, n_level, dq, dp)
        if k not in cache:
            psi = psi_i if n_level == i else psi_j
            cache[k] = wigner_derivative(psi, p, dq, dp)
        return cache[k]

    total = 0.0 + 0.0j
    for (a, b), c in terms.items():
        # a: order in pt -> d/dq' ; b: order in qt -> d/dp'
        prod = np.zeros(P.shape)
        for k in range(a + 1):
            for l in range(b + 1):
                coef = comb(a, k) * comb(b, l) * (-0.5) ** k * 0.5 ** (a - k) * (-0.5) ** l * 0.5 ** (b - l)
                prod = prod + coef * dW(i, k, l) * dW(j, a - k, b - l)
        cz = evaluate(c, Z)
        integ = np.trapezoid(np.trapezoid(cz * prod, q, axis=1), p)
        total += (-1j * hbar) ** (a + b) * integ
    rhs = float(np.real(2 * np.pi * hbar * total))
    err = abs(lhs - rhs)
    return IdentityCheck(str(word), i, j, hbar, float(lhs), rhs, err, err / max(abs(lhs), atol),
                         int(q.size), float(q[-1]))


def verify_batch(words=("q", "p", "q^2", "q p"), n_max: int = 6, hbars=(1.0, 0.5), n: int = 256):
    """All off-diagonal pairs ``i, j <= n_max`` on one grid per hbar."""
    out = []
    for hbar in hbars:
        q = default_grid(n_max, hbar, n)
        cache: dict = {}
        for w in words:
            for i in range(n_max + 1):
                for j in range(n_max + 1):
                    if i != j:
                        out.append(verify_identity(w, i, j, hbar, grid=q, cache=cache))
    return out


def write_oracle_report(path, checks) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [dict(word=c.word, i=c.i, j=c.j, hbar=c.hbar, lhs=c.lhs, rhs=c.rhs, abs_error=c.abs_error,
                 rel_error=c.rel_error, passed=c.passed(),
                 grid=dict(points=c.grid_points, q_half_span=c.q_half_span)) for c in checks]
    path.write_text(json.dumps({"schema": "oracle-report/1", "cases": rows}, indent=2))
    return path
