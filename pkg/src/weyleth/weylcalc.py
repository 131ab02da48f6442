"""Weyl/Moyal calculus on polynomial phase-space symbols.

Symbols are polynomials in momenta ``p_1..p_d`` and positions ``q_1..q_d``
whose coefficients are additionally graded by a formal power of hbar.  The
grading is kept symbolic here; a numeric hbar only enters through
:func:`evaluate` and :meth:`PhasePolynomial.at_hbar`.

Phase points are always laid out as ``(p_1, ..., p_d, q_1, ..., q_d)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "Factor",
    "OperatorWord",
    "PhasePolynomial",
    "star_product",
    "weyl_symbol",
    "weyl_order_decompose",
    "classical_limit",
    "evaluate",
    "poisson_bracket",
    "word_matrix",
    "weyl_quantize_1d",
    "ladder_qp",
]

Key = tuple[tuple[int, ...], tuple[int, ...], int]

PRUNE_RTOL = 1e-14


def _multi_indices(upper: Sequence[int]):
    return product(*(range(u + 1) for u in upper))


def _falling(n: int, m: int) -> int:
    """n (n-1) ... (n-m+1)."""
    out = 1
    for i in range(m):
        out *= n - i
    return out


class PhasePolynomial:
    """hbar-graded polynomial ``sum c * p^alpha q^beta hbar^k``.

    ``terms`` maps ``(alpha, beta, k)`` to a complex coefficient.  Zero and
    negligible coefficients (below ``1e-14 * max|c|``) are dropped on
    construction, so equality is structural.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Key, complex] | None = None, prune: bool = True):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = int(dim)
        clean: dict[Key, complex] = {}
        for (alpha, beta, k), c in (terms or {}).items():
            alpha, beta = tuple(int(a) for a in alpha), tuple(int(b) for b in beta)
            if len(alpha) != dim or len(beta) != dim:
                raise ValueError(f"multi-index length mismatch for dimension {dim}")
            if min(alpha + beta) < 0 or k < 0:
                raise ValueError("exponents and hbar power must be non-negative")
            c = complex(c)
            if c != 0:
                key = (alpha, beta, int(k))
                clean[key] = clean.get(key, 0) + c
        if prune and clean:
            cut = PRUNE_RTOL * max(abs(c) for c in clean.values())
            clean = {key: c for key, c in clean.items() if abs(c) > cut}
        self.terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "PhasePolynomial":
        return cls(dim)

    @classmethod
    def constant(cls, c: complex, dim: int, k: int = 0) -> "PhasePolynomial":
        z = (0,) * dim
        return cls(dim, {(z, z, k): c})

    @classmethod
    def hbar(cls, dim: int) -> "PhasePolynomial":
        return cls.constant(1.0, dim, k=1)

    @classmethod
    def q(cls, mode: int, dim: int, power: int = 1) -> "PhasePolynomial":
        return cls.monomial(dim, beta={mode: power})

    @classmethod
    def p(cls, mode: int, dim: int, power: int = 1) -> "PhasePolynomial":
        return cls.monomial(dim, alpha={mode: power})

    @classmethod
    def monomial(cls, dim: int, alpha: Mapping[int, int] | None = None,
                 beta: Mapping[int, int] | None = None, k: int = 0, coeff: complex = 1.0):
        """Monomial from 1-based ``{mode: exponent}`` maps."""
        a, b = [0] * dim, [0] * dim
        for mode, e in (alpha or {}).items():
            a[mode - 1] += e
        for mode, e in (beta or {}).items():
            b[mode - 1] += e
        return cls(dim, {(tuple(a), tuple(b), k): coeff})

    # -- algebra ----------------------------------------------------------
    def _check(self, other: "PhasePolynomial"):
        if not isinstance(other, PhasePolynomial):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return other

    def _coerce(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PhasePolynomial.constant(other, self.dim)
        return self._check(other)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return PhasePolynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return PhasePolynomial(self.dim, {k: -c for k, c in self.terms.items()}, prune=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Commutative (pointwise) product; use :func:`star_product` for Moyal."""
        if isinstance(other, (int, float, complex, np.number)):
            return PhasePolynomial(self.dim, {k: c * other for k, c in self.terms.items()})
        other = self._check(other)
        if other is NotImplemented:
            return other
        out: dict[Key, complex] = {}
        for (a1, b1, k1), c1 in self.terms.items():
            for (a2, b2, k2), c2 in other.terms.items():
                key = (tuple(x + y for x, y in zip(a1, a2)),
                       tuple(x + y for x, y in zip(b1, b2)), k1 + k2)
                out[key] = out.get(key, 0) + c1 * c2
        return PhasePolynomial(self.dim, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PhasePolynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def isclose(self, other: "PhasePolynomial", atol: float = 1e-12) -> bool:
        """Coefficient-wise comparison with absolute tolerance."""
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= atol for k in keys)

    def conj(self) -> "PhasePolynomial":
        return PhasePolynomial(self.dim, {k: c.conjugate() for k, c in self.terms.items()}, prune=False)

    # -- inspection -------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Key, complex]]:
        """Terms in graded-lex order of ``(|alpha|+|beta|, alpha, beta, k)``."""
        return sorted(self.terms.items(),
                      key=lambda kv: (sum(kv[0][0]) + sum(kv[0][1]), kv[0][0], kv[0][1], kv[0][2]))

    def hbar_slice(self, k: int) -> "PhasePolynomial":
        """Coefficient of hbar^k as a classical (k=0) polynomial."""
        return PhasePolynomial(self.dim, {(a, b, 0): c for (a, b, kk), c in self.terms.items() if kk == k},
                               prune=False)

    @property
    def hbar_powers(self) -> list[int]:
        return sorted({k for (_, _, k) in self.terms})

    @property
    def degree(self) -> int:
        return max((sum(a) + sum(b) for (a, b, _) in self.terms), default=0)

    def is_classical(self) -> bool:
        return all(k == 0 for (_, _, k) in self.terms)

    def at_hbar(self, hbar: float) -> "PhasePolynomial":
        """Substitute a numeric hbar, returning a purely classical polynomial."""
        out: dict[Key, complex] = {}
        for (a, b, k), c in self.terms.items():
            out[(a, b, 0)] = out.get((a, b, 0), 0) + c * hbar ** k
        return PhasePolynomial(self.dim, out)

    def diff(self, kind: str, mode: int) -> "PhasePolynomial":
        """Partial derivative with respect to ``p_mode`` or ``q_mode`` (1-based)."""
        idx = mode - 1
        out: dict[Key, complex] = {}
        for (a, b, k), c in self.terms.items():
            e = a if kind == "p" else b
            if e[idx] == 0:
                continue
            new = list(e)
            new[idx] -= 1
            key = (tuple(new), b, k) if kind == "p" else (a, tuple(new), k)
            out[key] = c * e[idx]
        return PhasePolynomial(self.dim, out, prune=False)

    def __call__(self, z, hbar: float = 0.0):
        return evaluate(self, z, hbar)

    def __repr__(self):
        if not self.terms:
            return f"PhasePolynomial(dim={self.dim}, 0)"
        parts = []
        for (a, b, k), c in self.sorted_terms():
            mono = "".join(f"p{i + 1}^{e}" if e > 1 else f"p{i + 1}" for i, e in enumerate(a) if e)
            mono += "".join(f"q{i + 1}^{e}" if e > 1 else f"q{i + 1}" for i, e in enumerate(b) if e)
            if k:
                mono += f"h^{k}" if k > 1 else "h"
            parts.append(f"({c.real:.6g}{c.imag:+.6g}j){mono}")
        return f"PhasePolynomial(dim={self.dim}, " + " + ".join(parts) + ")"

    # -- text serialization ---------------------------------------------
    def to_text(self) -> str:
        """One term per line: ``coeff_re coeff_im k alpha... beta...``."""
        lines = [f"# dim {self.dim}"]
        for (a, b, k), c in self.sorted_terms():
            lines.append(" ".join([repr(c.real), repr(c.imag), str(k), *map(str, a), *map(str, b)]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, dim: int | None = None) -> "PhasePolynomial":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = re.match(r"#\s*dim\s+(\d+)", line)
                if m:
                    dim = int(m.group(1))
                continue
            rows.append(line.split())
        if dim is None:
            if not rows:
                raise ValueError("cannot infer dimension of an empty polynomial")
            dim = (len(rows[0]) - 3) // 2
        terms: dict[Key, complex] = {}
        for r in rows:
            if len(r) != 3 + 2 * dim:
                raise ValueError(f"malformed term line: {' '.join(r)!r}")
            c = complex(float(r[0]), float(r[1]))
            k = int(r[2])
            a = tuple(int(x) for x in r[3:3 + dim])
            b = tuple(int(x) for x in r[3 + dim:])
            terms[(a, b, k)] = terms.get((a, b, k), 0) + c
        return cls(dim, terms, prune=False)


def star_product(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """Moyal product ``f * exp(i hbar/2 (<d_q . d_p> - <d_p . d_q>)) * g``.

    Terminates exactly for polynomials.  The ``n``-th order term expands as
    a sum over multi-indices ``m`` (q-derivatives of f paired with
    p-derivatives of g) and ``n`` (p-derivatives of f with q-derivatives of g).
    """
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")
    d = f.dim
    out: dict[Key, complex] = {}
    for (af, bf, kf), cf in f.terms.items():
        for (ag, bg, kg), cg in g.terms.items():
            mu = [min(x, y) for x, y in zip(bf, ag)]
            nu = [min(x, y) for x, y in zip(af, bg)]
            for m in _multi_indices(mu):
                wm = 1.0
                for i in range(d):
                    wm *= _falling(bf[i], m[i]) * _falling(ag[i], m[i]) / math.factorial(m[i])
                for n in _multi_indices(nu):
                    wn = 1.0
                    for i in range(d):
                        wn *= _falling(af[i], n[i]) * _falling(bg[i], n[i]) / math.factorial(n[i])
                    order = sum(m) + sum(n)
                    coeff = cf * cg * wm * wn * (0.5j) ** order * (-1) ** sum(n)
                    alpha = tuple(af[i] - n[i] + ag[i] - m[i] for i in range(d))
                    beta = tuple(bf[i] - m[i] + bg[i] - n[i] for i in range(d))
                    key = (alpha, beta, kf + kg + order)
                    out[key] = out.get(key, 0) + coeff
    return PhasePolynomial(d, out)


def poisson_bracket(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """``{f, g} = sum_mu df/dq_mu dg/dp_mu - df/dp_mu dg/dq_mu``."""
    out = PhasePolynomial.zero(f.dim)
    for mu in range(1, f.dim + 1):
        out = out + f.diff("q", mu) * g.diff("p", mu) - f.diff("p", mu) * g.diff("q", mu)
    return out


@dataclass(frozen=True)
class Factor:
    kind: str  # "q" or "p"
    mode: int  # 1-based
    power: int = 1

    def __post_init__(self):
        if self.kind not in ("q", "p"):
            raise ValueError(f"factor kind must be 'q' or 'p', got {self.kind!r}")
        if self.mode < 1 or self.power < 1:
            raise ValueError("mode index and exponent must be >= 1")


@dataclass(frozen=True)
class OperatorWord:
    """Ordered product of powers of ``q_mu``/``p_mu`` with a scalar prefactor."""

    factors: tuple[Factor, ...] = ()
    dim: int = 1
    prefactor: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for fac in self.factors:
            if fac.mode > self.dim:
                raise ValueError(f"mode {fac.mode} outside 1..{self.dim}")

    @classmethod
    def parse(cls, text: str, dim: int | None = None, prefactor: complex = 1.0) -> "OperatorWord":
        """Parse e.g. ``"q p q p"`` or ``"q1^2 p2 q1"``; mode defaults to 1."""
        factors = []
        for tok in text.split():
            m = re.fullmatch(r"([qp])(\d*)(?:\^(\d+))?", tok)
            if m is None:
                raise ValueError(f"cannot parse operator factor {tok!r}")
            factors.append(Factor(m.group(1), int(m.group(2) or 1), int(m.group(3) or 1)))
        if dim is None:
            dim = max((f.mode for f in factors), default=1)
        return cls(tuple(factors), dim, prefactor)

    def adjoint(self) -> "OperatorWord":
        return OperatorWord(tuple(reversed(self.factors)), self.dim, complex(self.prefactor).conjugate())

    def is_self_adjoint(self) -> bool:
        return self.adjoint() == self

    def classical(self) -> PhasePolynomial:
        """Direct substitution of classical variables (ordering ignored)."""
        out = PhasePolynomial.constant(self.prefactor, self.dim)
        for fac in self.factors:
            out = out * _generator(fac, self.dim)
        return out

    def __str__(self):
        return " ".join(f"{f.kind}{f.mode}" + (f"^{f.power}" if f.power > 1 else "") for f in self.factors) or "1"


def _generator(fac: Factor, dim: int) -> PhasePolynomial:
    ctor = PhasePolynomial.q if fac.kind == "q" else PhasePolynomial.p
    return ctor(fac.mode, dim, fac.power)


def weyl_symbol(word: OperatorWord) -> PhasePolynomial:
    """Weyl symbol of an operator word, as a left fold of star products."""
    out = PhasePolynomial.constant(word.prefactor, word.dim)
    for fac in word.factors:
        out = star_product(out, _generator(fac, word.dim))
    return out


def weyl_order_decompose(word: OperatorWord) -> list[tuple[int, PhasePolynomial]]:
    """Split the Weyl symbol by hbar power.

    Entry ``k`` is the classical polynomial multiplying ``hbar^k``; each one is
    the symbol of a Weyl-ordered operator.
    """
    sym = weyl_symbol(word)
    return [(k, sym.hbar_slice(k)) for k in sym.hbar_powers]


def classical_limit(f: PhasePolynomial) -> tuple[PhasePolynomial, int | None]:
    """Return ``(k=0 slice, m)`` with ``m`` the lowest nonzero hbar power > 0."""
    higher = [k for k in f.hbar_powers if k > 0]
    return f.hbar_slice(0), (min(higher) if higher else None)


def evaluate(f: PhasePolynomial, z, hbar: float = 0.0):
    """Evaluate at phase point(s) ``z = (p_1..p_d, q_1..q_d)``; broadcasts over leading axes."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != 2 * f.dim:
        raise ValueError(f"phase point has {z.shape[-1]} components, expected {2 * f.dim}")
    d = f.dim
    out = np.zeros(z.shape[:-1], dtype=complex)
    for (a, b, k), c in f.terms.items():
        term = c * hbar ** k
        for i in range(d):
            if a[i]:
                term = term * z[..., i] ** a[i]
            if b[i]:
                term = term * z[..., d + i] ** b[i]
        out = out + term
    return out[()] if out.ndim == 0 else out


# -- truncated-matrix representation (1 DOF) ------------------------------

def ladder_qp(n: int, hbar: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Truncated oscillator-basis matrices of q and p (unit mass and frequency)."""
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    q = np.sqrt(hbar / 2) * (a + a.T)
    p = 1j * np.sqrt(hbar / 2) * (a.T - a)
    return q.astype(complex), p


def word_matrix(word: OperatorWord, n: int = 64, hbar: float = 1.0) -> np.ndarray:
    """Matrix of a one-mode word built from truncated q, p."""
    if word.dim != 1:
        raise ValueError("truncated-matrix representation implemented for one mode only")
    q, p = ladder_qp(n, hbar)
    out = word.prefactor * np.eye(n, dtype=complex)
    for fac in word.factors:
        out = out @ np.linalg.matrix_power(q if fac.kind == "q" else p, fac.power)
    return out


def weyl_quantize_1d(f: PhasePolynomial, n: int = 64, hbar: float = 1.0) -> np.ndarray:
    """Weyl quantization of a one-mode symbol on the truncated oscillator basis.

    Each monomial ``q^b p^a`` maps to ``2^-b sum_k C(b,k) q^(b-k) p^a q^k``.
    """
    if f.dim != 1:
        raise ValueError("one-mode symbols only")
    q, p = ladder_qp(n, hbar)
    eye = np.eye(n, dtype=complex)
    out = np.zeros((n, n), dtype=complex)
    for ((a,), (b,), k), c in f.terms.items():
        pa = np.linalg.matrix_power(p, a)
        mono = np.zeros_like(out)
        for j in range(b + 1):
            left = np.linalg.matrix_power(q, b - j) if b - j else eye
            right = np.linalg.matrix_power(q, j) if j else eye
            mono += math.comb(b, j) * left @ pa @ right
        out += c * hbar ** k * mono / 2 ** b
    return out

