"""Three-orbital Lipkin-Meshkov-Glick model, quantum and classical.

The deformation ``a`` multiplies the mode-1 oscillator term and the whole
perturbation on both sides:  ``H(a) = a eps1 K11 + eps2 K22 + a lambda V``.
Classical parameters (primed) are Omega-independent; the quantum ones are
``eps_r = eps_r' / Omega`` and ``mu_t = mu_t' / Omega**2``, and
``hbar_eff = 1 / Omega``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .basis import FockBasis, build_basis, sparse_K

__all__ = [
    "DomainError",
    "LmgParams",
    "load_params",
    "build_hamiltonian",
    "classical_H",
    "grad_H",
    "grad_A",
    "G_of",
]

SQRT2 = np.sqrt(2.0)
_CONFIG_KEYS = {"omega", "a", "lambda", "eps1p", "eps2p", "mu1p", "mu2p", "mu3p", "mu4p"}


class DomainError(ValueError):
    """Phase point outside the physical ball G <= 2."""


@dataclass(frozen=True)
class LmgParams:
    eps1p: float = 44.00
    eps2p: float = 64.40
    mu1p: float = 18.56
    mu2p: float = 27.40
    mu3p: float = 25.28
    mu4p: float = 7.024
    lam: float = 2.0
    a: float = 1.0
    omega: int = 60

    def __post_init__(self):
        if int(self.omega) < 1:
            raise ValueError("omega must be a positive integer")
        object.__setattr__(self, "omega", int(self.omega))

    @property
    def hbar(self) -> float:
        return 1.0 / self.omega

    @property
    def eps(self) -> tuple[float, float]:
        return self.eps1p * self.hbar, self.eps2p * self.hbar

    @property
    def mu(self) -> tuple[float, float, float, float]:
        h2 = self.hbar ** 2
        return tuple(m * h2 for m in (self.mu1p, self.mu2p, self.mu3p, self.mu4p))

    def with_(self, **kw) -> "LmgParams":
        return replace(self, **kw)

    def to_config(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_config(cls, cfg: dict) -> "LmgParams":
        cfg = {k: v for k, v in cfg.items() if k != "schema"}
        unknown = set(cfg) - _CONFIG_KEYS
        if unknown:
            raise KeyError(f"unknown LMG parameter key(s): {sorted(unknown)}")
        cfg = dict(cfg)
        if "lambda" in cfg:
            cfg["lam"] = cfg.pop("lambda")
        return cls(**cfg)


def load_params(name_or_path: str = "lmg-default", **overrides) -> LmgParams:
    """Load a parameter file by bundled name (``lmg-default``) or path."""
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        cfg = json.loads(path.read_text())
    else:
        res = resources.files("weyleth") / "data" / f"{name_or_path}.json"
        cfg = json.loads(res.read_text())
    return LmgParams.from_config(cfg).with_(**overrides)


def build_hamiltonian(params: LmgParams, basis: FockBasis | None = None) -> np.ndarray:
    """Dense real-symmetric matrix of ``a eps1 K11 + eps2 K22 + a lambda sum_t mu_t V_t``."""
    if basis is None:
        basis = build_basis(params.omega)
    if basis.omega != params.omega:
        raise ValueError(f"basis omega {basis.omega} != params omega {params.omega}")
    K = {(r, s): sparse_K(r, s, basis) for r in range(3) for s in range(3) if r != s}
    n1, n2 = basis.n1.astype(float), basis.n2.astype(float)
    e1, e2 = params.eps
    m1, m2, m3, m4 = params.mu
    V = (m1 * (K[1, 0] @ K[1, 0] + K[0, 1] @ K[0, 1])
         + m2 * (K[2, 0] @ K[2, 0] + K[0, 2] @ K[0, 2])
         + m3 * (K[2, 1] @ K[2, 0] + K[0, 2] @ K[1, 2])
         + m4 * (K[1, 2] @ K[1, 0] + K[0, 1] @ K[2, 1]))
    H = params.a * params.lam * V.toarray()
    H[np.diag_indices_from(H)] += params.a * e1 * n1 + e2 * n2
    return H


def G_of(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return np.sum(z * z, axis=-1)


def _unpack(z, check: bool):
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != 4:
        raise ValueError("LMG phase points are (p1, p2, q1, q2)")
    G = G_of(z)
    if check and np.any(G > 2.0 + 1e-12):
        raise DomainError("phase point outside the physical region G <= 2")
    return z[..., 0], z[..., 1], z[..., 2], z[..., 3], np.clip(1.0 - G / 2.0, 0.0, None)


def classical_H(params: LmgParams, z, check: bool = True):
    """Classical energy at ``z = (p1, p2, q1, q2)``; broadcasts over leading axes."""
    p1, p2, q1, q2, s = _unpack(z, check)
    r = np.sqrt(s)
    B1, B2 = q1 ** 2 - p1 ** 2, q2 ** 2 - p2 ** 2
    A3 = B2 * q1 - 2 * q2 * p1 * p2
    A4 = B1 * q2 - 2 * q1 * p1 * p2
    V = (params.mu1p * B1 * s + params.mu2p * B2 * s
         + (params.mu3p * A3 + params.mu4p * A4) * r / SQRT2)
    H0a = 0.5 * params.eps1p * (p1 ** 2 + q1 ** 2)
    H0b = 0.5 * params.eps2p * (p2 ** 2 + q2 ** 2)
    return params.a * H0a + H0b + params.a * params.lam * V


def grad_H(params: LmgParams, z, check: bool = True) -> np.ndarray:
    """Analytic gradient ``(dH/dp1, dH/dp2, dH/dq1, dH/dq2)``."""
    p1, p2, q1, q2, s = _unpack(z, check)
    r = np.sqrt(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv2r = np.where(r > 0, 0.5 / r, np.inf)
    B1, B2 = q1 ** 2 - p1 ** 2, q2 ** 2 - p2 ** 2
    A3 = B2 * q1 - 2 * q2 * p1 * p2
    A4 = B1 * q2 - 2 * q1 * p1 * p2
    c3, c4 = params.mu3p / SQRT2, params.mu4p / SQRT2
    mu1, mu2 = params.mu1p, params.mu2p

    # partials of (B1, B2, A3, A4) w.r.t. p1, p2, q1, q2
    dB1 = (-2 * p1, 0 * p1, 2 * q1, 0 * q1)
    dB2 = (0 * p2, -2 * p2, 0 * q2, 2 * q2)
    dA3 = (-2 * q2 * p2, -2 * p2 * q1 - 2 * q2 * p1, B2, 2 * q2 * q1 - 2 * p1 * p2)
    dA4 = (-2 * p1 * q2 - 2 * q1 * p2, -2 * q1 * p1, 2 * q1 * q2 - 2 * p1 * p2, B1)
    coords = (p1, p2, q1, q2)
    lin = (params.a * params.eps1p, params.eps2p, params.a * params.eps1p, params.eps2p)
    out = []
    for i, x in enumerate(coords):
        dV = (mu1 * (dB1[i] * s - B1 * x) + mu2 * (dB2[i] * s - B2 * x)
              + c3 * dA3[i] * r + c4 * dA4[i] * r)
        with np.errstate(invalid="ignore"):
            dV = dV - (c3 * A3 + c4 * A4) * x * inv2r
        out.append(lin[i] * x + params.a * params.lam * dV)
    return np.stack(out, axis=-1)


def grad_A(params: LmgParams, z, check: bool = True) -> np.ndarray:
    """Subsystem-A gradient ``(dH/dp1, dH/dq1)``."""
    g = grad_H(params, z, check)
    return g[..., [0, 2]]
