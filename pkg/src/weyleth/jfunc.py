"""The bilinear phase-space convolution J and its hbar-free form J~.

For a classical symbol ``O`` and base point ``(p, q)``::

    J~(X1, X2) = int dpt dqt exp(-i qt.X1) exp(-i pt.X2)
                 O(p + pt/2, q - qt/2) O(p - pt/2, q + qt/2)

and ``J(p', q') = (2 pi hbar)^-d J~(p'/hbar, q'/hbar)``.  On a box domain the
symbol is cut off outside the box, so each tilde variable ranges over a
symmetric interval and the integral is a finite sum of products of
one-dimensional integrals ``int_{-L}^{L} x^n exp(-i k x) dx``, evaluated in
closed form.  Unbounded symbols give distributions (sums of derivatives of
delta functions), represented symbolically by :class:`DistributionalJ`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .weylcalc import PhasePolynomial, evaluate

__all__ = [
    "RegionUnbounded",
    "fourier_monomial",
    "monomial_table",
    "product_expansion",
    "box_half_ranges",
    "jtilde_values",
    "JTilde",
    "JEvaluation",
    "jtilde_eval",
    "j_value",
    "DistributionalJ",
    "j_unbounded",
    "j_analytic",
    "momentum_box_closed_form",
    "pq_box_closed_form",
    "pair_gaussian_fourier",
    "gaussian_derivative_at_zero",
    "region_radius",
    "region_width",
    "mean_width",
    "evaluate_region",
    "uniform_directions",
]

TWO_PI = 2.0 * np.pi


class RegionUnbounded(RuntimeError):
    """The threshold region does not close within the scanned range."""


# ---------------------------------------------------------------------------
# one-dimensional building block


def _series_threshold(n: int) -> float:
    return max(4.0, n + 2.0)


def monomial_table(nmax: int, L, k) -> np.ndarray:
    """Real table ``G[n]`` with ``int_{-L}^{L} x^n e^{-ikx} dx = (-i)^(n mod 2) G[n]``.

    Even orders are cosine integrals and odd orders sine integrals over the
    symmetric interval.  On the unit interval, with ``t = k L``,
    ``c_n = sin t / t - (n/t) s_{n-1}`` and ``s_n = -cos t / t + (n/t) c_{n-1}``
    (``c_0 = sin t / t``, ``s_0 = (1 - cos t)/t``) for large ``|t|``; small
    ``|t|`` uses the power series.  Results are rescaled by ``L^(n+1)``.
    """
    L = np.asarray(L, dtype=float)
    k = np.asarray(k, dtype=float)
    L, k = np.broadcast_arrays(L, k)
    shape = L.shape
    L, k = L.reshape(-1), k.reshape(-1)
    t = k * L
    G = np.empty((nmax + 1, t.size))
    thr = _series_threshold(nmax)
    small = np.abs(t) <= thr

    if np.any(small):
        ts = t[small]
        t2 = ts * ts
        n_terms = int(2.72 * thr) + 24
        for n in range(nmax + 1):
            # even n: 2 sum (-1)^m t^2m / ((2m)! (n+2m+1)); odd n: 2 sum (-1)^m t^(2m+1) / ((2m+1)! (n+2m+2))
            acc = np.zeros(ts.shape)
            term = np.ones(ts.shape) if n % 2 == 0 else ts.copy()
            j0 = 0 if n % 2 == 0 else 1
            for m in range(n_terms):
                j = j0 + 2 * m
                acc += term / (n + j + 1)
                term = -term * t2 / ((j + 1) * (j + 2))
            G[n][small] = 2.0 * acc

    big = ~small
    if np.any(big):
        tb = t[big]
        sn, cs = np.sin(tb), np.cos(tb)
        c = sn / tb
        sv = (1.0 - cs) / tb
        G[0][big] = 2.0 * c
        for n in range(1, nmax + 1):
            c, sv = sn / tb - (n / tb) * sv, -cs / tb + (n / tb) * c
            G[n][big] = 2.0 * (c if n % 2 == 0 else sv)

    Lp = np.ones(t.shape)
    for n in range(nmax + 1):
        Lp = Lp * L
        G[n] *= Lp
    return G.reshape((nmax + 1,) + shape)


def fourier_monomial(n: int, L, k) -> np.ndarray:
    """``int_{-L}^{L} x^n exp(-i k x) dx`` for arrays ``L >= 0`` and ``k``."""
    G = monomial_table(n, L, k)[n]
    return G * (-1j) ** (n % 2)


# ---------------------------------------------------------------------------
# symbolic expansion of O(+)O(-) in the tilde variables


def _shifted(o: PhasePolynomial, sp: float, sq: float) -> PhasePolynomial:
    """``O(p + sp*pt, q + sq*qt)`` as a polynomial in (p, pt; q, qt), dim 2d."""
    d = o.dim
    D = 2 * d
    out = PhasePolynomial.zero(D)
    lin_p = [PhasePolynomial.p(mu + 1, D) + sp * PhasePolynomial.p(mu + 1 + d, D) for mu in range(d)]
    lin_q = [PhasePolynomial.q(mu + 1, D) + sq * PhasePolynomial.q(mu + 1 + d, D) for mu in range(d)]
    for (alpha, beta, k), c in o.terms.items():
        if k:
            raise ValueError("J~ takes a classical symbol; substitute hbar first (PhasePolynomial.at_hbar)")
        mono = PhasePolynomial.constant(c, D)
        for mu in range(d):
            for _ in range(alpha[mu]):
                mono = mono * lin_p[mu]
            for _ in range(beta[mu]):
                mono = mono * lin_q[mu]
        out = out + mono
    return out


def product_expansion(o: PhasePolynomial) -> list[tuple[tuple[int, ...], tuple[int, ...], PhasePolynomial]]:
    """Group ``O(p+pt/2, q-qt/2) O(p-pt/2, q+qt/2)`` by tilde exponents.

    Returns ``[(a, b, C_ab)]`` meaning ``sum C_ab(p, q) pt^a qt^b``.  Only even
    ``|a| + |b|`` survive.
    """
    return _product_expansion_cached(o.to_text(), o.dim)


@lru_cache(maxsize=64)
def _product_expansion_cached(text: str, d: int):
    o = PhasePolynomial.from_text(text, d)
    prod = _shifted(o, 0.5, -0.5) * _shifted(o, -0.5, 0.5)
    groups: dict[tuple, dict] = {}
    for (alpha, beta, _), c in prod.terms.items():
        key = (alpha[d:], beta[d:])
        base = (alpha[:d], beta[:d], 0)
        groups.setdefault(key, {})[base] = c
    return [(a, b, PhasePolynomial(d, terms)) for (a, b), terms in sorted(groups.items())]


# ---------------------------------------------------------------------------
# box-domain evaluator


def box_half_ranges(points, box) -> tuple[np.ndarray, np.ndarray]:
    """Half-lengths of the tilde-variable intervals at base point(s).

    ``box`` has shape ``(2d, 2)`` (or broadcastable ``(..., 2d, 2)``) giving
    ``[lo, hi]`` for ``(p_1..p_d, q_1..q_d)``.  Requiring both arguments
    ``x +- xt/2`` inside ``[lo, hi]`` gives ``|xt| <= 2 min(hi - x, x - lo)``.
    """
    points = np.asarray(points, dtype=float)
    box = np.asarray(box, dtype=float)
    lo, hi = box[..., 0], box[..., 1]
    half = 2.0 * np.minimum(hi - points, points - lo)
    half = np.clip(half, 0.0, None)
    d = points.shape[-1] // 2
    return half[..., :d], half[..., d:]


def jtilde_values(o: PhasePolynomial, points, X, box) -> np.ndarray:
    """Vectorized exact J~ on a box domain.

    ``points``, ``X`` broadcast over leading axes with last axis ``2d``;
    ``X = (X1, X2)`` where ``X1`` pairs with ``qt`` and ``X2`` with ``pt``.
    """
    d = o.dim
    points = np.asarray(points, dtype=float)
    X = np.asarray(X, dtype=float)
    Lp, Lq = box_half_ranges(points, box)
    X1, X2 = X[..., :d], X[..., d:]
    shape = np.broadcast_shapes(points.shape[:-1], X.shape[:-1], Lp.shape[:-1])
    total = np.zeros(shape, dtype=complex)
    nmax = 2 * o.degree
    tabs_p = [monomial_table(nmax, Lp[..., mu], X2[..., mu]) for mu in range(d)]
    tabs_q = [monomial_table(nmax, Lq[..., mu], X1[..., mu]) for mu in range(d)]

    for a, b, coeff in product_expansion(o):
        term = evaluate(coeff, points)
        if not np.iscomplexobj(term) or not np.any(term.imag):
            term = np.real(term)
        odd = 0
        for mu in range(d):
            term = term * tabs_p[mu][a[mu]] * tabs_q[mu][b[mu]]
            odd += a[mu] % 2 + b[mu] % 2
        total = total + term * (-1) ** (odd // 2)
    return total.real


@dataclass
class JTilde:
    """J~ at a fixed base point for a classical symbol on a box domain."""

    o_cl: PhasePolynomial
    point: np.ndarray
    box: np.ndarray | None = None
    _peak: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        self.point = np.asarray(self.point, dtype=float)
        if self.point.shape != (2 * self.o_cl.dim,):
            raise ValueError("base point must have 2d components")
        if not self.o_cl.is_classical():
            raise ValueError("J~ takes a classical (k=0) symbol")
        if self.box is not None:
            self.box = np.broadcast_to(np.asarray(self.box, dtype=float), (2 * self.o_cl.dim, 2)).copy()

    @property
    def dim(self) -> int:
        return self.o_cl.dim

    @classmethod
    def on_cube(cls, o_cl: PhasePolynomial, point, half_width: float = 1.0) -> "JTilde":
        box = np.tile([-half_width, half_width], (2 * o_cl.dim, 1))
        return cls(o_cl, point, box)

    def __call__(self, X) -> np.ndarray:
        if self.box is None:
            raise ValueError("unbounded domain: J~ is a distribution, use j_unbounded()")
        return jtilde_values(self.o_cl, self.point, X, self.box)

    def support_scale(self) -> float:
        """Smallest tilde half-range; J~ varies on scale ~1/scale in X'."""
        Lp, Lq = box_half_ranges(self.point, self.box)
        return float(np.min(np.concatenate([Lp, Lq])))

    def peak(self, n_probe: int = 256, seed: int = 0) -> tuple[float, np.ndarray]:
        """Locate the maximum of J~; X' = 0 is tried first and then verified."""
        if self._peak is not None:
            return self._peak
        D = 2 * self.dim
        x0 = np.zeros(D)
        v0 = float(self(x0))
        scale = 1.0 / max(self.support_scale(), 1e-12)
        rng = np.random.default_rng(seed)
        probe = rng.normal(size=(n_probe, D)) * scale * rng.uniform(0.05, 3.0, size=(n_probe, 1))
        vals = self(probe)
        best = int(np.argmax(vals))
        if vals[best] > v0 * (1 + 1e-12) and vals[best] > 0:
            # off-origin maximum: coarse grid refinement around the best probe
            from scipy.optimize import minimize
            res = minimize(lambda x: -float(self(x)), probe[best], method="Nelder-Mead",
                           options={"xatol": 1e-10 * scale, "fatol": 1e-14 * abs(vals[best])})
            self._peak = (float(-res.fun), res.x)
        else:
            self._peak = (v0, x0)
        return self._peak


def jtilde_eval(jt: JTilde, X) -> np.ndarray:
    return jt(X)


def j_value(jt: JTilde, pprime, qprime, hbar: float) -> np.ndarray:
    """Phase-space J at ``(p', q')``: ``(2 pi hbar)^-d J~((p', q') / hbar)``."""
    X = np.concatenate([np.atleast_1d(pprime), np.atleast_1d(qprime)], axis=-1) / hbar
    return jt(X) / (TWO_PI * hbar) ** jt.dim


# ---------------------------------------------------------------------------
# distributional forms


def gaussian_derivative_at_zero(order: int, sigma: float) -> float:
    """``d^n/dx^n exp(-x^2 / (2 sigma^2))`` at x = 0."""
    if order % 2:
        return 0.0
    m = order // 2
    return (-1) ** m * math.prod(range(1, order, 2)) / sigma ** order


@dataclass
class DistributionalJ:
    """``J(p', q') = regular(p', q') * prod delta(regular-axis complement) + sum of delta terms``.

    ``deltas`` entries are ``(coeff, np_orders, nq_orders)`` meaning
    ``coeff * prod_mu delta^(np_mu)(p'_mu) delta^(nq_mu)(q'_mu)``.
    ``regular`` (optional) is a callable of ``(p'_A, q'_A)`` over the axes in
    ``regular_axes``, multiplied by ``regular_weight * prod delta`` over the rest.
    """

    dim: int
    deltas: list = field(default_factory=list)
    regular: Callable | None = None
    regular_axes: tuple[int, ...] = ()
    regular_weight: float = 1.0

    def pair_gaussian(self, sigma: float, n_grid: int = 2001, span: float = 8.0) -> float:
        """Pair against ``prod exp(-(p'^2 + q'^2) / (2 sigma^2))`` over all 2d axes."""
        total = 0.0
        for coeff, n_p, n_q in self.deltas:
            # int delta^(n)(x) phi(x) dx = (-1)^n phi^(n)(0)
            val = coeff
            for n in (*n_p, *n_q):
                val *= (-1) ** n * gaussian_derivative_at_zero(n, sigma)
            total += val
        if self.regular is not None:
            x = np.linspace(-span * sigma, span * sigma, n_grid)
            A = len(self.regular_axes)
            grids = np.meshgrid(*([x] * (2 * A)), indexing="ij")
            pp = np.stack(grids[:A], axis=-1)
            qq = np.stack(grids[A:], axis=-1)
            vals = self.regular(pp, qq)
            w = np.exp(-sum(g ** 2 for g in grids) / (2 * sigma ** 2))
            integrand = vals * w
            for _ in range(2 * A):
                integrand = np.trapezoid(integrand, x, axis=0)
            total += self.regular_weight * float(np.real(integrand))
        return float(np.real(total))


def j_unbounded(o: PhasePolynomial, point, hbar: float) -> DistributionalJ:
    """J for a polynomial symbol on unbounded phase space.

    ``int x^n exp(-i x k) dx = 2 pi i^n delta^(n)(k)`` turns every monomial
    ``C_ab pt^a qt^b`` into ``(2 pi hbar)^d C_ab (i hbar)^(|a|+|b|)
    delta^(a)(q') delta^(b)(p')``.
    """
    point = np.asarray(point, dtype=float)
    d = o.dim
    out = DistributionalJ(d)
    for a, b, coeff in product_expansion(o):
        c = complex(evaluate(coeff, point))
        order = sum(a) + sum(b)
        val = (TWO_PI * hbar) ** d * c * (1j * hbar) ** order
        if abs(val) > 0:
            out.deltas.append((val.real if abs(val.imag) < 1e-15 * abs(val) else val, tuple(b), tuple(a)))
    return out


def _g(x):
    return 1.0 - np.abs(x)


def momentum_box_closed_form(p, q, pprime, qprime, hbar: float):
    """Closed-form J_A for the symbol ``p`` on the unit box (one mode)."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    pp, qp = np.asarray(pprime, float), np.asarray(qprime, float)
    gp, gq = _g(p), _g(q)
    s1 = np.sin(2 * gp * qp / hbar)
    c1 = np.cos(2 * gp * qp / hbar)
    first = (((2 * np.abs(p) - 1) + hbar ** 2 / (2 * qp ** 2)) * s1 - hbar / qp * gp * c1) / (np.pi * qp)
    second = np.sin(2 * gq * pp / hbar) / (np.pi * pp)
    return TWO_PI * hbar * first * second


def _F(a, b, hbar):
    gb = _g(b)
    return (gb * np.cos(2 * gb * a / hbar) - (hbar / (2 * a) + 1j * b) * np.sin(2 * gb * a / hbar)) / (np.pi * a)


def _sinc_pair(x, a, hbar):
    return np.sin(2 * _g(x) * a / hbar) / (np.pi * a)


def _quad_pair(x, a, hbar):
    gx = _g(x)
    s = np.sin(2 * gx * a / hbar)
    c = np.cos(2 * gx * a / hbar)
    return (((2 * np.abs(x) - 1) + hbar ** 2 / (2 * a ** 2)) * s - hbar / a * gx * c) / (np.pi * a)


def pq_box_closed_form(point, pprime, qprime, hbar: float, cross_terms: bool = True):
    """Closed-form J for ``O = sum_mu p_mu q_mu`` on the unit box.

    The mu != nu cross terms are included when ``cross_terms`` is set; they
    are the less-tested part of this expression.
    """
    point = np.asarray(point, float)
    d = point.shape[-1] // 2
    p, q = point[..., :d], point[..., d:]
    pp, qp = np.asarray(pprime, float), np.asarray(qprime, float)
    plain = [_sinc_pair(p[..., m], qp[..., m], hbar) * _sinc_pair(q[..., m], pp[..., m], hbar) for m in range(d)]
    total = 0.0
    for mu in range(d):
        term = _quad_pair(p[..., mu], qp[..., mu], hbar) * _quad_pair(q[..., mu], pp[..., mu], hbar)
        for nu in range(d):
            if nu != mu:
                term = term * plain[nu]
        total = total + term
    if cross_terms:
        for mu in range(d):
            for nu in range(d):
                if nu == mu:
                    continue
                f = (_F(qp[..., mu], p[..., mu], hbar) * np.conj(_F(pp[..., mu], q[..., mu], hbar))
                     * np.conj(_F(qp[..., nu], p[..., nu], hbar)) * _F(pp[..., nu], q[..., nu], hbar))
                term = f.real
                for lam in range(d):
                    if lam not in (mu, nu):
                        term = term * plain[lam]
                total = total + term
    return (TWO_PI * hbar) ** d * total


def j_analytic(kind: str, point, hbar: float, dim: int = 1) -> DistributionalJ:
    """Closed-form J for the worked examples.

    ``q1_unbounded``: symbol ``q_1``, unbounded phase space (pure deltas).
    ``p1_box``: symbol ``p_1`` on the unit box; regular in mode 1, deltas in
    the remaining modes.  ``pq_box``: symbol ``sum p_mu q_mu`` on the unit box,
    regular in every mode.
    """
    point = np.asarray(point, dtype=float)
    if point.shape != (2 * dim,):
        raise ValueError(f"point must have {2 * dim} components")
    d = dim
    if kind == "q1_unbounded":
        return j_unbounded(PhasePolynomial.q(1, d), point, hbar)
    if np.any(np.abs(point) > 1):
        raise ValueError(f"{kind}: base point must satisfy |p|, |q| <= 1")
    p1, q1 = point[0], point[d]
    if kind == "p1_box":
        def reg(pp, qq):
            return momentum_box_closed_form(p1, q1, pp[..., 0], qq[..., 0], hbar)
        return DistributionalJ(d, regular=reg, regular_axes=(0,), regular_weight=(TWO_PI * hbar) ** (d - 1))
    if kind == "pq_box":
        def reg(pp, qq):
            return pq_box_closed_form(point, pp, qq, hbar)
        return DistributionalJ(d, regular=reg, regular_axes=tuple(range(d)))
    raise ValueError(f"unknown closed-form kind {kind!r}")


def pair_gaussian_fourier(o: PhasePolynomial, point, hbar: float, sigma: float, box=None) -> float:
    """Pair J with ``prod exp(-(p'^2+q'^2)/(2 sigma^2))`` on the Fourier side.

    Integrating the test function first leaves
    ``(2 pi hbar)^-d (2 pi sigma^2)^d int O(+)O(-) exp(-sigma^2 |xt|^2 / (2 hbar^2))``
    over the tilde box, and each axis is an incomplete gamma function.
    Unbounded axes (``box is None`` or infinite bounds) use the full line.
    """
    d = o.dim
    point = np.asarray(point, dtype=float)
    if box is None:
        box = np.tile([-np.inf, np.inf], (2 * d, 1))
    with np.errstate(invalid="ignore"):
        Lp, Lq = box_half_ranges(point, box)
    s2 = (hbar / sigma) ** 2

    def axis(n, L):
        if n % 2:
            return 0.0
        z = (n + 1) / 2
        if np.isinf(L):
            return (2 * s2) ** z * special.gamma(z)
        return (2 * s2) ** z * special.gamma(z) * special.gammainc(z, L * L / (2 * s2))

    total = 0.0
    for a, b, coeff in product_expansion(o):
        c = complex(evaluate(coeff, point))
        val = c
        for mu in range(d):
            val *= axis(a[mu], Lp[mu]) * axis(b[mu], Lq[mu])
        total += val
    return float(np.real(total * (TWO_PI * sigma ** 2) ** d / (TWO_PI * hbar) ** d))


# ---------------------------------------------------------------------------
# threshold regions


def uniform_directions(n: int, dim: int, seed: int | None = 0) -> np.ndarray:
    """``n`` directions uniform on the unit sphere in R^dim."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _ray_set(dim: int, n_rays: int | None) -> np.ndarray:
    if dim == 2:
        n = n_rays or 720
        phi = np.linspace(0, 2 * np.pi, n, endpoint=False)
        return np.stack([np.cos(phi), np.sin(phi)], axis=1)
    n = n_rays or 4000
    return uniform_directions(n, dim, seed=12345)


def region_radius(jt: JTilde, rays, eps: float = 0.5, t_max: float | None = None,
                  n_coarse: int = 400, tol: float = 1e-10) -> np.ndarray:
    """Outermost distance along each ray at which ``J~ >= eps * J~_max``.

    A coarse scan over ``[0, t_max]`` brackets the last crossing, which is
    then refined by bisection.  Raises :class:`RegionUnbounded` if the
    threshold is still met at ``t_max``.
    """
    if not 0 < eps < 1:
        raise ValueError("threshold eps must lie in (0, 1)")
    rays = np.atleast_2d(np.asarray(rays, dtype=float))
    jmax, xpk = jt.peak()
    thr = eps * jmax
    if t_max is None:
        t_max = 40.0 / max(jt.support_scale(), 1e-12)
    t = np.linspace(0.0, t_max, n_coarse + 1)
    vals = jt(xpk[None, None, :] + t[None, :, None] * rays[:, None, :])
    above = vals >= thr
    if np.any(above[:, -1]):
        raise RegionUnbounded(f"J~ >= {eps} * max still holds at |X'| = {t_max:g}")
    # last index above threshold on each ray
    last = above.shape[1] - 1 - np.argmax(above[:, ::-1], axis=1)
    lo = t[last].copy()
    hi = t[last + 1].copy()
    for _ in range(int(np.ceil(np.log2(max(t_max / n_coarse, tol) / tol))) + 1):
        mid = 0.5 * (lo + hi)
        ok = jt(xpk[None, :] + mid[:, None] * rays) >= thr
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return 0.5 * (lo + hi)


def _support(radii, rays, directions):
    proj = directions @ rays.T  # (n_dir, n_rays)
    return np.max(radii[None, :] * proj, axis=1)


def region_width(jt: JTilde, direction, eps: float = 0.5, n_rays: int | None = None, **kw) -> float:
    """Width of ``{J~ >= eps J~_max}`` along ``direction`` (support-function form).

    The width is ``h(u) + h(-u)`` with ``h`` the support function, which by
    the evenness of J~ equals ``2 h(u)``.
    """
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    rays = _ray_set(u.size, n_rays)
    radii = region_radius(jt, rays, eps, **kw)
    return float(_support(radii, rays, u[None, :])[0] + _support(radii, rays, -u[None, :])[0])


@dataclass
class JEvaluation:
    peak: float
    widths: np.ndarray
    mean_width: float
    stderr: float
    epsilon: float
    directions: np.ndarray = field(repr=False)


def evaluate_region(jt: JTilde, eps: float = 0.5, n_directions: int = 64, seed: int = 0,
                    n_rays: int | None = None, **kw) -> JEvaluation:
    """Peak, per-direction widths and their mean for a J~ region."""
    if n_directions < 32:
        raise ValueError("n_directions must be >= 32")
    D = 2 * jt.dim
    dirs = uniform_directions(n_directions, D, seed)
    rays = _ray_set(D, n_rays)
    radii = region_radius(jt, rays, eps, **kw)
    widths = _support(radii, rays, dirs) + _support(radii, rays, -dirs)
    return JEvaluation(jt.peak()[0], widths, float(widths.mean()),
                       float(widths.std(ddof=1) / np.sqrt(len(widths))), eps, dirs)


def mean_width(jt: JTilde, eps: float = 0.5, n_directions: int = 64, seed: int = 0, **kw) -> tuple[float, float]:
    """Direction-averaged region width and its standard error."""
    ev = evaluate_region(jt, eps, n_directions, seed, **kw)
    return ev.mean_width, ev.stderr


def widths_along(jt: JTilde, directions: Sequence, eps: float = 0.5, n_rays: int | None = None, **kw) -> np.ndarray:
    dirs = np.atleast_2d(np.asarray(directions, float))
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    rays = _ray_set(dirs.shape[1], n_rays)
    radii = region_radius(jt, rays, eps, **kw)
    return _support(radii, rays, dirs) + _support(radii, rays, -dirs)
