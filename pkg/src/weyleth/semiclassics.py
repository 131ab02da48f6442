"""Microcanonical averages, the semiclassical off-diagonal predictor and bandwidth.

Phase points are ``z = (p_1..p_d, q_1..q_d)``.  For the LMG model subsystem A
is mode 1, so ``z_A = (p1, q1)`` sits in columns (0, 2) and ``z_B = (p2, q2)``
in columns (1, 3).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .jfunc import JTilde, jtilde_values, mean_width
from .weylcalc import PhasePolynomial

log = logging.getLogger(__name__)

__all__ = [
    "ShellSample",
    "sample_shell",
    "surface_area",
    "mean_grad_norm",
    "ball_volume",
    "LevelCurves",
    "level_curves",
    "OffdiagPrediction",
    "semiclassical_offdiag",
    "semiclassical_profile",
    "BandwidthEstimate",
    "bandwidth_estimate",
    "thermalization_time",
    "derive_seed",
    "observable_n1",
    "A_COLS",
    "B_COLS",
]

A_COLS = (0, 2)
B_COLS = (1, 3)
SQRT2 = math.sqrt(2.0)


def derive_seed(master: int, *counters: int) -> int:
    """Child seed for task ``counters`` under ``master`` (via SeedSequence)."""
    ss = np.random.SeedSequence([int(master), *map(int, counters)])
    return int(ss.generate_state(1)[0])


def ball_volume(dim: int, radius: float) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius ** dim


def _uniform_ball(rng, n, dim, radius):
    v = rng.normal(size=(n, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.uniform(size=(n, 1)) ** (1.0 / dim)
    return v * r


@dataclass
class ShellSample:
    energy: float
    width: float
    points: np.ndarray
    attempts: int
    seed: int
    radius: float = SQRT2
    dim: int = 4

    @property
    def acceptance(self) -> float:
        return len(self.points) / self.attempts

    @property
    def shell_volume(self) -> float:
        return self.acceptance * ball_volume(self.dim, self.radius)


def sample_shell(H: Callable, E: float, dE: float, n_target: int = 20_000, seed: int = 0,
                 dim: int = 4, radius: float = SQRT2, batch: int = 200_000,
                 min_acceptance: float = 1e-6) -> ShellSample:
    """Uniform points of the ``dim``-ball with ``|H - E| <= dE / 2`` (rejection sampling)."""
    if dE <= 0:
        raise ValueError("shell width must be positive")
    rng = np.random.default_rng(seed)
    kept, attempts, n = [], 0, 0
    while n < n_target:
        z = _uniform_ball(rng, batch, dim, radius)
        hit = np.abs(H(z) - E) <= dE / 2
        attempts += batch
        if hit.any():
            kept.append(z[hit])
            n += int(hit.sum())
        if n / attempts < min_acceptance and attempts >= 5 * batch:
            raise ValueError(f"acceptance {n / attempts:.2e} too small: E={E} outside the reachable range?")
    pts = np.concatenate(kept)
    # trim to n_target and recount attempts proportionally is biased; keep all hits
    assert np.all(np.abs(H(pts) - E) <= dE / 2), "shell condition violated"
    return ShellSample(float(E), float(dE), pts, attempts, int(seed), radius, dim)


def surface_area(sample: ShellSample) -> float:
    """``S(E) = int delta(H - E) dz`` estimated as shell volume / dE."""
    if len(sample.points) == 0:
        raise ValueError("empty shell sample")
    return sample.shell_volume / sample.width


def mean_grad_norm(sample: ShellSample, grad: Callable, restrict=None) -> tuple[float, float]:
    """Shell average of ``|grad H|`` (or of the components ``restrict``) and its standard error."""
    g = np.asarray(grad(sample.points))
    if restrict is not None:
        g = g[..., list(restrict)]
    norms = np.linalg.norm(g, axis=-1)
    bad = ~np.isfinite(norms)
    if bad.mean() > 0.01:
        raise ValueError("gradient singular at more than 1% of shell points")
    norms = norms[~bad]
    return float(norms.mean()), float(norms.std(ddof=1) / np.sqrt(norms.size))


# ---------------------------------------------------------------------------
# level curves in the A plane at fixed z_B


@dataclass
class LevelCurves:
    """Quadrature nodes on ``{h(z_A; z_B) = E}`` with weights ``dl / |grad_A h|``.

    ``points[k]``/``weights[k]`` belong to ``z_B[k]``; ragged lists.
    """

    energy: float
    z_B: np.ndarray
    points: list
    weights: list

    def measures(self) -> np.ndarray:
        return np.array([w.sum() for w in self.weights])


def _assemble(zA, zB):
    # (p1, p2, q1, q2) from A = (p1, q1) and B = (p2, q2)
    out = np.empty(np.broadcast_shapes(zA.shape, zB.shape)[:-1] + (4,))
    out[..., 0], out[..., 2] = zA[..., 0], zA[..., 1]
    out[..., 1], out[..., 3] = zB[..., 0], zB[..., 1]
    return out


def _interior_points(H, zB, R, n_grid=41):
    # grid argmin of h over the A disk for each z_B
    t = np.linspace(-1, 1, n_grid)
    gx, gy = np.meshgrid(t, t, indexing="ij")
    inside = gx ** 2 + gy ** 2 <= 0.95
    unit = np.stack([gx[inside], gy[inside]], axis=-1)
    zA = unit[None, :, :] * R[:, None, None]
    h = H(_assemble(zA, zB[:, None, :]))
    return zA[np.arange(len(zB)), np.argmin(h, axis=1)]


def _bisect_roots(fun, lo, hi, flo, n_bisect):
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _split_by_sample(ib, pts, w, nb):
    order = np.argsort(ib, kind="stable")
    ib, pts, w = ib[order], pts[order], w[order]
    bounds = np.searchsorted(ib, np.arange(nb + 1))
    return ([pts[bounds[k]:bounds[k + 1]] for k in range(nb)],
            [w[bounds[k]:bounds[k + 1]] for k in range(nb)])


def _polar_nodes(H, grad, E, zB, R, n_angles, n_radial, n_bisect, centers):
    nb = len(zB)
    c = _interior_points(H, zB, R) if centers is None else np.asarray(centers)
    phi = (np.arange(n_angles) + 0.5) * 2 * np.pi / n_angles
    u = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    # distance from c to the disk boundary along u: |c + s u| = R
    cu = c @ u.T
    cc = np.sum(c * c, axis=1)[:, None]
    smax = -cu + np.sqrt(np.clip(cu ** 2 - cc + R[:, None] ** 2, 0.0, None))
    frac = np.linspace(0.0, 1.0, n_radial + 1)
    s = smax[:, :, None] * frac[None, None, :]
    zA = c[:, None, None, :] + s[..., None] * u[None, :, None, :]
    f = H(_assemble(zA, zB[:, None, None, :])) - E
    ib, ia, ir = np.nonzero(np.sign(f[..., :-1]) * np.sign(f[..., 1:]) < 0)
    sr = _bisect_roots(lambda m: H(_assemble(c[ib] + m[:, None] * u[ia], zB[ib])) - E,
                       s[ib, ia, ir], s[ib, ia, ir + 1], f[ib, ia, ir], n_bisect)
    pts = c[ib] + sr[:, None] * u[ia]
    g = grad(_assemble(pts, zB[ib]))[..., list(A_COLS)]
    radial = np.abs(np.sum(g * u[ia], axis=1))
    w = sr * (2 * np.pi / n_angles) / np.maximum(radial, 1e-300)
    return _split_by_sample(ib, pts, w, nb)


def _scanline_nodes(H, grad, E, zB, R, n_lines, n_samples, n_bisect):
    # two line families; node weights |d_perp h| / |grad h|^2 are bounded
    nb = len(zB)
    all_ib, all_pts, all_w = [], [], []
    x = (np.arange(n_lines) + 0.5) / n_lines * 2 - 1  # in units of R
    dx = 2.0 * R / n_lines
    frac = np.linspace(-1.0, 1.0, n_samples + 1)
    for axis in (0, 1):
        other = 1 - axis
        xs = x[None, :] * R[:, None]                       # (nb, nl)
        half = np.sqrt(np.clip(R[:, None] ** 2 - xs ** 2, 0.0, None))
        ys = half[..., None] * frac[None, None, :]          # (nb, nl, ns)
        zA = np.empty(ys.shape + (2,))
        zA[..., axis] = xs[..., None]
        zA[..., other] = ys
        f = H(_assemble(zA, zB[:, None, None, :])) - E
        ib, il, isamp = np.nonzero(np.sign(f[..., :-1]) * np.sign(f[..., 1:]) < 0)
        xv = xs[ib, il]

        def at(yv, xv=xv, ib=ib, axis=axis, other=other):
            z = np.empty(yv.shape + (2,))
            z[:, axis], z[:, other] = xv, yv
            return z

        yr = _bisect_roots(lambda m: H(_assemble(at(m), zB[ib])) - E,
                           ys[ib, il, isamp], ys[ib, il, isamp + 1], f[ib, il, isamp], n_bisect)
        pts = at(yr)
        g = grad(_assemble(pts, zB[ib]))[..., list(A_COLS)]
        g2 = np.sum(g * g, axis=1)
        w = dx[ib] * np.abs(g[:, other]) / np.maximum(g2, 1e-300)
        all_ib.append(ib)
        all_pts.append(pts)
        all_w.append(w)
    return _split_by_sample(np.concatenate(all_ib), np.concatenate(all_pts), np.concatenate(all_w), nb)


def level_curves(H: Callable, grad: Callable, E: float, z_B, n_nodes: int = 96,
                 method: str = "scanline", n_radial: int = 48, n_bisect: int = 40,
                 centers=None) -> LevelCurves:
    """Quadrature of the level curves ``H(z_A, z_B) = E`` in the A plane, per z_B.

    ``scanline`` (default): lines parallel to each A axis, ``n_nodes`` per
    family.  A root on a line parallel to axis ``y`` gets weight
    ``dx |d_y h| / |grad h|^2``; the two families add up to the curve measure
    ``dl / |grad h|`` with bounded weights and every curve component is hit.
    ``polar``: ``n_nodes`` rays from an interior point (grid minimum of h),
    weight ``s dphi / |grad h . u|``, which is singular where a ray grazes
    the curve.
    """
    zB = np.atleast_2d(np.asarray(z_B, dtype=float))
    R = np.sqrt(np.clip(2.0 - np.sum(zB ** 2, axis=1), 0.0, None))
    if method not in ("scanline", "polar"):
        raise ValueError(f"unknown curve quadrature {method!r}")
    points, weights = [], []
    chunk = max(1, 400_000 // (n_nodes * (n_radial + 1)))
    for k in range(0, len(zB), chunk):
        sl = slice(k, k + chunk)
        if method == "scanline":
            pts, ws = _scanline_nodes(H, grad, E, zB[sl], R[sl], n_nodes, n_radial, n_bisect)
        else:
            cen = None if centers is None else np.asarray(centers)[sl]
            pts, ws = _polar_nodes(H, grad, E, zB[sl], R[sl], n_nodes, n_radial, n_bisect, cen)
        points += pts
        weights += ws
    if all(len(p) == 0 for p in points):
        log.warning("no level-curve points at E=%g for any z_B sample", E)
    return LevelCurves(float(E), zB, points, weights)


def _uniform_disk(rng, n, radius, qmc: bool = True):
    if qmc:
        from scipy.stats import qmc as _qmc
        u = _qmc.Sobol(2, scramble=True, seed=rng).random(n)
    else:
        u = rng.uniform(size=(n, 2))
    r = radius * np.sqrt(u[:, 0])
    t = 2 * np.pi * u[:, 1]
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)


def observable_n1(hbar: float = 0.0) -> PhasePolynomial:
    """Weyl symbol of ``K_11 / Omega`` on the A plane: ``(p^2 + q^2)/2 - hbar/2``."""
    p, q = PhasePolynomial.p(1, 1), PhasePolynomial.q(1, 1)
    return 0.5 * (p * p + q * q) - 0.5 * hbar * PhasePolynomial.constant(1.0, 1)


def _box_for(R):
    # circumscribed square of the A disk, as (p, q) x (lo, hi)
    return np.stack([np.stack([-R, R], axis=-1)] * 2, axis=-2)


@dataclass
class OffdiagPrediction:
    omega: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    e: float
    observable_mean: float
    config: dict = field(default_factory=dict)


def _shell_mean_of(o_cl: PhasePolynomial, curves: LevelCurves) -> float:
    num = den = 0.0
    for pts, w in zip(curves.points, curves.weights):
        if len(pts):
            num += float(np.sum(w * np.real(o_cl(pts))))
            den += float(w.sum())
    return num / den if den else 0.0


def semiclassical_profile(H: Callable, grad: Callable, o_cl: PhasePolynomial, e: float, omegas,
                          hbar: float, n_zb: int = 256, n_nodes: int = 96, seed: int = 0,
                          subtract_mean: bool = True, qmc: bool = False,
                          method: str = "scanline") -> OffdiagPrediction:
    """Predicted shell average of ``|O_ij|^2`` at ``E_i = e + w/2``, ``E_j = e - w/2``.

    ``(2 pi hbar)^{d_B} / (S_i S_j) int dz_B sum_{C_i} sum_{C_j} J_A(mid, diff)``
    with ``J_A = J~_A(diff / hbar) / (2 pi hbar)`` on the box circumscribing the
    A disk at each z_B.  The same z_B samples serve every omega.  With
    ``subtract_mean`` the microcanonical mean of ``O`` at ``e`` is removed
    first, since off-diagonal elements only carry the fluctuating part.
    """
    rng = np.random.default_rng(seed)
    zB = _uniform_disk(rng, n_zb, SQRT2, qmc)
    R = np.sqrt(np.clip(2.0 - np.sum(zB ** 2, axis=1), 0.0, None))
    boxes = _box_for(R)
    area = np.pi * 2.0
    center_curves = level_curves(H, grad, e, zB, n_nodes, method)
    o_mean = _shell_mean_of(o_cl, center_curves)
    o_eff = o_cl - o_mean * PhasePolynomial.constant(1.0, o_cl.dim) if subtract_mean else o_cl
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    vals, errs = [], []
    cache: dict = {}

    def curves_at(E):
        key = round(E, 12)
        if key not in cache:
            cache[key] = level_curves(H, grad, E, zB, n_nodes, method)
        return cache[key]

    for w in omegas:
        ci, cj = curves_at(e + w / 2), curves_at(e - w / 2)
        per_zb = np.zeros(n_zb)
        for k in range(n_zb):
            pi_, pj = ci.points[k], cj.points[k]
            if len(pi_) == 0 or len(pj) == 0:
                continue
            mid = 0.5 * (pi_[:, None, :] + pj[None, :, :])
            diff = (pj[None, :, :] - pi_[:, None, :]) / hbar
            jt = jtilde_values(o_eff, mid, diff, boxes[k])
            per_zb[k] = np.einsum("i,ij,j->", ci.weights[k], jt, cj.weights[k]) / (2 * np.pi * hbar)
        si, sj = ci.measures(), cj.measures()
        Si, Sj = area * si.mean(), area * sj.mean()
        num = area * per_zb.mean() * (2 * np.pi * hbar)
        val = num / (Si * Sj) if Si > 0 and Sj > 0 else 0.0
        err = area * per_zb.std(ddof=1) / np.sqrt(n_zb) * (2 * np.pi * hbar) / (Si * Sj) if Si * Sj > 0 else 0.0
        vals.append(val)
        errs.append(err)
    cfg = dict(n_zb=n_zb, n_nodes=n_nodes, seed=seed, subtract_mean=subtract_mean, hbar=hbar,
               qmc=qmc, method=method)
    return OffdiagPrediction(omegas, np.array(vals), np.array(errs), float(e), o_mean, cfg)


def semiclassical_offdiag(H: Callable, grad: Callable, o_cl: PhasePolynomial, E_i: float, E_j: float,
                          hbar: float, **kw) -> tuple[float, float]:
    """Single-pair form of :func:`semiclassical_profile`: ``(value, stderr)``."""
    pred = semiclassical_profile(H, grad, o_cl, 0.5 * (E_i + E_j), [E_i - E_j], hbar, **kw)
    return float(pred.values[0]), float(pred.stderr[0])


# ---------------------------------------------------------------------------
# bandwidth


@dataclass
class BandwidthEstimate:
    value: float
    stderr: float
    grad_mean: float
    width_mean: float
    hbar: float
    eps: float


def bandwidth_estimate(sample: ShellSample, grad: Callable, o_cl: PhasePolynomial, hbar: float,
                       eps: float = 0.5, restrict=A_COLS, n_points: int = 64, n_directions: int = 64,
                       seed: int = 0, box_fn: Callable | None = None) -> BandwidthEstimate:
    """``w_b = (1/2) hbar <|grad_A H|> <delta_eps J~_A>`` over a shell sample.

    The J~ widths are averaged over ``n_points`` shell points (base point = the
    A components, box = circumscribed square of the A disk unless ``box_fn``
    is given) and ``n_directions`` random directions each.
    """
    g_mean, g_err = mean_grad_norm(sample, grad, restrict)
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(sample.points), size=min(n_points, len(sample.points)), replace=False)
    widths, werrs = [], []
    for n, idx in enumerate(pick):
        z = sample.points[idx]
        zA = z[list(restrict)]
        zB = np.delete(z, list(restrict))
        if box_fn is None:
            R = math.sqrt(max(2.0 - float(np.sum(zB ** 2)), 0.0))
            box = _box_for(np.array(R))
        else:
            box = box_fn(z)
        jt = JTilde(o_cl, zA, box)
        m, e = mean_width(jt, eps, n_directions, seed=derive_seed(seed, n))
        widths.append(m)
        werrs.append(e)
    widths = np.asarray(widths)
    w_mean = float(widths.mean())
    w_err = float(widths.std(ddof=1) / np.sqrt(len(widths))) if len(widths) > 1 else float(werrs[0])
    value = 0.5 * hbar * g_mean * w_mean
    rel = math.hypot(g_err / g_mean, w_err / w_mean)
    return BandwidthEstimate(value, value * rel, g_mean, w_mean, hbar, eps)


def thermalization_time(w_b: float, hbar: float) -> float:
    """Order-of-magnitude relaxation time ``tau = hbar / w_b``."""
    if w_b <= 0:
        raise ValueError("bandwidth must be positive")
    return hbar / w_b
