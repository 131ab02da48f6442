"""Spectra, eigenbasis matrix elements and shell-averaged band profiles."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg

__all__ = [
    "Spectrum",
    "diagonalize",
    "eigenbasis_elements",
    "mean_spacing",
    "density_of_states",
    "BandProfile",
    "band_profile",
    "half_width",
    "shell_mean_square",
    "eth_f_function",
    "diagonal_profile",
    "r_moments",
    "fit_scaling",
    "FitResult",
    "write_profile_csv",
    "write_scaling_csv",
    "write_spectrum_csv",
]


@dataclass(frozen=True)
class Spectrum:
    energies: np.ndarray
    vectors: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.energies)


def diagonalize(h) -> Spectrum:
    """Dense Hermitian eigensolve, eigenvalues ascending."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("Hamiltonian must be a square matrix")
    scale = max(np.abs(h).max(), 1e-300)
    if np.abs(h - h.conj().T).max() > 1e-10 * scale:
        raise ValueError("Hamiltonian is not Hermitian")
    E, V = linalg.eigh(h)
    return Spectrum(E, V)


def eigenbasis_elements(o, s: Spectrum) -> np.ndarray:
    """``O_ij = v_i^dag O v_j``; a 1-D ``o`` is taken as a diagonal operator."""
    o = np.asarray(o)
    V = s.vectors
    if o.ndim == 1:
        if o.shape[0] != V.shape[0]:
            raise ValueError("operator and spectrum dimensions differ")
        return (V.conj().T * o) @ V
    if o.shape != (V.shape[0], V.shape[0]):
        raise ValueError("operator and spectrum dimensions differ")
    return V.conj().T @ o @ V


def mean_spacing(s: Spectrum, e: float, n_levels: int = 50) -> float:
    """Mean level spacing around ``e`` from ``2 n_levels`` neighbouring levels."""
    E = s.energies
    i0 = int(np.clip(np.searchsorted(E, e), 1, len(E) - 1))
    lo, hi = max(i0 - n_levels, 0), min(i0 + n_levels, len(E) - 1)
    if hi <= lo:
        raise ValueError("spectrum too small for a spacing estimate")
    return float((E[hi] - E[lo]) / (hi - lo))


def density_of_states(s: Spectrum, window: float | None = None):
    """Gaussian-kernel level density ``rho(E)``; default width 3 mean spacings."""
    E = np.asarray(s.energies, dtype=float)
    if E.size == 0:
        raise ValueError("empty spectrum")
    if window is None:
        window = 3.0 * (E[-1] - E[0]) / max(E.size - 1, 1)
    if window <= 0:
        raise ValueError("kernel window must be positive")
    norm = 1.0 / (np.sqrt(2 * np.pi) * window)

    def rho(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        flat = x.reshape(-1)
        res = out.reshape(-1)
        for k in range(0, flat.size, 256):
            chunk = flat[k:k + 256]
            res[k:k + 256] = np.exp(-0.5 * ((chunk[:, None] - E[None, :]) / window) ** 2).sum(axis=1)
        return out * norm

    rho.window = window
    return rho


@dataclass
class BandProfile:
    """Shell-averaged ``|O_ij|^2`` binned in ``omega = E_i - E_j``.

    Empty bins hold NaN in ``values`` and zero in ``counts``.
    """

    omega: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    e_center: float
    shell_width: float
    bin_width: float
    spacing: float

    @property
    def central_index(self) -> int:
        return int(np.argmin(np.abs(self.omega)))

    @property
    def peak(self) -> float:
        return float(self.values[self.central_index])

    def symmetric_mean(self) -> np.ndarray:
        """Average of the profile with its mirror image (bins are symmetric)."""
        return 0.5 * (self.values + self.values[::-1])


def _pairs_in_shell(E, e_center, half):
    # pairs i != j with (E_i + E_j)/2 in [e - half, e + half]
    a = np.searchsorted(E, 2 * (e_center - half) - E, side="left")
    b = np.searchsorted(E, 2 * (e_center + half) - E, side="right")
    n = np.clip(b - a, 0, None)
    ii = np.repeat(np.arange(len(E)), n)
    jj = np.concatenate([np.arange(x, y) for x, y in zip(a, b) if y > x]) if n.sum() else np.array([], int)
    keep = ii != jj
    return ii[keep], jj[keep]


def band_profile(o_ij, s: Spectrum, e_center: float, shell_levels: int = 25,
                 bin_factor: float = 4.0, omega_max: float | None = None) -> BandProfile:
    """Shell average of ``|O_ij|^2`` over pairs with mean energy near ``e_center``.

    The e-shell has width ``shell_levels`` mean spacings; the omega bins are
    ``bin_factor`` spacings wide and centred on multiples of the bin width.
    """
    if shell_levels < 5:
        raise ValueError("shell_levels must be >= 5")
    E = np.asarray(s.energies, dtype=float)
    i0 = np.searchsorted(E, e_center)
    if i0 < shell_levels or i0 > len(E) - shell_levels:
        raise ValueError("e_center too close to the spectral edge")
    sp = mean_spacing(s, e_center, n_levels=min(50, i0 - 1, len(E) - i0 - 1))
    half = 0.5 * shell_levels * sp
    ii, jj = _pairs_in_shell(E, e_center, half)
    if ii.size == 0:
        raise ValueError("no pairs in the energy shell")
    w = E[ii] - E[jj]
    v = np.abs(np.asarray(o_ij)[ii, jj]) ** 2
    bw = bin_factor * sp
    kmax = int(np.ceil(np.abs(w).max() / bw))
    if omega_max is not None:
        kmax = min(kmax, int(np.floor(omega_max / bw)))
    k = np.rint(w / bw).astype(int)
    keep = np.abs(k) <= kmax
    k, v = k[keep] + kmax, v[keep]
    counts = np.bincount(k, minlength=2 * kmax + 1)
    sums = np.bincount(k, weights=v, minlength=2 * kmax + 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    if not np.any(counts):
        raise ValueError("empty profile")
    omega = (np.arange(2 * kmax + 1) - kmax) * bw
    return BandProfile(omega, values, counts, float(e_center), 2 * half, bw, sp)


def shell_mean_square(o_ij, s: Spectrum, e_center: float, shell_levels: int = 25) -> tuple[float, int]:
    """Mean of ``|O_ij|^2`` over all off-diagonal pairs in the e-shell, and the pair count."""
    E = np.asarray(s.energies, dtype=float)
    i0 = np.searchsorted(E, e_center)
    sp = mean_spacing(s, e_center, n_levels=min(50, i0 - 1, len(E) - i0 - 1))
    ii, jj = _pairs_in_shell(E, e_center, 0.5 * shell_levels * sp)
    if ii.size == 0:
        raise ValueError("no pairs in the energy shell")
    return float(np.mean(np.abs(np.asarray(o_ij)[ii, jj]) ** 2)), int(ii.size)


def half_width(profile: BandProfile, eps: float = 0.5) -> float:
    """Outermost ``|omega|`` where the profile is at least ``eps * peak``.

    Each side is located separately with linear interpolation to the next
    bin, and the two sides are averaged.
    """
    if not 0 < eps <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    vals = profile.values
    if np.all(np.isnan(vals)):
        raise ValueError("profile has no populated bins")
    c = profile.central_index
    peak = vals[c]
    if not np.isfinite(peak) or peak <= 0:
        raise ValueError("profile has no positive central peak")
    if eps == 1:
        return 0.0
    thr = eps * peak
    w = profile.omega
    sides = []
    for step in (1, -1):
        idx = np.arange(c, len(vals) if step == 1 else -1, step)
        good = idx[np.nan_to_num(vals[idx], nan=-np.inf) >= thr]
        last = good[-1]
        nxt = last + step
        if nxt < 0 or nxt >= len(vals) or not np.isfinite(vals[nxt]):
            sides.append(abs(w[last]))
            continue
        y0, y1 = vals[last], vals[nxt]
        frac = (y0 - thr) / (y0 - y1) if y0 != y1 else 0.0
        sides.append(abs(w[last] + frac * (w[nxt] - w[last])))
    if all(s == 0 for s in sides) and np.nanmax(np.delete(vals, c)) < thr and np.nanmin(vals) == peak:
        raise ValueError("profile is flat")
    return float(np.mean(sides))


def eth_f_function(profile: BandProfile, rho: float) -> np.ndarray:
    """``f(e, omega) = sqrt(rho(e) * profile)``; empty bins stay NaN."""
    return np.sqrt(rho * profile.values)


def diagonal_profile(o_ij, s: Spectrum, window: int = 25) -> tuple[np.ndarray, np.ndarray]:
    """Running mean of ``O_ii`` over ``window`` consecutive levels."""
    d = np.real(np.diagonal(np.asarray(o_ij)))
    E = np.asarray(s.energies)
    window = max(1, min(int(window), d.size))
    ker = np.ones(window) / window
    smooth = np.convolve(d, ker, mode="valid")
    centers = np.convolve(E, ker, mode="valid")
    return centers, smooth


def r_moments(o_ij, s: Spectrum, profile: BandProfile, min_count: int = 30) -> tuple[float, float, float]:
    """Mean, variance and excess kurtosis of ``r_ij = O_ij / sqrt(profile)``.

    ``rho^{-1/2} f`` equals the square root of the profile, so the density of
    states cancels from the normalization.  Only bins with at least
    ``min_count`` pairs are used.
    """
    E = np.asarray(s.energies)
    half = 0.5 * profile.shell_width
    ii, jj = _pairs_in_shell(E, profile.e_center, half)
    w = E[ii] - E[jj]
    kmax = (len(profile.omega) - 1) // 2
    k = np.rint(w / profile.bin_width).astype(int) + kmax
    ok = (k >= 0) & (k < len(profile.omega))
    ii, jj, k = ii[ok], jj[ok], k[ok]
    ok = (profile.counts[k] >= min_count) & (profile.values[k] > 0)
    if ok.sum() < min_count:
        raise ValueError("insufficient statistics for r moments")
    r = np.asarray(o_ij)[ii[ok], jj[ok]] / np.sqrt(profile.values[k[ok]])
    r = np.real(r)
    var = float(r.var())
    if var <= 1e-12 * max(float(np.mean(r * r)), 1e-300):
        return float(r.mean()), var, float("nan")  # degenerate: kurtosis undefined
    from scipy import stats
    return float(r.mean()), var, float(stats.kurtosis(r))


@dataclass(frozen=True)
class FitResult:
    model: str
    coefficients: tuple[float, float]
    r2: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.coefficients
        if self.model == "linear":
            return a * x + b
        return b * x ** a


def fit_scaling(xs, ys, model: str = "linear") -> FitResult:
    """Least-squares fit.

    ``linear``: coefficients ``(slope, intercept)``.  ``power``: coefficients
    ``(exponent, prefactor)`` fitted in log-log coordinates, with R^2
    measured there as well.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3 or x.size != y.size:
        raise ValueError("need at least 3 matching points")
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissae")
    if model == "power":
        if np.any(x <= 0) or np.any(y <= 0):
            raise ValueError("power fit needs positive data")
        X, Y = np.log(x), np.log(y)
    elif model == "linear":
        X, Y = x, y
    else:
        raise ValueError(f"unknown model {model!r}")
    slope, icpt = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + icpt)
    ss_tot = np.sum((Y - Y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    if model == "power":
        return FitResult(model, (float(slope), float(np.exp(icpt))), float(r2))
    return FitResult(model, (float(slope), float(icpt)), float(r2))


def _write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in rows:
            wr.writerow(["" if (isinstance(x, float) and np.isnan(x)) else repr(x) if isinstance(x, float) else x
                         for x in r])
    return path


def write_profile_csv(path, profile: BandProfile):
    rows = zip(map(float, profile.omega), map(float, profile.values), map(int, profile.counts))
    return _write_csv(path, ["omega", "value", "count"], rows)


def write_scaling_csv(path, xs, ys, fit: FitResult | None = None):
    xs = np.asarray(xs, float)
    fitted = fit(xs) if fit is not None else np.full(xs.shape, np.nan)
    return _write_csv(path, ["x", "y", "fit"], zip(map(float, xs), map(float, ys), map(float, fitted)))


def write_spectrum_csv(path, s: Spectrum):
    return _write_csv(path, ["index", "energy"], enumerate(map(float, s.energies)))
