"""Config-driven pipelines that turn the library into CSV/JSON artifact bundles.

A config is a flat JSON object.  ``kind`` selects the pipeline; every other key
must be known to that pipeline (see ``data/experiment-config.schema.json``),
and missing keys take the defaults listed in :data:`SCHEMA`.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .basis import build_basis
from .lmg import LmgParams, build_hamiltonian, classical_H, grad_H, load_params
from .oracle1d import verify_batch, write_oracle_report
from .semiclassics import (
    bandwidth_estimate,
    observable_n1,
    sample_shell,
    semiclassical_profile,
)
from .spectral import (
    BandProfile,
    Spectrum,
    band_profile,
    density_of_states,
    diagonalize,
    eigenbasis_elements,
    fit_scaling,
    half_width,
    shell_mean_square,
    write_profile_csv,
    write_scaling_csv,
)
from .weylcalc import OperatorWord, weyl_order_decompose, weyl_symbol

log = logging.getLogger(__name__)

MANIFEST_SCHEMA = "weyleth-manifest/1"
WORKERS_ENV = "WEYLETH_WORKERS"

KINDS = ("oracle1d", "band-profile", "semiclassical-compare", "scaling-hbar", "scaling-a",
         "bandwidth", "weyl-symbol")

_LMG = {"band-profile", "semiclassical-compare", "scaling-hbar", "scaling-a", "bandwidth"}
_BAND = {"band-profile", "semiclassical-compare", "scaling-hbar", "scaling-a", "bandwidth"}

# key -> (accepted python types, default, kinds using it; None = all)
SCHEMA: dict[str, tuple[tuple[type, ...], object, set | None]] = {
    "kind": ((str,), None, None),
    "seed": ((int,), 0, None),
    "out": ((str,), "out", None),
    "params": ((dict,), {}, _LMG),
    "omega": ((int,), 60, _BAND - {"scaling-hbar"}),
    "a": ((int, float), 1.0, _BAND - {"scaling-a"}),
    "shell_levels": ((int,), 25, _BAND),
    "bin_factor": ((int, float), 4.0, _BAND),
    "epsilon": ((int, float), 0.5, _BAND),
    "omegas": ((list,), [40, 50, 60, 80, 100], {"scaling-hbar"}),
    "a_values": ((list,), [0.6, 0.8, 1.0, 1.2, 1.4], {"scaling-a"}),
    "omega_grid": ((list,), [round(0.1 * k, 1) for k in range(13)], {"semiclassical-compare"}),
    "samples": ((int,), 256, {"semiclassical-compare", "bandwidth"}),
    "n_nodes": ((int,), 96, {"semiclassical-compare"}),
    "subtract_mean": ((bool,), True, {"semiclassical-compare"}),
    "shell_dE": ((int, float), 0.2, {"bandwidth"}),
    "n_directions": ((int,), 64, {"bandwidth"}),
    "words": ((list,), ["q", "p", "q^2", "q p"], {"oracle1d"}),
    "n_max": ((int,), 6, {"oracle1d"}),
    "hbars": ((list,), [1.0, 0.5], {"oracle1d"}),
    "grid_points": ((int,), 256, {"oracle1d"}),
    "rtol": ((int, float), 1e-3, {"oracle1d"}),
    "word": ((str,), "q p q p", {"weyl-symbol"}),
}


class ConfigError(ValueError):
    """Invalid experiment config; the message starts with the offending key path."""


def _check_type(path: str, value, types):
    if bool in types:
        ok = isinstance(value, bool)
    else:
        ok = isinstance(value, types) and not isinstance(value, bool)
    if not ok:
        names = "/".join(t.__name__ for t in types)
        raise ConfigError(f"{path}: expected {names}, got {type(value).__name__} {value!r}")


def validate_config(raw: dict) -> dict:
    """Resolve defaults and reject unknown or ill-typed keys."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"config.kind: expected one of {list(KINDS)}, got {kind!r}")
    for key in raw:
        if key not in SCHEMA:
            raise ConfigError(f"config.{key}: unknown key")
        kinds = SCHEMA[key][2]
        if kinds is not None and kind not in kinds:
            raise ConfigError(f"config.{key}: not used by kind {kind!r}")
    cfg = {}
    for key, (types, default, kinds) in SCHEMA.items():
        if kinds is not None and kind not in kinds:
            continue
        value = raw.get(key, default)
        _check_type(f"config.{key}", value, types)
        cfg[key] = json.loads(json.dumps(value))
    _check_ranges(cfg)
    return cfg


def _check_ranges(cfg: dict):
    def need(cond, path, msg):
        if not cond:
            raise ConfigError(f"config.{path}: {msg}")

    need(cfg["seed"] >= 0, "seed", "must be non-negative")
    if "params" in cfg:
        try:
            LmgParams.from_config(cfg["params"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"config.params: {exc}") from None
    if "omega" in cfg:
        need(cfg["omega"] >= 4, "omega", "must be >= 4")
    if "a" in cfg:
        need(cfg["a"] > 0, "a", "must be positive")
    if "shell_levels" in cfg:
        need(cfg["shell_levels"] >= 5, "shell_levels", "must be >= 5")
    if "bin_factor" in cfg:
        need(cfg["bin_factor"] > 0, "bin_factor", "must be positive")
    if "epsilon" in cfg:
        need(0 < cfg["epsilon"] < 1, "epsilon", "must lie in (0, 1)")
    for key, cond, msg in (("omegas", lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 4,
                            "integer >= 4"),
                           ("a_values", lambda v: isinstance(v, (int, float)) and v > 0, "positive number"),
                           ("omega_grid", lambda v: isinstance(v, (int, float)) and v >= 0, "number >= 0"),
                           ("hbars", lambda v: isinstance(v, (int, float)) and v > 0, "positive number"),
                           ("words", lambda v: isinstance(v, str), "operator word string")):
        if key in cfg:
            for n, v in enumerate(cfg[key]):
                need(cond(v), f"{key}[{n}]", f"expected {msg}, got {v!r}")
    for key in ("omegas", "a_values"):
        if key in cfg:
            need(len(cfg[key]) >= 3, key, "a scaling fit needs at least 3 values")
    if "omega_grid" in cfg:
        need(len(cfg["omega_grid"]) >= 2 and cfg["omega_grid"][0] == 0, "omega_grid",
             "needs at least 2 values starting at 0")
    for key in ("samples", "n_nodes", "n_directions", "grid_points", "n_max"):
        if key in cfg:
            need(cfg[key] >= (1 if key == "n_max" else 8), key, "too small")
    if "word" in cfg:
        try:
            OperatorWord.parse(cfg["word"])
        except ValueError as exc:
            raise ConfigError(f"config.word: {exc}") from None


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"env.{WORKERS_ENV}: expected an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"env.{WORKERS_ENV}: must be >= 1")
    return n


def _pmap(fn, items):
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# LMG building blocks


@dataclass
class LmgRun:
    """Spectrum and ``K_11 / Omega`` in the eigenbasis for one parameter set."""

    params: LmgParams
    spectrum: Spectrum
    o_ij: np.ndarray

    @property
    def e_mid(self) -> float:
        E = self.spectrum.energies
        return 0.5 * float(E[0] + E[-1])


def lmg_run(params: LmgParams) -> LmgRun:
    basis = build_basis(params.omega)
    s = diagonalize(build_hamiltonian(params, basis))
    o = eigenbasis_elements(basis.n1 / params.omega, s)
    return LmgRun(params, Spectrum(s.energies, None), o)


def _params(cfg: dict, **over) -> LmgParams:
    base = LmgParams.from_config(cfg["params"]) if cfg.get("params") else load_params()
    return base.with_(**over)


def _profile(run: LmgRun, cfg: dict) -> BandProfile:
    return band_profile(run.o_ij, run.spectrum, run.e_mid, cfg["shell_levels"], cfg["bin_factor"])


def _band_summary(run: LmgRun, prof: BandProfile, cfg: dict) -> dict:
    w_b = half_width(prof, cfg["epsilon"])
    msq, npairs = shell_mean_square(run.o_ij, run.spectrum, run.e_mid, cfg["shell_levels"])
    rho = density_of_states(run.spectrum, window=prof.shell_width)(run.e_mid)
    vals = prof.values[np.isfinite(prof.values) & (prof.values > 0)]
    return dict(omega=run.params.omega, a=run.params.a, hbar=run.params.hbar, dim=len(run.spectrum.energies),
                e_center=run.e_mid, spacing=prof.spacing, peak=prof.peak, w_b=w_b,
                central_is_max=bool(prof.central_index == int(np.nanargmax(prof.values))),
                decades=float(np.log10(prof.peak / vals.min())), mean_square=msq, pairs=npairs,
                rho=float(rho))


# ---------------------------------------------------------------------------
# pipelines; each returns (results dict, written file names, passed flag)


def _run_oracle(cfg, out: Path):
    checks = verify_batch(tuple(cfg["words"]), cfg["n_max"], tuple(cfg["hbars"]), cfg["grid_points"])
    write_oracle_report(out / "oracle_report.json", checks)
    worst = max(c.rel_error for c in checks)
    ok = all(c.rel_error < cfg["rtol"] for c in checks)
    return dict(cases=len(checks), max_rel_error=worst), ["oracle_report.json"], ok


def _run_band(cfg, out: Path):
    run = lmg_run(_params(cfg, omega=cfg["omega"], a=cfg["a"]))
    prof = _profile(run, cfg)
    write_profile_csv(out / "profile.csv", prof)
    return _band_summary(run, prof, cfg), ["profile.csv"], True


def _prediction_profile(pred) -> BandProfile:
    # the prediction is even in omega; mirror it onto a symmetric grid
    w, v = pred.omega, pred.values
    omega = np.concatenate([-w[:0:-1], w])
    vals = np.concatenate([v[:0:-1], v])
    step = float(w[1] - w[0])
    return BandProfile(omega, vals, np.ones(len(vals), int), pred.e, 0.0, step, float("nan"))


def _write_rows(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in rows:
            wr.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])


def _run_compare(cfg, out: Path):
    params = _params(cfg, omega=cfg["omega"], a=cfg["a"])
    run = lmg_run(params)
    prof = _profile(run, cfg)
    write_profile_csv(out / "profile.csv", prof)
    summary = _band_summary(run, prof, cfg)
    H = lambda z: classical_H(params, z, check=False)  # noqa: E731
    g = lambda z: grad_H(params, z, check=False)  # noqa: E731
    pred = semiclassical_profile(H, g, observable_n1(params.hbar), run.e_mid, cfg["omega_grid"], params.hbar,
                                 n_zb=cfg["samples"], n_nodes=cfg["n_nodes"], seed=cfg["seed"],
                                 subtract_mean=cfg["subtract_mean"])
    _write_rows(out / "semiclassical.csv", ["omega", "value", "stderr"],
                zip(pred.omega, pred.values, pred.stderr))
    sc_width = half_width(_prediction_profile(pred), cfg["epsilon"])
    summary.update(sc_peak=float(pred.values[0]), sc_peak_stderr=float(pred.stderr[0]),
                   sc_half_width=sc_width, observable_mean=pred.observable_mean,
                   peak_ratio=float(pred.values[0] / prof.peak), width_ratio=sc_width / summary["w_b"])
    return summary, ["profile.csv", "semiclassical.csv"], True


def _scan(cfg, out: Path, key: str, over: str):
    values = cfg[key]

    def one(v):
        kw = {over: v}
        if over == "a":
            kw["omega"] = cfg["omega"]
        else:
            kw["a"] = cfg["a"]
        run = lmg_run(_params(cfg, **kw))
        return _band_summary(run, _profile(run, cfg), cfg)

    rows = _pmap(one, values)
    x = np.array([r["hbar"] if over == "omega" else r["a"] for r in rows])
    wb = np.array([r["w_b"] for r in rows])
    fit = fit_scaling(x, wb, "linear")
    write_scaling_csv(out / "scaling.csv", x, wb, fit)
    files = ["scaling.csv"]
    res = dict(points=rows, fit=dict(model="linear", slope=fit.coefficients[0], intercept=fit.coefficients[1],
                                     r2=fit.r2, intercept_fraction=abs(fit.coefficients[1]) / wb.max()))
    if over == "omega":
        for name, col in (("mean_square", "scaling_mean.csv"), ("rho", "scaling_rho.csv")):
            y = np.array([r[name] for r in rows])
            f = fit_scaling(x, y, "power")
            write_scaling_csv(out / col, x, y, f)
            files.append(col)
            res[f"fit_{name}"] = dict(model="power", exponent=f.coefficients[0], prefactor=f.coefficients[1],
                                      r2=f.r2)
    return res, files, True


def _run_bandwidth(cfg, out: Path):
    params = _params(cfg, omega=cfg["omega"], a=cfg["a"])
    run = lmg_run(params)
    summary = _band_summary(run, _profile(run, cfg), cfg)
    H = lambda z: classical_H(params, z, check=False)  # noqa: E731
    g = lambda z: grad_H(params, z, check=False)  # noqa: E731
    sample = sample_shell(H, run.e_mid, cfg["shell_dE"], n_target=max(4 * cfg["samples"], 1000),
                          seed=cfg["seed"])
    est = bandwidth_estimate(sample, g, observable_n1(params.hbar), params.hbar, cfg["epsilon"],
                             n_points=cfg["samples"], n_directions=cfg["n_directions"], seed=cfg["seed"])
    _write_rows(out / "bandwidth.csv", ["method", "value", "stderr"],
                [("quantum", summary["w_b"], float("nan")), ("semiclassical", est.value, est.stderr)])
    summary.update(sc_w_b=est.value, sc_w_b_stderr=est.stderr, grad_mean=est.grad_mean,
                   width_mean=est.width_mean)
    return summary, ["bandwidth.csv"], True


def _run_weyl(cfg, out: Path):
    word = OperatorWord.parse(cfg["word"])
    sym = weyl_symbol(word)
    decomp = [dict(hbar_power=k, symbol=p.to_text()) for k, p in weyl_order_decompose(word)]
    doc = dict(schema="weyl-symbol/1", word=cfg["word"], dim=sym.dim, symbol=sym.to_text(), display=str(sym),
               decomposition=decomp)
    (out / "symbol.json").write_text(json.dumps(doc, indent=2) + "\n")
    return dict(symbol=sym.to_text()), ["symbol.json"], True


_PIPELINES = {
    "oracle1d": _run_oracle,
    "band-profile": _run_band,
    "semiclassical-compare": _run_compare,
    "scaling-hbar": lambda c, o: _scan(c, o, "omegas", "omega"),
    "scaling-a": lambda c, o: _scan(c, o, "a_values", "a"),
    "bandwidth": _run_bandwidth,
    "weyl-symbol": _run_weyl,
}


@dataclass
class Bundle:
    out: Path
    config: dict
    results: dict
    files: list[str] = field(default_factory=list)
    passed: bool = True

    @property
    def manifest_path(self) -> Path:
        return self.out / "manifest.json"


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return None if not np.isfinite(x) else float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def run(config: dict, out: str | Path | None = None) -> Bundle:
    """Validate ``config``, run its pipeline and write the bundle plus manifest."""
    cfg = validate_config(config)
    if out is not None:
        cfg["out"] = str(out)
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    np.random.seed(cfg["seed"] % 2 ** 32)
    log.info("running %s into %s", cfg["kind"], outdir)
    try:
        results, files, ok = _PIPELINES[cfg["kind"]](cfg, outdir)
    except (ValueError, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise RuntimeError(f"{cfg['kind']} pipeline failed: {type(exc).__name__}: {exc}") from exc

    from .cli import emit_plot_script  # plot scripts live with the CLI surface

    for name in list(files):
        if name.endswith(".csv"):
            gp = Path(name).with_suffix(".gp").name
            (outdir / gp).write_text(emit_plot_script(outdir / name))
            files.append(gp)
    bundle = Bundle(outdir, cfg, _jsonable(results), files, ok)
    manifest = dict(schema=MANIFEST_SCHEMA, version=__version__, config=cfg, config_hash=config_hash(cfg),
                    files=sorted(files), results=bundle.results, passed=ok,
                    timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    bundle.manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return bundle
