"""Command-line entry point: ``weyleth --config run.json --out results/``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

__all__ = ["main", "emit_plot_script", "build_parser"]

_FLAG_KEYS = {"seed": "seed", "omega": "omega", "a": "a", "epsilon": "epsilon",
              "shell_levels": "shell_levels", "samples": "samples"}


def _csv_header(path: Path) -> tuple[list[str], int]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    return rows[0], len(rows) - 1


def emit_plot_script(csv_path) -> str:
    """Gnuplot script for a bundle CSV, chosen by its header."""
    path = Path(csv_path)
    header, n = _csv_header(path)
    if n == 0:
        raise ValueError(f"{path}: CSV has no data rows")
    name = path.name
    stem = path.stem
    common = [f"# plot script for {name}", "set datafile separator ','", "set key top right",
              "set terminal pngcairo size 900,600", f"set output '{stem}.png'"]
    if header == ["omega", "value", "count"]:
        body = ["set multiplot",
                "set xlabel 'omega'", "set ylabel 'mean |O_ij|^2'",
                f"plot '{name}' every ::1 using 1:2 with linespoints title 'shell average'",
                "set origin 0.55,0.5", "set size 0.4,0.4", "set logscale y", "unset key",
                f"plot '{name}' every ::1 using 1:2 with lines",
                "unset multiplot"]
    elif header == ["omega", "value", "stderr"]:
        body = ["set xlabel 'omega'", "set ylabel 'predicted mean |O_ij|^2'",
                f"plot '{name}' every ::1 using 1:2:3 with yerrorlines title 'semiclassical'"]
    elif header == ["x", "y", "fit"]:
        body = ["set xlabel 'x'", "set ylabel 'y'",
                f"plot '{name}' every ::1 using 1:2 with points pt 7 title 'data', \\",
                f"     '{name}' every ::1 using 1:3 with lines title 'fit'"]
    elif header == ["method", "value", "stderr"]:
        body = ["set style data histograms", "set style fill solid 0.6", "set ylabel 'w_b'",
                f"plot '{name}' every ::1 using 2:xtic(1) title 'bandwidth'"]
    else:
        raise ValueError(f"{path}: unrecognised CSV schema {header}")
    return "\n".join(common + body) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weyleth", description="Run a configured experiment and write a bundle.")
    ap.add_argument("--config", type=Path, help="JSON config file")
    ap.add_argument("--kind", help="experiment kind, when no config file is given")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--omega", type=int)
    ap.add_argument("--a", type=float)
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--shell-levels", dest="shell_levels", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--word", help="operator word for kind weyl-symbol")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    from .experiments import ConfigError, run

    if args.config is not None:
        try:
            cfg = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return 2
    else:
        cfg = {}
    if args.kind:
        cfg["kind"] = args.kind
    if args.word:
        cfg["word"] = args.word
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag)
        if v is not None:
            cfg[key] = v
    try:
        bundle = run(cfg, out=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    status = "ok" if bundle.passed else "FAILED"
    print(f"{bundle.config['kind']}: {status}; wrote {len(bundle.files)} file(s) and {bundle.manifest_path}")
    return 0 if bundle.passed else 1


if __name__ == "__main__":
    sys.exit(main())
