"""Compare the quantum band profile with its semiclassical prediction.

Uses the CLI pipeline so the outputs land in a bundle with a manifest and
gnuplot scripts.  A small Omega and few samples keep this under a minute.

Run: python3 demos/semiclassical_vs_quantum.py [outdir]
"""
import json
import sys

from weyleth.experiments import run

out = sys.argv[1] if len(sys.argv) > 1 else "demo-compare"
bundle = run({"kind": "semiclassical-compare", "omega": 30, "samples": 64, "n_nodes": 48,
              "omega_grid": [0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.6]}, out=out)
print(json.dumps(bundle.results, indent=2, default=float))
print("files:", ", ".join(str(f) for f in bundle.files))
